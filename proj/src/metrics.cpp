#include "gvfpred/metrics.hpp"

#include <cmath>
#include <limits>

#include "gvfpred/util.hpp"

namespace gvfpred {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

MetricState& ew_welford_update(MetricState& m, double x) {
    if (m.count == 0) {
        m.ew_mean = x;
        m.ew_var = 0.0;
        m.count = 1;
        return m;
    }
    const double d = x - m.ew_mean;
    m.ew_mean += m.decay * d;
    m.ew_var = (1.0 - m.decay) * (m.ew_var + m.decay * d * d);
    m.count += 1;
    return m;
}

int return_horizon(double gamma, double tol) {
    if (gamma < 0.0 || gamma >= 1.0) throw DataError("return_horizon: gamma must be in [0,1)");
    if (!(tol > 0.0 && tol < 1.0)) throw DataError("return_horizon: tol must be in (0,1)");
    if (gamma == 0.0) return 1;
    return static_cast<int>(std::ceil(std::log(tol) / std::log(gamma)));
}

TruncatedReturn truncated_return(std::span<const double> future, double gamma, double tol) {
    TruncatedReturn out;
    out.horizon = return_horizon(gamma, tol);
    const std::size_t k = static_cast<std::size_t>(out.horizon);
    out.partial = future.size() < k;
    const std::size_t n = std::min(future.size(), k);
    double g = 0.0;
    double w = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        g += w * future[j];
        w *= gamma;
    }
    out.value = g;
    return out;
}

ReturnSeries return_series(Eigen::Ref<const Eigen::VectorXd> cumulants, double gamma, double tol) {
    ReturnSeries out;
    out.horizon = return_horizon(gamma, tol);
    const auto n = static_cast<std::size_t>(cumulants.size());
    out.values.resize(n, kNaN);
    out.partial.resize(n, true);
    std::span<const double> all(cumulants.data(), n);
    for (std::size_t t = 0; t < n; ++t) {
        // return at t accumulates cumulants from t+1 on
        auto r = truncated_return(all.subspan(t + 1 > n ? n : t + 1), gamma, tol);
        out.values[t] = r.value;
        out.partial[t] = r.partial;
    }
    return out;
}

std::vector<double> nmse_series(std::span<const double> predictions,
                                std::span<const double> targets, double decay,
                                std::int64_t burn_in, const std::vector<bool>* exclude) {
    if (predictions.size() != targets.size())
        throw DataError("nmse_series: prediction/target length mismatch");
    if (exclude && exclude->size() != targets.size())
        throw DataError("nmse_series: exclusion mask length mismatch");

    MetricState target_stats;
    target_stats.decay = decay;
    MetricState err_stats;  // only the mean track is used
    err_stats.decay = decay;

    std::vector<double> out(targets.size(), kNaN);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        if (exclude && (*exclude)[t]) continue;  // stats untouched on excluded steps
        const double err = predictions[t] - targets[t];
        ew_welford_update(target_stats, targets[t]);
        ew_welford_update(err_stats, err * err);
        if (static_cast<std::int64_t>(t) < burn_in) continue;
        if (!(target_stats.ew_var > 0.0)) continue;  // undefined: sentinel stays NaN
        out[t] = err_stats.ew_mean / target_stats.ew_var;
    }
    return out;
}

double nan_mean(std::span<const double> xs) {
    return nan_mean(xs, 0, xs.size());
}

double nan_mean(std::span<const double> xs, std::size_t begin, std::size_t end) {
    double sum = 0.0;
    std::size_t n = 0;
    end = std::min(end, xs.size());
    for (std::size_t i = begin; i < end; ++i) {
        if (std::isnan(xs[i])) continue;
        sum += xs[i];
        ++n;
    }
    return n ? sum / static_cast<double>(n) : kNaN;
}

}  // namespace gvfpred
