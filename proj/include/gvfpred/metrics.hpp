#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

namespace gvfpred {

// Exponentially weighted mean/variance (Welford-style online update).
struct MetricState {
    double ew_mean = 0.0;
    double ew_var = 0.0;
    double decay = 0.001;
    std::int64_t count = 0;
};

// First sample initializes the mean; afterwards
//   d = x - mean; mean += decay * d; var = (1 - decay) * (var + decay * d^2).
MetricState& ew_welford_update(MetricState& m, double x);

// Smallest K with gamma^K < tol (K = 1 when gamma == 0).
int return_horizon(double gamma, double tol);

struct TruncatedReturn {
    double value = 0.0;
    bool partial = false;  // fewer than K future samples were available
    int horizon = 0;
};

// G_t = sum_{j=0}^{K-1} gamma^j * future[j], future starting at c_{t+1}.
// Truncation bias is bounded by tol * sup|c| / (1 - gamma).
TruncatedReturn truncated_return(std::span<const double> future, double gamma, double tol);

// Return at every step of a cumulant log; entries within K of the end carry
// the partial flag and are excluded from NMSE summaries by default.
struct ReturnSeries {
    std::vector<double> values;
    std::vector<bool> partial;
    int horizon = 0;
};
ReturnSeries return_series(Eigen::Ref<const Eigen::VectorXd> cumulants, double gamma, double tol);

// Squared error of prediction vs target, EW-averaged, over the EW variance of
// the targets. NaN sentinel while burning in, on excluded steps, and when the
// target variance is zero.
std::vector<double> nmse_series(std::span<const double> predictions,
                                std::span<const double> targets, double decay,
                                std::int64_t burn_in,
                                const std::vector<bool>* exclude = nullptr);

// Mean ignoring NaN entries; NaN if nothing valid.
double nan_mean(std::span<const double> xs);
double nan_mean(std::span<const double> xs, std::size_t begin, std::size_t end);

}  // namespace gvfpred
