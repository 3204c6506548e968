#include "gvfpred/nstep.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "gvfpred/util.hpp"

namespace gvfpred {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::vector<NStepPair> build_nstep_pairs(Eigen::Ref<const Eigen::VectorXd> cumulants, Eigen::Index begin,
                                         Eigen::Index end, int n) {
    if (n < 1) throw DataError("nstep: n must be >= 1");
    if (begin < 0 || end > cumulants.size() || begin > end)
        throw DataError("nstep: bad index range");
    if (end - begin <= n)
        throw DataError("nstep: sequence of length " + std::to_string(end - begin) +
                        " is too short for horizon n=" + std::to_string(n));
    std::vector<NStepPair> pairs;
    pairs.reserve(static_cast<std::size_t>(end - begin - n));
    for (Eigen::Index t = begin; t + n < end; ++t)
        pairs.push_back({t, t + n, cumulants[t + n]});
    return pairs;
}

void offline_nstep(Network& net, OptimizerState& opt, Eigen::Ref<const Eigen::MatrixXd> states,
                   const std::vector<NStepPair>& pairs, const NStepConfig& cfg,
                   std::uint64_t seed, int epoch_begin, int epoch_end) {
    if (pairs.empty()) throw DataError("offline_nstep: empty pair set");
    if (cfg.batch_size < 1) throw DataError("nstep: batch_size must be >= 1");
    for (const auto& p : pairs)
        if (p.state_index < 0 || p.state_index >= states.cols())
            throw DataError("offline_nstep: state index out of range");

    Gradient acc = zero_gradient_like(net);
    Gradient scratch = zero_gradient_like(net);
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = epoch_begin; epoch < epoch_end; ++epoch) {
        // (seed, epoch)-determined permutation; see offline_td
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t pos = 0; pos < order.size(); pos += cfg.batch_size) {
            const std::size_t bs = std::min<std::size_t>(cfg.batch_size, order.size() - pos);
            acc.set_zero();
            for (std::size_t i = 0; i < bs; ++i) {
                const NStepPair& p = pairs[order[pos + i]];
                const double v = forward_backward(net, states.col(p.state_index), scratch);
                acc.axpy((v - p.target) / static_cast<double>(bs), scratch);
            }
            adam_step(net, opt, acc, cfg.eta);
        }
    }
}

void offline_nstep(Network& net, OptimizerState& opt, Eigen::Ref<const Eigen::MatrixXd> states,
                   const std::vector<NStepPair>& pairs, const NStepConfig& cfg,
                   std::uint64_t seed) {
    offline_nstep(net, opt, states, pairs, cfg, seed, 0, cfg.epochs);
}

std::vector<NStepDeployRow> online_nstep_deploy(Network& net, OptimizerState& opt,
                                                Eigen::Ref<const Eigen::MatrixXd> states,
                                                Eigen::Ref<const Eigen::VectorXd> cumulants, int n,
                                                double alpha, bool frozen, std::int64_t step0) {
    if (n < 1) throw DataError("nstep: n must be >= 1");
    const Eigen::Index count = states.cols();
    std::vector<NStepDeployRow> rows;
    rows.reserve(count);

    Eigen::MatrixXd ring(states.rows(), n);
    Gradient scratch = zero_gradient_like(net);

    for (Eigen::Index t = 0; t < count; ++t) {
        const Eigen::Index slot = t % n;
        double delta = kNaN;
        if (t >= n) {
            // ring holds the state from exactly n steps back; its target just arrived
            const double v_old = forward_backward(net, ring.col(slot), scratch);
            delta = v_old - cumulants[t];
            if (!frozen) {
                scratch.scale(delta);
                adam_step(net, opt, scratch, alpha);
            }
        }
        const double pred = forward(net, states.col(t));
        ring.col(slot) = states.col(t);
        rows.push_back({step0 + t, pred, cumulants[t], delta, step0 + t + n});
    }
    return rows;
}

}  // namespace gvfpred
