#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "gvfpred/mlp.hpp"

namespace gvfpred {

struct NStepConfig {
    int n = 100;  // prediction horizon in steps
    double eta = 1e-3;
    double alpha = 1e-5;
    int batch_size = 512;
    int epochs = 10;
};

// Supervised pair: the state at state_index regresses onto the cumulant
// observed exactly n steps later. target_step - state_index == n always.
struct NStepPair {
    Eigen::Index state_index = 0;
    Eigen::Index target_step = 0;
    double target = 0.0;
};

// Pairs over the half-open index range [begin, end); both endpoints of a pair
// stay inside the range, so nothing couples across segment boundaries.
std::vector<NStepPair> build_nstep_pairs(Eigen::Ref<const Eigen::VectorXd> cumulants, Eigen::Index begin,
                                         Eigen::Index end, int n);

// Mini-batch squared-error regression; shuffling matches offline_td's
// per-epoch seeding so checkpoint-resumed runs reproduce uninterrupted ones.
void offline_nstep(Network& net, OptimizerState& opt, Eigen::Ref<const Eigen::MatrixXd> states,
                   const std::vector<NStepPair>& pairs, const NStepConfig& cfg,
                   std::uint64_t seed, int epoch_begin, int epoch_end);

void offline_nstep(Network& net, OptimizerState& opt, Eigen::Ref<const Eigen::MatrixXd> states,
                   const std::vector<NStepPair>& pairs, const NStepConfig& cfg,
                   std::uint64_t seed);

struct NStepDeployRow {
    std::int64_t step = 0;
    double prediction = 0.0;
    double cumulant = 0.0;
    double delta = 0.0;  // update error f(s_old) - c; NaN while the buffer warms
    std::int64_t target_step = 0;
};

// Streaming deployment with an n-slot ring of past states: the first n
// arrivals only fill the ring, then each arriving cumulant trains the state
// from exactly n steps earlier. Predictions are logged every step; their own
// targets are still pending when logged.
std::vector<NStepDeployRow> online_nstep_deploy(Network& net, OptimizerState& opt,
                                                Eigen::Ref<const Eigen::MatrixXd> states,
                                                Eigen::Ref<const Eigen::VectorXd> cumulants, int n,
                                                double alpha, bool frozen = false,
                                                std::int64_t step0 = 0);

}  // namespace gvfpred
