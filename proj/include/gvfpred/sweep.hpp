#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "gvfpred/mlp.hpp"
#include "gvfpred/nstep.hpp"
#include "gvfpred/td.hpp"

namespace gvfpred {

enum class LearnerKind { Gvf, NStep };

enum class SweepStyle {
    Joint,     // full (eta, alpha) grid, each cell pretrains + streams validation
    TwoStage,  // pick eta by frozen training error first, then sweep alpha only
};

struct SweepGrid {
    std::vector<double> etas;
    std::vector<double> alphas;
};

struct SweepCell {
    double eta = 0.0;
    double alpha = 0.0;
    double mean_error = 0.0;  // mean squared validation error, pre-update weights
    std::uint64_t seed = 0;
    bool diverged = false;
};

struct SweepResult {
    std::vector<SweepCell> cells;  // grid order: eta-major, alpha-minor
    std::size_t best_index = 0;
    double best_eta = 0.0;
    double best_alpha = 0.0;
};

// Everything one sweep cell needs besides its (eta, alpha).
struct SweepInputs {
    Eigen::Ref<const Eigen::MatrixXd> train_states;
    Eigen::Ref<const Eigen::VectorXd> train_cumulants;
    Eigen::Ref<const Eigen::MatrixXd> val_states;
    Eigen::Ref<const Eigen::VectorXd> val_cumulants;
    std::vector<int> hidden_dims;
    AdamConfig adam;
    LearnerKind kind = LearnerKind::Gvf;
    TdConfig td;        // gamma / batch / epochs shared by both stages
    NStepConfig nstep;  // n / batch / epochs for the n-step learner
    double return_tol = 1e-4;
};

// Treats the validation segment as a deployment: pretrain on the training
// segment with eta, then stream validation once in temporal order updating
// with alpha, scoring each step's pre-update prediction against the
// peek-ahead target (truncated return for GVFs, c_{t+n} for n-step). Steps
// whose target would need data past the end of validation are skipped.
// Cells run concurrently; results merge in grid order regardless of thread
// timing, each cell seeded from (seed, cell index).
SweepResult validation_sweep(const SweepInputs& in, const SweepGrid& grid, SweepStyle style,
                             std::uint64_t seed, unsigned threads = 0);

void write_sweep_report(const SweepResult& r, const SweepGrid& grid, const std::string& path);

}  // namespace gvfpred
