#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "gvfpred/config.hpp"
#include "gvfpred/dataset.hpp"
#include "gvfpred/encoder.hpp"

namespace gvfpred {

enum class Algo { OnlineTd, TdReplay, NStep, Frozen };

Algo algo_from_string(const std::string& s);
std::string algo_to_string(Algo a);

// Shared front half of every learning subcommand: load, subsample, validate
// the split, take min/max from the training segment only, drop sensors that
// are constant there, impute, and encode the whole stream in order (traces
// and the mode clock run through split boundaries; nothing from validation or
// deployment leaks into normalization).
struct PreparedData {
    Dataset data;
    SplitSpec split;
    EncoderConfig encoder_config;   // vocabulary resolved
    std::vector<SensorMeta> meta;   // training-reference min/max per survivor
    std::vector<std::string> removed_sensors;
    Eigen::MatrixXd states;         // one column per step
    Eigen::VectorXd cumulants;
    Eigen::Index cumulant_row = -1;
    std::string layout;
    std::uint64_t layout_hash = 0;

    Eigen::Index train_end() const { return static_cast<Eigen::Index>(split.train_end); }
    Eigen::Index validation_end() const { return static_cast<Eigen::Index>(split.validation_end); }
};

PreparedData prepare_data(const RunConfig& cfg);

// Same pipeline on an already-loaded dataset (subsampling included).
PreparedData prepare_dataset(Dataset d, const RunConfig& cfg);

std::string checkpoint_path(const RunConfig& cfg, Algo algo);
std::string deploy_log_path(const RunConfig& cfg, Algo algo);

void run_simulate(const RunConfig& cfg);
void run_pretrain(const RunConfig& cfg, Algo algo);
void run_sweep(const RunConfig& cfg, Algo algo);
void run_deploy(const RunConfig& cfg, Algo algo);
void run_eval(const RunConfig& cfg, const std::string& log_path);
void run_plotdata(const RunConfig& cfg, const std::string& log_path);

}  // namespace gvfpred
