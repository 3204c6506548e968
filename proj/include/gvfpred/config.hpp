#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gvfpred/encoder.hpp"
#include "gvfpred/mlp.hpp"
#include "gvfpred/nstep.hpp"
#include "gvfpred/simulator.hpp"
#include "gvfpred/sweep.hpp"
#include "gvfpred/td.hpp"

namespace gvfpred {

struct DataConfig {
    std::string path = "data.csv";
    std::size_t subsample = 1;
    SplitSpec split;
};

struct CumulantConfig {
    std::string sensor;      // sensor column to predict
    bool normalized = true;  // predict the [0,1]-scaled value the network also sees
};

struct EvalConfig {
    double decay = 0.001;       // EW smoothing for NMSE statistics (~1000-step window)
    double return_tol = 1e-4;   // truncation tolerance for returns
    std::int64_t burn_in = -1;  // <0: default to ceil(1/decay)
    std::int64_t resolved_burn_in() const;
};

struct SimulateConfig {
    std::string scenario_name = "packaged";  // or "custom" with a scenario block
    PlantScenario scenario;                  // used when scenario_name == "custom"
    std::int64_t steps = 250000;
    std::optional<ShiftSpec> shift;
};

struct SweepConfig {
    SweepStyle style = SweepStyle::Joint;
    std::vector<double> etas{1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
    std::vector<double> alphas{1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    unsigned threads = 0;  // 0: hardware concurrency
};

// One structured configuration drives every subcommand; flag overrides are
// applied on top after parsing.
struct RunConfig {
    std::uint64_t seed = 1;
    std::string out = "runs/default";
    DataConfig data;
    EncoderConfig encoder;
    CumulantConfig cumulant;
    std::vector<int> hidden{512, 512};
    AdamConfig adam{0.9, 0.99, 1e-4, 0.003};
    TdConfig td;
    NStepConfig nstep;
    EvalConfig eval;
    SweepConfig sweep;
    SimulateConfig simulate;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Fully materialized effective config (defaults included): the manifest's
// reproduction snapshot.
nlohmann::json config_to_json(const RunConfig& cfg);

PlantScenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const PlantScenario& sc);

}  // namespace gvfpred
