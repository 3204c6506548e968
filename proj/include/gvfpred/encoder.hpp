#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gvfpred/dataset.hpp"

namespace gvfpred {

struct EncoderConfig {
    double beta = 0.99;  // trace decay rate
    int thermometer_size = 7;
    std::int64_t seconds_per_day = 86400;
    bool include_mode_one_hot = true;
    bool include_time_of_day = true;
    bool include_mode_thermometer = true;
    std::vector<std::string> mode_vocabulary;
    std::map<std::string, double> mode_lengths;  // expected mode duration, seconds
};

struct TraceState {
    Eigen::VectorXd z;
};

// Constructed agent state: [normalized sensors (d) | traces (d) | mode/time (k)].
struct AugmentedState {
    Eigen::VectorXd s_hat;
    std::int64_t step = 0;
};

double normalize(double o, const SensorMeta& meta);

Eigen::VectorXd encode_one_hot(int value, int k);

// (sin, cos) of the fraction of the day elapsed; s taken modulo the day.
std::pair<double, double> encode_time_of_day(std::int64_t s, std::int64_t seconds_per_day = 86400);

// [sin(2^j pi p) for j<size | cos(2^j pi p) for j<size], p = elapsed / mode_length.
Eigen::VectorXd encode_mode_thermometer(double elapsed, double mode_length, int size);

TraceState update_trace(const TraceState& z, const Eigen::VectorXd& o_norm, double beta);

// Sequential encoding pipeline for one stream: owns the traces and the mode
// clock. Feed records in order; distinct streams need distinct encoders.
class Encoder {
public:
    Encoder(EncoderConfig cfg, std::vector<SensorMeta> meta);

    // Record must be imputed and match the meta width.
    AugmentedState encode(const RawRecord& r);

    void reset();

    int sensor_count() const { return static_cast<int>(meta_.size()); }
    int mode_block_width() const;
    int state_width() const { return 2 * sensor_count() + mode_block_width(); }

    const EncoderConfig& config() const { return cfg_; }
    const std::vector<SensorMeta>& meta() const { return meta_; }

    // Block order and widths, stable across a run; hashed into checkpoints so
    // a deploy with a different layout is rejected.
    std::string layout_string() const;
    std::uint64_t layout_hash() const;

private:
    double resolve_mode_length(const std::string& mode) const;
    int mode_index(const std::string& mode) const;

    EncoderConfig cfg_;
    std::vector<SensorMeta> meta_;
    TraceState trace_;
    bool first_ = true;
    std::int64_t step_ = 0;
    std::string current_mode_;
    std::int64_t mode_start_ts_ = 0;
    // running average of completed durations, per mode, for unscheduled modes
    std::map<std::string, std::pair<double, int>> completed_;
};

}  // namespace gvfpred
