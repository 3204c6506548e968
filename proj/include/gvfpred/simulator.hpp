#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gvfpred/dataset.hpp"

namespace gvfpred {

enum class SignalKind { Constant, Sine, Ramp, Ar1 };

struct SensorSpec {
    std::string name;
    SignalKind kind = SignalKind::Constant;
    double base = 0.0;
    double amplitude = 1.0;     // sine
    double period_s = 86400.0;  // sine
    double phase = 0.0;         // sine, radians
    double slope = 0.0;         // ramp, units per second
    double ar_coeff = 0.99;     // ar1
    double ar_noise = 0.05;     // ar1 innovation scale
    double noise = 0.0;         // observation noise scale
    std::map<std::string, double> mode_offsets;  // additive while a mode is active
    double drift_slope = 0.0;   // slow seasonal trend, units per second
    double outlier_prob = 0.0;
    double outlier_scale = 0.0;
};

struct ScheduleEntry {
    std::string mode;
    std::int64_t duration_s = 0;
};

// Overrides the cycling schedule during a fixed time-of-day window.
struct DailyEvent {
    std::string mode;
    std::int64_t start_second_of_day = 0;
    std::int64_t duration_s = 0;
};

// Additive offset that decays geometrically from a given step on; stands in
// for a sensor-cleaning reset.
struct CleaningEvent {
    std::int64_t step = 0;
    int sensor = 0;
    double magnitude = 0.0;
    double decay = 0.999;
};

struct ChangePoint {
    std::int64_t step = 0;
    int sensor = 0;
    double offset = 0.0;  // applied from this step on
};

struct PlantScenario {
    std::vector<SensorSpec> sensors;
    std::vector<ScheduleEntry> schedule;
    std::optional<DailyEvent> daily_event;
    std::vector<CleaningEvent> cleaning_events;
    std::vector<ChangePoint> changepoints;
    std::int64_t start_timestamp = 0;
    std::uint64_t seed = 0;
};

struct ShiftSpec {
    enum class Kind { Offset, Scale, RegimeSwap };
    std::int64_t onset = 0;  // record index; records before it stay untouched
    std::vector<std::string> sensors;
    Kind kind = Kind::Offset;
    double amount = 0.0;
};

// 12-sensor PROD/BW cycle with a daily MIT window, daily-period sine
// components, drift, one constant column, and a noisy AR cumulant sensor
// ("membrane_pressure"). Small enough for CI, rich enough to exercise every
// encoder feature.
PlantScenario packaged_scenario();

std::string mode_at(const PlantScenario& sc, std::int64_t step);

// Deterministic given (scenario, seed): same seed, byte-identical output.
Dataset generate(const PlantScenario& sc, std::int64_t steps, std::uint64_t seed);

Dataset inject_shift(const Dataset& d, const ShiftSpec& shift);

}  // namespace gvfpred
