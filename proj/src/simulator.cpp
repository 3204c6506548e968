#include "gvfpred/simulator.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gvfpred/util.hpp"

namespace gvfpred {

namespace {

void check_scenario(const PlantScenario& sc) {
    if (sc.sensors.empty()) throw DataError("scenario: at least one sensor required");
    if (sc.schedule.empty()) throw DataError("scenario: schedule cycle must be non-empty");
    for (const auto& e : sc.schedule)
        if (e.duration_s <= 0) throw DataError("scenario: schedule durations must be > 0");
    if (sc.daily_event && sc.daily_event->duration_s <= 0)
        throw DataError("scenario: daily event duration must be > 0");
}

}  // namespace

PlantScenario packaged_scenario() {
    PlantScenario sc;
    sc.start_timestamp = 0;
    sc.schedule = {{"PROD", 3300}, {"BW", 300}};
    sc.daily_event = DailyEvent{"MIT", 16200, 600};  // 04:30, ten minutes

    auto sine = [](std::string name, double base, double amp, double period, double phase,
                   double noise) {
        SensorSpec s;
        s.name = std::move(name);
        s.kind = SignalKind::Sine;
        s.base = base;
        s.amplitude = amp;
        s.period_s = period;
        s.phase = phase;
        s.noise = noise;
        return s;
    };
    auto ar1 = [](std::string name, double base, double coeff, double innov, double noise) {
        SensorSpec s;
        s.name = std::move(name);
        s.kind = SignalKind::Ar1;
        s.base = base;
        s.ar_coeff = coeff;
        s.ar_noise = innov;
        s.noise = noise;
        return s;
    };

    SensorSpec tank = sine("tank_level", 5.0, 0.8, 86400.0, 0.3, 0.02);
    tank.mode_offsets = {{"BW", -0.5}, {"MIT", -0.2}};

    SensorSpec pressure = ar1("membrane_pressure", 2.0, 0.995, 0.01, 0.01);
    pressure.mode_offsets = {{"BW", 1.5}, {"MIT", 0.8}};

    SensorSpec feed_flow = sine("feed_flow", 12.0, 1.5, 3600.0, 0.0, 0.05);
    feed_flow.mode_offsets = {{"BW", -10.0}, {"MIT", -12.0}};

    SensorSpec temperature = sine("influent_temperature", 9.0, 1.2, 86400.0, 1.1, 0.01);
    temperature.drift_slope = 2e-6;

    SensorSpec turbidity = ar1("feed_turbidity", 1.1, 0.98, 0.02, 0.02);
    turbidity.outlier_prob = 2e-4;
    turbidity.outlier_scale = 1.5;

    SensorSpec ph = ar1("ph", 7.4, 0.999, 0.002, 0.005);

    SensorSpec conductivity = sine("conductivity", 310.0, 14.0, 86400.0, 2.4, 1.0);

    SensorSpec pump = sine("permeate_pump_speed", 0.62, 0.05, 3600.0, 0.7, 0.01);
    pump.mode_offsets = {{"BW", 0.3}, {"MIT", -0.5}};

    SensorSpec reject;
    reject.name = "reject_flow";
    reject.kind = SignalKind::Constant;
    reject.base = 0.2;
    reject.noise = 0.05;
    reject.mode_offsets = {{"BW", 8.0}};

    SensorSpec permeate = sine("permeate_flow", 10.5, 1.0, 3600.0, 0.2, 0.05);
    permeate.mode_offsets = {{"BW", -10.0}, {"MIT", -10.5}};

    SensorSpec spare;
    spare.name = "spare_setpoint";
    spare.kind = SignalKind::Constant;
    spare.base = 1.0;  // exactly constant: exercises constant-column removal

    SensorSpec blower;
    blower.name = "blower_speed";
    blower.kind = SignalKind::Ramp;
    blower.base = 0.4;
    blower.slope = 1e-7;
    blower.noise = 0.01;
    blower.mode_offsets = {{"MIT", 2.0}};

    sc.sensors = {tank, pressure, feed_flow, temperature, turbidity, ph,
                  conductivity, pump, reject, permeate, spare, blower};
    sc.cleaning_events = {{200000, 4, -0.6, 0.99995}};
    return sc;
}

std::string mode_at(const PlantScenario& sc, std::int64_t step) {
    const std::int64_t ts = sc.start_timestamp + step;
    if (sc.daily_event) {
        std::int64_t sod = ts % 86400;
        if (sod < 0) sod += 86400;
        const auto& ev = *sc.daily_event;
        if (sod >= ev.start_second_of_day && sod < ev.start_second_of_day + ev.duration_s)
            return ev.mode;
    }
    std::int64_t cycle = 0;
    for (const auto& e : sc.schedule) cycle += e.duration_s;
    std::int64_t pos = step % cycle;
    for (const auto& e : sc.schedule) {
        if (pos < e.duration_s) return e.mode;
        pos -= e.duration_s;
    }
    return sc.schedule.back().mode;  // unreachable
}

Dataset generate(const PlantScenario& sc, std::int64_t steps, std::uint64_t seed) {
    check_scenario(sc);
    if (steps < 1) throw DataError("generate: steps must be >= 1");

    const std::size_t width = sc.sensors.size();
    Dataset d;
    d.meta.resize(width);
    for (std::size_t i = 0; i < width; ++i) d.meta[i].name = sc.sensors[i].name;
    d.records.reserve(steps);

    // one generator per sensor so draw counts never interact across columns
    std::vector<std::mt19937_64> rngs;
    rngs.reserve(width);
    for (std::size_t i = 0; i < width; ++i) rngs.emplace_back(mix_seed(seed, i));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<double> ar_state(width);
    for (std::size_t i = 0; i < width; ++i) ar_state[i] = sc.sensors[i].base;

    for (std::int64_t t = 0; t < steps; ++t) {
        RawRecord r;
        r.timestamp = sc.start_timestamp + t;
        r.mode = mode_at(sc, t);
        r.values.resize(width);

        for (std::size_t i = 0; i < width; ++i) {
            const SensorSpec& sp = sc.sensors[i];
            auto& rng = rngs[i];
            // fixed draw count per sensor per step keeps streams aligned
            const double g1 = gauss(rng);
            const double g2 = gauss(rng);
            const double u = unif(rng);

            double v = 0.0;
            switch (sp.kind) {
                case SignalKind::Constant:
                    v = sp.base;
                    break;
                case SignalKind::Sine:
                    v = sp.base + sp.amplitude *
                                      std::sin(2.0 * std::numbers::pi *
                                                   static_cast<double>(r.timestamp) / sp.period_s +
                                               sp.phase);
                    break;
                case SignalKind::Ramp:
                    v = sp.base + sp.slope * static_cast<double>(t);
                    break;
                case SignalKind::Ar1:
                    ar_state[i] = sp.base + sp.ar_coeff * (ar_state[i] - sp.base) + sp.ar_noise * g1;
                    v = ar_state[i];
                    break;
            }

            auto mo = sp.mode_offsets.find(r.mode);
            if (mo != sp.mode_offsets.end()) v += mo->second;
            v += sp.drift_slope * static_cast<double>(t);
            if (sp.noise > 0.0) v += sp.noise * g2;
            if (sp.outlier_prob > 0.0 && u < sp.outlier_prob)
                v += sp.outlier_scale * (2.0 * (u / sp.outlier_prob) - 1.0);

            for (const auto& ev : sc.cleaning_events) {
                if (static_cast<std::size_t>(ev.sensor) == i && t >= ev.step)
                    v += ev.magnitude * std::pow(ev.decay, static_cast<double>(t - ev.step));
            }
            for (const auto& cp : sc.changepoints) {
                if (static_cast<std::size_t>(cp.sensor) == i && t >= cp.step) v += cp.offset;
            }
            r.values[i] = v;
        }
        d.records.push_back(std::move(r));
    }

    auto m = compute_meta(d);
    d.meta = std::move(m);
    return d;
}

Dataset inject_shift(const Dataset& d, const ShiftSpec& shift) {
    if (shift.onset < 0 || static_cast<std::size_t>(shift.onset) >= d.size())
        throw DataError("inject_shift: onset outside the dataset");

    std::vector<std::size_t> cols;
    for (const auto& name : shift.sensors) {
        bool found = false;
        for (std::size_t i = 0; i < d.width(); ++i) {
            if (d.meta[i].name == name) {
                cols.push_back(i);
                found = true;
                break;
            }
        }
        if (!found) throw DataError("inject_shift: unknown sensor '" + name + "'");
    }

    Dataset out = d;
    if (cols.empty()) return out;

    // pre-onset column means anchor the scale / regime-swap transforms
    std::vector<double> pre_mean(cols.size(), 0.0);
    for (std::size_t ci = 0; ci < cols.size(); ++ci) {
        double sum = 0.0;
        std::int64_t n = 0;
        for (std::int64_t t = 0; t < shift.onset; ++t) {
            double v = d.records[t].values[cols[ci]];
            if (is_missing(v)) continue;
            sum += v;
            ++n;
        }
        pre_mean[ci] = n ? sum / static_cast<double>(n) : 0.0;
    }

    for (std::size_t t = shift.onset; t < out.size(); ++t) {
        for (std::size_t ci = 0; ci < cols.size(); ++ci) {
            double& v = out.records[t].values[cols[ci]];
            if (is_missing(v)) continue;
            switch (shift.kind) {
                case ShiftSpec::Kind::Offset:
                    v += shift.amount;
                    break;
                case ShiftSpec::Kind::Scale:
                    v *= shift.amount;
                    break;
                case ShiftSpec::Kind::RegimeSwap:
                    v = 2.0 * pre_mean[ci] - v;  // mirror the dynamics about the old mean
                    break;
            }
        }
    }
    out.meta = compute_meta(out);
    return out;
}

}  // namespace gvfpred
