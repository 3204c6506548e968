#include "gvfpred/config.hpp"

#include <cmath>
#include <fstream>

#include "gvfpred/util.hpp"

namespace gvfpred {

using nlohmann::json;

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

SignalKind signal_kind_from_string(const std::string& s) {
    if (s == "constant") return SignalKind::Constant;
    if (s == "sine") return SignalKind::Sine;
    if (s == "ramp") return SignalKind::Ramp;
    if (s == "ar1") return SignalKind::Ar1;
    throw UsageError("unknown signal kind: " + s);
}

std::string signal_kind_to_string(SignalKind k) {
    switch (k) {
        case SignalKind::Constant: return "constant";
        case SignalKind::Sine: return "sine";
        case SignalKind::Ramp: return "ramp";
        case SignalKind::Ar1: return "ar1";
    }
    return "constant";
}

ShiftSpec::Kind shift_kind_from_string(const std::string& s) {
    if (s == "offset") return ShiftSpec::Kind::Offset;
    if (s == "scale") return ShiftSpec::Kind::Scale;
    if (s == "regime_swap") return ShiftSpec::Kind::RegimeSwap;
    throw UsageError("unknown shift kind: " + s);
}

std::string shift_kind_to_string(ShiftSpec::Kind k) {
    switch (k) {
        case ShiftSpec::Kind::Offset: return "offset";
        case ShiftSpec::Kind::Scale: return "scale";
        case ShiftSpec::Kind::RegimeSwap: return "regime_swap";
    }
    return "offset";
}

}  // namespace

std::int64_t EvalConfig::resolved_burn_in() const {
    if (burn_in >= 0) return burn_in;
    return static_cast<std::int64_t>(std::ceil(1.0 / decay));
}

PlantScenario scenario_from_json(const json& j) {
    PlantScenario sc;
    maybe(j, "start_timestamp", sc.start_timestamp);
    if (j.contains("sensors")) {
        for (const auto& js : j.at("sensors")) {
            SensorSpec sp;
            sp.name = js.at("name").get<std::string>();
            sp.kind = signal_kind_from_string(js.value("kind", "constant"));
            maybe(js, "base", sp.base);
            maybe(js, "amplitude", sp.amplitude);
            maybe(js, "period_s", sp.period_s);
            maybe(js, "phase", sp.phase);
            maybe(js, "slope", sp.slope);
            maybe(js, "ar_coeff", sp.ar_coeff);
            maybe(js, "ar_noise", sp.ar_noise);
            maybe(js, "noise", sp.noise);
            maybe(js, "drift_slope", sp.drift_slope);
            maybe(js, "outlier_prob", sp.outlier_prob);
            maybe(js, "outlier_scale", sp.outlier_scale);
            if (js.contains("mode_offsets"))
                for (auto it = js.at("mode_offsets").begin(); it != js.at("mode_offsets").end(); ++it)
                    sp.mode_offsets[it.key()] = it.value().get<double>();
            sc.sensors.push_back(std::move(sp));
        }
    }
    if (j.contains("schedule"))
        for (const auto& je : j.at("schedule"))
            sc.schedule.push_back({je.at("mode").get<std::string>(), je.at("duration_s").get<std::int64_t>()});
    if (j.contains("daily_event")) {
        const auto& je = j.at("daily_event");
        sc.daily_event = DailyEvent{je.at("mode").get<std::string>(),
                                    je.at("start_second_of_day").get<std::int64_t>(),
                                    je.at("duration_s").get<std::int64_t>()};
    }
    if (j.contains("cleaning_events"))
        for (const auto& je : j.at("cleaning_events"))
            sc.cleaning_events.push_back({je.at("step").get<std::int64_t>(), je.at("sensor").get<int>(),
                                          je.at("magnitude").get<double>(), je.value("decay", 0.999)});
    if (j.contains("changepoints"))
        for (const auto& je : j.at("changepoints"))
            sc.changepoints.push_back({je.at("step").get<std::int64_t>(), je.at("sensor").get<int>(),
                                       je.at("offset").get<double>()});
    return sc;
}

json scenario_to_json(const PlantScenario& sc) {
    json j;
    j["start_timestamp"] = sc.start_timestamp;
    j["sensors"] = json::array();
    for (const auto& sp : sc.sensors) {
        json js{{"name", sp.name},       {"kind", signal_kind_to_string(sp.kind)},
                {"base", sp.base},       {"amplitude", sp.amplitude},
                {"period_s", sp.period_s}, {"phase", sp.phase},
                {"slope", sp.slope},     {"ar_coeff", sp.ar_coeff},
                {"ar_noise", sp.ar_noise}, {"noise", sp.noise},
                {"drift_slope", sp.drift_slope}, {"outlier_prob", sp.outlier_prob},
                {"outlier_scale", sp.outlier_scale}};
        js["mode_offsets"] = json::object();
        for (const auto& [mode, off] : sp.mode_offsets) js["mode_offsets"][mode] = off;
        j["sensors"].push_back(std::move(js));
    }
    j["schedule"] = json::array();
    for (const auto& e : sc.schedule)
        j["schedule"].push_back({{"mode", e.mode}, {"duration_s", e.duration_s}});
    if (sc.daily_event)
        j["daily_event"] = {{"mode", sc.daily_event->mode},
                            {"start_second_of_day", sc.daily_event->start_second_of_day},
                            {"duration_s", sc.daily_event->duration_s}};
    j["cleaning_events"] = json::array();
    for (const auto& e : sc.cleaning_events)
        j["cleaning_events"].push_back(
            {{"step", e.step}, {"sensor", e.sensor}, {"magnitude", e.magnitude}, {"decay", e.decay}});
    j["changepoints"] = json::array();
    for (const auto& e : sc.changepoints)
        j["changepoints"].push_back({{"step", e.step}, {"sensor", e.sensor}, {"offset", e.offset}});
    return j;
}

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    maybe(j, "seed", cfg.seed);
    maybe(j, "out", cfg.out);

    if (j.contains("data")) {
        const auto& jd = j.at("data");
        maybe(jd, "path", cfg.data.path);
        maybe(jd, "subsample", cfg.data.subsample);
        maybe(jd, "train_end", cfg.data.split.train_end);
        maybe(jd, "validation_end", cfg.data.split.validation_end);
    }

    if (j.contains("encoder")) {
        const auto& je = j.at("encoder");
        maybe(je, "beta", cfg.encoder.beta);
        maybe(je, "thermometer_size", cfg.encoder.thermometer_size);
        maybe(je, "seconds_per_day", cfg.encoder.seconds_per_day);
        maybe(je, "include_mode_one_hot", cfg.encoder.include_mode_one_hot);
        maybe(je, "include_time_of_day", cfg.encoder.include_time_of_day);
        maybe(je, "include_mode_thermometer", cfg.encoder.include_mode_thermometer);
        maybe(je, "mode_vocabulary", cfg.encoder.mode_vocabulary);
        if (je.contains("mode_lengths"))
            for (auto it = je.at("mode_lengths").begin(); it != je.at("mode_lengths").end(); ++it)
                cfg.encoder.mode_lengths[it.key()] = it.value().get<double>();
    }

    if (j.contains("cumulant")) {
        const auto& jc = j.at("cumulant");
        maybe(jc, "sensor", cfg.cumulant.sensor);
        maybe(jc, "normalized", cfg.cumulant.normalized);
    }

    if (j.contains("network")) maybe(j.at("network"), "hidden", cfg.hidden);

    if (j.contains("optimizer")) {
        const auto& jo = j.at("optimizer");
        maybe(jo, "beta1", cfg.adam.beta1);
        maybe(jo, "beta2", cfg.adam.beta2);
        maybe(jo, "epsilon", cfg.adam.epsilon);
        maybe(jo, "weight_decay", cfg.adam.weight_decay);
    }

    if (j.contains("td")) {
        const auto& jt = j.at("td");
        maybe(jt, "gamma", cfg.td.gamma);
        maybe(jt, "eta", cfg.td.eta);
        maybe(jt, "alpha", cfg.td.alpha);
        maybe(jt, "batch_size", cfg.td.batch_size);
        maybe(jt, "epochs", cfg.td.epochs);
        maybe(jt, "replay_capacity", cfg.td.replay_capacity);
        maybe(jt, "replay_steps", cfg.td.replay_steps);
    }

    if (j.contains("nstep")) {
        const auto& jn = j.at("nstep");
        maybe(jn, "n", cfg.nstep.n);
        maybe(jn, "eta", cfg.nstep.eta);
        maybe(jn, "alpha", cfg.nstep.alpha);
        maybe(jn, "batch_size", cfg.nstep.batch_size);
        maybe(jn, "epochs", cfg.nstep.epochs);
    }

    if (j.contains("eval")) {
        const auto& je = j.at("eval");
        maybe(je, "decay", cfg.eval.decay);
        maybe(je, "return_tol", cfg.eval.return_tol);
        maybe(je, "burn_in", cfg.eval.burn_in);
    }

    if (j.contains("sweep")) {
        const auto& js = j.at("sweep");
        if (js.contains("style")) {
            std::string s = js.at("style").get<std::string>();
            if (s == "joint")
                cfg.sweep.style = SweepStyle::Joint;
            else if (s == "two_stage")
                cfg.sweep.style = SweepStyle::TwoStage;
            else
                throw UsageError("sweep style must be 'joint' or 'two_stage'");
        }
        maybe(js, "etas", cfg.sweep.etas);
        maybe(js, "alphas", cfg.sweep.alphas);
        maybe(js, "threads", cfg.sweep.threads);
    }

    if (j.contains("simulate")) {
        const auto& js = j.at("simulate");
        maybe(js, "steps", cfg.simulate.steps);
        if (js.contains("scenario")) {
            if (js.at("scenario").is_string()) {
                cfg.simulate.scenario_name = js.at("scenario").get<std::string>();
                if (cfg.simulate.scenario_name != "packaged")
                    throw UsageError("unknown scenario name: " + cfg.simulate.scenario_name);
            } else {
                cfg.simulate.scenario_name = "custom";
                cfg.simulate.scenario = scenario_from_json(js.at("scenario"));
            }
        }
        if (js.contains("shift")) {
            const auto& jf = js.at("shift");
            ShiftSpec shift;
            shift.onset = jf.at("onset").get<std::int64_t>();
            maybe(jf, "sensors", shift.sensors);
            shift.kind = shift_kind_from_string(jf.value("kind", "offset"));
            maybe(jf, "amount", shift.amount);
            cfg.simulate.shift = shift;
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("config parse error in " + path + ": " + e.what());
    }
    try {
        return parse_config(j);
    } catch (const json::exception& e) {
        throw UsageError("bad config value in " + path + ": " + e.what());
    }
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["out"] = cfg.out;
    j["data"] = {{"path", cfg.data.path},
                 {"subsample", cfg.data.subsample},
                 {"train_end", cfg.data.split.train_end},
                 {"validation_end", cfg.data.split.validation_end}};
    j["encoder"] = {{"beta", cfg.encoder.beta},
                    {"thermometer_size", cfg.encoder.thermometer_size},
                    {"seconds_per_day", cfg.encoder.seconds_per_day},
                    {"include_mode_one_hot", cfg.encoder.include_mode_one_hot},
                    {"include_time_of_day", cfg.encoder.include_time_of_day},
                    {"include_mode_thermometer", cfg.encoder.include_mode_thermometer},
                    {"mode_vocabulary", cfg.encoder.mode_vocabulary}};
    j["encoder"]["mode_lengths"] = json::object();
    for (const auto& [mode, len] : cfg.encoder.mode_lengths)
        j["encoder"]["mode_lengths"][mode] = len;
    j["cumulant"] = {{"sensor", cfg.cumulant.sensor}, {"normalized", cfg.cumulant.normalized}};
    j["network"] = {{"hidden", cfg.hidden}};
    j["optimizer"] = {{"beta1", cfg.adam.beta1},
                      {"beta2", cfg.adam.beta2},
                      {"epsilon", cfg.adam.epsilon},
                      {"weight_decay", cfg.adam.weight_decay}};
    j["td"] = {{"gamma", cfg.td.gamma},
               {"eta", cfg.td.eta},
               {"alpha", cfg.td.alpha},
               {"batch_size", cfg.td.batch_size},
               {"epochs", cfg.td.epochs},
               {"replay_capacity", cfg.td.replay_capacity},
               {"replay_steps", cfg.td.replay_steps}};
    j["nstep"] = {{"n", cfg.nstep.n},
                  {"eta", cfg.nstep.eta},
                  {"alpha", cfg.nstep.alpha},
                  {"batch_size", cfg.nstep.batch_size},
                  {"epochs", cfg.nstep.epochs}};
    j["eval"] = {{"decay", cfg.eval.decay},
                 {"return_tol", cfg.eval.return_tol},
                 {"burn_in", cfg.eval.burn_in}};
    j["sweep"] = {{"style", cfg.sweep.style == SweepStyle::Joint ? "joint" : "two_stage"},
                  {"etas", cfg.sweep.etas},
                  {"alphas", cfg.sweep.alphas},
                  {"threads", cfg.sweep.threads}};
    j["simulate"] = json::object();
    j["simulate"]["steps"] = cfg.simulate.steps;
    if (cfg.simulate.scenario_name == "packaged")
        j["simulate"]["scenario"] = "packaged";
    else
        j["simulate"]["scenario"] = scenario_to_json(cfg.simulate.scenario);
    if (cfg.simulate.shift) {
        j["simulate"]["shift"] = {{"onset", cfg.simulate.shift->onset},
                                  {"sensors", cfg.simulate.shift->sensors},
                                  {"kind", shift_kind_to_string(cfg.simulate.shift->kind)},
                                  {"amount", cfg.simulate.shift->amount}};
    }
    return j;
}

}  // namespace gvfpred
