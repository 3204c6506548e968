#include "gvfpred/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "gvfpred/metrics.hpp"
#include "gvfpred/mlp.hpp"
#include "gvfpred/nstep.hpp"
#include "gvfpred/simulator.hpp"
#include "gvfpred/sweep.hpp"
#include "gvfpred/td.hpp"
#include "gvfpred/util.hpp"

namespace fs = std::filesystem;

namespace gvfpred {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kToolVersion = "1.0.0";

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory: " + dir);
}

void ensure_parent_dir(const std::string& file) {
    fs::path p(file);
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
        if (ec) throw DataError("cannot create directory for: " + file);
    }
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
    ensure_parent_dir(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write failed: " + path);
}

// Run manifest, written before the long work starts.
void write_manifest(const RunConfig& cfg, const std::string& command,
                    const nlohmann::json& inputs) {
    nlohmann::json j{
        {"command", command},
        {"tool_version", kToolVersion},
        {"seed", cfg.seed},
        {"config", config_to_json(cfg)},
        {"inputs", inputs},
    };
    write_json_file(j, cfg.out + "/manifest_" + command + ".json");
}

void write_outputs(const RunConfig& cfg, const std::string& command,
                   const std::vector<std::string>& artifacts) {
    nlohmann::json arts = nlohmann::json::array();
    for (const auto& path : artifacts)
        arts.push_back({{"path", path}, {"fnv1a64", to_hex(hash_file(path))}});
    write_json_file({{"command", command}, {"artifacts", arts}},
                    cfg.out + "/outputs_" + command + ".json");
}

std::vector<int> network_dims(const RunConfig& cfg, int input) {
    std::vector<int> dims;
    dims.push_back(input);
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(1);
    return dims;
}

std::vector<Eigen::Index> train_transition_starts(const PreparedData& prep) {
    std::vector<Eigen::Index> starts;
    for (Eigen::Index t = 0; t + 1 < prep.train_end(); ++t) starts.push_back(t);
    return starts;
}

bool is_td_family(Algo a) {
    return a != Algo::NStep;
}

struct ParsedLog {
    std::vector<std::int64_t> steps;
    std::vector<double> predictions;
    std::vector<double> cumulants;
    std::vector<double> deltas;
    std::vector<std::int64_t> target_steps;
    bool has_target_step = false;
};

ParsedLog read_deploy_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open deployment log: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty deployment log: " + path);

    ParsedLog log;
    if (line == "step,prediction,cumulant,delta") {
        log.has_target_step = false;
    } else if (line == "step,prediction,cumulant,delta,target_step") {
        log.has_target_step = true;
    } else {
        throw DataError("unrecognized deployment log header in " + path + ": " + line);
    }

    const std::size_t want = log.has_target_step ? 5 : 4;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            std::size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (cells.size() != want)
            throw DataError(path + ":" + std::to_string(line_no) + ": bad row width");
        log.steps.push_back(std::stoll(cells[0]));
        log.predictions.push_back(std::stod(cells[1]));
        log.cumulants.push_back(std::stod(cells[2]));
        log.deltas.push_back(std::stod(cells[3]));
        if (log.has_target_step) log.target_steps.push_back(std::stoll(cells[4]));
    }
    return log;
}

// Targets and the exclusion mask for scoring a deployment log: truncated
// returns (partials excluded) for the TD family, c_{t+n} (tail excluded) for
// n-step logs.
struct LogTargets {
    std::vector<double> values;
    std::vector<bool> exclude;
    std::string kind;
    std::int64_t horizon = 0;  // n for n-step logs
};

LogTargets log_targets(const ParsedLog& log, const RunConfig& cfg) {
    LogTargets out;
    const std::size_t n = log.cumulants.size();
    out.values.assign(n, kNaN);
    out.exclude.assign(n, true);
    if (log.has_target_step) {
        out.kind = "nstep";
        // the log pins its own horizon; config.nstep.n may have moved on
        const std::int64_t horizon_steps = log.target_steps[0] - log.steps[0];
        if (horizon_steps < 1) throw DataError("deployment log has a non-positive horizon");
        out.horizon = horizon_steps;
        const auto horizon = static_cast<std::size_t>(horizon_steps);
        for (std::size_t t = 0; t + horizon < n; ++t) {
            out.values[t] = log.cumulants[t + horizon];
            out.exclude[t] = false;
        }
    } else {
        out.kind = "gvf";
        Eigen::VectorXd cums = Eigen::Map<const Eigen::VectorXd>(log.cumulants.data(), n);
        auto rs = return_series(cums, cfg.td.gamma, cfg.eval.return_tol);
        for (std::size_t t = 0; t < n; ++t) {
            out.values[t] = rs.values[t];
            out.exclude[t] = rs.partial[t];
        }
    }
    return out;
}

std::string log_stem(const RunConfig& cfg, const std::string& log_path) {
    return cfg.out + "/" + fs::path(log_path).stem().string();
}

}  // namespace

Algo algo_from_string(const std::string& s) {
    if (s == "onlinetd" || s == "td") return Algo::OnlineTd;
    if (s == "tdreplay") return Algo::TdReplay;
    if (s == "nstep") return Algo::NStep;
    if (s == "frozen") return Algo::Frozen;
    throw UsageError("unknown algorithm '" + s + "' (want onlinetd|tdreplay|nstep|frozen)");
}

std::string algo_to_string(Algo a) {
    switch (a) {
        case Algo::OnlineTd: return "onlinetd";
        case Algo::TdReplay: return "tdreplay";
        case Algo::NStep: return "nstep";
        case Algo::Frozen: return "frozen";
    }
    return "onlinetd";
}

std::string checkpoint_path(const RunConfig& cfg, Algo algo) {
    return cfg.out + (is_td_family(algo) ? "/checkpoint_td.bin" : "/checkpoint_nstep.bin");
}

std::string deploy_log_path(const RunConfig& cfg, Algo algo) {
    return cfg.out + "/deploy_" + algo_to_string(algo) + ".csv";
}

PreparedData prepare_data(const RunConfig& cfg) {
    return prepare_dataset(load_records(cfg.data.path), cfg);
}

PreparedData prepare_dataset(Dataset input, const RunConfig& cfg) {
    PreparedData prep;

    Dataset d = subsample(input, cfg.data.subsample);

    prep.split = cfg.data.split;
    if (!(prep.split.train_end > 0 && prep.split.train_end < prep.split.validation_end &&
          prep.split.validation_end <= d.size()))
        throw DataError("config split does not fit the data (N=" + std::to_string(d.size()) + ")");

    // normalization reference: the training segment only
    auto train_meta = compute_meta(d, 0, prep.split.train_end);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < train_meta.size(); ++i) {
        if (train_meta[i].constant)
            prep.removed_sensors.push_back(train_meta[i].name);
        else
            keep.push_back(i);
    }
    if (keep.empty()) throw DataError("all sensors constant over the training segment");

    prep.data = select_sensors(d, keep);
    prep.meta.clear();
    for (std::size_t i : keep) prep.meta.push_back(train_meta[i]);
    prep.data.meta = prep.meta;
    prep.data = impute_missing(std::move(prep.data));

    prep.encoder_config = cfg.encoder;
    if (prep.encoder_config.mode_vocabulary.empty()) {
        // first-appearance order over the whole file keeps the layout stable
        std::set<std::string> seen;
        for (const auto& r : prep.data.records)
            if (seen.insert(r.mode).second)
                prep.encoder_config.mode_vocabulary.push_back(r.mode);
    }

    if (cfg.cumulant.sensor.empty())
        throw UsageError("config is missing cumulant.sensor");
    prep.cumulant_row = -1;
    for (std::size_t i = 0; i < prep.meta.size(); ++i)
        if (prep.meta[i].name == cfg.cumulant.sensor) prep.cumulant_row = static_cast<Eigen::Index>(i);
    if (prep.cumulant_row < 0)
        throw DataError("cumulant sensor '" + cfg.cumulant.sensor +
                        "' is missing or constant over the training segment");

    Encoder enc(prep.encoder_config, prep.meta);
    prep.layout = enc.layout_string();
    prep.layout_hash = enc.layout_hash();

    const Eigen::Index n = static_cast<Eigen::Index>(prep.data.size());
    prep.states.resize(enc.state_width(), n);
    prep.cumulants.resize(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        AugmentedState st = enc.encode(prep.data.records[t]);
        prep.states.col(t) = st.s_hat;
        prep.cumulants[t] = cfg.cumulant.normalized
                                ? prep.states(prep.cumulant_row, t)
                                : prep.data.records[t].values[prep.cumulant_row];
    }
    return prep;
}

void run_simulate(const RunConfig& cfg) {
    ensure_dir(cfg.out);
    PlantScenario sc = cfg.simulate.scenario_name == "packaged" ? packaged_scenario()
                                                                : cfg.simulate.scenario;
    nlohmann::json inputs{{"scenario", cfg.simulate.scenario_name},
                          {"steps", cfg.simulate.steps},
                          {"output", cfg.data.path}};
    write_manifest(cfg, "simulate", inputs);

    Dataset d = generate(sc, cfg.simulate.steps, cfg.seed);
    if (cfg.simulate.shift) d = inject_shift(d, *cfg.simulate.shift);
    ensure_parent_dir(cfg.data.path);
    save_records(d, cfg.data.path);
    write_outputs(cfg, "simulate", {cfg.data.path});
}

void run_pretrain(const RunConfig& cfg, Algo algo) {
    ensure_dir(cfg.out);
    PreparedData prep = prepare_data(cfg);
    const std::string kind = is_td_family(algo) ? "td" : "nstep";
    write_manifest(cfg, "pretrain_" + kind,
                   {{"data_hash", to_hex(hash_file(cfg.data.path))},
                    {"encoder_layout", prep.layout},
                    {"encoder_layout_hash", to_hex(prep.layout_hash)},
                    {"removed_sensors", prep.removed_sensors},
                    {"state_width", prep.states.rows()}});

    const auto dims = network_dims(cfg, static_cast<int>(prep.states.rows()));
    Network net = init_network(dims, mix_seed(cfg.seed, fnv1a64("init")));
    OptimizerState opt = init_optimizer(net, cfg.adam);

    if (is_td_family(algo)) {
        auto starts = train_transition_starts(prep);
        offline_td(net, opt, prep.states, prep.cumulants, starts, cfg.td,
                   mix_seed(cfg.seed, fnv1a64("offline")));
    } else {
        auto pairs = build_nstep_pairs(prep.cumulants, 0, prep.train_end(), cfg.nstep.n);
        offline_nstep(net, opt, prep.states, pairs, cfg.nstep,
                      mix_seed(cfg.seed, fnv1a64("offline")));
    }
    if (!net.all_finite())
        throw NumericError("pretraining produced non-finite parameters (reduce eta?)");

    const std::string ckpt = checkpoint_path(cfg, algo);
    save_checkpoint(net, opt, ckpt, prep.layout_hash, prep.layout);
    write_outputs(cfg, "pretrain_" + kind, {ckpt, ckpt + ".manifest.json"});
}

void run_sweep(const RunConfig& cfg, Algo algo) {
    ensure_dir(cfg.out);
    PreparedData prep = prepare_data(cfg);
    const std::string kind = is_td_family(algo) ? "td" : "nstep";
    write_manifest(cfg, "sweep_" + kind,
                   {{"data_hash", to_hex(hash_file(cfg.data.path))},
                    {"grid_etas", cfg.sweep.etas},
                    {"grid_alphas", cfg.sweep.alphas}});

    const Eigen::Index te = prep.train_end();
    const Eigen::Index ve = prep.validation_end();
    SweepInputs inputs{
        prep.states.middleCols(0, te),
        prep.cumulants.segment(0, te),
        prep.states.middleCols(te, ve - te),
        prep.cumulants.segment(te, ve - te),
        cfg.hidden,
        cfg.adam,
        is_td_family(algo) ? LearnerKind::Gvf : LearnerKind::NStep,
        cfg.td,
        cfg.nstep,
        cfg.eval.return_tol,
    };
    SweepGrid grid{cfg.sweep.etas, cfg.sweep.alphas};
    SweepResult result = validation_sweep(inputs, grid, cfg.sweep.style, cfg.seed,
                                          cfg.sweep.threads);

    const std::string report = cfg.out + "/sweep_" + kind + ".csv";
    write_sweep_report(result, grid, report);
    const std::string best = cfg.out + "/sweep_" + kind + "_best.json";
    write_json_file({{"eta", result.best_eta},
                     {"alpha", result.best_alpha},
                     {"mean_error", result.cells[result.best_index].mean_error},
                     {"cells", result.cells.size()}},
                    best);
    write_outputs(cfg, "sweep_" + kind, {report, best});
}

void run_deploy(const RunConfig& cfg, Algo algo) {
    ensure_dir(cfg.out);
    PreparedData prep = prepare_data(cfg);
    write_manifest(cfg, "deploy_" + algo_to_string(algo),
                   {{"data_hash", to_hex(hash_file(cfg.data.path))},
                    {"checkpoint", checkpoint_path(cfg, algo)}});

    const auto dims = network_dims(cfg, static_cast<int>(prep.states.rows()));
    Checkpoint ck = load_checkpoint(checkpoint_path(cfg, algo), dims);
    if (ck.layout_hash != prep.layout_hash)
        throw DataError("checkpoint encoder layout " + to_hex(ck.layout_hash) +
                        " does not match data layout " + to_hex(prep.layout_hash));

    const Eigen::Index ve = prep.validation_end();
    const Eigen::Index n = prep.states.cols() - ve;
    auto dep_states = prep.states.middleCols(ve, n);
    auto dep_cums = prep.cumulants.segment(ve, n);

    const std::string log_path = deploy_log_path(cfg, algo);
    ensure_parent_dir(log_path);
    std::ofstream out(log_path, std::ios::binary);
    if (!out) throw DataError("cannot write deployment log: " + log_path);

    if (algo == Algo::NStep) {
        auto rows = online_nstep_deploy(ck.net, ck.opt, dep_states, dep_cums, cfg.nstep.n,
                                        cfg.nstep.alpha, false, ve);
        out << "step,prediction,cumulant,delta,target_step\n";
        for (const auto& r : rows)
            out << r.step << ',' << format_double(r.prediction) << ',' << format_double(r.cumulant)
                << ',' << format_double(r.delta) << ',' << r.target_step << '\n';
    } else {
        std::vector<DeployRow> rows;
        if (algo == Algo::TdReplay) {
            auto starts = train_transition_starts(prep);
            rows = td_with_replay_deploy(ck.net, ck.opt, prep.states, prep.cumulants, starts,
                                         dep_states, dep_cums, cfg.td,
                                         mix_seed(cfg.seed, fnv1a64("deploy")), ve);
        } else {
            rows = online_td_deploy(ck.net, ck.opt, dep_states, dep_cums, cfg.td.gamma,
                                    cfg.td.alpha, algo == Algo::Frozen, ve);
        }
        out << "step,prediction,cumulant,delta\n";
        for (const auto& r : rows)
            out << r.step << ',' << format_double(r.prediction) << ',' << format_double(r.cumulant)
                << ',' << format_double(r.delta) << '\n';
    }
    out.flush();
    if (!out) throw DataError("deployment log write failed: " + log_path);
    if (!ck.net.all_finite())
        throw NumericError("deployment produced non-finite parameters (reduce alpha?)");
    write_outputs(cfg, "deploy_" + algo_to_string(algo), {log_path});
}

void run_eval(const RunConfig& cfg, const std::string& log_path) {
    ensure_dir(cfg.out);
    write_manifest(cfg, "eval", {{"log", log_path}});
    ParsedLog log = read_deploy_log(log_path);
    if (log.steps.empty()) throw DataError("deployment log has no rows: " + log_path);
    LogTargets targets = log_targets(log, cfg);

    auto series = nmse_series(log.predictions, targets.values, cfg.eval.decay,
                              cfg.eval.resolved_burn_in(), &targets.exclude);

    const std::string stem = log_stem(cfg, log_path);
    const std::string series_path = stem + "_nmse.csv";
    {
        std::ofstream out(series_path, std::ios::binary);
        if (!out) throw DataError("cannot write NMSE series: " + series_path);
        out << "step,nmse\n";
        for (std::size_t t = 0; t < series.size(); ++t)
            out << log.steps[t] << ',' << format_double(series[t]) << '\n';
        if (!out) throw DataError("NMSE series write failed: " + series_path);
    }

    std::size_t valid = 0;
    double last = kNaN;
    for (double v : series)
        if (!std::isnan(v)) {
            ++valid;
            last = v;
        }
    const std::size_t n = series.size();
    nlohmann::json summary{
        {"kind", targets.kind},
        {"log", log_path},
        {"steps", n},
        {"valid_steps", valid},
        {"decay", cfg.eval.decay},
        {"burn_in", cfg.eval.resolved_burn_in()},
        {"mean_nmse", nan_mean(series)},
        {"final_quarter_mean_nmse", nan_mean(series, n - n / 4, n)},
        {"last_nmse", last},
    };
    if (targets.kind == "gvf") {
        summary["gamma"] = cfg.td.gamma;
        summary["return_tol"] = cfg.eval.return_tol;
    } else {
        summary["n"] = targets.horizon;
    }
    const std::string summary_path = stem + "_eval.json";
    write_json_file(summary, summary_path);
    write_outputs(cfg, "eval", {series_path, summary_path});
}

void run_plotdata(const RunConfig& cfg, const std::string& log_path) {
    ensure_dir(cfg.out);
    write_manifest(cfg, "plotdata", {{"log", log_path}});
    ParsedLog log = read_deploy_log(log_path);
    if (log.steps.empty()) throw DataError("deployment log has no rows: " + log_path);
    LogTargets targets = log_targets(log, cfg);

    const std::string path = log_stem(cfg, log_path) + "_plot.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write plot data: " + path);
    const char* target_name = targets.kind == "gvf" ? "return" : "nstep_target";
    out << "step,cumulant,prediction," << target_name << '\n';
    for (std::size_t t = 0; t < log.steps.size(); ++t) {
        const double target = targets.exclude[t] ? kNaN : targets.values[t];
        out << log.steps[t] << ',' << format_double(log.cumulants[t]) << ','
            << format_double(log.predictions[t]) << ',' << format_double(target) << '\n';
    }
    if (!out) throw DataError("plot data write failed: " + path);
    write_outputs(cfg, "plotdata", {path});
}

}  // namespace gvfpred
