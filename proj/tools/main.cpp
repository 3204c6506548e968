#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gvfpred/commands.hpp"
#include "gvfpred/config.hpp"
#include "gvfpred/util.hpp"

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> gamma;
    std::optional<int> n;
    std::optional<double> alpha;
    std::optional<double> eta;
};

void apply(gvfpred::RunConfig& cfg, const Overrides& ov) {
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.out) cfg.out = *ov.out;
    if (ov.gamma) cfg.td.gamma = *ov.gamma;
    if (ov.n) cfg.nstep.n = *ov.n;
    if (ov.alpha) {
        cfg.td.alpha = *ov.alpha;
        cfg.nstep.alpha = *ov.alpha;
    }
    if (ov.eta) {
        cfg.td.eta = *ov.eta;
        cfg.nstep.eta = *ov.eta;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming GVF / n-step prediction engine for plant telemetry"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::string algo_name = "onlinetd";
    std::string log_path;
    Overrides ov;

    app.add_option("--config", config_path, "structured configuration file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--seed", ov.seed, "root seed override");
    app.add_option("--out", ov.out, "output directory override");
    app.add_option("--algo", algo_name, "algorithm: onlinetd | tdreplay | nstep | frozen");
    app.add_option("--gamma", ov.gamma, "GVF discount override");
    app.add_option("--n", ov.n, "n-step horizon override");
    app.add_option("--alpha", ov.alpha, "online step size override");
    app.add_option("--eta", ov.eta, "offline step size override");
    app.add_option("--log", log_path, "deployment log to evaluate (eval/plotdata)");

    auto* simulate = app.add_subcommand("simulate", "generate a telemetry file");
    auto* pretrain = app.add_subcommand("pretrain", "offline training, writes a checkpoint");
    auto* sweep = app.add_subcommand("sweep", "deployment-mimicking step-size selection");
    auto* deploy = app.add_subcommand("deploy", "stream the deployment segment, write a log");
    auto* eval = app.add_subcommand("eval", "NMSE series and summary for a deployment log");
    auto* plotdata = app.add_subcommand("plotdata", "aligned cumulant/prediction/target columns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        gvfpred::RunConfig cfg = gvfpred::load_config(config_path);
        apply(cfg, ov);
        const gvfpred::Algo algo = gvfpred::algo_from_string(algo_name);
        const std::string log =
            log_path.empty() ? gvfpred::deploy_log_path(cfg, algo) : log_path;

        if (simulate->parsed())
            gvfpred::run_simulate(cfg);
        else if (pretrain->parsed())
            gvfpred::run_pretrain(cfg, algo);
        else if (sweep->parsed())
            gvfpred::run_sweep(cfg, algo);
        else if (deploy->parsed())
            gvfpred::run_deploy(cfg, algo);
        else if (eval->parsed())
            gvfpred::run_eval(cfg, log);
        else if (plotdata->parsed())
            gvfpred::run_plotdata(cfg, log);
        return 0;
    } catch (const gvfpred::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const gvfpred::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const gvfpred::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
