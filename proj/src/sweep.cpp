#include "gvfpred/sweep.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "gvfpred/metrics.hpp"
#include "gvfpred/util.hpp"

namespace gvfpred {

namespace {

std::vector<int> full_dims(int input, const std::vector<int>& hidden) {
    std::vector<int> dims;
    dims.push_back(input);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(1);
    return dims;
}

std::vector<Eigen::Index> all_transitions(Eigen::Index n) {
    std::vector<Eigen::Index> starts;
    if (n > 1) {
        starts.reserve(n - 1);
        for (Eigen::Index t = 0; t + 1 < n; ++t) starts.push_back(t);
    }
    return starts;
}

// Mean squared pre-update prediction error over the validation stream.
// A cell whose parameters blow up scores infinity instead of failing the run.
double score_cell(const SweepInputs& in, double eta, double alpha, std::uint64_t cell_seed) try {
    const auto dims = full_dims(static_cast<int>(in.train_states.rows()), in.hidden_dims);
    Network net = init_network(dims, cell_seed);
    OptimizerState opt = init_optimizer(net, in.adam);

    double sum = 0.0;
    std::size_t count = 0;

    if (in.kind == LearnerKind::Gvf) {
        TdConfig cfg = in.td;
        cfg.eta = eta;
        auto starts = all_transitions(in.train_states.cols());
        offline_td(net, opt, in.train_states, in.train_cumulants, starts, cfg, cell_seed);

        auto rows = online_td_deploy(net, opt, in.val_states, in.val_cumulants, cfg.gamma, alpha);
        auto returns = return_series(in.val_cumulants, cfg.gamma, in.return_tol);
        for (std::size_t t = 0; t < rows.size(); ++t) {
            if (returns.partial[t]) continue;
            const double err = rows[t].prediction - returns.values[t];
            sum += err * err;
            ++count;
        }
    } else {
        NStepConfig cfg = in.nstep;
        cfg.eta = eta;
        auto pairs = build_nstep_pairs(in.train_cumulants, 0, in.train_states.cols(), cfg.n);
        offline_nstep(net, opt, in.train_states, pairs, cfg, cell_seed);

        auto rows = online_nstep_deploy(net, opt, in.val_states, in.val_cumulants, cfg.n, alpha);
        for (std::size_t t = 0; t + cfg.n < rows.size(); ++t) {
            const double err = rows[t].prediction - in.val_cumulants[t + cfg.n];
            sum += err * err;
            ++count;
        }
    }

    if (count == 0) throw DataError("sweep: validation segment too short to score");
    const double mean = sum / static_cast<double>(count);
    return std::isfinite(mean) ? mean : std::numeric_limits<double>::infinity();
} catch (const NumericError&) {
    return std::numeric_limits<double>::infinity();
}

// Frozen NMSE over the training stream; two-stage eta selection criterion.
double frozen_train_error(const SweepInputs& in, double eta, std::uint64_t cell_seed) try {
    const auto dims = full_dims(static_cast<int>(in.train_states.rows()), in.hidden_dims);
    Network net = init_network(dims, cell_seed);
    OptimizerState opt = init_optimizer(net, in.adam);

    double sum = 0.0;
    std::size_t count = 0;
    if (in.kind == LearnerKind::Gvf) {
        TdConfig cfg = in.td;
        cfg.eta = eta;
        auto starts = all_transitions(in.train_states.cols());
        offline_td(net, opt, in.train_states, in.train_cumulants, starts, cfg, cell_seed);
        auto returns = return_series(in.train_cumulants, cfg.gamma, in.return_tol);
        for (Eigen::Index t = 0; t < in.train_states.cols(); ++t) {
            if (returns.partial[t]) continue;
            const double err = forward(net, in.train_states.col(t)) - returns.values[t];
            sum += err * err;
            ++count;
        }
    } else {
        NStepConfig cfg = in.nstep;
        cfg.eta = eta;
        auto pairs = build_nstep_pairs(in.train_cumulants, 0, in.train_states.cols(), cfg.n);
        offline_nstep(net, opt, in.train_states, pairs, cfg, cell_seed);
        for (const auto& p : pairs) {
            const double err = forward(net, in.train_states.col(p.state_index)) - p.target;
            sum += err * err;
            ++count;
        }
    }
    if (count == 0) throw DataError("sweep: training segment too short to score");
    const double mean = sum / static_cast<double>(count);
    return std::isfinite(mean) ? mean : std::numeric_limits<double>::infinity();
} catch (const NumericError&) {
    return std::numeric_limits<double>::infinity();
}

void run_cells(std::vector<SweepCell>& cells, const SweepInputs& in, unsigned threads) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, cells.size() == 0 ? 1 : static_cast<unsigned>(cells.size()));

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size() || failed.load()) return;
            try {
                cells[i].mean_error = score_cell(in, cells[i].eta, cells[i].alpha, cells[i].seed);
                cells[i].diverged = !std::isfinite(cells[i].mean_error);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                error_message = e.what();
                failed.store(true);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load()) throw DataError("sweep cell failed: " + error_message);
}

}  // namespace

SweepResult validation_sweep(const SweepInputs& in, const SweepGrid& grid, SweepStyle style,
                             std::uint64_t seed, unsigned threads) {
    if (grid.etas.empty() || grid.alphas.empty())
        throw DataError("sweep: grid must have at least one eta and one alpha");
    for (double e : grid.etas)
        if (!(e > 0.0)) throw DataError("sweep: step sizes must be positive");
    for (double a : grid.alphas)
        if (!(a > 0.0)) throw DataError("sweep: step sizes must be positive");

    SweepResult result;

    if (style == SweepStyle::Joint) {
        std::size_t idx = 0;
        for (double eta : grid.etas)
            for (double alpha : grid.alphas)
                result.cells.push_back({eta, alpha, 0.0, mix_seed(seed, idx++), false});
        run_cells(result.cells, in, threads);
    } else {
        // stage 1: eta by lowest frozen training error
        std::size_t best_eta_idx = 0;
        double best_train = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.etas.size(); ++i) {
            const double err = frozen_train_error(in, grid.etas[i], mix_seed(seed, 1000 + i));
            if (err < best_train) {
                best_train = err;
                best_eta_idx = i;
            }
        }
        // stage 2: alpha on validation, deployment-mimicking
        const double eta = grid.etas[best_eta_idx];
        for (std::size_t j = 0; j < grid.alphas.size(); ++j)
            result.cells.push_back({eta, grid.alphas[j], 0.0, mix_seed(seed, 1000 + best_eta_idx), false});
        run_cells(result.cells, in, threads);
    }

    result.best_index = 0;
    for (std::size_t i = 1; i < result.cells.size(); ++i)
        if (result.cells[i].mean_error < result.cells[result.best_index].mean_error)
            result.best_index = i;
    result.best_eta = result.cells[result.best_index].eta;
    result.best_alpha = result.cells[result.best_index].alpha;
    return result;
}

void write_sweep_report(const SweepResult& r, const SweepGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write sweep report: " + path);
    out << "eta";
    for (double a : grid.alphas) out << ",alpha=" << format_double(a);
    out << '\n';
    std::size_t i = 0;
    // grid order is eta-major; two-stage results hold a single eta row
    while (i < r.cells.size()) {
        out << format_double(r.cells[i].eta);
        for (std::size_t j = 0; j < grid.alphas.size() && i < r.cells.size(); ++j, ++i)
            out << ',' << format_double(r.cells[i].mean_error);
        out << '\n';
    }
    if (!out) throw DataError("sweep report write failed: " + path);
}

}  // namespace gvfpred
