// Acceptance suite: one pass/fail line per criterion, non-zero exit on any
// failure. Oracles (linear solves, finite differences, closed-form sums) live
// here, independent of the implementation paths they check.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gvfpred/commands.hpp"
#include "gvfpred/encoder.hpp"
#include "gvfpred/metrics.hpp"
#include "gvfpred/mlp.hpp"
#include "gvfpred/nstep.hpp"
#include "gvfpred/simulator.hpp"
#include "gvfpred/sweep.hpp"
#include "gvfpred/td.hpp"
#include "gvfpred/util.hpp"

using namespace gvfpred;
namespace fs = std::filesystem;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw CheckFailure(what);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

std::string fresh_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

// ---------------------------------------------------------------------------
// criterion 1: TD fixed point on a 5-state chain, online and offline
// ---------------------------------------------------------------------------

void criterion_td_fixed_point(std::string& note) {
    const auto t0 = std::chrono::steady_clock::now();

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(5, 5);
    for (int i = 0; i < 5; ++i) P(i, (i + 1) % 5) = 1.0;
    Eigen::VectorXd c(5);
    c << 0.1, 0.9, 0.3, 0.7, 0.5;
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(5, 5);

    double worst_online = 0.0, worst_offline = 0.0;
    for (double gamma : {0.5, 0.9}) {
        // oracle: direct linear solve of v = (I - gamma P)^{-1} P c
        Eigen::VectorXd target =
            (Eigen::MatrixXd::Identity(5, 5) - gamma * P).fullPivLu().solve(P * c);

        // constant-step Adam settles in an alpha-wide band; a small-step
        // continuation run collapses it onto the fixed point
        Network on_net = init_network({5, 1}, 11);
        OptimizerState on_opt = init_optimizer(on_net, {0.9, 0.99, 1e-4, 0.0});
        Gradient scratch = zero_gradient_like(on_net);
        for (int t = 0; t < 400000; ++t) {
            const int s = t % 5, nx = (t + 1) % 5;
            const double alpha = t < 200000 ? 2e-3 : 5e-5;
            online_td_step(on_net, on_opt, eye.col(s), eye.col(nx), c[nx], gamma, alpha, scratch);
        }
        for (int i = 0; i < 5; ++i)
            worst_online = std::max(worst_online, std::abs(forward(on_net, eye.col(i)) - target[i]));

        Eigen::MatrixXd states(5, 501);
        Eigen::VectorXd cums(501);
        for (int t = 0; t < 501; ++t) {
            states.col(t) = eye.col(t % 5);
            cums[t] = c[t % 5];
        }
        std::vector<Eigen::Index> starts;
        for (Eigen::Index t = 0; t + 1 < 501; ++t) starts.push_back(t);
        TdConfig cfg;
        cfg.gamma = gamma;
        cfg.batch_size = 500;
        cfg.epochs = 15000;
        Network off_net = init_network({5, 1}, 13);
        OptimizerState off_opt = init_optimizer(off_net, {0.9, 0.99, 1e-4, 0.0});
        cfg.eta = 2e-3;
        offline_td(off_net, off_opt, states, cums, starts, cfg, 99);
        cfg.eta = 5e-5;
        offline_td(off_net, off_opt, states, cums, starts, cfg, 100);
        for (int i = 0; i < 5; ++i)
            worst_offline =
                std::max(worst_offline, std::abs(forward(off_net, eye.col(i)) - target[i]));
    }

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    note = "max err online " + fmt(worst_online) + ", offline " + fmt(worst_offline) + ", " +
           fmt(secs) + "s";
    require(worst_online < 1e-3, "online TD max error " + fmt(worst_online) + " >= 1e-3");
    require(worst_offline < 1e-3, "offline TD max error " + fmt(worst_offline) + " >= 1e-3");
    require(secs < 30.0, "runtime " + fmt(secs) + "s exceeds 30s");
}

// ---------------------------------------------------------------------------
// criterion 2: constant cumulant, gamma=0.99 -> 100; truncated return check
// ---------------------------------------------------------------------------

void criterion_constant_cumulant(std::string& note) {
    std::vector<double> ones(2000, 1.0);
    auto r = truncated_return(ones, 0.99, 1e-4);
    require(!r.partial, "return unexpectedly partial");
    require(std::abs(r.value - 100.0) <= 0.01,
            "truncated return " + fmt(r.value) + " not within 0.01 of 100");

    Network net = init_network({1, 1}, 23);
    OptimizerState opt = init_optimizer(net, {0.9, 0.99, 1e-4, 0.0});
    Gradient scratch = zero_gradient_like(net);
    Eigen::VectorXd s = Eigen::VectorXd::Ones(1);
    for (int t = 0; t < 200000; ++t)
        online_td_step(net, opt, s, s, 1.0, 0.99, 5e-3, scratch);
    const double v = forward(net, s);
    note = "learned " + fmt(v) + ", return " + fmt(r.value);
    require(std::abs(v - 100.0) <= 1.0, "learned value " + fmt(v) + " not within 1% of 100");
}

// ---------------------------------------------------------------------------
// criterion 3: backprop vs central finite differences, 100+ random pairs
// ---------------------------------------------------------------------------

void criterion_gradient_check(std::string& note) {
    std::mt19937_64 rng(515151);
    std::uniform_int_distribution<int> pick(1, 16);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);
    const double h = 1e-5, rel = 1e-4, floor = 1e-6;

    int accepted = 0, attempts = 0;
    double worst = 0.0;
    while (accepted < 100 && attempts < 2000) {
        ++attempts;
        std::vector<int> dims{pick(rng)};
        for (int l = 0, hl = pick(rng) % 3; l < hl; ++l) dims.push_back(pick(rng));
        dims.push_back(1);
        Network net = init_network(dims, rng());
        Eigen::VectorXd x(dims[0]);
        for (int i = 0; i < dims[0]; ++i) x[i] = ux(rng);

        // finite differences are invalid near the rectifier kink; resample
        bool kink = false;
        {
            Eigen::VectorXd a = x;
            for (std::size_t l = 0; l + 1 < net.layer_count(); ++l) {
                Eigen::VectorXd z = net.weights[l] * a + net.biases[l];
                if ((z.array().abs() < 1e-3).any()) kink = true;
                a = z.cwiseMax(0.0);
            }
        }
        if (kink) continue;

        Gradient g = zero_gradient_like(net);
        forward_backward(net, x, g);
        auto fd_check = [&](double& w, double analytic) {
            const double save = w;
            w = save + h;
            const double up = forward(net, x);
            w = save - h;
            const double dn = forward(net, x);
            w = save;
            const double fd = (up - dn) / (2.0 * h);
            const double err = std::abs(analytic - fd) /
                               (std::max(std::abs(analytic), std::abs(fd)) + floor);
            worst = std::max(worst, err);
            return err <= rel;
        };
        for (std::size_t l = 0; l < net.weights.size(); ++l) {
            for (int cc = 0; cc < net.weights[l].cols(); ++cc)
                for (int rr = 0; rr < net.weights[l].rows(); ++rr)
                    require(fd_check(net.weights[l](rr, cc), g.weights[l](rr, cc)),
                            "gradient mismatch at layer " + std::to_string(l));
            for (int rr = 0; rr < net.biases[l].size(); ++rr)
                require(fd_check(net.biases[l][rr], g.biases[l][rr]),
                        "bias gradient mismatch at layer " + std::to_string(l));
        }
        ++accepted;
    }
    note = std::to_string(accepted) + " nets, worst rel err " + fmt(worst);
    require(accepted >= 100, "only " + std::to_string(accepted) + " smooth samples");
}

// ---------------------------------------------------------------------------
// criterion 4: optimizer-state handoff across a checkpoint round trip
// ---------------------------------------------------------------------------

void criterion_optimizer_handoff(std::string& note) {
    // 400 transitions at batch 8: exactly 50 batches per epoch
    const int n = 401, batch = 8;
    std::mt19937_64 rng(8080);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd states(6, n);
    Eigen::VectorXd cums(n);
    for (int t = 0; t < n; ++t) {
        for (int i = 0; i < 6; ++i) states(i, t) = gauss(rng);
        cums[t] = gauss(rng);
    }
    std::vector<Eigen::Index> starts;
    for (Eigen::Index t = 0; t + 1 < n; ++t) starts.push_back(t);
    TdConfig cfg;
    cfg.gamma = 0.9;
    cfg.eta = 1e-3;
    cfg.batch_size = batch;

    Network straight = init_network({6, 12, 1}, 321);
    OptimizerState straight_opt = init_optimizer(straight, {0.9, 0.99, 1e-4, 0.003});
    offline_td(straight, straight_opt, states, cums, starts, cfg, 55, 0, 2);

    Network half = init_network({6, 12, 1}, 321);
    OptimizerState half_opt = init_optimizer(half, {0.9, 0.99, 1e-4, 0.003});
    offline_td(half, half_opt, states, cums, starts, cfg, 55, 0, 1);
    require(half_opt.step_count == 50, "expected 50 batches in the first leg");

    const auto path = fs::temp_directory_path() / "gvfpred_accept_handoff.bin";
    save_checkpoint(half, half_opt, path.string(), 0, "");
    Checkpoint ck = load_checkpoint(path.string());
    offline_td(ck.net, ck.opt, states, cums, starts, cfg, 55, 1, 2);

    require(ck.opt.step_count == straight_opt.step_count, "step counts differ");
    for (std::size_t l = 0; l < straight.weights.size(); ++l) {
        require(ck.net.weights[l] == straight.weights[l], "weights differ bitwise");
        require(ck.net.biases[l] == straight.biases[l], "biases differ bitwise");
        require(ck.opt.m_weights[l] == straight_opt.m_weights[l], "first moments differ");
        require(ck.opt.v_weights[l] == straight_opt.v_weights[l], "second moments differ");
        require(ck.opt.m_biases[l] == straight_opt.m_biases[l], "bias first moments differ");
        require(ck.opt.v_biases[l] == straight_opt.v_biases[l], "bias second moments differ");
    }
    note = "100 batches straight == 50 + round trip + 50, bit-identical";
}

// ---------------------------------------------------------------------------
// criterion 5: n-step alignment on the ramp, first update exactly at step n
// ---------------------------------------------------------------------------

void criterion_nstep_alignment(std::string& note) {
    const int n = 100, steps = 1000;
    Eigen::MatrixXd states(2, steps);
    Eigen::VectorXd cums(steps);
    for (int t = 0; t < steps; ++t) {
        states(0, t) = static_cast<double>(t);
        states(1, t) = 1.0;
        cums[t] = static_cast<double>(t);  // ramp: c_t = t
    }

    auto pairs = build_nstep_pairs(cums, 0, steps, n);
    require(pairs.size() == static_cast<std::size_t>(steps - n), "pair count != N - n");
    for (const auto& p : pairs) {
        require(p.target_step - p.state_index == n, "pair misaligned");
        require(p.target == static_cast<double>(p.state_index + n), "ramp target wrong");
    }

    Network net = init_network({2, 4, 1}, 5);
    OptimizerState opt = init_optimizer(net, {0.9, 0.99, 1e-4, 0.0});
    auto rows = online_nstep_deploy(net, opt, states.leftCols(400), cums.head(400), n, 1e-4);
    require(rows.size() == 400, "every step must log a prediction");
    std::int64_t first_update = -1;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        if (!std::isnan(rows[t].delta)) {
            first_update = static_cast<std::int64_t>(t);
            break;
        }
    }
    require(first_update == n, "first update at step " + std::to_string(first_update) +
                                   ", expected " + std::to_string(n));
    require(opt.step_count == 400 - n, "update count != steps - n");
    note = "pairs aligned, first update at step " + std::to_string(first_update);
}

// ---------------------------------------------------------------------------
// criteria 6 and 7: shifted deployment, online vs frozen vs replay
// ---------------------------------------------------------------------------

// One pretraining on the packaged scenario serves two comparisons:
//  - criterion 6 deploys on data with a regime shift injected at deployment
//    start (frozen vs online),
//  - criterion 7 deploys on the plain continuation (online vs replay), the
//    setting in which the two are expected to score close to each other.
struct PackagedRunResults {
    double frozen_shifted = 0.0;
    double online_shifted = 0.0;
    double online_plain = 0.0;
    double replay_plain = 0.0;
    double shifted_secs = 0.0;
};

PackagedRunResults run_packaged_deployments() {
    RunConfig cfg;
    cfg.seed = 20240;
    cfg.data.split = {100000, 120000};
    cfg.encoder.beta = 0.99;
    cfg.encoder.mode_lengths = {{"PROD", 3300.0}, {"BW", 300.0}, {"MIT", 600.0}};
    cfg.cumulant.sensor = "membrane_pressure";
    cfg.hidden = {32, 32};
    cfg.adam = {0.9, 0.99, 1e-4, 0.003};
    cfg.td.gamma = 0.99;
    cfg.td.eta = 1e-3;
    cfg.td.batch_size = 32;
    cfg.td.epochs = 24;
    cfg.td.replay_capacity = 10000;
    cfg.td.replay_steps = 1;
    cfg.eval.decay = 0.001;
    cfg.eval.return_tol = 1e-4;
    // online step sizes per deployment, as the deployment-mimicking selection
    // picks them: large enough to chase the regime shift, small when the
    // deployment matches training
    const double alpha_shifted = 1e-3;
    const double alpha_plain = 1e-6;

    const std::int64_t total = 220000;
    Dataset plain = generate(packaged_scenario(), total, cfg.seed);
    ShiftSpec shift;
    shift.onset = static_cast<std::int64_t>(cfg.data.split.validation_end);
    shift.sensors = {"membrane_pressure"};
    shift.kind = ShiftSpec::Kind::Offset;
    shift.amount = 1.5;
    Dataset shifted = inject_shift(plain, shift);

    // the shift starts at deployment, so training segments are identical and
    // one pretrained network serves both deployments
    PreparedData prep_plain = prepare_dataset(std::move(plain), cfg);
    PreparedData prep_shifted = prepare_dataset(std::move(shifted), cfg);
    const Eigen::Index te = prep_plain.train_end(), ve = prep_plain.validation_end();
    const Eigen::Index dn = prep_plain.states.cols() - ve;

    std::vector<Eigen::Index> starts;
    for (Eigen::Index t = 0; t + 1 < te; ++t) starts.push_back(t);
    const auto dims = std::vector<int>{static_cast<int>(prep_plain.states.rows()), 32, 32, 1};
    Network net = init_network(dims, mix_seed(cfg.seed, 1));
    OptimizerState opt = init_optimizer(net, cfg.adam);
    offline_td(net, opt, prep_plain.states, prep_plain.cumulants, starts, cfg.td,
               mix_seed(cfg.seed, 2));

    auto score = [&](const std::vector<DeployRow>& rows, const Eigen::VectorXd& dep_cums) {
        auto rs = return_series(dep_cums, cfg.td.gamma, cfg.eval.return_tol);
        std::vector<double> preds(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) preds[i] = rows[i].prediction;
        std::vector<bool> exclude(rs.partial.begin(), rs.partial.end());
        auto series = nmse_series(preds, rs.values, cfg.eval.decay, 1000, &exclude);
        return nan_mean(series, series.size() - series.size() / 4, series.size());
    };

    PackagedRunResults out;
    const auto t0 = std::chrono::steady_clock::now();
    {
        Eigen::VectorXd dep_cums = prep_shifted.cumulants.segment(ve, dn);
        Network frozen_net = net;
        OptimizerState frozen_opt = opt;
        out.frozen_shifted =
            score(online_td_deploy(frozen_net, frozen_opt, prep_shifted.states.middleCols(ve, dn),
                                   dep_cums, cfg.td.gamma, 0.0, true),
                  dep_cums);
        Network online_net = net;
        OptimizerState online_opt = opt;
        out.online_shifted =
            score(online_td_deploy(online_net, online_opt, prep_shifted.states.middleCols(ve, dn),
                                   dep_cums, cfg.td.gamma, alpha_shifted, false),
                  dep_cums);
    }
    out.shifted_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
        Eigen::VectorXd dep_cums = prep_plain.cumulants.segment(ve, dn);
        Network online_net = net;
        OptimizerState online_opt = opt;
        out.online_plain =
            score(online_td_deploy(online_net, online_opt, prep_plain.states.middleCols(ve, dn),
                                   dep_cums, cfg.td.gamma, alpha_plain, false),
                  dep_cums);
        Network replay_net = net;
        OptimizerState replay_opt = opt;
        TdConfig replay_cfg = cfg.td;
        replay_cfg.alpha = alpha_plain;
        out.replay_plain = score(
            td_with_replay_deploy(replay_net, replay_opt, prep_plain.states, prep_plain.cumulants,
                                  starts, prep_plain.states.middleCols(ve, dn), dep_cums,
                                  replay_cfg, mix_seed(cfg.seed, 3)),
            dep_cums);
    }
    return out;
}

void criterion_online_beats_frozen(const PackagedRunResults& r, std::string& note) {
    note = "final-quarter EW-NMSE frozen " + fmt(r.frozen_shifted) + ", online " +
           fmt(r.online_shifted) + ", " + fmt(r.shifted_secs) + "s";
    require(std::isfinite(r.frozen_shifted) && std::isfinite(r.online_shifted),
            "non-finite NMSE");
    require(r.online_shifted < 0.8 * r.frozen_shifted,
            "online " + fmt(r.online_shifted) + " not >=20% below frozen " +
                fmt(r.frozen_shifted));
    require(r.shifted_secs < 300.0,
            "shifted 100k-step deployment took " + fmt(r.shifted_secs) + "s (>5min)");
}

void criterion_replay_matches_online(const PackagedRunResults& r, std::string& note) {
    note = "final-quarter EW-NMSE online " + fmt(r.online_plain) + ", replay " +
           fmt(r.replay_plain);
    require(std::isfinite(r.replay_plain) && std::isfinite(r.online_plain),
            "non-finite replay NMSE");
    require(std::abs(r.replay_plain - r.online_plain) <= 0.2 * r.online_plain,
            "replay " + fmt(r.replay_plain) + " not within 20% of online " +
                fmt(r.online_plain));
}

// ---------------------------------------------------------------------------
// criterion 8: the sweep finds the planted best alpha on 5/5 seeds
// ---------------------------------------------------------------------------

void criterion_sweep_selects_optimum(std::string& note) {
    const int period = 50, train_n = 2500, val_n = 2500;
    Eigen::MatrixXd train_states(3, train_n), val_states(3, val_n);
    Eigen::VectorXd train_cums(train_n), val_cums(val_n);
    auto fill = [&](Eigen::MatrixXd& st, Eigen::VectorXd& cu, int n, double offset) {
        for (int t = 0; t < n; ++t) {
            const double phase = 2.0 * M_PI * (t % period) / period;
            st(0, t) = std::sin(phase);
            st(1, t) = std::cos(phase);
            st(2, t) = 1.0;
            cu[t] = 0.5 * std::sin(phase) + offset;
        }
    };
    fill(train_states, train_cums, train_n, 0.0);
    fill(val_states, val_cums, val_n, 1.0);  // planted shift: tracking required

    TdConfig td;
    td.gamma = 0.9;
    td.batch_size = 256;
    td.epochs = 60;
    NStepConfig ns;
    SweepInputs inputs{train_states, train_cums, val_states, val_cums,
                       {8},          {0.9, 0.99, 1e-4, 0.0}, LearnerKind::Gvf, td, ns, 1e-3};
    // large alpha thrashes, tiny alpha cannot close the shift
    SweepGrid grid{{1e-2}, {3.0, 1e-2, 1e-9}};

    int hits = 0;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        auto r = validation_sweep(inputs, grid, SweepStyle::Joint, seed, 0);
        if (r.best_alpha == 1e-2) ++hits;
    }
    note = std::to_string(hits) + "/5 seeds selected alpha=1e-2";
    require(hits == 5, "planted alpha found on only " + std::to_string(hits) + "/5 seeds");
}

// ---------------------------------------------------------------------------
// criterion 9: encoder invariant suite
// ---------------------------------------------------------------------------

void criterion_encoder_invariants(std::string& note) {
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    // trace boundedness over 1e6 random steps
    const int d = 8;
    TraceState z{Eigen::VectorXd::Zero(d)};
    Eigen::VectorXd v(d);
    for (int i = 0; i < 1000000; ++i) {
        for (int j = 0; j < d; ++j) v[j] = u(rng);
        z = update_trace(z, v, 0.99);
        if (z.z.minCoeff() < 0.0 || z.z.maxCoeff() > 1.0)
            throw CheckFailure("trace left [0,1] at step " + std::to_string(i));
    }

    // sin^2 + cos^2 = 1 to 1e-12 for time-of-day and every thermometer pair
    for (int trial = 0; trial < 5000; ++trial) {
        const std::int64_t s = static_cast<std::int64_t>(u(rng) * 3 * 86400);
        auto [sn, cs] = encode_time_of_day(s);
        require(std::abs(sn * sn + cs * cs - 1.0) < 1e-12, "time-of-day identity violated");
        auto th = encode_mode_thermometer(u(rng) * 900.0, 30.0 + u(rng) * 3600.0, 7);
        for (int j = 0; j < 7; ++j)
            require(std::abs(th[j] * th[j] + th[7 + j] * th[7 + j] - 1.0) < 1e-12,
                    "thermometer identity violated");
    }

    // one-hot sums
    for (int k = 1; k <= 9; ++k)
        for (int i = 0; i < k; ++i)
            require(encode_one_hot(i, k).sum() == 1.0, "one-hot sum != 1");

    // width constancy and determinism over a mode-switching stream
    EncoderConfig cfg;
    cfg.beta = 0.99;
    cfg.mode_vocabulary = {"PROD", "BW", "MIT"};
    cfg.mode_lengths = {{"PROD", 3300.0}, {"BW", 300.0}, {"MIT", 600.0}};
    std::vector<SensorMeta> meta(6);
    for (int i = 0; i < 6; ++i) meta[i] = {"s" + std::to_string(i), 0.0, 1.0, false};
    Encoder e1(cfg, meta), e2(cfg, meta);
    const int expected_width = e1.state_width();
    for (int t = 0; t < 20000; ++t) {
        RawRecord r;
        r.timestamp = t;
        r.mode = (t % 3600 < 3300) ? "PROD" : "BW";
        if (t % 86400 >= 16200 && t % 86400 < 16800) r.mode = "MIT";
        r.values.resize(6);
        for (int i = 0; i < 6; ++i) r.values[i] = u(rng);
        auto a = e1.encode(r);
        auto b = e2.encode(r);
        require(a.s_hat.size() == expected_width, "state width drifted");
        require(a.s_hat == b.s_hat, "encoding not deterministic");
    }
    note = "1e6 trace steps bounded; identities hold to 1e-12; width " +
           std::to_string(expected_width) + " constant";
}

// ---------------------------------------------------------------------------
// criterion 10: NMSE calibration
// ---------------------------------------------------------------------------

void criterion_nmse_calibration(std::string& note) {
    std::mt19937_64 rng(4040);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n = 60000;
    const double decay = 0.001;
    std::vector<double> targets(n), mean_preds(n);
    MetricState tracker;
    tracker.decay = decay;
    for (int i = 0; i < n; ++i) {
        targets[i] = gauss(rng);
        mean_preds[i] = (i == 0) ? 0.0 : tracker.ew_mean;
        ew_welford_update(tracker, targets[i]);
    }
    auto mean_series = nmse_series(mean_preds, targets, decay, 1000);
    const double mean_nmse = nan_mean(mean_series, n / 2, n);

    auto perfect_series = nmse_series(targets, targets, decay, 1000);
    const double perfect_nmse = nan_mean(perfect_series, n / 2, n);

    note = "mean-predictor NMSE " + fmt(mean_nmse) + ", perfect " + fmt(perfect_nmse);
    require(mean_nmse >= 0.9 && mean_nmse <= 1.1,
            "mean-predictor NMSE " + fmt(mean_nmse) + " outside [0.9, 1.1]");
    require(perfect_nmse < 0.01, "perfect-predictor NMSE " + fmt(perfect_nmse) + " >= 0.01");
}

// ---------------------------------------------------------------------------
// criterion 11: pipeline determinism through the real CLI binary
// ---------------------------------------------------------------------------

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GVFPRED_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status < 0) return -1;
    return WEXITSTATUS(status);
}

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "missing artifact: " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void criterion_pipeline_determinism(std::string& note) {
    auto make_run = [&](const std::string& tag) {
        const std::string dir = fresh_dir("gvfpred_accept_det_" + tag);
        nlohmann::json j{
            {"seed", 777},
            {"out", dir},
            {"data", {{"path", dir + "/data.csv"}, {"train_end", 4000}, {"validation_end", 5000}}},
            {"encoder",
             {{"beta", 0.99},
              {"mode_lengths", {{"PROD", 3300.0}, {"BW", 300.0}, {"MIT", 600.0}}}}},
            {"cumulant", {{"sensor", "membrane_pressure"}}},
            {"network", {{"hidden", {16}}}},
            {"td", {{"gamma", 0.9}, {"eta", 1e-3}, {"alpha", 1e-4}, {"batch_size", 128}, {"epochs", 2}}},
            {"eval", {{"decay", 0.01}, {"return_tol", 1e-3}}},
            {"simulate", {{"scenario", "packaged"}, {"steps", 6500}}},
        };
        const std::string cfg_path = dir + "/config.json";
        std::ofstream out(cfg_path, std::ios::binary);
        out << j.dump(2);
        out.close();

        require(run_cli("simulate --config " + cfg_path) == 0, "simulate failed");
        require(run_cli("pretrain --config " + cfg_path + " --algo onlinetd") == 0,
                "pretrain failed");
        require(run_cli("deploy --config " + cfg_path + " --algo onlinetd") == 0, "deploy failed");
        require(run_cli("eval --config " + cfg_path + " --algo onlinetd") == 0, "eval failed");
        return dir;
    };

    const std::string a = make_run("a");
    const std::string b = make_run("b");
    for (const std::string rel : {"/data.csv", "/checkpoint_td.bin", "/deploy_onlinetd.csv",
                                  "/deploy_onlinetd_nmse.csv"}) {
        require(file_bytes(a + rel) == file_bytes(b + rel), "artifact differs across runs: " + rel);
    }
    note = "data, checkpoint, deploy log, NMSE series byte-identical across two runs";
}

void extra_cli_exit_codes(std::string& note) {
    require(run_cli("no-such-command") == 1, "unknown subcommand should exit 1");
    require(run_cli("simulate") == 1, "missing config should exit 1");
    const std::string dir = fresh_dir("gvfpred_accept_cli");
    nlohmann::json j{{"seed", 1},
                     {"out", dir},
                     {"data", {{"path", dir + "/missing.csv"}, {"train_end", 10}, {"validation_end", 20}}},
                     {"cumulant", {{"sensor", "membrane_pressure"}}}};
    const std::string cfg_path = dir + "/config.json";
    std::ofstream(cfg_path) << j.dump();
    require(run_cli("pretrain --config " + cfg_path) == 2, "missing data file should exit 2");
    note = "usage->1, data->2 verified";
}

struct Criterion {
    std::string name;
    std::function<void(std::string&)> fn;
};

}  // namespace

int main() {
    // criteria 6 and 7 share one pretraining run
    PackagedRunResults shift_results;
    bool shift_ok = true;
    std::string shift_error;
    try {
        shift_results = run_packaged_deployments();
    } catch (const std::exception& e) {
        shift_ok = false;
        shift_error = e.what();
    }

    std::vector<Criterion> criteria{
        {"td-fixed-point-oracle", criterion_td_fixed_point},
        {"constant-cumulant-horizon", criterion_constant_cumulant},
        {"gradient-correctness", criterion_gradient_check},
        {"optimizer-state-handoff", criterion_optimizer_handoff},
        {"nstep-alignment-oracle", criterion_nstep_alignment},
        {"online-beats-frozen-under-shift",
         [&](std::string& note) {
             if (!shift_ok) throw CheckFailure(shift_error);
             criterion_online_beats_frozen(shift_results, note);
         }},
        {"replay-matches-online",
         [&](std::string& note) {
             if (!shift_ok) throw CheckFailure(shift_error);
             criterion_replay_matches_online(shift_results, note);
         }},
        {"sweep-selects-planted-optimum", criterion_sweep_selects_optimum},
        {"encoder-invariant-suite", criterion_encoder_invariants},
        {"nmse-calibration", criterion_nmse_calibration},
        {"pipeline-determinism", criterion_pipeline_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::string note;
        try {
            criteria[i].fn(note);
            std::cout << "[PASS] " << (i + 1) << ". " << criteria[i].name
                      << (note.empty() ? "" : " — " + note) << '\n';
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "[FAIL] " << (i + 1) << ". " << criteria[i].name << " — " << e.what()
                      << '\n';
        }
        std::cout.flush();
    }

    std::string note;
    try {
        extra_cli_exit_codes(note);
        std::cout << "[PASS] extra. cli-exit-codes — " << note << '\n';
    } catch (const std::exception& e) {
        ++failures;
        std::cout << "[FAIL] extra. cli-exit-codes — " << e.what() << '\n';
    }

    if (failures) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all acceptance criteria passed\n";
    return 0;
}
