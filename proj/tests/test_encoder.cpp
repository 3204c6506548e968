#include <doctest.h>

#include <cmath>
#include <random>

#include "gvfpred/encoder.hpp"
#include "gvfpred/util.hpp"

using namespace gvfpred;

namespace {

EncoderConfig basic_config() {
    EncoderConfig cfg;
    cfg.beta = 0.9;
    cfg.mode_vocabulary = {"PROD", "BW"};
    cfg.mode_lengths = {{"PROD", 100.0}, {"BW", 20.0}};
    return cfg;
}

std::vector<SensorMeta> unit_meta(int d) {
    std::vector<SensorMeta> meta(d);
    for (int i = 0; i < d; ++i) {
        meta[i].name = "s" + std::to_string(i);
        meta[i].min = 0.0;
        meta[i].max = 1.0;
    }
    return meta;
}

RawRecord record(std::int64_t ts, std::vector<double> values, std::string mode = "PROD") {
    RawRecord r;
    r.timestamp = ts;
    r.values = std::move(values);
    r.mode = std::move(mode);
    return r;
}

}  // namespace

TEST_CASE("normalize maps the reference range onto [0,1] without clamping") {
    SensorMeta m{"s", 0.0, 10.0, false};
    CHECK(normalize(5.0, m) == doctest::Approx(0.5));
    CHECK(normalize(0.0, m) == 0.0);
    CHECK(normalize(10.0, m) == 1.0);
    CHECK(normalize(12.0, m) == doctest::Approx(1.2));  // linear outside the range
    SensorMeta degenerate{"s", 3.0, 3.0, true};
    CHECK_THROWS_AS(normalize(3.0, degenerate), DataError);
}

TEST_CASE("one-hot encoding") {
    auto v = encode_one_hot(2, 4);
    CHECK(v.size() == 4);
    CHECK(v[2] == 1.0);
    CHECK(v.sum() == 1.0);
    CHECK(encode_one_hot(0, 1).size() == 1);
    CHECK(encode_one_hot(0, 1)[0] == 1.0);
    CHECK_THROWS_AS(encode_one_hot(5, 4), DataError);
    CHECK_THROWS_AS(encode_one_hot(-1, 4), DataError);
}

TEST_CASE("time-of-day encoding hits the quarter points") {
    auto [s0, c0] = encode_time_of_day(0);
    CHECK(s0 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c0 == doctest::Approx(1.0));
    auto [sq, cq] = encode_time_of_day(21600);
    CHECK(sq == doctest::Approx(1.0));
    CHECK(cq == doctest::Approx(0.0).epsilon(1e-12));
    auto [sh, ch] = encode_time_of_day(43200);
    CHECK(sh == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ch == doctest::Approx(-1.0));
    // larger than a day wraps
    auto [sw, cw] = encode_time_of_day(86400 + 21600);
    CHECK(sw == doctest::Approx(1.0));
}

TEST_CASE("mode thermometer frequencies double per slot") {
    // phase 0.5: j=0 gives sin(pi/2)=1, cos(pi/2)=0
    auto v = encode_mode_thermometer(50.0, 100.0, 1);
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(0.0).epsilon(1e-12));

    // phase 0: all sines 0, all cosines 1
    auto z = encode_mode_thermometer(0.0, 100.0, 7);
    for (int j = 0; j < 7; ++j) {
        CHECK(z[j] == 0.0);
        CHECK(z[7 + j] == 1.0);
    }

    // phase 0.25 with 7 slots: sines start [sin(pi/4), sin(pi/2), sin(pi), ...]
    auto q = encode_mode_thermometer(25.0, 100.0, 7);
    CHECK(q[0] == doctest::Approx(std::sin(M_PI / 4)));
    CHECK(q[1] == doctest::Approx(1.0));
    CHECK(q[2] == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(encode_mode_thermometer(1.0, 0.0, 7), DataError);
    CHECK_THROWS_AS(encode_mode_thermometer(-1.0, 10.0, 7), DataError);
}

TEST_CASE("thermometer and time-of-day pairs satisfy sin^2+cos^2=1 to 1e-12") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::int64_t s = static_cast<std::int64_t>(u(rng) * 86400 * 3);
        auto [sn, cs] = encode_time_of_day(s);
        CHECK(std::abs(sn * sn + cs * cs - 1.0) < 1e-12);
        auto v = encode_mode_thermometer(u(rng) * 500.0, 100.0 + u(rng) * 400.0, 7);
        for (int j = 0; j < 7; ++j)
            CHECK(std::abs(v[j] * v[j] + v[7 + j] * v[7 + j] - 1.0) < 1e-12);
    }
}

TEST_CASE("trace update follows z' = beta z + (1-beta) o") {
    TraceState z{Eigen::VectorXd::Zero(1)};
    Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    z = update_trace(z, one, 0.9);
    CHECK(z.z[0] == doctest::Approx(0.1));
    z = update_trace(z, one, 0.9);
    CHECK(z.z[0] == doctest::Approx(0.19));
    for (int i = 0; i < 2000; ++i) z = update_trace(z, one, 0.9);
    CHECK(z.z[0] == doctest::Approx(1.0));

    TraceState z0{Eigen::VectorXd::Constant(1, 0.7)};
    Eigen::VectorXd obs = Eigen::VectorXd::Constant(1, 0.3);
    CHECK(update_trace(z0, obs, 0.0).z[0] == doctest::Approx(0.3));  // beta=0: no memory

    Eigen::VectorXd wide(2);
    CHECK_THROWS_AS(update_trace(z0, wide, 0.5), DataError);
}

TEST_CASE("trace of an alternating 0/1 stream settles in a band around 0.5") {
    const double beta = 0.99;
    TraceState z{Eigen::VectorXd::Zero(1)};
    Eigen::VectorXd v(1);
    for (int i = 0; i < 10000; ++i) {
        v[0] = (i % 2 == 0) ? 0.0 : 1.0;
        z = update_trace(z, v, beta);
    }
    CHECK(std::abs(z.z[0] - 0.5) < (1.0 - beta) / (1.0 - beta * beta));
}

TEST_CASE("traces stay in [0,1] for inputs in [0,1]") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int d = 8;
    TraceState z{Eigen::VectorXd::Zero(d)};
    Eigen::VectorXd v(d);
    for (int i = 0; i < 100000; ++i) {
        for (int j = 0; j < d; ++j) v[j] = u(rng);
        z = update_trace(z, v, 0.97);
        CHECK(z.z.minCoeff() >= 0.0);
        CHECK(z.z.maxCoeff() <= 1.0);
    }
}

TEST_CASE("built state has width 2d+k and the documented 384 layout") {
    // d=185 sensors, thermometers only: k=14, total 384
    EncoderConfig cfg;
    cfg.beta = 0.99;
    cfg.include_mode_one_hot = false;
    cfg.include_time_of_day = false;
    cfg.include_mode_thermometer = true;
    cfg.thermometer_size = 7;
    cfg.mode_vocabulary = {"PROD"};
    cfg.mode_lengths = {{"PROD", 3600.0}};
    Encoder enc(cfg, unit_meta(185));
    CHECK(enc.state_width() == 384);
    auto st = enc.encode(record(0, std::vector<double>(185, 0.5)));
    CHECK(st.s_hat.size() == 384);

    // d=2, time-of-day only: k=2, total 6
    EncoderConfig cfg2;
    cfg2.beta = 0.5;
    cfg2.include_mode_one_hot = false;
    cfg2.include_time_of_day = true;
    cfg2.include_mode_thermometer = false;
    cfg2.mode_vocabulary = {"PROD"};
    Encoder enc2(cfg2, unit_meta(2));
    CHECK(enc2.state_width() == 6);
}

TEST_CASE("beta=0 collapses the trace block onto the sensor block") {
    EncoderConfig cfg = basic_config();
    cfg.beta = 0.0;
    Encoder enc(cfg, unit_meta(3));
    auto a = enc.encode(record(0, {0.2, 0.4, 0.6}));
    auto b = enc.encode(record(1, {0.2, 0.4, 0.6}));
    CHECK(a.s_hat.segment(0, 3) == a.s_hat.segment(3, 3));
    CHECK(b.s_hat.segment(0, 3) == b.s_hat.segment(3, 3));
    CHECK(a.s_hat.segment(0, 6) == b.s_hat.segment(0, 6));
}

TEST_CASE("encoding is deterministic and width-stable across a stream") {
    EncoderConfig cfg = basic_config();
    Encoder e1(cfg, unit_meta(4));
    Encoder e2(cfg, unit_meta(4));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> vals{u(rng), u(rng), u(rng), u(rng)};
        std::string mode = (t % 120 < 100) ? "PROD" : "BW";
        auto a = e1.encode(record(t, vals, mode));
        auto b = e2.encode(record(t, vals, mode));
        REQUIRE(a.s_hat.size() == e1.state_width());
        CHECK(a.s_hat == b.s_hat);
        CHECK(a.step == t);
    }
}

TEST_CASE("encoder rejects width drift and unknown modes") {
    Encoder enc(basic_config(), unit_meta(2));
    CHECK_NOTHROW(enc.encode(record(0, {0.5, 0.5})));
    CHECK_THROWS_AS(enc.encode(record(1, {0.5})), DataError);
    CHECK_THROWS_AS(enc.encode(record(2, {0.5, 0.5}, "MYSTERY")), DataError);
}

TEST_CASE("mode clock resets when the mode changes") {
    EncoderConfig cfg = basic_config();
    cfg.include_mode_one_hot = false;
    cfg.include_time_of_day = false;
    Encoder enc(cfg, unit_meta(1));
    const int d = 1;
    // 10 seconds of PROD, then BW begins: thermometer phase restarts at 0
    AugmentedState last;
    for (int t = 0; t <= 10; ++t) last = enc.encode(record(t, {0.5}, t < 10 ? "PROD" : "BW"));
    // first BW step: elapsed 0, sines 0 cosines 1
    for (int j = 0; j < cfg.thermometer_size; ++j) {
        CHECK(last.s_hat[2 * d + j] == 0.0);
        CHECK(last.s_hat[2 * d + cfg.thermometer_size + j] == 1.0);
    }
}

TEST_CASE("unscheduled mode lengths fall back to the running average of completed visits") {
    EncoderConfig cfg;
    cfg.beta = 0.5;
    cfg.include_mode_one_hot = false;
    cfg.include_time_of_day = false;
    cfg.mode_vocabulary = {"A", "B"};
    // no mode_lengths configured
    Encoder enc(cfg, unit_meta(1));
    // A runs 40s, then B, then A again: A's length should resolve to 40
    std::int64_t t = 0;
    for (; t < 40; ++t) enc.encode(record(t, {0.5}, "A"));
    for (; t < 50; ++t) enc.encode(record(t, {0.5}, "B"));
    auto st = enc.encode(record(t, {0.5}, "A"));  // elapsed 0 of expected 40
    CHECK(st.s_hat[2] == 0.0);                    // sine at phase 0
    auto st2 = enc.encode(record(t + 20, {0.5}, "A"));  // elapsed 20 of 40: phase 0.5
    CHECK(st2.s_hat[2] == doctest::Approx(1.0));
}

TEST_CASE("layout string pins the block structure") {
    Encoder enc(basic_config(), unit_meta(3));
    auto s = enc.layout_string();
    CHECK(s.find("sensors:3") != std::string::npos);
    CHECK(s.find("width:" + std::to_string(enc.state_width())) != std::string::npos);
    Encoder enc2(basic_config(), unit_meta(4));
    CHECK(enc.layout_hash() != enc2.layout_hash());
}
