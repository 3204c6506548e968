#include "gvfpred/encoder.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gvfpred/util.hpp"

namespace gvfpred {

double normalize(double o, const SensorMeta& meta) {
    if (!(meta.max > meta.min))
        throw DataError("normalize: degenerate range for sensor '" + meta.name +
                        "' (constant sensors must be removed first)");
    return (o - meta.min) / (meta.max - meta.min);
}

Eigen::VectorXd encode_one_hot(int value, int k) {
    if (value < 0 || value >= k)
        throw DataError("encode_one_hot: index " + std::to_string(value) +
                        " outside vocabulary of size " + std::to_string(k));
    Eigen::VectorXd v = Eigen::VectorXd::Zero(k);
    v[value] = 1.0;
    return v;
}

std::pair<double, double> encode_time_of_day(std::int64_t s, std::int64_t seconds_per_day) {
    std::int64_t m = s % seconds_per_day;
    if (m < 0) m += seconds_per_day;
    double phase = 2.0 * std::numbers::pi * static_cast<double>(m) /
                   static_cast<double>(seconds_per_day);
    return {std::sin(phase), std::cos(phase)};
}

Eigen::VectorXd encode_mode_thermometer(double elapsed, double mode_length, int size) {
    if (!(mode_length > 0.0)) throw DataError("encode_mode_thermometer: mode length must be > 0");
    if (elapsed < 0.0) throw DataError("encode_mode_thermometer: elapsed must be >= 0");
    Eigen::VectorXd v(2 * size);
    const double p = elapsed / mode_length;
    double freq = std::numbers::pi;  // 2^j * pi, j = 0..size-1
    for (int j = 0; j < size; ++j) {
        v[j] = std::sin(freq * p);
        v[size + j] = std::cos(freq * p);
        freq *= 2.0;
    }
    return v;
}

TraceState update_trace(const TraceState& z, const Eigen::VectorXd& o_norm, double beta) {
    if (z.z.size() != o_norm.size())
        throw DataError("update_trace: width mismatch");
    TraceState out;
    out.z = beta * z.z + (1.0 - beta) * o_norm;
    return out;
}

Encoder::Encoder(EncoderConfig cfg, std::vector<SensorMeta> meta)
    : cfg_(std::move(cfg)), meta_(std::move(meta)) {
    if (cfg_.beta < 0.0 || cfg_.beta >= 1.0) throw DataError("encoder: beta must be in [0,1)");
    if (cfg_.thermometer_size < 1) throw DataError("encoder: thermometer_size must be >= 1");
    if ((cfg_.include_mode_one_hot || cfg_.include_mode_thermometer) && cfg_.mode_vocabulary.empty())
        throw DataError("encoder: mode vocabulary required for mode encodings");
    for (const auto& m : meta_)
        if (m.constant || !(m.max > m.min))
            throw DataError("encoder: constant sensor '" + m.name + "' in meta");
    reset();
}

void Encoder::reset() {
    trace_.z = Eigen::VectorXd::Zero(sensor_count());
    first_ = true;
    step_ = 0;
    current_mode_.clear();
    mode_start_ts_ = 0;
    completed_.clear();
}

int Encoder::mode_block_width() const {
    int k = 0;
    if (cfg_.include_mode_one_hot) k += static_cast<int>(cfg_.mode_vocabulary.size());
    if (cfg_.include_time_of_day) k += 2;
    if (cfg_.include_mode_thermometer) k += 2 * cfg_.thermometer_size;
    return k;
}

int Encoder::mode_index(const std::string& mode) const {
    for (std::size_t i = 0; i < cfg_.mode_vocabulary.size(); ++i)
        if (cfg_.mode_vocabulary[i] == mode) return static_cast<int>(i);
    throw DataError("encoder: mode '" + mode + "' not in vocabulary");
}

double Encoder::resolve_mode_length(const std::string& mode) const {
    auto it = cfg_.mode_lengths.find(mode);
    if (it != cfg_.mode_lengths.end() && it->second > 0.0) return it->second;
    auto c = completed_.find(mode);
    if (c != completed_.end() && c->second.second > 0) return c->second.first;
    return static_cast<double>(cfg_.seconds_per_day);
}

AugmentedState Encoder::encode(const RawRecord& r) {
    const int d = sensor_count();
    if (static_cast<int>(r.values.size()) != d)
        throw DataError("encoder: record width " + std::to_string(r.values.size()) +
                        " != expected " + std::to_string(d));

    Eigen::VectorXd o_norm(d);
    for (int i = 0; i < d; ++i) o_norm[i] = normalize(r.values[i], meta_[i]);

    trace_ = update_trace(trace_, o_norm, cfg_.beta);

    if (first_) {
        current_mode_ = r.mode;
        mode_start_ts_ = r.timestamp;
        first_ = false;
    } else if (r.mode != current_mode_) {
        double dur = static_cast<double>(r.timestamp - mode_start_ts_);
        auto& avg = completed_[current_mode_];
        avg.second += 1;
        avg.first += (dur - avg.first) / avg.second;
        current_mode_ = r.mode;
        mode_start_ts_ = r.timestamp;
    }

    AugmentedState out;
    out.step = step_++;
    out.s_hat.resize(state_width());
    out.s_hat.segment(0, d) = o_norm;
    out.s_hat.segment(d, d) = trace_.z;

    int pos = 2 * d;
    if (cfg_.include_mode_one_hot) {
        const int k = static_cast<int>(cfg_.mode_vocabulary.size());
        out.s_hat.segment(pos, k) = encode_one_hot(mode_index(r.mode), k);
        pos += k;
    }
    if (cfg_.include_time_of_day) {
        auto [sn, cs] = encode_time_of_day(r.timestamp, cfg_.seconds_per_day);
        out.s_hat[pos++] = sn;
        out.s_hat[pos++] = cs;
    }
    if (cfg_.include_mode_thermometer) {
        double elapsed = static_cast<double>(r.timestamp - mode_start_ts_);
        double m_l = resolve_mode_length(current_mode_);
        out.s_hat.segment(pos, 2 * cfg_.thermometer_size) =
            encode_mode_thermometer(elapsed, m_l, cfg_.thermometer_size);
        pos += 2 * cfg_.thermometer_size;
    }
    return out;
}

std::string Encoder::layout_string() const {
    std::ostringstream os;
    os << "sensors:" << sensor_count() << ";traces:" << sensor_count();
    if (cfg_.include_mode_one_hot) {
        os << ";one_hot:" << cfg_.mode_vocabulary.size() << "[";
        for (std::size_t i = 0; i < cfg_.mode_vocabulary.size(); ++i) {
            if (i) os << ',';
            os << cfg_.mode_vocabulary[i];
        }
        os << "]";
    }
    if (cfg_.include_time_of_day) os << ";time_of_day:2";
    if (cfg_.include_mode_thermometer) os << ";thermometer:" << 2 * cfg_.thermometer_size;
    os << ";width:" << state_width();
    return os.str();
}

std::uint64_t Encoder::layout_hash() const {
    return fnv1a64(layout_string());
}

}  // namespace gvfpred
