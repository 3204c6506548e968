#include "gvfpred/mlp.hpp"

#include <cassert>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "gvfpred/util.hpp"

namespace gvfpred {

namespace {

void check_dims(const std::vector<int>& dims) {
    if (dims.size() < 2) throw DataError("network dims need at least [input, 1]");
    for (int d : dims)
        if (d < 1) throw DataError("network dims must be positive");
    if (dims.back() != 1) throw DataError("network output dimension must be 1");
}

void check_shapes(const Network& net, const Gradient& g) {
    if (g.weights.size() != net.weights.size() || g.biases.size() != net.biases.size())
        throw DataError("gradient/network layer count mismatch");
    for (std::size_t l = 0; l < net.weights.size(); ++l)
        if (g.weights[l].rows() != net.weights[l].rows() ||
            g.weights[l].cols() != net.weights[l].cols() ||
            g.biases[l].size() != net.biases[l].size())
            throw DataError("gradient/network shape mismatch at layer " + std::to_string(l));
}

}  // namespace

bool Network::all_finite() const {
    for (const auto& w : weights)
        if (!w.allFinite()) return false;
    for (const auto& b : biases)
        if (!b.allFinite()) return false;
    return true;
}

void Gradient::set_zero() {
    for (auto& w : weights) w.setZero();
    for (auto& b : biases) b.setZero();
}

void Gradient::scale(double a) {
    for (auto& w : weights) w *= a;
    for (auto& b : biases) b *= a;
}

void Gradient::axpy(double a, const Gradient& other) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l] += a * other.weights[l];
        biases[l] += a * other.biases[l];
    }
}

bool Gradient::all_finite() const {
    for (const auto& w : weights)
        if (!w.allFinite()) return false;
    for (const auto& b : biases)
        if (!b.allFinite()) return false;
    return true;
}

std::int64_t count_parameters(const std::vector<int>& dims) {
    check_dims(dims);
    std::int64_t n = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l)
        n += static_cast<std::int64_t>(dims[l]) * dims[l + 1] + dims[l + 1];
    return n;
}

Network init_network(const std::vector<int>& dims, std::uint64_t seed) {
    check_dims(dims);
    Network net;
    net.dims = dims;
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const int in = dims[l], out = dims[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        std::uniform_real_distribution<double> u(-bound, bound);
        Eigen::MatrixXd w(out, in);
        for (int c = 0; c < in; ++c)
            for (int r = 0; r < out; ++r) w(r, c) = u(rng);
        Eigen::VectorXd b(out);
        for (int r = 0; r < out; ++r) b[r] = u(rng);
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    return net;
}

Gradient zero_gradient_like(const Network& net) {
    Gradient g;
    for (const auto& w : net.weights) g.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    for (const auto& b : net.biases) g.biases.push_back(Eigen::VectorXd::Zero(b.size()));
    return g;
}

OptimizerState init_optimizer(const Network& net, const AdamConfig& cfg) {
    OptimizerState opt;
    opt.hyper = cfg;
    for (const auto& w : net.weights) {
        opt.m_weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
        opt.v_weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    }
    for (const auto& b : net.biases) {
        opt.m_biases.push_back(Eigen::VectorXd::Zero(b.size()));
        opt.v_biases.push_back(Eigen::VectorXd::Zero(b.size()));
    }
    return opt;
}

double forward(const Network& net, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() != net.input_dim())
        throw DataError("forward: input width " + std::to_string(x.size()) + " != " +
                        std::to_string(net.input_dim()));
    Eigen::VectorXd a = x;
    const std::size_t L = net.layer_count();
    for (std::size_t l = 0; l < L; ++l) {
        Eigen::VectorXd z = net.weights[l] * a + net.biases[l];
        if (l + 1 < L) z = z.cwiseMax(0.0);
        a = std::move(z);
    }
    return a[0];
}

double forward_backward(const Network& net, const Eigen::Ref<const Eigen::VectorXd>& x,
                        Gradient& grad) {
    if (x.size() != net.input_dim())
        throw DataError("forward_backward: input width mismatch");
    const std::size_t L = net.layer_count();

    // forward, keeping post-activation values per layer
    std::vector<Eigen::VectorXd> acts(L + 1);
    acts[0] = x;
    for (std::size_t l = 0; l < L; ++l) {
        Eigen::VectorXd z = net.weights[l] * acts[l] + net.biases[l];
        if (l + 1 < L) z = z.cwiseMax(0.0);
        acts[l + 1] = std::move(z);
    }
    const double out = acts[L][0];

    if (grad.weights.size() != L) grad = zero_gradient_like(net);

    // backward: d(out)/d(params); delta at the output is 1
    Eigen::VectorXd delta = Eigen::VectorXd::Ones(1);
    for (std::size_t l = L; l-- > 0;) {
        grad.weights[l].noalias() = delta * acts[l].transpose();
        grad.biases[l] = delta;
        if (l > 0) {
            Eigen::VectorXd da = net.weights[l].transpose() * delta;
            // rectifier mask from the stored post-activation: derivative 1 iff z > 0
            delta = (acts[l].array() > 0.0).cast<double>().matrix().cwiseProduct(da);
        }
    }
    return out;
}

Gradient backward_grad(const Network& net, const Eigen::Ref<const Eigen::VectorXd>& x) {
    Gradient g = zero_gradient_like(net);
    forward_backward(net, x, g);
    return g;
}

void adam_step(Network& net, OptimizerState& opt, const Gradient& direction, double lr) {
    check_shapes(net, direction);
    if (!direction.all_finite()) throw NumericError("adam_step: non-finite direction");

    const AdamConfig& h = opt.hyper;
    opt.step_count += 1;
    const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(opt.step_count));
    const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(opt.step_count));

    auto update = [&](Eigen::Ref<Eigen::MatrixXd> w, Eigen::Ref<Eigen::MatrixXd> m,
                      Eigen::Ref<Eigen::MatrixXd> v, const Eigen::MatrixXd& g) {
        Eigen::ArrayXXd geff = g.array() + h.weight_decay * w.array();
        m.array() = h.beta1 * m.array() + (1.0 - h.beta1) * geff;
        v.array() = h.beta2 * v.array() + (1.0 - h.beta2) * geff.square();
        w.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + h.epsilon);
    };

    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        update(net.weights[l], opt.m_weights[l], opt.v_weights[l], direction.weights[l]);
        // biases reuse the same rule via 1-column views
        Eigen::Map<Eigen::MatrixXd> bw(net.biases[l].data(), net.biases[l].size(), 1);
        Eigen::Map<Eigen::MatrixXd> bm(opt.m_biases[l].data(), opt.m_biases[l].size(), 1);
        Eigen::Map<Eigen::MatrixXd> bv(opt.v_biases[l].data(), opt.v_biases[l].size(), 1);
        update(bw, bm, bv, direction.biases[l]);
    }
    assert(net.all_finite() && "parameters must stay finite after an optimizer step");
}

namespace {

constexpr char kMagic[8] = {'G', 'V', 'F', 'P', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_raw(std::ofstream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_raw(std::ifstream& in, void* p, std::size_t n, const std::string& path) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw DataError("truncated checkpoint: " + path);
}

void write_mat(std::ofstream& out, const Eigen::MatrixXd& m) {
    write_raw(out, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}
void write_vec(std::ofstream& out, const Eigen::VectorXd& v) {
    write_raw(out, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}
void read_mat(std::ifstream& in, Eigen::MatrixXd& m, const std::string& path) {
    read_raw(in, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()), path);
}
void read_vec(std::ifstream& in, Eigen::VectorXd& v, const std::string& path) {
    read_raw(in, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()), path);
}

}  // namespace

void save_checkpoint(const Network& net, const OptimizerState& opt, const std::string& path,
                     std::uint64_t layout_hash, const std::string& layout) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open checkpoint for writing: " + path);

    write_raw(out, kMagic, sizeof(kMagic));
    write_raw(out, &kVersion, sizeof(kVersion));
    write_raw(out, &layout_hash, sizeof(layout_hash));

    std::uint32_t n_dims = static_cast<std::uint32_t>(net.dims.size());
    write_raw(out, &n_dims, sizeof(n_dims));
    for (int d : net.dims) {
        std::int32_t v = d;
        write_raw(out, &v, sizeof(v));
    }

    write_raw(out, &opt.hyper.beta1, sizeof(double));
    write_raw(out, &opt.hyper.beta2, sizeof(double));
    write_raw(out, &opt.hyper.epsilon, sizeof(double));
    write_raw(out, &opt.hyper.weight_decay, sizeof(double));
    write_raw(out, &opt.step_count, sizeof(opt.step_count));

    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        write_mat(out, net.weights[l]);
        write_vec(out, net.biases[l]);
    }
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        write_mat(out, opt.m_weights[l]);
        write_vec(out, opt.m_biases[l]);
        write_mat(out, opt.v_weights[l]);
        write_vec(out, opt.v_biases[l]);
    }
    out.flush();
    if (!out) throw DataError("checkpoint write failed: " + path);

    nlohmann::json manifest{
        {"format_version", kVersion},
        {"dims", net.dims},
        {"parameter_count", count_parameters(net.dims)},
        {"optimizer_step_count", opt.step_count},
        {"encoder_layout_hash", to_hex(layout_hash)},
        {"encoder_layout", layout},
    };
    std::ofstream side(path + ".manifest.json", std::ios::binary);
    if (!side) throw DataError("cannot write checkpoint manifest for " + path);
    side << manifest.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);

    char magic[8];
    read_raw(in, magic, sizeof(magic), path);
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw DataError("not a checkpoint file: " + path);
    std::uint32_t version = 0;
    read_raw(in, &version, sizeof(version), path);
    if (version != kVersion)
        throw DataError("unsupported checkpoint version " + std::to_string(version) + ": " + path);

    Checkpoint ck;
    read_raw(in, &ck.layout_hash, sizeof(ck.layout_hash), path);

    std::uint32_t n_dims = 0;
    read_raw(in, &n_dims, sizeof(n_dims), path);
    if (n_dims < 2 || n_dims > 64) throw DataError("corrupt checkpoint dims: " + path);
    std::vector<int> dims(n_dims);
    for (auto& d : dims) {
        std::int32_t v = 0;
        read_raw(in, &v, sizeof(v), path);
        if (v < 1) throw DataError("corrupt checkpoint dims: " + path);
        d = v;
    }

    AdamConfig hyper;
    read_raw(in, &hyper.beta1, sizeof(double), path);
    read_raw(in, &hyper.beta2, sizeof(double), path);
    read_raw(in, &hyper.epsilon, sizeof(double), path);
    read_raw(in, &hyper.weight_decay, sizeof(double), path);

    ck.net.dims = dims;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        ck.net.weights.emplace_back(dims[l + 1], dims[l]);
        ck.net.biases.emplace_back(dims[l + 1]);
    }
    ck.opt = init_optimizer(ck.net, hyper);
    read_raw(in, &ck.opt.step_count, sizeof(ck.opt.step_count), path);

    for (std::size_t l = 0; l < ck.net.weights.size(); ++l) {
        read_mat(in, ck.net.weights[l], path);
        read_vec(in, ck.net.biases[l], path);
    }
    for (std::size_t l = 0; l < ck.net.weights.size(); ++l) {
        read_mat(in, ck.opt.m_weights[l], path);
        read_vec(in, ck.opt.m_biases[l], path);
        read_mat(in, ck.opt.v_weights[l], path);
        read_vec(in, ck.opt.v_biases[l], path);
    }
    char extra;
    in.read(&extra, 1);
    if (in.gcount() != 0) throw DataError("trailing bytes in checkpoint: " + path);
    return ck;
}

Checkpoint load_checkpoint(const std::string& path, const std::vector<int>& expected_dims) {
    Checkpoint ck = load_checkpoint(path);
    if (ck.net.dims != expected_dims) {
        std::string want, got;
        for (int d : expected_dims) want += std::to_string(d) + " ";
        for (int d : ck.net.dims) got += std::to_string(d) + " ";
        throw DataError("checkpoint dims [" + got + "] do not match expected [" + want + "]: " + path);
    }
    return ck;
}

}  // namespace gvfpred
