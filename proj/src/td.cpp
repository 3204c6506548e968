#include "gvfpred/td.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "gvfpred/util.hpp"

namespace gvfpred {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_td_config(const TdConfig& cfg) {
    if (cfg.gamma < 0.0 || cfg.gamma >= 1.0) throw DataError("td: gamma must be in [0,1)");
    if (cfg.batch_size < 1) throw DataError("td: batch_size must be >= 1");
    if (cfg.epochs < 0) throw DataError("td: epochs must be >= 0");
}
}  // namespace

double td_error(double c, double v_next, double v_cur, double gamma) {
    return c + gamma * v_next - v_cur;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw DataError("replay buffer capacity must be >= 1");
    buf_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
    if (buf_.size() < capacity_) {
        buf_.push_back(std::move(t));
    } else {
        buf_[head_] = std::move(t);
        head_ = (head_ + 1) % capacity_;
    }
}

std::size_t ReplayBuffer::sample_index(std::mt19937_64& rng) const {
    if (buf_.empty()) throw DataError("replay buffer is empty");
    return std::uniform_int_distribution<std::size_t>(0, buf_.size() - 1)(rng);
}

TdStepResult online_td_step(Network& net, OptimizerState& opt,
                            const Eigen::Ref<const Eigen::VectorXd>& s,
                            const Eigen::Ref<const Eigen::VectorXd>& s_next, double cumulant_next,
                            double gamma, double alpha, Gradient& scratch, bool update) {
    TdStepResult res;
    res.prediction = forward_backward(net, s, scratch);
    res.bootstrap = forward(net, s_next);
    res.delta = td_error(cumulant_next, res.bootstrap, res.prediction, gamma);
    if (update) {
        scratch.scale(-res.delta);
        adam_step(net, opt, scratch, alpha);
    }
    return res;
}

void offline_td(Network& net, OptimizerState& opt, Eigen::Ref<const Eigen::MatrixXd> states,
                Eigen::Ref<const Eigen::VectorXd> cumulants, const std::vector<Eigen::Index>& starts,
                const TdConfig& cfg, std::uint64_t seed, int epoch_begin, int epoch_end) {
    check_td_config(cfg);
    if (starts.empty()) throw DataError("offline_td: empty transition set");
    for (Eigen::Index t : starts)
        if (t < 0 || t + 1 >= states.cols())
            throw DataError("offline_td: transition index out of range");

    Gradient acc = zero_gradient_like(net);
    Gradient scratch = zero_gradient_like(net);
    std::vector<Eigen::Index> order(starts);

    for (int epoch = epoch_begin; epoch < epoch_end; ++epoch) {
        // permutation depends only on (seed, epoch): a run resumed from a
        // checkpoint at an epoch boundary replays the same batches
        order = starts;
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t pos = 0; pos < order.size(); pos += cfg.batch_size) {
            const std::size_t bs = std::min<std::size_t>(cfg.batch_size, order.size() - pos);
            acc.set_zero();
            for (std::size_t i = 0; i < bs; ++i) {
                const Eigen::Index t = order[pos + i];
                const double v_cur = forward_backward(net, states.col(t), scratch);
                const double v_next = forward(net, states.col(t + 1));
                const double delta = td_error(cumulants[t + 1], v_next, v_cur, cfg.gamma);
                acc.axpy(-delta / static_cast<double>(bs), scratch);
            }
            adam_step(net, opt, acc, cfg.eta);
        }
    }
}

void offline_td(Network& net, OptimizerState& opt, Eigen::Ref<const Eigen::MatrixXd> states,
                Eigen::Ref<const Eigen::VectorXd> cumulants, const std::vector<Eigen::Index>& starts,
                const TdConfig& cfg, std::uint64_t seed) {
    offline_td(net, opt, states, cumulants, starts, cfg, seed, 0, cfg.epochs);
}

std::vector<DeployRow> online_td_deploy(Network& net, OptimizerState& opt,
                                        Eigen::Ref<const Eigen::MatrixXd> states,
                                        Eigen::Ref<const Eigen::VectorXd> cumulants, double gamma,
                                        double alpha, bool frozen, std::int64_t step0) {
    const Eigen::Index n = states.cols();
    std::vector<DeployRow> rows;
    if (n == 0) return rows;
    rows.reserve(n);

    Gradient scratch = zero_gradient_like(net);
    double pred = forward(net, states.col(0));
    for (Eigen::Index t = 0; t + 1 < n; ++t) {
        auto res = online_td_step(net, opt, states.col(t), states.col(t + 1), cumulants[t + 1],
                                  gamma, alpha, scratch, !frozen);
        assert(res.prediction == pred);
        rows.push_back({step0 + t, pred, cumulants[t], res.delta});
        // prediction for the next arrival under the just-updated weights
        pred = forward(net, states.col(t + 1));
    }
    rows.push_back({step0 + n - 1, pred, cumulants[n - 1], kNaN});
    return rows;
}

std::vector<DeployRow> td_with_replay_deploy(
    Network& net, OptimizerState& opt, Eigen::Ref<const Eigen::MatrixXd> train_states,
    Eigen::Ref<const Eigen::VectorXd> train_cumulants, const std::vector<Eigen::Index>& train_starts,
    Eigen::Ref<const Eigen::MatrixXd> states, Eigen::Ref<const Eigen::VectorXd> cumulants, const TdConfig& cfg,
    std::uint64_t seed, std::int64_t step0, ReplayBuffer* buffer_out) {
    check_td_config(cfg);
    if (cfg.replay_steps < 0) throw DataError("td: replay_steps must be >= 0");
    if (cfg.replay_capacity < static_cast<std::size_t>(cfg.batch_size))
        throw DataError("td: replay_capacity must be >= batch_size");

    ReplayBuffer buffer(cfg.replay_capacity);
    const std::size_t warm =
        std::min<std::size_t>(train_starts.size(),
                              static_cast<std::size_t>(cfg.batch_size) *
                                  static_cast<std::size_t>(cfg.replay_steps));
    for (std::size_t i = train_starts.size() - warm; i < train_starts.size(); ++i) {
        const Eigen::Index t = train_starts[i];
        // pre-deployment ids sit strictly below step0
        const std::int64_t id = step0 - static_cast<std::int64_t>(train_starts.size() - i);
        buffer.push({id, train_states.col(t), train_cumulants[t + 1], train_states.col(t + 1)});
    }

    std::mt19937_64 rng(mix_seed(seed, 0x7265706c61790000ULL));
    Gradient scratch = zero_gradient_like(net);
    Gradient acc = zero_gradient_like(net);

    const Eigen::Index n = states.cols();
    std::vector<DeployRow> rows;
    if (n == 0) return rows;
    rows.reserve(n);

    double pred = forward(net, states.col(0));
    for (Eigen::Index t = 0; t + 1 < n; ++t) {
        auto res = online_td_step(net, opt, states.col(t), states.col(t + 1), cumulants[t + 1],
                                  cfg.gamma, cfg.alpha, scratch, true);
        rows.push_back({step0 + t, pred, cumulants[t], res.delta});
        buffer.push({step0 + t, states.col(t), cumulants[t + 1], states.col(t + 1)});

        for (int r = 0; r < cfg.replay_steps; ++r) {
            acc.set_zero();
            const int bs = cfg.batch_size;
            for (int i = 0; i < bs; ++i) {
                const Transition& tr = buffer.at(buffer.sample_index(rng));
                const double v_cur = forward_backward(net, tr.s, scratch);
                const double v_next = forward(net, tr.s_next);
                const double delta = td_error(tr.cumulant, v_next, v_cur, cfg.gamma);
                acc.axpy(-delta / static_cast<double>(bs), scratch);
            }
            adam_step(net, opt, acc, cfg.alpha);
        }
        pred = forward(net, states.col(t + 1));
    }
    rows.push_back({step0 + n - 1, pred, cumulants[n - 1], kNaN});
    if (buffer_out) *buffer_out = std::move(buffer);
    return rows;
}

}  // namespace gvfpred
