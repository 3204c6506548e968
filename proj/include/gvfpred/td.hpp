#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <vector>

#include "gvfpred/mlp.hpp"

namespace gvfpred {

struct TdConfig {
    double gamma = 0.99;
    double eta = 1e-3;    // offline step size
    double alpha = 1e-5;  // online step size
    int batch_size = 512;
    int epochs = 10;
    std::size_t replay_capacity = 10000;
    int replay_steps = 1;  // mini-batch updates per deployment sample
};

// delta = c + gamma * v_next - v_cur
double td_error(double c, double v_next, double v_cur, double gamma);

struct Transition {
    std::int64_t step = 0;  // stream index of the source state
    Eigen::VectorXd s;
    double cumulant = 0.0;  // c observed with the next state
    Eigen::VectorXd s_next;
};

// Bounded FIFO over transitions; uniform sampling with replacement.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return buf_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return buf_[i]; }
    std::size_t sample_index(std::mt19937_64& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<Transition> buf_;
};

struct TdStepResult {
    double prediction = 0.0;  // f_w(s) under the pre-update weights
    double bootstrap = 0.0;   // f_w(s_next) under the pre-update weights
    double delta = 0.0;
};

// One streaming TD step on (s, c_next, s_next): optimizer direction
// -delta * grad f(s) at step size alpha. No weight change when update=false.
TdStepResult online_td_step(Network& net, OptimizerState& opt,
                            const Eigen::Ref<const Eigen::VectorXd>& s,
                            const Eigen::Ref<const Eigen::VectorXd>& s_next, double cumulant_next,
                            double gamma, double alpha, Gradient& scratch, bool update = true);

// Mini-batch TD over shuffled transitions. Transition i is
// (states.col(t), cumulants[t+1], states.col(t+1)) for t = starts[i]. Epoch e
// shuffles with a generator derived from (seed, e), so training can resume
// from a checkpoint at any epoch boundary and reproduce an uninterrupted run.
void offline_td(Network& net, OptimizerState& opt, Eigen::Ref<const Eigen::MatrixXd> states,
                Eigen::Ref<const Eigen::VectorXd> cumulants, const std::vector<Eigen::Index>& starts,
                const TdConfig& cfg, std::uint64_t seed, int epoch_begin, int epoch_end);

void offline_td(Network& net, OptimizerState& opt, Eigen::Ref<const Eigen::MatrixXd> states,
                Eigen::Ref<const Eigen::VectorXd> cumulants, const std::vector<Eigen::Index>& starts,
                const TdConfig& cfg, std::uint64_t seed);

struct DeployRow {
    std::int64_t step = 0;
    double prediction = 0.0;  // f_{w_t}(s_t): weights current when s_t arrived
    double cumulant = 0.0;    // c_t as observed
    double delta = 0.0;       // TD error of the update at this arrival (NaN on the final row)
};

// Streams states/cumulants in order, one TD update per sample; frozen=true
// logs the same rows without touching the weights.
std::vector<DeployRow> online_td_deploy(Network& net, OptimizerState& opt,
                                        Eigen::Ref<const Eigen::MatrixXd> states,
                                        Eigen::Ref<const Eigen::VectorXd> cumulants, double gamma,
                                        double alpha, bool frozen = false,
                                        std::int64_t step0 = 0);

// Online TD plus replay: the buffer is seeded with the last
// batch_size * replay_steps training transitions, then each deployment step
// appends its transition and applies replay_steps sampled mini-batch updates.
std::vector<DeployRow> td_with_replay_deploy(
    Network& net, OptimizerState& opt, Eigen::Ref<const Eigen::MatrixXd> train_states,
    Eigen::Ref<const Eigen::VectorXd> train_cumulants, const std::vector<Eigen::Index>& train_starts,
    Eigen::Ref<const Eigen::MatrixXd> states, Eigen::Ref<const Eigen::VectorXd> cumulants, const TdConfig& cfg,
    std::uint64_t seed, std::int64_t step0 = 0, ReplayBuffer* buffer_out = nullptr);

}  // namespace gvfpred
