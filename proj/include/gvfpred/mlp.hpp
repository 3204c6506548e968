#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace gvfpred {

// Scalar-output feed-forward net: rectified hidden layers, linear output.
// dims = [input, hidden..., 1]. Zero hidden layers (affine) is allowed.
struct Network {
    std::vector<int> dims;
    std::vector<Eigen::MatrixXd> weights;  // [out x in] per layer
    std::vector<Eigen::VectorXd> biases;

    int input_dim() const { return dims.front(); }
    std::size_t layer_count() const { return weights.size(); }
    bool all_finite() const;
};

struct Gradient {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    void set_zero();
    void scale(double a);
    void axpy(double a, const Gradient& other);  // this += a * other
    bool all_finite() const;
};

struct AdamConfig {
    double beta1 = 0.9;        // momentum
    double beta2 = 0.99;       // exponential average of squared gradients
    double epsilon = 1e-4;     // denominator normalization constant
    double weight_decay = 0.0; // L2 rate, added to the direction pre-moments
};

struct OptimizerState {
    AdamConfig hyper;
    std::vector<Eigen::MatrixXd> m_weights, v_weights;
    std::vector<Eigen::VectorXd> m_biases, v_biases;
    std::int64_t step_count = 0;
};

std::int64_t count_parameters(const std::vector<int>& dims);

// Fan-in-scaled uniform init, deterministic given the seed.
Network init_network(const std::vector<int>& dims, std::uint64_t seed);

Gradient zero_gradient_like(const Network& net);
OptimizerState init_optimizer(const Network& net, const AdamConfig& cfg);

double forward(const Network& net, const Eigen::Ref<const Eigen::VectorXd>& x);

// Scalar output plus d(output)/d(parameters), written into grad (overwritten,
// shapes adjusted as needed). Rectifier subgradient at exactly 0 is 0.
double forward_backward(const Network& net, const Eigen::Ref<const Eigen::VectorXd>& x,
                        Gradient& grad);

Gradient backward_grad(const Network& net, const Eigen::Ref<const Eigen::VectorXd>& x);

// Bias-corrected adaptive-moment descent step on `direction`. Weight decay
// lambda*w joins the direction before the moment updates (classic L2-in-Adam).
void adam_step(Network& net, OptimizerState& opt, const Gradient& direction, double lr);

struct Checkpoint {
    Network net;
    OptimizerState opt;
    std::uint64_t layout_hash = 0;
};

// Versioned binary container (dims, parameters, moments, step count, encoder
// layout hash) with a plain-text JSON sidecar at `path` + ".manifest.json".
// Round trips are bit-exact.
void save_checkpoint(const Network& net, const OptimizerState& opt, const std::string& path,
                     std::uint64_t layout_hash = 0, const std::string& layout = "");
Checkpoint load_checkpoint(const std::string& path);
Checkpoint load_checkpoint(const std::string& path, const std::vector<int>& expected_dims);

}  // namespace gvfpred
