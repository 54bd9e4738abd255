#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace ccra {

// Fully connected network: rectified-linear hidden layers, linear output.
// weights[i] maps layer i (sizes[i]) to layer i+1 (sizes[i+1]).
struct NeuralNet {
    std::vector<int> sizes;
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    int input_width() const { return sizes.front(); }
    int output_width() const { return sizes.back(); }

    // He-initialized weights, zero biases; deterministic in the rng state.
    static NeuralNet make(std::vector<int> layer_sizes, std::mt19937_64& rng);

    Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
    // one sample per column
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

    void write(std::ostream& out) const;
    static NeuralNet read(std::istream& in);
};

struct NetGradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    Eigen::MatrixXd inputs;  // d(loss)/d(input), one sample per column
};

// Backward pass from d(loss)/d(output); gradients are summed over the batch
// (columns of inputs/output_grads).
NetGradients backprop(const NeuralNet& net, const Eigen::MatrixXd& inputs,
                      const Eigen::MatrixXd& output_grads);

struct AdamState {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long step = 0;
    std::vector<Eigen::MatrixXd> m_w, v_w;
    std::vector<Eigen::VectorXd> m_b, v_b;
};

AdamState make_adam(const NeuralNet& net, double learning_rate);

// One ADAM step along -gradient; throws on non-finite gradients.
void adam_update(NeuralNet& net, const NetGradients& grads, AdamState& opt);

}  // namespace ccra
