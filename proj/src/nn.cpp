#include "ccra/nn.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace ccra {

namespace {

double draw_open_unit(std::mt19937_64& rng) {
    // (0,1): never exactly 0, safe under log()
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double draw_normal(std::mt19937_64& rng) {
    const double u = draw_open_unit(rng);
    const double v = draw_open_unit(rng);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
}

void check_dims(const NeuralNet& net, Eigen::Index input_rows) {
    if (net.sizes.size() < 2) throw std::invalid_argument("network needs >= 2 layers");
    if (input_rows != net.input_width())
        throw std::invalid_argument("input width does not match the network");
}

template <typename T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("truncated network stream");
    return v;
}

}  // namespace

NeuralNet NeuralNet::make(std::vector<int> layer_sizes, std::mt19937_64& rng) {
    if (layer_sizes.size() < 2) throw std::invalid_argument("network needs >= 2 layers");
    for (int s : layer_sizes)
        if (s < 1) throw std::invalid_argument("layer sizes must be positive");
    NeuralNet net;
    net.sizes = std::move(layer_sizes);
    for (std::size_t i = 0; i + 1 < net.sizes.size(); ++i) {
        const int rows = net.sizes[i + 1];
        const int cols = net.sizes[i];
        Eigen::MatrixXd w(rows, cols);
        const double scale = std::sqrt(2.0 / cols);
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r) w(r, c) = scale * draw_normal(rng);
        net.weights.push_back(std::move(w));
        net.biases.push_back(Eigen::VectorXd::Zero(rows));
    }
    return net;
}

Eigen::VectorXd NeuralNet::forward(const Eigen::VectorXd& input) const {
    return forward_batch(input).col(0);
}

Eigen::MatrixXd NeuralNet::forward_batch(const Eigen::MatrixXd& inputs) const {
    check_dims(*this, inputs.rows());
    Eigen::MatrixXd a = inputs;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        Eigen::MatrixXd z = (weights[i] * a).colwise() + biases[i];
        if (i + 1 < weights.size()) z = z.cwiseMax(0.0);
        a = std::move(z);
    }
    return a;
}

NetGradients backprop(const NeuralNet& net, const Eigen::MatrixXd& inputs,
                      const Eigen::MatrixXd& output_grads) {
    check_dims(net, inputs.rows());
    if (output_grads.rows() != net.output_width() || output_grads.cols() != inputs.cols())
        throw std::invalid_argument("output gradient shape mismatch");

    // forward, keeping every post-activation layer
    std::vector<Eigen::MatrixXd> acts{inputs};
    for (std::size_t i = 0; i < net.weights.size(); ++i) {
        Eigen::MatrixXd z = (net.weights[i] * acts.back()).colwise() + net.biases[i];
        if (i + 1 < net.weights.size()) z = z.cwiseMax(0.0);
        acts.push_back(std::move(z));
    }

    NetGradients g;
    g.weights.resize(net.weights.size());
    g.biases.resize(net.biases.size());
    Eigen::MatrixXd delta = output_grads;
    for (std::size_t i = net.weights.size(); i-- > 0;) {
        g.weights[i].noalias() = delta * acts[i].transpose();
        g.biases[i] = delta.rowwise().sum();
        if (i == 0) {
            g.inputs.noalias() = net.weights[i].transpose() * delta;
        } else {
            // rectifier gate: the layer is active where its output is positive
            delta = (net.weights[i].transpose() * delta).array() *
                    (acts[i].array() > 0.0).cast<double>();
        }
    }
    return g;
}

AdamState make_adam(const NeuralNet& net, double learning_rate) {
    AdamState opt;
    opt.learning_rate = learning_rate;
    for (std::size_t i = 0; i < net.weights.size(); ++i) {
        opt.m_w.push_back(Eigen::MatrixXd::Zero(net.weights[i].rows(), net.weights[i].cols()));
        opt.v_w.push_back(Eigen::MatrixXd::Zero(net.weights[i].rows(), net.weights[i].cols()));
        opt.m_b.push_back(Eigen::VectorXd::Zero(net.biases[i].size()));
        opt.v_b.push_back(Eigen::VectorXd::Zero(net.biases[i].size()));
    }
    return opt;
}

void adam_update(NeuralNet& net, const NetGradients& grads, AdamState& opt) {
    if (grads.weights.size() != net.weights.size() ||
        grads.biases.size() != net.biases.size())
        throw std::invalid_argument("gradient layer count mismatch");
    for (std::size_t i = 0; i < net.weights.size(); ++i)
        if (!grads.weights[i].allFinite() || !grads.biases[i].allFinite())
            throw std::runtime_error("non-finite gradient");

    ++opt.step;
    const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
    const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
    auto apply = [&](auto& param, const auto& grad, auto& m, auto& v) {
        m = opt.beta1 * m + (1.0 - opt.beta1) * grad;
        v = opt.beta2 * v.array() + (1.0 - opt.beta2) * grad.array().square();
        param.array() -=
            opt.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + opt.epsilon);
    };
    for (std::size_t i = 0; i < net.weights.size(); ++i) {
        apply(net.weights[i], grads.weights[i], opt.m_w[i], opt.v_w[i]);
        apply(net.biases[i], grads.biases[i], opt.m_b[i], opt.v_b[i]);
    }
}

void NeuralNet::write(std::ostream& out) const {
    out.write("CCRANET1", 8);
    write_raw(out, static_cast<std::uint32_t>(sizes.size()));
    for (int s : sizes) write_raw(out, static_cast<std::uint32_t>(s));
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out.write(reinterpret_cast<const char*>(weights[i].data()),
                  static_cast<std::streamsize>(sizeof(double) *
                                               static_cast<std::size_t>(weights[i].size())));
        out.write(reinterpret_cast<const char*>(biases[i].data()),
                  static_cast<std::streamsize>(sizeof(double) *
                                               static_cast<std::size_t>(biases[i].size())));
    }
}

NeuralNet NeuralNet::read(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "CCRANET1", 8) != 0)
        throw std::runtime_error("not a network stream");
    const auto layers = read_raw<std::uint32_t>(in);
    if (layers < 2 || layers > 64) throw std::runtime_error("corrupt network header");
    NeuralNet net;
    for (std::uint32_t i = 0; i < layers; ++i)
        net.sizes.push_back(static_cast<int>(read_raw<std::uint32_t>(in)));
    for (std::size_t i = 0; i + 1 < net.sizes.size(); ++i) {
        Eigen::MatrixXd w(net.sizes[i + 1], net.sizes[i]);
        in.read(reinterpret_cast<char*>(w.data()),
                static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(w.size())));
        Eigen::VectorXd b(net.sizes[i + 1]);
        in.read(reinterpret_cast<char*>(b.data()),
                static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(b.size())));
        if (!in) throw std::runtime_error("truncated network stream");
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    return net;
}

}  // namespace ccra
