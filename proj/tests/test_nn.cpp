#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ccra/nn.hpp"

using namespace ccra;

namespace {

double unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// scalar loss (target - out[action])^2 used by the gradient oracle
double td_loss(const NeuralNet& net, const Eigen::VectorXd& input, int action,
               double target) {
    const double q = net.forward(input)(action);
    return (target - q) * (target - q);
}

NetGradients td_grads(const NeuralNet& net, const Eigen::VectorXd& input, int action,
                      double target) {
    Eigen::MatrixXd og = Eigen::MatrixXd::Zero(net.output_width(), 1);
    og(action, 0) = -2.0 * (target - net.forward(input)(action));
    return backprop(net, input, og);
}

bool close_rel(double a, double b) {
    return std::abs(a - b) <= 1e-4 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("zero parameters map everything to zero") {
    std::mt19937_64 rng(0);
    auto net = NeuralNet::make({4, 8, 3}, rng);
    for (auto& w : net.weights) w.setZero();
    Eigen::VectorXd in(4);
    in << 1, -2, 3, 0.5;
    CHECK(net.forward(in).isZero());
}

TEST_CASE("forward pass matches a hand-computed network") {
    std::mt19937_64 rng(0);
    auto net = NeuralNet::make({2, 2, 1}, rng);
    net.weights[0] << 1, 2, -1, 1;
    net.biases[0] << 0, -1;
    net.weights[1] << 1, -2;
    net.biases[1] << 0.5;
    Eigen::VectorXd in(2);
    in << 1, 0.5;
    // hidden: relu([2, -1.5]) = [2, 0]; output: 2*1 + 0*(-2) + 0.5 = 2.5
    CHECK(net.forward(in)(0) == doctest::Approx(2.5));
}

TEST_CASE("batched evaluation equals per-column evaluation") {
    std::mt19937_64 rng(7);
    auto net = NeuralNet::make({5, 16, 16, 3}, rng);
    Eigen::MatrixXd batch(5, 9);
    for (int c = 0; c < batch.cols(); ++c)
        for (int r = 0; r < batch.rows(); ++r) batch(r, c) = 2 * unit(rng) - 1;
    auto out = net.forward_batch(batch);
    for (int c = 0; c < batch.cols(); ++c)
        CHECK((out.col(c) - net.forward(batch.col(c))).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("analytic gradients match central finite differences") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(seed);
        auto net = NeuralNet::make({3, 5, 4, 2}, rng);
        for (auto& b : net.biases)
            for (int i = 0; i < b.size(); ++i) b(i) = 0.2 * (2 * unit(rng) - 1);
        Eigen::VectorXd in(3);
        for (int i = 0; i < 3; ++i) in(i) = 2 * unit(rng) - 1;
        const int action = static_cast<int>(rng() % 2);
        const double target = 2 * unit(rng) - 1;

        auto g = td_grads(net, in, action, target);
        const double h = 1e-6;

        for (std::size_t l = 0; l < net.weights.size(); ++l) {
            for (int c = 0; c < net.weights[l].cols(); ++c)
                for (int r = 0; r < net.weights[l].rows(); ++r) {
                    auto probe = net;
                    probe.weights[l](r, c) += h;
                    const double up = td_loss(probe, in, action, target);
                    probe.weights[l](r, c) -= 2 * h;
                    const double dn = td_loss(probe, in, action, target);
                    CHECK(close_rel(g.weights[l](r, c), (up - dn) / (2 * h)));
                }
            for (int r = 0; r < net.biases[l].size(); ++r) {
                auto probe = net;
                probe.biases[l](r) += h;
                const double up = td_loss(probe, in, action, target);
                probe.biases[l](r) -= 2 * h;
                const double dn = td_loss(probe, in, action, target);
                CHECK(close_rel(g.biases[l](r), (up - dn) / (2 * h)));
            }
        }
        for (int i = 0; i < in.size(); ++i) {
            Eigen::VectorXd probe = in;
            probe(i) += h;
            const double up = td_loss(net, probe, action, target);
            probe(i) -= 2 * h;
            const double dn = td_loss(net, probe, action, target);
            CHECK(close_rel(g.inputs(i, 0), (up - dn) / (2 * h)));
        }
    }
}

TEST_CASE("adam first step moves by the learning rate") {
    std::mt19937_64 rng(3);
    auto net = NeuralNet::make({1, 1}, rng);
    const double w0 = net.weights[0](0, 0);
    auto opt = make_adam(net, 0.01);
    NetGradients g;
    g.weights.push_back(Eigen::MatrixXd::Constant(1, 1, 7.5));
    g.biases.push_back(Eigen::VectorXd::Constant(1, -0.25));
    adam_update(net, g, opt);
    // bias-corrected m/sqrt(v) is the gradient's sign on the first step
    CHECK(net.weights[0](0, 0) == doctest::Approx(w0 - 0.01).epsilon(1e-6));
    CHECK(net.biases[0](0) == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("zero gradient leaves a fresh optimizer's parameters unchanged") {
    std::mt19937_64 rng(4);
    auto net = NeuralNet::make({2, 3, 1}, rng);
    auto before = net;
    auto opt = make_adam(net, 0.1);
    NetGradients g;
    for (std::size_t i = 0; i < net.weights.size(); ++i) {
        g.weights.push_back(Eigen::MatrixXd::Zero(net.weights[i].rows(), net.weights[i].cols()));
        g.biases.push_back(Eigen::VectorXd::Zero(net.biases[i].size()));
    }
    adam_update(net, g, opt);
    for (std::size_t i = 0; i < net.weights.size(); ++i) {
        CHECK(net.weights[i] == before.weights[i]);
        CHECK(net.biases[i] == before.biases[i]);
    }
}

TEST_CASE("adam minimizes a quadratic to its closed-form optimum") {
    std::mt19937_64 rng(5);
    auto net = NeuralNet::make({1, 1}, rng);
    net.weights[0](0, 0) = 0;
    auto opt = make_adam(net, 1e-2);
    NetGradients g;
    g.weights.push_back(Eigen::MatrixXd::Zero(1, 1));
    g.biases.push_back(Eigen::VectorXd::Zero(1));
    for (int step = 0; step < 10000; ++step) {
        g.weights[0](0, 0) = 2.0 * (net.weights[0](0, 0) - 3.0);  // d/dw (w-3)^2
        adam_update(net, g, opt);
    }
    CHECK(net.weights[0](0, 0) == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("non-finite gradients are rejected") {
    std::mt19937_64 rng(6);
    auto net = NeuralNet::make({1, 1}, rng);
    auto opt = make_adam(net, 0.1);
    NetGradients g;
    g.weights.push_back(Eigen::MatrixXd::Constant(1, 1, std::nan("")));
    g.biases.push_back(Eigen::VectorXd::Zero(1));
    CHECK_THROWS_AS(adam_update(net, g, opt), std::runtime_error);
}

TEST_CASE("construction is deterministic and serialization round-trips") {
    std::mt19937_64 rng_a(11), rng_b(11);
    auto a = NeuralNet::make({6, 128, 128, 4}, rng_a);
    auto b = NeuralNet::make({6, 128, 128, 4}, rng_b);
    for (std::size_t i = 0; i < a.weights.size(); ++i) CHECK(a.weights[i] == b.weights[i]);

    std::stringstream buf;
    a.write(buf);
    auto c = NeuralNet::read(buf);
    REQUIRE(c.sizes == a.sizes);
    for (std::size_t i = 0; i < a.weights.size(); ++i) {
        CHECK(c.weights[i] == a.weights[i]);
        CHECK(c.biases[i] == a.biases[i]);
    }

    std::stringstream junk("definitely not a network");
    CHECK_THROWS_AS((void)NeuralNet::read(junk), std::runtime_error);
}

}  // TEST_SUITE
