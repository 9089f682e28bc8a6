#include "linlayout/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "linlayout/error.hpp"

namespace linlayout::nn {

namespace {

constexpr double kClampLo = 1e-12;
constexpr double kClampHi = 1.0 - 1e-12;

std::span<double> as_span(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> as_span(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> as_span(const Matrix& m) {
    return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<const double> as_span(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

void check_same_shape(const MlpNetwork& net, const MlpGradients& g, const char* where) {
    bool ok = g.weights.size() == net.weights.size() && g.biases.size() == net.biases.size();
    for (std::size_t l = 0; ok && l < net.weights.size(); ++l) {
        ok = g.weights[l].rows() == net.weights[l].rows() &&
             g.weights[l].cols() == net.weights[l].cols() &&
             g.biases[l].size() == net.biases[l].size();
    }
    if (!ok) {
        throw ShapeError(std::string(where) + ": parameter/gradient shape mismatch");
    }
}

} // namespace

std::size_t MlpNetwork::parameter_count() const {
    std::size_t count = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        count += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    }
    return count;
}

double MlpNetwork::weight_sq_norm() const {
    double s = 0.0;
    for (const auto& w : weights) {
        s += w.squaredNorm();
    }
    return s;
}

MlpNetwork MlpNetwork::zeros(const std::vector<int>& layer_sizes) {
    validate_layer_sizes(layer_sizes);
    MlpNetwork net;
    net.layer_sizes = layer_sizes;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        net.weights.push_back(Matrix::Zero(layer_sizes[l + 1], layer_sizes[l]));
        net.biases.push_back(Vector::Zero(layer_sizes[l + 1]));
    }
    return net;
}

MlpGradients MlpGradients::zeros_like(const MlpNetwork& net) {
    MlpGradients g;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        g.weights.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
        g.biases.push_back(Vector::Zero(net.biases[l].size()));
    }
    return g;
}

void MlpGradients::set_zero() {
    for (auto& w : weights) w.setZero();
    for (auto& b : biases) b.setZero();
}

MlpGradients& MlpGradients::operator+=(const MlpGradients& other) {
    if (other.weights.size() != weights.size()) {
        throw ShapeError("MlpGradients::operator+=: layer count mismatch");
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l] += other.weights[l];
        biases[l] += other.biases[l];
    }
    return *this;
}

AdamState AdamState::fresh(const MlpNetwork& net) {
    return AdamState{MlpGradients::zeros_like(net), MlpGradients::zeros_like(net), 0};
}

void validate_layer_sizes(const std::vector<int>& layer_sizes) {
    if (layer_sizes.size() < 2) {
        throw InvalidConfig("layer_sizes needs at least an input and an output layer");
    }
    for (int s : layer_sizes) {
        if (s <= 0) {
            throw InvalidConfig("layer sizes must be positive, got " + std::to_string(s));
        }
    }
}

MlpNetwork glorot_init(const std::vector<int>& layer_sizes, SeededRng& rng) {
    MlpNetwork net = MlpNetwork::zeros(layer_sizes);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer_sizes[l]));
        Matrix& w = net.weights[l];
        // Row-major fill order so the draw sequence does not depend on storage.
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                w(r, c) = rng.uniform(-bound, bound);
            }
        }
    }
    return net;
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

ForwardCache mlp_forward(const MlpNetwork& net, const Matrix& input) {
    if (input.rows() != net.input_size()) {
        throw ShapeError("mlp_forward: input has " + std::to_string(input.rows()) +
                         " rows, network expects " + std::to_string(net.input_size()));
    }
    ForwardCache cache;
    cache.activations.reserve(net.num_layers() + 1);
    cache.activations.push_back(input);
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        Matrix pre = net.weights[l] * cache.activations.back();
        pre.colwise() += net.biases[l];
        cache.activations.push_back(pre.unaryExpr([](double x) { return sigmoid(x); }));
    }
    return cache;
}

Vector mlp_forward(const MlpNetwork& net, const Vector& input) {
    return mlp_forward(net, Matrix(input)).output().col(0);
}

double bce_loss(double prediction, double target) {
    if (!(prediction > 0.0 && prediction < 1.0)) {
        throw DomainError("bce_loss: prediction must lie strictly inside (0,1)");
    }
    if (!(target >= 0.0 && target <= 1.0)) {
        throw DomainError("bce_loss: target must lie in [0,1]");
    }
    return -(target * std::log(prediction) + (1.0 - target) * std::log(1.0 - prediction));
}

double bce_loss_clamped(double prediction, double target) {
    return bce_loss(std::clamp(prediction, kClampLo, kClampHi), target);
}

double bce_gradient(double prediction, double target) {
    const double x = std::clamp(prediction, kClampLo, kClampHi);
    return -target / x + (1.0 - target) / (1.0 - x);
}

BackwardResult mlp_backward(const MlpNetwork& net, const ForwardCache& cache,
                            const Matrix& output_gradient, double lambda) {
    const std::size_t layers = net.num_layers();
    if (cache.activations.size() != layers + 1) {
        throw ShapeError("mlp_backward: cache does not match network depth");
    }
    for (std::size_t l = 0; l <= layers; ++l) {
        if (cache.activations[l].rows() != net.layer_sizes[l]) {
            throw ShapeError("mlp_backward: cache does not match layer sizes");
        }
    }
    const Matrix& out = cache.output();
    if (output_gradient.rows() != out.rows() || output_gradient.cols() != out.cols()) {
        throw ShapeError("mlp_backward: output gradient shape mismatch");
    }

    BackwardResult result{MlpGradients::zeros_like(net), Matrix()};
    // delta = dL/d(pre-activation) of the current layer
    Matrix delta = output_gradient.cwiseProduct(out.cwiseProduct((1.0 - out.array()).matrix()));
    for (std::size_t l = layers; l-- > 0;) {
        const Matrix& below = cache.activations[l];
        result.grads.weights[l].noalias() = delta * below.transpose();
        result.grads.weights[l] += 2.0 * lambda * net.weights[l];
        result.grads.biases[l] = delta.rowwise().sum();
        Matrix upstream = net.weights[l].transpose() * delta;
        if (l == 0) {
            result.input_gradient = std::move(upstream);
        } else {
            delta = upstream.cwiseProduct(below.cwiseProduct((1.0 - below.array()).matrix()));
        }
    }
    return result;
}

void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v, long long t,
                 const TrainHyper& hyper) {
    if (grads.size() != params.size() || m.size() != params.size() ||
        v.size() != params.size()) {
        throw ShapeError("adam_update: buffer size mismatch");
    }
    if (t < 1) {
        throw InvalidConfig("adam_update: step counter must be >= 1");
    }
    const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(t));
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double g = grads[k];
        m[k] = hyper.beta1 * m[k] + (1.0 - hyper.beta1) * g;
        v[k] = hyper.beta2 * v[k] + (1.0 - hyper.beta2) * g * g;
        const double m_hat = m[k] / c1;
        const double v_hat = v[k] / c2;
        params[k] -= hyper.eta * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
    }
}

void adam_step(MlpNetwork& net, const MlpGradients& grads, AdamState& state,
               const TrainHyper& hyper) {
    check_same_shape(net, grads, "adam_step");
    check_same_shape(net, state.m, "adam_step");
    check_same_shape(net, state.v, "adam_step");
    ++state.t;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        adam_update(as_span(net.weights[l]), as_span(grads.weights[l]),
                    as_span(state.m.weights[l]), as_span(state.v.weights[l]), state.t, hyper);
        adam_update(as_span(net.biases[l]), as_span(grads.biases[l]),
                    as_span(state.m.biases[l]), as_span(state.v.biases[l]), state.t, hyper);
    }
}

std::vector<double> flatten(const MlpNetwork& net) {
    std::vector<double> flat;
    flat.reserve(net.parameter_count());
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        const Matrix& w = net.weights[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
        for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) flat.push_back(net.biases[l](r));
    }
    return flat;
}

void unflatten(MlpNetwork& net, std::span<const double> flat) {
    if (flat.size() != net.parameter_count()) {
        throw ShapeError("unflatten: expected " + std::to_string(net.parameter_count()) +
                         " values, got " + std::to_string(flat.size()));
    }
    std::size_t k = 0;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        Matrix& w = net.weights[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[k++];
        for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) net.biases[l](r) = flat[k++];
    }
}

std::vector<double> flatten(const MlpGradients& grads) {
    std::vector<double> flat;
    for (std::size_t l = 0; l < grads.weights.size(); ++l) {
        const Matrix& w = grads.weights[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
        for (Eigen::Index r = 0; r < grads.biases[l].size(); ++r) flat.push_back(grads.biases[l](r));
    }
    return flat;
}

} // namespace linlayout::nn
