#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "linlayout/rng.hpp"

namespace linlayout::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Fully connected network where every layer is an affine map followed by
/// the logistic sigmoid. weights[l] is (layer_sizes[l+1] x layer_sizes[l]).
struct MlpNetwork {
    std::vector<int> layer_sizes;
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    std::size_t num_layers() const { return weights.size(); }
    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    std::size_t parameter_count() const;

    /// Sum of squared weights (biases excluded).
    double weight_sq_norm() const;

    /// Zero-initialized network with the given shape.
    static MlpNetwork zeros(const std::vector<int>& layer_sizes);
};

/// Gradient container shaped like an MlpNetwork.
struct MlpGradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    static MlpGradients zeros_like(const MlpNetwork& net);
    void set_zero();
    MlpGradients& operator+=(const MlpGradients& other);
};

struct TrainHyper {
    double eta = 1.0e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1.0e-8;
    double lambda = 1.0e-10;
};

struct AdamState {
    MlpGradients m;
    MlpGradients v;
    long long t = 0;

    static AdamState fresh(const MlpNetwork& net);
};

/// Activations of every layer for a batch (columns are samples);
/// activations[0] is the input itself.
struct ForwardCache {
    std::vector<Matrix> activations;

    const Matrix& output() const { return activations.back(); }
};

struct BackwardResult {
    MlpGradients grads;
    Matrix input_gradient;
};

void validate_layer_sizes(const std::vector<int>& layer_sizes);

/// Weights uniform on [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
MlpNetwork glorot_init(const std::vector<int>& layer_sizes, SeededRng& rng);

double sigmoid(double x);

/// Batched forward pass; `input` is (input_size x batch).
ForwardCache mlp_forward(const MlpNetwork& net, const Matrix& input);
/// Single-sample convenience overload.
Vector mlp_forward(const MlpNetwork& net, const Vector& input);

/// Binary cross-entropy -[y log x + (1-y) log(1-x)].
/// Throws DomainError when x is not strictly inside (0,1) or y outside [0,1].
double bce_loss(double prediction, double target);
/// Same formula with the prediction clamped to [1e-12, 1-1e-12]; used on
/// network outputs, which are in (0,1) but may round to the boundary.
double bce_loss_clamped(double prediction, double target);
/// d BCE / d prediction, evaluated at the clamped prediction.
double bce_gradient(double prediction, double target);

/// Reverse accumulation through the sigmoid/affine stack.
/// `output_gradient` has the shape of cache.output(); gradients are summed
/// over the batch. The regularizer lambda*||W||^2 adds 2*lambda*W to each
/// weight gradient (once, not per sample).
BackwardResult mlp_backward(const MlpNetwork& net, const ForwardCache& cache,
                            const Matrix& output_gradient, double lambda);

/// One Adam update with bias correction; increments state.t.
void adam_step(MlpNetwork& net, const MlpGradients& grads, AdamState& state,
               const TrainHyper& hyper);

/// Flat-array form of the same update, for callers that keep raw buffers.
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v, long long t,
                 const TrainHyper& hyper);

/// Parameters as one flat vector: per layer, weights row-major then biases.
std::vector<double> flatten(const MlpNetwork& net);
void unflatten(MlpNetwork& net, std::span<const double> flat);
std::vector<double> flatten(const MlpGradients& grads);

} // namespace linlayout::nn
