#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "linlayout/graph.hpp"
#include "linlayout/nn.hpp"

namespace linlayout::autoll {

enum class Variant { Undirected, Directed };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

/// Encoder input for node i: row i (undirected) or [row i | column i]
/// (directed, length 2n).
nn::Vector node_input(const AdjacencyMatrix& a, int i, Variant variant);
/// All node inputs as columns of an (input_size x n) matrix.
nn::Matrix node_inputs(const AdjacencyMatrix& a, Variant variant);
int input_size(int n, Variant variant);

/// One shared encoder maps a node input to a scalar feature in (0,1); the
/// decoder maps (z_i, z_j) to the reconstructed entry.
struct AutoLLModel {
    Variant variant = Variant::Undirected;
    nn::MlpNetwork encoder;
    nn::MlpNetwork decoder;

    int n() const;
    double weight_sq_norm() const { return encoder.weight_sq_norm() + decoder.weight_sq_norm(); }
};

struct ModelGradients {
    nn::MlpGradients encoder;
    nn::MlpGradients decoder;
};

using IndexPair = std::pair<int, int>;

struct TrainConfig {
    int epochs = 200;
    int batch_size = 200;
    std::vector<int> encoder_hidden{10};
    std::vector<int> decoder_hidden{10};
    int restarts = 10;
    int last_window = 100;
    nn::TrainHyper hyper;
    std::uint64_t seed = 0;
    /// When set, minibatches are drawn from these pairs instead of all n^2.
    std::optional<std::vector<IndexPair>> training_pairs;
};

std::vector<int> encoder_sizes(int n, Variant variant, const TrainConfig& cfg);
std::vector<int> decoder_sizes(const TrainConfig& cfg);

/// ceil(epochs * pair_count / batch_size).
long long total_iterations(long long pair_count, const TrainConfig& cfg);

AutoLLModel init_model(int n, Variant variant, const TrainConfig& cfg, SeededRng& rng);

struct LossAndGrad {
    double loss = 0.0;
    ModelGradients grads;
};

/// BCE(DEC(ENC(in_i), ENC(in_j)), A_ij) + lambda*||w||^2 for one entry, with
/// gradients through the decoder and both applications of the shared encoder.
LossAndGrad pair_loss(const AutoLLModel& model, const AdjacencyMatrix& a, int i, int j,
                      double lambda);

/// Minibatch objective: mean BCE over `pairs` + lambda*||w||^2, with gradients.
/// Each distinct node in the batch is encoded once; gradients of the i-side
/// and j-side uses accumulate into the same encoder parameters.
LossAndGrad batch_loss(const AutoLLModel& model, const AdjacencyMatrix& a,
                       std::span<const IndexPair> pairs, double lambda);

struct TrainResult {
    AutoLLModel model;
    std::vector<double> loss_history;
    std::uint64_t seed = 0;

    double final_loss() const { return loss_history.empty() ? 0.0 : loss_history.back(); }
    /// Mean loss over the last `window` iterations (all of them if fewer).
    double tail_mean(int window) const;
};

/// Variant follows the directedness of `a`.
TrainResult train(const AdjacencyMatrix& a, const TrainConfig& cfg);
TrainResult train(const AdjacencyMatrix& a, Variant variant, const TrainConfig& cfg);

struct RestartResult {
    TrainResult best;
    std::size_t best_index = 0;
    std::vector<std::vector<double>> histories;
    std::vector<double> tail_means;
};

/// Trains cfg.restarts models with seeds base_seed + r and keeps the one with
/// the smallest mean loss over the last cfg.last_window iterations.
RestartResult train_with_restarts(const AdjacencyMatrix& a, Variant variant,
                                  const TrainConfig& cfg, std::uint64_t base_seed);

std::vector<double> extract_features(const AutoLLModel& model, const AdjacencyMatrix& a);

/// Ascending order of the features; stable in the original index.
NodeOrdering order_from_features(std::span<const double> z);

struct ReorderResult {
    NodeOrdering ordering;
    std::vector<double> features;
    std::vector<double> features_sorted;
    Matrix reordered_observed;
    Matrix reconstruction;
    Matrix reordered_reconstruction;
    std::vector<double> loss_history;
    std::vector<std::string> warnings;
};

/// Reconstructed matrix Ahat(i,j) = DEC(z_i, z_j).
Matrix reconstruct(const AutoLLModel& model, std::span<const double> z);

ReorderResult reorder(const AdjacencyMatrix& a, const AutoLLModel& model);

} // namespace linlayout::autoll
