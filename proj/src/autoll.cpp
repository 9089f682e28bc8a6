#include "linlayout/autoll.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "linlayout/error.hpp"

namespace linlayout::autoll {

namespace {

void check_index(const AdjacencyMatrix& a, int i) {
    if (i < 0 || i >= a.n()) {
        throw ShapeError("node index " + std::to_string(i) + " out of range for n=" +
                         std::to_string(a.n()));
    }
}

void check_normalized(const AdjacencyMatrix& a) {
    if (!a.unit_interval()) {
        throw DomainError("adjacency entries must be normalized to [0,1] before training");
    }
}

void check_model_fits(const AutoLLModel& model, const AdjacencyMatrix& a) {
    if (model.encoder.input_size() != input_size(a.n(), model.variant)) {
        throw ShapeError("model was built for a different matrix size or variant (encoder input " +
                         std::to_string(model.encoder.input_size()) + ", matrix needs " +
                         std::to_string(input_size(a.n(), model.variant)) + ")");
    }
}

/// Scratch space reused across iterations: slot[node] is the node's column
/// in the deduplicated encoder batch, -1 when absent.
struct BatchScratch {
    std::vector<int> slot;
    std::vector<int> nodes;
};

LossAndGrad batch_loss_impl(const AutoLLModel& model, const nn::Matrix& inputs,
                            const AdjacencyMatrix& a, std::span<const IndexPair> pairs,
                            double lambda, BatchScratch& scratch) {
    const auto batch = static_cast<Eigen::Index>(pairs.size());
    scratch.slot.assign(static_cast<std::size_t>(a.n()), -1);
    scratch.nodes.clear();
    auto slot_of = [&](int node) {
        int& s = scratch.slot[static_cast<std::size_t>(node)];
        if (s < 0) {
            s = static_cast<int>(scratch.nodes.size());
            scratch.nodes.push_back(node);
        }
        return s;
    };
    std::vector<int> left(pairs.size()), right(pairs.size());
    for (std::size_t b = 0; b < pairs.size(); ++b) {
        left[b] = slot_of(pairs[b].first);
        right[b] = slot_of(pairs[b].second);
    }

    nn::Matrix enc_in(inputs.rows(), static_cast<Eigen::Index>(scratch.nodes.size()));
    for (std::size_t u = 0; u < scratch.nodes.size(); ++u) {
        enc_in.col(static_cast<Eigen::Index>(u)) = inputs.col(scratch.nodes[u]);
    }
    const nn::ForwardCache enc_cache = nn::mlp_forward(model.encoder, enc_in);
    const nn::Matrix& z = enc_cache.output();

    nn::Matrix dec_in(2, batch);
    for (Eigen::Index b = 0; b < batch; ++b) {
        dec_in(0, b) = z(0, left[static_cast<std::size_t>(b)]);
        dec_in(1, b) = z(0, right[static_cast<std::size_t>(b)]);
    }
    const nn::ForwardCache dec_cache = nn::mlp_forward(model.decoder, dec_in);
    const nn::Matrix& pred = dec_cache.output();

    double bce_sum = 0.0;
    nn::Matrix d_pred(1, batch);
    const double inv_batch = 1.0 / static_cast<double>(batch);
    for (Eigen::Index b = 0; b < batch; ++b) {
        const auto& [i, j] = pairs[static_cast<std::size_t>(b)];
        const double y = a(i, j);
        bce_sum += nn::bce_loss_clamped(pred(0, b), y);
        d_pred(0, b) = nn::bce_gradient(pred(0, b), y) * inv_batch;
    }

    LossAndGrad out;
    out.loss = bce_sum * inv_batch + lambda * model.weight_sq_norm();

    nn::BackwardResult dec_back = nn::mlp_backward(model.decoder, dec_cache, d_pred, lambda);
    nn::Matrix d_z = nn::Matrix::Zero(1, enc_in.cols());
    for (Eigen::Index b = 0; b < batch; ++b) {
        d_z(0, left[static_cast<std::size_t>(b)]) += dec_back.input_gradient(0, b);
        d_z(0, right[static_cast<std::size_t>(b)]) += dec_back.input_gradient(1, b);
    }
    nn::BackwardResult enc_back = nn::mlp_backward(model.encoder, enc_cache, d_z, lambda);

    out.grads.encoder = std::move(enc_back.grads);
    out.grads.decoder = std::move(dec_back.grads);
    return out;
}

} // namespace

const char* to_string(Variant v) {
    return v == Variant::Directed ? "directed" : "undirected";
}

Variant parse_variant(const std::string& s) {
    if (s == "u" || s == "undirected" || s == "U") return Variant::Undirected;
    if (s == "d" || s == "directed" || s == "D") return Variant::Directed;
    throw InvalidConfig("unknown variant '" + s + "' (expected u or d)");
}

int input_size(int n, Variant variant) {
    return variant == Variant::Directed ? 2 * n : n;
}

nn::Vector node_input(const AdjacencyMatrix& a, int i, Variant variant) {
    check_index(a, i);
    const int n = a.n();
    nn::Vector v(input_size(n, variant));
    v.head(n) = a.entries().row(i).transpose();
    if (variant == Variant::Directed) {
        v.tail(n) = a.entries().col(i);
    }
    return v;
}

nn::Matrix node_inputs(const AdjacencyMatrix& a, Variant variant) {
    const int n = a.n();
    nn::Matrix x(input_size(n, variant), n);
    // Column i holds row i, so the top block is A transposed.
    x.topRows(n) = a.entries().transpose();
    if (variant == Variant::Directed) {
        x.bottomRows(n) = a.entries();
    }
    return x;
}

int AutoLLModel::n() const {
    const int in = encoder.input_size();
    return variant == Variant::Directed ? in / 2 : in;
}

std::vector<int> encoder_sizes(int n, Variant variant, const TrainConfig& cfg) {
    std::vector<int> sizes{input_size(n, variant)};
    sizes.insert(sizes.end(), cfg.encoder_hidden.begin(), cfg.encoder_hidden.end());
    sizes.push_back(1);
    return sizes;
}

std::vector<int> decoder_sizes(const TrainConfig& cfg) {
    std::vector<int> sizes{2};
    sizes.insert(sizes.end(), cfg.decoder_hidden.begin(), cfg.decoder_hidden.end());
    sizes.push_back(1);
    return sizes;
}

long long total_iterations(long long pair_count, const TrainConfig& cfg) {
    if (cfg.epochs <= 0 || cfg.batch_size <= 0) {
        throw InvalidConfig("epochs and batch size must be positive");
    }
    const long long work = static_cast<long long>(cfg.epochs) * pair_count;
    return (work + cfg.batch_size - 1) / cfg.batch_size;
}

AutoLLModel init_model(int n, Variant variant, const TrainConfig& cfg, SeededRng& rng) {
    if (n < 1) {
        throw InvalidConfig("matrix must have at least one node");
    }
    AutoLLModel model;
    model.variant = variant;
    model.encoder = nn::glorot_init(encoder_sizes(n, variant, cfg), rng);
    model.decoder = nn::glorot_init(decoder_sizes(cfg), rng);
    return model;
}

LossAndGrad pair_loss(const AutoLLModel& model, const AdjacencyMatrix& a, int i, int j,
                      double lambda) {
    check_index(a, i);
    check_index(a, j);
    check_model_fits(model, a);
    check_normalized(a);

    nn::Matrix enc_in(model.encoder.input_size(), 2);
    enc_in.col(0) = node_input(a, i, model.variant);
    enc_in.col(1) = node_input(a, j, model.variant);
    const nn::ForwardCache enc_cache = nn::mlp_forward(model.encoder, enc_in);

    nn::Matrix dec_in(2, 1);
    dec_in(0, 0) = enc_cache.output()(0, 0);
    dec_in(1, 0) = enc_cache.output()(0, 1);
    const nn::ForwardCache dec_cache = nn::mlp_forward(model.decoder, dec_in);
    const double pred = dec_cache.output()(0, 0);
    const double y = a(i, j);

    LossAndGrad out;
    out.loss = nn::bce_loss_clamped(pred, y) + lambda * model.weight_sq_norm();

    nn::Matrix d_pred(1, 1);
    d_pred(0, 0) = nn::bce_gradient(pred, y);
    nn::BackwardResult dec_back = nn::mlp_backward(model.decoder, dec_cache, d_pred, lambda);
    // The same encoder ran twice; its parameter gradients from both columns
    // are summed by the batched backward pass.
    nn::Matrix d_z(1, 2);
    d_z(0, 0) = dec_back.input_gradient(0, 0);
    d_z(0, 1) = dec_back.input_gradient(1, 0);
    nn::BackwardResult enc_back = nn::mlp_backward(model.encoder, enc_cache, d_z, lambda);

    out.grads.encoder = std::move(enc_back.grads);
    out.grads.decoder = std::move(dec_back.grads);
    return out;
}

LossAndGrad batch_loss(const AutoLLModel& model, const AdjacencyMatrix& a,
                       std::span<const IndexPair> pairs, double lambda) {
    if (pairs.empty()) {
        throw InvalidConfig("batch_loss: empty minibatch");
    }
    check_model_fits(model, a);
    check_normalized(a);
    for (const auto& [i, j] : pairs) {
        check_index(a, i);
        check_index(a, j);
    }
    BatchScratch scratch;
    return batch_loss_impl(model, node_inputs(a, model.variant), a, pairs, lambda, scratch);
}

double TrainResult::tail_mean(int window) const {
    if (loss_history.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    const std::size_t w = std::min(loss_history.size(), static_cast<std::size_t>(std::max(window, 1)));
    const double s = std::accumulate(loss_history.end() - static_cast<std::ptrdiff_t>(w),
                                     loss_history.end(), 0.0);
    return s / static_cast<double>(w);
}

TrainResult train(const AdjacencyMatrix& a, const TrainConfig& cfg) {
    return train(a, a.directed() ? Variant::Directed : Variant::Undirected, cfg);
}

TrainResult train(const AdjacencyMatrix& a, Variant variant, const TrainConfig& cfg) {
    check_normalized(a);
    const int n = a.n();
    if (n < 1) {
        throw InvalidConfig("train: empty matrix");
    }
    if (cfg.training_pairs && cfg.training_pairs->empty()) {
        throw InvalidConfig("train: explicit training-pair set is empty");
    }
    if (cfg.training_pairs) {
        for (const auto& [i, j] : *cfg.training_pairs) {
            check_index(a, i);
            check_index(a, j);
        }
    }
    const long long pair_count = cfg.training_pairs
                                     ? static_cast<long long>(cfg.training_pairs->size())
                                     : static_cast<long long>(n) * n;
    const long long iterations = total_iterations(pair_count, cfg);

    SeededRng init_rng = SeededRng::derive(cfg.seed, Stream::Init);
    SeededRng batch_rng = SeededRng::derive(cfg.seed, Stream::Minibatch);

    TrainResult result;
    result.seed = cfg.seed;
    result.model = init_model(n, variant, cfg, init_rng);
    result.loss_history.reserve(static_cast<std::size_t>(iterations));

    nn::AdamState enc_state = nn::AdamState::fresh(result.model.encoder);
    nn::AdamState dec_state = nn::AdamState::fresh(result.model.decoder);
    const nn::Matrix inputs = node_inputs(a, variant);

    std::vector<IndexPair> batch(static_cast<std::size_t>(cfg.batch_size));
    BatchScratch scratch;
    const auto un = static_cast<std::uint64_t>(n);
    for (long long it = 0; it < iterations; ++it) {
        if (cfg.training_pairs) {
            const auto& pool = *cfg.training_pairs;
            for (auto& p : batch) {
                p = pool[static_cast<std::size_t>(batch_rng.below(pool.size()))];
            }
        } else {
            for (auto& p : batch) {
                const int i = static_cast<int>(batch_rng.below(un));
                const int j = static_cast<int>(batch_rng.below(un));
                p = {i, j};
            }
        }
        LossAndGrad step = batch_loss_impl(result.model, inputs, a, batch, cfg.hyper.lambda, scratch);
        result.loss_history.push_back(step.loss);
        nn::adam_step(result.model.encoder, step.grads.encoder, enc_state, cfg.hyper);
        nn::adam_step(result.model.decoder, step.grads.decoder, dec_state, cfg.hyper);
    }
    return result;
}

RestartResult train_with_restarts(const AdjacencyMatrix& a, Variant variant,
                                  const TrainConfig& cfg, std::uint64_t base_seed) {
    if (cfg.restarts < 1) {
        throw InvalidConfig("restarts must be >= 1");
    }
    RestartResult out;
    double best_mean = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.restarts; ++r) {
        TrainConfig run_cfg = cfg;
        run_cfg.seed = base_seed + static_cast<std::uint64_t>(r);
        TrainResult run = train(a, variant, run_cfg);
        const double mean = run.tail_mean(cfg.last_window);
        out.histories.push_back(run.loss_history);
        out.tail_means.push_back(mean);
        if (r == 0 || mean < best_mean) {
            best_mean = mean;
            out.best_index = static_cast<std::size_t>(r);
            out.best = std::move(run);
        }
    }
    return out;
}

std::vector<double> extract_features(const AutoLLModel& model, const AdjacencyMatrix& a) {
    check_model_fits(model, a);
    const nn::ForwardCache cache = nn::mlp_forward(model.encoder, node_inputs(a, model.variant));
    const nn::Matrix& z = cache.output();
    return std::vector<double>(z.data(), z.data() + z.size());
}

NodeOrdering order_from_features(std::span<const double> z) {
    return order_by_scores(z);
}

Matrix reconstruct(const AutoLLModel& model, std::span<const double> z) {
    const auto n = static_cast<Eigen::Index>(z.size());
    nn::Matrix dec_in(2, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            dec_in(0, i * n + j) = z[static_cast<std::size_t>(i)];
            dec_in(1, i * n + j) = z[static_cast<std::size_t>(j)];
        }
    }
    const nn::ForwardCache cache = nn::mlp_forward(model.decoder, dec_in);
    Matrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out(i, j) = cache.output()(0, i * n + j);
        }
    }
    return out;
}

ReorderResult reorder(const AdjacencyMatrix& a, const AutoLLModel& model) {
    ReorderResult r;
    r.features = extract_features(model, a);
    r.ordering = order_from_features(r.features);
    r.features_sorted.reserve(r.features.size());
    for (int k = 0; k < r.ordering.size(); ++k) {
        r.features_sorted.push_back(r.features[static_cast<std::size_t>(r.ordering[k])]);
    }
    r.reordered_observed = permute_matrix(a.entries(), r.ordering);
    r.reconstruction = reconstruct(model, r.features);
    r.reordered_reconstruction = permute_matrix(r.reconstruction, r.ordering);
    const auto [lo, hi] = std::minmax_element(r.features.begin(), r.features.end());
    if (!r.features.empty() && *hi - *lo <= 1e-9) {
        r.warnings.push_back("degenerate features: encoder output is constant across nodes");
    }
    return r;
}

} // namespace linlayout::autoll
