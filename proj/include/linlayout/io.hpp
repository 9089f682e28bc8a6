#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "linlayout/autoll.hpp"
#include "linlayout/graph.hpp"
#include "linlayout/rng.hpp"

namespace linlayout::io {

namespace fs = std::filesystem;

/// Dense numeric CSV. Directedness is inferred from symmetry unless given.
/// Throws ParseError (with the 1-based line) on ragged rows, non-numeric
/// cells and non-square shapes.
AdjacencyMatrix load_matrix_csv(const fs::path& path, std::optional<bool> directed = std::nullopt);
AdjacencyMatrix parse_matrix_csv(const std::string& text, std::optional<bool> directed = std::nullopt);

void write_matrix_csv(const fs::path& path, const Matrix& m);

struct Edge {
    int source = 0;
    int target = 0;
    double weight = 1.0;
};

/// Edges over dense 0-based ids; labels[id] is the original node label.
struct EdgeList {
    std::vector<Edge> edges;
    std::vector<std::string> labels;
    bool directed = false;

    int n() const { return static_cast<int>(labels.size()); }

    /// Dense weights; duplicate edges are summed and undirected edges mirrored.
    AdjacencyMatrix to_adjacency() const;
};

/// Whitespace-separated "src dst [weight]" lines; '#' and '%' start comments.
/// Labels are arbitrary tokens. When every label is an integer, ids follow
/// numeric order; otherwise order of first appearance.
EdgeList load_edge_list(const fs::path& path, bool directed);
EdgeList parse_edge_list(const std::string& text, bool directed);

struct UndersampledPairs {
    std::vector<autoll::IndexPair> pairs;
    std::size_t nonzero = 0;
    std::size_t zero_sampled = 0;
    std::vector<std::string> warnings;
};

/// All pairs with a nonzero entry plus multiplier * (nonzero count) distinct
/// zero pairs drawn uniformly without replacement. "Zero" means exactly 0.
UndersampledPairs undersample_training_pairs(const Matrix& weights, int multiplier, SeededRng& rng);

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    int version = kCheckpointVersion;
    autoll::AutoLLModel model;
    std::uint64_t seed = 0;
    double final_loss = 0.0;
};

/// JSON document; doubles are written in shortest round-trip form so a
/// reload is bit-exact.
void save_checkpoint(const Checkpoint& ckpt, const fs::path& path);
Checkpoint load_checkpoint(const fs::path& path);
std::string checkpoint_to_string(const Checkpoint& ckpt);
Checkpoint checkpoint_from_string(const std::string& text);

/// Binary PGM (P5, maxval 255); pixel = round-half-up(255 * (1 - m)), each
/// entry replicated into a scale x scale block.
std::string heatmap_pgm(const Matrix& m, int scale = 1);
void render_heatmap(const Matrix& m, const fs::path& path, int scale = 1);

/// "position,node_id,feature_z", 1-based positions.
std::string ordering_csv(const NodeOrdering& order, const std::vector<double>& features,
                         const std::vector<std::string>& labels);
/// "node_id,feature_z" in input order.
std::string features_csv(const std::vector<double>& features, const std::vector<std::string>& labels);

/// "1".."n".
std::vector<std::string> default_labels(int n);

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, const std::string& bytes);

} // namespace linlayout::io
