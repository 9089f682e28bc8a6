#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linlayout/graph.hpp"
#include "linlayout/rng.hpp"

namespace linlayout::synthetic {

struct SbmParams {
    Matrix block_means;
    double sigma = 0.05;

    int clusters() const { return static_cast<int>(block_means.rows()); }

    /// K=3 block means used in the reference experiments.
    static SbmParams reference(double sigma = 0.05);
};

/// Contiguous equal-size clusters: node i belongs to cluster i / (n/K)
/// (0-based). Throws InvalidConfig unless K divides n.
std::vector<int> sbm_assignments(int n, int clusters);
Matrix sbm_mean(int n, const SbmParams& params);
Matrix gen_sbm(int n, const SbmParams& params, SeededRng& rng);

struct DgmParams {
    double sigma = 0.05;
    double high = 0.9;
    double range = 0.8;
};

/// Mean(i, j) = high - range * (n-1-i+j) / (2n-2), with i, j 1-based.
Matrix dgm_mean(int n, const DgmParams& params = {});
Matrix gen_dgm(int n, const DgmParams& params, SeededRng& rng);

/// Upper triangle (diagonal included) mirrored below.
Matrix symmetrize_upper(const Matrix& m);

/// Affine map x -> (x - lo) / (hi - lo) fixed by one matrix and reusable
/// on another.
struct UnitMap {
    double lo = 0.0;
    double hi = 1.0;

    static UnitMap fit(const Matrix& m);
    Matrix apply(const Matrix& m) const;
};

/// min -> 0, max -> 1. Throws DomainError for a constant matrix.
Matrix normalize_unit_interval(const Matrix& m);

/// Each entry independently replaced by 0 with probability p.
Matrix inject_outliers(const Matrix& m, double p, SeededRng& rng);

struct GroundTruth {
    /// Mean matrix in the correct order, on the observed data's scale.
    Matrix mean_matrix;
    /// Permutation that restores the correct layout: permute_matrix(A,
    /// true_order) equals the unshuffled matrix.
    NodeOrdering true_order;

    /// An ordering of the observed (shuffled) nodes, rewritten in the
    /// correct-layout labels that mean_matrix uses.
    NodeOrdering to_true_labels(const NodeOrdering& observed_order) const;
    ErrorReport score(const NodeOrdering& observed_order) const;
};

struct Shuffled {
    Matrix matrix;
    /// A(i,j) = input(shuffle[i], shuffle[j]).
    NodeOrdering shuffle;
    NodeOrdering true_order;
};

/// Uniform random relabeling of the nodes (Fisher-Yates).
Shuffled shuffle_nodes(const Matrix& m, SeededRng& rng);

enum class Generator { Sbm, Dgm };
Generator parse_generator(const std::string& s);
const char* to_string(Generator g);

struct InstanceSpec {
    Generator generator = Generator::Dgm;
    int n = 120;
    double sigma = 0.05;
    bool directed = false;
    double outlier_p = 0.0;
    std::uint64_t seed = 0;
};

struct Instance {
    AdjacencyMatrix observed;
    /// Normalized matrix before shuffling.
    Matrix ordered;
    GroundTruth truth;
};

/// gen -> (outliers) -> (symmetrize, undirected only) -> normalize -> shuffle.
/// The mean matrix follows the same symmetrization and the normalization
/// constants taken from the realized matrix.
Instance make_instance(const InstanceSpec& spec);

} // namespace linlayout::synthetic
