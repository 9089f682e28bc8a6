#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace linlayout {

using Matrix = Eigen::MatrixXd;

/// Dense n x n adjacency matrix. Undirected matrices are symmetric to 1e-12.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;
    AdjacencyMatrix(Matrix entries, bool directed);

    /// Directedness inferred from symmetry.
    static AdjacencyMatrix infer(Matrix entries);

    int n() const { return static_cast<int>(entries_.rows()); }
    bool directed() const { return directed_; }
    const Matrix& entries() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

    /// True when every entry lies in [0,1].
    bool unit_interval() const;

private:
    Matrix entries_;
    bool directed_ = false;
};

bool is_symmetric(const Matrix& m, double tol = 1e-12);

/// A permutation of {0..n-1}. Position k holds node perm[k]; the reordered
/// matrix is M'(k,l) = M(perm[k], perm[l]). Indices are 0-based internally;
/// file formats print them 1-based.
class NodeOrdering {
public:
    NodeOrdering() = default;
    /// Throws DomainError if `perm` is not a bijection.
    explicit NodeOrdering(std::vector<int> perm);

    static NodeOrdering identity(int n);

    int size() const { return static_cast<int>(perm_.size()); }
    int operator[](int position) const { return perm_[static_cast<std::size_t>(position)]; }
    const std::vector<int>& perm() const { return perm_; }

    NodeOrdering inverse() const;
    bool operator==(const NodeOrdering&) const = default;

private:
    std::vector<int> perm_;
};

/// (outer o inner)(k) = outer[inner[k]].
NodeOrdering compose(const NodeOrdering& outer, const NodeOrdering& inner);

/// Ascending sort of `scores`, ties kept in original index order.
/// Throws DomainError on NaN.
NodeOrdering order_by_scores(std::span<const double> scores);

Matrix permute_matrix(const Matrix& m, const NodeOrdering& order);
AdjacencyMatrix permute_matrix(const AdjacencyMatrix& a, const NodeOrdering& order);

/// k -> perm[n-1-k].
NodeOrdering flip_order(const NodeOrdering& order);

struct ErrorReport {
    double error = 0.0;
    bool used_flip = false;
};

/// Mean squared difference between the correctly ordered mean matrix and
/// its reordering by `estimated`, minimized over the order and its flip.
/// `estimated` must be expressed in the labels of `true_mean`.
ErrorReport graph_reordering_error(const Matrix& true_mean, const NodeOrdering& estimated);

/// Un-minimized mean squared difference for a single ordering.
double reordering_mse(const Matrix& true_mean, const NodeOrdering& order);

} // namespace linlayout
