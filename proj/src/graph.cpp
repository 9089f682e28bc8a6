#include "linlayout/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "linlayout/error.hpp"

namespace linlayout {

bool is_symmetric(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
            if (std::abs(m(i, j) - m(j, i)) > tol) return false;
        }
    }
    return true;
}

AdjacencyMatrix::AdjacencyMatrix(Matrix entries, bool directed)
    : entries_(std::move(entries)), directed_(directed) {
    if (entries_.rows() != entries_.cols()) {
        throw ShapeError("adjacency matrix must be square, got " +
                         std::to_string(entries_.rows()) + "x" + std::to_string(entries_.cols()));
    }
    if (!directed_ && !is_symmetric(entries_)) {
        throw DomainError("undirected adjacency matrix is not symmetric");
    }
}

AdjacencyMatrix AdjacencyMatrix::infer(Matrix entries) {
    const bool directed = !is_symmetric(entries);
    return AdjacencyMatrix(std::move(entries), directed);
}

bool AdjacencyMatrix::unit_interval() const {
    return entries_.size() == 0 || (entries_.minCoeff() >= 0.0 && entries_.maxCoeff() <= 1.0);
}

NodeOrdering::NodeOrdering(std::vector<int> perm) : perm_(std::move(perm)) {
    std::vector<char> seen(perm_.size(), 0);
    for (int p : perm_) {
        if (p < 0 || static_cast<std::size_t>(p) >= perm_.size() || seen[static_cast<std::size_t>(p)]) {
            throw DomainError("ordering is not a permutation of 0.." +
                              std::to_string(static_cast<long>(perm_.size()) - 1));
        }
        seen[static_cast<std::size_t>(p)] = 1;
    }
}

NodeOrdering NodeOrdering::identity(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    return NodeOrdering(std::move(p));
}

NodeOrdering NodeOrdering::inverse() const {
    std::vector<int> inv(perm_.size());
    for (std::size_t k = 0; k < perm_.size(); ++k) {
        inv[static_cast<std::size_t>(perm_[k])] = static_cast<int>(k);
    }
    return NodeOrdering(std::move(inv));
}

NodeOrdering compose(const NodeOrdering& outer, const NodeOrdering& inner) {
    if (outer.size() != inner.size()) {
        throw ShapeError("compose: orderings differ in size");
    }
    std::vector<int> p(static_cast<std::size_t>(inner.size()));
    for (int k = 0; k < inner.size(); ++k) {
        p[static_cast<std::size_t>(k)] = outer[inner[k]];
    }
    return NodeOrdering(std::move(p));
}

NodeOrdering order_by_scores(std::span<const double> scores) {
    for (double s : scores) {
        if (std::isnan(s)) {
            throw DomainError("order_by_scores: NaN feature value");
        }
    }
    std::vector<int> p(scores.size());
    std::iota(p.begin(), p.end(), 0);
    std::stable_sort(p.begin(), p.end(), [&](int a, int b) {
        return scores[static_cast<std::size_t>(a)] < scores[static_cast<std::size_t>(b)];
    });
    return NodeOrdering(std::move(p));
}

Matrix permute_matrix(const Matrix& m, const NodeOrdering& order) {
    if (m.rows() != m.cols() || m.rows() != order.size()) {
        throw ShapeError("permute_matrix: ordering size does not match matrix");
    }
    const int n = order.size();
    Matrix out(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out(i, j) = m(order[i], order[j]);
        }
    }
    return out;
}

AdjacencyMatrix permute_matrix(const AdjacencyMatrix& a, const NodeOrdering& order) {
    return AdjacencyMatrix(permute_matrix(a.entries(), order), a.directed());
}

NodeOrdering flip_order(const NodeOrdering& order) {
    std::vector<int> p(order.perm().rbegin(), order.perm().rend());
    return NodeOrdering(std::move(p));
}

double reordering_mse(const Matrix& true_mean, const NodeOrdering& order) {
    if (true_mean.rows() != true_mean.cols() || true_mean.rows() != order.size()) {
        throw ShapeError("graph_reordering_error: ordering size does not match mean matrix");
    }
    const int n = order.size();
    if (n == 0) return 0.0;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double d = true_mean(i, j) - true_mean(order[i], order[j]);
            s += d * d;
        }
    }
    return s / (static_cast<double>(n) * static_cast<double>(n));
}

ErrorReport graph_reordering_error(const Matrix& true_mean, const NodeOrdering& estimated) {
    const double direct = reordering_mse(true_mean, estimated);
    const double flipped = reordering_mse(true_mean, flip_order(estimated));
    if (flipped < direct) {
        return {flipped, true};
    }
    return {direct, false};
}

} // namespace linlayout
