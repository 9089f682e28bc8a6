#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "linlayout/error.hpp"
#include "linlayout/graph.hpp"
#include "linlayout/rng.hpp"
#include "oracles.hpp"

using namespace linlayout;

namespace {

Matrix from_row_major(const std::vector<double>& v, int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = v[static_cast<std::size_t>(i * n + j)];
    return m;
}

NodeOrdering random_order(int n, SeededRng& rng) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        std::swap(p[static_cast<std::size_t>(i)], p[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    }
    return NodeOrdering(p);
}

} // namespace

TEST_CASE("AdjacencyMatrix validation") {
    Matrix sym(2, 2);
    sym << 0, 1, 1, 0;
    CHECK_FALSE(AdjacencyMatrix(sym, false).directed());
    CHECK_FALSE(AdjacencyMatrix::infer(sym).directed());

    Matrix asym(2, 2);
    asym << 0, 1, 0, 0;
    CHECK(AdjacencyMatrix::infer(asym).directed());
    CHECK_THROWS_AS(AdjacencyMatrix(asym, false), DomainError);
    CHECK(AdjacencyMatrix(asym, true).directed());

    Matrix near = sym;
    near(0, 1) += 1e-13;
    CHECK_FALSE(AdjacencyMatrix::infer(near).directed());

    CHECK_THROWS_AS(AdjacencyMatrix(Matrix::Zero(2, 3), true), ShapeError);

    CHECK(AdjacencyMatrix(sym, false).unit_interval());
    CHECK_FALSE(AdjacencyMatrix(2.0 * sym, false).unit_interval());
}

TEST_CASE("NodeOrdering rejects non-bijections") {
    CHECK_THROWS_AS(NodeOrdering({0, 0, 1}), DomainError);
    CHECK_THROWS_AS(NodeOrdering({0, 3, 1}), DomainError);
    CHECK_THROWS_AS(NodeOrdering({-1, 0}), DomainError);
    const NodeOrdering ok({2, 0, 1});
    CHECK(ok.inverse().perm() == std::vector<int>{1, 2, 0});
    CHECK(compose(ok, ok.inverse()) == NodeOrdering::identity(3));
    CHECK(compose(ok.inverse(), ok) == NodeOrdering::identity(3));
}

TEST_CASE("permute_matrix examples") {
    Matrix m(2, 2);
    m << 1, 2, 3, 4;
    CHECK(permute_matrix(m, NodeOrdering::identity(2)) == m);
    Matrix expected(2, 2);
    expected << 4, 3, 2, 1;
    CHECK(permute_matrix(m, NodeOrdering({1, 0})) == expected);
    CHECK_THROWS_AS(permute_matrix(m, NodeOrdering::identity(3)), ShapeError);
}

TEST_CASE("permute_matrix round trip and composition") {
    SeededRng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(12));
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rng.uniform();
        const NodeOrdering p = random_order(n, rng);
        const NodeOrdering q = random_order(n, rng);
        CHECK(permute_matrix(permute_matrix(m, p), p.inverse()) == m);
        // Reordering by p then by q picks original node p[q[k]] at position k.
        CHECK(permute_matrix(permute_matrix(m, p), q) == permute_matrix(m, compose(p, q)));
    }
}

TEST_CASE("flip_order examples") {
    CHECK(flip_order(NodeOrdering::identity(3)).perm() == std::vector<int>{2, 1, 0});
    CHECK(flip_order(NodeOrdering::identity(1)) == NodeOrdering::identity(1));
    SeededRng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const NodeOrdering p = random_order(9, rng);
        CHECK(flip_order(flip_order(p)) == p);
    }
}

TEST_CASE("order_by_scores: ascending, stable, NaN rejected") {
    const std::vector<double> s{0.5, -1.0, 0.5, 0.0};
    CHECK(order_by_scores(s).perm() == std::vector<int>{1, 3, 0, 2});
    const std::vector<double> bad{0.0, std::nan("")};
    CHECK_THROWS_AS(order_by_scores(bad), DomainError);
}

TEST_CASE("graph_reordering_error examples") {
    const Matrix dir = from_row_major(oracle::dgm_mean(6, true), 6);
    const ErrorReport id = graph_reordering_error(dir, NodeOrdering::identity(6));
    CHECK(id.error == 0.0);
    CHECK_FALSE(id.used_flip);

    const ErrorReport fl = graph_reordering_error(dir, flip_order(NodeOrdering::identity(6)));
    CHECK(fl.error == 0.0);
    CHECK(fl.used_flip);

    CHECK_THROWS_AS(graph_reordering_error(dir, NodeOrdering::identity(5)), ShapeError);
}

TEST_CASE("graph_reordering_error on 3 nodes matches brute force over both candidates") {
    for (bool directed : {false, true}) {
        const auto mean = oracle::dgm_mean(3, directed);
        const Matrix b = from_row_major(mean, 3);
        const std::vector<int> p{1, 0, 2};
        const ErrorReport r = graph_reordering_error(b, NodeOrdering(p));
        CHECK(r.error == doctest::Approx(oracle::min_flip_mse(mean, 3, p)).epsilon(1e-15));
        CHECK(r.error > 0.0);
        CHECK(reordering_mse(b, NodeOrdering(p)) == doctest::Approx(oracle::perm_mse(mean, 3, p)).epsilon(1e-15));
    }
}

TEST_CASE("graph_reordering_error properties on random orders") {
    SeededRng rng(99);
    for (bool directed : {false, true}) {
        const int n = 10;
        const auto mean = oracle::dgm_mean(n, directed);
        const Matrix b = from_row_major(mean, n);
        for (int trial = 0; trial < 25; ++trial) {
            const NodeOrdering p = random_order(n, rng);
            const ErrorReport r = graph_reordering_error(b, p);
            CHECK(r.error == graph_reordering_error(b, flip_order(p)).error);
            CHECK(r.error == doctest::Approx(oracle::min_flip_mse(mean, n, p.perm())).epsilon(1e-14));
            CHECK(r.error >= 0.0);
        }
    }
}

TEST_CASE("graph_reordering_error ignores swaps of identical nodes") {
    // Block-constant means: nodes 0,1 and 2,3 are interchangeable.
    Matrix b(4, 4);
    b << 0.9, 0.9, 0.1, 0.1, 0.9, 0.9, 0.1, 0.1, 0.4, 0.4, 0.8, 0.8, 0.4, 0.4, 0.8, 0.8;
    CHECK(graph_reordering_error(b, NodeOrdering({1, 0, 3, 2})).error == 0.0);
    CHECK(graph_reordering_error(b, NodeOrdering({0, 2, 1, 3})).error > 0.0);
}
