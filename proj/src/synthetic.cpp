#include "linlayout/synthetic.hpp"

#include <numeric>
#include <string>
#include <utility>

#include "linlayout/error.hpp"

namespace linlayout::synthetic {

SbmParams SbmParams::reference(double sigma) {
    SbmParams p;
    p.block_means.resize(3, 3);
    p.block_means << 0.9, 0.1, 0.3,
                     0.4, 0.8, 0.2,
                     0.1, 0.3, 0.7;
    p.sigma = sigma;
    return p;
}

std::vector<int> sbm_assignments(int n, int clusters) {
    if (clusters < 1 || n < 1 || n % clusters != 0) {
        throw InvalidConfig("SBM needs n divisible by the cluster count (n=" + std::to_string(n) +
                            ", K=" + std::to_string(clusters) + ")");
    }
    const int per = n / clusters;
    std::vector<int> c(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = i / per;
    return c;
}

Matrix sbm_mean(int n, const SbmParams& params) {
    if (params.block_means.rows() != params.block_means.cols()) {
        throw InvalidConfig("SBM block-mean matrix must be square");
    }
    const std::vector<int> c = sbm_assignments(n, params.clusters());
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = params.block_means(c[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(j)]);
    return m;
}

namespace {

Matrix add_noise(Matrix mean, double sigma, SeededRng& rng) {
    if (!(sigma >= 0.0)) {
        throw InvalidConfig("noise standard deviation must be >= 0");
    }
    // Row-major draw order.
    for (Eigen::Index i = 0; i < mean.rows(); ++i)
        for (Eigen::Index j = 0; j < mean.cols(); ++j) mean(i, j) += sigma * rng.normal();
    return mean;
}

} // namespace

Matrix gen_sbm(int n, const SbmParams& params, SeededRng& rng) {
    return add_noise(sbm_mean(n, params), params.sigma, rng);
}

Matrix dgm_mean(int n, const DgmParams& params) {
    if (n < 2) {
        throw InvalidConfig("DGM needs n >= 2");
    }
    Matrix m(n, n);
    const double denom = 2.0 * n - 2.0;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            m(i - 1, j - 1) = params.high - params.range * static_cast<double>(n - 1 - i + j) / denom;
    return m;
}

Matrix gen_dgm(int n, const DgmParams& params, SeededRng& rng) {
    return add_noise(dgm_mean(n, params), params.sigma, rng);
}

Matrix symmetrize_upper(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw ShapeError("symmetrize_upper: matrix is not square");
    }
    Matrix out = m;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j) out(i, j) = m(j, i);
    return out;
}

UnitMap UnitMap::fit(const Matrix& m) {
    if (m.size() == 0 || !m.allFinite()) {
        throw DomainError("normalize: matrix must be non-empty and finite");
    }
    UnitMap map{m.minCoeff(), m.maxCoeff()};
    if (!(map.hi > map.lo)) {
        throw DomainError("normalize: constant matrix cannot be rescaled to [0,1]");
    }
    return map;
}

Matrix UnitMap::apply(const Matrix& m) const {
    const double span = hi - lo;
    return m.unaryExpr([&](double x) { return (x - lo) / span; });
}

Matrix normalize_unit_interval(const Matrix& m) {
    return UnitMap::fit(m).apply(m);
}

Matrix inject_outliers(const Matrix& m, double p, SeededRng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidConfig("outlier probability must lie in [0,1]");
    }
    Matrix out = m;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (rng.uniform() < p) out(i, j) = 0.0;
    return out;
}

NodeOrdering GroundTruth::to_true_labels(const NodeOrdering& observed_order) const {
    // Observed node k is unshuffled node true_order^{-1}[k].
    return compose(true_order.inverse(), observed_order);
}

ErrorReport GroundTruth::score(const NodeOrdering& observed_order) const {
    return graph_reordering_error(mean_matrix, to_true_labels(observed_order));
}

Shuffled shuffle_nodes(const Matrix& m, SeededRng& rng) {
    if (m.rows() != m.cols()) {
        throw ShapeError("shuffle_nodes: matrix is not square");
    }
    const int n = static_cast<int>(m.rows());
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = n - 1; k > 0; --k) {
        const auto r = static_cast<int>(rng.below(static_cast<std::uint64_t>(k) + 1));
        std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(r)]);
    }
    Shuffled s;
    s.shuffle = NodeOrdering(std::move(perm));
    s.matrix = permute_matrix(m, s.shuffle);
    s.true_order = s.shuffle.inverse();
    return s;
}

Generator parse_generator(const std::string& s) {
    if (s == "sbm") return Generator::Sbm;
    if (s == "dgm") return Generator::Dgm;
    throw InvalidConfig("unknown generator '" + s + "' (expected sbm or dgm)");
}

const char* to_string(Generator g) {
    return g == Generator::Sbm ? "sbm" : "dgm";
}

Instance make_instance(const InstanceSpec& spec) {
    SeededRng data_rng = SeededRng::derive(spec.seed, Stream::Data);
    SeededRng outlier_rng = SeededRng::derive(spec.seed, Stream::Outliers);
    SeededRng shuffle_rng = SeededRng::derive(spec.seed, Stream::Shuffle);

    Matrix mean;
    Matrix realized;
    if (spec.generator == Generator::Sbm) {
        const SbmParams params = SbmParams::reference(spec.sigma);
        mean = sbm_mean(spec.n, params);
        realized = gen_sbm(spec.n, params, data_rng);
    } else {
        const DgmParams params{spec.sigma};
        mean = dgm_mean(spec.n, params);
        realized = gen_dgm(spec.n, params, data_rng);
    }
    if (spec.outlier_p > 0.0) {
        realized = inject_outliers(realized, spec.outlier_p, outlier_rng);
    }
    if (!spec.directed) {
        realized = symmetrize_upper(realized);
        mean = symmetrize_upper(mean);
    }
    const UnitMap map = UnitMap::fit(realized);
    Instance inst;
    inst.ordered = map.apply(realized);
    inst.truth.mean_matrix = map.apply(mean);
    Shuffled s = shuffle_nodes(inst.ordered, shuffle_rng);
    inst.truth.true_order = s.true_order;
    // Symmetrization copies entries, so undirected data stays exactly symmetric.
    inst.observed = AdjacencyMatrix(std::move(s.matrix), spec.directed);
    return inst;
}

} // namespace linlayout::synthetic
