#include "linlayout/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "linlayout/error.hpp"
#include "linlayout/rng.hpp"

namespace linlayout::baselines {

namespace {

using Vec = Eigen::VectorXd;

constexpr std::uint64_t kStartSeed = 0x5eedULL;

// Plain loops with a fixed summation order: identical rows give bit-identical
// outputs, which keeps tie-breaking on exact ties deterministic.
Vec matvec(const Matrix& m, const Vec& v) {
    Vec out(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < m.cols(); ++j) s += m(i, j) * v(j);
        out(i) = s;
    }
    return out;
}

Matrix gram(const Matrix& m) {
    const Eigen::Index c = m.cols();
    Matrix g(c, c);
    for (Eigen::Index a = 0; a < c; ++a) {
        for (Eigen::Index b = a; b < c; ++b) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < m.rows(); ++k) s += m(k, a) * m(k, b);
            g(a, b) = s;
            g(b, a) = s;
        }
    }
    return g;
}

Vec start_vector(Eigen::Index n, std::uint64_t salt) {
    SeededRng rng = SeededRng::derive(kStartSeed, static_cast<std::uint64_t>(Stream::Solver), salt);
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(-1.0, 1.0);
    return v;
}

void project_out(Vec& v, const std::vector<Vec>& basis) {
    for (const Vec& b : basis) v -= v.dot(b) * b;
}

/// Makes the largest-magnitude entry (first on ties) positive; returns the
/// sign applied.
double fix_sign(Vec& u) {
    if (u.size() == 0) return 1.0;
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < u.size(); ++i) {
        if (std::abs(u(i)) > std::abs(u(arg))) arg = i;
    }
    if (u(arg) < 0.0) {
        u = -u;
        return -1.0;
    }
    return 1.0;
}

double max_abs_row_sum(const Matrix& s) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < s.rows(); ++i) best = std::max(best, s.row(i).cwiseAbs().sum());
    return best;
}

struct PowerOutcome {
    Vec vector;
    double rayleigh = 0.0;
    bool converged = false;
    bool null = false;
    double residual = 0.0;
};

/// Power iteration on (s + shift*I), restricted to the complement of `basis`.
PowerOutcome power_iterate(const Matrix& s, double shift, const std::vector<Vec>& basis,
                           const PowerOptions& opts, std::uint64_t salt) {
    const Eigen::Index n = s.rows();
    const double scale = std::max(max_abs_row_sum(s), 1e-300);
    PowerOutcome out;
    Vec v = start_vector(n, salt);
    project_out(v, basis);
    double norm = v.norm();
    if (norm == 0.0) {
        out.null = true;
        out.vector = v;
        return out;
    }
    v /= norm;
    for (int it = 0; it < opts.max_iter; ++it) {
        Vec w = matvec(s, v) + shift * v;
        project_out(w, basis);
        norm = w.norm();
        if (norm <= 1e-14 * (scale + std::abs(shift))) {
            out.null = true;
            out.vector = v;
            return out;
        }
        w /= norm;
        const double change = (w - v).norm();
        v = std::move(w);
        if (change < opts.tol) {
            out.converged = true;
            break;
        }
    }
    const Vec sv = matvec(s, v);
    out.rayleigh = v.dot(sv);
    out.residual = (sv - out.rayleigh * v).norm();
    out.vector = std::move(v);
    return out;
}

Vec unit_complement(Eigen::Index n, const std::vector<Vec>& basis, std::uint64_t salt) {
    Vec u = start_vector(n, salt);
    project_out(u, basis);
    project_out(u, basis);
    const double norm = u.norm();
    if (norm > 0.0) u /= norm;
    return u;
}

} // namespace

SvdTriplets top_singular_triplets(const Matrix& m, int k, PowerOptions opts) {
    if (k < 0 || k > std::min(m.rows(), m.cols())) {
        throw ShapeError("top_singular_triplets: k=" + std::to_string(k) +
                         " exceeds the smaller matrix dimension");
    }
    if (!(opts.tol > 0.0) || opts.max_iter < 1) {
        throw InvalidConfig("top_singular_triplets: tol must be > 0 and max_iter >= 1");
    }
    SvdTriplets out;
    const Matrix g = gram(m);
    for (int t = 0; t < k; ++t) {
        PowerOutcome p = power_iterate(g, 0.0, out.right, opts, static_cast<std::uint64_t>(t));
        if (!p.null && !p.converged) {
            throw ConvergenceError("power iteration for singular triplet " + std::to_string(t + 1) +
                                       " did not converge (residual " + std::to_string(p.residual) + ")",
                                   p.residual);
        }
        Vec v = std::move(p.vector);
        Vec mv = matvec(m, v);
        double sigma = mv.norm();
        Vec u;
        if (p.null || sigma == 0.0) {
            sigma = 0.0;
            u = unit_complement(m.rows(), out.left, 1000 + static_cast<std::uint64_t>(t));
            out.warnings.push_back("rank-deficient matrix: singular value " + std::to_string(t + 1) +
                                   " is zero");
        } else {
            u = mv / sigma;
        }
        if (fix_sign(u) < 0.0) v = -v;
        out.singular_values.push_back(sigma);
        out.left.push_back(std::move(u));
        out.right.push_back(std::move(v));
    }
    return out;
}

EigenPair top_eigenpair_symmetric(const Matrix& s, PowerOptions opts) {
    if (s.rows() != s.cols()) {
        throw ShapeError("top_eigenpair_symmetric: matrix is not square");
    }
    const std::vector<Vec> none;
    PowerOutcome p = power_iterate(s, 0.0, none, opts, 0);
    if (p.null) {
        return {0.0, unit_complement(s.rows(), none, 0)};
    }
    if (!p.converged || p.rayleigh < 0.0) {
        // Shifting by the row-sum bound makes the spectrum non-negative, so
        // the dominant eigenvalue of s + c*I is the most positive one of s.
        const double shift = max_abs_row_sum(s);
        p = power_iterate(s, shift, none, opts, 0);
        if (!p.converged) {
            throw ConvergenceError("symmetric power iteration did not converge (residual " +
                                       std::to_string(p.residual) + ")",
                                   p.residual);
        }
    }
    EigenPair out{p.rayleigh, std::move(p.vector)};
    fix_sign(out.vector);
    return out;
}

BaselineResult svd_rank_one_order(const Matrix& a, PowerOptions opts) {
    if (a.rows() != a.cols()) {
        throw ShapeError("svd_rank_one_order: matrix is not square");
    }
    BaselineResult r;
    if (a.rows() == 0) return r;
    SvdTriplets svd = top_singular_triplets(a, 1, opts);
    const double scale = std::sqrt(svd.singular_values[0]);
    r.scores.resize(static_cast<std::size_t>(a.rows()));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        r.scores[static_cast<std::size_t>(i)] = scale * svd.left[0](i);
    }
    r.ordering = order_by_scores(r.scores);
    r.warnings = std::move(svd.warnings);
    return r;
}

double svd_angle(double x, double y) {
    constexpr double pi = std::numbers::pi;
    if (x == 0.0) {
        if (y > 0.0) return pi / 2.0;
        if (y < 0.0) return -pi / 2.0;
        return pi;
    }
    return std::atan(y / x) + (x < 0.0 ? pi : 0.0);
}

NodeOrdering split_at_largest_gap(std::span<const double> angles, std::vector<double>* gaps,
                                  int* split) {
    const NodeOrdering sorted = order_by_scores(angles);
    const int n = sorted.size();
    std::vector<double> d(static_cast<std::size_t>(n));
    int best = 0;
    for (int k = 0; k < n; ++k) {
        const double cur = angles[static_cast<std::size_t>(sorted[k])];
        const double prev = angles[static_cast<std::size_t>(sorted[(k + n - 1) % n])];
        d[static_cast<std::size_t>(k)] = k == 0 ? 2.0 * std::numbers::pi + cur - prev : cur - prev;
        if (d[static_cast<std::size_t>(k)] > d[static_cast<std::size_t>(best)]) best = k;
    }
    std::vector<int> perm;
    perm.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) perm.push_back(sorted[(best + k) % n]);
    if (gaps) *gaps = std::move(d);
    if (split) *split = best;
    return NodeOrdering(std::move(perm));
}

BaselineResult svd_angle_order(const Matrix& a, PowerOptions opts, SvdAngleWorkspace* workspace) {
    if (a.rows() != a.cols()) {
        throw ShapeError("svd_angle_order: matrix is not square");
    }
    const Eigen::Index n = a.rows();
    BaselineResult r;
    SvdAngleWorkspace ws;
    ws.centered = a.colwise() - a.rowwise().mean();
    ws.normalized = ws.centered;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rms = std::sqrt(ws.centered.row(i).squaredNorm() / static_cast<double>(n));
        // A constant row need not center to exact zeros, so test it directly.
        const bool constant = (a.row(i).array() == a(i, 0)).all();
        if (constant || rms == 0.0) {
            ws.normalized.row(i).setZero();
            r.warnings.push_back("row " + std::to_string(i + 1) + " is constant; left as zeros");
        } else {
            ws.normalized.row(i) /= rms;
        }
    }
    if (n < 2) {
        ws.angles.assign(static_cast<std::size_t>(n), 0.0);
    } else {
        SvdTriplets svd = top_singular_triplets(ws.normalized, 2, opts);
        r.warnings.insert(r.warnings.end(), svd.warnings.begin(), svd.warnings.end());
        ws.angles.resize(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            ws.angles[static_cast<std::size_t>(i)] = svd_angle(svd.left[0](i), svd.left[1](i));
        }
    }
    ws.angle_order = order_by_scores(ws.angles);
    ws.order = split_at_largest_gap(ws.angles, &ws.gaps, &ws.split);
    r.ordering = ws.order;
    r.scores = ws.angles;
    if (workspace) *workspace = std::move(ws);
    return r;
}

Matrix row_sq_distances(const Matrix& a) {
    const Eigen::Index n = a.rows();
    Matrix d = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = i + 1; k < n; ++k) {
            double s = 0.0;
            for (Eigen::Index j = 0; j < a.cols(); ++j) {
                const double diff = a(i, j) - a(k, j);
                s += diff * diff;
            }
            d(i, k) = s;
            d(k, i) = s;
        }
    }
    return d;
}

Matrix double_center(const Matrix& sq_dist) {
    const Eigen::Index n = sq_dist.rows();
    if (n == 0) return sq_dist;
    const Eigen::VectorXd row_mean = sq_dist.rowwise().mean();
    const Eigen::RowVectorXd col_mean = sq_dist.colwise().mean();
    const double grand = sq_dist.mean();
    Matrix b(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            b(i, j) = -0.5 * (sq_dist(i, j) - row_mean(i) - col_mean(j) + grand);
        }
    }
    return b;
}

BaselineResult mds_order(const Matrix& a, PowerOptions opts, MdsWorkspace* workspace) {
    if (a.rows() != a.cols()) {
        throw ShapeError("mds_order: matrix is not square");
    }
    const Eigen::Index n = a.rows();
    BaselineResult r;
    MdsWorkspace ws;
    ws.sq_dist = row_sq_distances(a);
    ws.centered = double_center(ws.sq_dist);
    if (n == 0 || ws.centered.cwiseAbs().maxCoeff() == 0.0) {
        r.warnings.push_back("degenerate features: all rows identical, centered matrix is zero");
        ws.top_eigenvector = Eigen::VectorXd::Zero(n);
    } else {
        EigenPair top = top_eigenpair_symmetric(ws.centered, opts);
        ws.top_eigenvalue = top.value;
        ws.top_eigenvector = std::move(top.vector);
    }
    r.scores.assign(ws.top_eigenvector.data(), ws.top_eigenvector.data() + n);
    r.ordering = order_by_scores(r.scores);
    if (workspace) *workspace = std::move(ws);
    return r;
}

Method parse_method(const std::string& name) {
    if (name == "svd-rank-one") return Method::SvdRankOne;
    if (name == "svd-angle") return Method::SvdAngle;
    if (name == "mds") return Method::Mds;
    throw InvalidConfig("unknown baseline method '" + name + "'");
}

const char* to_string(Method m) {
    switch (m) {
    case Method::SvdRankOne: return "svd-rank-one";
    case Method::SvdAngle: return "svd-angle";
    case Method::Mds: return "mds";
    }
    return "?";
}

BaselineResult run(Method m, const Matrix& a, PowerOptions opts) {
    switch (m) {
    case Method::SvdRankOne: return svd_rank_one_order(a, opts);
    case Method::SvdAngle: return svd_angle_order(a, opts);
    case Method::Mds: return mds_order(a, opts);
    }
    throw InvalidConfig("unknown baseline method");
}

} // namespace linlayout::baselines
