#pragma once

#include <string>
#include <vector>

#include "linlayout/graph.hpp"

namespace linlayout::baselines {

struct SvdTriplets {
    std::vector<double> singular_values;
    std::vector<Eigen::VectorXd> left;
    std::vector<Eigen::VectorXd> right;
    std::vector<std::string> warnings;
};

struct PowerOptions {
    double tol = 1e-10;
    int max_iter = 10000;
};

/// Top-k singular triplets by power iteration on M^T M with deflation
/// (projection against the already-found right vectors). Each left vector
/// is sign-fixed so its largest-magnitude entry is positive.
/// Throws ConvergenceError if a triplet does not settle within max_iter.
SvdTriplets top_singular_triplets(const Matrix& m, int k, PowerOptions opts = {});

struct EigenPair {
    double value = 0.0;
    Eigen::VectorXd vector;
};

/// Eigenvector of the most positive eigenvalue of a symmetric matrix, by
/// power iteration (shifted when the dominant eigenvalue is negative).
/// Same sign convention as top_singular_triplets.
EigenPair top_eigenpair_symmetric(const Matrix& s, PowerOptions opts = {});

struct BaselineResult {
    NodeOrdering ordering;
    /// Per-node score the ordering sorts (angle for svd-angle).
    std::vector<double> scores;
    std::vector<std::string> warnings;
};

/// Ascending order of sqrt(lambda_1) * u_1.
BaselineResult svd_rank_one_order(const Matrix& a, PowerOptions opts = {});

struct SvdAngleWorkspace {
    Matrix centered;
    Matrix normalized;
    std::vector<double> angles;
    NodeOrdering angle_order;
    std::vector<double> gaps;
    int split = 0;
    NodeOrdering order;
};

/// Angle in [-pi/2, 3pi/2) of the point (x, y) = (u_i1, u_i2):
/// atan(y/x) + pi * [x <= 0], with x == 0 resolved geometrically.
double svd_angle(double x, double y);

/// Splits the circular sequence of sorted angles at the largest gap.
/// Returns the rotated order and fills `gaps` / `split` (0-based position).
NodeOrdering split_at_largest_gap(std::span<const double> angles, std::vector<double>* gaps = nullptr,
                                  int* split = nullptr);

BaselineResult svd_angle_order(const Matrix& a, PowerOptions opts = {},
                               SvdAngleWorkspace* workspace = nullptr);

struct MdsWorkspace {
    Matrix sq_dist;
    Matrix centered;
    double top_eigenvalue = 0.0;
    Eigen::VectorXd top_eigenvector;
};

/// Squared Euclidean distances between rows.
Matrix row_sq_distances(const Matrix& a);
/// -1/2 (I - Q/n) D (I - Q/n).
Matrix double_center(const Matrix& sq_dist);

BaselineResult mds_order(const Matrix& a, PowerOptions opts = {},
                         MdsWorkspace* workspace = nullptr);

enum class Method { SvdRankOne, SvdAngle, Mds };

Method parse_method(const std::string& name);
const char* to_string(Method m);
BaselineResult run(Method m, const Matrix& a, PowerOptions opts = {});

} // namespace linlayout::baselines
