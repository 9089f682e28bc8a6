// Acceptance gate: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion 3   run one

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "linlayout/autoll.hpp"
#include "linlayout/baselines.hpp"
#include "linlayout/bench.hpp"
#include "linlayout/io.hpp"
#include "linlayout/nn.hpp"
#include "linlayout/synthetic.hpp"
#include "oracles.hpp"

using namespace linlayout;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;
    std::function<Outcome()> run;
};

std::vector<double> row_major(const Matrix& m) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) v.push_back(m(i, j));
    return v;
}

oracle::Flat model_params(const autoll::AutoLLModel& m) {
    auto p = nn::flatten(m.encoder);
    const auto d = nn::flatten(m.decoder);
    p.insert(p.end(), d.begin(), d.end());
    return p;
}

oracle::Flat model_grads(const autoll::ModelGradients& g) {
    auto p = nn::flatten(g.encoder);
    const auto d = nn::flatten(g.decoder);
    p.insert(p.end(), d.begin(), d.end());
    return p;
}

// ---------------------------------------------------------------------------

Outcome gradient_suite() {
    const int n = 5;
    const int per_variant = 20;
    SeededRng rng(0x6ead);
    double worst = 0.0;
    double worst_abs = 0.0;
    int checked = 0;
    for (autoll::Variant v : {autoll::Variant::Undirected, autoll::Variant::Directed}) {
        for (int k = 0; k < per_variant; ++k) {
            Matrix m(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m(i, j) = rng.uniform();
            if (v == autoll::Variant::Undirected) m = synthetic::symmetrize_upper(m);
            const AdjacencyMatrix a(m, v == autoll::Variant::Directed);
            autoll::AutoLLModel model = autoll::init_model(n, v, autoll::TrainConfig{}, rng);
            for (auto& b : model.encoder.biases)
                for (int i = 0; i < b.size(); ++i) b(i) = rng.uniform(-0.5, 0.5);
            for (auto& b : model.decoder.biases)
                for (int i = 0; i < b.size(); ++i) b(i) = rng.uniform(-0.5, 0.5);
            std::vector<autoll::IndexPair> pairs;
            for (int p = 0; p < 12; ++p)
                pairs.emplace_back(static_cast<int>(rng.below(n)), static_cast<int>(rng.below(n)));
            const double lambda = k % 2 ? 1e-2 : nn::TrainHyper{}.lambda;

            const auto es = model.encoder.layer_sizes;
            const auto ds = model.decoder.layer_sizes;
            const std::size_t ne = model.encoder.parameter_count();
            auto objective = [&](const oracle::Flat& p) {
                const oracle::Flat enc(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(ne));
                const oracle::Flat dec(p.begin() + static_cast<std::ptrdiff_t>(ne), p.end());
                auto input = [&](int i) {
                    std::vector<double> x;
                    for (int j = 0; j < n; ++j) x.push_back(m(i, j));
                    if (v == autoll::Variant::Directed)
                        for (int r = 0; r < n; ++r) x.push_back(m(r, i));
                    return x;
                };
                double s = 0.0;
                for (const auto& [i, j] : pairs) {
                    const double zi = oracle::mlp(es, enc, input(i))[0];
                    const double zj = oracle::mlp(es, enc, input(j))[0];
                    s += oracle::bce(oracle::mlp(ds, dec, {zi, zj})[0], m(i, j));
                }
                return s / static_cast<double>(pairs.size()) +
                       lambda * (oracle::weight_sq(es, enc) + oracle::weight_sq(ds, dec));
            };
            const auto analytic = model_grads(autoll::batch_loss(model, a, pairs, lambda).grads);
            const auto numeric = oracle::central_diff(objective, model_params(model), 1e-5);
            worst = std::max(worst, oracle::rel_error_norm(analytic, numeric));
            for (std::size_t q = 0; q < analytic.size(); ++q)
                worst_abs = std::max(worst_abs, std::abs(analytic[q] - numeric[q]));
            ++checked;
        }
    }
    return {worst < 1e-4, fmt::format("{} instances (n={}, U and D, h=1e-5): max relative error "
                                      "|g - g_fd| / max(|g|, |g_fd|) = {:.3e} (< 1e-4); "
                                      "largest per-entry difference {:.1e}",
                                      checked, n, worst, worst_abs)};
}

Outcome brute_force_oracle() {
    const int n = 8;
    synthetic::InstanceSpec spec;
    spec.n = n;
    spec.sigma = 0.0;
    spec.directed = false;
    spec.seed = 8;
    const synthetic::Instance inst = synthetic::make_instance(spec);
    const auto mean = row_major(inst.truth.mean_matrix);

    // Exhaustive search over all 8! orders of the correctly laid-out mean.
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> zero_orders;
    long long total = 0;
    do {
        ++total;
        if (oracle::perm_mse(mean, n, p) == 0.0) zero_orders.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    std::vector<int> id(n), rev(n);
    std::iota(id.begin(), id.end(), 0);
    std::iota(rev.rbegin(), rev.rend(), 0);
    const bool oracle_ok =
        zero_orders.size() == 2 && std::find(zero_orders.begin(), zero_orders.end(), id) != zero_orders.end() &&
        std::find(zero_orders.begin(), zero_orders.end(), rev) != zero_orders.end();

    bool all = oracle_ok;
    std::string detail = fmt::format("exhaustive search: {} of {} orders give zero error ({}); ", zero_orders.size(),
                                     total, oracle_ok ? "true order and its flip" : "UNEXPECTED");
    for (auto m : {baselines::Method::SvdRankOne, baselines::Method::SvdAngle, baselines::Method::Mds}) {
        const auto order = baselines::run(m, inst.observed.entries()).ordering;
        const double err = inst.truth.score(order).error;
        const double check = oracle::min_flip_mse(mean, n, inst.truth.to_true_labels(order).perm());
        const bool ok = err < 1e-6 && check < 1e-6;
        all = all && ok;
        detail += fmt::format("{} {:.3e}{} ", baselines::to_string(m), err, ok ? "" : " (>= 1e-6)");
    }
    return {all, detail};
}

struct RecoveryTally {
    int hits = 0;
    std::vector<double> rho;
};

RecoveryTally recovery(autoll::Variant variant, int epochs) {
    RecoveryTally tally;
    for (int rep = 1; rep <= 5; ++rep) {
        synthetic::InstanceSpec spec;
        spec.n = 30;
        spec.sigma = 0.05;
        spec.directed = variant == autoll::Variant::Directed;
        spec.seed = bench::instance_seed(3, 1, rep);
        const synthetic::Instance inst = synthetic::make_instance(spec);
        autoll::TrainConfig tc;
        tc.epochs = epochs;
        const auto fit = autoll::train_with_restarts(inst.observed, variant, tc,
                                                     SeededRng::derive(3, 0xa070, 1, rep).next());
        const NodeOrdering est =
            autoll::order_from_features(autoll::extract_features(fit.best.model, inst.observed));
        const double rho = std::abs(
            oracle::spearman(inst.truth.to_true_labels(est).perm(), NodeOrdering::identity(30).perm()));
        tally.rho.push_back(rho);
        if (rho >= 0.95) ++tally.hits;
    }
    return tally;
}

std::string join_rho(const std::vector<double>& v) {
    std::string s;
    for (double r : v) s += fmt::format("{}{:.3f}", s.empty() ? "" : " ", r);
    return s;
}

Outcome autoll_recovery() {
    // The default budget is T=200 at n=120, i.e. ceil(200 * 120^2 / 200) = 14400
    // iterations. At n=30 the same budget needs T = 200 * (120/30)^2.
    const int scaled_epochs = 200 * (120 / 30) * (120 / 30);
    const RecoveryTally u = recovery(autoll::Variant::Undirected, scaled_epochs);
    const RecoveryTally d = recovery(autoll::Variant::Directed, scaled_epochs);
    const RecoveryTally u_literal = recovery(autoll::Variant::Undirected, 200);
    return {u.hits >= 4 && d.hits >= 4,
            fmt::format("T={} (14400 iterations): AutoLL-U {}/5 [{}], AutoLL-D {}/5 [{}] with |rho| >= 0.95; "
                        "for reference AutoLL-U at T=200 (900 iterations): {}/5",
                        scaled_epochs, u.hits, join_rho(u.rho), d.hits, join_rho(d.rho), u_literal.hits)};
}

Outcome compare_to_baselines(bench::SweepConfig cfg, const std::vector<std::pair<int, int>>& t_ranges,
                             std::string& detail) {
    bool ok = true;
    for (bool directed : {false, true}) {
        cfg.directed = directed;
        for (const auto& [lo, hi] : t_ranges) {
            cfg.t_min = lo;
            cfg.t_max = hi;
            const auto rows = bench::run_benchmark(cfg);
            for (const auto& r : rows) {
                if (std::isnan(r.error)) {
                    ok = false;
                    detail += fmt::format("[{} t={} trial {} failed: {}] ", r.method, r.t, r.trial, r.failure);
                }
            }
            const auto means = bench::mean_errors(rows);
            for (int t = lo; t <= hi; ++t) {
                const auto find = [&](const std::string& m) {
                    const auto it = means.find({m, t});
                    return it == means.end() ? std::nan("") : it->second;
                };
                const double mine = find("autoll");
                detail += fmt::format("{} t={}: autoll {:.5f}", directed ? "D" : "U", t, mine);
                for (const char* b : {"svd-rank-one", "svd-angle", "mds"}) {
                    const double other = find(b);
                    const bool good = mine <= other + 0.002;
                    ok = ok && good;
                    detail += fmt::format(", {} {:.5f}{}", b, other, good ? "" : "(!)");
                }
                detail += "; ";
            }
        }
    }
    return {ok, detail};
}

Outcome comparative_trend() {
    bench::SweepConfig cfg;
    cfg.n = 60;
    cfg.trials = 5;
    cfg.seed = 4;
    std::string detail;
    return compare_to_baselines(cfg, {{1, 1}, {4, 4}}, detail);
}

Outcome outlier_trend() {
    bench::SweepConfig cfg;
    cfg.n = 60;
    cfg.trials = 5;
    cfg.seed = 5;
    cfg.sweep = bench::Sweep::Outlier;
    cfg.base_sigma = 0.03;
    cfg.outlier_step = 0.05;
    std::string detail = "sigma=0.03, outlier rate 0.05: ";
    return compare_to_baselines(cfg, {{1, 1}}, detail);
}

Outcome metric_identities() {
    SeededRng rng(6);
    bool ok = true;
    int cases = 0;
    for (bool directed : {false, true}) {
        for (int n : {2, 5, 17, 60}) {
            synthetic::InstanceSpec spec;
            spec.n = n;
            spec.directed = directed;
            spec.seed = rng.next();
            const Matrix b = synthetic::make_instance(spec).truth.mean_matrix;
            ok = ok && graph_reordering_error(b, NodeOrdering::identity(n)).error == 0.0;
            for (int k = 0; k < 20; ++k) {
                std::vector<int> p(static_cast<std::size_t>(n));
                std::iota(p.begin(), p.end(), 0);
                for (int i = n - 1; i > 0; --i)
                    std::swap(p[static_cast<std::size_t>(i)], p[rng.below(static_cast<std::uint64_t>(i) + 1)]);
                const NodeOrdering o(p);
                ok = ok && graph_reordering_error(b, o).error == graph_reordering_error(b, flip_order(o)).error;
                ok = ok && permute_matrix(permute_matrix(b, o), o.inverse()) == b;
                ++cases;
            }
        }
    }
    return {ok, fmt::format("identity error 0, flip invariance and inverse round trip exact on {} random orders",
                            cases)};
}

Outcome unit_checks() {
    std::vector<std::string> failed;
    auto expect = [&](bool c, const char* what) {
        if (!c) failed.emplace_back(what);
    };
    const double ln2 = std::log(2.0);
    expect(std::abs(nn::bce_loss(0.5, 0.0) - ln2) < 1e-15, "BCE(0.5,0)");
    expect(std::abs(nn::bce_loss(0.5, 1.0) - ln2) < 1e-15, "BCE(0.5,1)");

    for (int n : {2, 3, 30, 120}) {
        const Matrix m = synthetic::dgm_mean(n);
        for (int i = 0; i < n; ++i) expect(std::abs(m(i, i) - 0.5) < 1e-15, "DGM diagonal");
        expect(std::abs(m(0, n - 1) - 0.1) < 1e-15, "DGM corner (1,n)");
        expect(std::abs(m(n - 1, 0) - 0.9) < 1e-15, "DGM corner (n,1)");
    }

    const double blocks[3][3] = {{0.9, 0.1, 0.3}, {0.4, 0.8, 0.2}, {0.1, 0.3, 0.7}};
    const Matrix s = synthetic::sbm_mean(9, synthetic::SbmParams::reference());
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) expect(s(i, j) == blocks[i / 3][j / 3], "SBM block mean");

    SeededRng rng(7);
    for (int k = 0; k < 5; ++k) {
        const Matrix g = synthetic::gen_dgm(20, synthetic::DgmParams{0.2}, rng);
        const Matrix u = synthetic::normalize_unit_interval(g);
        expect(u.minCoeff() == 0.0 && u.maxCoeff() == 1.0, "normalization attains {0,1}");
    }

    autoll::TrainConfig cfg;
    expect(autoll::total_iterations(120LL * 120, cfg) == 14400, "iterations n=120");
    for (int n : {5, 7, 13}) {
        for (int batch : {7, 200}) {
            cfg.epochs = 3;
            cfg.batch_size = batch;
            const long long expected = (3LL * n * n + batch - 1) / batch;
            expect(autoll::total_iterations(static_cast<long long>(n) * n, cfg) == expected, "ceil(T n^2 / |I|)");
        }
    }
    synthetic::InstanceSpec spec;
    spec.n = 7;
    cfg.batch_size = 10;
    cfg.epochs = 3;
    const auto fit = autoll::train(synthetic::make_instance(spec).observed, cfg);
    expect(fit.loss_history.size() == 15, "loss history length");

    std::string detail = "BCE ln 2, DGM means, SBM block means, normalization, iteration count";
    for (const auto& f : failed) detail += "; failed: " + f;
    return {failed.empty(), detail};
}

Outcome determinism() {
    bench::SweepConfig cfg;
    cfg.n = 16;
    cfg.t_max = 2;
    cfg.trials = 2;
    cfg.restarts = 2;
    cfg.epochs = 10;
    cfg.last_window = 20;
    cfg.seed = 8;
    const std::string a = bench::to_csv(bench::run_benchmark(cfg));
    const std::string b = bench::to_csv(bench::run_benchmark(cfg));
    const bool csv_same = a == b;

    synthetic::InstanceSpec spec;
    spec.n = 20;
    spec.directed = true;
    spec.seed = 8;
    const auto inst = synthetic::make_instance(spec);
    autoll::TrainConfig tc;
    tc.epochs = 20;
    tc.seed = 8;
    io::Checkpoint ck;
    ck.model = autoll::train(inst.observed, tc).model;
    const auto path = std::filesystem::temp_directory_path() / "linlayout_acceptance_ck.json";
    io::save_checkpoint(ck, path);
    const io::Checkpoint back = io::load_checkpoint(path);
    std::filesystem::remove(path);
    const auto z1 = autoll::extract_features(ck.model, inst.observed);
    const auto z2 = autoll::extract_features(back.model, inst.observed);
    bool bit_exact = z1.size() == z2.size();
    for (std::size_t i = 0; bit_exact && i < z1.size(); ++i) {
        bit_exact = std::memcmp(&z1[i], &z2[i], sizeof(double)) == 0;
    }
    return {csv_same && bit_exact,
            fmt::format("bench CSV ({} bytes) {}; checkpoint features {}", a.size(),
                        csv_same ? "byte-identical" : "DIFFERS", bit_exact ? "bit-exact" : "DIFFER")};
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }

    const std::vector<Criterion> criteria{
        {1, "gradient suite", 10.0, gradient_suite},
        {2, "brute-force oracle at n=8", 30.0, brute_force_oracle},
        {3, "AutoLL recovery", 600.0, autoll_recovery},
        {4, "comparative trend", 1800.0, comparative_trend},
        {5, "outlier robustness trend", 900.0, outlier_trend},
        {6, "metric identities", 1.0, metric_identities},
        {7, "unit checks", 1.0, unit_checks},
        {8, "determinism", 60.0, determinism},
    };

    int failures = 0;
    bool ran = false;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        ran = true;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.time_limit_s;
        const bool pass = out.pass && in_time;
        if (!pass) ++failures;
        std::printf("%s criterion %d (%s): %s [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    out.detail.c_str(), secs, c.time_limit_s, in_time ? "" : ", EXCEEDED");
        std::fflush(stdout);
    }
    if (!ran) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
