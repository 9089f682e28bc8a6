// linlayout: reorder adjacency matrices with AutoLL or spectral baselines.
//
//   linlayout generate --model dgm --n 120 --sigma 0.05 --seed 1 --out a.csv
//   linlayout reorder  --input a.csv --out-prefix run/a
//   linlayout baseline --method mds --input a.csv --out-prefix run/a_mds
//   linlayout bench    --config sweep.cfg --out results.csv

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "linlayout/autoll.hpp"
#include "linlayout/baselines.hpp"
#include "linlayout/bench.hpp"
#include "linlayout/error.hpp"
#include "linlayout/io.hpp"
#include "linlayout/synthetic.hpp"

namespace fs = std::filesystem;
using namespace linlayout;

namespace {

struct LoadedInput {
    AdjacencyMatrix raw;
    std::vector<std::string> labels;
};

bool looks_like_csv(const fs::path& p) {
    return p.extension() == ".csv";
}

LoadedInput load_input(const fs::path& path, std::optional<bool> directed) {
    if (looks_like_csv(path)) {
        AdjacencyMatrix a = io::load_matrix_csv(path, directed);
        return {a, io::default_labels(a.n())};
    }
    const io::EdgeList edges = io::load_edge_list(path, directed.value_or(false));
    return {edges.to_adjacency(), edges.labels};
}

AdjacencyMatrix normalized(const AdjacencyMatrix& a) {
    return AdjacencyMatrix(synthetic::normalize_unit_interval(a.entries()), a.directed());
}

void ensure_parent(const fs::path& prefix) {
    if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
}

fs::path with_suffix(const fs::path& prefix, const std::string& suffix) {
    return fs::path(prefix.string() + suffix);
}

void warn_all(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph seriation: AutoLL neural reordering and spectral baselines"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Sample a synthetic SBM or DGM adjacency matrix");
    std::string gen_model = "dgm";
    int gen_n = 120;
    double gen_sigma = 0.05;
    bool gen_directed = false;
    double gen_outlier = 0.0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    std::string gen_truth;
    gen->add_option("--model", gen_model, "sbm or dgm")->check(CLI::IsMember({"sbm", "dgm"}));
    gen->add_option("--n", gen_n, "node count");
    gen->add_option("--sigma", gen_sigma, "noise standard deviation");
    gen->add_flag("--directed", gen_directed, "skip symmetrization");
    gen->add_option("--outlier-p", gen_outlier, "probability of zeroing each entry");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--out", gen_out, "output matrix CSV")->required();
    gen->add_option("--truth-prefix", gen_truth,
                    "also write <prefix>_mean.csv and <prefix>_true_order.csv");

    // reorder
    auto* reo = app.add_subcommand("reorder", "Train AutoLL on a matrix and reorder it");
    std::string reo_input;
    std::string reo_variant;
    bool reo_directed = false;
    autoll::TrainConfig tc;
    std::uint64_t reo_seed = 0;
    int reo_undersample = 0;
    int reo_scale = 4;
    std::string reo_prefix;
    reo->add_option("--input", reo_input, "matrix .csv or whitespace edge list")->required();
    reo->add_option("--variant", reo_variant, "u or d (default: from matrix symmetry)");
    reo->add_flag("--directed", reo_directed, "treat an edge list as directed");
    reo->add_option("--epochs", tc.epochs, "epochs T");
    reo->add_option("--batch", tc.batch_size, "minibatch size");
    reo->add_option("--restarts", tc.restarts, "independent training runs; best kept");
    reo->add_option("--seed", reo_seed, "base seed");
    reo->add_option("--undersample-mult", reo_undersample,
                    "train on nonzero pairs plus this many zero pairs per nonzero (0 = off)");
    reo->add_option("--scale", reo_scale, "heatmap pixels per entry");
    reo->add_option("--out-prefix", reo_prefix, "output path prefix")->required();

    // baseline
    auto* base = app.add_subcommand("baseline", "Reorder with a spectral baseline");
    std::string base_method;
    std::string base_input;
    std::string base_prefix;
    bool base_directed = false;
    int base_scale = 4;
    base->add_option("--method", base_method, "svd-rank-one, svd-angle or mds")
        ->required()
        ->check(CLI::IsMember({"svd-rank-one", "svd-angle", "mds"}));
    base->add_option("--input", base_input, "matrix .csv or whitespace edge list")->required();
    base->add_flag("--directed", base_directed, "treat an edge list as directed");
    base->add_option("--scale", base_scale, "heatmap pixels per entry");
    base->add_option("--out-prefix", base_prefix, "output path prefix")->required();

    // bench
    auto* ben = app.add_subcommand("bench", "Run a parameter sweep and write per-trial errors");
    std::string ben_config;
    std::string ben_out;
    ben->add_option("--config", ben_config, "key=value sweep file")->required();
    ben->add_option("--out", ben_out, "results CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            synthetic::InstanceSpec spec;
            spec.generator = synthetic::parse_generator(gen_model);
            spec.n = gen_n;
            spec.sigma = gen_sigma;
            spec.directed = gen_directed;
            spec.outlier_p = gen_outlier;
            spec.seed = gen_seed;
            const synthetic::Instance inst = synthetic::make_instance(spec);
            ensure_parent(gen_out);
            io::write_matrix_csv(gen_out, inst.observed.entries());
            if (!gen_truth.empty()) {
                ensure_parent(gen_truth);
                io::write_matrix_csv(with_suffix(gen_truth, "_mean.csv"), inst.truth.mean_matrix);
                std::string order = "position,node_id\n";
                for (int k = 0; k < inst.truth.true_order.size(); ++k) {
                    order += std::to_string(k + 1) + "," + std::to_string(inst.truth.true_order[k] + 1) + "\n";
                }
                io::write_file(with_suffix(gen_truth, "_true_order.csv"), order);
            }
            return 0;
        }

        if (*reo) {
            const std::optional<bool> dir_hint =
                looks_like_csv(reo_input) ? std::nullopt : std::optional<bool>(reo_directed);
            LoadedInput in = load_input(reo_input, dir_hint);
            const AdjacencyMatrix a = normalized(in.raw);
            const autoll::Variant variant = reo_variant.empty()
                                                ? (a.directed() ? autoll::Variant::Directed
                                                                : autoll::Variant::Undirected)
                                                : autoll::parse_variant(reo_variant);
            if (variant == autoll::Variant::Undirected && a.directed()) {
                std::cerr << "warning: undirected variant on an asymmetric matrix; rows are used as inputs\n";
            }
            if (reo_undersample > 0) {
                SeededRng rng = SeededRng::derive(reo_seed, Stream::Undersample);
                io::UndersampledPairs up = io::undersample_training_pairs(in.raw.entries(), reo_undersample, rng);
                warn_all(up.warnings);
                std::cerr << "undersampling: " << up.nonzero << " nonzero + " << up.zero_sampled
                          << " zero pairs\n";
                tc.training_pairs = std::move(up.pairs);
            }
            const autoll::RestartResult fit = autoll::train_with_restarts(a, variant, tc, reo_seed);
            autoll::ReorderResult r = autoll::reorder(a, fit.best.model);
            warn_all(r.warnings);

            const fs::path prefix(reo_prefix);
            ensure_parent(prefix);
            io::write_file(with_suffix(prefix, "_ordering.csv"), io::ordering_csv(r.ordering, r.features, in.labels));
            io::write_file(with_suffix(prefix, "_features.csv"), io::features_csv(r.features, in.labels));
            io::render_heatmap(r.reordered_observed, with_suffix(prefix, "_reordered.pgm"), reo_scale);
            io::render_heatmap(r.reordered_reconstruction, with_suffix(prefix, "_reconstruction.pgm"), reo_scale);
            io::Checkpoint ck{io::kCheckpointVersion, fit.best.model, fit.best.seed, fit.best.final_loss()};
            io::save_checkpoint(ck, with_suffix(prefix, "_checkpoint.json"));
            std::cerr << "selected restart " << fit.best_index << " (seed " << fit.best.seed
                      << ", tail loss " << fit.tail_means[fit.best_index] << ")\n";
            return 0;
        }

        if (*base) {
            const std::optional<bool> dir_hint =
                looks_like_csv(base_input) ? std::nullopt : std::optional<bool>(base_directed);
            LoadedInput in = load_input(base_input, dir_hint);
            const AdjacencyMatrix a = normalized(in.raw);
            baselines::BaselineResult r = baselines::run(baselines::parse_method(base_method), a.entries());
            warn_all(r.warnings);
            const fs::path prefix(base_prefix);
            ensure_parent(prefix);
            io::write_file(with_suffix(prefix, "_ordering.csv"), io::ordering_csv(r.ordering, r.scores, in.labels));
            io::render_heatmap(permute_matrix(a.entries(), r.ordering), with_suffix(prefix, "_reordered.pgm"),
                               base_scale);
            return 0;
        }

        if (*ben) {
            const bench::SweepConfig cfg = bench::load_sweep_config(ben_config);
            const auto rows = bench::run_benchmark(cfg);
            ensure_parent(ben_out);
            io::write_file(ben_out, bench::to_csv(rows));
            for (const auto& [key, mean] : bench::mean_errors(rows)) {
                std::cerr << key.first << " t=" << key.second << " mean error " << mean << '\n';
            }
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
