#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "linlayout/synthetic.hpp"

namespace linlayout::bench {

enum class Sweep {
    Noise,   ///< sigma_t = sigma_step * t, no outliers
    Outlier, ///< sigma = base_sigma, outlier probability = outlier_step * t
};

/// Flat key=value sweep description. Keys: methods, generator, directed, n,
/// t_min, t_max, trials, seed, restarts, epochs, batch, last_window, sweep,
/// sigma_step, base_sigma, outlier_step, timing.
struct SweepConfig {
    std::vector<std::string> methods{"autoll", "svd-rank-one", "svd-angle", "mds"};
    synthetic::Generator generator = synthetic::Generator::Dgm;
    bool directed = false;
    int n = 120;
    int t_min = 1;
    int t_max = 10;
    int trials = 10;
    std::uint64_t seed = 0;
    int restarts = 10;
    int epochs = 200;
    int batch = 200;
    int last_window = 100;
    Sweep sweep = Sweep::Noise;
    double sigma_step = 0.03;
    double base_sigma = 0.03;
    double outlier_step = 0.01;
    /// Wall-clock seconds are written only when enabled; otherwise the
    /// column is 0 so equal configs give byte-identical files.
    bool timing = false;

    double sigma_at(int t) const;
    double outlier_p_at(int t) const;
};

/// Throws ParseError (with line) on unknown keys or bad values and
/// InvalidConfig on unknown method names.
SweepConfig parse_sweep_config(const std::string& text);
SweepConfig load_sweep_config(const std::filesystem::path& path);

struct BenchRow {
    std::string method;
    int t = 0;
    int trial = 0;
    /// NaN for a failed trial.
    double error = 0.0;
    double seconds = 0.0;
    std::string failure;
};

/// Seed of the data instance for (t, trial); shared by every method.
std::uint64_t instance_seed(std::uint64_t seed, int t, int trial);

/// For every (t, trial): generate, shuffle, run each method, score it.
/// Rows are ordered by method (config order), then t, then trial. A failure
/// in data generation or in a method becomes a NaN row; the sweep goes on.
std::vector<BenchRow> run_benchmark(const SweepConfig& cfg);

/// "method,t,trial,error,seconds".
std::string to_csv(const std::vector<BenchRow>& rows);

/// Mean error over successful trials, keyed by (method, t).
std::map<std::pair<std::string, int>, double> mean_errors(const std::vector<BenchRow>& rows);

} // namespace linlayout::bench
