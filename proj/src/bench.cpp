#include "linlayout/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "linlayout/autoll.hpp"
#include "linlayout/baselines.hpp"
#include "linlayout/error.hpp"
#include "linlayout/io.hpp"

namespace linlayout::bench {

namespace {

constexpr std::uint64_t kAutollTag = 0xa070;

std::string strip(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value, std::size_t line) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ParseError("line " + std::to_string(line) + ": bad value '" + value + "' for " + key, line);
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value, std::size_t line) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ParseError("line " + std::to_string(line) + ": bad boolean '" + value + "' for " + key, line);
}

void validate(const SweepConfig& c) {
    if (c.methods.empty()) throw InvalidConfig("sweep config lists no methods");
    for (const auto& m : c.methods) {
        if (m != "autoll") baselines::parse_method(m);
    }
    if (c.n < 2) throw InvalidConfig("sweep n must be >= 2");
    if (c.t_min > c.t_max) throw InvalidConfig("sweep t_min exceeds t_max");
    if (c.trials < 1 || c.restarts < 1 || c.epochs < 1 || c.batch < 1 || c.last_window < 1) {
        throw InvalidConfig("trials, restarts, epochs, batch and last_window must be positive");
    }
}

BenchRow run_method(const std::string& method, const synthetic::Instance& inst, const SweepConfig& cfg,
                    int t, int trial) {
    BenchRow row{method, t, trial, std::numeric_limits<double>::quiet_NaN(), 0.0, {}};
    const auto start = std::chrono::steady_clock::now();
    try {
        NodeOrdering order;
        if (method == "autoll") {
            autoll::TrainConfig tc;
            tc.epochs = cfg.epochs;
            tc.batch_size = cfg.batch;
            tc.restarts = cfg.restarts;
            tc.last_window = cfg.last_window;
            const auto variant = cfg.directed ? autoll::Variant::Directed : autoll::Variant::Undirected;
            const std::uint64_t base = SeededRng::derive(cfg.seed, kAutollTag, static_cast<std::uint64_t>(t),
                                                         static_cast<std::uint64_t>(trial))
                                           .next();
            const auto fit = autoll::train_with_restarts(inst.observed, variant, tc, base);
            order = autoll::order_from_features(autoll::extract_features(fit.best.model, inst.observed));
        } else {
            order = baselines::run(baselines::parse_method(method), inst.observed.entries()).ordering;
        }
        row.error = inst.truth.score(order).error;
    } catch (const Error& e) {
        row.failure = e.what();
        std::cerr << "bench: " << method << " t=" << t << " trial=" << trial << " failed: " << e.what() << '\n';
    }
    if (cfg.timing) {
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return row;
}

} // namespace

double SweepConfig::sigma_at(int t) const {
    return sweep == Sweep::Noise ? sigma_step * t : base_sigma;
}

double SweepConfig::outlier_p_at(int t) const {
    return sweep == Sweep::Outlier ? outlier_step * t : 0.0;
}

SweepConfig parse_sweep_config(const std::string& text) {
    SweepConfig c;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
        raw = strip(raw);
        if (raw.empty()) continue;
        const auto eq = raw.find('=');
        if (eq == std::string::npos) {
            throw ParseError("line " + std::to_string(line) + ": expected key=value", line);
        }
        const std::string key = strip(raw.substr(0, eq));
        const std::string value = strip(raw.substr(eq + 1));
        if (key == "methods") {
            c.methods.clear();
            std::istringstream items(value);
            std::string item;
            while (std::getline(items, item, ',')) {
                item = strip(item);
                if (!item.empty()) c.methods.push_back(item);
            }
        } else if (key == "generator") {
            c.generator = synthetic::parse_generator(value);
        } else if (key == "directed") {
            c.directed = parse_bool(key, value, line);
        } else if (key == "n") {
            c.n = parse_number<int>(key, value, line);
        } else if (key == "t_min") {
            c.t_min = parse_number<int>(key, value, line);
        } else if (key == "t_max") {
            c.t_max = parse_number<int>(key, value, line);
        } else if (key == "trials") {
            c.trials = parse_number<int>(key, value, line);
        } else if (key == "seed") {
            c.seed = parse_number<std::uint64_t>(key, value, line);
        } else if (key == "restarts") {
            c.restarts = parse_number<int>(key, value, line);
        } else if (key == "epochs") {
            c.epochs = parse_number<int>(key, value, line);
        } else if (key == "batch") {
            c.batch = parse_number<int>(key, value, line);
        } else if (key == "last_window") {
            c.last_window = parse_number<int>(key, value, line);
        } else if (key == "sweep") {
            if (value == "noise") c.sweep = Sweep::Noise;
            else if (value == "outlier") c.sweep = Sweep::Outlier;
            else throw ParseError("line " + std::to_string(line) + ": sweep must be noise or outlier", line);
        } else if (key == "sigma_step") {
            c.sigma_step = parse_number<double>(key, value, line);
        } else if (key == "base_sigma") {
            c.base_sigma = parse_number<double>(key, value, line);
        } else if (key == "outlier_step") {
            c.outlier_step = parse_number<double>(key, value, line);
        } else if (key == "timing") {
            c.timing = parse_bool(key, value, line);
        } else {
            throw ParseError("line " + std::to_string(line) + ": unknown key '" + key + "'", line);
        }
    }
    validate(c);
    return c;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
    return parse_sweep_config(io::read_file(path));
}

std::uint64_t instance_seed(std::uint64_t seed, int t, int trial) {
    return SeededRng::derive(seed, static_cast<std::uint64_t>(Stream::Data), static_cast<std::uint64_t>(t),
                             static_cast<std::uint64_t>(trial))
        .next();
}

std::vector<BenchRow> run_benchmark(const SweepConfig& cfg) {
    validate(cfg);
    // rows_by_method[m] collects in (t, trial) order, so concatenation gives
    // the documented sort order.
    std::vector<std::vector<BenchRow>> rows_by_method(cfg.methods.size());
    for (int t = cfg.t_min; t <= cfg.t_max; ++t) {
        for (int trial = 1; trial <= cfg.trials; ++trial) {
            synthetic::InstanceSpec spec;
            spec.generator = cfg.generator;
            spec.n = cfg.n;
            spec.directed = cfg.directed;
            spec.sigma = cfg.sigma_at(t);
            spec.outlier_p = cfg.outlier_p_at(t);
            spec.seed = instance_seed(cfg.seed, t, trial);
            synthetic::Instance inst;
            try {
                inst = synthetic::make_instance(spec);
            } catch (const Error& e) {
                std::cerr << "bench: t=" << t << " trial=" << trial << " data generation failed: " << e.what()
                          << '\n';
                for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
                    rows_by_method[m].push_back(
                        {cfg.methods[m], t, trial, std::numeric_limits<double>::quiet_NaN(), 0.0, e.what()});
                }
                continue;
            }
            for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
                rows_by_method[m].push_back(run_method(cfg.methods[m], inst, cfg, t, trial));
            }
        }
    }
    std::vector<BenchRow> rows;
    for (auto& block : rows_by_method) {
        rows.insert(rows.end(), block.begin(), block.end());
    }
    return rows;
}

std::string to_csv(const std::vector<BenchRow>& rows) {
    std::string out = "method,t,trial,error,seconds\n";
    for (const BenchRow& r : rows) {
        const std::string err = std::isnan(r.error) ? std::string("nan") : fmt::format("{}", r.error);
        out += fmt::format("{},{},{},{},{:.6f}\n", r.method, r.t, r.trial, err, r.seconds);
    }
    return out;
}

std::map<std::pair<std::string, int>, double> mean_errors(const std::vector<BenchRow>& rows) {
    std::map<std::pair<std::string, int>, std::pair<double, int>> acc;
    for (const BenchRow& r : rows) {
        if (std::isnan(r.error)) continue;
        auto& [sum, count] = acc[{r.method, r.t}];
        sum += r.error;
        ++count;
    }
    std::map<std::pair<std::string, int>, double> out;
    for (const auto& [key, v] : acc) out[key] = v.first / v.second;
    return out;
}

} // namespace linlayout::bench
