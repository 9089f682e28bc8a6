#include "linlayout/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "linlayout/error.hpp"

namespace linlayout::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string_view> split_lines(const std::string& text) {
    std::vector<std::string_view> lines;
    std::string_view rest(text);
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        lines.push_back(rest.substr(0, nl));
        if (nl == std::string_view::npos) break;
        rest.remove_prefix(nl + 1);
    }
    return lines;
}

nlohmann::json network_to_json(const nn::MlpNetwork& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        const nn::Matrix& w = net.weights[l];
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(w.size()));
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
        const nn::Vector& b = net.biases[l];
        layers.push_back({{"weights", flat}, {"biases", std::vector<double>(b.data(), b.data() + b.size())}});
    }
    return {{"layer_sizes", net.layer_sizes}, {"layers", layers}};
}

nn::MlpNetwork network_from_json(const nlohmann::json& j) {
    nn::MlpNetwork net = nn::MlpNetwork::zeros(j.at("layer_sizes").get<std::vector<int>>());
    const auto& layers = j.at("layers");
    if (layers.size() != net.num_layers()) {
        throw CheckpointError("corrupt checkpoint: layer count does not match layer_sizes");
    }
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        const auto w = layers[l].at("weights").get<std::vector<double>>();
        const auto b = layers[l].at("biases").get<std::vector<double>>();
        nn::Matrix& wm = net.weights[l];
        if (w.size() != static_cast<std::size_t>(wm.size()) ||
            b.size() != static_cast<std::size_t>(net.biases[l].size())) {
            throw CheckpointError("corrupt checkpoint: parameter count mismatch in layer " +
                                  std::to_string(l));
        }
        std::size_t k = 0;
        for (Eigen::Index r = 0; r < wm.rows(); ++r)
            for (Eigen::Index c = 0; c < wm.cols(); ++c) wm(r, c) = w[k++];
        for (std::size_t r = 0; r < b.size(); ++r) net.biases[l](static_cast<Eigen::Index>(r)) = b[r];
    }
    return net;
}

} // namespace

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("write to '" + path.string() + "' failed");
    }
}

AdjacencyMatrix parse_matrix_csv(const std::string& text, std::optional<bool> directed) {
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    std::size_t line_no = 0;
    std::size_t last_line = 0;
    for (std::string_view line : split_lines(text)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::size_t col = 0;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            const std::string_view cell = rest.substr(0, comma);
            ++col;
            const auto v = parse_double(cell);
            if (!v) {
                throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(col) +
                                     ": not a number: '" + std::string(trim(cell)) + "'",
                                 line_no);
            }
            row.push_back(*v);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (rows.empty()) {
            width = row.size();
        } else if (row.size() != width) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                                 " columns, found " + std::to_string(row.size()),
                             line_no);
        }
        rows.push_back(std::move(row));
        last_line = line_no;
    }
    if (rows.empty()) {
        throw ParseError("matrix CSV is empty", 0);
    }
    if (rows.size() != width) {
        throw ParseError("line " + std::to_string(last_line) + ": matrix is " + std::to_string(rows.size()) +
                             "x" + std::to_string(width) + ", adjacency matrices must be square",
                         last_line);
    }
    const auto n = static_cast<Eigen::Index>(width);
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    if (directed) {
        return AdjacencyMatrix(std::move(m), *directed);
    }
    return AdjacencyMatrix::infer(std::move(m));
}

AdjacencyMatrix load_matrix_csv(const fs::path& path, std::optional<bool> directed) {
    return parse_matrix_csv(read_file(path), directed);
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += fmt::format("{}", m(i, j));
        }
        out += '\n';
    }
    write_file(path, out);
}

AdjacencyMatrix EdgeList::to_adjacency() const {
    Matrix m = Matrix::Zero(n(), n());
    for (const Edge& e : edges) {
        m(e.source, e.target) += e.weight;
        if (!directed && e.source != e.target) {
            m(e.target, e.source) += e.weight;
        }
    }
    return AdjacencyMatrix(std::move(m), directed);
}

EdgeList parse_edge_list(const std::string& text, bool directed) {
    EdgeList list;
    list.directed = directed;
    std::unordered_map<std::string, int> ids;
    auto id_of = [&](std::string_view label) {
        auto [it, inserted] = ids.emplace(std::string(label), static_cast<int>(list.labels.size()));
        if (inserted) list.labels.emplace_back(label);
        return it->second;
    };
    std::size_t line_no = 0;
    for (std::string_view line : split_lines(text)) {
        ++line_no;
        if (const auto hash = line.find_first_of("#%"); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        std::vector<std::string_view> tokens;
        std::size_t pos = 0;
        while (pos < line.size()) {
            const auto start = line.find_first_not_of(" \t\r", pos);
            if (start == std::string_view::npos) break;
            auto end = line.find_first_of(" \t\r", start);
            if (end == std::string_view::npos) end = line.size();
            tokens.push_back(line.substr(start, end - start));
            pos = end;
        }
        if (tokens.empty()) continue;
        if (tokens.size() < 2 || tokens.size() > 3) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 'source target [weight]', got " +
                                 std::to_string(tokens.size()) + " fields",
                             line_no);
        }
        double weight = 1.0;
        if (tokens.size() == 3) {
            const auto w = parse_double(tokens[2]);
            if (!w || !std::isfinite(*w)) {
                throw ParseError("line " + std::to_string(line_no) + ": bad weight '" + std::string(tokens[2]) + "'",
                                 line_no);
            }
            if (*w < 0.0) {
                throw ParseError("line " + std::to_string(line_no) + ": negative weight " + std::string(tokens[2]),
                                 line_no);
            }
            weight = *w;
        }
        const int s = id_of(tokens[0]);
        const int t = id_of(tokens[1]);
        list.edges.push_back({s, t, weight});
    }
    if (list.labels.empty()) {
        throw ParseError("edge list contains no edges", 0);
    }
    // Integer labels are numbered in numeric order so "1 2" maps to ids 0, 1
    // whatever order the nodes first appear in.
    std::vector<std::pair<long long, int>> numeric;
    for (std::size_t k = 0; k < list.labels.size(); ++k) {
        long long v = 0;
        const std::string& s = list.labels[k];
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            return list;
        }
        numeric.emplace_back(v, static_cast<int>(k));
    }
    std::sort(numeric.begin(), numeric.end());
    std::vector<int> remap(list.labels.size());
    std::vector<std::string> labels(list.labels.size());
    for (std::size_t rank = 0; rank < numeric.size(); ++rank) {
        const auto old_id = static_cast<std::size_t>(numeric[rank].second);
        remap[old_id] = static_cast<int>(rank);
        labels[rank] = list.labels[old_id];
    }
    for (Edge& e : list.edges) {
        e.source = remap[static_cast<std::size_t>(e.source)];
        e.target = remap[static_cast<std::size_t>(e.target)];
    }
    list.labels = std::move(labels);
    return list;
}

EdgeList load_edge_list(const fs::path& path, bool directed) {
    return parse_edge_list(read_file(path), directed);
}

UndersampledPairs undersample_training_pairs(const Matrix& weights, int multiplier, SeededRng& rng) {
    if (multiplier < 1) {
        throw InvalidConfig("undersampling multiplier must be >= 1");
    }
    UndersampledPairs out;
    std::vector<autoll::IndexPair> zeros;
    for (Eigen::Index i = 0; i < weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < weights.cols(); ++j) {
            const autoll::IndexPair p{static_cast<int>(i), static_cast<int>(j)};
            if (weights(i, j) != 0.0) {
                out.pairs.push_back(p);
            } else {
                zeros.push_back(p);
            }
        }
    }
    out.nonzero = out.pairs.size();
    std::size_t wanted = static_cast<std::size_t>(multiplier) * out.nonzero;
    if (wanted > zeros.size()) {
        out.warnings.push_back(fmt::format("requested {} zero-weight pairs but only {} exist; using all",
                                           wanted, zeros.size()));
        wanted = zeros.size();
    }
    // Partial Fisher-Yates: the first `wanted` slots become the sample.
    for (std::size_t k = 0; k < wanted; ++k) {
        const std::size_t r = k + static_cast<std::size_t>(rng.below(zeros.size() - k));
        std::swap(zeros[k], zeros[r]);
    }
    out.pairs.insert(out.pairs.end(), zeros.begin(), zeros.begin() + static_cast<std::ptrdiff_t>(wanted));
    out.zero_sampled = wanted;
    return out;
}

std::string checkpoint_to_string(const Checkpoint& ckpt) {
    const nlohmann::json j{
        {"format", "linlayout-checkpoint"},
        {"version", ckpt.version},
        {"variant", autoll::to_string(ckpt.model.variant)},
        {"seed", ckpt.seed},
        {"final_loss", ckpt.final_loss},
        {"encoder", network_to_json(ckpt.model.encoder)},
        {"decoder", network_to_json(ckpt.model.decoder)},
    };
    return j.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "linlayout-checkpoint") {
            throw CheckpointError("corrupt checkpoint: unknown format tag");
        }
        const int version = j.at("version").get<int>();
        if (version != kCheckpointVersion) {
            throw CheckpointVersionError("checkpoint version " + std::to_string(version) +
                                         " is not supported (this build reads version " +
                                         std::to_string(kCheckpointVersion) + ")");
        }
        Checkpoint c;
        c.version = version;
        c.model.variant = autoll::parse_variant(j.at("variant").get<std::string>());
        c.seed = j.at("seed").get<std::uint64_t>();
        c.final_loss = j.at("final_loss").get<double>();
        c.model.encoder = network_from_json(j.at("encoder"));
        c.model.decoder = network_from_json(j.at("decoder"));
        if (c.model.encoder.output_size() != 1 || c.model.decoder.input_size() != 2 ||
            c.model.decoder.output_size() != 1) {
            throw CheckpointError("corrupt checkpoint: encoder/decoder shapes are not an AutoLL model");
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
    } catch (const InvalidConfig& e) {
        throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
    }
}

void save_checkpoint(const Checkpoint& ckpt, const fs::path& path) {
    write_file(path, checkpoint_to_string(ckpt));
}

Checkpoint load_checkpoint(const fs::path& path) {
    return checkpoint_from_string(read_file(path));
}

std::string heatmap_pgm(const Matrix& m, int scale) {
    if (scale < 1) {
        throw InvalidConfig("heatmap scale must be >= 1");
    }
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double v = m.data()[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("heatmap entries must lie in [0,1]");
        }
    }
    const auto width = static_cast<std::size_t>(m.cols()) * static_cast<std::size_t>(scale);
    const auto height = static_cast<std::size_t>(m.rows()) * static_cast<std::size_t>(scale);
    std::string out = fmt::format("P5\n{} {}\n255\n", width, height);
    const std::size_t header = out.size();
    out.resize(header + width * height);
    std::size_t k = header;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::string row;
        row.reserve(width);
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const auto px = static_cast<unsigned char>(std::floor(255.0 * (1.0 - m(i, j)) + 0.5));
            row.append(static_cast<std::size_t>(scale), static_cast<char>(px));
        }
        for (int r = 0; r < scale; ++r) {
            out.replace(k, width, row);
            k += width;
        }
    }
    return out;
}

void render_heatmap(const Matrix& m, const fs::path& path, int scale) {
    write_file(path, heatmap_pgm(m, scale));
}

std::vector<std::string> default_labels(int n) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) labels.push_back(std::to_string(i));
    return labels;
}

std::string ordering_csv(const NodeOrdering& order, const std::vector<double>& features,
                         const std::vector<std::string>& labels) {
    if (features.size() != static_cast<std::size_t>(order.size()) ||
        labels.size() != static_cast<std::size_t>(order.size())) {
        throw ShapeError("ordering_csv: ordering, features and labels differ in length");
    }
    std::string out = "position,node_id,feature_z\n";
    for (int k = 0; k < order.size(); ++k) {
        const auto node = static_cast<std::size_t>(order[k]);
        out += fmt::format("{},{},{}\n", k + 1, labels[node], features[node]);
    }
    return out;
}

std::string features_csv(const std::vector<double>& features, const std::vector<std::string>& labels) {
    if (features.size() != labels.size()) {
        throw ShapeError("features_csv: features and labels differ in length");
    }
    std::string out = "node_id,feature_z\n";
    for (std::size_t i = 0; i < features.size(); ++i) {
        out += fmt::format("{},{}\n", labels[i], features[i]);
    }
    return out;
}

} // namespace linlayout::io
