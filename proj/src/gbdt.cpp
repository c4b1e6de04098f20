#include "ctscreen/gbdt.hpp"

#include "ctscreen/text.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <ostream>

namespace ctscreen::gbdt {

void Matrix::push_row(std::span<const double> values) {
    if (num_rows == 0 && num_cols == 0)
        num_cols = values.size();
    if (values.size() != num_cols)
        throw PipelineError(Errc::DimensionMismatch,
                            "row has " + std::to_string(values.size()) + " values, expected " +
                                std::to_string(num_cols));
    data.insert(data.end(), values.begin(), values.end());
    ++num_rows;
}

double Tree::eval(std::span<const double> row) const {
    std::size_t node = 0;
    while (!nodes[node].is_leaf()) {
        const TreeNode& n = nodes[node];
        node = (row[static_cast<std::size_t>(n.feature)] < n.threshold)
                   ? static_cast<std::size_t>(n.left)
                   : static_cast<std::size_t>(n.right);
    }
    return nodes[node].value;
}

void TrainConfig::validate() const {
    if (num_rounds < 1)
        throw PipelineError(Errc::InvalidArgument, "num_rounds must be >= 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
        throw PipelineError(Errc::InvalidArgument, "learning_rate must be in (0, 1]");
    if (max_depth < 1)
        throw PipelineError(Errc::InvalidArgument, "max_depth must be >= 1");
    if (min_samples_leaf < 1)
        throw PipelineError(Errc::InvalidArgument, "min_samples_leaf must be >= 1");
}

namespace {

constexpr double kProbEps = 1e-15;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double clipped_log_loss(const std::vector<double>& prob, const std::vector<int>& labels) {
    double sum = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        const double p = std::clamp(prob[i], kProbEps, 1.0 - kProbEps);
        sum += labels[i] ? -std::log(p) : -std::log(1.0 - p);
    }
    return sum / static_cast<double>(prob.size());
}

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const std::vector<double>& grad,
                const std::vector<double>& hess, const TrainConfig& cfg)
        : x_(x), grad_(grad), hess_(hess), cfg_(cfg) {}

    Tree build() {
        Tree tree;
        std::vector<std::size_t> all(x_.num_rows);
        std::iota(all.begin(), all.end(), 0);
        grow(tree, all, 0);
        return tree;
    }

private:
    // Zero-gain splits are allowed on purpose: whenever a structurally valid
    // split exists the best candidate wins (ties toward the lowest feature
    // index, then the lowest threshold). Symmetric patterns such as XOR have
    // an all-zero gain surface at the root and would otherwise never be
    // carved at depth >= 2.
    SplitChoice best_split(const std::vector<std::size_t>& idx) const {
        const double g_total = sum(grad_, idx);
        const double h_total = sum(hess_, idx);
        const double parent = g_total * g_total / h_total;

        SplitChoice best;
        std::vector<std::pair<double, std::size_t>> order(idx.size());
        for (std::size_t f = 0; f < x_.num_cols; ++f) {
            for (std::size_t i = 0; i < idx.size(); ++i)
                order[i] = {x_.at(idx[i], f), idx[i]};
            std::sort(order.begin(), order.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            double gl = 0.0, hl = 0.0;
            std::size_t nl = 0;
            std::size_t i = 0;
            while (i < order.size()) {
                const double value = order[i].first;
                std::size_t j = i;
                while (j < order.size() && order[j].first == value) {
                    gl += grad_[order[j].second];
                    hl += hess_[order[j].second];
                    ++nl;
                    ++j;
                }
                if (j == order.size())
                    break; // no candidate after the last value block
                const std::size_t nr = order.size() - nl;
                if (nl >= static_cast<std::size_t>(cfg_.min_samples_leaf) &&
                    nr >= static_cast<std::size_t>(cfg_.min_samples_leaf)) {
                    const double next = order[j].first;
                    double thr = 0.5 * (value + next);
                    if (!(thr > value))
                        thr = next; // adjacent doubles: fall back to the exact boundary
                    const double gr = g_total - gl;
                    const double hr = h_total - hl;
                    const double gain = gl * gl / hl + gr * gr / hr - parent;
                    if (!best.found || gain > best.gain ||
                        (gain == best.gain &&
                         (f < best.feature || (f == best.feature && thr < best.threshold)))) {
                        best = {true, f, thr, gain};
                    }
                }
                i = j;
            }
        }
        return best;
    }

    std::int32_t grow(Tree& tree, const std::vector<std::size_t>& idx, int depth) {
        const std::int32_t id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();

        SplitChoice split;
        if (depth < cfg_.max_depth)
            split = best_split(idx);
        if (!split.found) {
            tree.nodes[id].value = -sum(grad_, idx) / sum(hess_, idx); // Newton step
            return id;
        }

        std::vector<std::size_t> left, right;
        for (std::size_t i : idx) {
            if (x_.at(i, split.feature) < split.threshold)
                left.push_back(i);
            else
                right.push_back(i);
        }
        tree.nodes[id].feature = static_cast<std::int32_t>(split.feature);
        tree.nodes[id].threshold = split.threshold;
        const std::int32_t l = grow(tree, left, depth + 1);
        tree.nodes[id].left = l;
        const std::int32_t r = grow(tree, right, depth + 1);
        tree.nodes[id].right = r;
        return id;
    }

    static double sum(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
        double s = 0.0;
        for (std::size_t i : idx)
            s += v[i];
        return s;
    }

    const Matrix& x_;
    const std::vector<double>& grad_;
    const std::vector<double>& hess_;
    const TrainConfig& cfg_;
};

} // namespace

TrainResult train(const Matrix& features, const std::vector<int>& labels,
                  const TrainConfig& config) {
    config.validate();
    if (features.num_rows != labels.size())
        throw PipelineError(Errc::DimensionMismatch,
                            "feature rows and labels disagree: " +
                                std::to_string(features.num_rows) + " vs " +
                                std::to_string(labels.size()));
    if (features.num_rows < 2)
        throw PipelineError(Errc::DimensionMismatch, "training needs at least 2 samples");
    for (int y : labels)
        if (y != 0 && y != 1)
            throw PipelineError(Errc::InvalidArgument, "labels must be 0 or 1");

    TrainResult result;
    GbdtModel& model = result.model;
    model.learning_rate = config.learning_rate;
    model.max_depth = config.max_depth;
    model.num_features = static_cast<std::uint32_t>(features.num_cols);

    const std::size_t n = labels.size();
    const double positives = static_cast<double>(std::accumulate(labels.begin(), labels.end(), 0));
    const double prevalence = std::clamp(positives / n, kProbEps, 1.0 - kProbEps);
    model.base_score = std::log(prevalence / (1.0 - prevalence));

    if (positives == 0.0 || positives == static_cast<double>(n)) {
        result.warnings.push_back(
            {"DegenerateLabels", "single-class labels: returning a constant model"});
        std::vector<double> prob(n, sigmoid(model.base_score));
        result.round_log_loss.push_back(clipped_log_loss(prob, labels));
        return result;
    }

    std::vector<double> raw(n, model.base_score);
    std::vector<double> prob(n), grad(n), hess(n);
    for (std::size_t i = 0; i < n; ++i)
        prob[i] = sigmoid(raw[i]);
    result.round_log_loss.push_back(clipped_log_loss(prob, labels));

    for (int round = 0; round < config.num_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            grad[i] = prob[i] - labels[i];
            hess[i] = prob[i] * (1.0 - prob[i]);
        }
        Tree tree = TreeBuilder(features, grad, hess, config).build();
        for (std::size_t i = 0; i < n; ++i) {
            raw[i] += config.learning_rate * tree.eval(features.row(i));
            prob[i] = sigmoid(raw[i]);
        }
        model.trees.push_back(std::move(tree));
        result.round_log_loss.push_back(clipped_log_loss(prob, labels));
    }
    return result;
}

double predict_one(const GbdtModel& model, std::span<const double> row) {
    if (row.size() != model.num_features)
        throw PipelineError(Errc::DimensionMismatch,
                            "feature dimension " + std::to_string(row.size()) +
                                " does not match model (" +
                                std::to_string(model.num_features) + ")");
    double raw = model.base_score;
    for (const Tree& t : model.trees)
        raw += model.learning_rate * t.eval(row);
    return sigmoid(raw);
}

std::vector<double> predict(const GbdtModel& model, const Matrix& features) {
    if (features.num_cols != model.num_features)
        throw PipelineError(Errc::DimensionMismatch,
                            "feature dimension " + std::to_string(features.num_cols) +
                                " does not match model (" +
                                std::to_string(model.num_features) + ")");
    std::vector<double> scores(features.num_rows);
    for (std::size_t i = 0; i < features.num_rows; ++i)
        scores[i] = predict_one(model, features.row(i));
    return scores;
}

double patient_score(const GbdtModel& model, const std::vector<encode::NoduleRecord>& nodules,
                     const pyramid::RegionScheme& scheme, const VolumeExtent& extent,
                     ScoreMode mode) {
    if (nodules.empty() || mode == ScoreMode::Whole) {
        const auto v = pyramid::pool(nodules, scheme, extent);
        return predict_one(model, v);
    }
    double best = 0.0;
    for (std::size_t i = 0; i < nodules.size(); ++i) {
        const auto v = pyramid::pool(pyramid::mask_single(nodules, i), scheme, extent);
        best = std::max(best, predict_one(model, v));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'C', 'T', 'G', 'B'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_i32(std::vector<std::uint8_t>& out, std::int32_t v) {
    put_u32(out, static_cast<std::uint32_t>(v));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

struct Reader {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    const std::uint8_t* take(std::size_t n) {
        if (pos + n > bytes.size())
            throw PipelineError(Errc::MalformedModel, "model bytes truncated");
        const std::uint8_t* p = bytes.data() + pos;
        pos += n;
        return p;
    }

    std::uint32_t u32() {
        const std::uint8_t* p = take(4);
        return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
               (static_cast<std::uint32_t>(p[2]) << 16) |
               (static_cast<std::uint32_t>(p[3]) << 24);
    }

    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }

    double f64() {
        const std::uint8_t* p = take(8);
        std::uint64_t bits = 0;
        for (int i = 7; i >= 0; --i)
            bits = (bits << 8) | p[i];
        return std::bit_cast<double>(bits);
    }
};

} // namespace

std::vector<std::uint8_t> save_model(const GbdtModel& model) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kVersion);
    put_f64(out, model.base_score);
    put_f64(out, model.learning_rate);
    put_i32(out, model.max_depth);
    put_u32(out, model.num_features);
    put_u32(out, static_cast<std::uint32_t>(model.trees.size()));
    for (const Tree& t : model.trees) {
        put_u32(out, static_cast<std::uint32_t>(t.nodes.size()));
        for (const TreeNode& n : t.nodes) {
            put_i32(out, n.feature);
            put_f64(out, n.threshold);
            put_i32(out, n.left);
            put_i32(out, n.right);
            put_f64(out, n.value);
        }
    }
    return out;
}

GbdtModel load_model(const std::vector<std::uint8_t>& bytes) {
    Reader r{bytes};
    const std::uint8_t* magic = r.take(4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw PipelineError(Errc::MalformedModel, "bad magic");
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw PipelineError(Errc::MalformedModel,
                            "unsupported model version " + std::to_string(version) +
                                " (expected " + std::to_string(kVersion) + ")");

    GbdtModel model;
    model.base_score = r.f64();
    model.learning_rate = r.f64();
    model.max_depth = r.i32();
    model.num_features = r.u32();
    const std::uint32_t num_trees = r.u32();
    model.trees.resize(num_trees);
    for (Tree& t : model.trees) {
        const std::uint32_t num_nodes = r.u32();
        if (num_nodes == 0)
            throw PipelineError(Errc::MalformedModel, "tree with no nodes");
        t.nodes.resize(num_nodes);
        for (TreeNode& n : t.nodes) {
            n.feature = r.i32();
            n.threshold = r.f64();
            n.left = r.i32();
            n.right = r.i32();
            n.value = r.f64();
        }
        for (const TreeNode& n : t.nodes) {
            if (n.is_leaf())
                continue;
            if (n.feature >= static_cast<std::int32_t>(model.num_features) || n.left < 0 ||
                n.right < 0 || n.left >= static_cast<std::int32_t>(num_nodes) ||
                n.right >= static_cast<std::int32_t>(num_nodes))
                throw PipelineError(Errc::MalformedModel, "node references out of range");
        }
    }
    if (r.pos != bytes.size())
        throw PipelineError(Errc::MalformedModel, "trailing bytes after model");
    return model;
}

void dump_model(const GbdtModel& model, std::ostream& out) {
    out << "base_score " << text::format_double(model.base_score) << "\n";
    out << "learning_rate " << text::format_double(model.learning_rate) << "\n";
    out << "max_depth " << model.max_depth << "\n";
    out << "num_features " << model.num_features << "\n";
    out << "num_trees " << model.trees.size() << "\n";
    for (std::size_t ti = 0; ti < model.trees.size(); ++ti) {
        out << "tree " << ti << "\n";
        const auto& nodes = model.trees[ti].nodes;
        for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
            const TreeNode& n = nodes[ni];
            if (n.is_leaf())
                out << "  node " << ni << ": leaf value " << text::format_double(n.value)
                    << "\n";
            else
                out << "  node " << ni << ": feature " << n.feature << " threshold "
                    << text::format_double(n.threshold) << " left " << n.left << " right "
                    << n.right << "\n";
        }
    }
}

} // namespace ctscreen::gbdt
