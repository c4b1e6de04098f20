#pragma once

#include "ctscreen/errors.hpp"
#include "ctscreen/pyramid.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ctscreen::gbdt {

struct Matrix {
    std::size_t num_rows = 0;
    std::size_t num_cols = 0;
    std::vector<double> data; // row-major

    double at(std::size_t r, std::size_t c) const { return data[r * num_cols + c]; }
    std::span<const double> row(std::size_t r) const {
        return {data.data() + r * num_cols, num_cols};
    }
    void push_row(std::span<const double> values);
};

struct TreeNode {
    std::int32_t feature = -1; // -1 marks a leaf
    double threshold = 0.0;    // go left when x[feature] < threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0; // leaf log-odds step (unscaled by learning rate)

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes; // node 0 is the root
    double eval(std::span<const double> row) const;
};

struct TrainConfig {
    int num_rounds = 100;
    double learning_rate = 0.1; // in (0, 1]
    int max_depth = 3;
    int min_samples_leaf = 5;
    std::uint64_t seed = 0; // reserved: training is exact greedy, no sampling

    void validate() const;
};

struct GbdtModel {
    double base_score = 0.0; // log-odds of the training prevalence
    double learning_rate = 0.1;
    std::int32_t max_depth = 0;
    std::uint32_t num_features = 0;
    std::vector<Tree> trees;
};

struct TrainResult {
    GbdtModel model;
    // round_log_loss[0] is the loss of the base score alone, then one entry
    // per boosting round; non-increasing by construction.
    std::vector<double> round_log_loss;
    std::vector<Warning> warnings;
};

// Newton boosting on binary log-loss with exact greedy splits. Single-class
// labels yield a constant model (no trees) plus a DegenerateLabels warning.
TrainResult train(const Matrix& features, const std::vector<int>& labels,
                  const TrainConfig& config = {});

double predict_one(const GbdtModel& model, std::span<const double> row);
std::vector<double> predict(const GbdtModel& model, const Matrix& features);

enum class ScoreMode { Whole, MaxNodule };

// Whole: score the pooled vector of every nodule. MaxNodule: score each
// nodule in isolation (mask_single) and take the maximum; an empty nodule
// list scores the all-zero vector in both modes.
double patient_score(const GbdtModel& model, const std::vector<encode::NoduleRecord>& nodules,
                     const pyramid::RegionScheme& scheme, const VolumeExtent& extent,
                     ScoreMode mode);

// Versioned length-prefixed binary; round-trips to bitwise-identical
// predictions. Throws MalformedModel on any structural defect.
std::vector<std::uint8_t> save_model(const GbdtModel& model);
GbdtModel load_model(const std::vector<std::uint8_t>& bytes);

// Human-readable dump, one node per line.
void dump_model(const GbdtModel& model, std::ostream& out);

} // namespace ctscreen::gbdt
