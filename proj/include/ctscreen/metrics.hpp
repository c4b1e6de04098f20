#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ctscreen::metrics {

struct ConfusionCounts {
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;

    std::uint64_t n() const { return tp + tn + fp + fn; }
};

struct PredictionSet {
    std::vector<std::string> ids;
    std::vector<double> scores; // in [0,1]
    std::vector<int> labels;    // 0/1

    void validate() const; // parallel arrays, length >= 1, sane values
    std::size_t size() const { return scores.size(); }
};

// Predicted positive at score >= threshold (closed rule).
ConfusionCounts confusion(const PredictionSet& preds, double threshold = 0.5);

// Confusion-derived ratios. Zero denominators throw (EmptyCounts for
// accuracy, UndefinedMetric otherwise): an undefined rate is reported as
// not-a-value, never silently 0.
double accuracy(const ConfusionCounts& c);
double sensitivity(const ConfusionCounts& c);
double specificity(const ConfusionCounts& c);
double precision(const ConfusionCounts& c);
double f1(const ConfusionCounts& c);

// Scores are clipped into [clip_eps, 1-clip_eps] before the natural log.
double log_loss(const PredictionSet& preds, double clip_eps = 1e-15);

struct RocPoint {
    double threshold = 0; // +inf for the (0,0) anchor
    double fpr = 0;
    double tpr = 0;
};

struct PrPoint {
    double threshold = 0;
    double recall = 0;
    double precision = 0;
};

// Curve over all distinct score thresholds plus the (0,0) and (1,1)
// anchors; throws SingleClass unless both classes are present.
std::vector<RocPoint> roc_curve(const PredictionSet& preds);

// Trapezoidal integral of the ROC curve; with the half-credit tie
// convention it equals the pairwise Mann-Whitney statistic.
double auc(const PredictionSet& preds);

// Precision-recall curve over all distinct thresholds, descending.
std::vector<PrPoint> pr_curve(const PredictionSet& preds);

// Step-wise summation sum_k (R_k - R_{k-1}) * P_k, no interpolation.
double auprc(const PredictionSet& preds);

struct DelongResult {
    double auc_a = 0;
    double auc_b = 0;
    double delta = 0; // auc_a - auc_b
    double z = 0;
    double p_two_sided = 1.0;
};

// Paired comparison of two models' AUCs on the same labels via the
// structural-components covariance estimate. Degenerate zero variance with
// zero delta yields p = 1.
DelongResult delong_test(const std::vector<double>& scores_a,
                         const std::vector<double>& scores_b, const std::vector<int>& labels);

enum class SweepObjective { Accuracy, Youden };

struct SweepResult {
    double threshold = 0.5;
    double objective_value = 0;
    ConfusionCounts counts;
    double accuracy = 0;
    double sensitivity = 0;
    double specificity = 0;
};

double sweep_objective_at(const PredictionSet& preds, double threshold, SweepObjective objective);

// Evaluates the objective at 0, 1, and the midpoints between consecutive
// distinct scores; ties break toward the higher threshold.
SweepResult threshold_sweep(const PredictionSet& preds, SweepObjective objective);

struct EvalReport {
    std::size_t total = 0;
    std::size_t num_positive = 0;
    std::size_t num_negative = 0;
    double threshold = 0.5;
    ConfusionCounts counts;
    std::optional<double> accuracy, sensitivity, specificity, precision, f1;
    std::optional<double> auc, auprc;
    double log_loss = 0;
    std::vector<RocPoint> roc_points;
    std::vector<PrPoint> pr_points;
};

EvalReport evaluate(const PredictionSet& preds, double threshold = 0.5);

// Flat key/value block shaped like the validation-metrics table.
void write_report(const EvalReport& report, std::ostream& out);

// Curve CSVs for external plotting.
void write_roc_csv(const std::vector<RocPoint>& points, std::ostream& out);
void write_pr_csv(const std::vector<PrPoint>& points, std::ostream& out);

} // namespace ctscreen::metrics
