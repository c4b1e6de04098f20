#include "ctscreen/metrics.hpp"

#include "ctscreen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace ctscreen::metrics {

void PredictionSet::validate() const {
    if (scores.empty())
        throw PipelineError(Errc::InvalidArgument, "prediction set is empty");
    if (labels.size() != scores.size() ||
        (!ids.empty() && ids.size() != scores.size()))
        throw PipelineError(Errc::LengthMismatch,
                            "ids/scores/labels must be parallel arrays");
    for (double s : scores)
        if (!(s >= 0.0 && s <= 1.0))
            throw PipelineError(Errc::InvalidArgument, "scores must lie in [0,1]");
    for (int y : labels)
        if (y != 0 && y != 1)
            throw PipelineError(Errc::InvalidArgument, "labels must be 0 or 1");
}

ConfusionCounts confusion(const PredictionSet& preds, double threshold) {
    preds.validate();
    ConfusionCounts c;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const bool predicted = preds.scores[i] >= threshold;
        if (preds.labels[i]) {
            predicted ? ++c.tp : ++c.fn;
        } else {
            predicted ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

double accuracy(const ConfusionCounts& c) {
    if (c.n() == 0)
        throw PipelineError(Errc::EmptyCounts, "accuracy of zero counts");
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.n());
}

double sensitivity(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0)
        throw PipelineError(Errc::UndefinedMetric, "sensitivity with no positives");
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double specificity(const ConfusionCounts& c) {
    if (c.tn + c.fp == 0)
        throw PipelineError(Errc::UndefinedMetric, "specificity with no negatives");
    return static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
}

double precision(const ConfusionCounts& c) {
    if (c.tp + c.fp == 0)
        throw PipelineError(Errc::UndefinedMetric, "precision with no predicted positives");
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

double f1(const ConfusionCounts& c) {
    const double prec = precision(c);
    const double sens = sensitivity(c);
    if (prec + sens == 0.0)
        throw PipelineError(Errc::UndefinedMetric, "f1 with zero precision and sensitivity");
    return 2.0 * prec * sens / (prec + sens);
}

double log_loss(const PredictionSet& preds, double clip_eps) {
    preds.validate();
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double p = std::clamp(preds.scores[i], clip_eps, 1.0 - clip_eps);
        sum += preds.labels[i] ? -std::log(p) : -std::log(1.0 - p);
    }
    return sum / static_cast<double>(preds.size());
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

namespace {

struct ClassTotals {
    std::uint64_t positives = 0;
    std::uint64_t negatives = 0;
};

ClassTotals class_totals(const PredictionSet& preds) {
    ClassTotals t;
    for (int y : preds.labels)
        y ? ++t.positives : ++t.negatives;
    return t;
}

// Indices sorted by score descending; ties keep ascending index order.
std::vector<std::size_t> descending_order(const PredictionSet& preds) {
    std::vector<std::size_t> order(preds.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return preds.scores[a] > preds.scores[b];
    });
    return order;
}

} // namespace

std::vector<RocPoint> roc_curve(const PredictionSet& preds) {
    preds.validate();
    const ClassTotals totals = class_totals(preds);
    if (totals.positives == 0 || totals.negatives == 0)
        throw PipelineError(Errc::SingleClass, "ROC needs both classes");

    const auto order = descending_order(preds);
    std::vector<RocPoint> points;
    points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});

    std::uint64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double score = preds.scores[order[i]];
        while (i < order.size() && preds.scores[order[i]] == score) {
            preds.labels[order[i]] ? ++tp : ++fp;
            ++i;
        }
        points.push_back({score, static_cast<double>(fp) / totals.negatives,
                          static_cast<double>(tp) / totals.positives});
    }
    return points;
}

double auc(const PredictionSet& preds) {
    const auto points = roc_curve(preds);
    double area = 0.0;
    for (std::size_t k = 1; k < points.size(); ++k)
        area += (points[k].fpr - points[k - 1].fpr) * (points[k].tpr + points[k - 1].tpr) * 0.5;
    return area;
}

std::vector<PrPoint> pr_curve(const PredictionSet& preds) {
    preds.validate();
    const ClassTotals totals = class_totals(preds);
    if (totals.positives == 0)
        throw PipelineError(Errc::NoPositives, "PR curve needs at least one positive");

    const auto order = descending_order(preds);
    std::vector<PrPoint> points;
    std::uint64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double score = preds.scores[order[i]];
        while (i < order.size() && preds.scores[order[i]] == score) {
            preds.labels[order[i]] ? ++tp : ++fp;
            ++i;
        }
        points.push_back({score, static_cast<double>(tp) / totals.positives,
                          static_cast<double>(tp) / static_cast<double>(tp + fp)});
    }
    return points;
}

double auprc(const PredictionSet& preds) {
    const auto points = pr_curve(preds);
    double area = 0.0;
    double prev_recall = 0.0;
    for (const auto& pt : points) {
        area += (pt.recall - prev_recall) * pt.precision;
        prev_recall = pt.recall;
    }
    return area;
}

// ---------------------------------------------------------------------------
// DeLong test for two correlated AUCs
// ---------------------------------------------------------------------------

namespace {

struct Placements {
    double auc = 0;
    std::vector<double> v10; // per positive
    std::vector<double> v01; // per negative
};

// Midrank placements in one sorted pass: for positive i the fraction of
// negatives scored below it (ties half-credited); symmetrically for
// negatives.
Placements placements(const std::vector<double>& scores, const std::vector<int>& labels) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    std::size_t num_pos = 0, num_neg = 0;
    for (int y : labels)
        y ? ++num_pos : ++num_neg;

    Placements out;
    out.v10.assign(num_pos, 0.0);
    out.v01.assign(num_neg, 0.0);

    // position of each sample within its own class, in input order
    std::vector<std::size_t> class_pos(n);
    {
        std::size_t p = 0, q = 0;
        for (std::size_t i = 0; i < n; ++i)
            class_pos[i] = labels[i] ? p++ : q++;
    }

    std::size_t pos_below = 0, neg_below = 0;
    std::size_t i = 0;
    while (i < n) {
        const double score = scores[order[i]];
        std::size_t j = i, pos_tied = 0, neg_tied = 0;
        while (j < n && scores[order[j]] == score) {
            labels[order[j]] ? ++pos_tied : ++neg_tied;
            ++j;
        }
        for (std::size_t k = i; k < j; ++k) {
            const std::size_t idx = order[k];
            if (labels[idx]) {
                out.v10[class_pos[idx]] =
                    (static_cast<double>(neg_below) + 0.5 * neg_tied) / num_neg;
            } else {
                const std::size_t pos_above = num_pos - pos_below - pos_tied;
                out.v01[class_pos[idx]] =
                    (static_cast<double>(pos_above) + 0.5 * pos_tied) / num_pos;
            }
        }
        pos_below += pos_tied;
        neg_below += neg_tied;
        i = j;
    }

    out.auc = std::accumulate(out.v10.begin(), out.v10.end(), 0.0) / num_pos;
    return out;
}

double covariance(const std::vector<double>& a, const std::vector<double>& b, double mean_a,
                  double mean_b) {
    if (a.size() < 2)
        return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += (a[i] - mean_a) * (b[i] - mean_b);
    return sum / static_cast<double>(a.size() - 1);
}

} // namespace

DelongResult delong_test(const std::vector<double>& scores_a,
                         const std::vector<double>& scores_b,
                         const std::vector<int>& labels) {
    if (scores_a.size() != labels.size() || scores_b.size() != labels.size())
        throw PipelineError(Errc::LengthMismatch, "score vectors must align with labels");
    if (labels.empty())
        throw PipelineError(Errc::SingleClass, "empty label vector");
    std::size_t num_pos = 0;
    for (int y : labels)
        if (y)
            ++num_pos;
    if (num_pos == 0 || num_pos == labels.size())
        throw PipelineError(Errc::SingleClass, "DeLong test needs both classes");

    const Placements pa = placements(scores_a, labels);
    const Placements pb = placements(scores_b, labels);

    const double m = static_cast<double>(pa.v10.size());
    const double n = static_cast<double>(pa.v01.size());

    const double s10_aa = covariance(pa.v10, pa.v10, pa.auc, pa.auc);
    const double s10_bb = covariance(pb.v10, pb.v10, pb.auc, pb.auc);
    const double s10_ab = covariance(pa.v10, pb.v10, pa.auc, pb.auc);
    const double s01_aa = covariance(pa.v01, pa.v01, 1.0 - pa.auc, 1.0 - pa.auc);
    const double s01_bb = covariance(pb.v01, pb.v01, 1.0 - pb.auc, 1.0 - pb.auc);
    const double s01_ab = covariance(pa.v01, pb.v01, 1.0 - pa.auc, 1.0 - pb.auc);

    DelongResult result;
    result.auc_a = pa.auc;
    result.auc_b = pb.auc;
    result.delta = pa.auc - pb.auc;

    const double var = (s10_aa + s10_bb - 2.0 * s10_ab) / m + (s01_aa + s01_bb - 2.0 * s01_ab) / n;
    if (var <= 0.0) {
        result.z = 0.0;
        result.p_two_sided = (result.delta == 0.0) ? 1.0 : 0.0;
        return result;
    }
    result.z = result.delta / std::sqrt(var);
    result.p_two_sided = std::erfc(std::abs(result.z) / std::sqrt(2.0));
    return result;
}

// ---------------------------------------------------------------------------
// Threshold sweep
// ---------------------------------------------------------------------------

double sweep_objective_at(const PredictionSet& preds, double threshold,
                          SweepObjective objective) {
    const ConfusionCounts c = confusion(preds, threshold);
    switch (objective) {
    case SweepObjective::Accuracy: return accuracy(c);
    case SweepObjective::Youden: return sensitivity(c) + specificity(c);
    }
    return 0.0;
}

SweepResult threshold_sweep(const PredictionSet& preds, SweepObjective objective) {
    preds.validate();
    const ClassTotals totals = class_totals(preds);
    if (totals.positives == 0 || totals.negatives == 0)
        throw PipelineError(Errc::SingleClass, "threshold sweep needs both classes");

    std::vector<double> distinct = preds.scores;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<double> candidates;
    candidates.push_back(0.0);
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
        candidates.push_back(0.5 * (distinct[i] + distinct[i + 1]));
    candidates.push_back(1.0);
    std::sort(candidates.begin(), candidates.end());

    SweepResult best;
    bool first = true;
    for (double t : candidates) {
        const double value = sweep_objective_at(preds, t, objective);
        // >= so that equal objective values resolve to the higher threshold
        if (first || value >= best.objective_value) {
            first = false;
            best.threshold = t;
            best.objective_value = value;
        }
    }
    best.counts = confusion(preds, best.threshold);
    best.accuracy = accuracy(best.counts);
    best.sensitivity = sensitivity(best.counts);
    best.specificity = specificity(best.counts);
    return best;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

EvalReport evaluate(const PredictionSet& preds, double threshold) {
    preds.validate();
    const ClassTotals totals = class_totals(preds);

    EvalReport report;
    report.total = preds.size();
    report.num_positive = totals.positives;
    report.num_negative = totals.negatives;
    report.threshold = threshold;
    report.counts = confusion(preds, threshold);
    report.log_loss = log_loss(preds);

    report.accuracy = accuracy(report.counts);
    if (totals.positives > 0)
        report.sensitivity = sensitivity(report.counts);
    if (totals.negatives > 0)
        report.specificity = specificity(report.counts);
    if (report.counts.tp + report.counts.fp > 0)
        report.precision = precision(report.counts);
    if (report.precision && report.sensitivity && (*report.precision + *report.sensitivity) > 0)
        report.f1 = f1(report.counts);

    if (totals.positives > 0 && totals.negatives > 0) {
        report.auc = auc(preds);
        report.roc_points = roc_curve(preds);
    }
    if (totals.positives > 0) {
        report.auprc = auprc(preds);
        report.pr_points = pr_curve(preds);
    }
    return report;
}

namespace {

std::string metric_str(const std::optional<double>& v) {
    if (!v)
        return "NA";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", *v);
    return buf;
}

} // namespace

void write_report(const EvalReport& report, std::ostream& out) {
    out << "Total " << report.total << "\n";
    out << "#Positive " << report.num_positive << "\n";
    out << "#Negative " << report.num_negative << "\n";
    out << "AUC " << metric_str(report.auc) << "\n";
    out << "AUPRC " << metric_str(report.auprc) << "\n";
    out << "Accuracy " << metric_str(report.accuracy) << "\n";
    out << "LogLoss " << metric_str(report.log_loss) << "\n";
    out << "f1 " << metric_str(report.f1) << "\n";
    out << "Sensitivity " << metric_str(report.sensitivity) << "\n";
    out << "Specificity " << metric_str(report.specificity) << "\n";
    out << "#FP " << report.counts.fp << "\n";
    out << "#FN " << report.counts.fn << "\n";
}

void write_roc_csv(const std::vector<RocPoint>& points, std::ostream& out) {
    out << "threshold,fpr,tpr\n";
    char buf[128];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", p.threshold, p.fpr, p.tpr);
        out << buf;
    }
}

void write_pr_csv(const std::vector<PrPoint>& points, std::ostream& out) {
    out << "threshold,recall,precision\n";
    char buf[128];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", p.threshold, p.recall,
                      p.precision);
        out << buf;
    }
}

} // namespace ctscreen::metrics
