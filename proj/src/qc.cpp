#include "ctscreen/qc.hpp"

#include "ctscreen/errors.hpp"
#include "ctscreen/text.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ctscreen::qc {

const char* defect_name(Defect d) {
    switch (d) {
    case Defect::GapDetected: return "GapDetected";
    case Defect::UnevenSpacing: return "UnevenSpacing";
    case Defect::TooFewSlices: return "TooFewSlices";
    }
    return "?";
}

bool QcReport::has(Defect d) const {
    return std::find(reasons.begin(), reasons.end(), d) != reasons.end();
}

QcReport check_spacing(const CtVolume& volume, double gap_factor, double jitter_tol) {
    if (volume.num_slices() < 2)
        throw PipelineError(Errc::TooFewSlices, "spacing check needs at least 2 slices");

    std::vector<double> gaps(volume.num_slices() - 1);
    for (std::size_t i = 0; i + 1 < volume.num_slices(); ++i)
        gaps[i] = volume.slice_positions_mm[i + 1] - volume.slice_positions_mm[i];

    std::vector<double> sorted = gaps;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size() / 2;
    const double median =
        (sorted.size() % 2 == 1) ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);

    QcReport report;
    report.median_spacing_mm = median;
    bool gap = false, uneven = false;
    for (double g : gaps) {
        if (g > gap_factor * median)
            gap = true;
        else if (std::abs(g - median) > jitter_tol * median)
            uneven = true;
    }
    if (gap)
        report.reasons.push_back(Defect::GapDetected);
    if (uneven)
        report.reasons.push_back(Defect::UnevenSpacing);
    return report;
}

std::pair<CtVolume, std::size_t> remove_duplicate_slices(const CtVolume& volume) {
    CtVolume out;
    out.rows = volume.rows;
    out.cols = volume.cols;
    out.pixel_spacing_mm = volume.pixel_spacing_mm;

    std::size_t removed = 0;
    for (std::size_t i = 0; i < volume.num_slices(); ++i) {
        bool duplicate = false;
        for (const auto& kept : out.slices) {
            if (kept == volume.slices[i]) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) {
            ++removed;
            continue;
        }
        out.slices.push_back(volume.slices[i]);
        out.slice_positions_mm.push_back(volume.slice_positions_mm[i]);
        out.source_ids.push_back(volume.source_ids[i]);
    }
    return {std::move(out), removed};
}

GateResult qc_gate(const CtVolume& volume, const QcPolicy& policy) {
    GateResult result;
    auto [cleaned, removed] = remove_duplicate_slices(volume);
    result.report.duplicates_removed = removed;

    if (cleaned.num_slices() >= 2) {
        const QcReport spacing =
            check_spacing(cleaned, policy.gap_factor, policy.jitter_tol);
        result.report.reasons = spacing.reasons;
        result.report.median_spacing_mm = spacing.median_spacing_mm;
    }
    if (cleaned.num_slices() < policy.min_slices)
        result.report.reasons.push_back(Defect::TooFewSlices);

    const bool reject =
        result.report.has(Defect::GapDetected) || result.report.has(Defect::TooFewSlices);
    result.report.verdict = reject ? Verdict::Reject : Verdict::Accept;
    if (!reject)
        result.cleaned = std::move(cleaned);
    return result;
}

std::string report_line(const std::string& volume_id, const QcReport& report) {
    std::ostringstream os;
    os << volume_id << ", " << (report.verdict == Verdict::Accept ? "Accept" : "Reject") << ", ";
    for (std::size_t i = 0; i < report.reasons.size(); ++i)
        os << (i ? "," : "") << defect_name(report.reasons[i]);
    if (report.reasons.empty())
        os << "-";
    os << ", " << report.duplicates_removed << ", "
       << text::format_double(report.median_spacing_mm);
    return os.str();
}

} // namespace ctscreen::qc
