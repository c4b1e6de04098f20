#pragma once

#include "ctscreen/volume.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ctscreen::qc {

enum class Verdict { Accept, Reject };

enum class Defect {
    GapDetected,
    UnevenSpacing, // warning only, never rejects on its own
    TooFewSlices,
};

const char* defect_name(Defect d);

struct QcReport {
    Verdict verdict = Verdict::Accept;
    std::vector<Defect> reasons;
    std::size_t duplicates_removed = 0;
    double median_spacing_mm = 0.0;

    bool has(Defect d) const;
};

struct QcPolicy {
    double gap_factor = 1.5;  // spacing > gap_factor * median flags a gap
    double jitter_tol = 0.05; // relative deviation beyond this flags uneven spacing
    std::size_t min_slices = 20;
};

// Spacing check on consecutive slice-position differences. A difference
// strictly above gap_factor*median flags GapDetected; a difference deviating
// from the median by strictly more than jitter_tol*median (without reaching
// the gap bar) flags UnevenSpacing. Throws TooFewSlices below 2 slices.
QcReport check_spacing(const CtVolume& volume, double gap_factor = 1.5,
                       double jitter_tol = 0.05);

// Drops every slice whose HU array is exactly equal to an earlier slice.
// Retained slices keep their order.
std::pair<CtVolume, std::size_t> remove_duplicate_slices(const CtVolume& volume);

struct GateResult {
    QcReport report;
    CtVolume cleaned; // valid only when report.verdict == Accept
};

// Duplicate removal first, spacing check second. Reject iff a gap was
// detected or fewer than policy.min_slices remain.
GateResult qc_gate(const CtVolume& volume, const QcPolicy& policy = {});

// Line format: volume_id, verdict, comma-joined reasons, duplicates_removed,
// median_spacing_mm.
std::string report_line(const std::string& volume_id, const QcReport& report);

} // namespace ctscreen::qc
