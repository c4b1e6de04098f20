#pragma once

#include <stdexcept>
#include <string>

namespace ctscreen {

enum class Errc {
    // ingest
    UnsupportedEncoding,
    MissingAttribute,
    InconsistentSeries,
    MalformedHeader,
    SizeMismatch,
    // qc / fingerprint
    TooFewSlices,
    LengthMismatch,
    // encode
    IndexOutOfRange,
    SphereOutOfBounds,
    OverlapNotAllowed,
    DetectionFailed,
    // pyramid
    NoduleOutsideExtent,
    MalformedScheme,
    // gbdt
    DimensionMismatch,
    MalformedModel,
    // metrics
    EmptyCounts,
    UndefinedMetric,
    SingleClass,
    NoPositives,
    // shared
    InvalidArgument,
};

const char* errc_name(Errc code);

class PipelineError : public std::runtime_error {
public:
    PipelineError(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

// Non-fatal findings surfaced alongside results (duplicate instance
// numbers, degenerate training labels, ...).
struct Warning {
    std::string code;
    std::string message;
};

} // namespace ctscreen
