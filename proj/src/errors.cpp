#include "ctscreen/errors.hpp"

namespace ctscreen {

const char* errc_name(Errc code) {
    switch (code) {
    case Errc::UnsupportedEncoding: return "UnsupportedEncoding";
    case Errc::MissingAttribute: return "MissingAttribute";
    case Errc::InconsistentSeries: return "InconsistentSeries";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::TooFewSlices: return "TooFewSlices";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::SphereOutOfBounds: return "SphereOutOfBounds";
    case Errc::OverlapNotAllowed: return "OverlapNotAllowed";
    case Errc::DetectionFailed: return "DetectionFailed";
    case Errc::NoduleOutsideExtent: return "NoduleOutsideExtent";
    case Errc::MalformedScheme: return "MalformedScheme";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::MalformedModel: return "MalformedModel";
    case Errc::EmptyCounts: return "EmptyCounts";
    case Errc::UndefinedMetric: return "UndefinedMetric";
    case Errc::SingleClass: return "SingleClass";
    case Errc::NoPositives: return "NoPositives";
    case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

} // namespace ctscreen
