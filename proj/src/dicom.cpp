#include "ctscreen/ingest.hpp"

#include "ctscreen/kernels.hpp"
#include "ctscreen/text.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <string>

namespace ctscreen::ingest {

namespace {

constexpr const char* kExplicitVrLittleEndian = "1.2.840.10008.1.2.1";

[[noreturn]] void unsupported(const std::string& what) {
    throw PipelineError(Errc::UnsupportedEncoding, what);
}

struct Cursor {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos = 0;

    bool eof() const { return pos >= size; }

    const std::uint8_t* take(std::size_t n) {
        if (pos + n > size)
            unsupported("truncated DICOM stream");
        const std::uint8_t* p = data + pos;
        pos += n;
        return p;
    }

    std::uint16_t u16() {
        const std::uint8_t* p = take(2);
        return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    }

    std::uint32_t u32() {
        const std::uint8_t* p = take(4);
        return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
               (static_cast<std::uint32_t>(p[2]) << 16) |
               (static_cast<std::uint32_t>(p[3]) << 24);
    }
};

bool is_long_form_vr(const char vr[2]) {
    auto is = [&](const char* s) { return vr[0] == s[0] && vr[1] == s[1]; };
    return is("OB") || is("OW") || is("OF") || is("SQ") || is("UT") || is("UN");
}

bool vr_plausible(const char vr[2]) {
    return vr[0] >= 'A' && vr[0] <= 'Z' && vr[1] >= 'A' && vr[1] <= 'Z';
}

struct Element {
    std::uint16_t group = 0;
    std::uint16_t elem = 0;
    char vr[2] = {0, 0};
    const std::uint8_t* value = nullptr;
    std::uint32_t length = 0;

    std::string str() const {
        return text::trim(std::string_view(reinterpret_cast<const char*>(value), length));
    }

    std::uint16_t us() const {
        if (length < 2)
            unsupported("US element shorter than 2 bytes");
        return static_cast<std::uint16_t>(value[0] | (value[1] << 8));
    }
};

// One element in Explicit VR Little Endian. The File Meta group uses the
// same encoding, so a single reader covers both layers.
Element read_element(Cursor& c) {
    Element e;
    e.group = c.u16();
    e.elem = c.u16();
    const std::uint8_t* vr = c.take(2);
    e.vr[0] = static_cast<char>(vr[0]);
    e.vr[1] = static_cast<char>(vr[1]);
    if (!vr_plausible(e.vr))
        unsupported("not an Explicit VR Little Endian stream (bad VR bytes)");
    if (is_long_form_vr(e.vr)) {
        c.take(2); // reserved
        e.length = c.u32();
    } else {
        e.length = c.u16();
    }
    if (e.length == 0xFFFFFFFFu)
        unsupported("undefined element lengths are not supported");
    if (e.vr[0] == 'S' && e.vr[1] == 'Q')
        unsupported("sequence elements are not supported");
    e.value = c.take(e.length);
    return e;
}

struct FileData {
    long long instance_number = 0;
    bool have_instance = false;
    double ipp_z = 0;
    bool have_ipp = false;
    int rows = 0, cols = 0;
    bool have_rows = false, have_cols = false;
    PixelSpacing spacing;
    bool have_spacing = false;
    RescaleParams rescale;
    bool have_slope = false, have_intercept = false;
    bool pixels_signed = false;
    std::vector<std::uint8_t> pixel_bytes;
    bool have_pixels = false;
};

double parse_ds(const Element& e, const char* what) {
    const auto v = text::parse_double(e.str());
    if (!v)
        throw PipelineError(Errc::MissingAttribute,
                            std::string(what) + " has an unparseable decimal value");
    return *v;
}

std::vector<double> parse_ds_multi(const Element& e, std::size_t count, const char* what) {
    const auto parts = text::split(e.str(), '\\');
    if (parts.size() != count)
        throw PipelineError(Errc::MissingAttribute,
                            std::string(what) + " does not have the expected multiplicity");
    std::vector<double> out;
    for (const auto& p : parts) {
        const auto v = text::parse_double(p);
        if (!v)
            throw PipelineError(Errc::MissingAttribute,
                                std::string(what) + " has an unparseable component");
        out.push_back(*v);
    }
    return out;
}

FileData parse_file(const std::vector<std::uint8_t>& bytes) {
    Cursor c{bytes.data(), bytes.size()};

    const std::uint8_t* preamble = c.take(132);
    if (std::memcmp(preamble + 128, "DICM", 4) != 0)
        unsupported("missing DICM magic");

    FileData f;
    bool transfer_syntax_ok = false;
    while (!c.eof()) {
        const Element e = read_element(c);

        if (e.group == 0x0002) {
            if (e.elem == 0x0010) {
                const std::string ts = e.str();
                if (ts != kExplicitVrLittleEndian)
                    unsupported("transfer syntax " + ts +
                                " (only Explicit VR Little Endian is supported)");
                transfer_syntax_ok = true;
            }
            continue;
        }
        if (!transfer_syntax_ok)
            unsupported("file meta lacks a Transfer Syntax UID");

        switch ((static_cast<std::uint32_t>(e.group) << 16) | e.elem) {
        case 0x0020'0013: { // Instance Number (IS)
            const auto v = text::parse_int(e.str());
            if (!v)
                throw PipelineError(Errc::MissingAttribute,
                                    "Instance Number has an unparseable value");
            f.instance_number = *v;
            f.have_instance = true;
            break;
        }
        case 0x0020'0032: { // Image Position (Patient) (DS, x\y\z)
            f.ipp_z = parse_ds_multi(e, 3, "Image Position Patient")[2];
            f.have_ipp = true;
            break;
        }
        case 0x0028'0002: // Samples per Pixel
            if (e.us() != 1)
                unsupported("only single-sample (grayscale) pixel data is supported");
            break;
        case 0x0028'0004: // Photometric Interpretation
            if (e.str() != "MONOCHROME2")
                unsupported("photometric interpretation " + e.str());
            break;
        case 0x0028'0010:
            f.rows = e.us();
            f.have_rows = true;
            break;
        case 0x0028'0011:
            f.cols = e.us();
            f.have_cols = true;
            break;
        case 0x0028'0030: { // Pixel Spacing (DS, row\col)
            const auto v = parse_ds_multi(e, 2, "Pixel Spacing");
            f.spacing = {v[0], v[1]};
            f.have_spacing = true;
            break;
        }
        case 0x0028'0100: // Bits Allocated
            if (e.us() != 16)
                unsupported("only 16 bits allocated pixel data is supported");
            break;
        case 0x0028'0103: { // Pixel Representation
            const std::uint16_t pr = e.us();
            if (pr > 1)
                unsupported("pixel representation must be 0 or 1");
            f.pixels_signed = (pr == 1);
            break;
        }
        case 0x0028'1052:
            f.rescale.intercept = parse_ds(e, "Rescale Intercept");
            f.have_intercept = true;
            break;
        case 0x0028'1053:
            f.rescale.slope = parse_ds(e, "Rescale Slope");
            f.have_slope = true;
            break;
        case 0x7FE0'0010:
            if (!(e.vr[0] == 'O' && (e.vr[1] == 'W' || e.vr[1] == 'B')))
                unsupported("pixel data must be OW or OB");
            f.pixel_bytes.assign(e.value, e.value + e.length);
            f.have_pixels = true;
            break;
        default:
            break; // unrecognized attributes are skipped
        }
    }

    auto require = [](bool have, const char* name) {
        if (!have)
            throw PipelineError(Errc::MissingAttribute, name);
    };
    require(f.have_instance, "(0020,0013) Instance Number");
    require(f.have_rows, "(0028,0010) Rows");
    require(f.have_cols, "(0028,0011) Columns");
    require(f.have_spacing, "(0028,0030) Pixel Spacing");
    require(f.have_ipp, "(0020,0032) Image Position Patient");
    require(f.have_intercept, "(0028,1052) Rescale Intercept");
    require(f.have_slope, "(0028,1053) Rescale Slope");
    require(f.have_pixels, "(7FE0,0010) Pixel Data");

    if (f.rescale.slope == 0.0)
        throw PipelineError(Errc::MissingAttribute, "Rescale Slope must be nonzero");
    if (f.rows <= 0 || f.cols <= 0)
        throw PipelineError(Errc::InconsistentSeries, "non-positive Rows/Columns");
    const std::size_t expect = static_cast<std::size_t>(f.rows) * f.cols * 2;
    if (f.pixel_bytes.size() != expect)
        throw PipelineError(Errc::InconsistentSeries,
                            "pixel data length disagrees with Rows*Columns*2");
    return f;
}

} // namespace

SeriesResult parse_dicom_series(const std::vector<std::vector<std::uint8_t>>& files) {
    if (files.empty())
        throw PipelineError(Errc::InvalidArgument, "empty DICOM series");

    std::vector<FileData> parsed;
    parsed.reserve(files.size());
    for (const auto& bytes : files)
        parsed.push_back(parse_file(bytes));

    for (std::size_t i = 1; i < parsed.size(); ++i) {
        if (parsed[i].rows != parsed[0].rows || parsed[i].cols != parsed[0].cols)
            throw PipelineError(Errc::InconsistentSeries,
                                "Rows/Columns differ across the series");
        if (parsed[i].spacing.row_mm != parsed[0].spacing.row_mm ||
            parsed[i].spacing.col_mm != parsed[0].spacing.col_mm)
            throw PipelineError(Errc::InconsistentSeries,
                                "Pixel Spacing differs across the series");
    }

    SeriesResult result;

    std::vector<std::size_t> order(parsed.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return parsed[a].instance_number < parsed[b].instance_number;
    });
    bool duplicate_instance = false;
    for (std::size_t i = 1; i < order.size(); ++i)
        if (parsed[order[i]].instance_number == parsed[order[i - 1]].instance_number)
            duplicate_instance = true;
    if (duplicate_instance) {
        result.warnings.push_back(
            {"DuplicateInstanceNumber",
             "two slices share an Instance Number; ordering by Image Position z instead"});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return parsed[a].ipp_z < parsed[b].ipp_z;
        });
    }

    CtVolume& v = result.volume;
    v.rows = parsed[0].rows;
    v.cols = parsed[0].cols;
    v.pixel_spacing_mm = parsed[0].spacing;
    for (std::size_t idx : order) {
        const FileData& f = parsed[idx];
        v.slice_positions_mm.push_back(f.ipp_z);
        v.source_ids.push_back(static_cast<int>(f.instance_number));
        std::vector<std::int16_t> hu(v.pixels_per_slice());
        // pixel bytes are little-endian 16-bit; reinterpret via a u16 copy
        std::vector<std::uint16_t> raw(hu.size());
        for (std::size_t i = 0; i < raw.size(); ++i)
            raw[i] = static_cast<std::uint16_t>(f.pixel_bytes[2 * i] |
                                                (f.pixel_bytes[2 * i + 1] << 8));
        kernels::rescale_to_hu(raw.data(), raw.size(), f.pixels_signed, f.rescale.slope,
                               f.rescale.intercept, hu.data());
        v.slices.push_back(std::move(hu));
    }

    v.validate(); // InconsistentSeries if positions are not strictly increasing
    return result;
}

} // namespace ctscreen::ingest
