#include "ctscreen/ingest.hpp"

#include "ctscreen/text.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace ctscreen::ingest {

namespace {

[[noreturn]] void malformed(const std::string& what) {
    throw PipelineError(Errc::MalformedHeader, what);
}

long long header_int(const std::map<std::string, std::vector<std::string>>& kv,
                     const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end())
        malformed("missing field: " + key);
    if (it->second.size() != 1)
        malformed("field " + key + " expects one value");
    const auto v = text::parse_int(it->second[0]);
    if (!v)
        malformed("field " + key + " is not an integer");
    return *v;
}

} // namespace

CtVolume parse_desk_volume(std::istream& header, std::istream& blob) {
    std::map<std::string, std::vector<std::string>> kv;
    std::string line;
    while (std::getline(header, line)) {
        const std::string t = text::trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        auto tokens = text::split_ws(t);
        const std::string key = tokens.front();
        tokens.erase(tokens.begin());
        if (kv.count(key))
            malformed("duplicate field: " + key);
        kv.emplace(key, std::move(tokens));
    }

    CtVolume v;
    v.rows = static_cast<int>(header_int(kv, "rows"));
    v.cols = static_cast<int>(header_int(kv, "cols"));
    const long long num_slices = header_int(kv, "num_slices");
    if (v.rows <= 0 || v.cols <= 0 || num_slices <= 0)
        malformed("dimensions must be positive");

    const auto spacing_it = kv.find("pixel_spacing_mm");
    if (spacing_it == kv.end() || spacing_it->second.size() != 2)
        malformed("pixel_spacing_mm expects two values");
    const auto row_mm = text::parse_double(spacing_it->second[0]);
    const auto col_mm = text::parse_double(spacing_it->second[1]);
    if (!row_mm || !col_mm || *row_mm <= 0 || *col_mm <= 0)
        malformed("pixel_spacing_mm must be positive reals");
    v.pixel_spacing_mm = {*row_mm, *col_mm};

    const auto pos_it = kv.find("slice_positions_mm");
    if (pos_it == kv.end())
        malformed("missing field: slice_positions_mm");
    for (const auto& s : pos_it->second) {
        const auto d = text::parse_double(s);
        if (!d)
            malformed("slice_positions_mm contains a non-real value");
        v.slice_positions_mm.push_back(*d);
    }
    if (v.slice_positions_mm.size() != static_cast<std::size_t>(num_slices))
        malformed("slice_positions_mm count disagrees with num_slices");

    const auto ids_it = kv.find("source_ids");
    if (ids_it == kv.end())
        malformed("missing field: source_ids");
    for (const auto& s : ids_it->second) {
        const auto d = text::parse_int(s);
        if (!d)
            malformed("source_ids contains a non-integer value");
        v.source_ids.push_back(static_cast<int>(*d));
    }
    if (v.source_ids.size() != static_cast<std::size_t>(num_slices))
        malformed("source_ids count disagrees with num_slices");

    const std::size_t pixels = v.pixels_per_slice();
    const std::size_t expect_bytes = pixels * static_cast<std::size_t>(num_slices) * 2;
    std::vector<char> raw(expect_bytes);
    blob.read(raw.data(), static_cast<std::streamsize>(expect_bytes));
    if (static_cast<std::size_t>(blob.gcount()) != expect_bytes)
        throw PipelineError(Errc::SizeMismatch,
                            "blob shorter than rows*cols*num_slices*2 bytes");
    if (blob.peek() != std::char_traits<char>::eof())
        throw PipelineError(Errc::SizeMismatch, "blob has trailing bytes");

    v.slices.resize(static_cast<std::size_t>(num_slices));
    const unsigned char* p = reinterpret_cast<const unsigned char*>(raw.data());
    for (auto& slice : v.slices) {
        slice.resize(pixels);
        for (std::size_t i = 0; i < pixels; ++i, p += 2) {
            const std::uint16_t u = static_cast<std::uint16_t>(p[0]) |
                                    static_cast<std::uint16_t>(p[1]) << 8;
            slice[i] = static_cast<std::int16_t>(u);
        }
    }

    v.validate();
    return v;
}

void write_desk_volume(const CtVolume& volume, std::ostream& header, std::ostream& blob) {
    volume.validate();

    header << "rows " << volume.rows << "\n";
    header << "cols " << volume.cols << "\n";
    header << "num_slices " << volume.num_slices() << "\n";
    header << "pixel_spacing_mm " << text::format_double(volume.pixel_spacing_mm.row_mm) << ' '
           << text::format_double(volume.pixel_spacing_mm.col_mm) << "\n";
    header << "slice_positions_mm";
    for (double p : volume.slice_positions_mm)
        header << ' ' << text::format_double(p);
    header << "\n";
    header << "source_ids";
    for (int id : volume.source_ids)
        header << ' ' << id;
    header << "\n";

    std::vector<char> raw;
    raw.reserve(volume.num_slices() * volume.pixels_per_slice() * 2);
    for (const auto& slice : volume.slices) {
        for (std::int16_t hu : slice) {
            const std::uint16_t u = static_cast<std::uint16_t>(hu);
            raw.push_back(static_cast<char>(u & 0xFF));
            raw.push_back(static_cast<char>(u >> 8));
        }
    }
    blob.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

CtVolume read_desk_files(const std::filesystem::path& header_path) {
    std::ifstream header(header_path);
    if (!header)
        throw PipelineError(Errc::MalformedHeader,
                            "cannot open desk header: " + header_path.string());
    std::filesystem::path blob_path = header_path;
    blob_path += ".bin";
    std::ifstream blob(blob_path, std::ios::binary);
    if (!blob)
        throw PipelineError(Errc::SizeMismatch, "cannot open desk blob: " + blob_path.string());
    return parse_desk_volume(header, blob);
}

void write_desk_files(const CtVolume& volume, const std::filesystem::path& header_path) {
    std::ofstream header(header_path);
    std::filesystem::path blob_path = header_path;
    blob_path += ".bin";
    std::ofstream blob(blob_path, std::ios::binary);
    if (!header || !blob)
        throw PipelineError(Errc::SizeMismatch,
                            "cannot open desk outputs for writing: " + header_path.string());
    write_desk_volume(volume, header, blob);
}

} // namespace ctscreen::ingest
