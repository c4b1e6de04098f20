#pragma once

// Minimal Explicit VR Little Endian writer for exercising the ingest parser.

#include <cstdint>
#include <string>
#include <vector>

namespace dicomfix {

struct Options {
    std::string transfer_syntax = "1.2.840.10008.1.2.1";
    std::string photometric = "MONOCHROME2";
    std::uint16_t bits_allocated = 16;
    std::uint16_t pixel_representation = 0;
    bool include_instance_number = true;
    bool include_position = true;
    bool include_spacing = true;
    bool include_slope = true;
    bool include_intercept = true;
};

class Writer {
public:
    std::vector<std::uint8_t> bytes;

    void u16(std::uint16_t v) {
        bytes.push_back(static_cast<std::uint8_t>(v & 0xFF));
        bytes.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i)
            bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void raw(const void* p, std::size_t n) {
        const auto* c = static_cast<const std::uint8_t*>(p);
        bytes.insert(bytes.end(), c, c + n);
    }

    // short-form element with a string value, padded to even length
    void str_element(std::uint16_t group, std::uint16_t elem, const char vr[2],
                     std::string value, char pad = ' ') {
        if (value.size() % 2)
            value.push_back(pad);
        u16(group);
        u16(elem);
        bytes.push_back(vr[0]);
        bytes.push_back(vr[1]);
        u16(static_cast<std::uint16_t>(value.size()));
        raw(value.data(), value.size());
    }

    void us_element(std::uint16_t group, std::uint16_t elem, std::uint16_t value) {
        u16(group);
        u16(elem);
        bytes.push_back('U');
        bytes.push_back('S');
        u16(2);
        u16(value);
    }

    void ow_element(std::uint16_t group, std::uint16_t elem,
                    const std::vector<std::uint16_t>& words) {
        u16(group);
        u16(elem);
        bytes.push_back('O');
        bytes.push_back('W');
        u16(0); // reserved
        u32(static_cast<std::uint32_t>(words.size() * 2));
        for (std::uint16_t w : words)
            u16(w);
    }
};

inline std::vector<std::uint8_t> make_file(int rows, int cols, long long instance_number,
                                           double z_mm, const std::vector<std::uint16_t>& pixels,
                                           double slope = 1.0, double intercept = -1024.0,
                                           const Options& opt = {}) {
    Writer w;
    w.bytes.assign(128, 0);
    w.raw("DICM", 4);

    w.str_element(0x0002, 0x0010, "UI", opt.transfer_syntax, '\0');

    if (opt.include_instance_number)
        w.str_element(0x0020, 0x0013, "IS", std::to_string(instance_number));
    if (opt.include_position)
        w.str_element(0x0020, 0x0032, "DS", "0\\0\\" + std::to_string(z_mm));
    w.us_element(0x0028, 0x0002, 1);
    w.str_element(0x0028, 0x0004, "CS", opt.photometric);
    w.us_element(0x0028, 0x0010, static_cast<std::uint16_t>(rows));
    w.us_element(0x0028, 0x0011, static_cast<std::uint16_t>(cols));
    if (opt.include_spacing)
        w.str_element(0x0028, 0x0030, "DS", "0.7\\0.7");
    w.us_element(0x0028, 0x0100, opt.bits_allocated);
    w.us_element(0x0028, 0x0103, opt.pixel_representation);
    if (opt.include_intercept)
        w.str_element(0x0028, 0x1052, "DS", std::to_string(intercept));
    if (opt.include_slope)
        w.str_element(0x0028, 0x1053, "DS", std::to_string(slope));
    w.ow_element(0x7FE0, 0x0010, pixels);
    return w.bytes;
}

} // namespace dicomfix
