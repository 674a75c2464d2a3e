#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "sketch.hpp"

namespace ccsketch {

// Sketch file layout (all integers and floats little-endian):
//
//   "CCSK" | 0x01 | delta f64 | k u32 | seed u64 | domain_size u64 | f1 f64 | x[0..k) f64
//
// domain_size == 0 marks an unbounded sketch.
inline constexpr std::array<char, 4> sketch_magic{'C', 'C', 'S', 'K'};
inline constexpr std::uint8_t sketch_format_version = 0x01;
inline constexpr std::uint32_t max_serialized_k = 1u << 24;

namespace detail {

template <typename U>
void put_le(std::ostream& out, U value)
{
    std::array<char, sizeof(U)> bytes{};
    for (std::size_t b = 0; b < sizeof(U); ++b)
        bytes[b] = static_cast<char>((value >> (8 * b)) & 0xFF);
    out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in, const char* field)
{
    std::array<unsigned char, sizeof(U)> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
        throw format_error(std::string("truncated sketch file while reading ") + field);
    U value = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b)
        value |= static_cast<U>(bytes[b]) << (8 * b);
    return value;
}

inline void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

inline double get_f64(std::istream& in, const char* field)
{
    return std::bit_cast<double>(get_le<std::uint64_t>(in, field));
}

} // namespace detail

inline void write_sketch(std::ostream& out, const CCSketch& sketch)
{
    const SketchConfig& c = sketch.config();
    out.write(sketch_magic.data(), sketch_magic.size());
    out.put(static_cast<char>(sketch_format_version));
    detail::put_f64(out, c.delta);
    detail::put_le<std::uint32_t>(out, c.k);
    detail::put_le<std::uint64_t>(out, c.seed);
    detail::put_le<std::uint64_t>(out, c.domain_size);
    detail::put_f64(out, sketch.f1());
    for (double xj : sketch.x())
        detail::put_f64(out, xj);
    if (!out)
        throw format_error("failed writing sketch");
}

inline CCSketch read_sketch(std::istream& in)
{
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != sketch_magic)
        throw format_error("not a sketch file (bad magic bytes)");
    const int version = in.get();
    if (version != sketch_format_version)
        throw format_error("unsupported sketch format version " + std::to_string(version));

    SketchConfig c;
    c.delta = detail::get_f64(in, "delta");
    c.k = detail::get_le<std::uint32_t>(in, "k");
    c.seed = detail::get_le<std::uint64_t>(in, "seed");
    c.domain_size = detail::get_le<std::uint64_t>(in, "domain_size");
    try {
        c.validate();
    } catch (const config_error& e) {
        throw format_error(std::string("invalid sketch header: ") + e.what());
    }
    if (c.k > max_serialized_k)
        throw format_error("sample count " + std::to_string(c.k) + " exceeds the supported maximum");
    const double f1 = detail::get_f64(in, "f1");
    std::vector<double> x(c.k);
    for (auto& xj : x)
        xj = detail::get_f64(in, "accumulators");
    if (in.peek() != std::char_traits<char>::eof())
        throw format_error("trailing bytes after sketch payload");
    return CCSketch(c, f1, std::move(x));
}

} // namespace ccsketch
