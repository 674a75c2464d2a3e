#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "sketch.hpp"

namespace ccsketch {

class parse_error : public error {
public:
    parse_error(std::size_t line, const std::string& what)
        : error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace detail

/// Parses one "index increment" line. Returns false for blank and '#' lines.
inline bool parse_stream_line(std::string_view raw, std::size_t line_no, StreamUpdate& out)
{
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#')
        return false;
    const auto sep = line.find_first_of(" \t");
    if (sep == std::string_view::npos)
        throw parse_error(line_no, "expected 'index increment'");
    const std::string_view idx = line.substr(0, sep);
    const std::string_view inc = detail::trim(line.substr(sep));
    if (inc.find_first_of(" \t") != std::string_view::npos)
        throw parse_error(line_no, "expected exactly two fields");

    std::uint64_t index = 0;
    auto r1 = std::from_chars(idx.data(), idx.data() + idx.size(), index);
    if (r1.ec != std::errc{} || r1.ptr != idx.data() + idx.size())
        throw parse_error(line_no, "bad index '" + std::string(idx) + "'");

    // from_chars for double rejects a leading '+'
    std::string_view inc_digits = inc;
    if (!inc_digits.empty() && inc_digits.front() == '+')
        inc_digits.remove_prefix(1);
    double increment = 0.0;
    auto r2 = std::from_chars(inc_digits.data(), inc_digits.data() + inc_digits.size(), increment);
    if (r2.ec != std::errc{} || r2.ptr != inc_digits.data() + inc_digits.size() || !std::isfinite(increment))
        throw parse_error(line_no, "bad increment '" + std::string(inc) + "'");
    out = {index, increment};
    return true;
}

/// Calls sink(update) for every update in a text stream.
template <typename Sink>
std::size_t for_each_update(std::istream& in, Sink&& sink)
{
    std::string line;
    std::size_t line_no = 0;
    std::size_t count = 0;
    StreamUpdate u{};
    while (std::getline(in, line)) {
        ++line_no;
        if (parse_stream_line(line, line_no, u)) {
            sink(u, line_no);
            ++count;
        }
    }
    return count;
}

/// Materializes the final frequency vector of a bounded stream. Negative
/// final frequencies break the strict-turnstile model and are rejected.
inline std::vector<double> materialize_stream(std::istream& in, std::uint64_t domain_size)
{
    if (domain_size == 0)
        throw config_error("materializing a stream needs a bounded domain");
    std::vector<double> a(domain_size, 0.0);
    for_each_update(in, [&](const StreamUpdate& u, std::size_t line_no) {
        if (u.index >= domain_size)
            throw parse_error(line_no, "index " + std::to_string(u.index) + " outside domain of size " +
                                           std::to_string(domain_size));
        a[u.index] += u.increment;
    });
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] < 0.0)
            throw turnstile_violation_error("final frequency of index " + std::to_string(i) + " is negative (" +
                                            std::to_string(a[i]) + ")");
    return a;
}

} // namespace ccsketch
