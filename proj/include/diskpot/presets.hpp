#pragma once

// Text presets for boundary data and sources:
//
//   const:<v>               constant
//   cos:<k>, sin:<k>        single harmonic
//   step:<b>:<rotation>     +1 on an arc of length pi (1 + b) centred at rotation, -1 elsewhere
//   trig:<c0,a1,b1,a2,...>  c0 + sum a_k cos k theta + b_k sin k theta
//   poly:<coeffs>           polynomial in (x, y), graded order 1; x, y; x^2, xy, y^2; ...
//
// Sources accept `const` and `poly`. A `poly` boundary is the restriction of
// the polynomial to the circle, converted to its trigonometric form.

#include <charconv>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "potentials.hpp"

namespace diskpot {

class PresetError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline double parse_number(std::string_view text, std::string_view preset) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw PresetError("preset '" + std::string(preset) + "': bad number '" + std::string(text) + "'");
    }
    return v;
}

inline int parse_harmonic(std::string_view text, std::string_view preset) {
    const double v = parse_number(text, preset);
    if (v < 0.0 || v != std::floor(v) || v > 1e6) {
        throw PresetError("preset '" + std::string(preset) + "': harmonic index must be a non-negative integer");
    }
    return static_cast<int>(v);
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        out.push_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

inline std::vector<double> parse_list(std::string_view text, std::string_view preset) {
    std::vector<double> out;
    for (auto item : split(text, ',')) {
        out.push_back(parse_number(item, preset));
    }
    return out;
}

/// Splits "name:rest" and returns {name, rest}.
inline std::pair<std::string_view, std::string_view> preset_head(std::string_view preset) {
    const std::size_t colon = preset.find(':');
    if (colon == std::string_view::npos) {
        throw PresetError("preset '" + std::string(preset) + "': expected <kind>:<arguments>");
    }
    return {preset.substr(0, colon), preset.substr(colon + 1)};
}

/// Trigonometric form of p(cos t, sin t). p has degree d, so its restriction
/// has bandwidth d and a DFT on 2d + 2 points recovers it exactly.
inline BoundaryFunction restrict_to_circle(const Polynomial2& p) {
    const int d = p.degree();
    const int m = 2 * d + 2;
    std::vector<double> values(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        const double t = two_pi * j / m;
        values[static_cast<std::size_t>(j)] = p(std::cos(t), std::sin(t));
    }
    std::vector<double> a(static_cast<std::size_t>(d) + 1, 0.0);
    std::vector<double> b(static_cast<std::size_t>(d), 0.0);
    for (int k = 0; k <= d; ++k) {
        double ca = 0.0;
        double sb = 0.0;
        for (int j = 0; j < m; ++j) {
            const double t = two_pi * static_cast<double>(static_cast<long>(k) * j % m) / m;
            ca += values[static_cast<std::size_t>(j)] * std::cos(t);
            sb += values[static_cast<std::size_t>(j)] * std::sin(t);
        }
        a[static_cast<std::size_t>(k)] = (k == 0 ? 1.0 : 2.0) * ca / m;
        if (k > 0) {
            b[static_cast<std::size_t>(k) - 1] = 2.0 * sb / m;
        }
    }
    return BoundaryFunction::trig(std::move(a), std::move(b));
}

inline Polynomial2 parse_polynomial(std::string_view args, std::string_view preset) {
    std::vector<double> coeffs = parse_list(args, preset);
    try {
        return Polynomial2(std::move(coeffs));
    } catch (const std::exception& e) {
        throw PresetError("preset '" + std::string(preset) + "': " + e.what());
    }
}

} // namespace detail

inline BoundaryFunction parse_boundary(std::string_view preset) {
    const auto [kind, args] = detail::preset_head(preset);
    try {
        if (kind == "const") {
            return BoundaryFunction::constant(detail::parse_number(args, preset));
        }
        if (kind == "cos") {
            return BoundaryFunction::cosine(detail::parse_harmonic(args, preset));
        }
        if (kind == "sin") {
            return BoundaryFunction::sine(detail::parse_harmonic(args, preset));
        }
        if (kind == "step") {
            const auto parts = detail::split(args, ':');
            if (parts.size() != 2) {
                throw PresetError("preset '" + std::string(preset) + "': expected step:<b>:<rotation>");
            }
            return BoundaryFunction::step(detail::parse_number(parts[0], preset),
                                          detail::parse_number(parts[1], preset));
        }
        if (kind == "trig") {
            const auto list = detail::parse_list(args, preset);
            std::vector<double> a{list[0]};
            std::vector<double> b;
            for (std::size_t i = 1; i < list.size(); ++i) {
                (i % 2 == 1 ? a : b).push_back(list[i]);
            }
            b.resize(a.size() - 1, 0.0);
            return BoundaryFunction::trig(std::move(a), std::move(b));
        }
        if (kind == "poly") {
            return detail::restrict_to_circle(detail::parse_polynomial(args, preset));
        }
    } catch (const DomainError& e) {
        throw PresetError("preset '" + std::string(preset) + "': " + e.what());
    }
    throw PresetError("unknown boundary preset kind '" + std::string(kind) + "'");
}

inline SourceField parse_source(std::string_view preset) {
    const auto [kind, args] = detail::preset_head(preset);
    if (kind == "const") {
        return SourceField::constant(detail::parse_number(args, preset));
    }
    if (kind == "poly") {
        return SourceField::polynomial(detail::parse_polynomial(args, preset));
    }
    throw PresetError("unknown source preset kind '" + std::string(kind) + "' (expected const or poly)");
}

} // namespace diskpot
