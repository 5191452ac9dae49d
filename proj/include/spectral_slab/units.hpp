#pragma once

// Parsing of unit-suffixed quantities used on the command line:
// lengths "1500nm", "300um", "0.3mm", "3e-4m"; gains "40cm-1", "4000m-1".
// A bare number is taken in SI (m, 1/m).

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace spectral_slab::units {

namespace detail {

inline std::pair<double, std::string_view> split_number(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr == text.data())
        throw ValidationError("cannot parse number in '" + std::string(text) + "'");
    std::string_view suffix(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr));
    while (!suffix.empty() && suffix.front() == ' ') suffix.remove_prefix(1);
    if (!std::isfinite(value)) throw ValidationError("non-finite value '" + std::string(text) + "'");
    return {value, suffix};
}

}  // namespace detail

/// Length in metres.
inline double parse_length(std::string_view text) {
    auto [v, unit] = detail::split_number(text);
    if (unit.empty() || unit == "m") return v;
    if (unit == "mm") return v * 1e-3;
    if (unit == "um" || unit == "μm") return v * 1e-6;
    if (unit == "nm") return v * 1e-9;
    throw ValidationError("unknown length unit '" + std::string(unit) + "' (use nm, um, mm or m)");
}

/// Gain coefficient in 1/m.
inline double parse_gain(std::string_view text) {
    auto [v, unit] = detail::split_number(text);
    if (unit.empty() || unit == "m-1" || unit == "1/m") return v;
    if (unit == "cm-1" || unit == "1/cm") return v * 100.0;
    throw ValidationError("unknown gain unit '" + std::string(unit) + "' (use cm-1 or m-1)");
}

inline double to_nm(double metres) { return metres * 1e9; }
inline double to_cm1(double per_metre) { return per_metre / 100.0; }

}  // namespace spectral_slab::units
