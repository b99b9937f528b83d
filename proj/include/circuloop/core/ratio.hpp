#pragma once

#include <cstdint>

namespace circuloop {

/// Exact non-negative rational used for every published rate. Rounding is
/// done on the integers (half away from zero), never on a binary double.
struct Ratio {
    std::int64_t numerator = 0;
    std::int64_t denominator = 1;

    double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }

    /// Value rounded to `decimals` places, e.g. 198/204 at 4 -> 0.9706.
    double rounded(int decimals) const;

    /// Rounded value scaled to an integer count of 10^-decimals units.
    std::int64_t rounded_units(int decimals) const;

    bool operator==(const Ratio& other) const {
        return numerator * other.denominator == other.numerator * denominator;
    }
};

}  // namespace circuloop
