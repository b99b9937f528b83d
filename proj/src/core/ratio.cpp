#include "circuloop/core/ratio.hpp"

namespace circuloop {

std::int64_t Ratio::rounded_units(int decimals) const {
    std::int64_t scale = 1;
    for (int i = 0; i < decimals; ++i) scale *= 10;
    std::int64_t scaled = numerator * scale;
    return (2 * scaled + denominator) / (2 * denominator);
}

double Ratio::rounded(int decimals) const {
    double scale = 1.0;
    for (int i = 0; i < decimals; ++i) scale *= 10.0;
    return static_cast<double>(rounded_units(decimals)) / scale;
}

}  // namespace circuloop
