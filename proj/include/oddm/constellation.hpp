#ifndef ODDM_CONSTELLATION_HPP
#define ODDM_CONSTELLATION_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "oddm/signal.hpp"

namespace oddm {

/// Unit-average-energy constellation with a fixed Gray bit mapping.
/// Point index == bit pattern; 4-QAM maps bit0 -> re sign, bit1 -> im sign.
struct Constellation {
    std::string label;
    std::vector<cd> points;  // points[bits]

    int bits_per_symbol() const {
        int b = 0;
        while ((1u << b) < points.size()) ++b;
        return b;
    }

    int slice(cd y) const {
        int best = 0;
        double dmin = std::norm(y - points[0]);
        for (std::size_t i = 1; i < points.size(); ++i) {
            double d = std::norm(y - points[i]);
            if (d < dmin) { dmin = d; best = static_cast<int>(i); }
        }
        return best;
    }
};

inline Constellation qam4() {
    const double s = 1.0 / std::sqrt(2.0);
    Constellation c;
    c.label = "4qam";
    c.points = {{+s, +s}, {+s, -s}, {-s, +s}, {-s, -s}};  // Gray: b0 -> im, b1 -> re
    return c;
}

inline Constellation make_constellation(const std::string& label) {
    if (label == "4qam" || label == "qpsk") return qam4();
    throw std::invalid_argument("unknown constellation: " + label);
}

}  // namespace oddm

#endif
