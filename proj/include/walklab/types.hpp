#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace walklab {

/// One replica of the continuum limit at horizon t: the Kesten-Spitzer value
/// Delta_t, the Brownian endpoint B_t, the self-intersection time V_t and the
/// local time in the bin containing 0 and the total occupation mass.
struct LimitSample {
    double delta = 0.0;
    double delta_integral = 0.0;  // integral-mode value on the same path, for cross-checks
    double b = 0.0;
    double v = 0.0;
    double l0 = 0.0;
    double mass = 0.0;  // sum over bins of L h
};

struct QuadratureSettings {
    int order = 8;           // Gauss-Legendre nodes per panel
    int panels = 4;          // panels at the coarse level; the check level doubles this
    double tolerance = 1e-12;
};

/// C(n) for even n, with the quadrature settings that produced it.
struct CnTable {
    std::map<int, double> values;
    QuadratureSettings settings;

    double at(int n) const {
        const auto it = values.find(n);
        if (it == values.end()) throw std::out_of_range("C(" + std::to_string(n) + ") not tabulated");
        return it->second;
    }
};

}  // namespace walklab
