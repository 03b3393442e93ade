#pragma once

#include <cmath>
#include <vector>

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}
