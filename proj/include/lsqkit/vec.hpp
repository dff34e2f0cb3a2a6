/// @file vec.hpp
/// @brief Small dense-vector kernels used throughout the solvers.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace lsqkit {

inline double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(std::span<const double> x) {
    return std::sqrt(dot(x, x));
}

/// y += a * x
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scale(double a, std::span<double> x) {
    for (double& xi : x) xi *= a;
}

inline bool all_finite(std::span<const double> x) {
    for (double xi : x)
        if (!std::isfinite(xi)) return false;
    return true;
}

}  // namespace lsqkit
