#pragma once

#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "opspace/linalg.hpp"

namespace testing_support {

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

inline double max_abs_diff(const opspace::ComplexMatrix& a, const opspace::ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

inline opspace::ComplexMatrix unit(int n, int i, int j) {
    opspace::ComplexMatrix e = opspace::ComplexMatrix::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

}  // namespace testing_support
