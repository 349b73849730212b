#pragma once

#include "hdm/common.hpp"

namespace hdm {

// g = Z' eta. Columns are split across threads and each column is summed in
// row order, so the result is bit-identical for any thread count.
void zt_times(const Matrix& Z, const Vec& eta, Vec& g);
// out = Z theta.
void z_times(const Matrix& Z, const Vec& theta, Vec& out);

namespace reference {
void zt_times(const Matrix& Z, const Vec& eta, Vec& g);
}

}  // namespace hdm
