#pragma once

#include <functional>

#include "hdm/common.hpp"

namespace hdm {

enum class LPStatus { optimal, unbounded, iteration_limit };

struct LPResult {
    LPStatus status = LPStatus::iteration_limit;
    double value = 0.0;
    Vec x;      // primal, length N
    Vec y;      // row duals, length m
    int iterations = 0;
    int bland_pivots = 0;
};

enum class Pricing { dantzig, devex };

struct SimplexOptions {
    int max_iter = 200000;
    int refactor_every = 0;      // 0: every max(100, 2m) pivots
    int degenerate_switch = 30;  // consecutive degenerate pivots before Bland's rule
    double opt_tol = 1e-11;
    double piv_tol = 1e-9;
    Pricing pricing = Pricing::devex;
    // Optional structured product out_j = A_j' v over the structural columns.
    // Defaults to a dense row sweep of A.
    std::function<void(const Vec& v, Vec& out)> transpose_times;
};

// max c'x  s.t.  A x <= b, x >= 0, with b >= 0 so the slack basis is feasible.
// Dense revised simplex with an explicit basis inverse. The entering column
// maximizes the (devex-weighted) reduced cost, lowest index on ties; after a
// run of degenerate pivots it switches to Bland's rule until progress resumes.
LPResult simplex_max(const Matrix& A, const Vec& b, const Vec& c, const SimplexOptions& opt = {});

}  // namespace hdm
