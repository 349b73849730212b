#pragma once

namespace hdm {

// sign(t) (|t| - lam)_+
double prox_l1(double t, double lam);

// argmin_s lam |s|^q + (s - t)^2 / 2 for q in [1, 2]. Safeguarded Newton on
// s + lam q s^(q-1) = |t|; throws NumericalError after 200 iterations.
double prox_lq(double t, double lam, double q);

}  // namespace hdm
