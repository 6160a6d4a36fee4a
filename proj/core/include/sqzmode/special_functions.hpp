#pragma once

namespace sqzmode {

/// Generalized Laguerre polynomial L_p^alpha(x) by the forward three-term
/// recurrence. Throws InvalidArgument for p < 0.
double generalized_laguerre(int p, double alpha, double x);

/// Bessel function of the first kind J_n(x) for integer n >= 0 and x >= 0.
///
/// Miller's backward recurrence from an order well above max(n, x),
/// normalized with J_0 + 2 sum J_2k = 1. Stable for every (n, x); absolute
/// error stays near 1e-15 over the range the mode evaluators use.
/// Throws InvalidArgument for negative order or argument.
double bessel_j(int n, double x);

/// k-th positive zero (k >= 1) of J_n, located by bracketing on a fine step
/// and refined by bisection to full double precision.
double bessel_j_zero(int n, int k);

/// First zero of J_0.
inline constexpr double kBesselJ0FirstZero = 2.404825557695773;

}  // namespace sqzmode
