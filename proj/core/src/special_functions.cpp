#include "sqzmode/special_functions.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "sqzmode/error.hpp"

namespace sqzmode {

double generalized_laguerre(int p, double alpha, double x) {
  if (p < 0) throw InvalidArgument("generalized_laguerre: negative degree " + std::to_string(p));
  if (p == 0) return 1.0;
  double prev = 1.0;
  double curr = 1.0 + alpha - x;
  for (int k = 1; k < p; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * curr - (k + alpha) * prev) / (k + 1.0);
    prev = curr;
    curr = next;
  }
  return curr;
}

double bessel_j(int n, double x) {
  if (n < 0) throw InvalidArgument("bessel_j: negative order " + std::to_string(n));
  if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("bessel_j: argument must be finite and >= 0");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;

  const double reach = std::max(static_cast<double>(n), x);
  int start = static_cast<int>(reach + 30.0 + 12.0 * std::cbrt(reach));
  start += start % 2;  // even, so the normalization sum pairs up

  constexpr double kBig = 1e250;
  constexpr double kSmall = 1e-250;
  double above = 0.0;   // J_{k+1}
  double here = 1e-300; // J_k, arbitrary scale
  double norm_sum = 0.0;
  double wanted = 0.0;
  for (int k = start; k > 0; --k) {
    const double below = 2.0 * k / x * here - above;  // J_{k-1}
    above = here;
    here = below;
    if (std::abs(here) > kBig) {
      here *= kSmall;
      above *= kSmall;
      norm_sum *= kSmall;
      wanted *= kSmall;
    }
    const int order = k - 1;
    if (order == n) wanted = here;
    if (order > 0 && order % 2 == 0) norm_sum += 2.0 * here;
  }
  norm_sum += here;  // J_0 term
  return wanted / norm_sum;
}

double bessel_j_zero(int n, int k) {
  if (n < 0 || k < 1) throw InvalidArgument("bessel_j_zero: need n >= 0 and k >= 1");
  constexpr double kStep = 0.05;
  int found = 0;
  double a = n == 0 ? kStep : static_cast<double>(n) + kStep;  // zeros of J_n (n>0) lie beyond x = n
  double fa = bessel_j(n, a);
  for (;;) {
    const double b = a + kStep;
    const double fb = bessel_j(n, b);
    if (fa == 0.0) {
      if (++found == k) return a;
    } else if ((fa < 0.0) != (fb < 0.0)) {
      if (++found == k) {
        double lo = a, hi = b, flo = fa;
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (mid == lo || mid == hi) break;
          const double fm = bessel_j(n, mid);
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        return 0.5 * (lo + hi);
      }
    }
    a = b;
    fa = fb;
  }
}

}  // namespace sqzmode
