#pragma once

#include <cmath>

namespace poolgame {

// Golden-section maximizer on [lo, hi]. Assumes f is unimodal (the revenue
// objectives here are concave), returns the argmax to within tol.
template <class F>
double maximize_scalar(F&& f, double lo, double hi, double tol = 1e-9) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - (b - a) * inv_phi;
  double d = a + (b - a) * inv_phi;
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * inv_phi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * inv_phi;
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

}  // namespace poolgame
