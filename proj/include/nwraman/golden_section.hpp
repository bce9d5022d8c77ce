#pragma once

#include <cmath>
#include <utility>

namespace nwraman {

struct ScalarMinimum {
  double x;
  double fx;
  int evaluations;
};

/// Golden-section search for a minimum of `f` on [a, b], stopping once the
/// bracket is narrower than `tolerance`. Returns the best point evaluated,
/// so the result never exceeds f at any probe.
template <class F>
ScalarMinimum golden_section_minimize(F&& f, double a, double b, double tolerance, int max_iterations = 200) {
  constexpr double inv_phi = 0.6180339887498948482;  // (sqrt(5) - 1) / 2
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  ScalarMinimum best = fc <= fd ? ScalarMinimum{c, fc, 2} : ScalarMinimum{d, fd, 2};

  for (int it = 0; it < max_iterations && (b - a) > tolerance; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      if (fc < best.fx || (fc == best.fx && c < best.x)) best = {c, fc, best.evaluations};
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      if (fd < best.fx || (fd == best.fx && d < best.x)) best = {d, fd, best.evaluations};
    }
    ++best.evaluations;
  }
  return best;
}

}  // namespace nwraman
