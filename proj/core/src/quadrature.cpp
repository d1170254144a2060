#include "impdde/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace impdde::quad {

double composite_simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  if (b == a) return 0.0;
  panels = std::max<std::size_t>(panels, 1);
  const double w = (b - a) / static_cast<double>(panels);
  double ends = f(a) + f(b);
  double mids = 0.0;
  double inner = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = a + w * static_cast<double>(i);
    mids += f(lo + 0.5 * w);
    if (i > 0) inner += f(lo);
  }
  return w / 6.0 * (ends + 4.0 * mids + 2.0 * inner);
}

std::size_t panels_for(double a, double b, double max_width) {
  const double len = std::fabs(b - a);
  if (len == 0.0) return 1;
  // Small slack so that an exact multiple does not round up to an extra panel.
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / max_width - 1e-9)));
}

namespace {

struct Segment {
  double a, b, fa, fm, fb, whole;
};

double refine(const std::function<double(double)>& f, const Segment& s, double tol, int depth) {
  const double m = 0.5 * (s.a + s.b);
  const double lm = 0.5 * (s.a + m);
  const double rm = 0.5 * (m + s.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - s.a) / 6.0 * (s.fa + 4.0 * flm + s.fm);
  const double right = (s.b - m) / 6.0 * (s.fm + 4.0 * frm + s.fb);
  const double delta = left + right - s.whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return refine(f, {s.a, m, s.fa, flm, s.fm, left}, 0.5 * tol, depth - 1) +
         refine(f, {m, s.b, s.fm, frm, s.fb, right}, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  // A coarse pass sets the scale for the relative tolerance.
  const double coarse = composite_simpson(f, a, b, 8);
  const double tol = std::max(rel_tol * std::fabs(coarse), 1e-300);
  // Start from a few panels so that oscillating integrands are not
  // mistaken for converged on the first bisection.
  constexpr int start = 4;
  const double w = (b - a) / start;
  double total = 0.0;
  for (int i = 0; i < start; ++i) {
    const double lo = a + w * i;
    const double hi = i + 1 == start ? b : lo + w;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fm = f(0.5 * (lo + hi));
    total += refine(f, {lo, hi, flo, fm, fhi, (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi)}, tol / start, max_depth);
  }
  return total;
}

}  // namespace impdde::quad
