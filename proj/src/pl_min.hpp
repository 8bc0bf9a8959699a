#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace causalsvm::detail {

// One hinge term w * max(0, 1 - y*(b + k)) as a function of the offset b,
// with y in {-1, +1}. A family is a sum of terms; the objective is the max
// over families. Convex piecewise linear, minimized exactly by enumerating
// hinge breakpoints and pairwise family crossings on each segment.
struct HingeTerm {
  double y;
  double k;
  double w;
};

using HingeFamily = std::vector<HingeTerm>;

struct PlMinResult {
  double b = 0.0;
  double value = 0.0;
  double region_lo = 0.0;  // flat minimum region among candidates
  double region_hi = 0.0;
};

inline double family_value(const HingeFamily& f, double b) {
  double v = 0.0;
  for (const HingeTerm& t : f) {
    const double h = 1.0 - t.y * (b + t.k);
    if (h > 0.0) v += t.w * h;
  }
  return v;
}

inline double family_slope(const HingeFamily& f, double b) {
  double s = 0.0;
  for (const HingeTerm& t : f)
    if (1.0 - t.y * (b + t.k) > 0.0) s -= t.w * t.y;
  return s;
}

inline double objective(const std::vector<HingeFamily>& fams, double b) {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& f : fams) v = std::max(v, family_value(f, b));
  return v;
}

// Minimizes max over families. Flat minimum region -> midpoint; a region
// that runs into a guard endpoint (objective flat off to one side) -> the
// finite interior end.
inline PlMinResult pl_minimize(const std::vector<HingeFamily>& fams) {
  std::vector<double> breaks;
  for (const auto& f : fams)
    for (const HingeTerm& t : f) breaks.push_back(t.y - t.k);  // 1/y == y for y = +-1
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (breaks.empty()) breaks.push_back(0.0);

  const double lo = breaks.front() - 1.0;
  const double hi = breaks.back() + 1.0;
  std::vector<double> cand;
  cand.push_back(lo);
  cand.insert(cand.end(), breaks.begin(), breaks.end());
  cand.push_back(hi);

  // Family crossings inside each affine segment.
  std::vector<double> edges = cand;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e], c = edges[e + 1];
    if (!(c > a)) continue;
    const double mid = 0.5 * (a + c);
    for (std::size_t f1 = 0; f1 < fams.size(); ++f1) {
      for (std::size_t f2 = f1 + 1; f2 < fams.size(); ++f2) {
        const double v1 = family_value(fams[f1], mid), s1 = family_slope(fams[f1], mid);
        const double v2 = family_value(fams[f2], mid), s2 = family_slope(fams[f2], mid);
        if (std::abs(s1 - s2) < 1e-14) continue;
        const double cross = mid + (v2 - v1) / (s1 - s2);
        if (cross > a && cross < c) cand.push_back(cross);
      }
    }
  }
  std::sort(cand.begin(), cand.end());

  double best = std::numeric_limits<double>::infinity();
  for (double b : cand) best = std::min(best, objective(fams, b));
  const double slack = 1e-12 * (1.0 + std::abs(best));
  double rlo = std::numeric_limits<double>::infinity();
  double rhi = -std::numeric_limits<double>::infinity();
  for (double b : cand) {
    if (objective(fams, b) <= best + slack) {
      rlo = std::min(rlo, b);
      rhi = std::max(rhi, b);
    }
  }

  PlMinResult res;
  res.value = best;
  res.region_lo = rlo;
  res.region_hi = rhi;
  const bool open_right = rhi >= hi;
  const bool open_left = rlo <= lo;
  if (open_right && !open_left)
    res.b = rlo;
  else if (open_left && !open_right)
    res.b = rhi;
  else
    res.b = 0.5 * (rlo + rhi);
  return res;
}

}  // namespace causalsvm::detail
