#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace matchdecomp {

// Derivative-free minimization of a 2-d function over a box, by linear
// interpolation models over a simplex inside a shrinking trust region.
// Deterministic; terminates when the trust radius drops below rho_end or the
// evaluation budget is spent; always reports the best point seen.
struct TrustRegionConfig {
  double rho_begin = 0.5;
  double rho_end = 1e-4;
  int max_evals = 150;
};

struct TrustRegionEval {
  double x0 = 0.0;
  double x1 = 0.0;
  double value = 0.0;
};

struct TrustRegionResult {
  double x0 = 0.0;
  double x1 = 0.0;
  double value = 0.0;
  std::vector<TrustRegionEval> trace;
};

inline TrustRegionResult minimize_linear_trust_region(
    const std::function<double(double, double)>& f, std::array<double, 2> start,
    std::array<double, 2> lower, std::array<double, 2> upper, const TrustRegionConfig& cfg = {}) {
  struct Pt {
    double x0, x1, v;
  };

  const auto clampv = [&](double a, int i) { return std::clamp(a, lower[static_cast<std::size_t>(i)], upper[static_cast<std::size_t>(i)]); };

  TrustRegionResult result;
  int evals = 0;
  const auto eval = [&](double a, double b) {
    const double v = f(a, b);
    ++evals;
    result.trace.push_back({a, b, v});
    if (result.trace.size() == 1 || v < result.value) {
      result.x0 = a;
      result.x1 = b;
      result.value = v;
    }
    return v;
  };

  double rho = cfg.rho_begin;
  Pt best{clampv(start[0], 0), clampv(start[1], 1), 0.0};
  best.v = eval(best.x0, best.x1);

  // Satellite points spanning the two axes; stepping inward when clamped.
  const auto satellite = [&](const Pt& center, int axis, double radius) {
    double a = center.x0, b = center.x1;
    double& coord = (axis == 0) ? a : b;
    const double up = clampv(coord + radius, axis);
    coord = (std::abs(up - coord) > radius / 2.0) ? up : clampv(coord - radius, axis);
    return Pt{a, b, eval(a, b)};
  };

  Pt p1 = satellite(best, 0, rho);
  Pt p2 = satellite(best, 1, rho);

  while (rho >= cfg.rho_end && evals < cfg.max_evals) {
    // Order so that best holds the lowest value.
    if (p1.v < best.v) std::swap(best, p1);
    if (p2.v < best.v) std::swap(best, p2);

    // Linear model through the three points: solve for the gradient.
    const double d10 = p1.x0 - best.x0, d11 = p1.x1 - best.x1;
    const double d20 = p2.x0 - best.x0, d21 = p2.x1 - best.x1;
    const double det = d10 * d21 - d11 * d20;
    const double span = std::max({std::abs(d10), std::abs(d11), std::abs(d20), std::abs(d21)});
    if (std::abs(det) < 1e-14 * std::max(span * span, 1e-300)) {
      rho *= 0.5;
      if (rho < cfg.rho_end || evals + 2 > cfg.max_evals) break;
      p1 = satellite(best, 0, rho);
      p2 = satellite(best, 1, rho);
      continue;
    }
    const double r1 = p1.v - best.v, r2 = p2.v - best.v;
    const double g0 = (r1 * d21 - r2 * d11) / det;
    const double g1 = (r2 * d10 - r1 * d20) / det;
    const double gnorm = std::hypot(g0, g1);
    if (gnorm < 1e-15) {
      rho *= 0.5;
      if (rho < cfg.rho_end || evals + 2 > cfg.max_evals) break;
      p1 = satellite(best, 0, rho);
      p2 = satellite(best, 1, rho);
      continue;
    }

    const double ca = clampv(best.x0 - rho * g0 / gnorm, 0);
    const double cb = clampv(best.x1 - rho * g1 / gnorm, 1);
    const double moved = std::hypot(ca - best.x0, cb - best.x1);
    if (moved < 1e-15) {
      // Pinned against the box along the model's descent direction.
      rho *= 0.5;
      if (rho < cfg.rho_end || evals + 2 > cfg.max_evals) break;
      p1 = satellite(best, 0, rho);
      p2 = satellite(best, 1, rho);
      continue;
    }

    const double cv = eval(ca, cb);
    if (cv < best.v - 1e-15) {
      // Keep the simplex around the improved point.
      Pt& worst = (p1.v >= p2.v) ? p1 : p2;
      worst = Pt{ca, cb, cv};
    } else {
      if (cv < std::max(p1.v, p2.v)) {
        Pt& worst = (p1.v >= p2.v) ? p1 : p2;
        worst = Pt{ca, cb, cv};
      }
      rho *= 0.5;
      if (rho < cfg.rho_end || evals + 2 > cfg.max_evals) break;
      p1 = satellite(best, 0, rho);
      p2 = satellite(best, 1, rho);
    }
  }

  return result;
}

}  // namespace matchdecomp
