#pragma once

// Radial shooting for the planar equation u'' + u'/r + e^u (1 - e^u) = 0
// (vortex strength alpha at the origin enters through the series start
// u = 2 alpha ln r + s + ...). Adaptive Dormand-Prince 5(4) integration with
// event stopping; the flux -2 pi r u' and the quadratures of e^u (1 - e^u)
// and (1 - e^u)^2 are carried along as extra state.

#include <stdexcept>
#include <vector>

#include "csvortex/core.hpp"

namespace csvortex {

enum class ShootOutcome { Decayed, BlewDown, Overshot, ReachedRmax };

inline const char* to_string(ShootOutcome o) {
  switch (o) {
    case ShootOutcome::Decayed: return "decayed";
    case ShootOutcome::BlewDown: return "blew_down";
    case ShootOutcome::Overshot: return "overshot";
    default: return "reached_rmax";
  }
}

struct StepFailure : std::runtime_error {
  explicit StepFailure(const std::string& what) : std::runtime_error(what) {}
};

struct NoBracket : std::runtime_error {
  explicit NoBracket(const std::string& what) : std::runtime_error(what) {}
};

struct RadialProfile {
  double alpha = 0.0;
  double s = 0.0;       // u(0) for alpha = 0, regular part at 0 otherwise
  double r_max = 0.0;
  std::vector<double> r, u, du;
  std::vector<double> flux_cum;      // 2 pi int_0^r e^u (1-e^u) t dt
  std::vector<double> pohozaev_cum;  // 2 pi int_0^r (1-e^u)^2 t dt
  ShootOutcome outcome = ShootOutcome::ReachedRmax;
  double flux_quad = 0.0;      // terminal value of flux_cum
  double pohozaev_quad = 0.0;  // terminal value of pohozaev_cum

  /// Flux from the slope: 4 pi alpha - 2 pi r u'(r) at the terminal point
  /// (the r -> 0 limit of r u' is 2 alpha). Equals flux_quad identically for
  /// the exact solution.
  double terminal_flux() const {
    return kFourPi * alpha - kTwoPi * r.back() * du.back();
  }
  double flux_at_index(std::size_t k) const {
    return kFourPi * alpha - kTwoPi * r[k] * du[k];
  }

  /// Index where a near-threshold profile peels off the separatrix: the
  /// first sample past the core where u stops rising (or crosses zero).
  /// Returns the last index if the profile stays locked.
  std::size_t separatrix_end() const {
    for (std::size_t k = 1; k < r.size(); ++k) {
      if (u[k] > 0.0) return k - 1;
      if (du[k] < 0.0 && u[k] > -0.5) return k - 1;
    }
    return r.size() - 1;
  }

  /// Cubic Hermite interpolation (u and u' are both stored).
  double value_at(double rr) const { return hermite(rr, u, du); }
  double slope_at(double rr) const {
    // derivative of the Hermite interpolant via finite index bracket
    const auto& R = r;
    if (rr <= R.front()) return du.front();
    if (rr >= R.back()) return du.back();
    std::size_t hi = std::lower_bound(R.begin(), R.end(), rr) - R.begin();
    const std::size_t lo = hi - 1;
    const double h = R[hi] - R[lo], t = (rr - R[lo]) / h;
    const double d00 = (6 * t * t - 6 * t) / h, d10 = 3 * t * t - 4 * t + 1;
    const double d01 = (6 * t - 6 * t * t) / h, d11 = 3 * t * t - 2 * t;
    return u[lo] * d00 + du[lo] * d10 * 1.0 + u[hi] * d01 + du[hi] * d11;
  }

 private:
  double hermite(double rr, const std::vector<double>& y,
                 const std::vector<double>& dy) const {
    const auto& R = r;
    if (rr <= R.front()) return y.front();
    if (rr >= R.back()) return y.back();
    std::size_t hi = std::lower_bound(R.begin(), R.end(), rr) - R.begin();
    const std::size_t lo = hi - 1;
    const double h = R[hi] - R[lo], t = (rr - R[lo]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * y[lo] + h10 * h * dy[lo] + h01 * y[hi] + h11 * h * dy[hi];
  }
};

namespace detail {

struct RadialState {
  double u, p, q_flux, q_poh;
};

inline RadialState radial_rhs(double r, const RadialState& y) {
  const double eu = std::exp(y.u);
  const double f = eu * (1.0 - eu);
  return {y.p, -y.p / r - f, kTwoPi * f * r, kTwoPi * (1.0 - eu) * (1.0 - eu) * r};
}

inline RadialState axpy(const RadialState& a, double c, const RadialState& b) {
  return {a.u + c * b.u, a.p + c * b.p, a.q_flux + c * b.q_flux,
          a.q_poh + c * b.q_poh};
}

}  // namespace detail

struct ShootOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  double blow_down = -60.0;
  double decay_band = 1e-3;   // |u(r_max)| below this counts as Decayed
  bool stop_at_rmax = true;   // false: continue to blow-down (beta evaluation)
  std::size_t max_steps = 200000;
};

inline RadialProfile shoot(double alpha, double s, double r_max,
                           const ShootOptions& opt = {}) {
  if (s >= 0.0) throw std::invalid_argument("shoot: s must be < 0");
  if (r_max <= 0.0) throw std::invalid_argument("shoot: r_max must be > 0");

  RadialProfile prof;
  prof.alpha = alpha;
  prof.s = s;
  prof.r_max = r_max;

  // series start at r0: u = 2 a ln r + s - Q r^{2a+2}/(2a+2)^2
  const double r0 = 1e-6;
  const double Q = (alpha > 0.0) ? std::exp(s) : std::exp(s) * (1.0 - std::exp(s));
  const double m = 2.0 * alpha + 2.0;
  detail::RadialState y;
  y.u = 2.0 * alpha * std::log(r0) + s - Q * std::pow(r0, m) / (m * m);
  y.p = 2.0 * alpha / r0 - Q * std::pow(r0, m - 1.0) / m;
  y.q_flux = kTwoPi * Q * std::pow(r0, m) / m;  // int_0^{r0} of the series
  y.q_poh = kPi * r0 * r0;                      // (1-e^u)^2 ~ 1 near 0 for a>0
  if (alpha == 0.0) y.q_poh = kPi * r0 * r0 * (1.0 - std::exp(s)) * (1.0 - std::exp(s));

  double r = r0;
  double h = r0 * 0.1;

  // Dormand-Prince 5(4) tableau
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  prof.r.push_back(r);
  prof.u.push_back(y.u);
  prof.du.push_back(y.p);
  prof.flux_cum.push_back(y.q_flux);
  prof.pohozaev_cum.push_back(y.q_poh);

  const double r_stop = opt.stop_at_rmax ? r_max : 1e15;
  std::size_t steps = 0;
  while (r < r_stop) {
    if (++steps > opt.max_steps)
      throw StepFailure("shoot: step budget exhausted at r = " + std::to_string(r));
    if (r + h > r_stop) h = r_stop - r;

    using detail::axpy;
    using detail::radial_rhs;
    detail::RadialState k1 = radial_rhs(r, y);
    detail::RadialState k2 = radial_rhs(r + c2 * h, axpy(y, h * a21, k1));
    detail::RadialState k3 =
        radial_rhs(r + c3 * h, axpy(axpy(y, h * a31, k1), h * a32, k2));
    detail::RadialState k4 = radial_rhs(
        r + c4 * h, axpy(axpy(axpy(y, h * a41, k1), h * a42, k2), h * a43, k3));
    detail::RadialState k5 = radial_rhs(
        r + c5 * h, axpy(axpy(axpy(axpy(y, h * a51, k1), h * a52, k2), h * a53, k3),
                         h * a54, k4));
    detail::RadialState k6 = radial_rhs(
        r + h, axpy(axpy(axpy(axpy(axpy(y, h * a61, k1), h * a62, k2), h * a63, k3),
                         h * a64, k4),
                    h * a65, k5));
    detail::RadialState ynew = axpy(
        axpy(axpy(axpy(axpy(y, h * b1, k1), h * b3, k3), h * b4, k4), h * b5, k5),
        h * b6, k6);
    detail::RadialState k7 = radial_rhs(r + h, ynew);

    auto err_comp = [&](double v1, double v3, double v4, double v5, double v6,
                        double v7, double y0, double y1) {
      const double err = h * (e1 * v1 + e3 * v3 + e4 * v4 + e5 * v5 + e6 * v6 +
                              e7 * v7);
      const double scale =
          opt.abs_tol + opt.rel_tol * std::max(std::abs(y0), std::abs(y1));
      return std::abs(err) / scale;
    };
    const double err =
        std::max(err_comp(k1.u, k3.u, k4.u, k5.u, k6.u, k7.u, y.u, ynew.u),
                 err_comp(k1.p, k3.p, k4.p, k5.p, k6.p, k7.p, y.p, ynew.p));

    if (err <= 1.0) {
      r += h;
      y = ynew;
      prof.r.push_back(r);
      prof.u.push_back(y.u);
      prof.du.push_back(y.p);
      prof.flux_cum.push_back(y.q_flux);
      prof.pohozaev_cum.push_back(y.q_poh);
      if (y.u > 0.0) {
        prof.outcome = ShootOutcome::Overshot;
        break;
      }
      // blow-down acts on the regular part: the 2 alpha ln r core dip of a
      // vortex profile must not trip the event
      const double u_reg = y.u - 2.0 * alpha * std::log(std::min(r, 1.0));
      if (u_reg < opt.blow_down) {
        prof.outcome = ShootOutcome::BlewDown;
        break;
      }
    }
    const double fac = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::min(5.0, std::max(0.2, fac));
    if (!(h > 1e-14 * std::max(r, 1.0)))
      throw StepFailure("shoot: step underflow at r = " + std::to_string(r));
  }
  if (r >= r_stop && prof.outcome != ShootOutcome::Overshot &&
      prof.outcome != ShootOutcome::BlewDown) {
    if (y.u > -opt.decay_band && y.u < 0.0) {
      prof.outcome = ShootOutcome::Decayed;
    } else if (y.p < 0.0) {
      // (r u')' <= 0 for u < 0, so a negative slope can never recover:
      // the trajectory is certainly on the blow-down branch
      prof.outcome = ShootOutcome::BlewDown;
    } else {
      prof.outcome = ShootOutcome::ReachedRmax;
    }
  }
  prof.flux_quad = y.q_flux;
  prof.pohozaev_quad = y.q_poh;
  return prof;
}

/// beta(s) for the alpha = 0 bubble: total flux, evaluated as the terminal
/// -2 pi r u' after the profile has entered its logarithmic tail, and
/// cross-checked against the running quadrature (0.1% contract).
inline double beta(double s) {
  ShootOptions opt;
  opt.stop_at_rmax = false;
  RadialProfile p = shoot(0.0, s, 1.0, opt);
  if (p.outcome != ShootOutcome::BlewDown)
    throw StepFailure("beta: bubble did not reach the logarithmic tail");
  const double flux = p.terminal_flux();
  const double quad = p.flux_quad;
  if (std::abs(flux - quad) > 1e-3 * std::abs(flux))
    throw StepFailure("beta: flux/quadrature mismatch " + std::to_string(flux) +
                      " vs " + std::to_string(quad));
  return flux;
}

/// Bisection for the topological threshold s*: below it profiles blow down,
/// above they overshoot. The bracket is refined to machine width so the
/// returned profile hugs the separatrix as long as doubles allow.
inline double find_topological_threshold(double alpha, double r_max) {
  if (alpha <= 0.0)
    throw std::invalid_argument("find_topological_threshold: alpha must be > 0");
  auto is_high = [&](double s) -> bool {
    RadialProfile p = shoot(alpha, s, r_max);
    switch (p.outcome) {
      case ShootOutcome::Overshot: return true;
      case ShootOutcome::BlewDown: return false;
      default: return p.u.back() >= -1e-3;
    }
  };
  // ladder scan for a bracket
  double s_hi = 0.0, s_lo = 0.0;
  bool have_hi = false, have_lo = false;
  for (double s = -0.125; s > -300.0; s *= 2.0) {
    if (is_high(s)) {
      s_hi = s;
      have_hi = true;
    } else {
      s_lo = s;
      have_lo = true;
      break;  // ladder is descending; first low ends the scan
    }
  }
  if (!have_hi || !have_lo)
    throw NoBracket("find_topological_threshold: no sign change on the ladder");
  while (s_hi - s_lo > 1e-16 * std::abs(s_lo)) {
    const double mid = 0.5 * (s_hi + s_lo);
    if (mid == s_hi || mid == s_lo) break;
    (is_high(mid) ? s_hi : s_lo) = mid;
  }
  return 0.5 * (s_hi + s_lo);
}

}  // namespace csvortex
