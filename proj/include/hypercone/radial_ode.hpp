#pragma once

// Radial reduction of the (perturbed) Jacobi equation on a cone mode,
//   div(∇u + b0) + |A|^2 u + b1 = 0,   u = v(r) φ,
// integrated in t = log r where homogeneous solutions are exponentials.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "hypercone/error.hpp"

namespace hypercone {

/// Bounded profile with sup-norm 1 on [r_min, 1], expressed in the
/// normalised log coordinate s = log r / log r_min ∈ [0, 1].
enum class PerturbationProfile { Constant, Bump, Oscillating };

inline PerturbationProfile profile_from_string(const std::string& name) {
  if (name == "constant") return PerturbationProfile::Constant;
  if (name == "bump") return PerturbationProfile::Bump;
  if (name == "oscillating") return PerturbationProfile::Oscillating;
  throw Error("unknown perturbation profile '" + name + "'");
}

/// Value and d/ds of the profile.
inline std::pair<double, double> profile_value(PerturbationProfile p, double s) {
  switch (p) {
    case PerturbationProfile::Constant:
      return {1.0, 0.0};
    case PerturbationProfile::Bump: {
      const double sn = std::sin(M_PI * s);
      return {sn * sn, 2.0 * M_PI * sn * std::cos(M_PI * s)};
    }
    case PerturbationProfile::Oscillating:
      return {std::cos(6.0 * M_PI * s), -6.0 * M_PI * std::sin(6.0 * M_PI * s)};
  }
  return {0.0, 0.0};
}

/// v'' + (n-1)/r v' - mu/r^2 v + r^{1-n}(r^{n-1} b0)' + b1 = 0 with
/// b0 = b0_scale p(r) v' and b1 = b1_scale p(r) v, so that
/// |b0| + |b1| <= max(b0_scale, b1_scale) (|v| + |v'|).
struct PerturbedRadialProblem {
  double mu = -6.0;
  int n = 7;
  double b0_scale = 0.0;
  double b1_scale = 0.0;
  PerturbationProfile profile = PerturbationProfile::Constant;
};

/// Samples of (v, r v') at increasing log r.
struct RadialProfile {
  std::vector<double> log_r;
  std::vector<double> v;
  std::vector<double> v_t;  // dv/d(log r) = r v'

  double r_min() const { return std::exp(log_r.front()); }
  double r_max() const { return std::exp(log_r.back()); }

  /// Cubic Hermite interpolation in log r.
  double value_at_log(double t) const {
    if (t < log_r.front() - 1e-12 || t > log_r.back() + 1e-12) throw Error("profile coverage insufficient");
    auto it = std::upper_bound(log_r.begin(), log_r.end(), t);
    std::size_t i = it == log_r.begin() ? 0 : static_cast<std::size_t>(it - log_r.begin()) - 1;
    if (i + 1 >= log_r.size()) i = log_r.size() - 2;
    const double h = log_r[i + 1] - log_r[i];
    const double x = (t - log_r[i]) / h;
    const double h00 = (1 + 2 * x) * (1 - x) * (1 - x);
    const double h10 = x * (1 - x) * (1 - x);
    const double h01 = x * x * (3 - 2 * x);
    const double h11 = x * x * (x - 1);
    return h00 * v[i] + h10 * h * v_t[i] + h01 * v[i + 1] + h11 * h * v_t[i + 1];
  }
};

/// Integrates from r = 1 down to r_min and returns `samples` equally spaced
/// nodes in log r (ascending). Relative tolerance 1e-10.
inline RadialProfile solve_radial_jacobi(const PerturbedRadialProblem& problem, double v0, double dv0,
                                         double r_min, std::size_t samples = 2049) {
  if (!(r_min > 0.0) || !(r_min < 1.0)) throw DomainError("solve_radial_jacobi requires 0 < r_min < 1");
  if (samples < 3) throw Error("need at least 3 samples");
  using State = std::array<double, 2>;
  const double t_min = std::log(r_min);
  const double shift = problem.n - 2.0;

  auto rhs = [&](const State& y, State& dydt, double t) {
    double p = 0.0, p_t = 0.0;
    if (problem.b0_scale != 0.0 || problem.b1_scale != 0.0) {
      const auto [pv, ps] = profile_value(problem.profile, t / t_min);
      p = pv;
      p_t = ps / t_min;
    }
    const double lead = 1.0 + problem.b0_scale * p;
    const double damping = shift * lead + problem.b0_scale * p_t;
    const double potential = problem.mu - problem.b1_scale * p * std::exp(2.0 * t);
    dydt[0] = y[1];
    dydt[1] = (potential * y[0] - damping * y[1]) / lead;
  };

  std::vector<double> times(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    times[i] = t_min * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  times.back() = t_min;

  RadialProfile out;
  out.log_r.reserve(samples);
  out.v.reserve(samples);
  out.v_t.reserve(samples);
  double last_good = 1.0;
  auto observer = [&](const State& y, double t) {
    if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || std::abs(y[0]) > 1e300 || std::abs(y[1]) > 1e300) {
      std::ostringstream msg;
      msg << "radial solution left float range below r = " << last_good;
      throw Error(msg.str());
    }
    last_good = std::exp(t);
    out.log_r.push_back(t);
    out.v.push_back(y[0]);
    out.v_t.push_back(y[1]);
  };

  namespace ode = boost::numeric::odeint;
  State y{v0, dv0};  // at r = 1, r v' = v'
  auto stepper = ode::make_controlled(1e-14, 1e-10, ode::runge_kutta_dopri5<State>());
  try {
    ode::integrate_times(stepper, rhs, y, times.begin(), times.end(), -1e-3, observer);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    std::ostringstream msg;
    msg << "radial integration failed below r = " << last_good << ": " << ex.what();
    throw Error(msg.str());
  }

  std::reverse(out.log_r.begin(), out.log_r.end());
  std::reverse(out.v.begin(), out.v.end());
  std::reverse(out.v_t.begin(), out.v_t.end());
  return out;
}

/// ∫_lo^hi t^{-1-2γ} v(t)^2 dt on the sampled profile: 5-point
/// Gauss-Legendre per segment of the Hermite interpolant, in log r.
inline double profile_growth_integral(const RadialProfile& profile, double gamma, double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("growth integral requires 0 < lo < hi");
  const double a = std::log(lo);
  const double b = std::log(hi);
  if (a < profile.log_r.front() - 1e-12 || b > profile.log_r.back() + 1e-12) {
    throw Error("profile coverage insufficient");
  }
  static constexpr std::array<double, 5> nodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> weights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                 0.4786286704993665, 0.2369268850561891};
  // Break points: the interval ends plus every sample node inside.
  std::vector<double> cuts{a};
  for (double t : profile.log_r)
    if (t > a && t < b) cuts.push_back(t);
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    const double half = 0.5 * (cuts[k + 1] - cuts[k]);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double t = mid + half * nodes[q];
      const double v = profile.value_at_log(t);
      total += weights[q] * half * std::exp(-2.0 * gamma * t) * v * v;
    }
  }
  return total;
}

/// J(K^-2) - 2(1+eps) J(K^-1) + J(1) > 0 with J evaluated on the profile.
inline bool perturbed_convexity_check(const RadialProfile& profile, double gamma, double K, double eps,
                                      int n = 7, double* lhs_out = nullptr) {
  if (!(gamma > -n + 1 && gamma < 1.0)) throw Error("gamma must lie in (-n+1, 1)");
  if (!(K > 1.0)) throw DomainError("K must exceed 1");
  const double K3 = std::pow(K, -3.0);
  if (profile.log_r.empty() || profile.r_min() > K3 * (1 + 1e-12) || profile.r_max() < 1.0 - 1e-12) {
    throw Error("profile coverage insufficient");
  }
  const double j2 = profile_growth_integral(profile, gamma, K3, K3 * K);
  const double j1 = profile_growth_integral(profile, gamma, K3 * K, K3 * K * K);
  const double j0 = profile_growth_integral(profile, gamma, K3 * K * K, 1.0);
  const double lhs = j2 - 2.0 * (1.0 + eps) * j1 + j0;
  if (lhs_out) *lhs_out = lhs;
  return lhs > 0.0;
}

/// ||v φ||_{L^2(A(s,2s))} for a unit-norm cross-section mode.
inline double profile_annulus_l2(const RadialProfile& profile, int n, double s) {
  // ∫_s^{2s} v^2 t^{n-1} dt = growth integral with -1 - 2γ = n - 1.
  return std::sqrt(profile_growth_integral(profile, -0.5 * n, s, 2.0 * s));
}

}  // namespace hypercone
