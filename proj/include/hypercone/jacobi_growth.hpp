#pragma once

// Homogeneous Jacobi fields on a cone and the weighted growth functional
//   J_K^gamma(u; r) = ∫_{A(r/K, r)} u^2 |x|^{-2 gamma - n},
// evaluated mode by mode (the cross-section modes are L^2-orthonormal, so
// cross-mode terms vanish).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hypercone/closed_forms.hpp"
#include "hypercone/cone_spectrum.hpp"
#include "hypercone/error.hpp"

namespace hypercone {

struct JacobiTerm {
  std::size_t j = 1;  // 1-based index into the ladder
  double c_plus = 0.0;
  double c_minus = 0.0;
  bool operator==(const JacobiTerm&) const = default;
};

/// Finite truncation Σ_j (c_j^+ r^{γ_j^+} + c_j^- r^{γ_j^-} [log r]) φ_j.
class JacobiCoefficients {
 public:
  JacobiCoefficients(SpectralLadder ladder, std::vector<JacobiTerm> terms)
      : ladder_(std::move(ladder)), terms_(std::move(terms)) {
    std::vector<std::size_t> seen;
    for (const auto& t : terms_) {
      if (t.j < 1 || t.j > ladder_.entries.size()) {
        throw Error("coefficient index " + std::to_string(t.j) + " not in ladder");
      }
      if (std::find(seen.begin(), seen.end(), t.j) != seen.end()) {
        throw Error("duplicate coefficient index " + std::to_string(t.j));
      }
      const auto& e = ladder_.entries[t.j - 1];
      if (std::isnan(e.gamma_plus) && (t.c_plus != 0.0 || t.c_minus != 0.0)) {
        throw Error("unstable cone: complex indicial roots");
      }
      seen.push_back(t.j);
    }
  }

  const SpectralLadder& ladder() const { return ladder_; }
  const std::vector<JacobiTerm>& terms() const { return terms_; }
  const LadderEntry& entry(std::size_t j) const { return ladder_.entries.at(j - 1); }

  const JacobiTerm* term(std::size_t j) const {
    for (const auto& t : terms_)
      if (t.j == j) return &t;
    return nullptr;
  }

  bool is_zero() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const JacobiTerm& t) { return t.c_plus == 0.0 && t.c_minus == 0.0; });
  }

 private:
  SpectralLadder ladder_;
  std::vector<JacobiTerm> terms_;
};

/// v_j^+(r) + v_j^-(r); the minus branch carries log r when resonant.
inline double evaluate_radial(const JacobiCoefficients& coeffs, std::size_t j, double r) {
  if (!(r > 0.0)) throw DomainError("evaluate_radial requires r > 0");
  if (j < 1 || j > coeffs.ladder().entries.size()) throw Error("index not in ladder");
  const JacobiTerm* t = coeffs.term(j);
  if (!t) return 0.0;
  const auto& e = coeffs.entry(j);
  double v = 0.0;
  if (t->c_plus != 0.0) v += t->c_plus * std::pow(r, e.gamma_plus);
  if (t->c_minus != 0.0) {
    const double base = std::pow(r, e.gamma_minus);
    v += t->c_minus * (e.resonant ? base * std::log(r) : base);
  }
  return v;
}

struct GrowthWindow {
  double K = 3.0;
  double gamma = 0.0;
  double r = 1.0;
};

/// J_K^gamma(u; r).
inline double growth_functional(const JacobiCoefficients& coeffs, const GrowthWindow& w) {
  if (!(w.K > 1.0) || !(w.r > 0.0)) throw DomainError("growth window requires K > 1, r > 0");
  double total = 0.0;
  const double lo = w.r / w.K;
  for (const auto& t : coeffs.terms()) {
    const auto& e = coeffs.entry(t.j);
    if (e.resonant) {
      total += closed_form_I_log(e.gamma_plus - w.gamma, t.c_plus, t.c_minus, lo, w.K);
    } else {
      total += closed_form_I(e.gamma_plus - w.gamma, e.gamma_minus - w.gamma, t.c_plus, t.c_minus, lo, w.K);
    }
  }
  return total;
}

/// dist(gamma, Γ(C) ∪ {-(n-2)/2}) over the materialized exponents.
inline double exponent_distance(double gamma, const SpectralLadder& ladder, double sigma) {
  const GammaWindow& win = ladder.gamma_window;
  if (win.empty() || !(win.lo <= gamma - sigma && gamma + sigma <= win.hi)) {
    throw Error("widen gamma_window");
  }
  double dist = std::abs(gamma + 0.5 * (ladder.n - 2));
  for (const auto& e : asymptotic_exponents(ladder)) dist = std::min(dist, std::abs(gamma - e.gamma));
  return dist;
}

inline bool gamma_admissible(double gamma, const SpectralLadder& ladder, double sigma) {
  return exponent_distance(gamma, ladder, sigma) >= sigma;
}

struct ThreeScaleResult {
  double lhs = 0.0;
  bool strict = false;
};

/// J(K^-2) - 2 J(K^-1) + J(1), summed from the factored per-mode second
/// differences so that no large terms cancel.
inline ThreeScaleResult three_scale_check(const JacobiCoefficients& coeffs, double gamma, double K,
                                          double sigma) {
  if (!(K > 1.0)) throw DomainError("three_scale_check requires K > 1");
  const double dist = exponent_distance(gamma, coeffs.ladder(), sigma);
  if (dist < sigma) {
    std::ostringstream msg;
    msg << "inadmissible gamma: distance " << dist << " < sigma " << sigma;
    throw Error(msg.str());
  }
  const double base = std::pow(K, -3.0);
  double lhs = 0.0;
  for (const auto& t : coeffs.terms()) {
    const auto& e = coeffs.entry(t.j);
    const QuadraticForm q = e.resonant
                                ? three_scale_form_log(e.gamma_plus - gamma, base, K)
                                : three_scale_form_power(e.gamma_plus - gamma, e.gamma_minus - gamma, base, K);
    lhs += q.evaluate(t.c_plus, t.c_minus);
  }
  return {lhs, lhs > 0.0};
}

/// AR of a finite mode sum: the least exponent carrying a nonzero
/// coefficient; +inf for the zero field.
inline double asymptotic_rate(const JacobiCoefficients& coeffs) {
  double rate = kInfinity;
  for (const auto& t : coeffs.terms()) {
    const auto& e = coeffs.entry(t.j);
    if (t.c_plus != 0.0) rate = std::min(rate, e.gamma_plus);
    if (t.c_minus != 0.0) rate = std::min(rate, e.gamma_minus);
  }
  return rate;
}

inline bool is_slower_growth(const JacobiCoefficients& coeffs) {
  const auto [g1, g2] = leading_gamma_plus(coeffs.ladder());
  if (!g2) throw Error("ladder needs two distinct gamma^+ values");
  return asymptotic_rate(coeffs) >= *g2;
}

struct SnappedRate {
  double value = 0.0;  // -inf, an exponent in Γ(C), or a value >= 1
  double residual = 0.0;
};

/// Nearest value of {-inf} ∪ Γ(C) ∪ [1, inf) to an estimated rate. Rates
/// below the materialized window snap to -inf.
inline SnappedRate snap_rate(double rate, const SpectralLadder& ladder) {
  if (rate >= 1.0) return {rate, 0.0};
  if (!ladder.gamma_window.empty() && rate < ladder.gamma_window.lo) {
    return {-kInfinity, kInfinity};
  }
  SnappedRate best{1.0, 1.0 - rate};
  for (const auto& e : asymptotic_exponents(ladder)) {
    const double d = std::abs(rate - e.gamma);
    if (d < best.residual) best = {e.gamma, d};
  }
  return best;
}

struct AnnulusSample {
  double s = 0.0;
  double l2 = 0.0;  // ||v||_{L^2(A(s, 2s))}
};

/// Least-squares rate from annulus norms: ||v||^2_{L^2(A(s,2s))} ~ s^{n + 2γ},
/// so the slope m of log ||v||^2 against log s gives γ = (m - n)/2.
inline double estimate_rate_from_samples(const std::vector<AnnulusSample>& samples, int n) {
  if (samples.size() < 4) throw Error("rate estimate needs at least 4 samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& smp = samples[i];
    if (!(smp.l2 > 0.0)) throw Error("annulus norms must be positive");
    if (!(smp.s > 0.0)) throw Error("scales must be positive");
    if (i > 0 && !(smp.s < samples[i - 1].s)) throw Error("scales must decrease strictly");
    const double x = std::log(smp.s);
    const double y = 2.0 * std::log(smp.l2);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double N = static_cast<double>(samples.size());
  const double slope = (N * sxy - sx * sy) / (N * sxx - sx * sx);
  return 0.5 * (slope - n);
}

}  // namespace hypercone
