#pragma once

// Cross-section spectra of stable minimal hypercones and the asymptotic
// exponents of their homogeneous Jacobi fields.
//
// A cone C in R^{n+1} with cross-section S = C ∩ S^n has Jacobi operator
//   L_C = d_r^2 + (n-1)/r d_r + r^{-2} (Δ_S + |A_S|^2),
// so each eigenvalue mu of -(Δ_S + |A_S|^2) contributes homogeneous fields
// r^{gamma} with gamma(gamma + n - 2) = mu.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hypercone/error.hpp"

namespace hypercone {

inline constexpr double kMergeTolerance = 1e-9;
inline constexpr double kResonanceTolerance = 1e-12;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct SpectrumEntry {
  double mu = 0.0;
  int multiplicity = 1;
  bool operator==(const SpectrumEntry&) const = default;
};

/// S^p(a) x S^q(b) ⊂ S^{p+q+1} with a^2 = p/(p+q), b^2 = q/(p+q).
struct ProductSphere {
  int p = 3;
  int q = 3;
  bool operator==(const ProductSphere&) const = default;
};

/// A cone known only through its cross-section spectrum.
struct CustomSpectrum {
  int n = 7;  // cone dimension; ambient is R^{n+1}
  std::vector<SpectrumEntry> entries;
  std::optional<double> density;
  bool operator==(const CustomSpectrum&) const = default;
};

struct ConeDescriptor {
  std::string label;
  std::variant<ProductSphere, CustomSpectrum> kind;

  /// Cone dimension n.
  int dimension() const {
    if (const auto* ps = std::get_if<ProductSphere>(&kind)) return ps->p + ps->q + 1;
    return std::get<CustomSpectrum>(kind).n;
  }

  bool operator==(const ConeDescriptor&) const = default;
};

inline ConeDescriptor simons_cone() { return {"simons", ProductSphere{3, 3}}; }

/// Stability threshold -(n-2)^2/4.
inline double stability_threshold(int n) {
  const double h = 0.5 * (n - 2);
  return -h * h;
}

struct LadderEntry {
  double mu = 0.0;
  int multiplicity = 1;
  double gamma_plus = 0.0;   // NaN when mu < -(n-2)^2/4
  double gamma_minus = 0.0;  // NaN when mu < -(n-2)^2/4
  bool resonant = false;
};

/// Closed interval of exponents known to be complete: every gamma in
/// Γ(C) ∩ [lo, hi] appears in the ladder. lo > hi means empty.
struct GammaWindow {
  double lo = 1.0;
  double hi = 0.0;
  bool empty() const { return lo > hi; }
  bool contains(double g) const { return lo <= g && g <= hi; }
};

struct SpectralLadder {
  int n = 7;
  std::vector<LadderEntry> entries;
  GammaWindow gamma_window;
};

/// The pair of indicial roots for one eigenvalue. Returns NaNs below the
/// stability threshold.
inline LadderEntry make_ladder_entry(double mu, int multiplicity, int n) {
  LadderEntry e;
  e.mu = mu;
  e.multiplicity = multiplicity;
  const double shift = 0.5 * (n - 2);
  const double disc = mu + shift * shift;
  if (std::abs(disc) <= kResonanceTolerance) {
    e.resonant = true;
    e.gamma_plus = e.gamma_minus = -shift;
  } else if (disc < 0.0) {
    e.gamma_plus = e.gamma_minus = std::numeric_limits<double>::quiet_NaN();
  } else {
    const double root = std::sqrt(disc);
    e.gamma_plus = -shift + root;
    e.gamma_minus = -shift - root;
  }
  return e;
}

namespace detail {

inline double binomial(int top, int bottom) {
  if (top < 0 || bottom < 0 || bottom > top) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= bottom; ++i) r = r * (top - bottom + i) / i;
  return r;
}

/// Dimension of degree-m spherical harmonics on S^d.
inline std::int64_t harmonic_dimension(int d, int m) {
  return std::llround(binomial(m + d, d) - binomial(m + d - 2, d));
}

/// Window of exponents guaranteed complete when every eigenvalue up to
/// mu_complete has been materialized.
inline GammaWindow window_for(double mu_complete, int n) {
  const LadderEntry top = make_ladder_entry(mu_complete, 1, n);
  if (std::isnan(top.gamma_plus)) return {};
  return {top.gamma_minus, top.gamma_plus};
}

}  // namespace detail

/// All eigenvalues mu <= mu_max of -(Δ_S + |A_S|^2) with multiplicities,
/// together with their exponents.
inline SpectralLadder cross_section_spectrum(const ConeDescriptor& cone, double mu_max) {
  if (!std::isfinite(mu_max)) throw Error("mu_max must be finite");
  SpectralLadder ladder;
  ladder.n = cone.dimension();
  std::vector<SpectrumEntry> raw;
  double mu_complete = mu_max;

  if (const auto* ps = std::get_if<ProductSphere>(&cone.kind)) {
    if (ps->p < 1 || ps->q < 1) throw Error("product sphere requires p >= 1 and q >= 1");
    const int p = ps->p;
    const int q = ps->q;
    const double a2 = static_cast<double>(p) / (p + q);
    const double b2 = static_cast<double>(q) / (p + q);
    const double second_fundamental = p + q;  // |A_S|^2 = p(b/a)^2 + q(a/b)^2
    struct Raw {
      double mu;
      std::int64_t mult;
    };
    std::vector<Raw> values;
    for (int k = 0;; ++k) {
      const double first = k * (k + p - 1.0) / a2;
      if (first - second_fundamental > mu_max + kMergeTolerance) break;
      for (int l = 0;; ++l) {
        const double mu = first + l * (l + q - 1.0) / b2 - second_fundamental;
        if (mu > mu_max + kMergeTolerance) break;
        values.push_back({mu, detail::harmonic_dimension(p, k) * detail::harmonic_dimension(q, l)});
      }
    }
    std::sort(values.begin(), values.end(), [](const Raw& x, const Raw& y) { return x.mu < y.mu; });
    for (const Raw& v : values) {
      if (v.mu > mu_max) continue;
      if (!raw.empty() && std::abs(raw.back().mu - v.mu) <= kMergeTolerance) {
        raw.back().multiplicity += static_cast<int>(v.mult);
      } else {
        raw.push_back({v.mu, static_cast<int>(v.mult)});
      }
    }
  } else {
    const auto& custom = std::get<CustomSpectrum>(cone.kind);
    for (std::size_t i = 0; i < custom.entries.size(); ++i) {
      const auto& e = custom.entries[i];
      if (e.multiplicity < 1) throw Error("multiplicity must be positive");
      if (i > 0 && !(custom.entries[i - 1].mu < e.mu)) throw Error("spectrum not strictly sorted");
      if (e.mu <= mu_max) raw.push_back(e);
    }
    // Beyond the last supplied eigenvalue the spectrum is unknown.
    if (!custom.entries.empty() && custom.entries.back().mu < mu_max) {
      mu_complete = custom.entries.back().mu;
    }
  }

  if (raw.empty()) throw Error("empty ladder");
  for (const auto& e : raw) ladder.entries.push_back(make_ladder_entry(e.mu, e.multiplicity, ladder.n));
  ladder.gamma_window = detail::window_for(mu_complete, ladder.n);
  return ladder;
}

enum class ExponentOrigin { Plus, Minus };

struct Exponent {
  double gamma = 0.0;
  ExponentOrigin origin = ExponentOrigin::Plus;
  std::size_t j = 1;  // 1-based ladder index
};

/// Γ(C) ∩ window, sorted ascending. Resonant entries contribute their
/// double root twice (once per origin).
inline std::vector<Exponent> asymptotic_exponents(const SpectralLadder& ladder,
                                                  std::optional<GammaWindow> window = std::nullopt) {
  if (ladder.entries.empty()) throw Error("empty ladder");
  const double threshold = stability_threshold(ladder.n);
  for (const auto& e : ladder.entries) {
    if (e.mu < threshold && !e.resonant) throw Error("unstable cone: complex indicial roots");
  }
  const GammaWindow w = window.value_or(ladder.gamma_window);
  std::vector<Exponent> out;
  if (w.empty()) return out;
  for (std::size_t i = 0; i < ladder.entries.size(); ++i) {
    const auto& e = ladder.entries[i];
    if (w.contains(e.gamma_plus)) out.push_back({e.gamma_plus, ExponentOrigin::Plus, i + 1});
    if (w.contains(e.gamma_minus)) out.push_back({e.gamma_minus, ExponentOrigin::Minus, i + 1});
  }
  std::stable_sort(out.begin(), out.end(), [](const Exponent& a, const Exponent& b) {
    if (a.gamma != b.gamma) return a.gamma < b.gamma;
    if (a.j != b.j) return a.j < b.j;
    return a.origin == ExponentOrigin::Plus && b.origin == ExponentOrigin::Minus;
  });
  return out;
}

struct StabilityReport {
  bool stable = false;
  double margin = 0.0;  // mu_1 + (n-2)^2/4
  double mu1 = 0.0;
  std::optional<double> mu2;
  double gamma_gap = kInfinity;  // +inf when fewer than two distinct gamma^+
  bool nontrivial_constraints_ok = false;
};

/// The least gamma^+ and the next distinct one, if present.
inline std::pair<double, std::optional<double>> leading_gamma_plus(const SpectralLadder& ladder) {
  if (ladder.entries.empty()) throw Error("empty ladder");
  // gamma^+ is increasing in mu, so the first two entries suffice.
  const double g1 = ladder.entries.front().gamma_plus;
  for (std::size_t i = 1; i < ladder.entries.size(); ++i) {
    const double g = ladder.entries[i].gamma_plus;
    if (g > g1) return {g1, g};
  }
  return {g1, std::nullopt};
}

inline StabilityReport stability_report(const SpectralLadder& ladder) {
  if (ladder.entries.empty()) throw Error("empty ladder");
  StabilityReport rep;
  rep.mu1 = ladder.entries.front().mu;
  rep.margin = rep.mu1 - stability_threshold(ladder.n);
  rep.stable = rep.margin >= -kResonanceTolerance;
  if (ladder.entries.size() > 1) rep.mu2 = ladder.entries[1].mu;
  rep.nontrivial_constraints_ok =
      rep.mu1 <= -ladder.n + 1 + kMergeTolerance && rep.mu2.has_value() && *rep.mu2 <= kMergeTolerance;
  if (!rep.stable) {
    rep.gamma_gap = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  const auto [g1, g2] = leading_gamma_plus(ladder);
  rep.gamma_gap = g2 ? *g2 - g1 : kInfinity;
  return rep;
}

/// |S^d| = 2 π^{(d+1)/2} / Γ((d+1)/2).
inline double sphere_area(int d) {
  return 2.0 * std::pow(M_PI, 0.5 * (d + 1)) / std::tgamma(0.5 * (d + 1));
}

/// Density of a cone whose cross-section has (n-1)-area `area`. The
/// normalisation n ω_n is the area of the unit S^{n-1}, so the equatorial
/// sphere gives exactly 1.
inline double density_from_cross_section_area(double area, int n) {
  return area / sphere_area(n - 1);
}

inline double cone_density(const ConeDescriptor& cone) {
  if (const auto* ps = std::get_if<ProductSphere>(&cone.kind)) {
    if (ps->p < 1 || ps->q < 1) throw Error("product sphere requires p >= 1 and q >= 1");
    const double a = std::sqrt(static_cast<double>(ps->p) / (ps->p + ps->q));
    const double b = std::sqrt(static_cast<double>(ps->q) / (ps->p + ps->q));
    const double area = std::pow(a, ps->p) * std::pow(b, ps->q) * sphere_area(ps->p) * sphere_area(ps->q);
    return density_from_cross_section_area(area, cone.dimension());
  }
  const auto& custom = std::get<CustomSpectrum>(cone.kind);
  if (!custom.density) throw Error("density unavailable");
  return *custom.density;
}

}  // namespace hypercone
