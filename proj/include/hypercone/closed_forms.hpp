#pragma once

// Closed-form antiderivatives for power and power-log profiles on dyadic
// scales, the three-scale second differences they induce, and the
// discriminants whose negativity makes those second differences
// positive-definite in the coefficients.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "hypercone/error.hpp"
#include "hypercone/parallel.hpp"

namespace hypercone {

/// (K^x - 1) / x, continuous at x = 0 where it equals log K.
inline double power_ratio(double x, double K) {
  const double L = std::log(K);
  if (x == 0.0) return L;
  return std::expm1(x * L) / x;
}

/// I_K(r; c, c') = ∫_r^{Kr} (c s^alpha + c' s^beta)^2 s^{-1} ds.
inline double closed_form_I(double alpha, double beta, double c, double c2, double r, double K) {
  return c * c * std::pow(r, 2 * alpha) * power_ratio(2 * alpha, K) +
         2 * c * c2 * std::pow(r, alpha + beta) * power_ratio(alpha + beta, K) +
         c2 * c2 * std::pow(r, 2 * beta) * power_ratio(2 * beta, K);
}

namespace detail {

/// ∫_{-w}^{w} e^{a y} y^m dy for m = 0, 1, 2.
inline std::array<double, 3> symmetric_exp_moments(double a, double w) {
  std::array<double, 3> out{};
  if (std::abs(a * w) < 2.0) {
    // Power series in a; only i + m even survives the symmetric interval.
    for (int m = 0; m < 3; ++m) {
      double sum = 0.0;
      double coef = 1.0;  // a^i / i!
      for (int i = 0; i < 80; ++i) {
        if (i > 0) coef *= a / i;
        if ((i + m) % 2 == 0) {
          const int p = i + m + 1;
          const double term = coef * 2.0 * std::pow(w, p) / p;
          sum += term;
          if (i > 4 && std::abs(term) <= 1e-18 * std::abs(sum)) break;
        }
      }
      out[m] = sum;
    }
    return out;
  }
  const double ep = std::exp(a * w);
  const double em = std::exp(-a * w);
  out[0] = (ep - em) / a;
  out[1] = (w * ep + w * em) / a - out[0] / a;
  out[2] = (w * w * ep - w * w * em) / a - 2.0 * out[1] / a;
  return out;
}

}  // namespace detail

/// ∫_lo^hi s^{a-1} (log s)^k ds for k = 0, 1, 2. Exact at a = 0 and
/// accurate across the transition to small |a|.
inline std::array<double, 3> log_moments(double a, double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("log_moments requires 0 < lo < hi");
  const double x0 = std::log(lo);
  const double x1 = std::log(hi);
  const double xc = 0.5 * (x0 + x1);
  const double w = 0.5 * (x1 - x0);
  const auto n = detail::symmetric_exp_moments(a, w);
  const double scale = std::exp(a * xc);
  // (xc + y)^k expanded in y.
  return {scale * n[0], scale * (xc * n[0] + n[1]), scale * (xc * xc * n[0] + 2 * xc * n[1] + n[2])};
}

/// Ĩ_K(r; c, c') = ∫_r^{Kr} (c s^a + c' s^a log s)^2 s^{-1} ds.
inline double closed_form_I_log(double alpha_prime, double c, double c2, double r, double K) {
  const auto m = log_moments(2 * alpha_prime, r, K * r);
  return c * c * m[0] + 2 * c * c2 * m[1] + c2 * c2 * m[2];
}

/// ∫ over [K^2 r, K^3 r] - 2 ∫ over [K r, K^2 r] + ∫ over [r, K r] of s^{x-1},
/// i.e. r^x (K^x - 1)^3 / x.
inline double three_scale_power(double x, double r, double K) {
  const double e = std::expm1(x * std::log(K));
  return std::pow(r, x) * power_ratio(x, K) * e * e;
}

/// Coefficients of a c^2 + 2 b c c' + d c'^2.
struct QuadraticForm {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double evaluate(double x, double y) const { return a * x * x + 2 * b * x * y + c * y * y; }
  double determinant() const { return a * c - b * b; }
};

/// Three-scale second difference of I_K as a quadratic form in (c, c').
inline QuadraticForm three_scale_form_power(double alpha, double beta, double r, double K) {
  return {three_scale_power(2 * alpha, r, K), three_scale_power(alpha + beta, r, K),
          three_scale_power(2 * beta, r, K)};
}

/// Three-scale second difference of Ĩ_K as a quadratic form in (c, c').
inline QuadraticForm three_scale_form_log(double alpha_prime, double r, double K) {
  const double a = 2 * alpha_prime;
  const auto lo = log_moments(a, r, K * r);
  const auto mid = log_moments(a, K * r, K * K * r);
  const auto hi = log_moments(a, K * K * r, K * K * K * r);
  auto second = [&](int k) { return hi[k] - 2 * mid[k] + lo[k]; };
  return {second(0), second(1), second(2)};
}

/// Δ(K; α, β) = [(K^{α+β}-1)^3/(α+β)]^2 - (K^{2α}-1)^3/(2α) · (K^{2β}-1)^3/(2β).
inline double discriminant_power(double K, double alpha, double beta) {
  if (alpha == beta) throw DomainError("use log branch");
  if (alpha == 0.0 || beta == 0.0 || alpha + beta == 0.0) {
    throw DomainError("discriminant_power requires alpha, beta, alpha+beta nonzero");
  }
  // Extended precision: the difference cancels as alpha -> beta.
  const long double L = std::log(static_cast<long double>(K));
  auto f = [L](long double x) {
    const long double e = std::expm1(x * L);
    return e * e * e / x;
  };
  const long double a = alpha, b = beta;
  const long double cross = f(a + b);
  return static_cast<double>(cross * cross - f(2 * a) * f(2 * b));
}

/// Δ(K; α) = ((K^α-1)^4/α^2) · [3 K^α (log K)^2 - (K^α-1)^2/α^2], for the
/// pair (s^{α'}, s^{α'} log s) with α = 2α'.
inline double discriminant_log(double K, double alpha) {
  if (alpha == 0.0) throw DomainError("discriminant_log requires alpha != 0");
  const double e = std::pow(K, alpha) - 1.0;
  const double L = std::log(K);
  return std::pow(e, 4) / (alpha * alpha) * (3.0 * std::pow(K, alpha) * L * L - e * e / (alpha * alpha));
}

/// Sign-preserving, scale-free versions of the discriminants, in [-1, inf).
inline double relative_discriminant_power(double K, double alpha, double beta) {
  const double ratio = three_scale_power(alpha + beta, 1.0, K);
  return ratio * ratio / (three_scale_power(2 * alpha, 1.0, K) * three_scale_power(2 * beta, 1.0, K)) - 1.0;
}

inline double relative_discriminant_log(double K, double alpha) {
  const double e = std::expm1(alpha * std::log(K));
  const double L = std::log(K);
  return 3.0 * std::pow(K, alpha) * (alpha * L) * (alpha * L) / (e * e) - 1.0;
}

enum class Branch { Power, Log };

inline const char* to_string(Branch b) { return b == Branch::Power ? "power" : "log"; }

/// Exponent samples alpha_min, alpha_min + step, ... , alpha_max and a
/// ladder of K values (ascending).
struct GridSpec {
  double alpha_min = -4.0;
  double alpha_max = 4.0;
  double step = 0.25;
  std::vector<double> K_ladder;

  std::vector<double> exponents() const {
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((alpha_max - alpha_min) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(alpha_min + i * step);
    return out;
  }

  static std::vector<double> ladder(double K_min, double K_max, double K_step) {
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((K_max - K_min) / K_step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(K_min + i * K_step);
    return out;
  }
};

struct LadderRow {
  double K = 0.0;
  double max_relative = 0.0;  // largest relative discriminant over the grid
  double witness_alpha = 0.0;
  double witness_beta = 0.0;  // NaN on the log branch
};

struct ThresholdResult {
  double sigma = 0.0;
  Branch branch = Branch::Power;
  double K_star = 0.0;
  double witness_alpha = 0.0;
  double witness_beta = 0.0;
  double max_discriminant = 0.0;  // relative discriminant at the witness
  std::vector<LadderRow> rows;
};

/// Worst (largest) relative discriminant over the admissible grid pairs at
/// a single K. On the log branch the grid variable is α' with |α'| >= σ
/// and the discriminant is evaluated at α = 2α'.
inline LadderRow worst_on_grid(double K, double sigma, Branch branch, const std::vector<double>& exps) {
  LadderRow row{K, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN()};
  const double slack = 1e-12;
  for (double a : exps) {
    if (std::abs(a) < sigma - slack) continue;
    if (branch == Branch::Log) {
      const double d = relative_discriminant_log(K, 2 * a);
      if (d > row.max_relative) row = {K, d, a, std::numeric_limits<double>::quiet_NaN()};
      continue;
    }
    for (double b : exps) {
      if (a == b || std::abs(b) < sigma - slack || std::abs(a + b) < sigma - slack) continue;
      const double d = relative_discriminant_power(K, a, b);
      if (d > row.max_relative) row = {K, d, a, b};
    }
  }
  return row;
}

/// Smallest ladder K such that the discriminant is negative at every
/// admissible grid sample for that K and every larger ladder K.
inline ThresholdResult find_threshold_K(double sigma, Branch branch, const GridSpec& grid) {
  if (!(sigma > 0.0)) throw Error("sigma must be positive");
  if (grid.K_ladder.empty()) throw Error("empty K ladder");
  for (std::size_t i = 0; i < grid.K_ladder.size(); ++i) {
    if (!(grid.K_ladder[i] > 1.0)) throw Error("K ladder entries must exceed 1");
    if (i > 0 && !(grid.K_ladder[i] > grid.K_ladder[i - 1])) throw Error("K ladder must be increasing");
  }
  const auto exps = grid.exponents();
  ThresholdResult res;
  res.sigma = sigma;
  res.branch = branch;
  res.rows.resize(grid.K_ladder.size());
  parallel_for(grid.K_ladder.size(),
               [&](std::size_t i) { res.rows[i] = worst_on_grid(grid.K_ladder[i], sigma, branch, exps); });
  std::size_t first_ok = res.rows.size();
  for (std::size_t i = res.rows.size(); i-- > 0;) {
    if (!(res.rows[i].max_relative < 0.0)) break;
    first_ok = i;
  }
  if (first_ok == res.rows.size()) throw Error("threshold beyond grid");
  const LadderRow& w = res.rows[first_ok];
  res.K_star = w.K;
  res.witness_alpha = w.witness_alpha;
  res.witness_beta = w.witness_beta;
  res.max_discriminant = w.max_relative;
  return res;
}

}  // namespace hypercone
