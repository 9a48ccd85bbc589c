#pragma once

// Countable covers of node parameter spaces: geometric interval families in
// R and rho, lattice ball covers of a cube, and a finite net of cone classes.
// Two tuples landing in the same cell satisfy the closeness inequalities.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypercone/cone_trees.hpp"
#include "hypercone/error.hpp"

namespace hypercone {

using BallId = std::array<std::int64_t, 8>;

/// k with base^k <= value < base^{k+1}; value = base^k maps to k.
inline std::int64_t interval_index(double value, double base) {
  if (!(value > 0.0)) throw DomainError("interval index requires a positive value");
  if (!(base > 1.0)) throw DomainError("interval base must exceed 1");
  auto k = static_cast<std::int64_t>(std::floor(std::log(value) / std::log(base)));
  while (std::pow(base, static_cast<double>(k)) > value) --k;
  while (std::pow(base, static_cast<double>(k + 1)) <= value) ++k;
  return k;
}

/// Balls of a fixed radius centred on the lattice s·Z^8, s = 2 radius/√8,
/// restricted to those meeting the cube [-half_width, half_width]^8. Every
/// point of the cube is within radius of its nearest lattice point.
class LatticeBallCover {
 public:
  LatticeBallCover(double radius, double half_width) : radius_(radius), half_width_(half_width) {
    if (!(radius > 0.0)) throw Error("ball radius must be positive");
    if (!(half_width > 0.0)) throw Error("cube half-width must be positive");
    spacing_ = 2.0 * radius / std::sqrt(8.0);
    limit_ = static_cast<std::int64_t>(std::ceil(half_width / spacing_));
  }

  double radius() const { return radius_; }
  double spacing() const { return spacing_; }

  Point8 center(const BallId& id) const {
    Point8 c;
    for (std::size_t i = 0; i < 8; ++i) c[i] = spacing_ * static_cast<double>(id[i]);
    return c;
  }

  bool contains(const BallId& id, const Point8& x) const { return distance(center(id), x) <= radius_; }

  /// Lexicographically smallest ball containing x.
  std::optional<BallId> first_containing(const Point8& x) const {
    std::array<double, 8> tail{};  // least squared distance achievable in coordinates >= i
    for (int i = 7; i >= 0; --i) {
      const double nearest = spacing_ * std::clamp<double>(std::round(x[i] / spacing_), -limit_, limit_);
      const double d = x[i] - nearest;
      tail[i] = d * d + (i < 7 ? tail[i + 1] : 0.0);
    }
    BallId id{};
    if (search(x, 0, radius_ * radius_, tail, id)) return id;
    return std::nullopt;
  }

 private:
  bool search(const Point8& x, int i, double budget, const std::array<double, 8>& tail, BallId& id) const {
    if (i == 8) return true;
    const double rest = i < 7 ? tail[i + 1] : 0.0;
    const double reach = std::sqrt(std::max(0.0, budget));
    const auto lo = std::max<std::int64_t>(-limit_, static_cast<std::int64_t>(std::ceil((x[i] - reach) / spacing_)));
    const auto hi = std::min<std::int64_t>(limit_, static_cast<std::int64_t>(std::floor((x[i] + reach) / spacing_)));
    for (std::int64_t z = lo; z <= hi; ++z) {
      const double d = x[i] - spacing_ * static_cast<double>(z);
      const double left = budget - d * d;
      if (left < rest) continue;
      id[i] = z;
      if (search(x, i + 1, left, tail, id)) return true;
    }
    return false;
  }

  double radius_;
  double half_width_;
  double spacing_;
  std::int64_t limit_;
};

/// Base manifold proxy: a cube with an injectivity-radius cap on ball radii.
struct CubeManifold {
  double half_width = 1.0;
  double injrad = 1.0;
};

struct Type2Cell {
  std::int64_t k = 0;
  BallId ball{};
  bool operator==(const Type2Cell&) const = default;
};

inline double type2_ball_radius(std::int64_t k, double gamma, double r0, const CubeManifold& base) {
  const double b = 1.0 + gamma * r0 / 2.0;
  return std::min(base.injrad, std::pow(b, static_cast<double>(k)) * gamma * r0 / 10.0);
}

/// R-interval over base 1 + γ r0/2 and the first cover ball containing x.
inline Type2Cell covering_cell_type2(const Point8& x, double R, double gamma, double r0, const CubeManifold& base) {
  if (!(R > 0.0)) throw DomainError("R must be positive");
  if (!(gamma > 0.0) || !(r0 > 0.0)) throw DomainError("gamma and r0 must be positive");
  const std::int64_t k = interval_index(R, 1.0 + gamma * r0 / 2.0);
  const LatticeBallCover cover(type2_ball_radius(k, gamma, r0, base), base.half_width);
  const auto ball = cover.first_containing(x);
  if (!ball) throw Error("cover defect: point not in any ball");
  return {k, *ball};
}

/// Cone classes of one density, with a finite net: every class of the
/// family is within γ/2 of some net element, so two classes sharing a net
/// cell are within γ of each other.
struct ConeNet {
  std::vector<std::string> net;
  ConeMetric metric;

  std::size_t index_of(const std::string& cone, double gamma) const {
    for (std::size_t i = 0; i < net.size(); ++i) {
      if (metric(cone, net[i]) <= gamma / 2.0 + kClosenessSlack) return i;
    }
    throw Error("cone net defect");
  }
};

/// Greedy γ/2-net of `cones` under `metric`.
inline ConeNet greedy_cone_net(const std::vector<std::string>& cones, const ConeMetric& metric, double gamma) {
  ConeNet out{{}, metric};
  for (const auto& c : cones) {
    bool covered = false;
    for (const auto& n : out.net) covered = covered || metric(c, n) <= gamma / 2.0;
    if (!covered) out.net.push_back(c);
  }
  return out;
}

struct Type1Cell {
  std::size_t net_index = 0;
  std::optional<std::int64_t> rho_k;  // nullopt is the {0} atom
  std::int64_t R_k = 0;
  BallId ball{};
  bool operator==(const Type1Cell&) const = default;
};

struct Type1Scheme {
  ConeNet cones;
  CubeManifold base;
};

inline Type1Cell covering_cell_type1(const std::string& cone, const Point8& x, double R, double rho, double gamma,
                                     const Type1Scheme& scheme) {
  if (!(R > 0.0)) throw DomainError("R must be positive");
  if (!(rho >= 0.0)) throw DomainError("rho must be nonnegative");
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  Type1Cell cell;
  cell.net_index = scheme.cones.index_of(cone, gamma);
  const double b0 = 1.0 + gamma / 2.0;
  double radius = 0.0;
  if (rho == 0.0) {
    cell.R_k = interval_index(R, b0);
    radius = std::pow(b0, static_cast<double>(cell.R_k)) * gamma / 10.0;
  } else {
    const std::int64_t k = interval_index(rho, b0);
    cell.rho_k = k;
    const double scale = std::min(1.0, std::pow(b0, static_cast<double>(k)));
    const double c = 1.0 + gamma / 2.0 * scale;
    cell.R_k = interval_index(R, c);
    radius = std::pow(c, static_cast<double>(cell.R_k)) * gamma * scale / 10.0;
  }
  const LatticeBallCover cover(std::min(scheme.base.injrad, radius), scheme.base.half_width);
  const auto ball = cover.first_containing(x);
  if (!ball) throw Error("cover defect: point not in any ball");
  cell.ball = *ball;
  return cell;
}

}  // namespace hypercone
