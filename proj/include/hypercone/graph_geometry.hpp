#pragma once

// Normal graphs over the flat model M0 = B_1^n x (-1, 1), g = g^z + dz^2,
// with a conformal factor (1 + f). Fields vary in the first `dims`
// coordinates of the base and are constant in the remaining n - dims, so
// the tensor grid stays small while the density keeps its n-dimensional
// determinant and (1 + f)^{n/2} factor.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypercone/error.hpp"

namespace hypercone {

/// Uniform tensor grid on [-extent, extent]^dims.
class Grid {
 public:
  Grid(int dims, int points_per_axis, double extent = 1.0)
      : dims_(dims), points_(points_per_axis), extent_(extent) {
    if (dims < 1 || dims > 6) throw Error("grid dimension must be in 1..6");
    if (points_per_axis < 5) throw Error("grid needs at least 5 points per axis");
    if (!(extent > 0.0)) throw Error("grid extent must be positive");
    size_ = 1;
    for (int a = 0; a < dims; ++a) size_ *= static_cast<std::size_t>(points_);
  }

  /// Grid on [-1, 1]^dims with spacing h (2/h must be an integer).
  static Grid with_spacing(int dims, double h) {
    const double cells = 2.0 / h;
    const long rounded = std::lround(cells);
    if (std::abs(cells - rounded) > 1e-9) throw Error("grid spacing must divide the unit box");
    return Grid(dims, static_cast<int>(rounded) + 1, 1.0);
  }

  int dims() const { return dims_; }
  int points() const { return points_; }
  double extent() const { return extent_; }
  double h() const { return 2.0 * extent_ / (points_ - 1); }
  std::size_t size() const { return size_; }

  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(points_);
    return s;
  }

  int coordinate_index(std::size_t node, int axis) const {
    return static_cast<int>((node / stride(axis)) % static_cast<std::size_t>(points_));
  }

  double coordinate(std::size_t node, int axis) const {
    return -extent_ + h() * coordinate_index(node, axis);
  }

  std::vector<double> point(std::size_t node) const {
    std::vector<double> x(static_cast<std::size_t>(dims_));
    for (int a = 0; a < dims_; ++a) x[static_cast<std::size_t>(a)] = coordinate(node, a);
    return x;
  }

  /// Inside the box shrunk by `margin` in every active coordinate.
  bool interior(std::size_t node, double margin) const {
    for (int a = 0; a < dims_; ++a) {
      if (std::abs(coordinate(node, a)) > extent_ - margin + 1e-12) return false;
    }
    return true;
  }

  /// Product trapezoid weight times the cell volume.
  double quadrature_weight(std::size_t node) const {
    double w = 1.0;
    for (int a = 0; a < dims_; ++a) {
      const int i = coordinate_index(node, a);
      w *= (i == 0 || i == points_ - 1) ? 0.5 * h() : h();
    }
    return w;
  }

  bool operator==(const Grid&) const = default;

 private:
  int dims_;
  int points_;
  double extent_;
  std::size_t size_ = 1;
};

struct GridField {
  Grid grid;
  std::vector<double> values;

  GridField(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw Error("field size does not match grid");
  }

  template <typename Fn>
  static GridField sample(const Grid& g, Fn&& fn) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto x = g.point(i);
      v[i] = fn(std::span<const double>(x));
    }
    return GridField(g, std::move(v));
  }

  double operator[](std::size_t i) const { return values[i]; }
};

inline GridField operator-(const GridField& a, const GridField& b) {
  if (!(a.grid == b.grid)) throw Error("fields live on different grids");
  std::vector<double> v(a.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values[i] - b.values[i];
  return GridField(a.grid, std::move(v));
}

inline GridField operator+(const GridField& a, const GridField& b) {
  if (!(a.grid == b.grid)) throw Error("fields live on different grids");
  std::vector<double> v(a.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values[i] + b.values[i];
  return GridField(a.grid, std::move(v));
}

inline GridField operator*(double s, const GridField& a) {
  std::vector<double> v(a.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s * a.values[i];
  return GridField(a.grid, std::move(v));
}

/// Second-order first derivative: centred inside, one-sided on the boundary.
inline GridField derivative(const GridField& f, int axis) {
  const Grid& g = f.grid;
  const double h = g.h();
  const std::size_t s = g.stride(axis);
  const int last = g.points() - 1;
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int k = g.coordinate_index(i, axis);
    const auto& v = f.values;
    if (k == 0) {
      out[i] = (-3 * v[i] + 4 * v[i + s] - v[i + 2 * s]) / (2 * h);
    } else if (k == last) {
      out[i] = (3 * v[i] - 4 * v[i - s] + v[i - 2 * s]) / (2 * h);
    } else {
      out[i] = (v[i + s] - v[i - s]) / (2 * h);
    }
  }
  return GridField(g, std::move(out));
}

/// Compact second-order pure second derivative.
inline GridField second_derivative(const GridField& f, int axis) {
  const Grid& g = f.grid;
  const double h2 = g.h() * g.h();
  const std::size_t s = g.stride(axis);
  const int last = g.points() - 1;
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int k = g.coordinate_index(i, axis);
    const auto& v = f.values;
    if (k == 0) {
      out[i] = (2 * v[i] - 5 * v[i + s] + 4 * v[i + 2 * s] - v[i + 3 * s]) / h2;
    } else if (k == last) {
      out[i] = (2 * v[i] - 5 * v[i - s] + 4 * v[i - 2 * s] - v[i - 3 * s]) / h2;
    } else {
      out[i] = (v[i + s] - 2 * v[i] + v[i - s]) / h2;
    }
  }
  return GridField(g, std::move(out));
}

/// Σ_a D_a D_a u with the same centred D_a the operator uses; this is the
/// exact linearisation at u = 0 of the discrete minimal surface operator.
inline GridField discrete_laplacian(const GridField& u) {
  GridField acc(u.grid, std::vector<double>(u.grid.size(), 0.0));
  for (int a = 0; a < u.grid.dims(); ++a) acc = acc + derivative(derivative(u, a), a);
  return acc;
}

/// Samples plus the regularity-scale weight r_S at every node.
struct WeightedField {
  GridField field;
  std::vector<double> weight;

  WeightedField(GridField f, std::vector<double> w) : field(std::move(f)), weight(std::move(w)) {
    if (weight.size() != field.values.size()) throw Error("weight size does not match grid");
    for (double x : weight)
      if (!(x > 0.0)) throw Error("weight must be positive");
  }
};

/// ||φ||_{C^k_*} = sup_x Σ_{j<=k} r_S(x)^{j-1} |∇^j φ|(x).
inline double ck_star_norm(const WeightedField& wf, int k) {
  if (k < 0 || k > 2) throw Error("ck_star_norm supports k in 0..2");
  const Grid& g = wf.field.grid;
  const int d = g.dims();
  std::vector<GridField> first;
  std::vector<GridField> second;  // row-major d x d
  if (k >= 1)
    for (int a = 0; a < d; ++a) first.push_back(derivative(wf.field, a));
  if (k >= 2) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        second.push_back(a == b ? second_derivative(wf.field, a) : derivative(first[static_cast<std::size_t>(a)], b));
  }
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = wf.weight[i];
    double sum = std::abs(wf.field.values[i]) / w;
    if (k >= 1) {
      double grad = 0.0;
      for (const auto& f : first) grad += f.values[i] * f.values[i];
      sum += std::sqrt(grad);
    }
    if (k >= 2) {
      double hess = 0.0;
      for (const auto& f : second) hess += f.values[i] * f.values[i];
      sum += w * std::sqrt(hess);
    }
    best = std::max(best, sum);
  }
  return best;
}

/// A scalar on the base x (-1, 1) together with its z-derivative. The base
/// argument carries only the active coordinates.
struct ZField {
  std::function<double(std::span<const double>, double)> value;
  std::function<double(std::span<const double>, double)> dz;

  static ZField zero() {
    return {[](std::span<const double>, double) { return 0.0; },
            [](std::span<const double>, double) { return 0.0; }};
  }
};

/// Symmetric n x n metric g^z(x) with its z-derivative.
struct MetricField {
  std::function<Eigen::MatrixXd(std::span<const double>, double)> value;
  std::function<Eigen::MatrixXd(std::span<const double>, double)> dz;
};

struct FlatModel {
  int n = 7;
  Grid grid = Grid::with_spacing(2, 1.0 / 16);
  std::optional<MetricField> metric;  // identity when empty
  ZField conformal = ZField::zero();

  FlatModel with_conformal(ZField f) const {
    FlatModel m = *this;
    m.conformal = std::move(f);
    return m;
  }
};

namespace detail {

struct DensityJet {
  double F = 1.0;
  Eigen::VectorXd dF_dxi;  // active components
  double dF_dz = 0.0;
};

inline DensityJet density_jet(const FlatModel& model, std::span<const double> x, double z,
                              std::span<const double> xi_active) {
  const int n = model.n;
  const int d = model.grid.dims();
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(n);
  for (int a = 0; a < d; ++a) xi(a) = xi_active[static_cast<std::size_t>(a)];
  Eigen::MatrixXd Gz = model.metric ? model.metric->value(x, z) : Eigen::MatrixXd::Identity(n, n);
  double det0 = 1.0;
  if (model.metric) {
    Eigen::LLT<Eigen::MatrixXd> base(model.metric->value(x, 0.0));
    if (base.info() != Eigen::Success) throw Error("degenerate graph metric");
    det0 = base.matrixL().determinant();
    det0 *= det0;
  }
  Eigen::MatrixXd M = Gz + xi * xi.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) throw Error("degenerate graph metric");
  double det = llt.matrixL().determinant();
  det = det * det / det0;
  const double f = model.conformal.value(x, z);
  if (!(1.0 + f > 0.0)) throw Error("conformal factor must keep 1 + f > 0");
  DensityJet jet;
  jet.F = std::sqrt(std::pow(1.0 + f, n) * det);
  const Eigen::VectorXd Minv_xi = llt.solve(xi);
  jet.dF_dxi = jet.F * Minv_xi.head(d);
  double dz_log = 0.5 * n * model.conformal.dz(x, z) / (1.0 + f);
  if (model.metric) dz_log += 0.5 * llt.solve(model.metric->dz(x, z)).trace();
  jet.dF_dz = jet.F * dz_log;
  return jet;
}

inline std::vector<GridField> gradient(const GridField& u) {
  std::vector<GridField> out;
  for (int a = 0; a < u.grid.dims(); ++a) out.push_back(derivative(u, a));
  return out;
}

inline void check_graph_regime(const GridField& u, const std::vector<GridField>& du) {
  for (std::size_t i = 0; i < u.grid.size(); ++i) {
    double g2 = 0.0;
    for (const auto& f : du) g2 += f.values[i] * f.values[i];
    // r_S = 1 on the flat model, so ||u||_{C^1_*} = sup |u| + |∇u|.
    if (std::abs(u.values[i]) + std::sqrt(g2) > 0.1) {
      std::ostringstream msg;
      msg << "graph regime violated at (";
      const auto x = u.grid.point(i);
      for (std::size_t a = 0; a < x.size(); ++a) msg << (a ? ", " : "") << x[a];
      msg << "): |u| + |du| = " << std::abs(u.values[i]) + std::sqrt(g2);
      throw Error(msg.str());
    }
  }
}

}  // namespace detail

/// F^f(x, z, ξ) = sqrt((1 + f(x,z))^n det_{g^0}[g^z + ξ ⊗ ξ](x)).
inline double area_density_F(const FlatModel& model, std::span<const double> x, double z,
                             std::span<const double> xi) {
  if (!(std::abs(z) < 1.0)) throw DomainError("area density requires |z| < 1");
  if (static_cast<int>(x.size()) != model.grid.dims() || static_cast<int>(xi.size()) != model.grid.dims()) {
    throw Error("point and covector must carry the active coordinates");
  }
  return detail::density_jet(model, x, z, xi).F;
}

/// Trapezoidal area of graph(u) over the base box.
inline double area_functional(const FlatModel& model, const GridField& u) {
  const auto du = detail::gradient(u);
  detail::check_graph_regime(u, du);
  const int d = model.grid.dims();
  double total = 0.0;
  std::vector<double> xi(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < u.grid.size(); ++i) {
    for (int a = 0; a < d; ++a) xi[static_cast<std::size_t>(a)] = du[static_cast<std::size_t>(a)].values[i];
    const auto x = u.grid.point(i);
    total += u.grid.quadrature_weight(i) * detail::density_jet(model, x, u.values[i], xi).F;
  }
  return total;
}

/// M^f(u) = -div ∂_ξ F^f(x, u, du) + ∂_z F^f(x, u, du).
inline GridField minimal_surface_operator(const FlatModel& model, const GridField& u) {
  if (!(u.grid == model.grid)) throw Error("field does not live on the model grid");
  const auto du = detail::gradient(u);
  detail::check_graph_regime(u, du);
  const int d = model.grid.dims();
  std::vector<GridField> flux(static_cast<std::size_t>(d), GridField(u.grid, std::vector<double>(u.grid.size())));
  std::vector<double> source(u.grid.size());
  std::vector<double> xi(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < u.grid.size(); ++i) {
    for (int a = 0; a < d; ++a) xi[static_cast<std::size_t>(a)] = du[static_cast<std::size_t>(a)].values[i];
    const auto x = u.grid.point(i);
    const auto jet = detail::density_jet(model, x, u.values[i], xi);
    for (int a = 0; a < d; ++a) flux[static_cast<std::size_t>(a)].values[i] = jet.dF_dxi(a);
    source[i] = jet.dF_dz;
  }
  GridField out(u.grid, std::move(source));
  for (int a = 0; a < d; ++a) out = out - derivative(flux[static_cast<std::size_t>(a)], a);
  return out;
}

/// Grid pairing Σ w_i a_i b_i with trapezoid weights.
inline double grid_inner(const GridField& a, const GridField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.grid.size(); ++i) s += a.grid.quadrature_weight(i) * a.values[i] * b.values[i];
  return s;
}

/// sup over B_{1-4h}.
inline double interior_sup(const GridField& f) {
  const double margin = 4.0 * f.grid.h();
  double best = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    if (f.grid.interior(i, margin)) best = std::max(best, std::abs(f.values[i]));
  return best;
}

struct LinearizationResidual {
  GridField residual;
  double norm = 0.0;
};

/// M^{f+}(u+) - M^{f-}(u-) + Δ(u+ - u-) - (n/2) ∂_z(f+ - f-)|_{z=0}.
inline LinearizationResidual linearization_residual(const FlatModel& model, const GridField& u_plus,
                                                    const GridField& u_minus, const ZField& f_plus,
                                                    const ZField& f_minus) {
  const GridField m_plus = minimal_surface_operator(model.with_conformal(f_plus), u_plus);
  const GridField m_minus = minimal_surface_operator(model.with_conformal(f_minus), u_minus);
  const GridField nu_f = GridField::sample(model.grid, [&](std::span<const double> x) {
    return 0.5 * model.n * (f_plus.dz(x, 0.0) - f_minus.dz(x, 0.0));
  });
  GridField r = m_plus - m_minus + discrete_laplacian(u_plus - u_minus) - nu_f;
  const double norm = interior_sup(r);
  return {std::move(r), norm};
}

/// Finite-difference proxy for ||g - g_eucl||_{C^3} sampled on the grid
/// and the z-levels {-1/2, 0, 1/2}.
inline double metric_deviation_proxy(const FlatModel& model) {
  if (!model.metric) return 0.0;
  const int n = model.n;
  const int d = model.grid.dims();
  const double h = model.grid.h();
  auto eval = [&](std::vector<double> x, double z) { return model.metric->value(x, z); };
  double worst = 0.0;
  for (std::size_t node = 0; node < model.grid.size(); ++node) {
    const auto x = model.grid.point(node);
    for (double z : {-0.5, 0.0, 0.5}) {
      const Eigen::MatrixXd g0 = eval(x, z);
      double c0 = (g0 - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
      double c1 = 0.0, c2 = 0.0, c3 = 0.0;
      for (int dir = 0; dir <= d; ++dir) {
        auto shifted = [&](double s) {
          auto y = x;
          double zz = z;
          if (dir < d) y[static_cast<std::size_t>(dir)] += s; else zz += s;
          return eval(y, zz);
        };
        const Eigen::MatrixXd m2 = shifted(-2 * h), m1 = shifted(-h), p1 = shifted(h), p2 = shifted(2 * h);
        c1 = std::max(c1, ((p1 - m1) / (2 * h)).cwiseAbs().maxCoeff());
        c2 = std::max(c2, ((p1 - 2 * g0 + m1) / (h * h)).cwiseAbs().maxCoeff());
        c3 = std::max(c3, ((p2 - 2 * p1 + 2 * m1 - m2) / (2 * h * h * h)).cwiseAbs().maxCoeff());
      }
      worst = std::max(worst, c0 + c1 + c2 + c3);
    }
  }
  return worst;
}

/// Checks the model assumptions: h <= 1/8 and the metric within 1/10 of
/// Euclidean in the C^3 proxy.
inline void validate_model(const FlatModel& model) {
  if (model.grid.h() > 0.125 + 1e-12) throw Error("grid resolution h must be <= 1/8");
  if (model.grid.dims() > model.n) throw Error("active dimensions exceed n");
  if (metric_deviation_proxy(model) > 0.1) throw Error("metric deviates from Euclidean beyond 1/10 in C^3");
}

}  // namespace hypercone
