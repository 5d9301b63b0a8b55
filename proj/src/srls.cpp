#include "uwloc/srls.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace uwloc::srls {

namespace {

constexpr double kPivotTol = 1e-12;

// Lower-triangular Cholesky of a symmetric 3x3. Returns false when a pivot
// drops below `pivot_tol` (matrix not safely positive definite).
bool cholesky3(const Eigen::Matrix3d& m, Eigen::Matrix3d& lower,
               double pivot_tol) {
  lower.setZero();
  for (int c = 0; c < 3; ++c) {
    double diag = m(c, c);
    for (int k = 0; k < c; ++k) diag -= lower(c, k) * lower(c, k);
    if (!(diag > 0.0)) return false;
    const double pivot = std::sqrt(diag);
    if (pivot < pivot_tol) return false;
    lower(c, c) = pivot;
    for (int r = c + 1; r < 3; ++r) {
      double v = m(r, c);
      for (int k = 0; k < c; ++k) v -= lower(r, k) * lower(c, k);
      lower(r, c) = v / pivot;
    }
  }
  return true;
}

Eigen::Vector3d cholesky3_solve(const Eigen::Matrix3d& lower,
                                Eigen::Vector3d rhs) {
  // Forward substitution L z = rhs.
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < r; ++k) rhs(r) -= lower(r, k) * rhs(k);
    rhs(r) /= lower(r, r);
  }
  // Back substitution L^T y = z.
  for (int r = 2; r >= 0; --r) {
    for (int k = r + 1; k < 3; ++k) rhs(r) -= lower(k, r) * rhs(k);
    rhs(r) /= lower(r, r);
  }
  return rhs;
}

}  // namespace

Eigen::Matrix3d constraint_d() {
  Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
  d(0, 0) = 1.0;
  d(1, 1) = 1.0;
  return d;
}

Eigen::Vector3d constraint_f() { return {0.0, 0.0, -0.5}; }

SrlsMatrices assemble(const SrlsInput& input) {
  const std::size_t n = input.anchors.size();
  if (n != input.ranges.size())
    throw std::invalid_argument("anchor/range count mismatch");
  if (n < 3) throw RankDeficient("need at least three anchors");
  for (double r : input.ranges)
    if (r < 0.0) throw std::invalid_argument("ranges must be nonnegative");

  SrlsMatrices m;
  m.B.resize(static_cast<Eigen::Index>(n), 3);
  m.c.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Position& p = input.anchors[i];
    m.B(static_cast<Eigen::Index>(i), 0) = -2.0 * p.x;
    m.B(static_cast<Eigen::Index>(i), 1) = -2.0 * p.y;
    m.B(static_cast<Eigen::Index>(i), 2) = 1.0;
    m.c(static_cast<Eigen::Index>(i)) =
        input.ranges[i] * input.ranges[i] - (p.x * p.x + p.y * p.y);
  }
  m.BtB = m.B.transpose() * m.B;
  m.Btc = m.B.transpose() * m.c;

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.BtB);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(2);
  if (lo <= 1e-10 * std::max(1.0, hi))
    throw RankDeficient("anchors are collinear (B^T B singular)");
  return m;
}

Eigen::Vector3d y_hat(double lambda, const SrlsMatrices& m) {
  const Eigen::Matrix3d mat = m.BtB + lambda * constraint_d();
  const Eigen::Vector3d rhs = m.Btc - lambda * constraint_f();
  Eigen::Matrix3d lower;
  if (!cholesky3(mat, lower, kPivotTol))
    throw NearSingular("B^T B + lambda D not positive definite at lambda = " +
                       std::to_string(lambda));
  return cholesky3_solve(lower, rhs);
}

double phi(double lambda, const SrlsMatrices& m) {
  const Eigen::Vector3d y = y_hat(lambda, m);
  // y^T D y + 2 f^T y with D = diag(1,1,0), f = (0,0,-0.5).
  return y(0) * y(0) + y(1) * y(1) - y(2);
}

double lambda_lower(const SrlsMatrices& m) {
  Eigen::Matrix3d lower;
  if (!cholesky3(m.BtB, lower, kPivotTol))
    throw RankDeficient("B^T B not positive definite");
  // Whitened pencil: max eig of L^{-1} D L^{-T} equals max generalized
  // eigenvalue of D v = mu (B^T B) v.
  const Eigen::Matrix3d linv =
      lower.triangularView<Eigen::Lower>().solve(Eigen::Matrix3d::Identity());
  const Eigen::Matrix3d w = linv * constraint_d() * linv.transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(w);
  const double mu = es.eigenvalues()(2);
  if (!(mu > 0.0)) throw NearSingular("generalized eigenvalue not positive");
  return -1.0 / mu;
}

SrlsSolution solve(const SrlsInput& input, double eps, BisectionAudit* audit) {
  if (!(eps > 0.0)) throw std::invalid_argument("bisection tolerance must be positive");
  const SrlsMatrices m = assemble(input);

  double lo = lambda_lower(m);
  lo += 1e-9 * (1.0 + std::abs(lo));  // stay strictly inside definiteness
  double hi = 100.0;

  int doublings = 0;
  while (phi(hi, m) >= 0.0) {
    hi *= 2.0;
    if (++doublings > 60)
      throw NoBracket("secular function stayed nonnegative after 60 doublings");
  }
  if (audit) {
    audit->doublings = doublings;
    audit->brackets.emplace_back(lo, hi);
  }

  while (hi - lo >= eps) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid, m) >= 0.0)
      lo = mid;
    else
      hi = mid;
    if (audit) audit->brackets.emplace_back(lo, hi);
  }

  const double lam = 0.5 * (lo + hi);
  const Eigen::Vector3d y = y_hat(lam, m);
  return {{y(0), y(1)}, lam, phi(lam, m)};
}

double objective(const SrlsInput& input, Position u) {
  if (input.anchors.size() != input.ranges.size())
    throw std::invalid_argument("anchor/range count mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < input.anchors.size(); ++i) {
    const double t = input.ranges[i] * input.ranges[i] -
                     squared_distance(input.anchors[i], u);
    total += t * t;
  }
  return total;
}

Position brute_force_oracle(const SrlsInput& input, const Box& bounds,
                            double resolution) {
  if (!(resolution > 0.0))
    throw std::invalid_argument("grid resolution must be positive");
  if (bounds.xmax < bounds.xmin || bounds.ymax < bounds.ymin)
    throw std::invalid_argument("empty bounds");

  const auto count = [&](double lo, double hi) {
    return static_cast<long>(std::floor((hi - lo) / resolution + 1e-9)) + 1;
  };
  const long nx = count(bounds.xmin, bounds.xmax);
  const long ny = count(bounds.ymin, bounds.ymax);

  Position best{bounds.xmin, bounds.ymin};
  double best_val = objective(input, best);
  for (long ix = 0; ix < nx; ++ix) {
    const double x = bounds.xmin + static_cast<double>(ix) * resolution;
    for (long iy = 0; iy < ny; ++iy) {
      const Position u{x, bounds.ymin + static_cast<double>(iy) * resolution};
      const double v = objective(input, u);
      if (v < best_val) {  // strict: ties keep the smaller x, then smaller y
        best_val = v;
        best = u;
      }
    }
  }
  return best;
}

}  // namespace uwloc::srls
