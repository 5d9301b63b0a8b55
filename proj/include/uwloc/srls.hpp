#pragma once

#include <Eigen/Dense>
#include <vector>

#include "uwloc/network.hpp"

namespace uwloc::srls {

inline constexpr double kDefaultBisectionTol = 1e-7;

/// Anchors with known positions plus one estimated range per anchor.
struct SrlsInput {
  std::vector<Position> anchors;
  std::vector<double> ranges;
};

/// Assembled system for the constrained reformulation of the squared-range
/// problem: row i of B is (-2 x_i^T, 1), c_i = range_i^2 - ||x_i||^2, and the
/// constraint pair is D = diag(1,1,0), f = (0,0,-0.5) for y = (u, alpha).
struct SrlsMatrices {
  Eigen::MatrixXd B;  // n x 3
  Eigen::VectorXd c;  // n
  Eigen::Matrix3d BtB;
  Eigen::Vector3d Btc;
};

Eigen::Matrix3d constraint_d();
Eigen::Vector3d constraint_f();

/// Builds B, c and caches B^T B. Throws RankDeficient for fewer than three
/// anchors or a (near-)singular B^T B, i.e. collinear anchors.
SrlsMatrices assemble(const SrlsInput& input);

/// y(lambda) = (B^T B + lambda D)^{-1} (B^T c - lambda f), solved by 3x3
/// Cholesky. Throws NearSingular when a pivot falls below 1e-12.
Eigen::Vector3d y_hat(double lambda, const SrlsMatrices& m);

/// Secular function y^T D y + 2 f^T y = ||u(lambda)||^2 - alpha(lambda);
/// its unique root in the feasible interval gives the optimal multiplier.
double phi(double lambda, const SrlsMatrices& m);

/// Feasibility lower bound -1 / max generalized eigenvalue of (D, B^T B),
/// computed by Cholesky whitening and a 3x3 symmetric eigensolve.
double lambda_lower(const SrlsMatrices& m);

struct SrlsSolution {
  Position position;
  double lambda_star = 0.0;
  double phi_residual = 0.0;
};

/// Bracket history of one solve, for verification.
struct BisectionAudit {
  std::vector<std::pair<double, double>> brackets;  // (lo, hi) after each step
  int doublings = 0;
};

/// Globally optimal squared-range least-squares position: doubles the upper
/// bound from 100 until phi < 0, bisects the bracket below `eps`, and reads
/// u off y(lambda*). Throws NoBracket after 60 fruitless doublings.
SrlsSolution solve(const SrlsInput& input, double eps = kDefaultBisectionTol,
                   BisectionAudit* audit = nullptr);

/// Data misfit sum_i (range_i^2 - ||x_i - u||^2)^2 at candidate u.
double objective(const SrlsInput& input, Position u);

/// Exhaustive grid minimizer of the misfit over `bounds` at `resolution`;
/// ties break toward smaller x, then smaller y. Test oracle.
Position brute_force_oracle(const SrlsInput& input, const Box& bounds,
                            double resolution);

}  // namespace uwloc::srls
