#include <cmath>
#include <string>

#include "admira/error.hpp"
#include "admira/solver.hpp"

namespace admira {
namespace {

using Eigen::VectorXd;

VectorXd as_vector(const std::vector<double>& x) {
  return Eigen::Map<const VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

// Matrix-free G a = A(sum a_k u_k v_k^T) and G^T y = (<A* y, u_k v_k^T>)_k.
struct AtomImageMap {
  const MeasurementOperator& op;
  const AtomSet& atoms;

  VectorXd forward(const VectorXd& coeffs) const {
    return as_vector(op.apply_combination(
        atoms, std::span<const double>(coeffs.data(), static_cast<std::size_t>(coeffs.size()))));
  }
  VectorXd backward(const VectorXd& y) const {
    return as_vector(op.adjoint_on_atoms(
        std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), atoms));
  }
};

VectorXd solve_qr(const MeasurementOperator& op, const VectorXd& b, const AtomSet& atoms,
                  const LeastSquaresOptions& options) {
  const Eigen::MatrixXd images = op.atom_images(atoms);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(options.drop_tolerance);
  cod.compute(images);
  return cod.solve(b);
}

// Conjugate gradients on the normal equations (CGNR). Started from zero, the
// iterates stay in range(G^T), so the limit is the minimum-norm solution.
VectorXd solve_cg(const AtomImageMap& g, const VectorXd& b, std::size_t k,
                  const LeastSquaresOptions& options) {
  const std::size_t max_iter = options.max_iter > 0 ? options.max_iter : 20 * k + 100;
  VectorXd x = VectorXd::Zero(static_cast<Eigen::Index>(k));
  VectorXd r = b;
  VectorXd s = g.backward(r);
  const double target = options.tolerance * s.norm();
  if (s.norm() == 0.0) return x;
  VectorXd d = s;
  double gamma = s.squaredNorm();
  for (std::size_t it = 0; it < max_iter; ++it) {
    const VectorXd q = g.forward(d);
    const double qq = q.squaredNorm();
    if (qq == 0.0) break;
    const double alpha = gamma / qq;
    x += alpha * d;
    r -= alpha * q;
    // Refresh the residual against drift every few steps.
    if ((it + 1) % 10 == 0) r = b - g.forward(x);
    s = g.backward(r);
    const double gamma_next = s.squaredNorm();
    if (std::sqrt(gamma_next) <= target) return x;
    d = s + (gamma_next / gamma) * d;
    gamma = gamma_next;
  }
  const VectorXd check = g.backward(b - g.forward(x));
  if (check.norm() <= target) return x;
  throw ConvergenceError("least_squares_on_span: CG did not converge in " +
                             std::to_string(max_iter) + " iterations",
                         0, max_iter);
}

// Richardson iteration a <- a + w G^T (b - G a) with w = 1 / lambda_max(G^T G)
// estimated by power iteration.
VectorXd solve_richardson(const AtomImageMap& g, const VectorXd& b, std::size_t k,
                          const LeastSquaresOptions& options) {
  const std::size_t max_iter = options.max_iter > 0 ? options.max_iter : 200000;
  VectorXd x = VectorXd::Zero(static_cast<Eigen::Index>(k));
  const VectorXd rhs = g.backward(b);
  const double target = options.tolerance * rhs.norm();
  if (rhs.norm() == 0.0) return x;

  VectorXd z = rhs.normalized();
  double lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    const VectorXd next = g.backward(g.forward(z));
    lambda = next.norm();
    if (lambda == 0.0) return x;
    z = next / lambda;
  }
  const double step = 1.0 / (1.05 * lambda);

  for (std::size_t it = 0; it < max_iter; ++it) {
    const VectorXd s = g.backward(b - g.forward(x));
    if (s.norm() <= target) return x;
    x += step * s;
  }
  throw ConvergenceError("least_squares_on_span: Richardson did not converge in " +
                             std::to_string(max_iter) + " iterations",
                         0, max_iter);
}

}  // namespace

FactoredMatrix least_squares_on_span(const MeasurementOperator& op, std::span<const double> b,
                                     const AtomSet& atoms, const LeastSquaresOptions& options) {
  if (b.size() != op.measurements()) throw DimensionError("least_squares_on_span: |b| != p");
  if (atoms.rows() != op.rows() || atoms.cols() != op.cols()) {
    throw DimensionError("least_squares_on_span: atom dimensions");
  }
  if (atoms.empty()) return FactoredMatrix(op.rows(), op.cols());

  const VectorXd rhs = Eigen::Map<const VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  LeastSquaresMethod method = options.method;
  if (method == LeastSquaresMethod::automatic) {
    const double values = static_cast<double>(op.measurements()) * static_cast<double>(atoms.size());
    method = values <= options.qr_value_limit ? LeastSquaresMethod::qr : LeastSquaresMethod::cg;
  }

  const AtomImageMap g{op, atoms};
  VectorXd coeffs;
  switch (method) {
    case LeastSquaresMethod::qr:
      coeffs = solve_qr(op, rhs, atoms, options);
      break;
    case LeastSquaresMethod::cg:
      coeffs = solve_cg(g, rhs, atoms.size(), options);
      break;
    case LeastSquaresMethod::richardson:
      coeffs = solve_richardson(g, rhs, atoms.size(), options);
      break;
    case LeastSquaresMethod::automatic:
      break;
  }
  return FactoredMatrix::from_coefficients(
      atoms, std::span<const double>(coeffs.data(), static_cast<std::size_t>(coeffs.size())));
}

}  // namespace admira
