#include "isaccoop/sdp.hpp"

#include <cmath>

namespace isaccoop {

namespace {

/// Hermitian basis element: a diagonal entry, or the real/imaginary part of
/// one off-diagonal pair.  Stored sparsely as up to two (row, col, value)
/// triplets.
struct BasisElement {
  int a = 0, b = 0;
  cdouble val_ab;  // entry (a,b); (b,a) carries the conjugate when a != b
};

std::vector<BasisElement> hermitian_basis(int n) {
  std::vector<BasisElement> basis;
  basis.reserve(static_cast<size_t>(n) * static_cast<size_t>(n));
  for (int p = 0; p < n; ++p) basis.push_back({p, p, cdouble(1.0, 0.0)});
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      basis.push_back({p, q, cdouble(1.0, 0.0)});
      basis.push_back({p, q, cdouble(0.0, 1.0)});
    }
  }
  return basis;
}

/// Re tr(M * E) for a Hermitian M and basis element E.
double inner(const Eigen::MatrixXcd& m, const BasisElement& e) {
  if (e.a == e.b) return std::real(m(e.b, e.a) * e.val_ab);
  return 2.0 * std::real(m(e.b, e.a) * e.val_ab);
}

/// Re tr(K E_i K E_j) where K is Hermitian and E_i, E_j basis elements.
double curvature(const Eigen::MatrixXcd& k, const BasisElement& ei, const BasisElement& ej) {
  // tr(K e_a e_b^T K e_c e_d^T) = K(b,c) * K(d,a); each basis element expands
  // into its (a,b) triplet plus the conjugate (b,a) one when off-diagonal.
  auto term = [&](int a, int b, cdouble va, int c, int d, cdouble vb) {
    return std::real(va * vb * k(b, c) * k(d, a));
  };
  double sum = term(ei.a, ei.b, ei.val_ab, ej.a, ej.b, ej.val_ab);
  if (ej.a != ej.b) sum += term(ei.a, ei.b, ei.val_ab, ej.b, ej.a, std::conj(ej.val_ab));
  if (ei.a != ei.b) {
    sum += term(ei.b, ei.a, std::conj(ei.val_ab), ej.a, ej.b, ej.val_ab);
    if (ej.a != ej.b) {
      sum += term(ei.b, ei.a, std::conj(ei.val_ab), ej.b, ej.a, std::conj(ej.val_ab));
    }
  }
  return sum;
}

void add_to_matrix(Eigen::MatrixXcd& m, const BasisElement& e, double scale) {
  m(e.a, e.b) += scale * e.val_ab;
  if (e.a != e.b) m(e.b, e.a) += scale * std::conj(e.val_ab);
}

double real_trace_product(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return std::real((a.array() * b.transpose().array()).sum());
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options) {
  const int n = static_cast<int>(problem.objective.rows());
  if (n < 1 || problem.objective.cols() != n) throw SolverFailure("bad SDP objective");
  const size_t n_lo = problem.lower_mats.size();
  const size_t n_up = problem.upper_mats.size();
  if (problem.lower_bounds.size() != n_lo || problem.upper_bounds.size() != n_up) {
    throw SolverFailure("constraint matrix/bound count mismatch");
  }

  // Strictly feasible start on the identity ray.
  double zeta_min = 1e-9;
  for (size_t k = 0; k < n_lo; ++k) {
    const double tr = std::real(problem.lower_mats[k].trace());
    if (tr <= 0.0) {
      if (problem.lower_bounds[k] > 0.0) throw Infeasible("lower constraint with nonpositive trace");
      continue;
    }
    zeta_min = std::max(zeta_min, 1.25 * std::max(problem.lower_bounds[k], 0.0) / tr + 1e-9);
  }
  double zeta_max = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < n_up; ++j) {
    const double tr = std::real(problem.upper_mats[j].trace());
    if (tr <= 0.0) continue;
    zeta_max = std::min(zeta_max, 0.8 * problem.upper_bounds[j] / tr);
  }
  if (!(zeta_min < zeta_max)) {
    throw Infeasible("no strictly feasible starting point on the identity ray");
  }
  Eigen::MatrixXcd x = zeta_min * Eigen::MatrixXcd::Identity(n, n);

  const auto basis = hermitian_basis(n);
  const int dim = static_cast<int>(basis.size());

  auto slacks_ok = [&](const Eigen::MatrixXcd& xx, std::vector<double>& lo,
                       std::vector<double>& up) {
    lo.resize(n_lo);
    up.resize(n_up);
    for (size_t k = 0; k < n_lo; ++k) {
      lo[k] = real_trace_product(problem.lower_mats[k], xx) - problem.lower_bounds[k];
      if (lo[k] <= 0.0) return false;
    }
    for (size_t j = 0; j < n_up; ++j) {
      up[j] = problem.upper_bounds[j] - real_trace_product(problem.upper_mats[j], xx);
      if (up[j] <= 0.0) return false;
    }
    return true;
  };

  const double barrier_count = static_cast<double>(n) + static_cast<double>(n_lo + n_up);
  double t = options.t_initial;
  int newton_steps = 0;

  std::vector<double> lo, up;
  if (!slacks_ok(x, lo, up)) throw SolverFailure("starting point not strictly feasible");

  Eigen::MatrixXd hessian(dim, dim);
  Eigen::VectorXd grad(dim);

  while (true) {
    // Centering for the current t.
    for (int inner_it = 0; inner_it < 60; ++inner_it) {
      if (++newton_steps > options.max_newton_steps) {
        throw MaxIterations("SDP barrier exceeded the Newton step budget");
      }
      Eigen::LLT<Eigen::MatrixXcd> llt(x);
      if (llt.info() != Eigen::Success) throw SolverFailure("iterate left the PSD cone");
      const Eigen::MatrixXcd xinv =
          llt.solve(Eigen::MatrixXcd::Identity(n, n));

      // Gradient matrix: t*C - X^-1 - sum A_k/s_k + sum B_j/u_j.
      Eigen::MatrixXcd gmat = t * problem.objective - xinv;
      for (size_t k = 0; k < n_lo; ++k) gmat -= problem.lower_mats[k] / lo[k];
      for (size_t j = 0; j < n_up; ++j) gmat += problem.upper_mats[j] / up[j];

      for (int i = 0; i < dim; ++i) grad(i) = inner(gmat, basis[i]);

      for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
          double h = curvature(xinv, basis[i], basis[j]);
          for (size_t k = 0; k < n_lo; ++k) {
            h += inner(problem.lower_mats[k], basis[i]) *
                 inner(problem.lower_mats[k], basis[j]) / (lo[k] * lo[k]);
          }
          for (size_t jj = 0; jj < n_up; ++jj) {
            h += inner(problem.upper_mats[jj], basis[i]) *
                 inner(problem.upper_mats[jj], basis[j]) / (up[jj] * up[jj]);
          }
          hessian(i, j) = h;
          hessian(j, i) = h;
        }
      }

      Eigen::LDLT<Eigen::MatrixXd> hl(hessian);
      Eigen::VectorXd step = -hl.solve(grad);
      const double decrement = -grad.dot(step);
      if (!(decrement > 0.0)) break;  // stationary (or numerical floor)

      Eigen::MatrixXcd dx = Eigen::MatrixXcd::Zero(n, n);
      for (int i = 0; i < dim; ++i) add_to_matrix(dx, basis[i], step(i));

      // Backtrack into the feasible region.
      double alpha = 1.0;
      std::vector<double> lo2, up2;
      for (int bt = 0; bt < 60; ++bt) {
        Eigen::MatrixXcd cand = x + alpha * dx;
        Eigen::LLT<Eigen::MatrixXcd> check(cand);
        if (check.info() == Eigen::Success && slacks_ok(cand, lo2, up2)) {
          x = std::move(cand);
          lo = lo2;
          up = up2;
          break;
        }
        alpha *= 0.5;
      }
      if (decrement / 2.0 < 1e-12) break;  // centered
    }

    const double obj = real_trace_product(problem.objective, x);
    const double gap = barrier_count / t;
    if (gap <= options.gap_tolerance * std::max(1.0, std::abs(obj))) {
      SdpSolution sol;
      sol.x = x;
      sol.objective = obj;
      sol.gap = gap;
      sol.newton_steps = newton_steps;
      return sol;
    }
    t *= options.t_multiplier;
  }
}

}  // namespace isaccoop
