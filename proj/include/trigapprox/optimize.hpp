#pragma once

// Shared numerical core for the primal and dual programs. Both are instances
// of
//
//     minimize  sum_j mass_j |h(gamma_j)|^p   over   h = sum_{x in basis} c_x chi_x
//     subject to  affine equality constraints on c,
//
// solved exactly (through the Gram matrix) for p = 2 and by damped
// iteratively reweighted least squares with an exact line search otherwise.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "trigapprox/common.hpp"
#include "trigapprox/groups.hpp"
#include "trigapprox/laspace.hpp"
#include "trigapprox/measures.hpp"

namespace trigapprox {

/// Equality constraints on a coefficient vector: fixed coordinates plus
/// general rows * c = rhs.
struct AffineConstraints {
  std::vector<std::pair<Eigen::Index, cplx>> pinned;
  CMatrix rows;
  CVector rhs;
};

/// The feasible set written as c = base + basis * y.
class AffineSet {
 public:
  AffineSet(Eigen::Index n, const AffineConstraints& con, double tol = 1e-9) : n_(n) {
    std::vector<bool> is_pinned(static_cast<std::size_t>(n), false);
    base_ = CVector::Zero(n);
    for (const auto& [i, v] : con.pinned) {
      require(i >= 0 && i < n, "pinned coordinate out of range");
      is_pinned[static_cast<std::size_t>(i)] = true;
      base_(i) = v;
    }
    for (Eigen::Index i = 0; i < n; ++i)
      if (!is_pinned[static_cast<std::size_t>(i)]) free_.push_back(i);

    if (con.rows.rows() == 0) {
      selection_ = true;
      return;
    }
    require(con.rows.cols() == n && con.rhs.size() == con.rows.rows(), "constraint rows have wrong shape");
    const auto nf = static_cast<Eigen::Index>(free_.size());
    CMatrix a(con.rows.rows(), nf);
    for (Eigen::Index k = 0; k < nf; ++k) a.col(k) = con.rows.col(free_[static_cast<std::size_t>(k)]);
    const CVector r = con.rhs - con.rows * base_;
    const double rscale = std::max(1.0, r.cwiseAbs().maxCoeff());
    if (nf == 0) {
      residual_ = r.cwiseAbs().maxCoeff() / rscale;
      feasible_ = residual_ <= tol;
      basis_ = CMatrix::Zero(n, 0);
      return;
    }
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV | Eigen::ComputeThinU);
    const RVector& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-10 * smax) ++rank;
    CVector y0 = CVector::Zero(nf);
    if (rank > 0) {
      const CMatrix& u = svd.matrixU();
      const CMatrix& v = svd.matrixV();
      const CVector coef = (u.leftCols(rank).adjoint() * r).cwiseQuotient(sv.head(rank).cast<cplx>());
      y0 = v.leftCols(rank) * coef;
    }
    residual_ = (a * y0 - r).cwiseAbs().maxCoeff() / rscale;
    feasible_ = residual_ <= tol;
    for (Eigen::Index k = 0; k < nf; ++k) base_(free_[static_cast<std::size_t>(k)]) = y0(k);
    const CMatrix null = svd.matrixV().rightCols(nf - rank);
    basis_ = CMatrix::Zero(n, nf - rank);
    for (Eigen::Index k = 0; k < nf; ++k) basis_.row(free_[static_cast<std::size_t>(k)]) = null.row(k);
  }

  bool feasible() const { return feasible_; }
  double residual() const { return residual_; }
  const CVector& base() const { return base_; }
  Eigen::Index dimension() const { return selection_ ? static_cast<Eigen::Index>(free_.size()) : basis_.cols(); }

  CVector expand(const CVector& y) const {
    CVector c = base_;
    if (selection_) {
      for (std::size_t k = 0; k < free_.size(); ++k) c(free_[k]) += y(static_cast<Eigen::Index>(k));
    } else {
      c += basis_ * y;
    }
    return c;
  }

  /// argmin over the affine set of c^* Q c for Hermitian PSD Q.
  CVector minimize_quadratic(const CMatrix& q, double rank_tol = kDefaultRankTol) const {
    require(q.rows() == n_ && q.cols() == n_, "quadratic form has wrong size");
    if (dimension() == 0) return base_;
    CMatrix h;
    CVector g;
    if (selection_) {
      const auto nf = static_cast<Eigen::Index>(free_.size());
      h.resize(nf, nf);
      g.resize(nf);
      const CVector qb = q * base_;
      for (Eigen::Index a = 0; a < nf; ++a) {
        g(a) = qb(free_[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < nf; ++b) h(a, b) = q(free_[static_cast<std::size_t>(a)], free_[static_cast<std::size_t>(b)]);
      }
    } else {
      h = basis_.adjoint() * q * basis_;
      g = basis_.adjoint() * (q * base_);
    }
    const CVector y = hermitian_pinv_solve(h, -g, rank_tol);
    return expand(y);
  }

 private:
  Eigen::Index n_;
  CVector base_;
  CMatrix basis_;
  std::vector<Eigen::Index> free_;
  bool selection_ = false;
  bool feasible_ = true;
  double residual_ = 0.0;
};

/// Grid samples of sum_x c_x chi_x (scalar).
inline CVector synthesize(const GroupSpec& g, const std::vector<Frequency>& basis, const CVector& c) {
  const auto nn = static_cast<Eigen::Index>(g.num_nodes());
  CVector out = CVector::Zero(nn);
  const auto& roots = g.roots();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const cplx ck = c(static_cast<Eigen::Index>(k));
    if (ck == cplx(0.0)) continue;
    for (Eigen::Index j = 0; j < nn; ++j) out(j) += ck * roots[g.phase_index(basis[k], static_cast<std::size_t>(j))];
  }
  return out;
}

/// Grid samples of sum_x chi_x c_x for C^q-valued coefficients stored
/// frequency-major in `c`.
inline GridFunction synthesize_vector(const GroupSpec& g, const std::vector<Frequency>& basis, const CVector& c, int q) {
  GridFunction out(g.num_nodes(), CVector::Zero(q));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const CVector u = c.segment(static_cast<Eigen::Index>(k) * q, q);
    if (u.isZero(0.0)) continue;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += g.character(basis[k], j) * u;
  }
  return out;
}

struct LpProblem {
  GroupSpec group;
  std::vector<Frequency> basis;
  /// Nonnegative node masses; the objective is sum_j masses_j |h_j|^p.
  RVector masses;
  double p = 2.0;
  AffineConstraints constraints;
};

struct LpOptions {
  /// Stop once an accepted step lowers the objective by less than this fraction.
  double tol = 1e-9;
  int max_iter = 500;
  /// |h| is floored at this value inside |h|^{p-2} reweighting factors.
  double weight_floor = 1e-12;
  double rank_tol = kDefaultRankTol;
};

struct LpResult {
  CVector coefficients;
  double objective = 0.0;
  int iterations = 0;
  double last_relative_decrease = 0.0;
  bool converged = true;
  bool feasible = true;
  double constraint_residual = 0.0;
  std::string diagnostic;

  double value(double p) const { return std::pow(std::max(objective, 0.0), 1.0 / p); }
};

namespace detail {

inline double lp_objective(const CVector& h, const RVector& masses, double p) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < h.size(); ++j)
    if (masses(j) != 0.0) acc += masses(j) * std::pow(std::abs(h(j)), p);
  return acc;
}

/// d/dtau of sum m_j |h_j + tau d_j|^p, divided by p.
inline double lp_slope(const CVector& h, const CVector& d, const RVector& masses, double p, double tau) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < h.size(); ++j) {
    if (masses(j) == 0.0) continue;
    const cplx u = h(j) + tau * d(j);
    const double a = std::abs(u);
    if (a == 0.0) continue;
    acc += masses(j) * std::pow(a, p - 2.0) * (std::conj(u) * d(j)).real();
  }
  return acc;
}

/// Minimizer of the convex function tau -> sum m_j |h_j + tau d_j|^p on tau >= 0.
inline double exact_line_search(const CVector& h, const CVector& d, const RVector& masses, double p) {
  if (lp_slope(h, d, masses, p, 0.0) >= 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < 80 && lp_slope(h, d, masses, p, hi) < 0.0; ++k) {
    lo = hi;
    hi *= 2.0;
  }
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (lp_slope(h, d, masses, p, mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline LpResult solve_lp(const LpProblem& prob, const LpOptions& opts = {}) {
  require(prob.p > 1.0 && std::isfinite(prob.p), "solve_lp: exponent must lie in (1, inf)");
  require(prob.masses.size() == static_cast<Eigen::Index>(prob.group.num_nodes()), "solve_lp: masses size mismatch");
  const auto n = static_cast<Eigen::Index>(prob.basis.size());
  const AffineSet feasible_set(n, prob.constraints);
  LpResult res;
  res.feasible = feasible_set.feasible();
  res.constraint_residual = feasible_set.residual();
  if (!res.feasible) {
    res.coefficients = feasible_set.base();
    res.converged = false;
    res.diagnostic = "constraints infeasible (residual " + std::to_string(res.constraint_residual) + ")";
    return res;
  }

  const auto& g = prob.group;
  CVector c = feasible_set.minimize_quadratic(scalar_gram(prob.basis, prob.masses, g), opts.rank_tol);
  CVector h = synthesize(g, prob.basis, c);
  double obj = detail::lp_objective(h, prob.masses, prob.p);

  if (prob.p != 2.0) {
    res.converged = false;
    double worst_ratio = 1.0;
    for (int it = 1; it <= opts.max_iter; ++it) {
      res.iterations = it;
      RVector w(prob.masses.size());
      double wmax = 0.0, wmin = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < w.size(); ++j) {
        w(j) = prob.masses(j) == 0.0 ? 0.0 : prob.masses(j) * std::pow(std::max(std::abs(h(j)), opts.weight_floor), prob.p - 2.0);
        if (w(j) > 0.0) {
          wmax = std::max(wmax, w(j));
          wmin = std::min(wmin, w(j));
        }
      }
      if (wmax > 0.0) worst_ratio = std::max(worst_ratio, wmax / wmin);
      const CVector target = feasible_set.minimize_quadratic(scalar_gram(prob.basis, w, g), opts.rank_tol);
      const CVector step = target - c;
      const CVector dh = synthesize(g, prob.basis, step);
      const double tau = detail::exact_line_search(h, dh, prob.masses, prob.p);
      const CVector h_new = h + tau * dh;
      const double obj_new = detail::lp_objective(h_new, prob.masses, prob.p);
      if (!(obj_new < obj)) {
        res.converged = true;
        res.last_relative_decrease = 0.0;
        break;
      }
      res.last_relative_decrease = (obj - obj_new) / obj;
      c += tau * step;
      h = h_new;
      obj = obj_new;
      if (res.last_relative_decrease < opts.tol) {
        res.converged = true;
        break;
      }
    }
    if (worst_ratio > 1e14)
      res.diagnostic = "reweighting factors spread over " + std::to_string(worst_ratio) + " (near-singular weights)";
    if (!res.converged && res.diagnostic.empty()) res.diagnostic = "max_iter reached";
  }
  res.coefficients = std::move(c);
  res.objective = obj;
  return res;
}

}  // namespace trigapprox
