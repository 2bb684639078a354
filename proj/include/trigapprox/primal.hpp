#pragma once

// Upper bounds on d = inf { ||chi_s e_k - t|| : t in T(G \ S) } obtained by
// restricting t to frequencies of G \ S inside a window |x| <= F.

#include <cmath>
#include <string>
#include <vector>

#include "trigapprox/acsets.hpp"
#include "trigapprox/common.hpp"
#include "trigapprox/laspace.hpp"
#include "trigapprox/measures.hpp"
#include "trigapprox/optimize.hpp"
#include "trigapprox/trig_polynomial.hpp"

namespace trigapprox {

struct PrimalResult {
  /// ||chi_s e_k - minimizer|| in L^alpha(M).
  double bound = 0.0;
  TrigPolynomial minimizer;
  std::int64_t window = 0;
  int iterations = 0;
  double last_relative_step = 0.0;
  bool converged = true;
  std::string method;
  std::string diagnostic;
};

namespace detail {

inline Frequency checked_target(const SpectralMeasure& m, const FrequencySet& S, Frequency s, int k) {
  const auto& g = m.group();
  g.validate(s);
  if (!contains(S, s, g)) throw InvalidInput("invalid scenario: s = " + to_string(s, g.dimension()) + " is not in S");
  if (k < 1 || k > m.dimension())
    throw InvalidInput("component index k = " + std::to_string(k) + " outside 1.." + std::to_string(m.dimension()));
  return g.reduce(s);
}

}  // namespace detail

/// alpha = 2: exact orthogonal projection onto span{chi_x e_i : x in (G\S) cap window}.
inline PrimalResult primal_l2(const SpectralMeasure& m, const FrequencySet& S, Frequency s, int k, std::int64_t F,
                              double rank_tol = kDefaultRankTol) {
  const auto& g = m.group();
  s = detail::checked_target(m, S, s, k);
  const int q = m.dimension();
  const auto basis = window(S.complement(), g, F);
  const auto masses = m.grid_masses();
  const double norm2 = moment(masses, Frequency{}, g)(k - 1, k - 1).real();

  PrimalResult out;
  out.window = F;
  out.method = "gram-projection";
  out.minimizer = TrigPolynomial(q);
  if (basis.empty()) {
    out.bound = std::sqrt(std::max(norm2, 0.0));
    return out;
  }

  const CMatrix gram = gram_matrix(basis, m);
  const auto nb = static_cast<Eigen::Index>(basis.size());
  const RVector smass = q == 1 ? m.scalar_grid_masses() : RVector();
  CVector b(nb * q);
  for (Eigen::Index a = 0; a < nb; ++a) {
    const Frequency x = basis[static_cast<std::size_t>(a)];
    const CMatrix mom = q == 1 ? CMatrix::Constant(1, 1, scalar_moment(smass, g.reduce(s - x), g))
                               : moment(masses, g.reduce(s - x), g);
    b.segment(a * q, q) = mom.col(k - 1);
  }
  const CVector coef = hermitian_pinv_solve(gram, b, rank_tol);
  double d2 = norm2 - 2.0 * coef.dot(b).real() + coef.dot(gram * coef).real();
  if (d2 < 0.0) {
    if (d2 < -1e-9) throw NumericalError("primal_l2: negative squared distance " + std::to_string(d2));
    d2 = 0.0;
  }
  out.bound = std::sqrt(d2);
  for (Eigen::Index a = 0; a < nb; ++a) out.minimizer.add(basis[static_cast<std::size_t>(a)], CVector(coef.segment(a * q, q)));
  return out;
}

/// Scalar weights, any alpha in (1, inf): direct minimization of
/// sum_j mass_j |chi_s - t|^alpha over the window coefficients.
inline PrimalResult primal_lalpha(const SpectralMeasure& m, const FrequencySet& S, Frequency s, const Exponents& e,
                                  std::int64_t F, const LpOptions& opts = {}) {
  if (m.dimension() > 1) {
    if (e.is_two()) return primal_l2(m, S, s, 1, F, opts.rank_tol);
    throw Unsupported("matrix-valued weights (q = " + std::to_string(m.dimension()) + ") require alpha = 2");
  }
  const auto& g = m.group();
  s = detail::checked_target(m, S, s, 1);

  LpProblem prob{g, {s}, m.scalar_grid_masses(), e.alpha, {}};
  for (const auto& x : window(S.complement(), g, F)) prob.basis.push_back(x);
  prob.constraints.pinned.emplace_back(0, 1.0);
  const LpResult r = solve_lp(prob, opts);

  PrimalResult out;
  out.window = F;
  out.method = e.is_two() ? "weighted-least-squares" : "irls";
  out.bound = r.value(e.alpha);
  out.iterations = r.iterations;
  out.last_relative_step = r.last_relative_decrease;
  out.converged = r.converged;
  out.diagnostic = r.diagnostic;
  out.minimizer = TrigPolynomial(1);
  for (std::size_t i = 1; i < prob.basis.size(); ++i)
    out.minimizer.add(prob.basis[i], -r.coefficients(static_cast<Eigen::Index>(i)));
  return out;
}

/// Dispatches on alpha and the weight dimension.
inline PrimalResult primal_bound(const SpectralMeasure& m, const FrequencySet& S, Frequency s, int k,
                                 const Exponents& e, std::int64_t F, const LpOptions& opts = {}) {
  if (e.is_two()) return primal_l2(m, S, s, k, F, opts.rank_tol);
  return primal_lalpha(m, S, s, e, F, opts);
}

}  // namespace trigapprox
