#pragma once

// Certified lower bounds on d. A certificate is a trigonometric polynomial h
// supported in S with (h^*)^(s) pinned to 1 (entry k in the matrix case) and
// with h(gamma) in ran W(gamma) at every node. Because h has finite support,
// (h^*)^(x) = 0 holds exactly for every x outside S, not just inside a
// window, and 1 / F(h) is a true lower bound on d where
//
//   scalar, any alpha:  F(h) = [ int |h|^{alpha'} (w^+)^beta d(lambda) ]^{1/alpha'}
//   matrix, alpha = 2:  F(h) = [ int h^* W^+ h d(lambda) ]^{1/2}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "trigapprox/acsets.hpp"
#include "trigapprox/common.hpp"
#include "trigapprox/laspace.hpp"
#include "trigapprox/measures.hpp"
#include "trigapprox/optimize.hpp"
#include "trigapprox/primal.hpp"
#include "trigapprox/trig_polynomial.hpp"

namespace trigapprox {

inline constexpr double kCoefficientFeasibilityTol = 1e-10;
inline constexpr double kCarrierFeasibilityTol = 1e-9;

struct DualCertificate {
  TrigPolynomial h;
  /// F(h); +inf for an empty certificate.
  double objective = std::numeric_limits<double>::infinity();
  /// 1 / F(h) on the working grid.
  double bound = 0.0;
  /// |bound on grid N - bound on grid 2N| when the weight has a closed form.
  double quadrature_error = 0.0;
  /// max(0, bound - quadrature_error): the published lower bound.
  double lower_bound = 0.0;
  double pinned_residual = 0.0;
  double vanishing_residual = 0.0;
  double carrier_residual = 0.0;
  std::int64_t window = 0;
  int iterations = 0;
  bool empty = true;
  std::string note;
};

struct DualOptions {
  LpOptions lp{};
  double rank_tol = kDefaultRankTol;
  bool estimate_quadrature_error = true;
};

struct Feasibility {
  double pinned = 0.0;
  double vanishing = 0.0;
  double carrier = 0.0;

  bool ok() const {
    return pinned <= kCoefficientFeasibilityTol && vanishing <= kCoefficientFeasibilityTol &&
           carrier <= kCarrierFeasibilityTol;
  }
  std::string describe() const {
    return "pinned " + std::to_string(pinned) + ", vanishing " + std::to_string(vanishing) + ", carrier " +
           std::to_string(carrier);
  }
};

/// (w_eff^+)^beta at every node, w_eff the density of the discretized measure.
inline RVector dual_density(const SpectralMeasure& m, const Exponents& e, double rank_tol = kDefaultRankTol) {
  const RVector w = m.scalar_effective_density();
  const double top = w.size() ? w.maxCoeff() : 0.0;
  RVector v(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) v(j) = w(j) > rank_tol * top ? std::pow(w(j), -e.beta) : 0.0;
  return v;
}

/// W_eff^+ at every node.
inline std::vector<CMatrix> dual_density_matrix(const SpectralMeasure& m, double rank_tol = kDefaultRankTol) {
  std::vector<CMatrix> out;
  for (const auto& w : m.effective_density()) out.push_back(moore_penrose(w, rank_tol));
  return out;
}

/// Residuals of the constraints defining D_s (scalar) or D~_{s,k} (matrix).
inline Feasibility certificate_feasibility(const TrigPolynomial& h, const SpectralMeasure& m, const FrequencySet& S,
                                           Frequency s, int k, double rank_tol = kDefaultRankTol) {
  const auto& g = m.group();
  Feasibility f;
  f.pinned = std::abs(fourier_coefficient(h, s, g)(k - 1) - 1.0);
  for (const auto& [x, u] : h.terms())
    if (!contains(S, x, g)) f.vanishing = std::max(f.vanishing, u.cwiseAbs().maxCoeff());
  const auto dens = m.effective_density();
  const auto hv = h.samples(g);
  double scale = 1.0;
  for (const auto& v : hv) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  for (std::size_t j = 0; j < hv.size(); ++j) {
    const CMatrix p = range_projection(dens[j], rank_tol);
    const CVector off = hv[j] - p * hv[j];
    f.carrier = std::max(f.carrier, off.cwiseAbs().maxCoeff() / scale);
  }
  return f;
}

namespace detail {

inline double scalar_dual_objective(const TrigPolynomial& h, const SpectralMeasure& m, const Exponents& e,
                                    double rank_tol) {
  const RVector v = dual_density(m, e, rank_tol) * m.group().node_weight();
  return weighted_lp(h.scalar_samples(m.group()), v, e.conjugate);
}

inline double matrix_dual_objective(const TrigPolynomial& h, const SpectralMeasure& m, double rank_tol) {
  const auto vinv = dual_density_matrix(m, rank_tol);
  const auto hv = h.samples(m.group());
  double acc = 0.0;
  for (std::size_t j = 0; j < hv.size(); ++j) acc += hv[j].dot(vinv[j] * hv[j]).real();
  return std::sqrt(std::max(acc * m.group().node_weight(), 0.0));
}

inline double objective_for(const TrigPolynomial& h, const SpectralMeasure& m, const Exponents& e, double rank_tol) {
  return m.dimension() == 1 ? scalar_dual_objective(h, m, e, rank_tol) : matrix_dual_objective(h, m, rank_tol);
}

/// Fills objective, bound, quadrature error and lower bound of a feasible certificate.
inline void evaluate_certificate(DualCertificate& c, const SpectralMeasure& m, const Exponents& e,
                                 const DualOptions& opts) {
  c.objective = objective_for(c.h, m, e, opts.rank_tol);
  if (!(c.objective > 0.0)) throw NumericalError("dual certificate has zero objective");
  c.bound = std::isfinite(c.objective) ? 1.0 / c.objective : 0.0;
  c.quadrature_error = 0.0;
  if (opts.estimate_quadrature_error && !m.group().is_compact_group()) {
    if (auto fine = m.resampled(m.group().refined())) {
      const double f2 = objective_for(c.h, *fine, e, opts.rank_tol);
      const double b2 = std::isfinite(f2) && f2 > 0.0 ? 1.0 / f2 : 0.0;
      c.quadrature_error = std::abs(c.bound - b2);
    }
  }
  c.lower_bound = std::max(0.0, c.bound - c.quadrature_error);
  c.empty = false;
}

inline DualCertificate empty_certificate(std::int64_t H, int q, std::string note) {
  DualCertificate c;
  c.window = H;
  c.h = TrigPolynomial(q);
  c.note = std::move(note);
  return c;
}

/// Rows (I - P_j) [chi_y(gamma_j) I_q]_y for every node where W_eff is rank deficient.
inline CMatrix carrier_rows(const SpectralMeasure& m, const std::vector<Frequency>& basis, double rank_tol) {
  const auto& g = m.group();
  const int q = m.dimension();
  const auto n = static_cast<Eigen::Index>(basis.size()) * q;
  std::vector<CMatrix> blocks;
  Eigen::Index rows = 0;
  const auto dens = m.effective_density();
  for (std::size_t j = 0; j < dens.size(); ++j) {
    const CMatrix off = CMatrix::Identity(q, q) - range_projection(dens[j], rank_tol);
    if (off.cwiseAbs().maxCoeff() < 1e-12) continue;
    CMatrix blk(q, n);
    for (std::size_t y = 0; y < basis.size(); ++y)
      blk.middleCols(static_cast<Eigen::Index>(y) * q, q) = g.character(basis[y], j) * off;
    rows += q;
    blocks.push_back(std::move(blk));
  }
  CMatrix out(rows, n);
  Eigen::Index r = 0;
  for (const auto& b : blocks) {
    out.middleRows(r, q) = b;
    r += q;
  }
  return out;
}

}  // namespace detail

/// Objective F(h) and lower bound 1/F(h) of a scalar certificate; rejects
/// certificates that violate the constraints of D_s.
struct DualValue {
  double objective = 0.0;
  double bound = 0.0;
};

inline DualValue dual_value_scalar(const TrigPolynomial& h, const SpectralMeasure& m, const FrequencySet& S,
                                   Frequency s, const Exponents& e, double rank_tol = kDefaultRankTol) {
  require(m.dimension() == 1 && h.dimension() == 1, "dual_value_scalar: scalar weight and certificate required");
  const auto f = certificate_feasibility(h, m, S, s, 1, rank_tol);
  if (!f.ok()) throw InvalidInput("infeasible dual certificate (" + f.describe() + ")");
  DualValue out;
  out.objective = detail::scalar_dual_objective(h, m, e, rank_tol);
  out.bound = std::isfinite(out.objective) && out.objective > 0.0 ? 1.0 / out.objective : 0.0;
  return out;
}

/// Best certificate supported in S cap {|x| <= H} for a scalar weight.
inline DualCertificate dual_maximize_scalar(const SpectralMeasure& m, const FrequencySet& S, Frequency s,
                                            const Exponents& e, std::int64_t H, const DualOptions& opts = {}) {
  require(m.dimension() == 1, "dual_maximize_scalar: weight must be scalar");
  const auto& g = m.group();
  s = detail::checked_target(m, S, s, 1);
  const auto basis = window(S, g, H);
  const auto it = std::find(basis.begin(), basis.end(), s);
  if (it == basis.end()) return detail::empty_certificate(H, 1, "s lies outside the dual window");

  LpProblem prob{g, basis, dual_density(m, e, opts.rank_tol) * g.node_weight(), e.conjugate, {}};
  prob.constraints.pinned.emplace_back(static_cast<Eigen::Index>(it - basis.begin()), 1.0);
  prob.constraints.rows = detail::carrier_rows(m, basis, opts.rank_tol);
  prob.constraints.rhs = CVector::Zero(prob.constraints.rows.rows());
  const LpResult r = solve_lp(prob, opts.lp);
  if (!r.feasible) return detail::empty_certificate(H, 1, "D_s restricted to the window is empty: " + r.diagnostic);

  DualCertificate c;
  c.window = H;
  c.iterations = r.iterations;
  c.h = TrigPolynomial(1);
  for (std::size_t i = 0; i < basis.size(); ++i) c.h.add(basis[i], r.coefficients(static_cast<Eigen::Index>(i)));
  const auto f = certificate_feasibility(c.h, m, S, s, 1, opts.rank_tol);
  c.pinned_residual = f.pinned;
  c.vanishing_residual = f.vanishing;
  c.carrier_residual = f.carrier;
  if (!f.ok()) {
    auto rejected = detail::empty_certificate(H, 1, "certificate rejected (" + f.describe() + ")");
    rejected.pinned_residual = f.pinned;
    rejected.vanishing_residual = f.vanishing;
    rejected.carrier_residual = f.carrier;
    return rejected;
  }
  detail::evaluate_certificate(c, m, e, opts);
  if (!r.diagnostic.empty()) c.note = r.diagnostic;
  return c;
}

/// alpha = 2, C^q-valued certificates: minimizes int h^* W^+ h over h
/// supported in S cap {|x| <= H} with entry k of (h^*)^(s) equal to one.
inline DualCertificate dual_maximize_matrix(const SpectralMeasure& m, const FrequencySet& S, Frequency s, int k,
                                            std::int64_t H, const DualOptions& opts = {}) {
  const auto& g = m.group();
  s = detail::checked_target(m, S, s, k);
  const int q = m.dimension();
  const auto basis = window(S, g, H);
  const auto it = std::find(basis.begin(), basis.end(), s);
  if (it == basis.end()) return detail::empty_certificate(H, q, "s lies outside the dual window");

  const auto n = static_cast<Eigen::Index>(basis.size()) * q;
  AffineConstraints con;
  con.pinned.emplace_back(static_cast<Eigen::Index>(it - basis.begin()) * q + (k - 1), 1.0);
  con.rows = detail::carrier_rows(m, basis, opts.rank_tol);
  con.rhs = CVector::Zero(con.rows.rows());
  const AffineSet feasible_set(n, con);
  if (!feasible_set.feasible())
    return detail::empty_certificate(H, q, "D~_{s,k} restricted to the window is empty");

  std::vector<CMatrix> masses = dual_density_matrix(m, opts.rank_tol);
  for (auto& v : masses) v *= g.node_weight();
  const CMatrix quad = block_gram(basis, masses, g);
  const CVector coef = feasible_set.minimize_quadratic(quad, opts.rank_tol);

  DualCertificate c;
  c.window = H;
  c.h = TrigPolynomial(q);
  for (std::size_t i = 0; i < basis.size(); ++i)
    c.h.add(basis[i], CVector(coef.segment(static_cast<Eigen::Index>(i) * q, q)));
  const auto f = certificate_feasibility(c.h, m, S, s, k, opts.rank_tol);
  c.pinned_residual = f.pinned;
  c.vanishing_residual = f.vanishing;
  c.carrier_residual = f.carrier;
  if (!f.ok()) {
    auto rejected = detail::empty_certificate(H, q, "certificate rejected (" + f.describe() + ")");
    rejected.pinned_residual = f.pinned;
    rejected.vanishing_residual = f.vanishing;
    rejected.carrier_residual = f.carrier;
    return rejected;
  }
  detail::evaluate_certificate(c, m, Exponents::from_alpha(2.0), opts);
  return c;
}

/// Dispatches on alpha and the weight dimension.
inline DualCertificate dual_maximize(const SpectralMeasure& m, const FrequencySet& S, Frequency s, int k,
                                     const Exponents& e, std::int64_t H, const DualOptions& opts = {}) {
  if (m.dimension() == 1 && !e.is_two()) return dual_maximize_scalar(m, S, s, e, H, opts);
  if (m.dimension() > 1 && !e.is_two())
    throw Unsupported("matrix-valued weights (q = " + std::to_string(m.dimension()) + ") require alpha = 2");
  if (m.dimension() == 1) return dual_maximize_scalar(m, S, s, e, H, opts);
  return dual_maximize_matrix(m, S, s, k, H, opts);
}

struct DensityReport {
  /// A nonzero element of D with finite objective exists, so T(G\S) is not dense.
  bool witness_found = false;
  std::optional<Frequency> s;
  int k = 1;
  DualCertificate certificate;
  std::string verdict;
};

/// Searches S cap {|x| <= H_max} for a certificate with positive bound. A hit
/// proves T(G\S) is not dense in L^alpha; a miss is inconclusive.
inline DensityReport density_check(const SpectralMeasure& m, const FrequencySet& S, const Exponents& e,
                                   std::int64_t H_max, const DualOptions& opts = {}) {
  if (m.dimension() > 1 && !e.is_two())
    throw Unsupported("matrix-valued weights (q = " + std::to_string(m.dimension()) + ") require alpha = 2");
  const auto& g = m.group();
  auto candidates = window(S, g, H_max);
  auto centered = [&](Frequency x) {
    if (g.kind() != GroupKind::Cyclic) return std::abs(x.m) + std::abs(x.n);
    const auto n = g.grid_size();
    return std::abs(2 * x.m > n ? x.m - n : x.m);
  };
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](Frequency a, Frequency b) { return centered(a) < centered(b); });
  DensityReport rep;
  for (const auto& s : candidates) {
    for (int k = 1; k <= m.dimension(); ++k) {
      auto cert = dual_maximize(m, S, s, k, e, H_max, opts);
      if (!cert.empty && cert.lower_bound > 1e-10) {
        rep.witness_found = true;
        rep.s = s;
        rep.k = k;
        rep.certificate = std::move(cert);
        rep.verdict = "not dense: certificate at s = " + to_string(s, g.dimension()) + ", k = " + std::to_string(k);
        return rep;
      }
    }
  }
  rep.verdict = "inconclusive: no certificate with positive bound up to window " + std::to_string(H_max);
  return rep;
}

struct GapReport {
  double upper = 0.0;
  double lower = 0.0;
  double absolute_gap = 0.0;
  double relative_gap = 0.0;
};

/// Throws SandwichViolation if the certified lower bound exceeds the upper bound.
inline GapReport gap_report(const PrimalResult& p, const DualCertificate& c, double slack = 1e-9) {
  GapReport r;
  r.upper = p.bound;
  r.lower = c.lower_bound;
  if (r.lower > r.upper + slack)
    throw SandwichViolation("dual lower bound " + std::to_string(r.lower) + " exceeds primal upper bound " +
                            std::to_string(r.upper));
  r.absolute_gap = r.upper - r.lower;
  r.relative_gap = r.upper > 0.0 ? r.absolute_gap / r.upper : 0.0;
  return r;
}

}  // namespace trigapprox
