#pragma once

// The norm of L^alpha(M), Fourier coefficients of grid functions and of
// measures, and the Gram matrices of L^2(M) over character bases.

#include <cmath>
#include <map>
#include <vector>

#include "trigapprox/common.hpp"
#include "trigapprox/groups.hpp"
#include "trigapprox/measures.hpp"
#include "trigapprox/trig_polynomial.hpp"

namespace trigapprox {

/// alpha in (1, inf) with its conjugate alpha' = alpha / (alpha - 1) and
/// beta = 1 / (alpha - 1), the exponent of the dual weight (w^+)^beta.
struct Exponents {
  double alpha = 2.0;
  double conjugate = 2.0;
  double beta = 1.0;

  static Exponents from_alpha(double alpha) {
    if (!(alpha > 1.0) || !std::isfinite(alpha))
      throw InvalidInput("alpha must lie in (1, inf), got " + std::to_string(alpha));
    return Exponents{alpha, alpha / (alpha - 1.0), 1.0 / (alpha - 1.0)};
  }

  bool is_two() const { return alpha == 2.0; }
};

/// ||f||_{L^alpha(M)}: [ int ||W^{1/alpha} f||^alpha d(lambda)
///                       + sum_j ||m_j^{1/alpha} f(gamma_j)||^alpha ]^{1/alpha}.
inline double lalpha_norm(const GridFunction& f, const SpectralMeasure& m, const Exponents& e,
                          double rel_tol = kDefaultRankTol) {
  const auto& g = m.group();
  require(f.size() == g.num_nodes(), "lalpha_norm: grid function has wrong size");
  const double a = e.alpha;
  double acc = 0.0;
  if (m.dimension() == 1) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      require(f[j].size() == 1, "lalpha_norm: dimension mismatch");
      acc += m.ac().at(j)(0, 0).real() * std::pow(std::abs(f[j](0)), a);
    }
    acc *= g.node_weight();
    for (const auto& at : m.singular().atoms()) acc += at.mass(0, 0).real() * std::pow(std::abs(f[at.node](0)), a);
    return std::pow(acc, 1.0 / a);
  }
  double ac = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    require(f[j].size() == m.dimension(), "lalpha_norm: dimension mismatch");
    ac += std::pow((psd_power(m.ac().at(j), 1.0 / a, rel_tol) * f[j]).norm(), a);
  }
  acc = ac * g.node_weight();
  for (const auto& at : m.singular().atoms())
    acc += std::pow((psd_power(at.mass, 1.0 / a, rel_tol) * f[at.node]).norm(), a);
  return std::pow(acc, 1.0 / a);
}

inline double lalpha_norm(const TrigPolynomial& t, const SpectralMeasure& m, const Exponents& e,
                          double rel_tol = kDefaultRankTol) {
  require(t.dimension() == m.dimension(), "lalpha_norm: dimension mismatch");
  return lalpha_norm(t.samples(m.group()), m, e, rel_tol);
}

/// Weighted L^p norm of scalar grid samples against node masses:
/// (sum_j mass_j |f_j|^p)^{1/p}.
inline double weighted_lp(const CVector& f, const RVector& masses, double p) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < f.size(); ++j)
    if (masses(j) != 0.0) acc += masses(j) * std::pow(std::abs(f(j)), p);
  return std::pow(acc, 1.0 / p);
}

/// (f^*)^(x) = int <gamma, x> f(gamma)^* d(lambda), returned as a column of
/// conjugated entries of length q.
inline CVector fourier_coefficient(const GridFunction& f, Frequency x, const GroupSpec& g) {
  g.check_band(x);
  require(f.size() == g.num_nodes() && !f.empty(), "fourier_coefficient: grid function has wrong size");
  CVector acc = CVector::Zero(f.front().size());
  for (std::size_t j = 0; j < f.size(); ++j) acc += g.character(x, j) * f[j].conjugate();
  return acc * g.node_weight();
}

/// Exact for polynomials: (h^*)^(x) = conj(coefficient of h at x).
inline CVector fourier_coefficient(const TrigPolynomial& h, Frequency x, const GroupSpec& g) {
  g.validate(x);
  const Frequency r = g.reduce(x);
  CVector acc = CVector::Zero(h.dimension());
  for (const auto& [y, u] : h.terms())
    if (g.reduce(y) == r) acc += u.conjugate();
  return acc;
}

/// int <gamma, z> dM(gamma) for grid masses (q x q).
inline CMatrix moment(const std::vector<CMatrix>& masses, Frequency z, const GroupSpec& g) {
  g.check_band(z);
  CMatrix acc = CMatrix::Zero(masses.front().rows(), masses.front().cols());
  for (std::size_t j = 0; j < masses.size(); ++j) acc += g.character(z, j) * masses[j];
  return acc;
}

inline cplx scalar_moment(const RVector& masses, Frequency z, const GroupSpec& g) {
  g.check_band(z);
  const auto& roots = g.roots();
  cplx acc = 0.0;
  for (Eigen::Index j = 0; j < masses.size(); ++j) {
    const double mj = masses(j);
    if (mj != 0.0) acc += mj * roots[g.phase_index(z, static_cast<std::size_t>(j))];
  }
  return acc;
}

/// Gram matrix of the basis {chi_x e_i} (frequency-major ordering) for the
/// quadratic form sum_j v(gamma_j)^* masses_j u(gamma_j):
/// entry((x,i),(y,j)) = [int <gamma, y - x> dmasses]_{ij}.
inline CMatrix block_gram(const std::vector<Frequency>& freqs, const std::vector<CMatrix>& masses,
                          const GroupSpec& g) {
  const auto q = masses.front().rows();
  const auto n = static_cast<Eigen::Index>(freqs.size());
  std::map<Frequency, CMatrix> cache;
  auto get = [&](Frequency z) -> const CMatrix& {
    z = g.reduce(z);
    auto it = cache.find(z);
    if (it == cache.end()) it = cache.emplace(z, moment(masses, z, g)).first;
    return it->second;
  };
  CMatrix out(n * q, n * q);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a; b < n; ++b) {
      const CMatrix& blk = get(freqs[static_cast<std::size_t>(b)] - freqs[static_cast<std::size_t>(a)]);
      out.block(a * q, b * q, q, q) = blk;
      if (b != a) out.block(b * q, a * q, q, q) = blk.adjoint();
    }
  return out;
}

/// Scalar specialization of block_gram: a Toeplitz-structured Hermitian matrix.
inline CMatrix scalar_gram(const std::vector<Frequency>& freqs, const RVector& masses, const GroupSpec& g) {
  const auto n = static_cast<Eigen::Index>(freqs.size());
  std::map<Frequency, cplx> cache;
  auto get = [&](Frequency z) {
    z = g.reduce(z);
    auto it = cache.find(z);
    if (it == cache.end()) it = cache.emplace(z, scalar_moment(masses, z, g)).first;
    return it->second;
  };
  CMatrix out(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b) {
      const cplx v = get(freqs[static_cast<std::size_t>(b)] - freqs[static_cast<std::size_t>(a)]);
      out(a, b) = v;
      out(b, a) = std::conj(v);
    }
    out(a, a) = out(a, a).real();
  }
  return out;
}

/// Gram matrix of {chi_x e_i : x in freqs, i = 1..q} in L^2(M).
inline CMatrix gram_matrix(const std::vector<Frequency>& freqs, const SpectralMeasure& m) {
  for (const auto& x : freqs) m.group().validate(x);
  if (m.dimension() == 1) return scalar_gram(freqs, m.scalar_grid_masses(), m.group());
  return block_gram(freqs, m.grid_masses(), m.group());
}

}  // namespace trigapprox
