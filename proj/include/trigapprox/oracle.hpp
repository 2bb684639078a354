#pragma once

// Brute-force distance on a finite cyclic group: minimizes over the full
// coefficient space of T(G \ S), computing characters and matrix roots from
// scratch rather than through the window and Gram machinery.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trigapprox/acsets.hpp"
#include "trigapprox/common.hpp"
#include "trigapprox/laspace.hpp"
#include "trigapprox/measures.hpp"

namespace trigapprox {

inline constexpr std::int64_t kOracleMaxOrder = 64;

struct OracleResult {
  double distance = 0.0;
  int iterations = 0;
  /// Frequencies of G \ S and their coefficients (frequency-major, q entries each).
  std::vector<std::int64_t> basis;
  CVector coefficients;
};

namespace detail {

inline cplx oracle_character(std::int64_t x, std::int64_t j, std::int64_t n) {
  const double t = 2.0 * std::numbers::pi * static_cast<double>((x * j) % n) / static_cast<double>(n);
  return {std::cos(t), std::sin(t)};
}

inline CMatrix oracle_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

struct RealLp {
  // Residual r_j = b_j - sum_x c_x A(j, x); real coordinates z = (Re c, Im c).
  CMatrix a;
  CVector b;
  RVector mass;
  double p;

  CVector residual(const RVector& z) const {
    const auto n = a.cols();
    const CVector c = z.head(n).cast<cplx>() + cplx(0, 1) * z.tail(n).cast<cplx>();
    return b - a * c;
  }
  double value(const RVector& z) const {
    const CVector r = residual(z);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < r.size(); ++j) acc += mass(j) * std::pow(std::abs(r(j)), p);
    return acc;
  }
};

}  // namespace detail

/// Exact distance from chi_s e_k to T(G \ S) in L^alpha(M) on Z_n, n <= 64.
inline OracleResult oracle_distance(const SpectralMeasure& m, const FrequencySet& S, Frequency s, int k,
                                    const Exponents& e) {
  const auto& g = m.group();
  if (g.kind() != GroupKind::Cyclic) throw InvalidInput("oracle: only cyclic groups are supported");
  const std::int64_t n = g.grid_size();
  if (n > kOracleMaxOrder)
    throw InvalidInput("oracle: group order " + std::to_string(n) + " exceeds the cap of " +
                       std::to_string(kOracleMaxOrder));
  const int q = m.dimension();
  if (q > 1 && !e.is_two()) throw Unsupported("matrix-valued weights require alpha = 2");
  if (k < 1 || k > q) throw InvalidInput("oracle: component index out of range");
  const std::int64_t sr = ((s.m % n) + n) % n;
  if (!contains(S, Frequency{sr, 0}, g)) throw InvalidInput("invalid scenario: s is not in S");

  OracleResult out;
  for (std::int64_t x = 0; x < n; ++x)
    if (!contains(S, Frequency{x, 0}, g)) out.basis.push_back(x);
  const auto nb = static_cast<Eigen::Index>(out.basis.size());

  // Node masses M({gamma_j}) = W_j / n + atom_j.
  std::vector<CMatrix> mass(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) mass[j] = m.ac().at(static_cast<std::size_t>(j)) / static_cast<double>(n);
  for (const auto& at : m.singular().atoms()) mass[at.node] += at.mass;

  if (e.is_two()) {
    CMatrix a = CMatrix::Zero(n * q, nb * q);
    CVector b = CVector::Zero(n * q);
    for (std::int64_t j = 0; j < n; ++j) {
      const CMatrix r = detail::oracle_sqrt(mass[j]);
      b.segment(j * q, q) = detail::oracle_character(sr, j, n) * r.col(k - 1);
      for (Eigen::Index x = 0; x < nb; ++x)
        a.block(j * q, x * q, q, q) = detail::oracle_character(out.basis[x], j, n) * r;
    }
    out.coefficients = nb > 0 ? CVector(a.completeOrthogonalDecomposition().solve(b)) : CVector();
    out.distance = nb > 0 ? (b - a * out.coefficients).norm() : b.norm();
    return out;
  }

  detail::RealLp f;
  f.p = e.alpha;
  f.a = CMatrix(n, nb);
  f.b = CVector(n);
  f.mass = RVector(n);
  for (std::int64_t j = 0; j < n; ++j) {
    f.mass(j) = mass[j](0, 0).real();
    f.b(j) = detail::oracle_character(sr, j, n);
    for (Eigen::Index x = 0; x < nb; ++x) f.a(j, x) = detail::oracle_character(out.basis[x], j, n);
  }
  RVector z = RVector::Zero(2 * nb);
  double val = f.value(z);
  for (int it = 1; it <= 1000 && nb > 0; ++it) {
    out.iterations = it;
    // Gradient and Hessian of sum_j mass_j |r_j|^p in real coordinates.
    const CVector r = f.residual(z);
    RVector grad = RVector::Zero(2 * nb);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(2 * nb, 2 * nb);
    for (Eigen::Index j = 0; j < r.size(); ++j) {
      if (f.mass(j) == 0.0) continue;
      const double mod = std::max(std::abs(r(j)), 1e-12);
      const Eigen::Vector2d u(r(j).real() / mod, r(j).imag() / mod);
      const double scale = f.mass(j) * f.p * std::pow(mod, f.p - 2.0);
      // d(Re r, Im r)/dz: r = b - a c, c = z_re + i z_im.
      Eigen::MatrixXd jac(2, 2 * nb);
      for (Eigen::Index x = 0; x < nb; ++x) {
        const cplx ax = f.a(j, x);
        jac(0, x) = -ax.real();
        jac(1, x) = -ax.imag();
        jac(0, nb + x) = ax.imag();
        jac(1, nb + x) = -ax.real();
      }
      const Eigen::Vector2d rv(r(j).real(), r(j).imag());
      grad += scale * jac.transpose() * rv;
      const Eigen::Matrix2d hl = scale * (Eigen::Matrix2d::Identity() + (f.p - 2.0) * u * u.transpose());
      hess += jac.transpose() * hl * jac;
    }
    if (grad.norm() < 1e-15) break;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess + 1e-14 * hess.diagonal().maxCoeff() * Eigen::MatrixXd::Identity(2 * nb, 2 * nb));
    RVector step = -ldlt.solve(grad);
    if (!step.allFinite() || step.dot(grad) >= 0.0) step = -grad;
    double t = 1.0;
    double next = f.value(z + step);
    while (next > val + 1e-4 * t * step.dot(grad) && t > 1e-20) {
      t *= 0.5;
      next = f.value(z + t * step);
    }
    if (!(next < val)) break;
    z += t * step;
    const double rel = (val - next) / std::max(val, 1e-300);
    val = next;
    if (rel < 1e-15) break;
  }
  out.coefficients = z.head(nb).cast<cplx>() + cplx(0, 1) * z.tail(nb).cast<cplx>();
  out.distance = std::pow(val, 1.0 / f.p);
  return out;
}

}  // namespace trigapprox
