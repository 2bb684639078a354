#pragma once

// Reference computations used only by the tests. They evaluate characters
// with std::polar and integrate by explicit loops so that they share no code
// with the library's roots table, Gram builders or solvers.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "trigapprox/common.hpp"
#include "trigapprox/measures.hpp"

namespace ref {

using trigapprox::CMatrix;
using trigapprox::cplx;
using trigapprox::CVector;

inline constexpr double kPi = std::numbers::pi;

inline double theta(std::int64_t j, std::int64_t n) { return 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n); }

/// (1/N) sum_j f(theta_j).
inline cplx mean(std::int64_t n, const std::function<cplx(double)>& f) {
  cplx acc = 0.0;
  for (std::int64_t j = 0; j < n; ++j) acc += f(theta(j, n));
  return acc / static_cast<double>(n);
}

/// Midpoint-free fine Riemann sum of a smooth periodic integrand.
inline double circle_mean(const std::function<double(double)>& f, int n = 1 << 16) {
  double acc = 0.0;
  for (int j = 0; j < n; ++j) acc += f(theta(j, n));
  return acc / n;
}

inline CMatrix random_psd(std::mt19937_64& rng, int q, int rank) {
  std::normal_distribution<double> n01(0.0, 1.0);
  CMatrix b(q, rank);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < rank; ++j) b(i, j) = cplx(n01(rng), n01(rng));
  return b * b.adjoint();
}

inline std::vector<double> random_positive(std::mt19937_64& rng, std::size_t n, double lo = 0.2, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> w(n);
  for (auto& v : w) v = u(rng);
  return w;
}

/// Exhaustive weighted least squares on Z_n: min over c of
/// sum_j w_j / n |chi_s(j) - sum_x c_x chi_x(j)|^2, normal equations solved by LU.
inline double cyclic_l2_distance(const std::vector<double>& w, const std::vector<std::int64_t>& complement, std::int64_t s) {
  const auto n = static_cast<std::int64_t>(w.size());
  const auto m = static_cast<Eigen::Index>(complement.size());
  auto chi = [n](std::int64_t x, std::int64_t j) { return std::polar(1.0, theta(x * j % n, n)); };
  CMatrix g = CMatrix::Zero(m, m);
  CVector b = CVector::Zero(m);
  double norm2 = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    const double mass = w[static_cast<std::size_t>(j)] / static_cast<double>(n);
    norm2 += mass;
    for (Eigen::Index a = 0; a < m; ++a) {
      b(a) += mass * std::conj(chi(complement[a], j)) * chi(s, j);
      for (Eigen::Index c = 0; c < m; ++c) g(a, c) += mass * std::conj(chi(complement[a], j)) * chi(complement[c], j);
    }
  }
  if (m == 0) return std::sqrt(norm2);
  const CVector c = g.fullPivLu().solve(b);
  return std::sqrt(std::max(0.0, norm2 - b.dot(c).real()));
}

}  // namespace ref
