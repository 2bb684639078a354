#pragma once

// Built-in reference suite. Each criterion is deterministic (fixed seeds) and
// runs in a few seconds at most.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "trigapprox/acsets.hpp"
#include "trigapprox/dual.hpp"
#include "trigapprox/laspace.hpp"
#include "trigapprox/oracle.hpp"
#include "trigapprox/primal.hpp"

namespace trigapprox::acceptance {

struct Criterion {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

inline SpectralMeasure ar1_measure(std::int64_t n, std::vector<Atom> atoms = {}) {
  const auto g = GroupSpec::integers(n);
  return SpectralMeasure(MatrixWeight::from_family(g, families::trig_modulus(std::vector<cplx>{1.0, -0.5})),
                         AtomicMeasure(std::move(atoms)));
}

inline double ar1_density(double t) { return std::norm(cplx(1.0, 0.0) - 0.5 * std::polar(1.0, t)); }

inline CMatrix random_psd(std::mt19937_64& rng, int q, int rank) {
  std::normal_distribution<double> n01(0.0, 1.0);
  CMatrix b(q, rank);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < rank; ++j) b(i, j) = cplx(n01(rng), n01(rng));
  return b * b.adjoint();
}

inline TrigPolynomial random_poly(std::mt19937_64& rng, int q, std::int64_t radius) {
  std::normal_distribution<double> n01(0.0, 1.0);
  TrigPolynomial t(q);
  for (std::int64_t x = -radius; x <= radius; ++x) {
    CVector u(q);
    for (int i = 0; i < q; ++i) u(i) = cplx(n01(rng), n01(rng));
    t.add(Frequency{x}, u);
  }
  return t;
}

}  // namespace detail

/// w = 1 on the circle, S = {0}: d = 1 for every alpha.
inline Criterion identity() {
  Criterion c{1, "identity scenarios", true, ""};
  const auto g = GroupSpec::integers(1024);
  const SpectralMeasure m(MatrixWeight::from_family(g, families::constant(1.0)));
  const auto S = FrequencySet::explicit_set({0});
  double worst = 0.0;
  for (double a : {1.5, 2.0, 3.0}) {
    const auto e = Exponents::from_alpha(a);
    const auto p = primal_bound(m, S, Frequency{0}, 1, e, 8);
    const auto d = dual_maximize(m, S, Frequency{0}, 1, e, 8);
    const auto gap = gap_report(p, d);
    worst = std::max({worst, std::abs(p.bound - 1.0), std::abs(d.lower_bound - 1.0), gap.absolute_gap});
  }
  c.passed = worst <= 1e-9;
  c.detail = "max |d - 1|, gap = " + detail::fmt("%.2e", worst);
  return c;
}

/// Singleton S = {0}, alpha = 2: d = (int 1/w)^{-1/2} = sqrt(0.75).
inline Criterion kolmogorov() {
  Criterion c{2, "singleton, alpha = 2", true, ""};
  const auto m = detail::ar1_measure(4096);
  const auto S = FrequencySet::explicit_set({0});
  const auto e = Exponents::from_alpha(2.0);
  const double expect = std::sqrt(0.75);
  const auto p = primal_bound(m, S, Frequency{0}, 1, e, 64);
  const auto d = dual_maximize(m, S, Frequency{0}, 1, e, 0);
  const double err = std::max(std::abs(p.bound - expect), std::abs(d.lower_bound - expect));
  const bool inside = d.lower_bound - 1e-6 <= expect && expect <= p.bound + 1e-6;
  c.passed = inside && err <= 1e-6;
  c.detail = "upper " + detail::fmt("%.10f", p.bound) + ", lower(H=0) " + detail::fmt("%.10f", d.lower_bound) +
             ", err " + detail::fmt("%.2e", err);
  return c;
}

/// Singleton S = {0}, alpha = 3 against [int w^{-beta}]^{-1/alpha'} from a fine quadrature.
inline Criterion general_alpha_singleton() {
  Criterion c{3, "singleton, alpha = 3", true, ""};
  const auto e = Exponents::from_alpha(3.0);
  const int fine = 1 << 16;
  double integral = 0.0;
  for (int j = 0; j < fine; ++j)
    integral += std::pow(detail::ar1_density(2.0 * std::numbers::pi * j / fine), -e.beta);
  const double expect = std::pow(integral / fine, -1.0 / e.conjugate);

  const auto m = detail::ar1_measure(4096);
  const auto S = FrequencySet::explicit_set({0});
  const auto p = primal_bound(m, S, Frequency{0}, 1, e, 64);
  const auto d = dual_maximize(m, S, Frequency{0}, 1, e, 0);
  const double err = std::max(std::abs(p.bound - expect), std::abs(d.lower_bound - expect));
  const bool inside = d.lower_bound - 1e-5 <= expect && expect <= p.bound + 1e-5;
  c.passed = inside && err <= 1e-5;
  c.detail = "reference " + detail::fmt("%.10f", expect) + ", sandwich [" + detail::fmt("%.10f", d.lower_bound) +
             ", " + detail::fmt("%.10f", p.bound) + "]";
  return c;
}

/// Half-line S = {..., -1, 0}: d^2 = exp(int log w) = 1.
inline Criterion szego() {
  Criterion c{4, "half-line infimum", true, ""};
  const auto m = detail::ar1_measure(4096);
  const auto S = FrequencySet::half_line(FrequencySet::Direction::Le, 0);
  const auto e = Exponents::from_alpha(2.0);
  const auto p = primal_bound(m, S, Frequency{0}, 1, e, 128);
  const auto d = dual_maximize(m, S, Frequency{0}, 1, e, 128);
  const auto gap = gap_report(p, d);
  c.passed = d.lower_bound <= 1.0 + 1e-9 && 1.0 <= p.bound + 1e-9 && gap.relative_gap <= 1e-3;
  c.detail = "sandwich [" + detail::fmt("%.10f", d.lower_bound) + ", " + detail::fmt("%.10f", p.bound) +
             "], relative width " + detail::fmt("%.2e", gap.relative_gap);
  return c;
}

/// Half-line scenario plus an atom: the singular part does not change d.
inline Criterion singular_invariance() {
  Criterion c{5, "singular-part invariance", true, ""};
  CMatrix mass = CMatrix::Constant(1, 1, 0.7);
  const auto full = detail::ar1_measure(4096, {Atom{0, mass}});
  const auto S = FrequencySet::half_line(FrequencySet::Direction::Le, 0);
  const auto red = reduce_measure(full, S, full.group());
  const bool dropped = red.report.decision == ReductionReport::Decision::Reduced && red.report.atoms_dropped == 1;

  std::vector<double> disc;
  for (std::int64_t F : {16, 32, 64, 128, 256}) {
    const double a = primal_l2(full, S, Frequency{0}, 1, F).bound;
    const double b = primal_l2(red.measure, S, Frequency{0}, 1, F).bound;
    disc.push_back(std::abs(a - b));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < disc.size(); ++i) monotone = monotone && disc[i] < disc[i - 1];
  c.passed = dropped && monotone && disc.back() <= 5e-3;
  c.detail = std::string(dropped ? "atom dropped" : "atom NOT dropped") + ", discrepancy F=16.." +
             detail::fmt("%.4f", disc.front()) + " -> F=256 " + detail::fmt("%.4f", disc.back()) +
             (monotone ? ", monotone" : ", NOT monotone");
  return c;
}

/// Random Z_8 scenarios: primal, dual and brute force agree.
inline Criterion finite_group_duality() {
  Criterion c{6, "finite-group strong duality", true, ""};
  std::mt19937_64 rng(20240606);
  std::uniform_real_distribution<double> uw(0.2, 2.0);
  const auto g = GroupSpec::cyclic(8);
  double err2 = 0.0, errp = 0.0;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> w(8);
    for (auto& v : w) v = uw(rng);
    const SpectralMeasure m(MatrixWeight::from_scalar_samples(g, w));
    const auto s = static_cast<std::int64_t>(rng() % 8);
    std::vector<Frequency> elems{Frequency{s}};
    for (std::int64_t x = 0; x < 8; ++x)
      if (x != s && rng() % 2) elems.push_back(Frequency{x});
    const auto S = FrequencySet::explicit_set(elems);
    for (double a : {2.0, 1.5, 3.0}) {
      const auto e = Exponents::from_alpha(a);
      const double p = primal_bound(m, S, Frequency{s}, 1, e, 8).bound;
      const double d = dual_maximize(m, S, Frequency{s}, 1, e, 8).lower_bound;
      const double o = oracle_distance(m, S, Frequency{s}, 1, e).distance;
      const double dev = std::max({std::abs(p - d), std::abs(p - o), std::abs(d - o)});
      (a == 2.0 ? err2 : errp) = std::max(a == 2.0 ? err2 : errp, dev);
    }
  }
  c.passed = err2 <= 1e-8 && errp <= 1e-5;
  c.detail = "max deviation alpha=2 " + detail::fmt("%.2e", err2) + ", alpha in {1.5, 3} " + detail::fmt("%.2e", errp);
  return c;
}

/// q = 2 on Z_6 with one rank-one node.
inline Criterion matrix_case() {
  Criterion c{7, "matrix weights", true, ""};
  std::mt19937_64 rng(5150);
  const auto g = GroupSpec::cyclic(6);
  std::vector<CMatrix> deficient, full_rank;
  for (int j = 0; j < 6; ++j) {
    deficient.push_back(detail::random_psd(rng, 2, j == 2 ? 1 : 2));
    full_rank.push_back(detail::random_psd(rng, 2, 2));
  }
  const SpectralMeasure md(MatrixWeight::from_samples(g, deficient));
  const SpectralMeasure mf(MatrixWeight::from_samples(g, full_rank));
  const auto e = Exponents::from_alpha(2.0);

  double dev = 0.0;
  for (const auto& S : {FrequencySet::explicit_set({0}), FrequencySet::explicit_set({0, 2}),
                        FrequencySet::explicit_set({0, 1, 3}), FrequencySet::explicit_set({0, 1, 2, 4, 5})}) {
    for (int k = 1; k <= 2; ++k) {
      const double p = primal_bound(md, S, Frequency{0}, k, e, 6).bound;
      const double d = dual_maximize(md, S, Frequency{0}, k, e, 6).lower_bound;
      const double o = oracle_distance(md, S, Frequency{0}, k, e).distance;
      dev = std::max({dev, std::abs(p - d), std::abs(p - o), std::abs(d - o)});
    }
  }

  // Closed form for S = {0}: [e_k^* (mean W^+)^+ e_k]^{1/2}. With a rank
  // deficient node the constant certificate is confined to the common
  // range, so the unrestricted formula applies to the full-rank weight.
  const auto S0 = FrequencySet::explicit_set({0});
  double closed = 0.0;
  for (int k = 1; k <= 2; ++k) {
    CMatrix a = CMatrix::Zero(2, 2);
    for (const auto& w : full_rank) a += moore_penrose(w) / 6.0;
    const double formula = std::sqrt(moore_penrose(a)(k - 1, k - 1).real());
    closed = std::max(closed, std::abs(formula - primal_bound(mf, S0, Frequency{0}, k, e, 6).bound));

    // Rank-deficient weight: minimize v^* A v over v in the intersection of ranges with v_k = 1.
    CMatrix ad = CMatrix::Zero(2, 2), proj = CMatrix::Identity(2, 2);
    for (const auto& w : deficient) {
      ad += moore_penrose(w) / 6.0;
      proj = range_projection(w) * proj;
    }
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(proj * proj.adjoint());
    const CVector v = es.eigenvectors().col(1);
    const double restricted = std::sqrt(std::norm(v(k - 1)) / v.dot(ad * v).real());
    closed = std::max(closed, std::abs(restricted - oracle_distance(md, S0, Frequency{0}, k, e).distance));
  }
  c.passed = dev <= 1e-8 && closed <= 1e-8;
  c.detail = "primal/dual/oracle deviation " + detail::fmt("%.2e", dev) + ", closed form deviation " +
             detail::fmt("%.2e", closed);
  return c;
}

/// Weak duality, window monotonicity, Penrose identities, isometry, Hoelder.
inline Criterion invariants() {
  Criterion c{8, "invariant suites", true, ""};
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<std::string> failures;

  // Weak duality and monotonicity on random circle and Z_n scenarios.
  int pairs = 0;
  double worst_weak = -1.0, worst_mono = 0.0;
  for (int t = 0; t < 24; ++t) {
    const bool cyclic = t % 3 == 2;
    const auto g = cyclic ? GroupSpec::cyclic(12) : GroupSpec::integers(256);
    const SpectralMeasure m = [&] {
      if (cyclic) {
        std::vector<double> w(12);
        for (auto& v : w) v = 0.2 + 2.0 * u01(rng);
        return SpectralMeasure(MatrixWeight::from_scalar_samples(g, w));
      }
      std::vector<cplx> coef{1.0, cplx(0.6 * u01(rng) - 0.3, 0.6 * u01(rng) - 0.3), 0.4 * u01(rng) - 0.2};
      return SpectralMeasure(MatrixWeight::from_family(g, families::trig_modulus(coef)));
    }();
    const double alpha = std::array{1.5, 2.0, 3.0}[t % 3];
    const auto e = Exponents::from_alpha(alpha);
    const auto S = t % 2 ? FrequencySet::half_line(FrequencySet::Direction::Le, 0) : FrequencySet::explicit_set({0, 2, -1});
    LpOptions lp;
    lp.tol = 1e-13;
    DualOptions dopt;
    dopt.lp = lp;
    std::vector<double> up, lo, qe;
    for (std::int64_t w : {1, 2, 4, 8}) {
      up.push_back(primal_bound(m, S, Frequency{0}, 1, e, w, lp).bound);
      const auto d = dual_maximize(m, S, Frequency{0}, 1, e, w, dopt);
      lo.push_back(d.bound);
      qe.push_back(d.quadrature_error);
    }
    for (std::size_t i = 0; i < up.size(); ++i) {
      for (std::size_t j = 0; j < lo.size(); ++j) {
        worst_weak = std::max(worst_weak, lo[j] - up[i] - qe[j]);
        ++pairs;
      }
      if (i > 0) worst_mono = std::max({worst_mono, up[i] - up[i - 1], lo[i - 1] - lo[i]});
    }
  }
  if (worst_weak > 1e-9) failures.push_back("weak duality " + detail::fmt("%.2e", worst_weak));
  if (worst_mono > 1e-10) failures.push_back("monotonicity " + detail::fmt("%.2e", worst_mono));

  // Penrose identities.
  double penrose = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int q = 1 + static_cast<int>(rng() % 4);
    const int r = 1 + static_cast<int>(rng() % q);
    const CMatrix a = detail::random_psd(rng, q, r) * std::pow(10.0, 4.0 * u01(rng) - 2.0);
    const CMatrix p = moore_penrose(a);
    const double s = std::max(1.0, a.norm()) * std::max(1.0, p.norm());
    penrose = std::max({penrose, (a * p * a - a).norm() / s, (p * a * p - p).norm() / s,
                        (a * p - (a * p).adjoint()).norm() / s, (p * a - (p * a).adjoint()).norm() / s});
  }
  if (penrose > 1e-10) failures.push_back("Penrose " + detail::fmt("%.2e", penrose));

  // Isometry g -> g w between L^{alpha'}(w) and L^{alpha'}((w^+)^beta), and Hoelder.
  double iso = 0.0, holder = 0.0;
  const auto g = GroupSpec::integers(256);
  for (int t = 0; t < 100; ++t) {
    const auto e = Exponents::from_alpha(std::array{1.5, 2.0, 3.0, 4.0}[t % 4]);
    std::vector<double> w(g.num_nodes());
    for (auto& v : w) v = 0.1 + 3.0 * u01(rng);
    const SpectralMeasure m(MatrixWeight::from_scalar_samples(g, w));
    const auto gp = detail::random_poly(rng, 1, 5);
    auto gw = gp.samples(g);
    std::vector<double> dual_w(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
      gw[j] *= w[j];
      dual_w[j] = std::pow(w[j], -e.beta);
    }
    const SpectralMeasure md(MatrixWeight::from_scalar_samples(g, dual_w));
    const auto ep = Exponents::from_alpha(e.conjugate);
    const double lhs = lalpha_norm(gw, md, ep), rhs = lalpha_norm(gp, m, ep);
    iso = std::max(iso, std::abs(lhs - rhs) / std::max(1.0, rhs));

    const auto f = detail::random_poly(rng, 1, 4);
    const auto h = detail::random_poly(rng, 1, 4);
    const CVector fs = f.scalar_samples(g), hs = h.scalar_samples(g);
    const double pairing = std::abs(hs.dot(fs)) * g.node_weight();
    const double bound = lalpha_norm(f, m, e) * trigapprox::detail::scalar_dual_objective(h, m, e, kDefaultRankTol);
    holder = std::max(holder, pairing - bound);
  }
  // Matrix alpha = 2 analogue with h(gamma) in ran W(gamma).
  const auto g6 = GroupSpec::cyclic(16);
  for (int t = 0; t < 20; ++t) {
    std::vector<CMatrix> ws;
    for (int j = 0; j < 16; ++j) ws.push_back(detail::random_psd(rng, 2, 1 + static_cast<int>(rng() % 2)));
    const SpectralMeasure m(MatrixWeight::from_samples(g6, ws));
    const auto f = detail::random_poly(rng, 2, 3).samples(g6);
    auto h = detail::random_poly(rng, 2, 3).samples(g6);
    double pairing_re = 0.0, hw = 0.0;
    cplx pairing = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
      h[j] = ws[j] * h[j];
      pairing += h[j].dot(f[j]);
      hw += h[j].dot(moore_penrose(ws[j]) * h[j]).real();
    }
    pairing_re = std::abs(pairing) / 16.0;
    holder = std::max(holder, pairing_re - lalpha_norm(f, m, Exponents::from_alpha(2.0)) * std::sqrt(hw / 16.0));
  }
  if (iso > 1e-9) failures.push_back("isometry " + detail::fmt("%.2e", iso));
  if (holder > 1e-9) failures.push_back("Hoelder " + detail::fmt("%.2e", holder));

  c.passed = failures.empty();
  c.detail = std::to_string(pairs) + " weak-duality pairs, Penrose " + detail::fmt("%.1e", penrose) + ", isometry " +
             detail::fmt("%.1e", iso) + ", Hoelder excess " + detail::fmt("%.1e", holder);
  for (const auto& f : failures) c.detail += "; FAILED " + f;
  return c;
}

/// w = 1, S = {0}: T(G \ S) is not dense and the witness bound is 1.
inline Criterion density() {
  Criterion c{9, "density criterion", true, ""};
  const auto g = GroupSpec::integers(1024);
  const SpectralMeasure m(MatrixWeight::from_family(g, families::constant(1.0)));
  const auto S = FrequencySet::explicit_set({0});
  double worst = 0.0;
  bool found = true;
  for (double a : {1.5, 2.0, 3.0}) {
    const auto rep = density_check(m, S, Exponents::from_alpha(a), 4);
    found = found && rep.witness_found;
    if (rep.witness_found) worst = std::max(worst, std::abs(rep.certificate.lower_bound - 1.0));
  }
  c.passed = found && worst <= 1e-9;
  c.detail = std::string(found ? "witness found" : "no witness") + ", |bound - 1| " + detail::fmt("%.2e", worst);
  return c;
}

inline std::vector<std::function<Criterion()>> all() {
  return {identity, kolmogorov, general_alpha_singleton, szego, singular_invariance,
          finite_group_duality, matrix_case, invariants, density};
}

/// Runs one criterion, converting an exception into a failure.
inline Criterion run(const std::function<Criterion()>& f, int id) {
  try {
    return f();
  } catch (const std::exception& ex) {
    return Criterion{id, "criterion " + std::to_string(id), false, std::string("exception: ") + ex.what()};
  }
}

inline std::string format(const Criterion& c) {
  return std::string(c.passed ? "PASS" : "FAIL") + "  [" + std::to_string(c.id) + "] " + c.name + ": " + c.detail;
}

}  // namespace trigapprox::acceptance
