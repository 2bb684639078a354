#pragma once

// Spectral measures M = M_a + M_s that arrive already Lebesgue-decomposed:
// a sampled PSD density W = dM_a / d(lambda) plus finitely many atoms sitting
// on grid nodes. Also hosts the Hermitian PSD matrix functions (pseudoinverse,
// range projection, fractional powers) that the norm and the dual weights use.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "trigapprox/common.hpp"
#include "trigapprox/groups.hpp"

namespace trigapprox {

// ---------------------------------------------------------------------------
// Hermitian PSD matrix functions

/// Eigen-decomposition of a Hermitian PSD matrix with small negative
/// eigenvalues clipped to zero.
struct PsdSpectrum {
  RVector values;
  CMatrix vectors;
  /// Eigenvalues at or below this are treated as zero.
  double cutoff = 0.0;
};

inline void check_hermitian(const CMatrix& h, const char* who) {
  if (h.rows() != h.cols()) throw InvalidInput(std::string(who) + ": matrix is not square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12 * scale)) throw InvalidInput(std::string(who) + ": matrix is not Hermitian");
}

inline PsdSpectrum psd_spectrum(const CMatrix& h, double rel_tol = kDefaultRankTol, const char* who = "psd") {
  check_hermitian(h, who);
  PsdSpectrum out;
  if (h.rows() == 1) {
    out.values = RVector::Constant(1, h(0, 0).real());
    out.vectors = CMatrix::Identity(1, 1);
  } else {
    const CMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
    if (es.info() != Eigen::Success) throw NumericalError(std::string(who) + ": eigensolver failed");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  }
  const double top = out.values.size() ? out.values.maxCoeff() : 0.0;
  const double bottom = out.values.size() ? out.values.minCoeff() : 0.0;
  if (bottom < -1e-10 * std::max(top, 1.0))
    throw InvalidInput(std::string(who) + ": matrix is not positive semidefinite (min eigenvalue " +
                       std::to_string(bottom) + ")");
  out.values = out.values.cwiseMax(0.0);
  out.cutoff = rel_tol * std::max(top, 0.0);
  return out;
}

/// U f(Lambda) U* where f is applied to eigenvalues above the cutoff and the
/// rest map to zero.
template <class F>
CMatrix psd_apply(const PsdSpectrum& sp, F f) {
  const auto q = sp.values.size();
  if (q == 1) {
    const double v = sp.values(0);
    return CMatrix::Constant(1, 1, v > sp.cutoff ? cplx(f(v)) : cplx(0.0));
  }
  RVector mapped(q);
  for (Eigen::Index i = 0; i < q; ++i) mapped(i) = sp.values(i) > sp.cutoff ? f(sp.values(i)) : 0.0;
  return sp.vectors * mapped.asDiagonal() * sp.vectors.adjoint();
}

/// Moore-Penrose inverse of a Hermitian PSD matrix. For q = 1 this is 1/w on
/// {w != 0} and 0 elsewhere.
inline CMatrix moore_penrose(const CMatrix& h, double rel_tol = kDefaultRankTol) {
  return psd_apply(psd_spectrum(h, rel_tol, "moore_penrose"), [](double v) { return 1.0 / v; });
}

/// Orthoprojection onto ran(H).
inline CMatrix range_projection(const CMatrix& h, double rel_tol = kDefaultRankTol) {
  return psd_apply(psd_spectrum(h, rel_tol, "range_projection"), [](double) { return 1.0; });
}

/// H^p on the range of H (zero on its kernel), p > 0.
inline CMatrix psd_power(const CMatrix& h, double p, double rel_tol = kDefaultRankTol) {
  return psd_apply(psd_spectrum(h, rel_tol, "psd_power"), [p](double v) { return std::pow(v, p); });
}

inline Eigen::Index numerical_rank(const CMatrix& h, double rel_tol = kDefaultRankTol) {
  const auto sp = psd_spectrum(h, rel_tol, "numerical_rank");
  return (sp.values.array() > sp.cutoff).count();
}

/// Solves H x = b in the least-squares minimum-norm sense for Hermitian H
/// (not necessarily definite); eigenvalues below rel_tol * max|lambda| are dropped.
inline CMatrix hermitian_pinv_solve(const CMatrix& h, const CMatrix& b, double rel_tol = kDefaultRankTol) {
  if (h.rows() == 0) return CMatrix::Zero(0, b.cols());
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  if (es.info() != Eigen::Success) throw NumericalError("hermitian_pinv_solve: eigensolver failed");
  const RVector& lam = es.eigenvalues();
  const double cut = rel_tol * lam.cwiseAbs().maxCoeff();
  RVector inv(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) inv(i) = std::abs(lam(i)) > cut ? 1.0 / lam(i) : 0.0;
  const CMatrix& u = es.eigenvectors();
  return u * (inv.asDiagonal() * (u.adjoint() * b));
}

// ---------------------------------------------------------------------------
// Weight families

/// Closed-form weight that can be re-evaluated on any grid.
struct WeightFamily {
  std::string description;
  int dimension = 1;
  /// Takes node angles (theta1, theta2); 1-D families ignore theta2.
  std::function<CMatrix(std::array<double, 2>)> evaluate;
};

namespace families {

inline WeightFamily constant(const CMatrix& value) {
  return {"constant", static_cast<int>(value.rows()), [value](std::array<double, 2>) { return value; }};
}

inline WeightFamily constant(double c) { return constant(CMatrix::Constant(1, 1, c)); }

/// w = |sum_x a_x <gamma, x>|^2 for a finite list of (frequency, coefficient).
inline WeightFamily trig_modulus(std::vector<std::pair<Frequency, cplx>> terms) {
  return {"trig_modulus", 1, [terms = std::move(terms)](std::array<double, 2> th) {
            cplx acc = 0.0;
            for (const auto& [x, a] : terms)
              acc += a * std::polar(1.0, static_cast<double>(x.m) * th[0] + static_cast<double>(x.n) * th[1]);
            return CMatrix::Constant(1, 1, std::norm(acc));
          }};
}

/// One-variable polynomial a_0 + a_1 e^{i theta} + ... + a_p e^{i p theta}.
inline WeightFamily trig_modulus(const std::vector<cplx>& coefficients) {
  std::vector<std::pair<Frequency, cplx>> terms;
  for (std::size_t j = 0; j < coefficients.size(); ++j)
    terms.emplace_back(Frequency(static_cast<std::int64_t>(j)), coefficients[j]);
  return trig_modulus(std::move(terms));
}

/// Scalar step function of theta1: value[i] on (edges[i] pi, edges[i+1] pi].
/// Edges are given in units of pi and must cover (-1, 1].
inline WeightFamily piecewise_constant(std::vector<double> edges_over_pi, std::vector<double> values) {
  require(edges_over_pi.size() == values.size() + 1 && !values.empty(),
          "piecewise_constant: need len(edges) == len(values) + 1");
  require(std::is_sorted(edges_over_pi.begin(), edges_over_pi.end()), "piecewise_constant: edges must ascend");
  require(edges_over_pi.front() <= -1.0 && edges_over_pi.back() >= 1.0,
          "piecewise_constant: edges must cover (-1, 1] (units of pi)");
  for (double v : values) require(v >= 0.0, "piecewise_constant: values must be nonnegative");
  return {"piecewise_constant", 1,
          [edges = std::move(edges_over_pi), values = std::move(values)](std::array<double, 2> th) {
            const double t = th[0] / std::numbers::pi;
            std::size_t i = 0;
            while (i + 1 < values.size() && t > edges[i + 1]) ++i;
            return CMatrix::Constant(1, 1, values[i]);
          }};
}

/// W = A(theta) A(theta)^* with A(theta) = sum_j A_j e^{i j theta}.
inline WeightFamily matrix_polynomial(std::vector<CMatrix> coefficients) {
  require(!coefficients.empty(), "matrix_polynomial: no coefficients");
  const auto q = coefficients.front().rows();
  for (const auto& a : coefficients)
    require(a.rows() == q && a.cols() == q, "matrix_polynomial: coefficients must be q x q");
  return {"matrix_polynomial", static_cast<int>(q), [coefficients = std::move(coefficients)](std::array<double, 2> th) {
            CMatrix a = CMatrix::Zero(coefficients.front().rows(), coefficients.front().cols());
            for (std::size_t j = 0; j < coefficients.size(); ++j)
              a += std::polar(1.0, static_cast<double>(j) * th[0]) * coefficients[j];
            return CMatrix(a * a.adjoint());
          }};
}

}  // namespace families

// ---------------------------------------------------------------------------
// Densities, atoms and measures

/// PSD density samples W(gamma_j) on the grid of a group.
class MatrixWeight {
 public:
  static MatrixWeight from_samples(GroupSpec g, std::vector<CMatrix> samples) {
    return MatrixWeight(std::move(g), std::move(samples), std::nullopt);
  }

  static MatrixWeight from_scalar_samples(GroupSpec g, const std::vector<double>& w) {
    std::vector<CMatrix> s;
    s.reserve(w.size());
    for (double v : w) s.push_back(CMatrix::Constant(1, 1, v));
    return from_samples(std::move(g), std::move(s));
  }

  static MatrixWeight from_family(GroupSpec g, WeightFamily fam) {
    std::vector<CMatrix> s(g.num_nodes());
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = fam.evaluate(g.angles(j));
    return MatrixWeight(std::move(g), std::move(s), std::move(fam));
  }

  static MatrixWeight zero(GroupSpec g, int q) {
    std::vector<CMatrix> s(g.num_nodes(), CMatrix::Zero(q, q));
    return MatrixWeight(std::move(g), std::move(s), families::constant(CMatrix::Zero(q, q)));
  }

  int dimension() const { return dim_; }
  const GroupSpec& group() const { return group_; }
  const std::vector<CMatrix>& samples() const { return samples_; }
  const CMatrix& at(std::size_t node) const { return samples_.at(node); }
  const std::optional<WeightFamily>& family() const { return family_; }
  bool is_scalar() const { return dim_ == 1; }
  bool is_zero() const {
    return std::all_of(samples_.begin(), samples_.end(), [](const CMatrix& m) { return m.isZero(0.0); });
  }

  /// Real samples w(gamma_j); requires q = 1.
  RVector scalar_samples() const {
    require(dim_ == 1, "scalar_samples: weight is matrix-valued");
    RVector w(static_cast<Eigen::Index>(samples_.size()));
    for (std::size_t j = 0; j < samples_.size(); ++j) w(static_cast<Eigen::Index>(j)) = samples_[j](0, 0).real();
    return w;
  }

  /// The same closed-form weight on another grid; empty for sample tables.
  std::optional<MatrixWeight> resampled(const GroupSpec& g) const {
    if (!family_) return std::nullopt;
    return from_family(g, *family_);
  }

 private:
  MatrixWeight(GroupSpec g, std::vector<CMatrix> samples, std::optional<WeightFamily> fam)
      : group_(std::move(g)), samples_(std::move(samples)), family_(std::move(fam)) {
    if (samples_.size() != group_.num_nodes())
      throw InvalidInput("weight has " + std::to_string(samples_.size()) + " samples, grid has " +
                         std::to_string(group_.num_nodes()) + " nodes");
    dim_ = static_cast<int>(samples_.front().rows());
    require(dim_ >= 1, "weight dimension must be >= 1");
    double trace_sum = 0.0;
    for (auto& s : samples_) {
      require(s.rows() == dim_ && s.cols() == dim_, "weight samples must all be q x q");
      const auto sp = psd_spectrum(s, 0.0, "weight sample");
      // Store the symmetrized, clipped matrix.
      if (dim_ == 1) {
        s(0, 0) = sp.values(0);
      } else {
        s = sp.vectors * sp.values.asDiagonal() * sp.vectors.adjoint();
      }
      trace_sum += s.trace().real();
    }
    if (!std::isfinite(trace_sum)) throw InvalidInput("weight is not integrable (non-finite trace)");
  }

  GroupSpec group_;
  std::vector<CMatrix> samples_;
  std::optional<WeightFamily> family_;
  int dim_ = 1;
};

struct Atom {
  std::size_t node = 0;
  CMatrix mass;
};

/// Finite singular part: point masses at distinct grid nodes.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.node < b.node; });
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (i > 0 && atoms_[i].node == atoms_[i - 1].node)
        throw InvalidInput("atom locations must be distinct (node " + std::to_string(atoms_[i].node) + ")");
      psd_spectrum(atoms_[i].mass, 0.0, "atom mass");
    }
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }
  std::size_t size() const { return atoms_.size(); }

 private:
  std::vector<Atom> atoms_;
};

enum class MeasurePart { AcOnly, SingularOnly };

/// M = W d(lambda) + sum_j m_j delta_{gamma_j}.
class SpectralMeasure {
 public:
  explicit SpectralMeasure(MatrixWeight ac, AtomicMeasure singular = {})
      : ac_(std::move(ac)), singular_(std::move(singular)) {
    for (const auto& a : singular_.atoms()) {
      if (a.node >= ac_.group().num_nodes())
        throw InvalidInput("atom at node " + std::to_string(a.node) + " is off the grid of " + ac_.group().name());
      if (a.mass.rows() != ac_.dimension())
        throw InvalidInput("atom mass dimension does not match the density");
    }
  }

  const MatrixWeight& ac() const { return ac_; }
  const AtomicMeasure& singular() const { return singular_; }
  const GroupSpec& group() const { return ac_.group(); }
  int dimension() const { return ac_.dimension(); }
  bool has_atoms() const { return !singular_.empty(); }

  /// Mass carried by each grid node: W_j / |grid| plus any atom there.
  std::vector<CMatrix> grid_masses() const {
    const double nw = group().node_weight();
    std::vector<CMatrix> out;
    out.reserve(ac_.samples().size());
    for (const auto& s : ac_.samples()) out.push_back(nw * s);
    for (const auto& a : singular_.atoms()) out[a.node] += a.mass;
    return out;
  }

  /// Grid masses divided by the Haar node weight, i.e. the density of the
  /// discretized measure with respect to normalized counting measure.
  std::vector<CMatrix> effective_density() const {
    const double n = static_cast<double>(group().num_nodes());
    std::vector<CMatrix> out = ac_.samples();
    for (const auto& a : singular_.atoms()) out[a.node] += n * a.mass;
    return out;
  }

  RVector scalar_grid_masses() const {
    require(dimension() == 1, "scalar_grid_masses: measure is matrix-valued");
    RVector w = ac_.scalar_samples() * group().node_weight();
    for (const auto& a : singular_.atoms()) w(static_cast<Eigen::Index>(a.node)) += a.mass(0, 0).real();
    return w;
  }

  RVector scalar_effective_density() const {
    return scalar_grid_masses() * static_cast<double>(group().num_nodes());
  }

  /// The same measure on a finer grid, with atoms moved to the coinciding
  /// nodes. Empty if the density has no closed form.
  std::optional<SpectralMeasure> resampled(const GroupSpec& finer) const {
    auto w = ac_.resampled(finer);
    if (!w) return std::nullopt;
    std::vector<Atom> atoms;
    for (const auto& a : singular_.atoms()) atoms.push_back({group().refined_node(a.node), a.mass});
    return SpectralMeasure(std::move(*w), AtomicMeasure(std::move(atoms)));
  }

 private:
  MatrixWeight ac_;
  AtomicMeasure singular_;
};

/// The absolutely continuous or the singular component, the other zeroed.
inline SpectralMeasure restrict(const SpectralMeasure& m, MeasurePart part) {
  if (part == MeasurePart::AcOnly) return SpectralMeasure(m.ac());
  return SpectralMeasure(MatrixWeight::zero(m.group(), m.dimension()), m.singular());
}

/// Sum of two measures on the same grid (inverse of the restrict split).
inline SpectralMeasure combine(const SpectralMeasure& a, const SpectralMeasure& b) {
  require(a.group() == b.group() && a.dimension() == b.dimension(), "combine: measures on different spaces");
  MatrixWeight w = [&] {
    if (b.ac().is_zero()) return a.ac();
    if (a.ac().is_zero()) return b.ac();
    std::vector<CMatrix> s = a.ac().samples();
    for (std::size_t j = 0; j < s.size(); ++j) s[j] += b.ac().at(j);
    return MatrixWeight::from_samples(a.group(), std::move(s));
  }();
  std::map<std::size_t, CMatrix> atoms;
  for (const auto* m : {&a, &b})
    for (const auto& at : m->singular().atoms()) {
      auto [it, fresh] = atoms.try_emplace(at.node, at.mass);
      if (!fresh) it->second += at.mass;
    }
  std::vector<Atom> list;
  for (auto& [node, mass] : atoms) list.push_back({node, mass});
  return SpectralMeasure(std::move(w), AtomicMeasure(std::move(list)));
}

/// Pointwise P(gamma) f(gamma) with P the projection onto ran W(gamma); picks
/// the representative of the M-equivalence class that lives on the carrier.
inline GridFunction normalize_equivalence(const GridFunction& f, const MatrixWeight& w,
                                          double rel_tol = kDefaultRankTol) {
  require(f.size() == w.samples().size(), "normalize_equivalence: grid size mismatch");
  GridFunction out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    require(f[j].size() == w.dimension(), "normalize_equivalence: dimension mismatch");
    out[j] = range_projection(w.at(j), rel_tol) * f[j];
  }
  return out;
}

}  // namespace trigapprox
