#pragma once

#include <map>
#include <vector>

#include "trigapprox/common.hpp"
#include "trigapprox/groups.hpp"

namespace trigapprox {

/// t = sum_x chi_x u_x with finitely many nonzero u_x in C^q.
class TrigPolynomial {
 public:
  explicit TrigPolynomial(int dimension = 1) : dim_(dimension) { require(dimension >= 1, "dimension must be >= 1"); }

  static TrigPolynomial character(Frequency x, const CVector& u) {
    TrigPolynomial t(static_cast<int>(u.size()));
    t.add(x, u);
    return t;
  }

  /// chi_x e_k (k is 1-based).
  static TrigPolynomial unit(Frequency x, int k, int q) {
    require(k >= 1 && k <= q, "component index out of range");
    CVector u = CVector::Zero(q);
    u(k - 1) = 1.0;
    return character(x, u);
  }

  int dimension() const { return dim_; }
  const std::map<Frequency, CVector>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add(Frequency x, const CVector& u) {
    require(u.size() == dim_, "coefficient dimension mismatch");
    auto [it, fresh] = terms_.try_emplace(x, u);
    if (!fresh) it->second += u;
    if (it->second.isZero(0.0)) terms_.erase(it);
  }

  void add(Frequency x, cplx u) { add(x, CVector::Constant(1, u)); }

  CVector coefficient(Frequency x) const {
    auto it = terms_.find(x);
    return it == terms_.end() ? CVector::Zero(dim_) : it->second;
  }

  std::vector<Frequency> support() const {
    std::vector<Frequency> out;
    out.reserve(terms_.size());
    for (const auto& [x, u] : terms_) out.push_back(x);
    return out;
  }

  /// Drops coefficients with max-abs entry <= tol.
  void prune(double tol = 0.0) {
    std::erase_if(terms_, [tol](const auto& kv) { return kv.second.cwiseAbs().maxCoeff() <= tol; });
  }

  CVector evaluate(const GroupSpec& g, std::size_t node) const {
    CVector acc = CVector::Zero(dim_);
    for (const auto& [x, u] : terms_) acc += g.character(x, node) * u;
    return acc;
  }

  GridFunction samples(const GroupSpec& g) const {
    GridFunction out(g.num_nodes());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = evaluate(g, j);
    return out;
  }

  /// Samples of a scalar polynomial as one vector.
  CVector scalar_samples(const GroupSpec& g) const {
    require(dim_ == 1, "scalar_samples: polynomial is vector-valued");
    CVector out = CVector::Zero(static_cast<Eigen::Index>(g.num_nodes()));
    for (const auto& [x, u] : terms_) {
      const cplx c = u(0);
      for (std::size_t j = 0; j < g.num_nodes(); ++j) out(static_cast<Eigen::Index>(j)) += c * g.character(x, j);
    }
    return out;
  }

  TrigPolynomial operator-(const TrigPolynomial& o) const {
    require(o.dim_ == dim_, "dimension mismatch");
    TrigPolynomial r = *this;
    for (const auto& [x, u] : o.terms_) r.add(x, CVector(-u));
    return r;
  }

  TrigPolynomial operator*(cplx c) const {
    TrigPolynomial r(dim_);
    for (const auto& [x, u] : terms_) r.add(x, CVector(c * u));
    return r;
  }

 private:
  int dim_;
  std::map<Frequency, CVector> terms_;
};

}  // namespace trigapprox
