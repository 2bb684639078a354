#pragma once

// Concrete dual pairs (G, Gamma): the integers with the circle, the cyclic
// group Z_n with itself, and Z^2 with the torus. Gamma is always sampled on a
// uniform grid and Haar measure is normalized to total mass one, so every
// integral over Gamma is the plain mean of the grid samples.

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "trigapprox/common.hpp"

namespace trigapprox {

/// Element of G. One-dimensional groups only use `m`; Z^2 uses both.
struct Frequency {
  std::int64_t m = 0;
  std::int64_t n = 0;

  constexpr Frequency() = default;
  constexpr explicit Frequency(std::int64_t m_, std::int64_t n_ = 0) : m(m_), n(n_) {}

  auto operator<=>(const Frequency&) const = default;

  friend constexpr Frequency operator+(Frequency a, Frequency b) { return Frequency{a.m + b.m, a.n + b.n}; }
  friend constexpr Frequency operator-(Frequency a, Frequency b) { return Frequency{a.m - b.m, a.n - b.n}; }
  friend constexpr Frequency operator-(Frequency a) { return Frequency{-a.m, -a.n}; }
};

inline std::string to_string(Frequency x, int dimension = 1) {
  if (dimension == 1) return std::to_string(x.m);
  return "(" + std::to_string(x.m) + "," + std::to_string(x.n) + ")";
}

enum class GroupKind { Integers, Cyclic, Lattice2 };

class GroupSpec {
 public:
  /// G = Z, Gamma = circle sampled at theta_j = 2 pi j / N.
  static GroupSpec integers(std::int64_t grid_size) { return GroupSpec(GroupKind::Integers, grid_size); }
  /// G = Gamma = Z_n; the grid is the group itself.
  static GroupSpec cyclic(std::int64_t order) { return GroupSpec(GroupKind::Cyclic, order); }
  /// G = Z^2, Gamma = torus sampled on an N x N grid.
  static GroupSpec lattice2(std::int64_t grid_size) { return GroupSpec(GroupKind::Lattice2, grid_size); }

  GroupKind kind() const { return kind_; }
  std::int64_t grid_size() const { return size_; }
  int dimension() const { return kind_ == GroupKind::Lattice2 ? 2 : 1; }
  bool is_compact_group() const { return kind_ == GroupKind::Cyclic; }
  std::size_t num_nodes() const {
    return static_cast<std::size_t>(kind_ == GroupKind::Lattice2 ? size_ * size_ : size_);
  }

  std::string name() const {
    switch (kind_) {
      case GroupKind::Integers: return "integers(N=" + std::to_string(size_) + ")";
      case GroupKind::Cyclic: return "cyclic(n=" + std::to_string(size_) + ")";
      case GroupKind::Lattice2: return "lattice2(N=" + std::to_string(size_) + ")";
    }
    return "?";
  }

  /// Throws if `x` cannot be an element of G (second coordinate on a 1-D group).
  void validate(Frequency x) const {
    if (dimension() == 1 && x.n != 0)
      throw InvalidInput("frequency " + to_string(x, 2) + " is two-dimensional but " + name() + " is not");
  }

  /// Canonical representative: residues in [0, n) on Z_n, identity elsewhere.
  Frequency reduce(Frequency x) const {
    validate(x);
    if (kind_ != GroupKind::Cyclic) return x;
    return Frequency{mod(x.m, size_), 0};
  }

  /// Largest |frequency| component whose character is not aliased on the grid.
  std::int64_t band_limit() const {
    if (kind_ == GroupKind::Cyclic) return std::numeric_limits<std::int64_t>::max();
    return size_ / 2 - 1;
  }

  bool in_band(Frequency x) const {
    if (kind_ == GroupKind::Cyclic) return true;
    const auto b = band_limit();
    return std::abs(x.m) <= b && std::abs(x.n) <= b;
  }

  void check_band(Frequency x) const {
    validate(x);
    if (!in_band(x))
      throw InvalidInput("frequency " + to_string(x, dimension()) + " outside alias-free band |x| <= " +
                         std::to_string(band_limit()) + " of " + name());
  }

  /// Index k with <gamma_node, x> = exp(2 pi i k / N).
  std::size_t phase_index(Frequency x, std::size_t node) const {
    const auto j = static_cast<std::int64_t>(node);
    if (kind_ == GroupKind::Lattice2) {
      const std::int64_t j1 = j / size_, j2 = j % size_;
      return static_cast<std::size_t>(mod(mod(x.m, size_) * j1 + mod(x.n, size_) * j2, size_));
    }
    return static_cast<std::size_t>(mod(mod(x.m, size_) * j, size_));
  }

  /// <gamma_node, x>.
  cplx character(Frequency x, std::size_t node) const { return (*roots_)[phase_index(x, node)]; }

  /// exp(2 pi i k / N) for k in [0, N).
  const std::vector<cplx>& roots() const { return *roots_; }

  std::vector<cplx> character_samples(Frequency x) const {
    validate(x);
    std::vector<cplx> out(num_nodes());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = character(x, j);
    return out;
  }

  /// Angles of a node in (-pi, pi]; the second entry is zero on 1-D groups.
  std::array<double, 2> angles(std::size_t node) const {
    const auto j = static_cast<std::int64_t>(node);
    if (kind_ == GroupKind::Lattice2) return {angle(j / size_), angle(j % size_)};
    return {angle(j), 0.0};
  }

  /// Normalized Haar integral of grid samples (ascending-index summation).
  template <class T>
  T quadrature(std::span<const T> samples) const {
    if (samples.size() != num_nodes())
      throw InvalidInput("quadrature: " + std::to_string(samples.size()) + " samples for " +
                         std::to_string(num_nodes()) + " grid nodes");
    T acc = samples[0];
    for (std::size_t j = 1; j < samples.size(); ++j) acc = acc + samples[j];
    return acc / static_cast<double>(samples.size());
  }

  template <class T>
  T quadrature(const std::vector<T>& samples) const {
    return quadrature(std::span<const T>(samples));
  }

  double node_weight() const { return 1.0 / static_cast<double>(num_nodes()); }

  /// The same group on a grid twice as fine (Z_n is returned unchanged).
  GroupSpec refined() const {
    if (kind_ == GroupKind::Cyclic) return *this;
    return GroupSpec(kind_, 2 * size_);
  }

  /// Node of refined() that coincides with `node`.
  std::size_t refined_node(std::size_t node) const {
    if (kind_ == GroupKind::Cyclic) return node;
    const auto j = static_cast<std::int64_t>(node);
    if (kind_ == GroupKind::Lattice2) {
      const std::int64_t j1 = j / size_, j2 = j % size_;
      return static_cast<std::size_t>((2 * j1) * (2 * size_) + 2 * j2);
    }
    return static_cast<std::size_t>(2 * j);
  }

  bool operator==(const GroupSpec& o) const { return kind_ == o.kind_ && size_ == o.size_; }

  static std::int64_t mod(std::int64_t a, std::int64_t n) {
    const auto r = a % n;
    return r < 0 ? r + n : r;
  }

 private:
  GroupSpec(GroupKind kind, std::int64_t size) : kind_(kind), size_(size) {
    if (size < 2) throw InvalidInput("group grid size must be >= 2, got " + std::to_string(size));
    if (kind == GroupKind::Lattice2 && size > 4096) throw InvalidInput("lattice2 grid too large");
    auto roots = std::make_shared<std::vector<cplx>>(static_cast<std::size_t>(size));
    for (std::int64_t k = 0; k < size; ++k) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(size);
      (*roots)[static_cast<std::size_t>(k)] = cplx(std::cos(t), std::sin(t));
    }
    // Exact values at the quarter points keep characters of small groups exact.
    (*roots)[0] = 1.0;
    if (size % 2 == 0) (*roots)[static_cast<std::size_t>(size / 2)] = -1.0;
    if (size % 4 == 0) {
      (*roots)[static_cast<std::size_t>(size / 4)] = cplx(0.0, 1.0);
      (*roots)[static_cast<std::size_t>(3 * size / 4)] = cplx(0.0, -1.0);
    }
    roots_ = std::move(roots);
  }

  double angle(std::int64_t j) const {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(size_);
    return 2 * j > size_ ? t - 2.0 * std::numbers::pi : t;
  }

  GroupKind kind_;
  std::int64_t size_;
  std::shared_ptr<const std::vector<cplx>> roots_;
};

/// Mean of grid samples; thin wrapper kept for symmetry with character_samples.
inline cplx quadrature(std::span<const cplx> samples, const GroupSpec& g) { return g.quadrature(samples); }

}  // namespace trigapprox
