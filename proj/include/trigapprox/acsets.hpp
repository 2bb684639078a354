#pragma once

// Frequency sets S (and G \ S) as small expression trees, plus a rule-based
// classifier for AC-sets: sets A such that any regular measure whose inverse
// Fourier-Stieltjes transform vanishes on A is absolutely continuous. Only the
// textbook rules are encoded; anything else is reported as Unknown.
//
// Text syntax:  explicit(0,5,-3)  explicit((1,0),(0,2))  halfline(ge,1)
//               sector2(30deg,240deg)  all  complement(E)  translate(E,3)
//               translate(E,(1,-1))  negate(E)

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trigapprox/common.hpp"
#include "trigapprox/groups.hpp"
#include "trigapprox/measures.hpp"

namespace trigapprox {

class FrequencySet {
 public:
  enum class Kind { Explicit, HalfLine, Sector, All, Complement, Translate, Negate };
  enum class Direction { Ge, Le };

  static FrequencySet explicit_set(std::vector<Frequency> elems) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    Node n{Kind::Explicit};
    n.elems = std::move(elems);
    return FrequencySet(std::move(n));
  }
  static FrequencySet explicit_set(std::initializer_list<std::int64_t> elems) {
    std::vector<Frequency> v;
    for (auto e : elems) v.emplace_back(e);
    return explicit_set(std::move(v));
  }
  /// {x >= bound} or {x <= bound}; on Z^2 the first coordinate is compared.
  static FrequencySet half_line(Direction dir, std::int64_t bound) {
    Node n{Kind::HalfLine};
    n.dir = dir;
    n.bound = bound;
    return FrequencySet(std::move(n));
  }
  /// Lattice points of the closed sector swept counter-clockwise from
  /// `start_deg` to `end_deg` (origin included).
  static FrequencySet sector(double start_deg, double end_deg) {
    Node n{Kind::Sector};
    n.start = normalize_deg(start_deg);
    double open = std::fmod(end_deg - start_deg, 360.0);
    if (open <= 0.0) open += 360.0;
    n.opening = open;
    return FrequencySet(std::move(n));
  }
  static FrequencySet all() { return FrequencySet(Node{Kind::All}); }

  FrequencySet complement() const { return unary(Kind::Complement); }
  FrequencySet negate() const { return unary(Kind::Negate); }
  FrequencySet translate(Frequency by) const {
    Node n{Kind::Translate};
    n.child = node_;
    n.shift = by;
    return FrequencySet(std::move(n));
  }

  Kind kind() const { return node_->kind; }
  const std::vector<Frequency>& elements() const { return node_->elems; }
  Direction direction() const { return node_->dir; }
  std::int64_t bound() const { return node_->bound; }
  double sector_start() const { return node_->start; }
  double sector_opening() const { return node_->opening; }
  Frequency shift() const { return node_->shift; }
  FrequencySet child() const {
    require(node_->child != nullptr, "set has no operand");
    return FrequencySet(node_->child);
  }

  std::string to_string() const {
    const Node& n = *node_;
    auto freq = [](Frequency x) {
      return x.n == 0 ? std::to_string(x.m) : "(" + std::to_string(x.m) + "," + std::to_string(x.n) + ")";
    };
    switch (n.kind) {
      case Kind::Explicit: {
        std::string s = "explicit(";
        for (std::size_t i = 0; i < n.elems.size(); ++i) s += (i ? "," : "") + freq(n.elems[i]);
        return s + ")";
      }
      case Kind::HalfLine:
        return std::string("halfline(") + (n.dir == Direction::Ge ? "ge," : "le,") + std::to_string(n.bound) + ")";
      case Kind::Sector: {
        std::ostringstream os;
        os << "sector2(" << n.start << "deg," << normalize_deg(n.start + n.opening) << "deg)";
        return os.str();
      }
      case Kind::All: return "all";
      case Kind::Complement: return "complement(" + child().to_string() + ")";
      case Kind::Negate: return "negate(" + child().to_string() + ")";
      case Kind::Translate: return "translate(" + child().to_string() + "," + freq(n.shift) + ")";
    }
    return "?";
  }

  static FrequencySet parse(std::string_view text);

 private:
  struct Node {
    Kind kind;
    std::vector<Frequency> elems{};
    Direction dir = Direction::Ge;
    std::int64_t bound = 0;
    double start = 0.0;
    double opening = 0.0;
    Frequency shift{};
    std::shared_ptr<const Node> child{};
  };

  explicit FrequencySet(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}
  explicit FrequencySet(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  FrequencySet unary(Kind k) const {
    Node n{k};
    n.child = node_;
    return FrequencySet(std::move(n));
  }

  static double normalize_deg(double d) {
    d = std::fmod(d, 360.0);
    return d < 0.0 ? d + 360.0 : d;
  }

  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class SetParser {
 public:
  explicit SetParser(std::string_view s) : s_(s) {}

  FrequencySet parse() {
    auto out = expr();
    skip();
    if (pos_ != s_.size()) fail("trailing characters");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InvalidInput("frequency set '" + std::string(s_) + "': " + why + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string ident() {
    skip();
    const auto b = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (b == pos_) fail("expected a name");
    std::string id(s_.substr(b, pos_ - b));
    std::transform(id.begin(), id.end(), id.begin(), [](unsigned char c) { return std::tolower(c); });
    return id;
  }
  double number() {
    skip();
    const auto b = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-' ||
                                s_[pos_] == '+' || s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
      ++pos_;
    if (b == pos_) fail("expected a number");
    try {
      return std::stod(std::string(s_.substr(b, pos_ - b)));
    } catch (const std::exception&) {
      fail("malformed number");
    }
  }
  std::int64_t integer() {
    const double v = number();
    if (v != std::floor(v)) fail("expected an integer");
    return static_cast<std::int64_t>(v);
  }
  Frequency frequency() {
    if (peek('(')) {
      ++pos_;
      const auto m = integer();
      expect(',');
      const auto n = integer();
      expect(')');
      return Frequency(m, n);
    }
    return Frequency(integer());
  }
  double degrees() {
    const double v = number();
    skip();
    if (s_.substr(pos_, 3) == "deg") pos_ += 3;
    return v;
  }

  FrequencySet expr() {
    const auto name = ident();
    if (name == "all") {
      if (peek('(')) {
        ++pos_;
        expect(')');
      }
      return FrequencySet::all();
    }
    expect('(');
    FrequencySet out = FrequencySet::all();
    if (name == "explicit") {
      std::vector<Frequency> elems;
      if (!peek(')')) {
        elems.push_back(frequency());
        while (peek(',')) {
          ++pos_;
          elems.push_back(frequency());
        }
      }
      out = FrequencySet::explicit_set(std::move(elems));
    } else if (name == "halfline") {
      const auto d = ident();
      if (d != "ge" && d != "le") fail("halfline direction must be ge or le");
      expect(',');
      out = FrequencySet::half_line(d == "ge" ? FrequencySet::Direction::Ge : FrequencySet::Direction::Le, integer());
    } else if (name == "sector2") {
      const double a = degrees();
      expect(',');
      const double b = degrees();
      out = FrequencySet::sector(a, b);
    } else if (name == "complement") {
      out = expr().complement();
    } else if (name == "negate") {
      out = expr().negate();
    } else if (name == "translate") {
      auto inner = expr();
      expect(',');
      out = inner.translate(frequency());
    } else {
      fail("unknown set constructor '" + name + "'");
    }
    expect(')');
    return out;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline FrequencySet FrequencySet::parse(std::string_view text) { return detail::SetParser(text).parse(); }

// ---------------------------------------------------------------------------
// Membership and windows

namespace detail {

inline bool in_sector(const FrequencySet& s, Frequency x) {
  if (x.m == 0 && x.n == 0) return true;
  double ang = std::atan2(static_cast<double>(x.n), static_cast<double>(x.m)) * 180.0 / std::numbers::pi;
  if (ang < 0.0) ang += 360.0;
  double delta = std::fmod(ang - s.sector_start() + 360.0, 360.0);
  if (delta > 360.0 - 1e-9) delta = 0.0;
  return delta <= s.sector_opening() + 1e-9;
}

}  // namespace detail

/// Membership in Z or Z^2, operators taken literally.
inline bool contains(const FrequencySet& s, Frequency x) {
  using K = FrequencySet::Kind;
  switch (s.kind()) {
    case K::Explicit: return std::binary_search(s.elements().begin(), s.elements().end(), x);
    case K::HalfLine: return s.direction() == FrequencySet::Direction::Ge ? x.m >= s.bound() : x.m <= s.bound();
    case K::Sector: return detail::in_sector(s, x);
    case K::All: return true;
    case K::Complement: return !contains(s.child(), x);
    case K::Translate: return contains(s.child(), x - s.shift());
    case K::Negate: return contains(s.child(), -x);
  }
  return false;
}

/// Membership in G. On Z_n a residue belongs to the set if some integer
/// representative of it does, with half-lines compared against the canonical
/// representative in [0, n).
inline bool contains(const FrequencySet& s, Frequency x, const GroupSpec& g) {
  g.validate(x);
  if (g.kind() != GroupKind::Cyclic) {
    if (s.kind() == FrequencySet::Kind::Sector && g.dimension() != 2)
      throw InvalidInput("sector2 sets live in Z^2, not " + g.name());
    if (s.kind() == FrequencySet::Kind::Translate) g.validate(s.shift());
    if (s.kind() == FrequencySet::Kind::Explicit)
      for (const auto& e : s.elements()) g.validate(e);
    switch (s.kind()) {
      case FrequencySet::Kind::Complement: return !contains(s.child(), x, g);
      case FrequencySet::Kind::Translate: return contains(s.child(), x - s.shift(), g);
      case FrequencySet::Kind::Negate: return contains(s.child(), -x, g);
      default: return contains(s, x);
    }
  }
  const Frequency r = g.reduce(x);
  using K = FrequencySet::Kind;
  switch (s.kind()) {
    case K::Explicit:
      return std::any_of(s.elements().begin(), s.elements().end(), [&](Frequency e) { return g.reduce(e) == r; });
    case K::HalfLine: return contains(s, r);
    case K::Sector: throw InvalidInput("sector2 sets live in Z^2, not " + g.name());
    case K::All: return true;
    case K::Complement: return !contains(s.child(), r, g);
    case K::Translate: return contains(s.child(), g.reduce(r - s.shift()), g);
    case K::Negate: return contains(s.child(), g.reduce(-r), g);
  }
  return false;
}

/// Members x of the set with |x| <= radius (componentwise on Z^2), in
/// ascending order. On Z_n the residues in [0, n) whose centered
/// representative has |x| <= radius.
inline std::vector<Frequency> window(const FrequencySet& s, const GroupSpec& g, std::int64_t radius) {
  require(radius >= 0, "window radius must be >= 0");
  std::vector<Frequency> out;
  switch (g.kind()) {
    case GroupKind::Integers:
      for (std::int64_t m = -radius; m <= radius; ++m)
        if (contains(s, Frequency(m), g)) out.emplace_back(m);
      break;
    case GroupKind::Lattice2:
      for (std::int64_t m = -radius; m <= radius; ++m)
        for (std::int64_t n = -radius; n <= radius; ++n)
          if (contains(s, Frequency(m, n), g)) out.emplace_back(m, n);
      break;
    case GroupKind::Cyclic: {
      const auto n = g.grid_size();
      for (std::int64_t r = 0; r < n; ++r) {
        const std::int64_t centered = 2 * r > n ? r - n : r;
        if (std::abs(centered) <= radius && contains(s, Frequency(r), g)) out.emplace_back(r);
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// AC-set classification

struct ACStatus {
  enum class Verdict { ProvenAC, KnownNotAC, Unknown };
  Verdict verdict = Verdict::Unknown;
  /// Rule chain for ProvenAC, witness description for KnownNotAC.
  std::string reason;

  static ACStatus proven(std::string rule) { return {Verdict::ProvenAC, std::move(rule)}; }
  static ACStatus not_ac(std::string witness) { return {Verdict::KnownNotAC, std::move(witness)}; }
  static ACStatus unknown(std::string why = {}) { return {Verdict::Unknown, std::move(why)}; }

  bool is_proven() const { return verdict == Verdict::ProvenAC; }
};

inline std::string to_string(ACStatus::Verdict v) {
  switch (v) {
    case ACStatus::Verdict::ProvenAC: return "ProvenAC";
    case ACStatus::Verdict::KnownNotAC: return "KnownNotAC";
    case ACStatus::Verdict::Unknown: return "Unknown";
  }
  return "?";
}

namespace detail {

inline const char* kMAxisWitness =
    "mu = lambda (x) delta_0 is singular and its transform vanishes on {(m,n): m != 0}; "
    "translates and subsets of non-AC sets are non-AC";
inline const char* kNAxisWitness =
    "mu = delta_0 (x) lambda is singular and its transform vanishes on {(m,n): n != 0}; "
    "translates and subsets of non-AC sets are non-AC";

inline ACStatus with_step(ACStatus st, const std::string& step) {
  if (st.verdict == ACStatus::Verdict::ProvenAC) st.reason += " + " + step;
  return st;
}

/// `complemented` classifies the complement of `s` instead of `s`.
inline ACStatus classify(const FrequencySet& s, int dim, bool complemented) {
  using K = FrequencySet::Kind;
  using D = FrequencySet::Direction;
  switch (s.kind()) {
    case K::Complement: return classify(s.child(), dim, !complemented);
    case K::Translate: return with_step(classify(s.child(), dim, complemented), "translate (c)");
    case K::Negate: return with_step(classify(s.child(), dim, complemented), "negation (c)");
    case K::Explicit:
      if (complemented) return ACStatus::proven("complement of a compact set (a)");
      return ACStatus::unknown("finite set: no rule applies");
    case K::All:
      if (complemented) return ACStatus::unknown("empty set: no rule applies");
      return ACStatus::proven("complement of a compact set (a)");
    case K::HalfLine: {
      D dir = s.direction();
      std::int64_t b = s.bound();
      if (complemented) {
        dir = dir == D::Ge ? D::Le : D::Ge;
        b = dir == D::Le ? b - 1 : b + 1;
      }
      if (dim == 2) return ACStatus::not_ac(kMAxisWitness);
      if (dir == D::Ge) return ACStatus::proven("F. and M. Riesz half-line (d) + translate (c)");
      return ACStatus::proven("F. and M. Riesz half-line (d) + negation and translate (c)");
    }
    case K::Sector: {
      if (complemented) return ACStatus::unknown("complement of a sector: no rule applies");
      const double open = s.sector_opening();
      if (open > 180.0 + 1e-9) return ACStatus::proven("Bochner sector with opening > pi (e)");
      if (std::abs(open - 180.0) <= 1e-9) {
        const double st = s.sector_start();
        const double r = std::fmod(st, 90.0);
        if (r < 1e-9 || r > 90.0 - 1e-9) {
          // start 0 or 180: boundary is the m-axis, so the half-plane is {n >= 0} or {n <= 0}.
          const bool boundary_on_m_axis = std::abs(std::fmod(st, 180.0)) < 1e-9 || std::fmod(st, 180.0) > 180.0 - 1e-9;
          return ACStatus::not_ac(boundary_on_m_axis ? kNAxisWitness : kMAxisWitness);
        }
      }
      return ACStatus::unknown("sector with opening <= pi: no rule applies");
    }
  }
  return ACStatus::unknown();
}

}  // namespace detail

/// Conservative AC-set verdict for `s` as a subset of G.
inline ACStatus classify_ac(const FrequencySet& s, const GroupSpec& g) {
  if (g.is_compact_group()) return ACStatus::proven("every subset of a compact group (b)");
  return detail::classify(s, g.dimension(), false);
}

// ---------------------------------------------------------------------------
// Singular-part reduction

struct ReductionReport {
  enum class Decision { TriviallyReduced, Reduced, NotReducible, ForcedFull, ForcedAc };
  Decision decision = Decision::TriviallyReduced;
  /// Verdict for G \ S.
  ACStatus status;
  std::size_t atoms_dropped = 0;
  std::string note;
  /// Distances over the full and the reduced measure when both were computed.
  std::optional<double> rho_full;
  std::optional<double> rho_reduced;
};

inline std::string to_string(ReductionReport::Decision d) {
  switch (d) {
    case ReductionReport::Decision::TriviallyReduced: return "trivially_reduced";
    case ReductionReport::Decision::Reduced: return "reduced";
    case ReductionReport::Decision::NotReducible: return "not_reducible";
    case ReductionReport::Decision::ForcedFull: return "forced_full";
    case ReductionReport::Decision::ForcedAc: return "forced_ac";
  }
  return "?";
}

struct ReducedMeasure {
  SpectralMeasure measure;
  ReductionReport report;
};

/// Drops the singular part when G \ S is a proven AC-set, in which case the
/// distance over M equals the distance over its absolutely continuous part.
inline ReducedMeasure reduce_measure(const SpectralMeasure& m, const FrequencySet& s, const GroupSpec& g) {
  ReductionReport rep;
  rep.status = classify_ac(s.complement(), g);
  if (!m.has_atoms()) {
    rep.decision = ReductionReport::Decision::TriviallyReduced;
    rep.note = "measure has no singular part";
    return {m, rep};
  }
  if (rep.status.is_proven()) {
    rep.decision = ReductionReport::Decision::Reduced;
    rep.atoms_dropped = m.singular().size();
    rep.note = "G\\S is an AC-set: " + rep.status.reason;
    return {restrict(m, MeasurePart::AcOnly), rep};
  }
  rep.decision = ReductionReport::Decision::NotReducible;
  rep.note = rep.status.verdict == ACStatus::Verdict::KnownNotAC
                 ? "warning: G\\S is not an AC-set (" + rep.status.reason + "); singular part kept"
                 : "G\\S not proven to be an AC-set; singular part kept";
  return {m, rep};
}

}  // namespace trigapprox
