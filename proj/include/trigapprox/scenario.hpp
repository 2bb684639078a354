#pragma once

// Scenario description and its TOML reader.
//
//   name = "szego"
//   [group]      kind = "integers" | "cyclic" | "lattice2", size = N
//   [measure]    family = "constant" | "trig_modulus" | "piecewise_constant" | "matrix_poly" | "samples"
//                atoms = [ { node = 0, mass = 0.7 } ]  or  atoms_file = "atoms.txt"
//   [problem]    S = "halfline(le,0)", s = 0, k = 1, alpha = 2.0,
//                primal_windows = [..], dual_windows = [..], reduction = "auto"
//   [tolerances] sandwich, rank, lp, max_iter
//
// Several scenarios go in a [[scenario]] array with the same keys.
// Complex numbers are written as a number or as [re, im]; matrices as
// arrays of rows.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <toml.hpp>

#include "trigapprox/acsets.hpp"
#include "trigapprox/common.hpp"
#include "trigapprox/groups.hpp"
#include "trigapprox/laspace.hpp"
#include "trigapprox/measures.hpp"

namespace trigapprox {

enum class ReductionPolicy { Auto, ForceFull, ForceAc };

inline std::string to_string(ReductionPolicy p) {
  switch (p) {
    case ReductionPolicy::Auto: return "auto";
    case ReductionPolicy::ForceFull: return "force-full";
    case ReductionPolicy::ForceAc: return "force-ac";
  }
  return "?";
}

struct Tolerances {
  double sandwich = 1e-9;
  double rank = kDefaultRankTol;
  double lp = 1e-9;
  int max_iter = 500;
};

struct Scenario {
  std::string name;
  SpectralMeasure measure;
  FrequencySet S;
  Frequency s;
  int k = 1;
  double alpha = 2.0;
  std::vector<std::int64_t> primal_windows;
  std::vector<std::int64_t> dual_windows;
  Tolerances tol;
  ReductionPolicy reduction = ReductionPolicy::Auto;

  const GroupSpec& group() const { return measure.group(); }
  Exponents exponents() const { return Exponents::from_alpha(alpha); }
};

struct LoadOptions {
  /// Replaces [group] size when set.
  std::optional<std::int64_t> grid;
};

namespace config {

namespace detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw InvalidInput("config: " + where + ": " + what);
}

inline double number(const toml::node& n, const std::string& where) {
  if (auto v = n.value<double>()) return *v;
  fail(where, "expected a number");
}

inline cplx complex(const toml::node& n, const std::string& where) {
  if (auto v = n.value<double>()) return *v;
  if (const auto* a = n.as_array(); a && a->size() == 2) return {number(*a->get(0), where), number(*a->get(1), where)};
  fail(where, "expected a number or [re, im]");
}

inline const toml::array& array(const toml::node& n, const std::string& where) {
  if (const auto* a = n.as_array()) return *a;
  fail(where, "expected an array");
}

inline CMatrix matrix(const toml::node& n, const std::string& where) {
  if (n.is_number()) return CMatrix::Constant(1, 1, number(n, where));
  const auto& rows = array(n, where);
  const auto q = static_cast<Eigen::Index>(rows.size());
  if (q == 0) fail(where, "empty matrix");
  CMatrix m(q, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    const auto& row = array(*rows.get(static_cast<std::size_t>(i)), where);
    if (static_cast<Eigen::Index>(row.size()) != q) fail(where, "matrix must be square");
    for (Eigen::Index j = 0; j < q; ++j) m(i, j) = complex(*row.get(static_cast<std::size_t>(j)), where);
  }
  return m;
}

inline Frequency frequency(const toml::node& n, const std::string& where) {
  if (auto v = n.value<std::int64_t>()) return Frequency{*v};
  if (const auto* a = n.as_array(); a && a->size() == 2) {
    auto m = a->get(0)->value<std::int64_t>();
    auto k = a->get(1)->value<std::int64_t>();
    if (m && k) return Frequency{*m, *k};
  }
  fail(where, "expected an integer or [m, n]");
}

inline std::vector<std::int64_t> windows(const toml::table& t, const char* key, const std::string& where) {
  std::vector<std::int64_t> out;
  const auto* a = t[key].as_array();
  if (!a) fail(where, std::string("missing ") + key);
  for (const auto& e : *a) {
    auto v = e.value<std::int64_t>();
    if (!v || *v < 0) fail(where, std::string(key) + " entries must be nonnegative integers");
    out.push_back(*v);
  }
  if (out.empty()) fail(where, std::string(key) + " is empty");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] <= out[i - 1]) fail(where, std::string(key) + " must be strictly ascending");
  return out;
}

inline GroupSpec group(const toml::table& t, const LoadOptions& opt, const std::string& where) {
  const auto* g = t["group"].as_table();
  if (!g) fail(where, "missing [group]");
  const auto kind = (*g)["kind"].value<std::string>();
  auto size = (*g)["size"].value<std::int64_t>();
  if (opt.grid) size = opt.grid;
  if (!kind) fail(where, "group.kind missing");
  if (!size || *size < 2) fail(where, "group.size must be an integer >= 2");
  if (*kind == "integers") return GroupSpec::integers(*size);
  if (*kind == "cyclic") return GroupSpec::cyclic(*size);
  if (*kind == "lattice2") return GroupSpec::lattice2(*size);
  fail(where, "unknown group kind '" + *kind + "'");
}

/// Lines of "index v1 v2 ...": q^2 reals or q^2 (re, im) pairs per line, row-major.
inline std::vector<std::pair<std::size_t, CMatrix>> read_table(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InvalidInput("cannot open " + file.string());
  std::vector<std::pair<std::size_t, CMatrix>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ls(line);
    long long idx = 0;
    if (!(ls >> idx)) continue;
    std::vector<double> v;
    for (double x; ls >> x;) v.push_back(x);
    if (!ls.eof()) throw InvalidInput(file.string() + ":" + std::to_string(lineno) + ": malformed number");
    const auto c = v.size();
    const auto r = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(c))));
    const auto rc = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(c) / 2.0)));
    CMatrix m;
    if (c > 0 && r * r == c) {
      m.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
      for (std::size_t i = 0; i < c; ++i) m(static_cast<Eigen::Index>(i / r), static_cast<Eigen::Index>(i % r)) = v[i];
    } else if (c > 0 && 2 * rc * rc == c) {
      m.resize(static_cast<Eigen::Index>(rc), static_cast<Eigen::Index>(rc));
      for (std::size_t i = 0; i < c / 2; ++i)
        m(static_cast<Eigen::Index>(i / rc), static_cast<Eigen::Index>(i % rc)) = cplx(v[2 * i], v[2 * i + 1]);
    } else {
      throw InvalidInput(file.string() + ":" + std::to_string(lineno) + ": expected q^2 or 2 q^2 values");
    }
    if (idx < 0) throw InvalidInput(file.string() + ":" + std::to_string(lineno) + ": negative index");
    rows.emplace_back(static_cast<std::size_t>(idx), std::move(m));
  }
  return rows;
}

inline std::size_t node_index(const toml::node& n, const GroupSpec& g, const std::string& where) {
  if (auto v = n.value<std::int64_t>()) {
    if (*v < 0 || static_cast<std::size_t>(*v) >= g.num_nodes()) fail(where, "atom node off the grid");
    return static_cast<std::size_t>(*v);
  }
  if (const auto* a = n.as_array(); a && a->size() == 2 && g.kind() == GroupKind::Lattice2) {
    auto j1 = a->get(0)->value<std::int64_t>();
    auto j2 = a->get(1)->value<std::int64_t>();
    if (!j1 || !j2 || *j1 < 0 || *j2 < 0 || *j1 >= g.grid_size() || *j2 >= g.grid_size())
      fail(where, "atom node off the grid");
    return static_cast<std::size_t>(*j1 * g.grid_size() + *j2);
  }
  fail(where, "atom node must be a grid index");
}

inline MatrixWeight weight(const toml::table& m, const GroupSpec& g, const std::filesystem::path& base,
                           const std::string& where) {
  const auto fam = m["family"].value<std::string>();
  if (!fam) fail(where, "measure.family missing");
  if (*fam == "constant") {
    const auto* v = m.get("value");
    if (!v) fail(where, "constant family needs 'value'");
    return MatrixWeight::from_family(g, families::constant(matrix(*v, where + ".value")));
  }
  if (*fam == "trig_modulus") {
    if (const auto* terms = m["terms"].as_array()) {
      std::vector<std::pair<Frequency, cplx>> list;
      for (const auto& t : *terms) {
        const auto* tt = t.as_table();
        if (!tt || !tt->get("freq") || !tt->get("coef")) fail(where, "terms entries need freq and coef");
        list.emplace_back(frequency(*tt->get("freq"), where), complex(*tt->get("coef"), where));
      }
      return MatrixWeight::from_family(g, families::trig_modulus(std::move(list)));
    }
    const auto* c = m.get("coefficients");
    if (!c) fail(where, "trig_modulus needs 'coefficients' or 'terms'");
    std::vector<cplx> coef;
    for (const auto& e : array(*c, where)) coef.push_back(complex(e, where + ".coefficients"));
    return MatrixWeight::from_family(g, families::trig_modulus(coef));
  }
  if (*fam == "piecewise_constant") {
    std::vector<double> edges, values;
    const auto* e = m.get("edges");
    const auto* v = m.get("values");
    if (!e || !v) fail(where, "piecewise_constant needs 'edges' and 'values'");
    for (const auto& x : array(*e, where)) edges.push_back(number(x, where + ".edges"));
    for (const auto& x : array(*v, where)) values.push_back(number(x, where + ".values"));
    return MatrixWeight::from_family(g, families::piecewise_constant(std::move(edges), std::move(values)));
  }
  if (*fam == "matrix_poly") {
    const auto* c = m.get("coefficients");
    if (!c) fail(where, "matrix_poly needs 'coefficients'");
    std::vector<CMatrix> coef;
    for (const auto& a : array(*c, where)) coef.push_back(matrix(a, where + ".coefficients"));
    return MatrixWeight::from_family(g, families::matrix_polynomial(std::move(coef)));
  }
  if (*fam == "samples") {
    const auto file = m["samples_file"].value<std::string>();
    if (!file) fail(where, "samples family needs 'samples_file'");
    auto rows = read_table(base / *file);
    if (rows.size() != g.num_nodes())
      fail(where, *file + " has " + std::to_string(rows.size()) + " rows, grid has " + std::to_string(g.num_nodes()));
    std::vector<CMatrix> samples(g.num_nodes());
    std::vector<bool> seen(g.num_nodes(), false);
    for (auto& [idx, w] : rows) {
      if (idx >= g.num_nodes() || seen[idx]) fail(where, *file + ": node indices must cover the grid exactly once");
      seen[idx] = true;
      samples[idx] = std::move(w);
    }
    return MatrixWeight::from_samples(g, std::move(samples));
  }
  fail(where, "unknown weight family '" + *fam + "'");
}

inline AtomicMeasure atoms(const toml::table& m, const GroupSpec& g, const std::filesystem::path& base,
                           const std::string& where) {
  std::vector<Atom> out;
  if (const auto* list = m["atoms"].as_array()) {
    for (const auto& a : *list) {
      const auto* t = a.as_table();
      if (!t || !t->get("node") || !t->get("mass")) fail(where, "atoms need node and mass");
      out.push_back({node_index(*t->get("node"), g, where), matrix(*t->get("mass"), where + ".atoms.mass")});
    }
  }
  if (auto file = m["atoms_file"].value<std::string>()) {
    for (auto& [idx, mass] : read_table(base / *file)) {
      if (idx >= g.num_nodes()) fail(where, *file + ": atom node off the grid");
      out.push_back({idx, std::move(mass)});
    }
  }
  return AtomicMeasure(std::move(out));
}

inline ReductionPolicy reduction(const toml::table& p, const std::string& where) {
  const auto r = p["reduction"].value_or<std::string>("auto");
  if (r == "auto") return ReductionPolicy::Auto;
  if (r == "force-full") return ReductionPolicy::ForceFull;
  if (r == "force-ac") return ReductionPolicy::ForceAc;
  fail(where, "reduction must be auto, force-full or force-ac");
}

inline Scenario scenario(const toml::table& t, const std::filesystem::path& base, const LoadOptions& opt,
                         const std::string& fallback_name) {
  const std::string name = t["name"].value_or(fallback_name);
  const GroupSpec g = group(t, opt, name);
  const auto* m = t["measure"].as_table();
  if (!m) fail(name, "missing [measure]");
  SpectralMeasure measure(weight(*m, g, base, name), atoms(*m, g, base, name));

  const auto* p = t["problem"].as_table();
  if (!p) fail(name, "missing [problem]");
  const auto set = (*p)["S"].value<std::string>();
  if (!set) fail(name, "problem.S missing");
  Scenario sc{name, std::move(measure), FrequencySet::parse(*set), Frequency{}, 1, 2.0, {}, {}, {}, reduction(*p, name)};
  if (const auto* s = p->get("s")) sc.s = frequency(*s, name + ".s");
  sc.k = static_cast<int>((*p)["k"].value_or<std::int64_t>(1));
  sc.alpha = (*p)["alpha"].value_or(2.0);
  sc.primal_windows = windows(*p, "primal_windows", name);
  sc.dual_windows = windows(*p, "dual_windows", name);
  if (const auto* tol = t["tolerances"].as_table()) {
    sc.tol.sandwich = (*tol)["sandwich"].value_or(sc.tol.sandwich);
    sc.tol.rank = (*tol)["rank"].value_or(sc.tol.rank);
    sc.tol.lp = (*tol)["lp"].value_or(sc.tol.lp);
    sc.tol.max_iter = static_cast<int>((*tol)["max_iter"].value_or<std::int64_t>(sc.tol.max_iter));
  }

  Exponents::from_alpha(sc.alpha);
  g.validate(sc.s);
  if (!contains(sc.S, sc.s, g)) fail(name, "invalid scenario: s = " + to_string(sc.s, g.dimension()) + " is not in S");
  if (sc.k < 1 || sc.k > sc.measure.dimension()) fail(name, "k must lie in 1..q");
  return sc;
}

}  // namespace detail

inline std::vector<Scenario> parse(std::string_view text, const std::filesystem::path& base = ".",
                                   const LoadOptions& opt = {}) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config: " << e.description() << " (line " << e.source().begin.line << ")";
    throw InvalidInput(os.str());
  }
  std::vector<Scenario> out;
  if (const auto* list = root["scenario"].as_array()) {
    int i = 0;
    for (const auto& n : *list) {
      const auto* t = n.as_table();
      if (!t) detail::fail("scenario", "entries must be tables");
      out.push_back(detail::scenario(*t, base, opt, "scenario" + std::to_string(++i)));
    }
  } else {
    out.push_back(detail::scenario(root, base, opt, "scenario"));
  }
  return out;
}

inline std::vector<Scenario> load(const std::filesystem::path& file, const LoadOptions& opt = {}) {
  std::ifstream in(file);
  if (!in) throw InvalidInput("cannot open config " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), file.parent_path(), opt);
}

}  // namespace config

}  // namespace trigapprox
