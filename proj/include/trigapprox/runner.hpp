#pragma once

// Runs scenarios and renders their reports as JSON and as a text table.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "trigapprox/acsets.hpp"
#include "trigapprox/dual.hpp"
#include "trigapprox/oracle.hpp"
#include "trigapprox/primal.hpp"
#include "trigapprox/scenario.hpp"

namespace trigapprox {

inline constexpr int kReportSchemaVersion = 1;

struct Reference {
  std::string name;
  double value = 0.0;
  bool contained = false;
};

struct ScenarioReport {
  std::string name;
  std::string group;
  int q = 1;
  double alpha = 2.0;
  std::string set;
  Frequency s;
  int k = 1;
  ReductionReport reduction;
  std::vector<PrimalResult> primal;
  std::vector<DualCertificate> dual;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::vector<Reference> references;
  std::optional<double> timing_ms;
  /// 0 ok, 1 configuration or unsupported, 2 sandwich violation.
  int exit_code = 0;
  std::string error;
};

namespace references {

/// Scalar: [int (w_eff^+)^beta]^{-1/alpha'}. Matrix (alpha = 2): [e_k^* A^+ e_k]^{1/2}, A = int W_eff^+.
inline std::optional<double> singleton(const SpectralMeasure& m, int k, const Exponents& e) {
  const auto& g = m.group();
  if (m.dimension() == 1) {
    const RVector v = dual_density(m, e);
    const double integral = v.sum() * g.node_weight();
    if (!(integral > 0.0)) return std::nullopt;
    return std::pow(integral, -1.0 / e.conjugate);
  }
  if (!e.is_two()) return std::nullopt;
  CMatrix a = CMatrix::Zero(m.dimension(), m.dimension());
  for (const auto& w : dual_density_matrix(m)) a += w;
  a *= g.node_weight();
  const double val = moore_penrose(a)(k - 1, k - 1).real();
  if (!(val > 0.0)) return std::nullopt;
  return std::sqrt(val);
}

/// exp(int log w)^{1/alpha}: the half-line distance on Z for a scalar weight.
inline std::optional<double> szego(const MatrixWeight& w, const Exponents& e) {
  if (w.dimension() != 1 || w.group().kind() != GroupKind::Integers) return std::nullopt;
  const RVector v = w.scalar_samples();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) acc += v(j) > 0.0 ? std::log(v(j)) : -std::numeric_limits<double>::infinity();
  return std::exp(acc * w.group().node_weight() / e.alpha);
}

}  // namespace references

namespace detail {

/// The measure on which d is computed, after applying the reduction policy.
inline ReducedMeasure apply_reduction(const Scenario& sc) {
  auto auto_red = reduce_measure(sc.measure, sc.S, sc.group());
  if (sc.reduction == ReductionPolicy::Auto) return auto_red;
  ReductionReport rep;
  rep.status = auto_red.report.status;
  if (sc.reduction == ReductionPolicy::ForceFull) {
    rep.decision = ReductionReport::Decision::ForcedFull;
    rep.note = "singular part kept by request";
    return {sc.measure, rep};
  }
  rep.decision = ReductionReport::Decision::ForcedAc;
  rep.atoms_dropped = sc.measure.singular().size();
  rep.note = rep.status.is_proven() ? "singular part dropped by request"
                                    : "warning: singular part dropped by request without an AC-set proof";
  return {restrict(sc.measure, MeasurePart::AcOnly), rep};
}

inline bool is_singleton_of(const FrequencySet& S, Frequency s, const GroupSpec& g) {
  if (S.kind() != FrequencySet::Kind::Explicit) return false;
  const auto& el = S.elements();
  return el.size() == 1 && g.reduce(el.front()) == g.reduce(s);
}

inline bool is_half_line_at(const FrequencySet& S, Frequency s) {
  return S.kind() == FrequencySet::Kind::HalfLine && S.bound() == s.m;
}

}  // namespace detail

inline ScenarioReport run_scenario(const Scenario& sc, bool with_timing = false) {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioReport r;
  r.name = sc.name;
  r.group = sc.group().name();
  r.q = sc.measure.dimension();
  r.alpha = sc.alpha;
  r.set = sc.S.to_string();
  r.s = sc.s;
  r.k = sc.k;
  try {
    const Exponents e = sc.exponents();
    if (r.q > 1 && !e.is_two())
      throw Unsupported("matrix-valued weights (q = " + std::to_string(r.q) + ") require alpha = 2");
    auto red = detail::apply_reduction(sc);
    r.reduction = red.report;
    const SpectralMeasure& m = red.measure;

    LpOptions lp;
    lp.tol = sc.tol.lp;
    lp.max_iter = sc.tol.max_iter;
    lp.rank_tol = sc.tol.rank;
    DualOptions dopt;
    dopt.lp = lp;
    dopt.rank_tol = sc.tol.rank;

    for (auto F : sc.primal_windows) {
      r.primal.push_back(primal_bound(m, sc.S, sc.s, sc.k, e, F, lp));
      r.upper = std::min(r.upper, r.primal.back().bound);
    }
    for (auto H : sc.dual_windows) {
      r.dual.push_back(dual_maximize(m, sc.S, sc.s, sc.k, e, H, dopt));
      r.lower = std::max(r.lower, r.dual.back().lower_bound);
    }
    if (red.measure.has_atoms() != sc.measure.has_atoms()) {
      r.reduction.rho_full = primal_bound(sc.measure, sc.S, sc.s, sc.k, e, sc.primal_windows.back(), lp).bound;
      r.reduction.rho_reduced = r.primal.back().bound;
    }

    if (detail::is_singleton_of(sc.S, sc.s, sc.group()))
      if (auto v = references::singleton(m, sc.k, e)) r.references.push_back({"singleton", *v, false});
    if (r.q == 1 && detail::is_half_line_at(sc.S, sc.s))
      if (auto v = references::szego(m.ac(), e)) r.references.push_back({"szego", *v, false});
    if (sc.group().kind() == GroupKind::Cyclic && sc.group().grid_size() <= kOracleMaxOrder)
      r.references.push_back({"oracle", oracle_distance(m, sc.S, sc.s, sc.k, e).distance, false});
    const double slack = sc.tol.sandwich;
    for (auto& ref : r.references) ref.contained = ref.value >= r.lower - slack && ref.value <= r.upper + slack;

    if (r.lower > r.upper + slack) {
      r.exit_code = 2;
      r.error = "sandwich violation: lower " + std::to_string(r.lower) + " > upper " + std::to_string(r.upper);
    }
  } catch (const SandwichViolation& ex) {
    r.exit_code = 2;
    r.error = ex.what();
  } catch (const std::exception& ex) {
    r.exit_code = 1;
    r.error = ex.what();
  }
  if (with_timing)
    r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Runs scenarios on up to `jobs` threads; results keep the input order.
inline std::vector<ScenarioReport> run_all(const std::vector<Scenario>& list, int jobs = 1, bool with_timing = false) {
  std::vector<ScenarioReport> out(list.size());
  const auto workers = static_cast<std::size_t>(std::clamp<int>(jobs, 1, static_cast<int>(std::max<std::size_t>(list.size(), 1))));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < list.size(); i = next++) out[i] = run_scenario(list[i], with_timing);
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

inline int exit_code(const std::vector<ScenarioReport>& reports) {
  int code = 0;
  for (const auto& r : reports) code = std::max(code, r.exit_code);
  return code;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const CVector& v) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

inline nlohmann::json to_json(const TrigPolynomial& t, int dim) {
  auto out = nlohmann::json::array();
  for (const auto& [x, u] : t.terms()) {
    nlohmann::json freq = dim == 1 ? nlohmann::json(x.m) : nlohmann::json::array({x.m, x.n});
    out.push_back({{"freq", freq}, {"coef", to_json(u)}});
  }
  return out;
}

inline nlohmann::json to_json(const ScenarioReport& r) {
  const int dim = r.s.n != 0 || r.group.rfind("lattice2", 0) == 0 ? 2 : 1;
  nlohmann::json j;
  j["name"] = r.name;
  j["group"] = r.group;
  j["q"] = r.q;
  j["alpha"] = r.alpha;
  j["S"] = r.set;
  j["s"] = dim == 1 ? nlohmann::json(r.s.m) : nlohmann::json::array({r.s.m, r.s.n});
  j["k"] = r.k;
  if (!r.error.empty()) {
    j["status"] = r.exit_code == 2 ? "sandwich_violation" : "error";
    j["error"] = r.error;
    if (r.exit_code != 2) return j;
  } else {
    j["status"] = "ok";
  }
  nlohmann::json red;
  red["decision"] = to_string(r.reduction.decision);
  red["ac_verdict"] = to_string(r.reduction.status.verdict);
  red["ac_rule"] = r.reduction.status.reason;
  red["atoms_dropped"] = r.reduction.atoms_dropped;
  red["note"] = r.reduction.note;
  if (r.reduction.rho_full) red["rho_full"] = *r.reduction.rho_full;
  if (r.reduction.rho_reduced) red["rho_reduced"] = *r.reduction.rho_reduced;
  j["reduction"] = red;

  auto primal = nlohmann::json::array();
  for (const auto& p : r.primal) {
    nlohmann::json e{{"window", p.window},       {"bound", p.bound},
                     {"method", p.method},       {"iterations", p.iterations},
                     {"converged", p.converged}, {"last_relative_step", p.last_relative_step}};
    if (!p.diagnostic.empty()) e["diagnostic"] = p.diagnostic;
    primal.push_back(e);
  }
  j["primal"] = primal;

  auto dual = nlohmann::json::array();
  for (const auto& c : r.dual) {
    nlohmann::json e{{"window", c.window},
                     {"empty", c.empty},
                     {"bound", c.bound},
                     {"quadrature_error", c.quadrature_error},
                     {"lower_bound", c.lower_bound},
                     {"objective", std::isfinite(c.objective) ? nlohmann::json(c.objective) : nlohmann::json(nullptr)},
                     {"residuals",
                      {{"pinned", c.pinned_residual}, {"vanishing", c.vanishing_residual}, {"carrier", c.carrier_residual}}},
                     {"iterations", c.iterations},
                     {"certificate", to_json(c.h, dim)}};
    if (!c.note.empty()) e["note"] = c.note;
    dual.push_back(e);
  }
  j["dual"] = dual;

  j["sandwich"] = {{"lower", r.lower},
                   {"upper", std::isfinite(r.upper) ? nlohmann::json(r.upper) : nlohmann::json(nullptr)},
                   {"absolute_gap", std::isfinite(r.upper) ? nlohmann::json(r.upper - r.lower) : nlohmann::json(nullptr)},
                   {"relative_gap", std::isfinite(r.upper) && r.upper > 0.0 ? nlohmann::json((r.upper - r.lower) / r.upper)
                                                                             : nlohmann::json(nullptr)}};
  auto refs = nlohmann::json::array();
  for (const auto& ref : r.references) refs.push_back({{"name", ref.name}, {"value", ref.value}, {"contained", ref.contained}});
  j["references"] = refs;
  if (r.timing_ms) j["timing_ms"] = *r.timing_ms;
  return j;
}

inline nlohmann::json to_json(const std::vector<ScenarioReport>& reports) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  auto list = nlohmann::json::array();
  for (const auto& r : reports) list.push_back(to_json(r));
  j["scenarios"] = list;
  return j;
}

// ---------------------------------------------------------------------------
// Text

inline std::string format_table(const ScenarioReport& r) {
  std::string out;
  char buf[256];
  auto line = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
  };
  line("== %s  [%s, q=%d, alpha=%g, S=%s]\n", r.name.c_str(), r.group.c_str(), r.q, r.alpha, r.set.c_str());
  if (!r.error.empty() && r.exit_code != 2) {
    line("   error: %s\n", r.error.c_str());
    return out;
  }
  line("   reduction: %s (%s)\n", to_string(r.reduction.decision).c_str(), r.reduction.note.c_str());
  if (r.reduction.rho_full)
    line("   full measure %.10f, reduced %.10f\n", *r.reduction.rho_full, *r.reduction.rho_reduced);
  for (const auto& p : r.primal) line("   primal F=%-6lld %.12f\n", static_cast<long long>(p.window), p.bound);
  for (const auto& c : r.dual) {
    if (c.empty) {
      line("   dual   H=%-6lld (empty: %s)\n", static_cast<long long>(c.window), c.note.c_str());
    } else {
      line("   dual   H=%-6lld %.12f  (quadrature %.1e)\n", static_cast<long long>(c.window), c.lower_bound,
           c.quadrature_error);
    }
  }
  line("   sandwich [%.12f, %.12f]\n", r.lower, r.upper);
  for (const auto& ref : r.references)
    line("   %-9s %.12f  %s\n", ref.name.c_str(), ref.value, ref.contained ? "inside" : "OUTSIDE");
  if (r.exit_code == 2) line("   error: %s\n", r.error.c_str());
  return out;
}

}  // namespace trigapprox
