#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sys/wait.h>

#include "support.hpp"
#include "trigapprox/oracle.hpp"
#include "trigapprox/runner.hpp"
#include "trigapprox/scenario.hpp"

using namespace trigapprox;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = TRIGAPPROX_CONFIG_DIR;
const std::string kCli = TRIGAPPROX_CLI;

int run_cli(const std::string& args) {
  const int status = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "trigapprox_tests";
  fs::create_directories(dir);
  return dir / name;
}

const char* kSingleton = R"toml(
name = "one"
[group]
kind = "integers"
size = 256
[measure]
family = "constant"
value = 1.0
[problem]
S = "explicit(0)"
s = 0
alpha = 2.0
primal_windows = [1, 2]
dual_windows = [0, 2]
)toml";

}  // namespace

// ---------------------------------------------------------------------------
// oracle

TEST(Oracle, UnitWeight) {
  const SpectralMeasure m(MatrixWeight::from_scalar_samples(GroupSpec::cyclic(8), std::vector<double>(8, 1.0)));
  for (double a : {1.5, 2.0, 3.0})
    EXPECT_NEAR(oracle_distance(m, FrequencySet::explicit_set({0}), Frequency{0}, 1, Exponents::from_alpha(a)).distance,
                1.0, 1e-12);
}

TEST(Oracle, SingletonClosedForm) {
  std::vector<double> w{1, 2, 3, 4, 4, 3, 2, 1};
  for (auto& v : w) v /= 2.5;  // mean one
  const SpectralMeasure m(MatrixWeight::from_scalar_samples(GroupSpec::cyclic(8), w));
  double inv = 0.0;
  for (double v : w) inv += 1.0 / v / 8.0;
  EXPECT_NEAR(oracle_distance(m, FrequencySet::explicit_set({0}), Frequency{0}, 1, Exponents::from_alpha(2.0)).distance,
              std::pow(inv, -0.5), 1e-13);
}

TEST(Oracle, MatrixSingleton) {
  std::mt19937_64 rng(41);
  std::vector<CMatrix> ws;
  for (int j = 0; j < 6; ++j) ws.push_back(ref::random_psd(rng, 2, 2));
  const SpectralMeasure m(MatrixWeight::from_samples(GroupSpec::cyclic(6), ws));
  CMatrix a = CMatrix::Zero(2, 2);
  for (const auto& w : ws) a += w.inverse() / 6.0;
  EXPECT_NEAR(oracle_distance(m, FrequencySet::explicit_set({0}), Frequency{0}, 2, Exponents::from_alpha(2.0)).distance,
              std::sqrt(a.inverse()(1, 1).real()), 1e-12);
}

TEST(Oracle, AgreesWithExhaustiveLeastSquares) {
  std::mt19937_64 rng(42);
  const auto w = ref::random_positive(rng, 10);
  const SpectralMeasure m(MatrixWeight::from_scalar_samples(GroupSpec::cyclic(10), w));
  const auto d = oracle_distance(m, FrequencySet::explicit_set({2, 7}), Frequency{7}, 1, Exponents::from_alpha(2.0));
  EXPECT_NEAR(d.distance, ref::cyclic_l2_distance(w, {0, 1, 3, 4, 5, 6, 8, 9}, 7), 1e-12);
}

TEST(Oracle, Limits) {
  const SpectralMeasure big(MatrixWeight::from_scalar_samples(GroupSpec::cyclic(65), std::vector<double>(65, 1.0)));
  EXPECT_THROW(oracle_distance(big, FrequencySet::explicit_set({0}), Frequency{0}, 1, Exponents::from_alpha(2.0)),
               InvalidInput);
  const SpectralMeasure circle(MatrixWeight::from_scalar_samples(GroupSpec::integers(8), std::vector<double>(8, 1.0)));
  EXPECT_THROW(oracle_distance(circle, FrequencySet::explicit_set({0}), Frequency{0}, 1, Exponents::from_alpha(2.0)),
               InvalidInput);
}

// ---------------------------------------------------------------------------
// configuration

TEST(Config, SingleScenario) {
  const auto list = config::parse(kSingleton);
  ASSERT_EQ(list.size(), 1u);
  const auto& sc = list.front();
  EXPECT_EQ(sc.name, "one");
  EXPECT_EQ(sc.group(), GroupSpec::integers(256));
  EXPECT_EQ(sc.primal_windows, (std::vector<std::int64_t>{1, 2}));
  EXPECT_EQ(sc.reduction, ReductionPolicy::Auto);
}

TEST(Config, GridOverride) {
  LoadOptions opt;
  opt.grid = 64;
  EXPECT_EQ(config::parse(kSingleton, ".", opt).front().group(), GroupSpec::integers(64));
}

TEST(Config, ShippedFilesLoad) {
  for (const auto& entry : fs::directory_iterator(kConfigs))
    if (entry.path().extension() == ".toml") EXPECT_NO_THROW(config::load(entry.path())) << entry.path();
  EXPECT_EQ(config::load(kConfigs / "singleton.toml").size(), 2u);
}

TEST(Config, Errors) {
  auto bad = [](const std::string& from, const std::string& to) {
    std::string text = kSingleton;
    text.replace(text.find(from), from.size(), to);
    return text;
  };
  EXPECT_THROW(config::parse(bad("constant", "mystery")), InvalidInput);
  EXPECT_THROW(config::parse(bad("explicit(0)", "explicit(1)")), InvalidInput);
  EXPECT_THROW(config::parse(bad("[1, 2]", "[2, 1]")), InvalidInput);
  EXPECT_THROW(config::parse(bad("alpha = 2.0", "alpha = 1.0")), InvalidInput);
  EXPECT_THROW(config::parse(bad("integers", "reals")), InvalidInput);
  EXPECT_THROW(config::parse(bad("value = 1.0", "value = 1.0\natoms = [ { node = 999, mass = 1.0 } ]")), InvalidInput);
  EXPECT_THROW(config::parse("[group\nkind = 1"), InvalidInput);
}

TEST(Config, SampleTables) {
  const auto w = scratch("w.txt");
  {
    std::ofstream out(w);
    out << "# complex 2x2 samples, row-major (re, im) pairs\n";
    for (int j = 0; j < 4; ++j) out << j << "  2 0  0.5 0.5  0.5 -0.5  1 0\n";
  }
  const auto a = scratch("atoms.txt");
  {
    std::ofstream out(a);
    out << "1  1 0 0 0\n";
  }
  const std::string text = R"(
[group]
kind = "cyclic"
size = 4
[measure]
family = "samples"
samples_file = ")" + w.filename().string() + R"("
atoms_file = ")" + a.filename().string() + R"toml("
[problem]
S = "explicit(0)"
k = 2
primal_windows = [4]
dual_windows = [4]
)toml";
  const auto sc = config::parse(text, w.parent_path()).front();
  EXPECT_EQ(sc.measure.dimension(), 2);
  EXPECT_LT(std::abs(sc.measure.ac().at(3)(0, 1) - cplx(0.5, 0.5)), 1e-15);
  ASSERT_EQ(sc.measure.singular().size(), 1u);
  EXPECT_EQ(sc.measure.singular().atoms().front().node, 1u);
  {
    std::ofstream out(w);
    out << "0 1\n1 1\n";
  }
  EXPECT_THROW(config::parse(text, w.parent_path()), InvalidInput);
}

// ---------------------------------------------------------------------------
// runs and reports

TEST(Runner, SingletonReport) {
  const auto r = run_scenario(config::parse(kSingleton).front());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NEAR(r.lower, 1.0, 1e-12);
  EXPECT_NEAR(r.upper, 1.0, 1e-12);
  ASSERT_FALSE(r.references.empty());
  EXPECT_EQ(r.references.front().name, "singleton");
  EXPECT_TRUE(r.references.front().contained);
}

TEST(Runner, SzegoSandwich) {
  const auto r = run_scenario(config::load(kConfigs / "szego.toml").front());
  ASSERT_EQ(r.exit_code, 0) << r.error;
  EXPECT_LE(r.lower, 1.0 + 1e-9);
  EXPECT_GE(r.upper, 1.0 - 1e-9);
  EXPECT_LE((r.upper - r.lower) / r.upper, 1e-3);
}

TEST(Runner, ReductionComputesBothDistances) {
  const auto r = run_scenario(config::load(kConfigs / "szego_atom.toml").front());
  ASSERT_EQ(r.exit_code, 0) << r.error;
  EXPECT_EQ(r.reduction.decision, ReductionReport::Decision::Reduced);
  ASSERT_TRUE(r.reduction.rho_full && r.reduction.rho_reduced);
  EXPECT_GE(*r.reduction.rho_full, *r.reduction.rho_reduced);
  EXPECT_LT(*r.reduction.rho_full - *r.reduction.rho_reduced, 5e-3);
}

TEST(Runner, ForcedPolicies) {
  auto sc = config::load(kConfigs / "szego_atom.toml").front();
  sc.reduction = ReductionPolicy::ForceFull;
  const auto full = run_scenario(sc);
  EXPECT_EQ(full.reduction.decision, ReductionReport::Decision::ForcedFull);
  sc.reduction = ReductionPolicy::ForceAc;
  const auto ac = run_scenario(sc);
  EXPECT_EQ(ac.reduction.decision, ReductionReport::Decision::ForcedAc);
  EXPECT_GE(full.upper, ac.upper);
}

TEST(Runner, CyclicOracleReference) {
  const auto r = run_scenario(config::load(kConfigs / "cyclic.toml").front());
  ASSERT_EQ(r.exit_code, 0) << r.error;
  const auto it = std::find_if(r.references.begin(), r.references.end(), [](const Reference& x) { return x.name == "oracle"; });
  ASSERT_NE(it, r.references.end());
  EXPECT_NEAR(it->value, r.upper, 1e-6);
  EXPECT_NEAR(it->value, r.lower, 1e-6);
}

TEST(Runner, UnsupportedMatrixAlpha) {
  const auto r = run_scenario(config::load(kConfigs / "matrix_alpha3.toml").front());
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.error.find("alpha = 2"), std::string::npos);
}

TEST(Runner, ExitCodeAggregation) {
  std::vector<ScenarioReport> reps(3);
  EXPECT_EQ(exit_code(reps), 0);
  reps[1].exit_code = 2;
  reps[2].exit_code = 1;
  EXPECT_EQ(exit_code(reps), 2);
}

TEST(Runner, ReportsAreDeterministic) {
  auto list = config::load(kConfigs / "singleton.toml");
  for (auto& s : config::load(kConfigs / "cyclic.toml")) list.push_back(std::move(s));
  const auto a = to_json(run_all(list, 1)).dump();
  const auto b = to_json(run_all(list, 3)).dump();
  EXPECT_EQ(a, b);
  const auto j = nlohmann::json::parse(a);
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["scenarios"].size(), 3u);
  EXPECT_EQ(j["scenarios"][0]["name"], "singleton-alpha2");
  EXPECT_FALSE(j["scenarios"][0].contains("timing_ms"));
  EXPECT_TRUE(j["scenarios"][0]["dual"][0].contains("certificate"));
}

TEST(Runner, CertificateInReportReverifies) {
  const auto r = run_scenario(config::load(kConfigs / "cyclic.toml").front());
  const auto j = to_json(r);
  const auto sc = config::load(kConfigs / "cyclic.toml").front();
  TrigPolynomial h;
  for (const auto& term : j["dual"][0]["certificate"])
    h.add(Frequency{term["freq"].get<std::int64_t>()}, cplx(term["coef"][0][0].get<double>(), term["coef"][0][1].get<double>()));
  const auto v = dual_value_scalar(h, sc.measure, sc.S, sc.s, sc.exponents());
  EXPECT_NEAR(v.bound, r.dual[0].bound, 1e-12);
}

// ---------------------------------------------------------------------------
// command line

TEST(Cli, ExitCodes) {
  const auto report = scratch("report.json");
  EXPECT_EQ(run_cli("run " + (kConfigs / "singleton.toml").string() + " --report " + report.string()), 0);
  EXPECT_TRUE(fs::exists(report));
  EXPECT_EQ(run_cli("run " + (kConfigs / "matrix_alpha3.toml").string()), 1);
  EXPECT_EQ(run_cli("run " + scratch("missing.toml").string()), 1);
  EXPECT_EQ(run_cli("oracle " + (kConfigs / "cyclic.toml").string()), 0);
  EXPECT_EQ(run_cli("sweep " + (kConfigs / "singleton.toml").string() + " --windows 1,2,4 --jobs 2"), 0);
  EXPECT_EQ(run_cli("sweep " + (kConfigs / "singleton.toml").string() + " --windows 4,2"), 1);
}

TEST(Cli, ReportFileIsByteIdenticalAcrossRuns) {
  const auto a = scratch("a.json"), b = scratch("b.json");
  ASSERT_EQ(run_cli("run " + (kConfigs / "szego_atom.toml").string() + " --report " + a.string()), 0);
  ASSERT_EQ(run_cli("run " + (kConfigs / "szego_atom.toml").string() + " --report " + b.string()), 0);
  std::ifstream fa(a), fb(b);
  const std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
  EXPECT_FALSE(sa.empty());
  EXPECT_EQ(sa, sb);
}
