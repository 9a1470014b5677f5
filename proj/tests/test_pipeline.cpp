#include "narx/epi.hpp"
#include "narx/error.hpp"
#include "narx/pipeline.hpp"
#include "narx/verify.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

using namespace narx;
namespace fs = std::filesystem;

namespace {

const fs::path kTmp = NARX_TEST_TMP;

// A year and a half of daily counts from a SEIR run with slowly varying
// transmission and a weekly reporting cycle.
fs::path write_epidemic_csv(const fs::path& dir) {
  fs::create_directories(dir);
  SEIRParams p;
  p.population = 67e6;
  std::vector<double> beta;
  for (int d = 0; d < 600; ++d) beta.push_back(0.06 + 0.035 * std::pow(std::sin(d / 45.0), 2) + 0.005 * std::cos(d / 9.0));
  p.beta = DailyRate(beta);
  p.lethality = 0.0015;
  const auto run = seir_integrate(p, {0, 67e6 - 5000, 2000, 3000, 0, 0}, 560);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  const fs::path path = dir / "uk.csv";
  std::ofstream out(path);
  out << "date,new_cases,new_deaths\n";
  const Date start = Date::parse("2020-01-22");
  for (std::size_t t = 1; t < run.size(); ++t) {
    const double weekly = 1.0 + 0.15 * std::sin(2.0 * M_PI * static_cast<double>(t) / 7.0);
    const double cases = std::round(p.delta * run[t].E * weekly * (1.0 + 0.03 * normal(rng)));
    const double deaths = std::round((run[t].D - run[t - 1].D) * (1.0 + 0.05 * normal(rng)));
    out << (start + static_cast<std::ptrdiff_t>(t)).iso() << ',' << cases << ',' << deaths << '\n';
  }
  return path;
}

PipelineConfig parse_text(const std::string& text, const fs::path& base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("default case studies") {
  const PipelineConfig c;
  CHECK_NOTHROW(c.validate());
  REQUIRE(c.cases.size() == 3);
  CHECK(expected_dictionary_size(c.cases.at("cs1").lag_spec()) == 43);
  CHECK(expected_dictionary_size(c.cases.at("cs2").lag_spec()) == 2016);
  const auto cs3 = c.cases.at("cs3");
  CHECK(cs3.symbols() == std::vector<std::string>{"u_1", "u_2"});
  CHECK(cs3.lag_spec().variables.size() == 2);
  CHECK(c.split.train_len == 361);
  CHECK(c.split.test_len == 168);
}

TEST_CASE("config round trip is lossless") {
  PipelineConfig c;
  c.data_path = "/data/uk.csv";
  c.population = 66'796'807.5;
  c.selection.apress_alpha = 4.0 / 3.0;
  c.selection.size_criterion = SizeCriterion::bic;
  c.selection.orthogonalization = Orthogonalization::incremental;
  c.fill = FillPolicy::forward;
  c.cumulative = true;
  c.seir.beta = 0.1 + 0.2;
  c.cases.at("cs3").input_symbols = {"r", "c"};
  c.output_dir = "/tmp/reports";
  std::ostringstream out;
  write_config(c, out);
  const PipelineConfig back = parse_text(out.str());
  CHECK(back == c);
  std::ostringstream again;
  write_config(back, again);
  CHECK(again.str() == out.str());
}

TEST_CASE("config rejects unknown keys and bad values") {
  CHECK_THROWS_AS((void)parse_text("[selection]\nmax_term = 3\n"), ValidationError);
  CHECK_THROWS_AS((void)parse_text("[selektion]\nmax_terms = 3\n"), ValidationError);
  CHECK_THROWS_AS((void)parse_text("stray = 1\n"), ValidationError);
  CHECK_THROWS_AS((void)parse_text("[selection]\nmax_terms = 0\n"), ValidationError);
  CHECK_THROWS_AS((void)parse_text("[selection]\nmax_terms = three\n"), ValidationError);
  CHECK_THROWS_AS((void)parse_text("[selection]\ncriterion = mdl\n"), ValidationError);
  CHECK_THROWS_AS((void)parse_text("[data]\ncumulative = yes\n"), ValidationError);
  CHECK_THROWS_AS((void)parse_text("[cs1]\ninputs = rn, cases\noutput = cases\n"), ValidationError);
  CHECK_THROWS_AS((void)parse_text("[epi]\nsmoothing_window = 4\n"), ValidationError);
  CHECK_THROWS_AS((void)load_config(kTmp / "missing.ini"), DataError);
}

TEST_CASE("config values and relative paths") {
  const auto c = parse_text(
      "; comment\n[data]\npath = data/uk.csv\n[selection]\nmax_terms = 12\ncriterion = gcv\n"
      "[cs1]\ndegree = 2\ninput_max_lag = 30\n[output]\ndir = reports\n",
      "/base");
  CHECK(c.data_path == fs::path("/base/data/uk.csv"));
  CHECK(c.output_dir == fs::path("/base/reports"));
  CHECK(c.selection.max_terms == 12);
  CHECK(c.selection.size_criterion == SizeCriterion::gcv);
  CHECK(c.cases.at("cs1").degree == 2);
  CHECK(c.cases.at("cs1").input_max_lag == 30);
  CHECK(c.cases.at("cs2") == PipelineConfig::default_cases().at("cs2"));
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("case studies write re-readable, deterministic reports") {
  const fs::path dir = kTmp / "cases";
  fs::remove_all(dir);
  PipelineConfig c;
  c.data_path = write_epidemic_csv(dir);
  c.cases_column = "new_cases";
  c.deaths_column = "new_deaths";

  const auto result = run_case_study(c, "cs3", dir / "a");
  CHECK(result.model.size() >= 1);
  CHECK(result.model.horizon_days() >= 12);
  CHECK(result.r2_train > 0.5);
  CHECK(std::isfinite(result.r2_test));
  for (const char* name : {"model.csv", "model.txt", "predictions.csv", "trace.csv", "summary.txt", "residuals.txt"}) {
    CHECK(fs::exists(dir / "a" / "cs3" / name));
  }
  const auto model = read_csv_table(dir / "a" / "cs3" / "model.csv");
  CHECK(model.header == std::vector<std::string>{"Index", "Model Term", "Parameter", "ERR(100%)", "P-value"});
  CHECK(model.rows.size() == result.model.size());
  CHECK(Term::parse(model.rows[0][1]) == result.model.terms[0]);

  CsvSchema schema;
  schema.columns = {{"actual", Role::output}, {"predicted", Role::input}};
  const Dataset pred = ingest_csv(dir / "a" / "cs3" / "predictions.csv", schema);
  CHECK(pred.size() == result.run.predictions.size());
  CHECK(pred.at("predicted").values()[5] == result.run.predictions[5]);
  const auto trace = read_csv_table(dir / "a" / "cs3" / "trace.csv");
  CHECK(trace.rows.size() == result.model.search.size());

  const std::string header = slurp(dir / "a" / "cs3" / "summary.txt");
  CHECK(header.rfind("# narx 1.0.0\n", 0) == 0);
  CHECK(header.find("data_sha256: " + sha256_hex(slurp(c.data_path))) != std::string::npos);

  (void)run_case_study(c, "cs3", dir / "b");
  for (const char* name : {"model.csv", "model.txt", "predictions.csv", "trace.csv", "summary.txt", "residuals.txt"}) {
    CHECK(slurp(dir / "a" / "cs3" / name) == slurp(dir / "b" / "cs3" / name));
  }
}

TEST_CASE("R number derivation and SEIR export") {
  const fs::path dir = kTmp / "rn";
  fs::remove_all(dir);
  PipelineConfig c;
  c.data_path = write_epidemic_csv(dir);
  c.cases_column = "new_cases";
  c.deaths_column = "new_deaths";
  const auto rn_path = derive_rn(c, dir / "out");
  const auto rn = read_csv_table(rn_path);
  CHECK(rn.header == std::vector<std::string>{"date", "beta", "r", "rn"});
  CHECK(rn.rows.size() == 560);
  for (const auto& row : rn.rows) CHECK(std::stod(row[3]) >= 0.0);

  const auto data = load_epidemic_data(c);
  CHECK(data.contains("rn"));
  CHECK(data.size() == 560);

  c.seir.days = 50;
  const auto seir_path = simulate_seir(c, dir / "out");
  const auto seir = read_csv_table(seir_path);
  CHECK(seir.header == std::vector<std::string>{"date", "S", "E", "I", "R", "D"});
  CHECK(seir.rows.size() == 51);
  CHECK(seir.rows[0][0] == "2020-03-04");
}

TEST_CASE("failures name their stage and keep their type") {
  PipelineConfig c;
  c.data_path = kTmp / "nowhere.csv";
  try {
    (void)run_case_study(c, "cs1", kTmp / "x");
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).rfind("ingest:", 0) == 0);
    CHECK(std::string(e.what()).find("nowhere.csv") != std::string::npos);
  }
  CHECK_THROWS_AS((void)run_case_study(c, "cs9", kTmp / "x"), ValidationError);
}

TEST_CASE("verification report") {
  const auto a = run_synthetic_suite(0);
  CHECK(a.passed());
  CHECK(a.checks.size() == 9);
  CHECK(a.text() == run_synthetic_suite(0).text());
  CHECK(a.text() != run_synthetic_suite(1).text());
}
