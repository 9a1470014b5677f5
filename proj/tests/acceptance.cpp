// Acceptance suite: one PASS/FAIL/SKIP line per criterion, nonzero exit on
// any FAIL.

#include "narx/dictionary.hpp"
#include "narx/epi.hpp"
#include "narx/frols.hpp"
#include "narx/model.hpp"
#include "narx/pipeline.hpp"
#include "narx/synthetic.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace narx;

namespace {

struct Outcome {
  enum Kind { pass, fail, skip } kind = fail;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome timed(double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o = body();
  const double s = seconds_since(t0);
  if (o.kind == Outcome::pass && s >= limit_s) {
    o.kind = Outcome::fail;
    o.detail += fmt("; took %.3f s, limit %.0f s", s, limit_s);
  } else {
    o.detail += fmt("; %.3f s", s);
  }
  return o;
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

Outcome dictionary_exactness() {
  const LagSpec spec = narx_fixture_spec();
  const auto t0 = Clock::now();
  const Dictionary d = build_dictionary(spec);
  const double ms = seconds_since(t0) * 1e3;
  const std::vector<Term> expected{
      Term({{"y", 1}}),
      Term({{"u", 1}}),
      Term({{"y", 1}, {"y", 1}}),
      Term({{"y", 1}, {"u", 1}}),
      Term({{"u", 1}, {"u", 1}}),
      Term({{"y", 1}, {"y", 1}, {"y", 1}}),
      Term({{"y", 1}, {"y", 1}, {"u", 1}}),
      Term({{"y", 1}, {"u", 1}, {"u", 1}}),
      Term({{"u", 1}, {"u", 1}, {"u", 1}}),
  };
  const bool exact = d.terms() == expected;
  return verdict(exact && ms < 1.0, std::string(exact ? "9 terms in the expected order" : "term list differs") +
                                        fmt(", built in %.4f ms", ms));
}

Outcome energy_identity() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> rows(20, 500), cols(1, 100);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = rows(rng);
    const auto p = random_regression_problem(rng, n, std::min(cols(rng), n - 1));
    SelectionConfig c;
    c.max_terms = static_cast<std::size_t>(p.cols());
    const auto trace = frols_select(p, c);
    double explained = 0.0;
    for (std::size_t m = 0; m < trace.size(); ++m) {
      const Eigen::VectorXd q = trace.Q.col(static_cast<Eigen::Index>(m));
      explained += std::pow(p.target.dot(q), 2) / q.squaredNorm();
    }
    const double yy = p.target.squaredNorm();
    worst = std::max(worst, std::abs(yy - explained - trace.steps.back().residual_energy) / yy);
  }
  return verdict(worst <= 1e-10, fmt("200 problems, max relative gap %.3e", worst));
}

Outcome ols_equivalence() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> rows(60, 500), cols(2, 50);
  std::uniform_int_distribution<std::size_t> take(1, 20);
  double worst_theta = 0.0, worst_rss = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto p = random_regression_problem(rng, rows(rng), cols(rng));
    SelectionConfig c;
    c.max_terms = std::min<std::size_t>(take(rng), static_cast<std::size_t>(p.cols()));
    const auto trace = frols_select(p, c);
    std::vector<Eigen::Index> idx;
    for (auto i : trace.indices()) idx.push_back(static_cast<Eigen::Index>(i));
    const Eigen::VectorXd oracle = oracle::normal_equations(oracle::columns(p.columns, idx), p.target);
    const Eigen::VectorXd theta = estimate_parameters(trace);
    worst_theta = std::max(worst_theta, (theta - oracle).norm() / oracle.norm());

    c.max_terms = static_cast<std::size_t>(p.cols());
    const auto all = frols_select(p, c);
    const double rss = oracle::residual_energy(p.columns, p.target);
    worst_rss = std::max(worst_rss, std::abs(all.steps.back().residual_energy - rss) / rss);
  }
  return verdict(worst_theta <= 1e-8 && worst_rss <= 1e-8,
                 fmt("50 problems, parameter gap %.3e, full-fit residual gap %.3e", worst_theta, worst_rss));
}

bool recovered(const IdentifiedModel& model, const SyntheticSystem& sys, double tol, double& worst) {
  if (std::set<Term>(model.terms.begin(), model.terms.end()) !=
      std::set<Term>(sys.true_terms.begin(), sys.true_terms.end())) {
    return false;
  }
  double w = 0.0;
  for (std::size_t i = 0; i < sys.true_terms.size(); ++i) {
    const auto it = std::find(model.terms.begin(), model.terms.end(), sys.true_terms[i]);
    const double est = model.parameters[static_cast<std::size_t>(it - model.terms.begin())];
    w = std::max(w, std::abs(est - sys.true_parameters[i]) / std::abs(sys.true_parameters[i]));
  }
  worst = std::max(worst, w);
  return w <= tol;
}

Outcome term_recovery() {
  int ok = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto sys = make_narx_fixture(seed, 500, 0.01);
    const auto model = identify(sys.data, narx_fixture_spec(), SelectionConfig{}, {500, 0});
    ok += recovered(model, sys, 0.05, worst) ? 1 : 0;
  }
  return verdict(ok >= 95, fmt("%.0f/100 seeds recovered, worst parameter error %.2f%%", ok, 100.0 * worst));
}

Outcome greedy_optimality() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> cols(2, 50);
  std::size_t steps = 0, violations = 0;
  double margin = INFINITY;
  for (int k = 0; k < 40; ++k) {
    const auto p = random_regression_problem(rng, 200, cols(rng));
    SelectionConfig c;
    c.max_terms = 12;
    const auto trace = frols_select(p, c);
    std::vector<Eigen::Index> chosen;
    for (const auto& s : trace.steps) {
      const double best = oracle::best_rescan_err(p.columns, p.target, chosen, c.collinearity_tol);
      margin = std::min(margin, s.err - best);
      if (s.err < best - 1e-12) ++violations;
      chosen.push_back(static_cast<Eigen::Index>(s.index));
      ++steps;
    }
  }
  return verdict(violations == 0,
                 fmt("%.0f steps rescanned, %.0f violations, smallest margin %.3e", static_cast<double>(steps),
                     static_cast<double>(violations), margin));
}

Outcome seir_conservation() {
  SEIRParams p;
  p.population = 67e6;
  p.beta = 0.3;
  p.lethality = 0.001;
  const auto run = seir_integrate(p, {0, 67e6 - 100, 0, 100, 0, 0}, 500, 0.1);
  double drift = 0.0;
  for (const auto& s : run) drift = std::max(drift, std::abs(s.total() - p.population) / p.population);
  p.beta = 0.0;
  bool constant = true;
  for (const auto& s : seir_integrate(p, {0, 67e6, 0, 0, 0, 0}, 500, 0.1)) {
    constant = constant && s.S == 67e6 && s.E == 0 && s.I == 0 && s.R == 0 && s.D == 0;
  }
  return verdict(drift <= 1e-9 && constant,
                 fmt("max |S+E+I+R+D-N|/N = %.3e, disease-free state exactly constant: %.0f", drift, constant));
}

Outcome rate_recovery() {
  SEIRParams p;
  p.population = 1e6;
  p.beta = 0.3;
  p.lethality = 0.001;
  const auto run = seir_integrate(p, {0, 1e6 - 100, 0, 100, 0, 0}, 150, 0.1);
  std::vector<double> i, d;
  for (const auto& s : run) {
    i.push_back(s.I);
    d.push_back(s.D);
  }
  const Date start = Date::parse("2020-03-04");
  RateOptions o;
  o.population = p.population;
  const auto rates = estimate_rates(TimeSeries("I", start, i), TimeSeries("D", start, d), o);
  double wb = 0.0, wr = 0.0;
  for (std::size_t t = 10; t + 10 < rates.beta.size(); ++t) {
    wb = std::max(wb, std::abs(rates.beta[t] / 0.3 - 1.0));
    wr = std::max(wr, std::abs(rates.lethality[t] / 0.001 - 1.0));
  }
  return verdict(wb <= 0.02 && wr <= 0.02,
                 fmt("days 10..140: max beta error %.3f%%, max r error %.3f%%", 100 * wb, 100 * wr));
}

Outcome rn_formula() {
  const double n = 67e6;
  const double a = reproduction_number(0.3, n, 0.001, 1.0 / 14.0, n);
  const double gap = std::abs(a - 0.3 / (0.001 + 1.0 / 14.0));
  const bool basic = reproduction_number(0.3, n, 0.0, 1.0 / 14.0, n) == 0.3 / (1.0 / 14.0);
  return verdict(gap <= 1e-12 && basic, fmt("RN = %.12f (gap %.1e), beta/gamma exact: %.0f", a, gap, basic));
}

Outcome lagged_fixture() {
  int ok = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto sys = make_eq6_fixture(seed, 529, 0.01);
    const auto model = identify(sys.data, eq6_fixture_spec(), SelectionConfig{}, {361, 168});
    ok += recovered(model, sys, 0.05, worst) ? 1 : 0;
  }
  return verdict(ok == 20, fmt("%.0f/20 seeds give {u(t-12), u(t-40), const}, worst coefficient error %.2f%%", ok,
                               100.0 * worst));
}

Outcome case_study_reproduction() {
  const char* path = std::getenv("NARX_UK_DATA");
  if (!path) return {Outcome::skip, "not gating; set NARX_UK_DATA to a UK daily cases/deaths CSV to run"};
  PipelineConfig c;
  if (const char* cfg = std::getenv("NARX_UK_CONFIG")) c = load_config(cfg);
  c.data_path = path;
  const auto out = std::filesystem::path(NARX_TEST_TMP) / "uk";
  const auto cs2 = run_case_study(c, "cs2", out);
  const auto cs3 = run_case_study(c, "cs3", out);
  std::ostringstream s;
  s << "not gating; cs2 R2 train " << cs2.r2_train << " vs 0.8991, test " << cs2.r2_test << " vs 0.8544; cs3 top term "
    << (cs3.model.terms.empty() ? "none" : cs3.model.terms[0].to_string()) << " vs u_2(t-13)";
  return {Outcome::skip, s.str()};
}

Outcome determinism() {
  const auto dir = std::filesystem::path(NARX_TEST_TMP);
  std::filesystem::create_directories(dir);
  std::string reports[2];
  for (int k = 0; k < 2; ++k) {
    const auto file = dir / ("verify_seed7_" + std::to_string(k) + ".txt");
    const std::string cmd = std::string("\"") + NARX_CLI + "\" verify --seed 7 --out \"" + file.string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {Outcome::fail, "verify --seed 7 exited nonzero"};
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    reports[k] = ss.str();
  }
  return verdict(!reports[0].empty() && reports[0] == reports[1],
                 fmt("two CLI runs, %.0f bytes each, identical: %.0f", static_cast<double>(reports[0].size()),
                     reports[0] == reports[1]));
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "dictionary exactness", 1.0, dictionary_exactness},
      {2, "energy identity", 10.0, energy_identity},
      {3, "least-squares oracle equivalence", 10.0, ols_equivalence},
      {4, "term recovery", 30.0, term_recovery},
      {5, "greedy optimality", 10.0, greedy_optimality},
      {6, "SEIR conservation", 1.0, seir_conservation},
      {7, "closed-loop rate recovery", 1.0, rate_recovery},
      {8, "reproduction number formula", 1.0, rn_formula},
      {9, "lagged R-number model self-consistency", 30.0, lagged_fixture},
      {10, "UK case-study comparison", 600.0, case_study_reproduction},
      {11, "verify determinism", 60.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = timed(c.limit_s, c.run);
    } catch (const std::exception& e) {
      o = {Outcome::fail, std::string("error: ") + e.what()};
    }
    const char* tag = o.kind == Outcome::pass ? "PASS" : o.kind == Outcome::skip ? "SKIP" : "FAIL";
    std::printf("%s %2d %s: %s\n", tag, c.id, c.name, o.detail.c_str());
    failed += o.kind == Outcome::fail ? 1 : 0;
  }
  std::printf("%d criterion(s) failed\n", failed);
  return failed == 0 ? 0 : 1;
}
