#include "narx/verify.hpp"

#include "narx/dictionary.hpp"
#include "narx/epi.hpp"
#include "narx/error.hpp"
#include "narx/frols.hpp"
#include "narx/model.hpp"
#include "narx/synthetic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace narx {

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string VerificationReport::text() const {
  std::ostringstream out;
  out << "narx verification, seed " << seed << '\n';
  for (const auto& c : checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  std::size_t failed = 0;
  for (const auto& c : checks) failed += c.passed ? 0 : 1;
  out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
  return out.str();
}

namespace {

std::string format(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

VerificationCheck check_dictionary() {
  const std::vector<std::string> expected{"y(t-1)",        "u(t-1)",          "y^2(t-1)",
                                          "u(t-1)*y(t-1)", "u^2(t-1)",        "y^3(t-1)",
                                          "u(t-1)*y^2(t-1)", "u^2(t-1)*y(t-1)", "u^3(t-1)"};
  const Dictionary dict = build_dictionary(narx_fixture_spec());
  std::vector<std::string> got;
  for (const auto& t : dict.terms()) got.push_back(t.to_string());
  return {"dictionary", got == expected, format("%zu terms, expected %zu in fixed order", got.size(), expected.size())};
}

VerificationCheck check_energy_identity(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> rows(60, 300);
  std::uniform_int_distribution<std::size_t> cols(2, 40);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto p = random_regression_problem(rng, rows(rng), cols(rng));
    SelectionConfig config;
    config.max_terms = static_cast<std::size_t>(p.columns.cols());
    const auto trace = frols_select(p, config);
    double explained = 0.0;
    for (std::size_t m = 0; m < trace.size(); ++m) {
      const auto q = trace.Q.col(static_cast<Eigen::Index>(m));
      explained += std::pow(p.target.dot(q), 2) / q.squaredNorm();
    }
    const double yy = p.target.squaredNorm();
    worst = std::max(worst, std::abs(yy - explained - trace.steps.back().residual_energy) / yy);
  }
  return {"energy identity", worst <= 1e-10, format("max relative gap %.3e over 20 problems", worst)};
}

VerificationCheck check_least_squares(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> rows(60, 300);
  std::uniform_int_distribution<std::size_t> cols(2, 30);
  double worst_theta = 0.0;
  double worst_rss = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto p = random_regression_problem(rng, rows(rng), cols(rng));
    SelectionConfig config;
    config.max_terms = static_cast<std::size_t>(p.columns.cols());
    const auto trace = frols_select(p, config);
    const auto idx = trace.indices();
    Eigen::MatrixXd a(p.columns.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) a.col(static_cast<Eigen::Index>(j)) = p.columns.col(static_cast<Eigen::Index>(idx[j]));
    const Eigen::VectorXd oracle = (a.transpose() * a).ldlt().solve(a.transpose() * p.target);
    const Eigen::VectorXd theta = estimate_parameters(trace);
    worst_theta = std::max(worst_theta, (theta - oracle).norm() / oracle.norm());
    const double rss = (p.target - p.columns * p.columns.colPivHouseholderQr().solve(p.target)).squaredNorm();
    worst_rss = std::max(worst_rss, rel(trace.steps.back().residual_energy, rss));
  }
  return {"least squares", worst_theta <= 1e-8 && worst_rss <= 1e-8,
          format("parameter gap %.3e, residual gap %.3e over 10 problems", worst_theta, worst_rss)};
}

VerificationCheck check_greedy(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> cols(3, 30);
  std::size_t violations = 0;
  std::size_t steps = 0;
  for (int k = 0; k < 5; ++k) {
    const auto p = random_regression_problem(rng, 120, cols(rng));
    SelectionConfig config;
    config.max_terms = 8;
    const auto trace = frols_select(p, config);
    std::vector<Eigen::Index> chosen;
    for (const auto& step : trace.steps) {
      Eigen::MatrixXd basis(p.columns.rows(), static_cast<Eigen::Index>(chosen.size()));
      for (std::size_t j = 0; j < chosen.size(); ++j) basis.col(static_cast<Eigen::Index>(j)) = p.columns.col(chosen[j]);
      const Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
      const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(basis.rows(), basis.cols());
      double best = 0.0;
      for (Eigen::Index j = 0; j < p.columns.cols(); ++j) {
        if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
        Eigen::VectorXd w = p.columns.col(j);
        if (basis.cols() > 0) w -= q * (q.transpose() * w);
        if (w.squaredNorm() <= config.collinearity_tol * p.columns.col(j).squaredNorm()) continue;
        best = std::max(best, squared_correlation(p.target, w));
      }
      if (step.err < best - 1e-10) ++violations;
      chosen.push_back(static_cast<Eigen::Index>(step.index));
      ++steps;
    }
  }
  return {"greedy optimality", violations == 0, format("%zu of %zu steps beaten by a rescan", violations, steps)};
}

bool same_terms(const std::vector<Term>& a, const std::vector<Term>& b) {
  return std::set<Term>(a.begin(), a.end()) == std::set<Term>(b.begin(), b.end());
}

double worst_parameter_error(const IdentifiedModel& model, const SyntheticSystem& sys) {
  double worst = 0.0;
  for (std::size_t i = 0; i < sys.true_terms.size(); ++i) {
    const auto it = std::find(model.terms.begin(), model.terms.end(), sys.true_terms[i]);
    if (it == model.terms.end()) return INFINITY;
    worst = std::max(worst, rel(model.parameters[static_cast<std::size_t>(it - model.terms.begin())],
                                sys.true_parameters[i]));
  }
  return worst;
}

std::string term_list(const IdentifiedModel& model) {
  std::string out;
  for (const auto& t : model.terms) out += (out.empty() ? "" : " ") + t.to_string();
  return out;
}

VerificationCheck check_recovery(std::uint64_t seed) {
  const auto sys = make_narx_fixture(seed);
  const auto model = identify(sys.data, narx_fixture_spec(), SelectionConfig{}, {sys.data.size(), 0});
  const double err = worst_parameter_error(model, sys);
  return {"term recovery", same_terms(model.terms, sys.true_terms) && err <= 0.05,
          format("terms {%s}, parameter error %.3e", term_list(model).c_str(), err)};
}

VerificationCheck check_lagged_fixture(std::uint64_t seed) {
  const auto sys = make_eq6_fixture(seed);
  const auto model = identify(sys.data, eq6_fixture_spec(), SelectionConfig{}, {361, 168});
  const double err = worst_parameter_error(model, sys);
  return {"lagged R-number fixture", same_terms(model.terms, sys.true_terms) && err <= 0.05,
          format("terms {%s}, parameter error %.3e", term_list(model).c_str(), err)};
}

VerificationCheck check_conservation() {
  SEIRParams params;
  params.population = 1e6;
  params.beta = 0.3;
  params.lethality = 0.001;
  const SEIRState start{0.0, 1e6 - 100.0, 0.0, 100.0, 0.0, 0.0};
  const auto run = seir_integrate(params, start, 500, 0.1);
  double drift = 0.0;
  for (const auto& s : run) drift = std::max(drift, std::abs(s.total() - params.population));

  SEIRParams still = params;
  still.beta = 0.0;
  const SEIRState free{0.0, 1e6, 0.0, 0.0, 0.0, 0.0};
  bool constant = true;
  for (const auto& s : seir_integrate(still, free, 500, 0.1)) {
    constant = constant && s.S == 1e6 && s.E == 0.0 && s.I == 0.0 && s.R == 0.0 && s.D == 0.0;
  }
  return {"SEIR conservation", drift <= 1e-9 * params.population && constant,
          format("max drift %.3e persons, disease-free state %s", drift, constant ? "constant" : "moved")};
}

VerificationCheck check_rates() {
  SEIRParams params;
  params.population = 1e6;
  params.beta = 0.3;
  params.lethality = 0.001;
  const auto run = seir_integrate(params, {0.0, 1e6 - 100.0, 0.0, 100.0, 0.0, 0.0}, 120, 0.1);
  std::vector<double> active;
  std::vector<double> deaths;
  for (const auto& s : run) {
    active.push_back(s.I);
    deaths.push_back(s.D);
  }
  const Date start = Date::parse("2020-03-04");
  RateOptions options;
  options.population = params.population;
  const auto rates = estimate_rates(TimeSeries("I", start, active), TimeSeries("D", start, deaths), options);
  double worst_beta = 0.0;
  double worst_r = 0.0;
  for (std::size_t t = 10; t + 10 < rates.beta.size(); ++t) {
    worst_beta = std::max(worst_beta, rel(rates.beta[t], 0.3));
    worst_r = std::max(worst_r, rel(rates.lethality[t], 0.001));
  }
  return {"rate recovery", worst_beta <= 0.02 && worst_r <= 0.02,
          format("interior error beta %.3e, r %.3e", worst_beta, worst_r)};
}

VerificationCheck check_reproduction_number() {
  const double n = 1e6;
  const double got = reproduction_number(0.3, n, 0.001, 1.0 / 14.0, n);
  const double want = 0.3 / (0.001 + 1.0 / 14.0);
  const bool basic = reproduction_number(0.3, n, 0.0, 1.0 / 14.0, n) == 0.3 / (1.0 / 14.0);
  return {"reproduction number", std::abs(got - want) <= 1e-12 && basic,
          format("RN %.12f, S = N and r = 0 gives beta/gamma %s", got, basic ? "exactly" : "inexactly")};
}

VerificationCheck guarded(const char* name, const std::function<VerificationCheck()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, std::string("error: ") + e.what()};
  }
}

}  // namespace

VerificationReport run_synthetic_suite(std::uint64_t seed) {
  VerificationReport report;
  report.seed = seed;
  std::mt19937_64 rng(seed);
  report.checks.push_back(guarded("dictionary", check_dictionary));
  report.checks.push_back(guarded("energy identity", [&] { return check_energy_identity(rng); }));
  report.checks.push_back(guarded("least squares", [&] { return check_least_squares(rng); }));
  report.checks.push_back(guarded("term recovery", [&] { return check_recovery(seed); }));
  report.checks.push_back(guarded("greedy optimality", [&] { return check_greedy(rng); }));
  report.checks.push_back(guarded("SEIR conservation", check_conservation));
  report.checks.push_back(guarded("rate recovery", check_rates));
  report.checks.push_back(guarded("reproduction number", check_reproduction_number));
  report.checks.push_back(guarded("lagged R-number fixture", [&] { return check_lagged_fixture(seed); }));
  return report;
}

}  // namespace narx
