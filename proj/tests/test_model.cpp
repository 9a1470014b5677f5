#include "narx/error.hpp"
#include "narx/model.hpp"
#include "narx/synthetic.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace narx;

namespace {

std::set<Term> term_set(const std::vector<Term>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("identify recovers the synthetic system") {
  const auto sys = make_narx_fixture(5);
  const auto model = identify(sys.data, narx_fixture_spec(), SelectionConfig{}, {500, 0});
  CHECK(term_set(model.terms) == term_set(sys.true_terms));
  CHECK(model.terms.size() == model.parameters.size());
  CHECK(model.terms.size() == model.err.size());
  CHECK(model.terms.size() == model.p_values.size());
  CHECK(model.training.n_eff == 499);
  CHECK(model.output == "y");
  CHECK(model.autoregressive());
  CHECK(model.max_lag() == 1);
  CHECK(model.horizon_days() == 1);
  for (std::size_t k = 1; k < model.err.size(); ++k) CHECK(model.err[k - 1] >= model.err[k]);
}

TEST_CASE("noise-free data gives one candidate from every fold") {
  const auto sys = make_narx_fixture(8, 500, 0.0);
  const auto model = identify(sys.data, narx_fixture_spec(), SelectionConfig{}, {500, 0});
  CHECK(model.fold_candidates.size() == 1);
  CHECK(term_set(model.terms) == term_set(sys.true_terms));
}

TEST_CASE("identify uses only the training rows") {
  const auto sys = make_eq6_fixture(2);
  const auto a = identify(sys.data, eq6_fixture_spec(), SelectionConfig{}, {361, 168});
  const auto b = identify(sys.data.slice(0, 361), eq6_fixture_spec(), SelectionConfig{}, {361, 0});
  CHECK(a.terms == b.terms);
  CHECK(a.parameters == b.parameters);
  CHECK(a.training.n_eff == 361 - 42);
}

TEST_CASE("refitted parameters are least squares on the chosen terms") {
  const auto sys = make_eq6_fixture(3);
  const auto model = identify(sys.data, eq6_fixture_spec(), SelectionConfig{}, {361, 168});
  const Dataset train = sys.data.slice(0, 361);
  const auto problem = evaluate(Dictionary(model.terms, eq6_fixture_spec()), train);
  const auto full = evaluate(build_dictionary(eq6_fixture_spec()), train);
  // Re-evaluate on the rows of the full dictionary so both fits see the same t.
  const auto offset = static_cast<Eigen::Index>(full.first_valid_t - problem.first_valid_t);
  const Eigen::MatrixXd a = problem.columns.bottomRows(problem.rows() - offset);
  const Eigen::VectorXd y = problem.target.tail(problem.rows() - offset);
  const Eigen::VectorXd oracle = oracle::normal_equations(a, y);
  for (std::size_t k = 0; k < model.parameters.size(); ++k) {
    CHECK(model.parameters[k] == doctest::Approx(oracle(static_cast<Eigen::Index>(k))).epsilon(1e-8));
  }
}

TEST_CASE("cross-validation can be switched off") {
  const auto sys = make_narx_fixture(6);
  SelectionConfig c;
  c.folds = 0;
  const auto model = identify(sys.data, narx_fixture_spec(), c, {500, 0});
  CHECK(model.fold_candidates.empty());
  CHECK(term_set(model.terms) == term_set(sys.true_terms));
  c.size_criterion = SizeCriterion::fixed;
  c.max_terms = 5;
  CHECK(identify(sys.data, narx_fixture_spec(), c, {500, 0}).size() == 5);
}

TEST_CASE("identify rejects bad inputs") {
  const auto sys = make_narx_fixture(1, 60);
  CHECK_THROWS_AS((void)identify(sys.data, narx_fixture_spec(), SelectionConfig{}, {61, 0}), Error);
  LagSpec s = narx_fixture_spec();
  s.variables.push_back({"w", 1, 1});
  CHECK_THROWS_AS((void)identify(sys.data, s, SelectionConfig{}, {60, 0}), DataError);
}

TEST_CASE("model report layout") {
  IdentifiedModel m;
  m.terms = {Term({{"u", 12}, {"y", 12}}), Term{}};
  m.parameters = {11.674, -0.5};
  m.err = {0.819265, 0.01};
  m.p_values = {0.0, 0.0123};
  std::ostringstream csv;
  write_model_csv(m, csv);
  CHECK(csv.str() ==
        "Index,Model Term,Parameter,ERR(100%),P-value\n"
        "1,u(t-12)*y(t-12),1.1674e+01,81.9265,0\n"
        "2,const,-5.0000e-01,1.0000,1.2300e-02\n");
  std::ostringstream table;
  write_model_table(m, table);
  CHECK(table.str().find("u(t-12)*y(t-12)") != std::string::npos);
  CHECK(table.str().find("81.9265") != std::string::npos);
  CHECK(format_scientific(0.0) == "0");
  CHECK(format_scientific(-6.2117e3) == "-6.2117e+03");
}
