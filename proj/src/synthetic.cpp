#include "narx/synthetic.hpp"

#include <cmath>
#include <numeric>

namespace narx {

namespace {

double stddev(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

const Date kFixtureStart = Date::parse("2020-03-04");

}  // namespace

SyntheticSystem make_narx_fixture(std::uint64_t seed, std::size_t length, double noise_fraction) {
  constexpr std::size_t burn_in = 100;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t total = length + burn_in;
  std::vector<double> u(total);
  std::vector<double> e(total);
  for (std::size_t t = 0; t < total; ++t) {
    u[t] = uniform(rng);
    e[t] = normal(rng);
  }
  auto simulate = [&](double sigma) {
    std::vector<double> y(total, 0.0);
    for (std::size_t t = 1; t < total; ++t) {
      y[t] = 0.5 * y[t - 1] - 0.3 * u[t - 1] + 0.1 * u[t - 1] * u[t - 1] + sigma * e[t];
    }
    return std::vector<double>(y.begin() + burn_in, y.end());
  };
  const double sigma = noise_fraction * stddev(simulate(0.0));
  auto y = simulate(sigma);

  std::vector<TimeSeries> series;
  series.emplace_back("y", kFixtureStart, std::move(y));
  series.emplace_back("u", kFixtureStart, std::vector<double>(u.begin() + burn_in, u.end()));
  return SyntheticSystem{Dataset(std::move(series), "y"),
                         {Term({{"y", 1}}), Term({{"u", 1}}), Term({{"u", 1}, {"u", 1}})},
                         {0.5, -0.3, 0.1},
                         sigma};
}

LagSpec narx_fixture_spec() {
  LagSpec spec;
  spec.output = "y";
  spec.variables = {{"y", 1, 1}, {"u", 1, 1}};
  spec.degree = 3;
  spec.include_constant = false;
  return spec;
}

SyntheticSystem make_eq6_fixture(std::uint64_t seed, std::size_t length, double noise_fraction) {
  constexpr double a = 3.5551e4;
  constexpr double b = -6.2117e3;
  constexpr double c = -1.17395e4;
  constexpr std::size_t history = 40;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t total = length + history;
  std::vector<double> u(total);
  double z = normal(rng);
  for (std::size_t t = 0; t < total; ++t) {
    z = 0.5 * z + std::sqrt(0.75) * normal(rng);
    u[t] = 1.0 + 0.3 * z;
  }
  std::vector<double> clean(length);
  for (std::size_t t = 0; t < length; ++t) clean[t] = a * u[t + history - 12] + b * u[t + history - 40] + c;
  const double sigma = noise_fraction * stddev(clean);
  std::vector<double> y(length);
  for (std::size_t t = 0; t < length; ++t) y[t] = clean[t] + sigma * normal(rng);

  std::vector<TimeSeries> series;
  series.emplace_back("y", kFixtureStart, std::move(y));
  series.emplace_back("u", kFixtureStart, std::vector<double>(u.begin() + history, u.end()));
  return SyntheticSystem{Dataset(std::move(series), "y"), {Term({{"u", 12}}), Term({{"u", 40}}), Term{}}, {a, b, c}, sigma};
}

LagSpec eq6_fixture_spec() {
  LagSpec spec;
  spec.output = "y";
  spec.variables = {{"u", 1, 42}};
  spec.degree = 1;
  spec.include_constant = true;
  return spec;
}

RegressionProblem random_regression_problem(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, cols - 1);
  RegressionProblem p;
  p.columns.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < p.columns.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.columns.rows(); ++i) p.columns(i, j) = normal(rng);
  }
  p.target = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows));
  const std::size_t active = 1 + pick(rng) % std::min<std::size_t>(cols, 5);
  for (std::size_t k = 0; k < active; ++k) p.target += normal(rng) * p.columns.col(static_cast<Eigen::Index>(pick(rng)));
  for (Eigen::Index i = 0; i < p.target.size(); ++i) p.target(i) += 0.1 * normal(rng);
  return p;
}

}  // namespace narx
