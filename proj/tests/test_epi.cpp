#include "narx/epi.hpp"
#include "narx/error.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace narx;

namespace {

SEIRParams reference_params() {
  SEIRParams p;
  p.population = 1e6;
  p.beta = 0.3;
  p.lethality = 0.001;
  return p;
}

const SEIRState kSeed{0.0, 1e6 - 100.0, 0.0, 100.0, 0.0, 0.0};
const Date kStart = Date::parse("2020-03-04");

RateSeries recover(const std::vector<SEIRState>& run, std::size_t smoothing) {
  std::vector<double> i, d;
  for (const auto& s : run) {
    i.push_back(s.I);
    d.push_back(s.D);
  }
  RateOptions o;
  o.population = 1e6;
  o.smoothing_window = smoothing;
  return estimate_rates(TimeSeries("I", kStart, i), TimeSeries("D", kStart, d), o);
}

}  // namespace

TEST_CASE("disease-free state is constant") {
  SEIRParams p = reference_params();
  p.beta = 0.0;
  for (const auto& s : seir_integrate(p, {0, 1e6, 0, 0, 0, 0}, 500)) {
    CHECK(s.S == 1e6);
    CHECK(s.E == 0.0);
    CHECK(s.I == 0.0);
  }
}

TEST_CASE("no lethality means no deaths") {
  SEIRParams p = reference_params();
  p.lethality = 0.0;
  SEIRState start = kSeed;
  start.D = 7.0;
  start.S -= 7.0;
  for (const auto& s : seir_integrate(p, start, 300)) CHECK(s.D == 7.0);
}

TEST_CASE("conservation and monotonicity over 500 days") {
  const auto run = seir_integrate(reference_params(), kSeed, 500, 0.1);
  CHECK(run.size() == 501);
  CHECK(run.back().t == 500.0);
  for (std::size_t k = 0; k < run.size(); ++k) {
    CHECK(std::abs(run[k].total() - 1e6) <= 1e-9 * 1e6);
    if (k > 0) {
      CHECK(run[k].D >= run[k - 1].D);
      CHECK(run[k].S <= run[k - 1].S);
    }
  }
}

TEST_CASE("matches an adaptive reference integration at day 100") {
  const auto run = seir_integrate(reference_params(), kSeed, 100, 0.1);
  const auto ref = oracle::seir_reference(1e6, 0.3, 0.001, 0.2, 1.0 / 14.0, {1e6 - 100.0, 0, 100.0, 0, 0}, 100.0);
  const auto& s = run.back();
  const std::array<double, 5> got{s.S, s.E, s.I, s.R, s.D};
  for (std::size_t k = 0; k < 5; ++k) CHECK(got[k] == doctest::Approx(ref[k]).epsilon(1e-6));
}

TEST_CASE("piecewise daily rates") {
  SEIRParams p = reference_params();
  p.beta = DailyRate(std::vector<double>{0.3, 0.0});
  const auto run = seir_integrate(p, kSeed, 5);
  // From day 1 on nobody new is infected, so S stops moving.
  CHECK(run[1].S < run[0].S);
  CHECK(run[2].S == run[1].S);
  CHECK(run[5].S == run[1].S);
}

TEST_CASE("integration preconditions") {
  SEIRState bad = kSeed;
  bad.S += 10.0;
  CHECK_THROWS_AS((void)seir_integrate(reference_params(), bad, 10), ValidationError);
  CHECK_THROWS_AS((void)seir_integrate(reference_params(), kSeed, 10, 0.0), ValidationError);
  CHECK_THROWS_AS((void)seir_integrate(reference_params(), kSeed, 10, 1.5), ValidationError);
  SEIRParams p = reference_params();
  p.gamma = 0.0;
  CHECK_THROWS_AS((void)seir_integrate(p, kSeed, 10), ValidationError);
  p = reference_params();
  p.beta = -0.1;
  CHECK_THROWS_AS((void)seir_integrate(p, kSeed, 10), ValidationError);
  p = reference_params();
  p.lethality = 5.0;
  CHECK_THROWS_AS((void)seir_integrate(p, kSeed, 10, 1.0), NumericalError);
}

TEST_CASE("closed-loop rate recovery") {
  const auto run = seir_integrate(reference_params(), kSeed, 150);
  for (std::size_t window : {1u, 7u}) {
    const auto rates = recover(run, window);
    for (std::size_t t = 10; t + 10 < run.size(); ++t) {
      CHECK(rates.beta[t] == doctest::Approx(0.3).epsilon(0.02));
      CHECK(rates.lethality[t] == doctest::Approx(0.001).epsilon(0.02));
    }
  }
}

TEST_CASE("rate estimation by hand") {
  RateOptions o;
  o.population = 1e6;
  o.smoothing_window = 1;
  const auto flat = estimate_rates(TimeSeries("I", kStart, {100, 100, 100, 100}),
                                   TimeSeries("D", kStart, {5, 5, 5, 5}), o);
  for (double r : flat.lethality.values()) CHECK(r == 0.0);
  const auto doubling = estimate_rates(TimeSeries("I", kStart, {100, 100, 100}),
                                       TimeSeries("D", kStart, {1, 2, 4}), o);
  CHECK(doubling.lethality[0] == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(doubling.lethality[1] == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(flat.rn.start() == kStart);
  CHECK(flat.beta.size() == 4);
}

TEST_CASE("rate estimation errors") {
  RateOptions o;
  o.population = 1e6;
  try {
    (void)estimate_rates(TimeSeries("I", kStart, {10, 0, 10}), TimeSeries("D", kStart, {0, 0, 0}), o);
    FAIL("expected a gap error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("2020-03-05") != std::string::npos);
  }
  CHECK_THROWS_AS((void)estimate_rates(TimeSeries("I", kStart, {10, 10, 10}), TimeSeries("D", kStart, {2, 1, 3}), o),
                  DataError);
  o.population = 5.0;
  CHECK_THROWS_AS((void)estimate_rates(TimeSeries("I", kStart, {10, 10, 10}), TimeSeries("D", kStart, {0, 0, 0}), o),
                  DataError);
}

TEST_CASE("reproduction number") {
  const double n = 67e6;
  CHECK(reproduction_number(0.3, n, 0.0, 1.0 / 14.0, n) == 0.3 / (1.0 / 14.0));
  CHECK(reproduction_number(0.0, n, 0.001, 1.0 / 14.0, n) == 0.0);
  CHECK(std::abs(reproduction_number(0.3, n, 0.001, 1.0 / 14.0, n) - 0.3 / (0.001 + 1.0 / 14.0)) <= 1e-12);
  CHECK(reproduction_number(0.3, n, 0.001, 1.0 / 14.0, n) == doctest::Approx(4.142).epsilon(1e-3));
  for (double k : {0.5, 2.0, 4.0}) {
    CHECK(reproduction_number(k * 0.3, 0.6 * n, 0.001, 1.0 / 14.0, n) ==
          k * reproduction_number(0.3, 0.6 * n, 0.001, 1.0 / 14.0, n));
  }
  CHECK_THROWS_AS((void)reproduction_number(0.3, n, 0.0, 0.0, n), NumericalError);
  CHECK_THROWS_AS((void)reproduction_number(0.3, 2 * n, 0.0, 0.1, n), ValidationError);
}
