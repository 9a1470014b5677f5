#include "narx/epi.hpp"

#include "narx/error.hpp"

#include <array>
#include <cmath>
#include <ostream>

namespace narx {

DailyRate::DailyRate(std::vector<double> daily) : values_(std::move(daily)) {
  if (values_.empty()) throw ValidationError("daily rate needs at least one value");
}

void SEIRParams::validate() const {
  if (!(population > 0.0)) throw ValidationError("population must be positive");
  if (!(delta > 0.0) || !(gamma > 0.0)) throw ValidationError("delta and gamma must be positive");
  for (double b : beta.values()) {
    if (!(b >= 0.0)) throw ValidationError("transmission rate must be non-negative");
  }
  for (double r : lethality.values()) {
    if (!(r >= 0.0)) throw ValidationError("lethality must be non-negative");
  }
}

namespace {

using StateVector = std::array<double, 5>;  // S, E, I, R, D

StateVector seir_rhs(const StateVector& x, double beta, double r, const SEIRParams& p) {
  const double infection = beta * x[2] * x[0] / p.population;
  return {-infection, infection - p.delta * x[1], p.delta * x[1] - (r + p.gamma) * x[2], p.gamma * x[2], r * x[2]};
}

StateVector axpy(const StateVector& x, double a, const StateVector& k) {
  StateVector out;
  for (std::size_t i = 0; i < 5; ++i) out[i] = x[i] + a * k[i];
  return out;
}

}  // namespace

std::vector<SEIRState> seir_integrate(const SEIRParams& params, const SEIRState& initial, std::size_t days,
                                      double step) {
  params.validate();
  if (!(step > 0.0 && step <= 1.0)) throw ValidationError("integration step must lie in (0, 1]");
  const double n = params.population;
  const StateVector x0{initial.S, initial.E, initial.I, initial.R, initial.D};
  for (double v : x0) {
    if (!(v >= 0.0)) throw ValidationError("initial compartments must be non-negative");
  }
  if (std::abs(initial.total() - n) > 1e-9 * n) {
    throw ValidationError("initial state violates conservation: S+E+I+R+D != N");
  }

  const auto substeps = static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9));
  const double h = 1.0 / static_cast<double>(substeps);

  std::vector<SEIRState> out;
  out.reserve(days + 1);
  StateVector x = x0;
  out.push_back({initial.t, x[0], x[1], x[2], x[3], x[4]});
  for (std::size_t day = 0; day < days; ++day) {
    const double beta = params.beta.on_day(day);
    const double r = params.lethality.on_day(day);
    for (std::size_t s = 0; s < substeps; ++s) {
      const auto k1 = seir_rhs(x, beta, r, params);
      const auto k2 = seir_rhs(axpy(x, h / 2, k1), beta, r, params);
      const auto k3 = seir_rhs(axpy(x, h / 2, k2), beta, r, params);
      const auto k4 = seir_rhs(axpy(x, h, k3), beta, r, params);
      for (std::size_t i = 0; i < 5; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    for (double v : x) {
      if (v < -1e-9 * n || !std::isfinite(v)) {
        throw NumericalError("SEIR integration failed on day " + std::to_string(day + 1) +
                             ": a compartment became negative");
      }
    }
    out.push_back({initial.t + static_cast<double>(day + 1), x[0], x[1], x[2], x[3], x[4]});
  }
  return out;
}

double reproduction_number(double beta, double susceptible, double lethality, double gamma, double population) {
  const double removal = lethality + gamma;
  if (!(removal > 0.0)) throw NumericalError("reproduction number undefined: r + gamma must be positive");
  if (!(population > 0.0) || susceptible < 0.0 || susceptible > population) {
    throw ValidationError("susceptible count must lie in [0, N]");
  }
  return (beta / removal) * (susceptible / population);
}

RateSeries estimate_rates(const TimeSeries& active, const TimeSeries& deaths, const RateOptions& options) {
  const std::size_t n = active.size();
  if (deaths.size() != n || deaths.start() != active.start()) {
    throw DataError("infection and death series do not share a date axis");
  }
  if (n < 3) throw DataError("rate estimation needs at least three days of data");
  if (!(options.population > 0.0) || !(options.delta > 0.0) || !(options.gamma > 0.0)) {
    throw ValidationError("population, delta and gamma must be positive");
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (!(active[t] > 0.0)) throw DataError("no active infections on " + active.date_at(t).iso());
    if (t > 0 && deaths[t] < deaths[t - 1]) {
      throw DataError("cumulative deaths decrease on " + deaths.date_at(t).iso());
    }
  }

  const double pop = options.population;
  const double gamma = options.gamma;
  std::vector<double> i_mid(n - 1);
  std::vector<double> r_interval(n - 1);
  std::vector<double> recovered(n, 0.0);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    i_mid[t] = 0.5 * (active[t] + active[t + 1]);
    r_interval[t] = (deaths[t + 1] - deaths[t]) / i_mid[t];
    recovered[t + 1] = recovered[t] + gamma * i_mid[t];
  }

  std::vector<double> exposed(n);
  std::vector<double> susceptible(n);
  for (std::size_t t = 0; t < n; ++t) {
    double di = 0.0;
    double r = 0.0;
    if (t == 0) {
      di = active[1] - active[0];
      r = r_interval[0];
    } else if (t + 1 == n) {
      di = active[t] - active[t - 1];
      r = r_interval[t - 1];
    } else {
      di = 0.5 * (active[t + 1] - active[t - 1]);
      r = 0.5 * (r_interval[t - 1] + r_interval[t]);
    }
    exposed[t] = std::max(0.0, (di + (r + gamma) * active[t]) / options.delta);
    susceptible[t] = pop - exposed[t] - active[t] - recovered[t] - deaths[t];
    if (susceptible[t] < 0.0) {
      throw DataError("reconstructed susceptible population is negative on " + active.date_at(t).iso() +
                      "; check the population size");
    }
  }

  std::vector<double> beta(n);
  std::vector<double> lethality(n);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const double ds = -((exposed[t + 1] - exposed[t]) + (active[t + 1] - active[t]) +
                        (recovered[t + 1] - recovered[t]) + (deaths[t + 1] - deaths[t]));
    const double s_mid = 0.5 * (susceptible[t] + susceptible[t + 1]);
    beta[t] = std::max(0.0, -pop * ds / (i_mid[t] * s_mid));
    lethality[t] = std::max(0.0, r_interval[t]);
  }
  beta[n - 1] = beta[n - 2];
  lethality[n - 1] = lethality[n - 2];

  TimeSeries beta_series("beta", active.start(), std::move(beta));
  TimeSeries r_series("r", active.start(), std::move(lethality));
  if (options.smoothing_window > 1) {
    beta_series = centered_moving_average(beta_series, options.smoothing_window);
    r_series = centered_moving_average(r_series, options.smoothing_window);
  }

  std::vector<double> rn(n);
  for (std::size_t t = 0; t < n; ++t) {
    rn[t] = reproduction_number(beta_series[t], susceptible[t], r_series[t], gamma, pop);
  }
  return RateSeries{std::move(beta_series), std::move(r_series), TimeSeries("rn", active.start(), std::move(rn)),
                    TimeSeries("S", active.start(), std::move(susceptible))};
}

void write_rate_csv(const RateSeries& rates, std::ostream& out) {
  out << "date,beta,r,rn\n";
  for (std::size_t t = 0; t < rates.rn.size(); ++t) {
    out << rates.rn.date_at(t).iso() << ',' << format_double(rates.beta[t]) << ','
        << format_double(rates.lethality[t]) << ',' << format_double(rates.rn[t]) << '\n';
  }
}

}  // namespace narx
