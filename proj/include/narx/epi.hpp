#pragma once

#include "narx/data.hpp"

#include <algorithm>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace narx {

/// Piecewise-constant daily rate: value k applies on [k, k+1); the last value
/// extends indefinitely. A single value is a constant rate.
class DailyRate {
public:
  DailyRate(double constant = 0.0) : values_{constant} {}  // NOLINT: implicit by intent
  explicit DailyRate(std::vector<double> daily);

  [[nodiscard]] double on_day(std::size_t day) const { return values_[std::min(day, values_.size() - 1)]; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }

private:
  std::vector<double> values_;
};

struct SEIRParams {
  double population = 1.0;
  double delta = 1.0 / 5.0;   ///< 1 / mean latent period
  double gamma = 1.0 / 14.0;  ///< 1 / mean infectious period
  DailyRate beta;             ///< transmission rate
  DailyRate lethality;        ///< r(t)

  void validate() const;
};

struct SEIRState {
  double t = 0.0;
  double S = 0.0;
  double E = 0.0;
  double I = 0.0;
  double R = 0.0;
  double D = 0.0;

  [[nodiscard]] double total() const { return S + E + I + R + D; }
};

/// Fixed-step RK4 integration of
///   S' = -beta I S / N,  E' = beta I S / N - delta E,
///   I' = delta E - (r + gamma) I,  R' = gamma I,  D' = r I,
/// sampled at integer days 0..days. Each day is split into ceil(1/step)
/// equal substeps. Throws NumericalError if a compartment goes below
/// -1e-9 N.
[[nodiscard]] std::vector<SEIRState> seir_integrate(const SEIRParams& params, const SEIRState& initial,
                                                    std::size_t days, double step = 0.1);

/// beta S / (N (r + gamma)).
[[nodiscard]] double reproduction_number(double beta, double susceptible, double lethality, double gamma,
                                         double population);

struct RateOptions {
  double population = 1.0;
  double delta = 1.0 / 5.0;
  double gamma = 1.0 / 14.0;
  /// Centered moving-average window applied to beta and r before the
  /// reproduction number is formed; 0 or 1 keeps the raw estimates.
  std::size_t smoothing_window = 7;
};

struct RateSeries {
  TimeSeries beta;
  TimeSeries lethality;
  TimeSeries rn;
  TimeSeries susceptible;
};

/// Recovers beta(t), r(t) and RN(t) from active infections I(t) and
/// cumulative deaths D(t) by inverting the SEIR flows day by day:
///   r = dD / I,  R accumulates gamma I,  E = (I' + (r + gamma) I) / delta,
///   S = N - E - I - R - D,  beta = -N dS / (I S).
/// Flows over [t, t+1] are divided by trapezoidal averages of I and S.
/// Both rates and E are floored at zero; R starts at zero on the first day.
[[nodiscard]] RateSeries estimate_rates(const TimeSeries& active_infections, const TimeSeries& cumulative_deaths,
                                        const RateOptions& options);

/// Writes `date,beta,r,rn`.
void write_rate_csv(const RateSeries& rates, std::ostream& out);

}  // namespace narx
