#pragma once

#include "narx/data.hpp"
#include "narx/model.hpp"

#include <span>
#include <vector>

namespace narx {

enum class PredictionMode { one_step, free_run };

/// Model output next to the measured output on a shared date axis.
///
/// Every term of the case-study models lags its variables by at least
/// `horizon_days`, so a one-step prediction at t only uses data that was
/// available `horizon_days` earlier; no recursive multi-step forecasting is
/// involved.
struct PredictionRun {
  PredictionMode mode = PredictionMode::one_step;
  TimeSeries predictions;
  TimeSeries actual;
  std::size_t horizon_days = 0;

  /// Sub-run restricted to dates in [from, to).
  [[nodiscard]] PredictionRun window(Date from, Date to) const;
};

/// y_hat(t) = sum_m theta_m psi_m(t) from measured lagged values, for
/// t >= model.max_lag().
[[nodiscard]] PredictionRun one_step_predict(const IdentifiedModel& model, const Dataset& dataset);

/// Simulates the model recursively: output lags read earlier simulated
/// values, input lags read the measured inputs. `initial_output` holds the
/// output values immediately before the first simulated day (at least
/// model.max_output_lag() of them; the last entries are used). Throws
/// NumericalError when |y_hat| exceeds 1e6 times the training output scale.
[[nodiscard]] PredictionRun free_run_simulate(const IdentifiedModel& model, const Dataset& inputs,
                                              std::span<const double> initial_output);

/// Coefficient of determination, 1 - SS_res / SS_tot about the mean of `actual`.
[[nodiscard]] double r_square(std::span<const double> predicted, std::span<const double> actual);
[[nodiscard]] double r_square(const TimeSeries& predicted, const TimeSeries& actual);

inline constexpr std::size_t kResidualLags = 20;
inline constexpr double kWhitenessZ = 1.96;

struct ResidualReport {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  /// Half-width of the whiteness band, 1.96 / sqrt(N).
  double band = 0.0;
  /// Autocorrelation of the residuals at lags 1..20.
  std::vector<double> autocorrelation;

  [[nodiscard]] std::size_t inside_band() const;
};

/// Needs at least 30 points.
[[nodiscard]] ResidualReport residual_diagnostics(const PredictionRun& run);
[[nodiscard]] ResidualReport residual_diagnostics(std::span<const double> residuals);

}  // namespace narx
