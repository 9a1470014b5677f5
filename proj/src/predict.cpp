#include "narx/predict.hpp"

#include "narx/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace narx {

namespace {

// Index-based lookup from variable name to series, built once per call.
class SeriesLookup {
public:
  SeriesLookup(const IdentifiedModel& model, const Dataset& dataset, bool need_output) {
    for (const auto& term : model.terms) {
      for (const auto& f : term.factors()) {
        if (f.variable == model.output && !need_output) continue;
        series_.emplace(f.variable, &dataset.at(f.variable));
      }
    }
  }
  [[nodiscard]] const TimeSeries& operator()(const std::string& name) const { return *series_.at(name); }

private:
  std::map<std::string, const TimeSeries*, std::less<>> series_;
};

template <class Lookup>
double model_output(const IdentifiedModel& model, Lookup&& value_at) {
  double sum = 0.0;
  for (std::size_t m = 0; m < model.terms.size(); ++m) sum += model.parameters[m] * evaluate_term(model.terms[m], value_at);
  return sum;
}

void check_model(const IdentifiedModel& model) {
  if (model.terms.size() != model.parameters.size()) {
    throw ValidationError("model has " + std::to_string(model.terms.size()) + " terms but " +
                          std::to_string(model.parameters.size()) + " parameters");
  }
}

}  // namespace

PredictionRun PredictionRun::window(Date from, Date to) const {
  const auto clamp_index = [&](Date d) {
    const auto offset = d - predictions.start();
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(offset, 0, static_cast<std::ptrdiff_t>(predictions.size())));
  };
  const std::size_t b = clamp_index(from);
  const std::size_t e = std::max(b, clamp_index(to));
  return PredictionRun{mode, predictions.slice(b, e), actual.slice(b, e), horizon_days};
}

PredictionRun one_step_predict(const IdentifiedModel& model, const Dataset& dataset) {
  check_model(model);
  const std::size_t lag = model.max_lag();
  const std::size_t n = dataset.size();
  if (n <= lag) {
    throw DataError("dataset of length " + std::to_string(n) + " does not cover model lag " + std::to_string(lag));
  }
  const SeriesLookup lookup(model, dataset, true);
  std::vector<double> out(n - lag);
  for (std::size_t t = lag; t < n; ++t) {
    out[t - lag] = model_output(model, [&](const std::string& v, std::size_t l) { return lookup(v)[t - l]; });
  }
  const auto& actual = dataset.output();
  return PredictionRun{PredictionMode::one_step, TimeSeries(model.output, actual.date_at(lag), std::move(out)),
                       actual.slice(lag, n), model.horizon_days()};
}

PredictionRun free_run_simulate(const IdentifiedModel& model, const Dataset& inputs,
                                std::span<const double> initial_output) {
  check_model(model);
  const std::size_t lag = model.max_lag();
  const std::size_t out_lag = model.max_output_lag();
  const std::size_t n = inputs.size();
  if (n <= lag) {
    throw DataError("dataset of length " + std::to_string(n) + " does not cover model lag " + std::to_string(lag));
  }
  if (initial_output.size() < out_lag) {
    throw ValidationError("free-run seed has " + std::to_string(initial_output.size()) +
                          " values; the model needs " + std::to_string(out_lag));
  }
  const SeriesLookup lookup(model, inputs, false);
  const double bound = 1e6 * (model.training.output_scale > 0.0 ? model.training.output_scale : 1.0);

  std::vector<double> simulated(n, 0.0);
  for (std::size_t k = 0; k < out_lag; ++k) {
    simulated[lag - out_lag + k] = initial_output[initial_output.size() - out_lag + k];
  }
  for (std::size_t t = lag; t < n; ++t) {
    const double value = model_output(model, [&](const std::string& v, std::size_t l) {
      return v == model.output ? simulated[t - l] : lookup(v)[t - l];
    });
    if (!std::isfinite(value) || std::abs(value) > bound) {
      throw NumericalError("free-run simulation diverged at step " + std::to_string(t - lag + 1) + " (" +
                           (inputs.start() + static_cast<std::ptrdiff_t>(t)).iso() + ")");
    }
    simulated[t] = value;
  }
  const auto& actual = inputs.output();
  return PredictionRun{PredictionMode::free_run,
                       TimeSeries(model.output, actual.date_at(lag),
                                  std::vector<double>(simulated.begin() + static_cast<std::ptrdiff_t>(lag), simulated.end())),
                       actual.slice(lag, n), model.horizon_days()};
}

double r_square(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size() || actual.size() < 2) {
    throw ValidationError("r_square needs two series of equal length >= 2");
  }
  const double mean = std::accumulate(actual.begin(), actual.end(), 0.0) / static_cast<double>(actual.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - predicted[i];
    const double d = actual[i] - mean;
    ss_res += e * e;
    ss_tot += d * d;
  }
  if (!(ss_tot > 0.0)) throw NumericalError("R-square undefined for a constant actual series");
  return 1.0 - ss_res / ss_tot;
}

double r_square(const TimeSeries& predicted, const TimeSeries& actual) {
  if (predicted.start() != actual.start()) throw ValidationError("r_square series do not share a date axis");
  return r_square(predicted.values(), actual.values());
}

std::size_t ResidualReport::inside_band() const {
  return static_cast<std::size_t>(
      std::count_if(autocorrelation.begin(), autocorrelation.end(), [&](double r) { return std::abs(r) <= band; }));
}

ResidualReport residual_diagnostics(std::span<const double> residuals) {
  const std::size_t n = residuals.size();
  if (n < 30) throw ValidationError("residual diagnostics need at least 30 points, got " + std::to_string(n));
  ResidualReport report;
  report.count = n;
  report.mean = std::accumulate(residuals.begin(), residuals.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double e : residuals) ss += (e - report.mean) * (e - report.mean);
  report.variance = ss / static_cast<double>(n);
  report.band = kWhitenessZ / std::sqrt(static_cast<double>(n));
  const std::size_t lags = std::min(kResidualLags, n - 1);
  report.autocorrelation.assign(lags, 0.0);
  if (ss > 0.0) {
    for (std::size_t k = 1; k <= lags; ++k) {
      double acc = 0.0;
      for (std::size_t t = 0; t + k < n; ++t) acc += (residuals[t] - report.mean) * (residuals[t + k] - report.mean);
      report.autocorrelation[k - 1] = acc / ss;
    }
  }
  return report;
}

ResidualReport residual_diagnostics(const PredictionRun& run) {
  if (run.predictions.size() != run.actual.size()) throw ValidationError("prediction run is misaligned");
  std::vector<double> residuals(run.actual.size());
  for (std::size_t i = 0; i < residuals.size(); ++i) residuals[i] = run.actual[i] - run.predictions[i];
  return residual_diagnostics(residuals);
}

}  // namespace narx
