#include "narx/frols.hpp"

#include <algorithm>
#include <limits>

namespace narx {

void SelectionConfig::validate() const {
  if (max_terms < 1) throw ValidationError("max_terms must be at least 1");
  if (!(err_sum_threshold > 0.0 && err_sum_threshold <= 1.0)) {
    throw ValidationError("err_sum_threshold must lie in (0, 1]");
  }
  if (!(collinearity_tol > 0.0 && collinearity_tol < 1.0)) {
    throw ValidationError("collinearity_tol must lie in (0, 1)");
  }
  if (!(apress_alpha >= 1.0)) throw ValidationError("apress_alpha must be at least 1");
}

std::string to_string(SizeCriterion c) {
  switch (c) {
    case SizeCriterion::aic: return "aic";
    case SizeCriterion::bic: return "bic";
    case SizeCriterion::gcv: return "gcv";
    case SizeCriterion::apress: return "apress";
    case SizeCriterion::fixed: return "fixed";
  }
  return "?";
}

SizeCriterion parse_size_criterion(std::string_view name) {
  for (auto c : {SizeCriterion::aic, SizeCriterion::bic, SizeCriterion::gcv, SizeCriterion::apress,
                 SizeCriterion::fixed}) {
    if (to_string(c) == name) return c;
  }
  throw ValidationError("unknown size criterion '" + std::string(name) + "' (aic, bic, gcv, apress, fixed)");
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::max_terms: return "max_terms";
    case StopReason::err_threshold: return "err_threshold";
    case StopReason::exact_fit: return "exact_fit";
    case StopReason::collinear: return "collinear";
    case StopReason::rank_limit: return "rank_limit";
  }
  return "?";
}

std::vector<double> size_criterion_curve(std::span<const double> residual_energies, SizeCriterion criterion,
                                         std::size_t n_eff, double apress_alpha) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto big_n = static_cast<double>(n_eff);
  std::vector<double> out;
  out.reserve(residual_energies.size());
  for (std::size_t i = 0; i < residual_energies.size(); ++i) {
    const auto n = static_cast<double>(i + 1);
    const double mse = std::max(residual_energies[i], 0.0) / big_n;
    double value = 0.0;
    switch (criterion) {
      case SizeCriterion::aic: value = big_n * std::log(mse) + 2.0 * n; break;
      case SizeCriterion::bic: value = big_n * std::log(mse) + n * std::log(big_n); break;
      case SizeCriterion::gcv: {
        const double d = 1.0 - n / big_n;
        value = d > 0.0 ? mse / (d * d) : inf;
        break;
      }
      case SizeCriterion::apress: {
        const double d = 1.0 - apress_alpha * n / big_n;
        value = d > 0.0 ? mse / (d * d) : inf;
        break;
      }
      case SizeCriterion::fixed: value = -n; break;
    }
    out.push_back(value);
  }
  return out;
}

std::size_t select_model_size(std::span<const double> residual_energies, SizeCriterion criterion,
                              std::size_t n_eff, double apress_alpha, std::size_t max_terms) {
  if (residual_energies.empty()) throw ValidationError("cannot select a model size from an empty trace");
  if (criterion == SizeCriterion::fixed) {
    return max_terms == 0 ? residual_energies.size() : std::min(max_terms, residual_energies.size());
  }
  const auto curve = size_criterion_curve(residual_energies, criterion, n_eff, apress_alpha);
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i] < curve[best]) best = i;
  }
  return best + 1;
}

std::size_t select_model_size(const SelectionTrace& trace, const SelectionConfig& config, std::size_t n_eff) {
  const auto energies = trace.residual_energies();
  return select_model_size(energies, config.size_criterion, n_eff, config.apress_alpha, config.max_terms);
}

SelectionTrace frols_select(const RegressionProblem& problem, const SelectionConfig& config) {
  return frols_select(problem.columns, problem.target, config);
}

}  // namespace narx
