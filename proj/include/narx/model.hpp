#pragma once

#include "narx/data.hpp"
#include "narx/dictionary.hpp"
#include "narx/frols.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace narx {

struct TrainingSummary {
  std::size_t n_eff = 0;
  double residual_variance = 0.0;
  /// max |y| over the training output; bounds free-run simulation.
  double output_scale = 0.0;
};

/// One cross-validation candidate: the terms a fold selected and their
/// pooled held-out mean squared error.
struct FoldCandidate {
  std::vector<Term> terms;
  double cv_mse = 0.0;
};

struct IdentifiedModel {
  std::string output;
  std::vector<Term> terms;
  std::vector<double> parameters;
  std::vector<double> err;  ///< fraction in [0, 1]; reports print x100
  std::vector<double> p_values;
  LagSpec spec;
  TrainingSummary training;

  /// Search over the full dictionary on all training rows.
  SelectionTrace search;
  std::vector<std::string> search_terms;
  std::vector<FoldCandidate> fold_candidates;

  [[nodiscard]] std::size_t size() const { return terms.size(); }
  /// Largest lag over the model terms (0 for none).
  [[nodiscard]] std::size_t max_lag() const;
  /// Largest lag of the output within autoregressive terms.
  [[nodiscard]] std::size_t max_output_lag() const;
  /// Smallest lag over all factors: how many days ahead the model predicts.
  [[nodiscard]] std::size_t horizon_days() const;
  [[nodiscard]] bool autoregressive() const;
};

/// Two-sided t-test p-value per term. `problem` must hold the model terms'
/// columns in model order on the estimation rows.
[[nodiscard]] std::vector<double> compute_p_values(const RegressionProblem& problem, const IdentifiedModel& model);

/// Evaluate, select, size and estimate on the training portion. With
/// config.folds >= 2 the training rows are cut into contiguous blocks, each
/// fold proposes a term set, and the set with the lowest pooled held-out
/// MSE is refitted on all training rows.
[[nodiscard]] IdentifiedModel identify(const Dataset& dataset, const LagSpec& spec, const SelectionConfig& config,
                                       const SplitSpec& split);

/// Fits a fixed list of terms by orthogonal least squares on the whole
/// dataset. The model lists them in the order FROLS selects them.
[[nodiscard]] IdentifiedModel fit_terms(const Dataset& dataset, const std::vector<Term>& terms,
                                        const SelectionConfig& config);

/// Index, Model Term, Parameter, ERR(100%), P-value.
void write_model_csv(const IdentifiedModel& model, std::ostream& out);
void write_model_table(const IdentifiedModel& model, std::ostream& out);
/// Per-step search record with the size-criterion curve.
void write_trace_csv(const IdentifiedModel& model, const SelectionConfig& config, std::ostream& out);

/// `%.4e`, except an exact zero prints as `0`.
[[nodiscard]] std::string format_scientific(double value);

}  // namespace narx
