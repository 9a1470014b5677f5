#include "narx/model.hpp"

#include "narx/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <set>

namespace narx {

std::size_t IdentifiedModel::max_lag() const {
  std::size_t m = 0;
  for (const auto& t : terms) m = std::max(m, t.max_lag());
  return m;
}

std::size_t IdentifiedModel::max_output_lag() const {
  std::size_t m = 0;
  for (const auto& t : terms) {
    for (const auto& f : t.factors()) {
      if (f.variable == output) m = std::max(m, f.lag);
    }
  }
  return m;
}

std::size_t IdentifiedModel::horizon_days() const {
  std::size_t h = 0;
  bool any = false;
  for (const auto& t : terms) {
    if (t.is_constant()) continue;
    h = any ? std::min(h, t.min_lag()) : t.min_lag();
    any = true;
  }
  return h;
}

bool IdentifiedModel::autoregressive() const {
  return std::any_of(terms.begin(), terms.end(), [&](const Term& t) { return t.references(output); });
}

std::vector<double> compute_p_values(const RegressionProblem& problem, const IdentifiedModel& model) {
  const auto n_rows = problem.rows();
  const auto n_terms = static_cast<Eigen::Index>(model.terms.size());
  if (problem.cols() != n_terms || static_cast<Eigen::Index>(model.parameters.size()) != n_terms) {
    throw ValidationError("p-value problem does not match the model terms");
  }
  if (n_rows <= n_terms) {
    throw DataError("insufficient data for p-values: " + std::to_string(n_rows) + " rows for " +
                    std::to_string(n_terms) + " terms");
  }
  if (n_terms == 0) return {};

  const Eigen::Map<const Eigen::VectorXd> theta(model.parameters.data(), n_terms);
  const Eigen::VectorXd residual = problem.target - problem.columns * theta;
  const double dof = static_cast<double>(n_rows - n_terms);
  const double sigma2 = residual.squaredNorm() / dof;

  // (A'A)^-1 = R^-1 R^-T from a Householder QR of the selected columns.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(problem.columns);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(n_terms, n_terms).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n_terms, n_terms));
  const Eigen::VectorXd diag = r_inv.rowwise().squaredNorm();

  const boost::math::students_t dist(dof);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_terms));
  for (Eigen::Index k = 0; k < n_terms; ++k) {
    const double se = std::sqrt(sigma2 * diag(k));
    if (!std::isfinite(se)) throw NumericalError("standard error of term " + std::to_string(k + 1) + " is not finite");
    if (se == 0.0) {
      out.push_back(theta(k) == 0.0 ? 1.0 : 0.0);
      continue;
    }
    const double t = std::abs(theta(k)) / se;
    out.push_back(std::isinf(t) ? 0.0 : 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
  }
  return out;
}

namespace {

RegressionProblem select_columns(const RegressionProblem& problem, const std::vector<std::size_t>& columns) {
  RegressionProblem out;
  out.first_valid_t = problem.first_valid_t;
  out.first_date = problem.first_date;
  out.target = problem.target;
  out.columns.resize(problem.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    out.columns.col(static_cast<Eigen::Index>(k)) = problem.columns.col(static_cast<Eigen::Index>(columns[k]));
  }
  return out;
}

// Refit of a chosen column set on every row of `problem`: orders the terms by
// ERR, estimates parameters and p-values.
void refit(const RegressionProblem& problem, const std::vector<std::size_t>& columns,
           const std::vector<Term>& dictionary_terms, const SelectionConfig& config, IdentifiedModel& model) {
  model.terms.clear();
  model.parameters.clear();
  model.err.clear();
  model.p_values.clear();
  model.training.n_eff = static_cast<std::size_t>(problem.rows());
  if (columns.empty()) {
    model.training.residual_variance = problem.target.squaredNorm() / static_cast<double>(problem.rows());
    return;
  }

  const RegressionProblem chosen = select_columns(problem, columns);
  SelectionConfig fit_config = config;
  fit_config.max_terms = columns.size();
  fit_config.size_criterion = SizeCriterion::fixed;
  fit_config.err_sum_threshold = 1.0;
  const auto trace = frols_select(chosen, fit_config);
  const Eigen::VectorXd theta = estimate_parameters(trace);

  std::vector<std::size_t> ordered;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& step = trace.steps[k];
    ordered.push_back(columns[step.index]);
    model.terms.push_back(dictionary_terms[columns[step.index]]);
    model.parameters.push_back(theta(static_cast<Eigen::Index>(k)));
    model.err.push_back(step.err);
  }
  const RegressionProblem final_problem = select_columns(problem, ordered);
  model.p_values = compute_p_values(final_problem, model);
  const double dof = static_cast<double>(problem.rows()) - static_cast<double>(ordered.size());
  model.training.residual_variance = trace.steps.back().residual_energy / dof;
}

double held_out_sse(const RegressionProblem& problem, const std::vector<std::size_t>& columns,
                    Eigen::Index block_begin, Eigen::Index block_end) {
  const Eigen::Index n = problem.rows();
  const auto k = static_cast<Eigen::Index>(columns.size());
  const Eigen::Index fit_rows = n - (block_end - block_begin);
  Eigen::MatrixXd a(fit_rows, k);
  Eigen::VectorXd y(fit_rows);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i >= block_begin && i < block_end) continue;
    for (Eigen::Index c = 0; c < k; ++c) a(r, c) = problem.columns(i, static_cast<Eigen::Index>(columns[static_cast<std::size_t>(c)]));
    y(r) = problem.target(i);
    ++r;
  }
  const Eigen::VectorXd theta = a.colPivHouseholderQr().solve(y);
  double sse = 0.0;
  for (Eigen::Index i = block_begin; i < block_end; ++i) {
    double pred = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      pred += problem.columns(i, static_cast<Eigen::Index>(columns[static_cast<std::size_t>(c)])) * theta(c);
    }
    const double e = problem.target(i) - pred;
    sse += e * e;
  }
  return sse;
}

}  // namespace

IdentifiedModel identify(const Dataset& dataset, const LagSpec& spec, const SelectionConfig& config,
                         const SplitSpec& split_spec) {
  config.validate();
  spec.validate();
  if (spec.output != dataset.output_name()) {
    throw ValidationError("lag spec output '" + spec.output + "' differs from dataset output '" +
                          dataset.output_name() + "'");
  }
  if (split_spec.train_len == 0) throw ValidationError("training length must be positive");
  const Dataset train = split(dataset, split_spec).first;
  const Dictionary dictionary = build_dictionary(spec);
  const RegressionProblem problem = evaluate(dictionary, train);

  IdentifiedModel model;
  model.output = spec.output;
  model.spec = spec;
  for (double v : train.output().values()) model.training.output_scale = std::max(model.training.output_scale, std::abs(v));

  model.search = frols_select(problem, config);
  for (auto idx : model.search.indices()) model.search_terms.push_back(dictionary[idx].to_string());

  std::vector<std::size_t> chosen;
  const auto n_rows = problem.rows();
  const auto folds = static_cast<Eigen::Index>(config.folds);
  if (config.folds >= 2 && n_rows >= 2 * folds) {
    std::vector<Eigen::Index> edges;
    for (Eigen::Index f = 0; f <= folds; ++f) edges.push_back(f * n_rows / folds);

    std::vector<std::vector<std::size_t>> candidates;
    for (Eigen::Index f = 0; f < folds; ++f) {
      const Eigen::Index fit_rows = n_rows - (edges[f + 1] - edges[f]);
      Eigen::MatrixXd phi(fit_rows, problem.cols());
      Eigen::VectorXd y(fit_rows);
      phi.topRows(edges[f]) = problem.columns.topRows(edges[f]);
      phi.bottomRows(n_rows - edges[f + 1]) = problem.columns.bottomRows(n_rows - edges[f + 1]);
      y.head(edges[f]) = problem.target.head(edges[f]);
      y.tail(n_rows - edges[f + 1]) = problem.target.tail(n_rows - edges[f + 1]);
      const auto trace = frols_select(phi, y, config);
      auto set = trace.indices(select_model_size(trace, config, static_cast<std::size_t>(fit_rows)));
      auto key = set;
      std::sort(key.begin(), key.end());
      const bool seen = std::any_of(candidates.begin(), candidates.end(), [&](const auto& c) {
        auto other = c;
        std::sort(other.begin(), other.end());
        return other == key;
      });
      if (!seen) candidates.push_back(std::move(set));
    }

    // Lowest pooled held-out MSE, then the smallest set within one standard
    // error of it.
    std::vector<double> mse(candidates.size());
    std::vector<double> se(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      std::vector<double> fold_mse;
      double sse = 0.0;
      for (Eigen::Index f = 0; f < folds; ++f) {
        const double block_sse = held_out_sse(problem, candidates[c], edges[f], edges[f + 1]);
        sse += block_sse;
        fold_mse.push_back(block_sse / static_cast<double>(edges[f + 1] - edges[f]));
      }
      mse[c] = sse / static_cast<double>(n_rows);
      const double mean = std::accumulate(fold_mse.begin(), fold_mse.end(), 0.0) / static_cast<double>(folds);
      double ss = 0.0;
      for (double v : fold_mse) ss += (v - mean) * (v - mean);
      se[c] = std::sqrt(ss / static_cast<double>(folds - 1)) / std::sqrt(static_cast<double>(folds));
      FoldCandidate fc;
      for (auto idx : candidates[c]) fc.terms.push_back(dictionary[idx]);
      fc.cv_mse = mse[c];
      model.fold_candidates.push_back(std::move(fc));
    }
    const auto best = static_cast<std::size_t>(std::min_element(mse.begin(), mse.end()) - mse.begin());
    std::size_t pick = best;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (mse[c] <= mse[best] + se[best] && candidates[c].size() < candidates[pick].size()) pick = c;
    }
    chosen = candidates[pick];
  } else {
    chosen = model.search.indices(select_model_size(model.search, config, static_cast<std::size_t>(n_rows)));
  }

  refit(problem, chosen, dictionary.terms(), config, model);
  return model;
}

IdentifiedModel fit_terms(const Dataset& dataset, const std::vector<Term>& terms, const SelectionConfig& config) {
  const Dictionary dictionary = dictionary_from_terms(terms, dataset.output_name());
  const RegressionProblem problem = evaluate(dictionary, dataset);
  IdentifiedModel model;
  model.output = dataset.output_name();
  model.spec = dictionary.spec();
  for (double v : dataset.output().values()) model.training.output_scale = std::max(model.training.output_scale, std::abs(v));
  std::vector<std::size_t> all(terms.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  refit(problem, all, dictionary.terms(), config, model);
  return model;
}

// Reports -------------------------------------------------------------------

std::string format_scientific(double value) {
  if (value == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", value);
  return buf;
}

namespace {

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", 100.0 * fraction);
  return buf;
}

}  // namespace

void write_model_csv(const IdentifiedModel& model, std::ostream& out) {
  out << "Index,Model Term,Parameter,ERR(100%),P-value\n";
  for (std::size_t k = 0; k < model.terms.size(); ++k) {
    out << k + 1 << ',' << model.terms[k].to_string() << ',' << format_scientific(model.parameters[k]) << ','
        << format_percent(model.err[k]) << ',' << format_scientific(model.p_values[k]) << '\n';
  }
}

void write_model_table(const IdentifiedModel& model, std::ostream& out) {
  std::vector<std::array<std::string, 5>> rows;
  rows.push_back({"Index", "Model Term", "Parameter", "ERR(100%)", "P-value"});
  for (std::size_t k = 0; k < model.terms.size(); ++k) {
    rows.push_back({std::to_string(k + 1), model.terms[k].to_string(), format_scientific(model.parameters[k]),
                    format_percent(model.err[k]), format_scientific(model.p_values[k])});
  }
  std::array<std::size_t, 5> width{};
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < 5; ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < 5; ++c) {
      if (c > 0) out << "  ";
      if (c == 1) {
        out << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      } else {
        out << std::right << std::setw(static_cast<int>(width[c])) << row[c];
      }
    }
    out << '\n';
  }
  out << std::right;
}

void write_trace_csv(const IdentifiedModel& model, const SelectionConfig& config, std::ostream& out) {
  const auto& trace = model.search;
  const auto energies = trace.residual_energies();
  const auto curve = size_criterion_curve(energies, config.size_criterion, model.training.n_eff, config.apress_alpha);
  out << "step,term,err,err_sum,residual_energy," << to_string(config.size_criterion) << '\n';
  double err_sum = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    err_sum += trace.steps[k].err;
    out << k + 1 << ',' << model.search_terms[k] << ',' << format_double(trace.steps[k].err) << ','
        << format_double(err_sum) << ',' << format_double(trace.steps[k].residual_energy) << ','
        << format_double(curve[k]) << '\n';
  }
}

}  // namespace narx
