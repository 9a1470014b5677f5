#pragma once

// Forward regression with orthogonal least squares: greedy term selection
// by error reduction ratio, parameter recovery from the triangular factor,
// and model-size criteria over the residual-energy curve.

#include "narx/dictionary.hpp"
#include "narx/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace narx {

enum class SizeCriterion { aic, bic, gcv, apress, fixed };

/// How candidates are orthogonalized against the selected basis at each
/// step. `recompute` projects every candidate from its original column;
/// `incremental` keeps running projections. Both select the same terms.
enum class Orthogonalization { recompute, incremental };

struct SelectionConfig {
  std::size_t max_terms = 20;
  /// Selection stops once the summed ERR reaches this value.
  double err_sum_threshold = 1.0;
  SizeCriterion size_criterion = SizeCriterion::apress;
  /// A candidate whose orthogonalized squared norm drops below this fraction
  /// of its original squared norm is excluded for the rest of the search.
  double collinearity_tol = 1e-10;
  /// Penalty factor of the adjustable prediction error sum of squares.
  double apress_alpha = 4.0;
  /// Contiguous cross-validation blocks used by identify(); below 2 disables.
  std::size_t folds = 10;
  Orthogonalization orthogonalization = Orthogonalization::recompute;

  /// Throws ValidationError.
  void validate() const;

  friend bool operator==(const SelectionConfig&, const SelectionConfig&) = default;
};

[[nodiscard]] std::string to_string(SizeCriterion c);
/// Throws ValidationError on an unknown name.
[[nodiscard]] SizeCriterion parse_size_criterion(std::string_view name);

enum class StopReason { max_terms, err_threshold, exact_fit, collinear, rank_limit };
[[nodiscard]] std::string to_string(StopReason r);

/// Residual energy below this fraction of the target energy counts as an
/// exact representation and ends the search.
inline constexpr double kExactFitEnergy = 1e-24;
/// Candidates whose ERR differs by no more than this are treated as tied;
/// the lower dictionary index wins.
inline constexpr double kErrTieTolerance = 1e-14;

template <typename Scalar>
struct BasicSelectionStep {
  std::size_t index = 0;          ///< dictionary column chosen
  Scalar err = 0;                 ///< C(y, q_m)
  Scalar residual_energy = 0;     ///< ||r_m||^2
  Scalar g = 0;                   ///< y'q_m / q_m'q_m
  Scalar retained = 0;            ///< q_m'q_m over the original column energy
};

template <typename Scalar>
struct BasicSelectionTrace {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::vector<BasicSelectionStep<Scalar>> steps;
  Matrix Q;  ///< orthogonal basis, one column per step
  Matrix R;  ///< unit upper triangular, A = Q R on the selected columns
  Scalar target_energy = 0;
  Scalar collinearity_tol = 0;
  StopReason stop = StopReason::max_terms;

  [[nodiscard]] std::size_t size() const { return steps.size(); }
  [[nodiscard]] bool empty() const { return steps.empty(); }
  [[nodiscard]] bool collinear_stop() const { return stop == StopReason::collinear; }

  [[nodiscard]] std::vector<std::size_t> indices(std::size_t n) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < n && k < steps.size(); ++k) out.push_back(steps[k].index);
    return out;
  }
  [[nodiscard]] std::vector<std::size_t> indices() const { return indices(steps.size()); }

  [[nodiscard]] Scalar err_sum(std::size_t n) const {
    Scalar s = 0;
    for (std::size_t k = 0; k < n && k < steps.size(); ++k) s += steps[k].err;
    return s;
  }

  [[nodiscard]] std::vector<double> residual_energies() const {
    std::vector<double> out;
    for (const auto& s : steps) out.push_back(static_cast<double>(s.residual_energy));
    return out;
  }
};

using SelectionStep = BasicSelectionStep<double>;
using SelectionTrace = BasicSelectionTrace<double>;

/// Non-centralised squared correlation (x'y)^2 / ((x'x)(y'y)).
template <typename DerivedX, typename DerivedY>
[[nodiscard]] typename DerivedX::Scalar squared_correlation(const Eigen::MatrixBase<DerivedX>& x,
                                                            const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size() || x.size() == 0) {
    throw ValidationError("squared_correlation needs two non-empty vectors of equal length");
  }
  const Scalar xx = x.squaredNorm();
  const Scalar yy = y.squaredNorm();
  if (!(xx > Scalar(0)) || !(yy > Scalar(0))) {
    throw NumericalError("squared correlation undefined for a zero-norm vector");
  }
  const Scalar xy = x.dot(y);
  return (xy * xy) / (xx * yy);
}

namespace detail {

/// One modified Gram-Schmidt sweep of `w` against the first `m` columns of
/// `Q`; the projection coefficients are added into `coeff`.
template <typename Matrix, typename Vector>
void mgs_sweep(const Matrix& Q, const Vector& qq, Eigen::Index m, Vector& w, Vector* coeff) {
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto c = Q.col(k).dot(w) / qq(k);
    w.noalias() -= c * Q.col(k);
    if (coeff) (*coeff)(k) += c;
  }
}

}  // namespace detail

/// Greedy ERR-driven selection over the columns of `candidates`.
///
/// Step 1 picks the column most correlated with the target; each later step
/// orthogonalizes the surviving candidates against the basis chosen so far
/// (modified Gram-Schmidt, one extra pass for the accepted vector) and picks
/// the largest ERR. Stops at the first of: max_terms, ERR-sum threshold,
/// exact fit, N-1 terms, or no surviving candidate.
template <typename DerivedPhi, typename DerivedY>
[[nodiscard]] BasicSelectionTrace<typename DerivedPhi::Scalar> frols_select(
    const Eigen::MatrixBase<DerivedPhi>& candidates, const Eigen::MatrixBase<DerivedY>& target,
    const SelectionConfig& config) {
  using Scalar = typename DerivedPhi::Scalar;
  using Trace = BasicSelectionTrace<Scalar>;
  using Matrix = typename Trace::Matrix;
  using Vector = typename Trace::Vector;

  config.validate();
  const Eigen::Index n_rows = candidates.rows();
  const Eigen::Index n_cols = candidates.cols();
  if (target.size() != n_rows) throw ValidationError("target length does not match candidate rows");
  if (n_cols < 1) throw ValidationError("no candidate terms");
  if (n_rows < 2) throw ValidationError("at least two rows are needed for selection");

  const Vector y = target;
  const Scalar yy = y.squaredNorm();
  if (!(yy > Scalar(0)) || !std::isfinite(static_cast<double>(yy))) {
    throw DataError("degenerate target: the output has zero energy");
  }

  const auto cap = static_cast<Eigen::Index>(
      std::min<std::size_t>({config.max_terms, static_cast<std::size_t>(n_cols), static_cast<std::size_t>(n_rows - 1)}));
  const Scalar tol = static_cast<Scalar>(config.collinearity_tol);
  const bool incremental = config.orthogonalization == Orthogonalization::incremental;

  Trace trace;
  trace.target_energy = yy;
  trace.collinearity_tol = tol;
  trace.Q.resize(n_rows, cap);
  trace.R = Matrix::Identity(cap, cap);

  Vector col_energy = candidates.colwise().squaredNorm().transpose();
  std::vector<char> alive(static_cast<std::size_t>(n_cols));
  for (Eigen::Index j = 0; j < n_cols; ++j) {
    alive[static_cast<std::size_t>(j)] = col_energy(j) > Scalar(0) && std::isfinite(static_cast<double>(col_energy(j)));
  }

  Matrix work;          // incremental: running projections of every column
  Matrix work_coeff;    // incremental: MGS coefficients per column
  if (incremental) {
    work = candidates;
    work_coeff = Matrix::Zero(cap, n_cols);
  }

  Vector qq(cap);
  Vector residual = y;
  Vector w(n_rows);
  Scalar err_sum = 0;
  trace.stop = cap == static_cast<Eigen::Index>(config.max_terms) ? StopReason::max_terms : StopReason::rank_limit;

  for (Eigen::Index m = 0; m < cap; ++m) {
    Eigen::Index best = -1;
    Scalar best_err = -1;
    for (Eigen::Index j = 0; j < n_cols; ++j) {
      if (!alive[static_cast<std::size_t>(j)]) continue;
      if (incremental) {
        w = work.col(j);
      } else {
        w = candidates.col(j);
        detail::mgs_sweep(trace.Q, qq, m, w, static_cast<Vector*>(nullptr));
      }
      const Scalar ww = w.squaredNorm();
      if (!(ww > tol * col_energy(j))) {
        alive[static_cast<std::size_t>(j)] = 0;
        continue;
      }
      const Scalar num = residual.dot(w);
      const Scalar err = (num * num) / (ww * yy);
      if (err > best_err + static_cast<Scalar>(kErrTieTolerance)) {
        best_err = err;
        best = j;
      }
    }
    if (best < 0) {
      trace.stop = StopReason::collinear;
      break;
    }

    Vector coeff = Vector::Zero(cap);
    if (incremental) {
      w = work.col(best);
      coeff.head(m) = work_coeff.col(best).head(m);
    } else {
      w = candidates.col(best);
      detail::mgs_sweep(trace.Q, qq, m, w, &coeff);
    }
    detail::mgs_sweep(trace.Q, qq, m, w, &coeff);  // reorthogonalization pass
    trace.Q.col(m) = w;
    qq(m) = w.squaredNorm();
    trace.R.col(m).head(m) = coeff.head(m);
    alive[static_cast<std::size_t>(best)] = 0;

    BasicSelectionStep<Scalar> step;
    step.index = static_cast<std::size_t>(best);
    const Scalar yq = y.dot(w);
    step.g = yq / qq(m);
    step.err = (yq * yq) / (qq(m) * yy);
    step.retained = qq(m) / col_energy(best);
    residual.noalias() -= step.g * trace.Q.col(m);
    step.residual_energy = residual.squaredNorm();
    trace.steps.push_back(step);
    err_sum += step.err;

    if (incremental) {
      const auto q = trace.Q.col(m);
      for (Eigen::Index j = 0; j < n_cols; ++j) {
        if (!alive[static_cast<std::size_t>(j)]) continue;
        const Scalar c = q.dot(work.col(j)) / qq(m);
        work.col(j).noalias() -= c * q;
        work_coeff(m, j) = c;
      }
    }

    if (step.residual_energy <= static_cast<Scalar>(kExactFitEnergy) * yy) {
      trace.stop = StopReason::exact_fit;
      break;
    }
    if (err_sum >= static_cast<Scalar>(config.err_sum_threshold)) {
      trace.stop = StopReason::err_threshold;
      break;
    }
  }

  const auto n = static_cast<Eigen::Index>(trace.steps.size());
  trace.Q.conservativeResize(n_rows, n);
  trace.R.conservativeResize(n, n);
  return trace;
}

/// Solves R_n theta = g_n by back-substitution for the first `n` selected
/// terms. Throws NumericalError naming the step when the factor is unusable.
template <typename Scalar>
[[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, 1> estimate_parameters(const BasicSelectionTrace<Scalar>& trace,
                                                                           std::size_t n) {
  if (n == 0 || n > trace.size()) {
    throw ValidationError("cannot estimate " + std::to_string(n) + " parameters from a trace of " +
                          std::to_string(trace.size()) + " steps");
  }
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> theta(size);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = trace.steps[k];
    if (!(s.retained > trace.collinearity_tol) || !std::isfinite(static_cast<double>(s.g))) {
      throw NumericalError("ill-conditioned triangular factor at selection step " + std::to_string(k + 1));
    }
    theta(static_cast<Eigen::Index>(k)) = s.g;
  }
  for (Eigen::Index i = size - 1; i >= 0; --i) {
    for (Eigen::Index j = i + 1; j < size; ++j) theta(i) -= trace.R(i, j) * theta(j);
    if (!std::isfinite(static_cast<double>(theta(i)))) {
      throw NumericalError("back-substitution overflow at selection step " + std::to_string(i + 1));
    }
  }
  return theta;
}

template <typename Scalar>
[[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, 1> estimate_parameters(const BasicSelectionTrace<Scalar>& trace) {
  return estimate_parameters(trace, trace.size());
}

/// Criterion value for each model size 1..L given ||r_n||^2.
[[nodiscard]] std::vector<double> size_criterion_curve(std::span<const double> residual_energies,
                                                       SizeCriterion criterion, std::size_t n_eff,
                                                       double apress_alpha = 4.0);

/// Model size minimizing the criterion (smallest on ties). `fixed` returns
/// min(max_terms, trace length).
[[nodiscard]] std::size_t select_model_size(std::span<const double> residual_energies, SizeCriterion criterion,
                                            std::size_t n_eff, double apress_alpha = 4.0,
                                            std::size_t max_terms = 0);
[[nodiscard]] std::size_t select_model_size(const SelectionTrace& trace, const SelectionConfig& config,
                                            std::size_t n_eff);

[[nodiscard]] SelectionTrace frols_select(const RegressionProblem& problem, const SelectionConfig& config);

}  // namespace narx
