#pragma once

#include "narx/data.hpp"

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace narx {

/// Lags [min_lag, max_lag] of one variable entering the candidate terms.
struct LaggedVariable {
  std::string name;
  std::size_t min_lag = 1;
  std::size_t max_lag = 1;

  friend bool operator==(const LaggedVariable&, const LaggedVariable&) = default;
};

/// Which lagged variables, up to what polynomial degree, form the
/// candidate dictionary. Omitting the output from `variables` gives a model
/// without autoregressive terms.
struct LagSpec {
  std::string output = "y";
  std::vector<LaggedVariable> variables;
  std::size_t degree = 1;
  bool include_constant = true;

  /// Throws ValidationError.
  void validate() const;
  /// Largest lag over all variables, 0 when there are none.
  [[nodiscard]] std::size_t max_lag() const;
  /// Number of distinct (variable, lag) pairs.
  [[nodiscard]] std::size_t lagged_count() const;

  friend bool operator==(const LagSpec&, const LagSpec&) = default;
};

struct Factor {
  std::string variable;
  std::size_t lag = 0;

  friend auto operator<=>(const Factor&, const Factor&) = default;
};

/// A monomial over lagged variables. Factors are kept sorted by variable
/// name, then lag, so equal monomials compare equal. No factors means the
/// constant term.
class Term {
public:
  Term() = default;
  explicit Term(std::vector<Factor> factors);

  [[nodiscard]] const std::vector<Factor>& factors() const { return factors_; }
  [[nodiscard]] std::size_t degree() const { return factors_.size(); }
  [[nodiscard]] bool is_constant() const { return factors_.empty(); }
  [[nodiscard]] std::size_t max_lag() const;
  /// Smallest lag among the factors; 0 for the constant term.
  [[nodiscard]] std::size_t min_lag() const;
  [[nodiscard]] bool references(const std::string& variable) const;

  /// `u(t-12)*y(t-12)`, `y^2(t-1)`, `const`.
  [[nodiscard]] std::string to_string() const;
  /// Inverse of to_string(); throws ValidationError.
  static Term parse(std::string_view text);

  friend auto operator<=>(const Term&, const Term&) = default;

private:
  std::vector<Factor> factors_;
};

/// Evaluates a monomial given a `(variable, lag) -> value` lookup. Shared by
/// regression-matrix construction and model simulation so both produce
/// bit-identical products.
template <class Lookup>
[[nodiscard]] double evaluate_term(const Term& term, Lookup&& value_at) {
  double product = 1.0;
  for (const auto& f : term.factors()) product *= value_at(f.variable, f.lag);
  return product;
}

class Dictionary {
public:
  Dictionary(std::vector<Term> terms, LagSpec spec);

  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
  [[nodiscard]] const LagSpec& spec() const { return spec_; }
  [[nodiscard]] std::size_t size() const { return terms_.size(); }
  [[nodiscard]] const Term& operator[](std::size_t i) const { return terms_[i]; }
  [[nodiscard]] std::size_t max_lag() const { return spec_.max_lag(); }

private:
  std::vector<Term> terms_;
  LagSpec spec_;
};

/// C(n + degree, degree), minus one without the constant term.
[[nodiscard]] std::size_t expected_dictionary_size(const LagSpec& spec);

/// All monomials of degree 1..spec.degree (plus the constant when
/// requested). Ordered by degree, then lexicographically over the lagged
/// variables enumerated in declaration order with ascending lags.
[[nodiscard]] Dictionary build_dictionary(const LagSpec& spec);

/// Dictionary holding exactly `terms`; its spec is the tightest one that
/// covers them.
[[nodiscard]] Dictionary dictionary_from_terms(std::vector<Term> terms, const std::string& output);

struct RegressionProblem {
  Eigen::MatrixXd columns;  ///< N_eff x M term evaluations
  Eigen::VectorXd target;   ///< output at the same rows
  std::size_t first_valid_t = 0;
  Date first_date;

  [[nodiscard]] Eigen::Index rows() const { return columns.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return columns.cols(); }
};

/// Row i holds every term evaluated at t = dictionary.max_lag() + i.
[[nodiscard]] RegressionProblem evaluate(const Dictionary& dictionary, const Dataset& dataset);

}  // namespace narx
