#pragma once

// Data generators with known ground truth, shared by the verification
// suite, the acceptance tests and the CLI `verify` command.

#include "narx/data.hpp"
#include "narx/dictionary.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace narx {

struct SyntheticSystem {
  Dataset data;
  std::vector<Term> true_terms;
  std::vector<double> true_parameters;
  double noise_sigma = 0.0;
};

/// y(t) = 0.5 y(t-1) - 0.3 u(t-1) + 0.1 u(t-1)^2 + e(t), u ~ U(-1, 1),
/// e ~ N(0, sigma^2) with sigma = noise_fraction * std(noise-free y).
[[nodiscard]] SyntheticSystem make_narx_fixture(std::uint64_t seed, std::size_t length = 500,
                                                double noise_fraction = 0.01);

/// Single-input, single-output, lag 1, degree 3, no constant: the nine
/// candidate terms y, u, y^2, yu, u^2, y^3, y^2u, yu^2, u^3.
[[nodiscard]] LagSpec narx_fixture_spec();

/// y(t) = 3.5551e4 u(t-12) - 6.2117e3 u(t-40) - 1.17395e4 + e(t) driven by an
/// R-number-like input u(t) = 1 + 0.3 z(t), z a unit-variance AR(1) with
/// coefficient 0.5. Starts on 2020-03-04.
[[nodiscard]] SyntheticSystem make_eq6_fixture(std::uint64_t seed, std::size_t length = 529,
                                               double noise_fraction = 0.01);

/// Input lags 1..42, no autoregressive terms, degree 1, with constant.
[[nodiscard]] LagSpec eq6_fixture_spec();

/// Gaussian candidate columns and a target built from a random sparse
/// subset of them plus noise.
[[nodiscard]] RegressionProblem random_regression_problem(std::mt19937_64& rng, std::size_t rows, std::size_t cols);

}  // namespace narx
