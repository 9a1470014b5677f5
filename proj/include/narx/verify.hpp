#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace narx {

struct VerificationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerificationReport {
  std::uint64_t seed = 0;
  std::vector<VerificationCheck> checks;

  [[nodiscard]] bool passed() const;
  /// One line per check; fixed formatting, so equal seeds give equal text.
  [[nodiscard]] std::string text() const;
};

/// Runs the synthetic recovery checks: dictionary layout, energy identity,
/// least-squares equivalence, term recovery, greedy optimality, SEIR
/// conservation, rate recovery, reproduction number and the lagged
/// R-number fixture. Randomness derives from `seed` only.
[[nodiscard]] VerificationReport run_synthetic_suite(std::uint64_t seed);

}  // namespace narx
