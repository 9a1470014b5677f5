#include "narx/dictionary.hpp"

#include "narx/error.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <set>

namespace narx {

void LagSpec::validate() const {
  if (output.empty()) throw ValidationError("lag spec has no output variable");
  if (degree < 1) throw ValidationError("nonlinear degree must be at least 1");
  std::set<std::string> seen;
  for (const auto& v : variables) {
    if (v.name.empty()) throw ValidationError("lagged variable with empty name");
    if (!seen.insert(v.name).second) throw ValidationError("variable '" + v.name + "' listed twice");
    if (v.min_lag > v.max_lag) {
      throw ValidationError("variable '" + v.name + "': min lag " + std::to_string(v.min_lag) +
                            " exceeds max lag " + std::to_string(v.max_lag));
    }
    if (v.name == output && v.min_lag == 0) {
      throw ValidationError("output '" + output + "' cannot enter at lag 0");
    }
  }
}

std::size_t LagSpec::max_lag() const {
  std::size_t m = 0;
  for (const auto& v : variables) m = std::max(m, v.max_lag);
  return m;
}

std::size_t LagSpec::lagged_count() const {
  std::size_t n = 0;
  for (const auto& v : variables) n += v.max_lag - v.min_lag + 1;
  return n;
}

// Term ----------------------------------------------------------------------

Term::Term(std::vector<Factor> factors) : factors_(std::move(factors)) {
  std::sort(factors_.begin(), factors_.end());
}

std::size_t Term::max_lag() const {
  std::size_t m = 0;
  for (const auto& f : factors_) m = std::max(m, f.lag);
  return m;
}

std::size_t Term::min_lag() const {
  if (factors_.empty()) return 0;
  std::size_t m = factors_.front().lag;
  for (const auto& f : factors_) m = std::min(m, f.lag);
  return m;
}

bool Term::references(const std::string& variable) const {
  return std::any_of(factors_.begin(), factors_.end(), [&](const Factor& f) { return f.variable == variable; });
}

std::string Term::to_string() const {
  if (factors_.empty()) return "const";
  std::string out;
  for (std::size_t i = 0; i < factors_.size();) {
    std::size_t j = i;
    while (j < factors_.size() && factors_[j] == factors_[i]) ++j;
    if (!out.empty()) out += '*';
    out += factors_[i].variable;
    if (j - i > 1) out += '^' + std::to_string(j - i);
    out += "(t-" + std::to_string(factors_[i].lag) + ')';
    i = j;
  }
  return out;
}

Term Term::parse(std::string_view text) {
  auto bad = [&] { return ValidationError("cannot parse model term '" + std::string(text) + "'"); };
  if (text == "const") return Term{};
  std::vector<Factor> factors;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto star = text.find('*', pos);
    const auto piece = text.substr(pos, star == std::string_view::npos ? star : star - pos);
    const auto open = piece.find("(t-");
    if (open == std::string_view::npos || open == 0 || piece.back() != ')') throw bad();
    auto name = piece.substr(0, open);
    std::size_t power = 1;
    if (const auto caret = name.find('^'); caret != std::string_view::npos) {
      const auto digits = name.substr(caret + 1);
      const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), power);
      if (ec != std::errc{} || p != digits.data() + digits.size() || power == 0) throw bad();
      name = name.substr(0, caret);
    }
    const auto digits = piece.substr(open + 3, piece.size() - open - 4);
    std::size_t lag = 0;
    const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), lag);
    if (name.empty() || ec != std::errc{} || p != digits.data() + digits.size()) throw bad();
    for (std::size_t k = 0; k < power; ++k) factors.push_back({std::string(name), lag});
    if (star == std::string_view::npos) break;
    pos = star + 1;
  }
  return Term(std::move(factors));
}

// Dictionary ----------------------------------------------------------------

Dictionary::Dictionary(std::vector<Term> terms, LagSpec spec) : terms_(std::move(terms)), spec_(std::move(spec)) {
  std::set<Term> unique(terms_.begin(), terms_.end());
  if (unique.size() != terms_.size()) throw ValidationError("dictionary contains duplicate terms");
}

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::size_t expected_dictionary_size(const LagSpec& spec) {
  const std::size_t n = spec.lagged_count();
  return binomial(n + spec.degree, spec.degree) - (spec.include_constant ? 0 : 1);
}

Dictionary build_dictionary(const LagSpec& spec) {
  spec.validate();
  std::vector<Factor> pool;
  for (const auto& v : spec.variables) {
    for (std::size_t lag = v.min_lag; lag <= v.max_lag; ++lag) pool.push_back({v.name, lag});
  }
  if (pool.empty() && !spec.include_constant) {
    throw ValidationError("dictionary would be empty: no lagged variables and no constant");
  }

  std::vector<Term> terms;
  terms.reserve(expected_dictionary_size(spec));
  if (spec.include_constant) terms.emplace_back();

  // Non-decreasing index sequences of length `degree` over `pool`.
  std::vector<std::size_t> picks;
  std::function<void(std::size_t, std::size_t)> extend = [&](std::size_t from, std::size_t remaining) {
    if (remaining == 0) {
      std::vector<Factor> factors;
      factors.reserve(picks.size());
      for (auto i : picks) factors.push_back(pool[i]);
      terms.emplace_back(std::move(factors));
      return;
    }
    for (std::size_t i = from; i < pool.size(); ++i) {
      picks.push_back(i);
      extend(i, remaining - 1);
      picks.pop_back();
    }
  };
  for (std::size_t d = 1; d <= spec.degree && !pool.empty(); ++d) extend(0, d);

  return Dictionary(std::move(terms), spec);
}

Dictionary dictionary_from_terms(std::vector<Term> terms, const std::string& output) {
  LagSpec spec;
  spec.output = output;
  spec.include_constant = false;
  spec.degree = 1;
  std::map<std::string, std::pair<std::size_t, std::size_t>> lags;
  for (const auto& term : terms) {
    if (term.is_constant()) spec.include_constant = true;
    spec.degree = std::max(spec.degree, term.degree());
    for (const auto& f : term.factors()) {
      auto [it, inserted] = lags.try_emplace(f.variable, f.lag, f.lag);
      if (!inserted) {
        it->second.first = std::min(it->second.first, f.lag);
        it->second.second = std::max(it->second.second, f.lag);
      }
    }
  }
  for (const auto& [name, range] : lags) spec.variables.push_back({name, range.first, range.second});
  return Dictionary(std::move(terms), std::move(spec));
}

RegressionProblem evaluate(const Dictionary& dictionary, const Dataset& dataset) {
  const std::size_t lag = dictionary.max_lag();
  const std::size_t n = dataset.size();
  if (n <= lag) {
    throw DataError("dataset of length " + std::to_string(n) + " is too short for maximum lag " +
                    std::to_string(lag));
  }
  for (const auto& v : dictionary.spec().variables) (void)dataset.at(v.name);
  for (const auto& term : dictionary.terms()) {
    for (const auto& f : term.factors()) (void)dataset.at(f.variable);
  }
  const auto& output = dataset.at(dictionary.spec().output);

  const auto rows = static_cast<Eigen::Index>(n - lag);
  const auto cols = static_cast<Eigen::Index>(dictionary.size());
  RegressionProblem problem;
  problem.first_valid_t = lag;
  problem.first_date = dataset.start() + static_cast<std::ptrdiff_t>(lag);
  problem.columns.resize(rows, cols);
  problem.target.resize(rows);

  std::map<std::string, const TimeSeries*, std::less<>> lookup;
  for (const auto& s : dataset.series()) lookup.emplace(s.name(), &s);

  for (Eigen::Index m = 0; m < cols; ++m) {
    const auto& term = dictionary[static_cast<std::size_t>(m)];
    std::vector<std::pair<const TimeSeries*, std::size_t>> refs;
    for (const auto& f : term.factors()) refs.emplace_back(lookup.find(f.variable)->second, f.lag);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const std::size_t t = lag + static_cast<std::size_t>(i);
      std::size_t k = 0;
      problem.columns(i, m) = evaluate_term(term, [&](const std::string&, std::size_t l) {
        return (*refs[k++].first)[t - l];
      });
    }
  }
  for (Eigen::Index i = 0; i < rows; ++i) problem.target(i) = output[lag + static_cast<std::size_t>(i)];
  return problem;
}

}  // namespace narx
