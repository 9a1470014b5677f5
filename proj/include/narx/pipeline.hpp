#pragma once

#include "narx/data.hpp"
#include "narx/dictionary.hpp"
#include "narx/epi.hpp"
#include "narx/frols.hpp"
#include "narx/model.hpp"
#include "narx/predict.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace narx {

inline constexpr const char* kVersion = "1.0.0";

/// One identification experiment. Variables refer to dataset series:
/// `cases`, `deaths` and `rn`.
struct CaseConfig {
  std::string output;
  std::vector<std::string> inputs;
  std::string output_symbol = "y";
  /// Defaults to `u` for one input and `u_1..u_r` otherwise.
  std::vector<std::string> input_symbols;
  std::size_t input_min_lag = 1;
  std::size_t input_max_lag = 1;
  /// No autoregressive terms when output_max_lag is 0.
  std::size_t output_min_lag = 1;
  std::size_t output_max_lag = 0;
  std::size_t degree = 1;
  bool constant = true;

  [[nodiscard]] std::vector<std::string> symbols() const;
  [[nodiscard]] LagSpec lag_spec() const;

  friend bool operator==(const CaseConfig&, const CaseConfig&) = default;
};

struct SeirRunConfig {
  double beta = 0.3;
  double lethality = 0.001;
  double exposed = 0.0;
  double infectious = 100.0;
  double recovered = 0.0;
  double dead = 0.0;
  std::size_t days = 500;
  double step = 0.1;
  std::string start_date = "2020-03-04";

  friend bool operator==(const SeirRunConfig&, const SeirRunConfig&) = default;
};

struct PipelineConfig {
  // [data]
  std::filesystem::path data_path;
  std::string date_column = "date";
  std::string cases_column = "cases";
  std::string deaths_column = "deaths";
  /// When set, the R number is read from this column instead of derived.
  std::string rn_column;
  /// Counts in the file are cumulative and are differenced to daily values.
  bool cumulative = false;
  FillPolicy fill = FillPolicy::none;

  SplitSpec split{361, 168};

  // [epi]
  double population = 67'000'000.0;
  double latent_days = 5.0;
  double infectious_days = 14.0;
  std::size_t active_window = 14;
  std::size_t smoothing_window = 7;

  SelectionConfig selection;
  std::map<std::string, CaseConfig> cases = default_cases();
  SeirRunConfig seir;
  std::filesystem::path output_dir = "out";

  /// Throws ValidationError.
  void validate() const;
  [[nodiscard]] static std::map<std::string, CaseConfig> default_cases();

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// INI-style file with sections [data] [split] [epi] [selection] [output]
/// [seir] and one section per case study. Unknown sections or keys are
/// rejected. Relative paths resolve against `base_dir`.
[[nodiscard]] PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
[[nodiscard]] PipelineConfig load_config(const std::filesystem::path& path);
void write_config(const PipelineConfig& config, std::ostream& out);

/// Daily `cases`, `deaths` and `rn` on one date axis, `cases` as output.
[[nodiscard]] Dataset load_epidemic_data(const PipelineConfig& config);
[[nodiscard]] RateSeries derive_rates(const PipelineConfig& config, const Dataset& daily);

struct CaseResult {
  IdentifiedModel model;
  PredictionRun run;
  double r2_train = 0.0;
  double r2_test = 0.0;
  ResidualReport residuals;
  std::filesystem::path directory;
};

/// Ingests data, derives the R number, identifies the model for case
/// `which`, predicts over train and test and writes the report files into
/// `out_dir/which`.
CaseResult run_case_study(const PipelineConfig& config, const std::string& which,
                          const std::filesystem::path& out_dir);

/// Writes `rn.csv` (date,beta,r,rn) into `out_dir`.
std::filesystem::path derive_rn(const PipelineConfig& config, const std::filesystem::path& out_dir);

/// Writes `seir.csv` (date,S,E,I,R,D) into `out_dir`.
std::filesystem::path simulate_seir(const PipelineConfig& config, const std::filesystem::path& out_dir);

/// Hex SHA-256.
[[nodiscard]] std::string sha256_hex(std::string_view bytes);

}  // namespace narx
