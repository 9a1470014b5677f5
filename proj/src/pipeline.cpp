#include "narx/pipeline.hpp"

#include "narx/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

namespace narx {

namespace pt = boost::property_tree;

// Case configuration --------------------------------------------------------

std::vector<std::string> CaseConfig::symbols() const {
  if (!input_symbols.empty()) return input_symbols;
  if (inputs.size() == 1) return {"u"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < inputs.size(); ++i) out.push_back("u_" + std::to_string(i + 1));
  return out;
}

LagSpec CaseConfig::lag_spec() const {
  LagSpec spec;
  spec.output = output_symbol;
  spec.degree = degree;
  spec.include_constant = constant;
  if (output_max_lag > 0) spec.variables.push_back({output_symbol, output_min_lag, output_max_lag});
  for (const auto& s : symbols()) spec.variables.push_back({s, input_min_lag, input_max_lag});
  return spec;
}

std::map<std::string, CaseConfig> PipelineConfig::default_cases() {
  CaseConfig cs1;
  cs1.output = "cases";
  cs1.inputs = {"rn"};
  cs1.input_min_lag = 1;
  cs1.input_max_lag = 42;
  cs1.degree = 1;

  CaseConfig cs2 = cs1;
  cs2.input_min_lag = 12;
  cs2.output_min_lag = 12;
  cs2.output_max_lag = 42;
  cs2.degree = 2;

  CaseConfig cs3;
  cs3.output = "deaths";
  cs3.inputs = {"rn", "cases"};
  cs3.input_min_lag = 12;
  cs3.input_max_lag = 42;
  cs3.degree = 2;
  return {{"cs1", cs1}, {"cs2", cs2}, {"cs3", cs3}};
}

void PipelineConfig::validate() const {
  selection.validate();
  if (split.train_len == 0) throw ValidationError("split.train must be positive");
  if (!(population > 0.0)) throw ValidationError("epi.population must be positive");
  if (!(latent_days > 0.0) || !(infectious_days > 0.0)) throw ValidationError("epi periods must be positive");
  if (active_window == 0) throw ValidationError("epi.active_window must be positive");
  if (smoothing_window > 1 && smoothing_window % 2 == 0) throw ValidationError("epi.smoothing_window must be odd");
  static const std::set<std::string> variables{"cases", "deaths", "rn"};
  for (const auto& [name, c] : cases) {
    if (!variables.count(c.output)) throw ValidationError(name + ".output must be one of cases, deaths, rn");
    if (c.inputs.empty()) throw ValidationError(name + ".inputs is empty");
    for (const auto& in : c.inputs) {
      if (!variables.count(in)) throw ValidationError(name + ": unknown input '" + in + "'");
      if (in == c.output) throw ValidationError(name + ": output '" + in + "' also listed as input");
    }
    if (!c.input_symbols.empty() && c.input_symbols.size() != c.inputs.size()) {
      throw ValidationError(name + ".input_symbols must match inputs");
    }
    c.lag_spec().validate();
  }
  if (!(seir.step > 0.0 && seir.step <= 1.0)) throw ValidationError("seir.step must lie in (0, 1]");
  (void)Date::parse(seir.start_date);
}

// INI reading and writing ----------------------------------------------------

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::set<std::string> case_keys{"output",         "inputs",         "output_symbol", "input_symbols",
                                               "input_min_lag",  "input_max_lag",  "output_min_lag", "output_max_lag",
                                               "degree",         "constant"};
  static const std::map<std::string, std::set<std::string>> keys{
      {"data", {"path", "date_column", "cases_column", "deaths_column", "rn_column", "cumulative", "fill"}},
      {"split", {"train", "test"}},
      {"epi", {"population", "latent_days", "infectious_days", "active_window", "smoothing_window"}},
      {"selection",
       {"max_terms", "err_sum_threshold", "criterion", "apress_alpha", "collinearity_tol", "folds",
        "orthogonalization"}},
      {"output", {"dir"}},
      {"seir", {"beta", "lethality", "exposed", "infectious", "recovered", "dead", "days", "step", "start_date"}},
      {"cs1", case_keys},
      {"cs2", case_keys},
      {"cs3", case_keys},
  };
  return keys;
}

class SectionReader {
public:
  SectionReader(const pt::ptree& tree, std::string section) : section_(std::move(section)) {
    if (const auto child = tree.get_child_optional(section_)) node_ = &*child;
  }

  [[nodiscard]] bool present() const { return node_ != nullptr; }

  void text(const char* key, std::string& dst) const {
    if (const auto v = raw(key)) dst = *v;
  }

  template <class T>
  void number(const char* key, T& dst) const {
    const auto v = raw(key);
    if (!v) return;
    T value{};
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), value);
    if (ec != std::errc{} || ptr != v->data() + v->size()) {
      throw ValidationError(section_ + "." + key + ": '" + *v + "' is not a valid number");
    }
    dst = value;
  }

  void boolean(const char* key, bool& dst) const {
    const auto v = raw(key);
    if (!v) return;
    if (*v == "true") {
      dst = true;
    } else if (*v == "false") {
      dst = false;
    } else {
      throw ValidationError(section_ + "." + key + ": expected true or false");
    }
  }

  void list(const char* key, std::vector<std::string>& dst) const {
    const auto v = raw(key);
    if (!v) return;
    dst.clear();
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(' ');
      const auto e = item.find_last_not_of(' ');
      if (b != std::string::npos) dst.push_back(item.substr(b, e - b + 1));
    }
  }

private:
  [[nodiscard]] std::optional<std::string> raw(const char* key) const {
    if (!node_) return std::nullopt;
    const auto v = node_->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return *v;
  }

  std::string section_;
  const pt::ptree* node_ = nullptr;
};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string to_string(FillPolicy f) { return f == FillPolicy::forward ? "forward" : "none"; }

std::string to_string(Orthogonalization o) { return o == Orthogonalization::incremental ? "incremental" : "recompute"; }

}  // namespace

PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  const auto& allowed = allowed_keys();
  for (const auto& [section, node] : tree) {
    const auto it = allowed.find(section);
    if (it == allowed.end()) throw ValidationError("config: unknown section [" + section + "]");
    if (!node.data().empty()) throw ValidationError("config: key '" + section + "' outside any section");
    for (const auto& [key, value] : node) {
      if (!it->second.count(key)) throw ValidationError("config: unknown key '" + key + "' in [" + section + "]");
    }
  }

  PipelineConfig c;
  const SectionReader data(tree, "data");
  std::string path;
  data.text("path", path);
  if (!path.empty()) c.data_path = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path) : base_dir / path;
  data.text("date_column", c.date_column);
  data.text("cases_column", c.cases_column);
  data.text("deaths_column", c.deaths_column);
  data.text("rn_column", c.rn_column);
  data.boolean("cumulative", c.cumulative);
  std::string fill = to_string(c.fill);
  data.text("fill", fill);
  if (fill == "forward") {
    c.fill = FillPolicy::forward;
  } else if (fill == "none") {
    c.fill = FillPolicy::none;
  } else {
    throw ValidationError("data.fill must be none or forward");
  }

  const SectionReader split(tree, "split");
  split.number("train", c.split.train_len);
  split.number("test", c.split.test_len);

  const SectionReader epi(tree, "epi");
  epi.number("population", c.population);
  epi.number("latent_days", c.latent_days);
  epi.number("infectious_days", c.infectious_days);
  epi.number("active_window", c.active_window);
  epi.number("smoothing_window", c.smoothing_window);

  const SectionReader sel(tree, "selection");
  sel.number("max_terms", c.selection.max_terms);
  sel.number("err_sum_threshold", c.selection.err_sum_threshold);
  std::string criterion = to_string(c.selection.size_criterion);
  sel.text("criterion", criterion);
  c.selection.size_criterion = parse_size_criterion(criterion);
  sel.number("apress_alpha", c.selection.apress_alpha);
  sel.number("collinearity_tol", c.selection.collinearity_tol);
  sel.number("folds", c.selection.folds);
  std::string orth = to_string(c.selection.orthogonalization);
  sel.text("orthogonalization", orth);
  if (orth == "incremental") {
    c.selection.orthogonalization = Orthogonalization::incremental;
  } else if (orth == "recompute") {
    c.selection.orthogonalization = Orthogonalization::recompute;
  } else {
    throw ValidationError("selection.orthogonalization must be recompute or incremental");
  }

  const SectionReader output(tree, "output");
  std::string dir;
  output.text("dir", dir);
  if (!dir.empty()) c.output_dir = std::filesystem::path(dir).is_absolute() ? std::filesystem::path(dir) : base_dir / dir;

  const SectionReader seir(tree, "seir");
  seir.number("beta", c.seir.beta);
  seir.number("lethality", c.seir.lethality);
  seir.number("exposed", c.seir.exposed);
  seir.number("infectious", c.seir.infectious);
  seir.number("recovered", c.seir.recovered);
  seir.number("dead", c.seir.dead);
  seir.number("days", c.seir.days);
  seir.number("step", c.seir.step);
  seir.text("start_date", c.seir.start_date);

  for (auto& [name, cs] : c.cases) {
    const SectionReader r(tree, name);
    r.text("output", cs.output);
    r.list("inputs", cs.inputs);
    r.text("output_symbol", cs.output_symbol);
    r.list("input_symbols", cs.input_symbols);
    r.number("input_min_lag", cs.input_min_lag);
    r.number("input_max_lag", cs.input_max_lag);
    r.number("output_min_lag", cs.output_min_lag);
    r.number("output_max_lag", cs.output_max_lag);
    r.number("degree", cs.degree);
    r.boolean("constant", cs.constant);
  }

  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

void write_config(const PipelineConfig& c, std::ostream& out) {
  auto num = [](auto v) {
    if constexpr (std::is_floating_point_v<decltype(v)>) {
      return format_double(v);
    } else {
      return std::to_string(v);
    }
  };
  auto boolean = [](bool b) { return std::string(b ? "true" : "false"); };

  out << "[data]\n"
      << "path = " << c.data_path.string() << '\n'
      << "date_column = " << c.date_column << '\n'
      << "cases_column = " << c.cases_column << '\n'
      << "deaths_column = " << c.deaths_column << '\n'
      << "rn_column = " << c.rn_column << '\n'
      << "cumulative = " << boolean(c.cumulative) << '\n'
      << "fill = " << to_string(c.fill) << "\n\n";
  out << "[split]\n"
      << "train = " << num(c.split.train_len) << '\n'
      << "test = " << num(c.split.test_len) << "\n\n";
  out << "[epi]\n"
      << "population = " << num(c.population) << '\n'
      << "latent_days = " << num(c.latent_days) << '\n'
      << "infectious_days = " << num(c.infectious_days) << '\n'
      << "active_window = " << num(c.active_window) << '\n'
      << "smoothing_window = " << num(c.smoothing_window) << "\n\n";
  out << "[selection]\n"
      << "max_terms = " << num(c.selection.max_terms) << '\n'
      << "err_sum_threshold = " << num(c.selection.err_sum_threshold) << '\n'
      << "criterion = " << to_string(c.selection.size_criterion) << '\n'
      << "apress_alpha = " << num(c.selection.apress_alpha) << '\n'
      << "collinearity_tol = " << num(c.selection.collinearity_tol) << '\n'
      << "folds = " << num(c.selection.folds) << '\n'
      << "orthogonalization = " << to_string(c.selection.orthogonalization) << "\n\n";
  out << "[output]\n"
      << "dir = " << c.output_dir.string() << "\n\n";
  out << "[seir]\n"
      << "beta = " << num(c.seir.beta) << '\n'
      << "lethality = " << num(c.seir.lethality) << '\n'
      << "exposed = " << num(c.seir.exposed) << '\n'
      << "infectious = " << num(c.seir.infectious) << '\n'
      << "recovered = " << num(c.seir.recovered) << '\n'
      << "dead = " << num(c.seir.dead) << '\n'
      << "days = " << num(c.seir.days) << '\n'
      << "step = " << num(c.seir.step) << '\n'
      << "start_date = " << c.seir.start_date << '\n';
  for (const auto& [name, cs] : c.cases) {
    out << "\n[" << name << "]\n"
        << "output = " << cs.output << '\n'
        << "inputs = " << join(cs.inputs) << '\n'
        << "output_symbol = " << cs.output_symbol << '\n'
        << "input_symbols = " << join(cs.input_symbols) << '\n'
        << "input_min_lag = " << num(cs.input_min_lag) << '\n'
        << "input_max_lag = " << num(cs.input_max_lag) << '\n'
        << "output_min_lag = " << num(cs.output_min_lag) << '\n'
        << "output_max_lag = " << num(cs.output_max_lag) << '\n'
        << "degree = " << num(cs.degree) << '\n'
        << "constant = " << boolean(cs.constant) << '\n';
  }
}

// Hashing and provenance -----------------------------------------------------

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("SHA-256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

namespace {

std::string file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string provenance(const PipelineConfig& config, const std::string& subject) {
  std::ostringstream cfg;
  write_config(config, cfg);
  std::ostringstream out;
  out << "# narx " << kVersion << '\n'
      << "# subject: " << subject << '\n'
      << "# config_sha256: " << sha256_hex(cfg.str()) << '\n'
      << "# data_sha256: "
      << (config.data_path.empty() ? std::string("none") : sha256_hex(file_bytes(config.data_path))) << '\n';
  return out.str();
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

// Runs one pipeline stage, prefixing any library error with its name.
template <class F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(name) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string(name) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(name) + ": " + e.what());
  }
}

std::string fixed4(double v) {
  if (std::isnan(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

// Pipeline stages ------------------------------------------------------------

Dataset load_epidemic_data(const PipelineConfig& config) {
  if (config.data_path.empty()) throw ValidationError("data.path is not set");
  CsvSchema schema;
  schema.date_column = config.date_column;
  schema.fill = config.fill;
  schema.columns = {{config.cases_column, Role::output}, {config.deaths_column, Role::input}};
  if (!config.rn_column.empty()) schema.columns.emplace_back(config.rn_column, Role::input);
  const Dataset raw = ingest_csv(config.data_path, schema);

  std::vector<TimeSeries> series;
  auto daily = [&](const std::string& column, const char* name) {
    const auto& s = raw.at(column);
    return (config.cumulative ? difference(s) : s).renamed(name);
  };
  series.push_back(daily(config.cases_column, "cases"));
  series.push_back(daily(config.deaths_column, "deaths"));
  if (!config.rn_column.empty()) {
    const auto& rn = raw.at(config.rn_column);
    series.push_back((config.cumulative ? rn.slice(1, rn.size()) : rn).renamed("rn"));
    return Dataset(std::move(series), "cases");
  }
  const Dataset counts(series, "cases");
  const RateSeries rates = derive_rates(config, counts);
  series.push_back(rates.rn.renamed("rn"));
  return Dataset(std::move(series), "cases");
}

RateSeries derive_rates(const PipelineConfig& config, const Dataset& daily) {
  RateOptions options;
  options.population = config.population;
  options.delta = 1.0 / config.latent_days;
  options.gamma = 1.0 / config.infectious_days;
  options.smoothing_window = config.smoothing_window;
  return estimate_rates(trailing_sum(daily.at("cases"), config.active_window), cumulative_sum(daily.at("deaths")),
                        options);
}

CaseResult run_case_study(const PipelineConfig& config, const std::string& which,
                          const std::filesystem::path& out_dir) {
  stage("config", [&] { config.validate(); });
  const auto it = config.cases.find(which);
  if (it == config.cases.end()) throw ValidationError("config: unknown case '" + which + "'");
  const CaseConfig& cs = it->second;

  const Dataset data = stage("ingest", [&] { return load_epidemic_data(config); });
  const auto symbols = cs.symbols();
  std::vector<TimeSeries> series{data.at(cs.output).renamed(cs.output_symbol)};
  for (std::size_t i = 0; i < cs.inputs.size(); ++i) series.push_back(data.at(cs.inputs[i]).renamed(symbols[i]));
  const Dataset case_data(std::move(series), cs.output_symbol);

  CaseResult result;
  result.model = stage("identify", [&] { return identify(case_data, cs.lag_spec(), config.selection, config.split); });
  const auto& model = result.model;

  const std::size_t span = config.split.train_len + config.split.test_len;
  result.run = stage("predict", [&] { return one_step_predict(model, case_data.slice(0, span)); });
  const Date train_end = case_data.start() + static_cast<std::ptrdiff_t>(config.split.train_len);
  const Date test_end = case_data.start() + static_cast<std::ptrdiff_t>(span);
  const PredictionRun train_run = result.run.window(case_data.start(), train_end);
  const PredictionRun test_run = result.run.window(train_end, test_end);
  stage("metrics", [&] {
    result.r2_train = train_run.actual.size() >= 2 ? r_square(train_run.predictions, train_run.actual) : std::nan("");
    result.r2_test = test_run.actual.size() >= 2 ? r_square(test_run.predictions, test_run.actual) : std::nan("");
    if (train_run.actual.size() >= 30) result.residuals = residual_diagnostics(train_run);
  });

  result.directory = out_dir / which;
  stage("report", [&] {
    std::filesystem::create_directories(result.directory);
    const std::string header = provenance(config, which);

    auto model_csv = open_output(result.directory / "model.csv");
    model_csv << header;
    write_model_csv(model, model_csv);

    auto model_txt = open_output(result.directory / "model.txt");
    model_txt << header;
    write_model_table(model, model_txt);

    auto trace_csv = open_output(result.directory / "trace.csv");
    trace_csv << header;
    write_trace_csv(model, config.selection, trace_csv);

    auto pred = open_output(result.directory / "predictions.csv");
    pred << header << "date,actual,predicted,split\n";
    for (std::size_t i = 0; i < result.run.predictions.size(); ++i) {
      const Date d = result.run.predictions.date_at(i);
      pred << d.iso() << ',' << format_double(result.run.actual[i]) << ','
           << format_double(result.run.predictions[i]) << ',' << (d < train_end ? "train" : "test") << '\n';
    }

    auto summary = open_output(result.directory / "summary.txt");
    summary << header;
    summary << "output: " << cs.output_symbol << " = " << cs.output << '\n';
    for (std::size_t i = 0; i < cs.inputs.size(); ++i) summary << "input: " << symbols[i] << " = " << cs.inputs[i] << '\n';
    summary << "dictionary_terms: " << expected_dictionary_size(cs.lag_spec()) << '\n'
            << "training_rows: " << model.training.n_eff << '\n'
            << "model_terms: " << model.size() << '\n'
            << "search_stop: " << to_string(model.search.stop) << '\n'
            << "cv_candidates: " << model.fold_candidates.size() << '\n';
    for (const auto& fc : model.fold_candidates) {
      summary << "  cv_mse " << format_scientific(fc.cv_mse) << ':';
      for (const auto& t : fc.terms) summary << ' ' << t.to_string();
      summary << '\n';
    }
    summary
            << "horizon_days: " << model.horizon_days() << '\n'
            << "r2_train: " << fixed4(result.r2_train) << '\n'
            << "r2_test: " << fixed4(result.r2_test) << '\n';
    const auto& y = case_data.output();
    if (y.size() > 7) {
      try {
        summary << "output_lag7_autocorrelation: " << fixed4(lag_autocorrelation(y, 7)) << '\n';
      } catch (const NumericalError&) {
        summary << "output_lag7_autocorrelation: n/a\n";
      }
    }

    auto resid = open_output(result.directory / "residuals.txt");
    resid << header;
    if (result.residuals.count == 0) {
      resid << "fewer than 30 training predictions; no diagnostics\n";
    } else {
      const auto& r = result.residuals;
      char buf[128];
      std::snprintf(buf, sizeof buf, "count: %zu\nmean: %.6e\nvariance: %.6e\nband: %.6f\n", r.count, r.mean,
                    r.variance, r.band);
      resid << buf << "lag,autocorrelation,inside_band\n";
      for (std::size_t k = 0; k < r.autocorrelation.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%s\n", k + 1, r.autocorrelation[k],
                      std::abs(r.autocorrelation[k]) <= r.band ? "yes" : "no");
        resid << buf;
      }
    }
  });
  return result;
}

std::filesystem::path derive_rn(const PipelineConfig& config, const std::filesystem::path& out_dir) {
  stage("config", [&] { config.validate(); });
  CsvSchema schema;
  schema.date_column = config.date_column;
  schema.fill = config.fill;
  schema.columns = {{config.cases_column, Role::output}, {config.deaths_column, Role::input}};
  const Dataset raw = stage("ingest", [&] { return ingest_csv(config.data_path, schema); });
  const auto daily = [&](const TimeSeries& s, const char* name) {
    return (config.cumulative ? difference(s) : s).renamed(name);
  };
  const Dataset counts({daily(raw.at(config.cases_column), "cases"), daily(raw.at(config.deaths_column), "deaths")},
                       "cases");
  const RateSeries rates = stage("estimate", [&] { return derive_rates(config, counts); });
  const auto path = out_dir / "rn.csv";
  stage("report", [&] {
    std::filesystem::create_directories(out_dir);
    auto out = open_output(path);
    out << provenance(config, "derive-rn");
    write_rate_csv(rates, out);
  });
  return path;
}

std::filesystem::path simulate_seir(const PipelineConfig& config, const std::filesystem::path& out_dir) {
  stage("config", [&] { config.validate(); });
  const auto& s = config.seir;
  SEIRParams params;
  params.population = config.population;
  params.delta = 1.0 / config.latent_days;
  params.gamma = 1.0 / config.infectious_days;
  params.beta = DailyRate(s.beta);
  params.lethality = DailyRate(s.lethality);
  SEIRState initial;
  initial.E = s.exposed;
  initial.I = s.infectious;
  initial.R = s.recovered;
  initial.D = s.dead;
  initial.S = config.population - s.exposed - s.infectious - s.recovered - s.dead;
  const auto trajectory = stage("integrate", [&] { return seir_integrate(params, initial, s.days, s.step); });
  const Date start = Date::parse(s.start_date);
  const auto path = out_dir / "seir.csv";
  stage("report", [&] {
    std::filesystem::create_directories(out_dir);
    auto out = open_output(path);
    PipelineConfig no_data = config;
    no_data.data_path.clear();
    out << provenance(no_data, "simulate-seir") << "date,S,E,I,R,D\n";
    for (std::size_t d = 0; d < trajectory.size(); ++d) {
      const auto& x = trajectory[d];
      out << (start + static_cast<std::ptrdiff_t>(d)).iso() << ',' << format_double(x.S) << ',' << format_double(x.E)
          << ',' << format_double(x.I) << ',' << format_double(x.R) << ',' << format_double(x.D) << '\n';
    }
  });
  return path;
}

}  // namespace narx
