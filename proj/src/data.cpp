#include "narx/data.hpp"

#include "narx/error.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace narx {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

bool is_comment_or_blank(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

// Date ----------------------------------------------------------------------

Date Date::parse(std::string_view iso) {
  iso = trim(iso);
  auto bad = [&] { return DataError("invalid date '" + std::string(iso) + "', expected YYYY-MM-DD"); };
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') throw bad();
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  auto field = [&](std::size_t off, std::size_t len, auto& dst) {
    const auto [ptr, ec] = std::from_chars(iso.data() + off, iso.data() + off + len, dst);
    if (ec != std::errc{} || ptr != iso.data() + off + len) throw bad();
  };
  field(0, 4, y);
  field(5, 2, m);
  field(8, 2, d);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) throw bad();
  return Date(static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
}

std::string Date::iso() const {
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days_}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

// TimeSeries ----------------------------------------------------------------

TimeSeries::TimeSeries(std::string name, Date start, std::vector<double> values)
    : name_(std::move(name)), start_(start), values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("series '" + name_ + "' has a non-finite value on " + date_at(i).iso());
    }
  }
}

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > values_.size()) {
    throw ValidationError("slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                          ") out of range for series '" + name_ + "' of length " +
                          std::to_string(values_.size()));
  }
  return TimeSeries(name_, date_at(begin),
                    std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(begin),
                                        values_.begin() + static_cast<std::ptrdiff_t>(end)));
}

TimeSeries TimeSeries::renamed(std::string name) const {
  TimeSeries copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

// Dataset -------------------------------------------------------------------

Dataset::Dataset(std::vector<TimeSeries> series, const std::string& output_name)
    : series_(std::move(series)) {
  if (series_.empty()) throw DataError("dataset has no series");
  bool found = false;
  for (std::size_t i = 0; i < series_.size(); ++i) {
    const auto& s = series_[i];
    if (s.start() != series_.front().start() || s.size() != series_.front().size()) {
      throw DataError("series '" + s.name() + "' does not share the date axis of '" +
                      series_.front().name() + "'");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (series_[j].name() == s.name()) throw DataError("duplicate series name '" + s.name() + "'");
    }
    if (s.name() == output_name) {
      output_index_ = i;
      found = true;
    }
  }
  if (!found) throw DataError("output series '" + output_name + "' not present in dataset");
}

std::size_t Dataset::size() const { return series_.front().size(); }
Date Dataset::start() const { return series_.front().start(); }

bool Dataset::contains(std::string_view name) const {
  return std::any_of(series_.begin(), series_.end(), [&](const auto& s) { return s.name() == name; });
}

const TimeSeries& Dataset::at(std::string_view name) const {
  for (const auto& s : series_) {
    if (s.name() == name) return s;
  }
  throw DataError("unknown variable '" + std::string(name) + "'");
}

Role Dataset::role(std::string_view name) const {
  return at(name).name() == output_name() ? Role::output : Role::input;
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  std::vector<TimeSeries> parts;
  parts.reserve(series_.size());
  for (const auto& s : series_) parts.push_back(s.slice(begin, end));
  return Dataset(std::move(parts), output_name());
}

// CSV -----------------------------------------------------------------------

Dataset parse_csv(std::istream& in, const CsvSchema& schema, std::string_view source) {
  const std::string src(source);
  if (schema.columns.empty()) throw ValidationError("CSV schema names no value columns");
  std::string output_name;
  for (const auto& [name, role] : schema.columns) {
    if (role != Role::output) continue;
    if (!output_name.empty()) throw ValidationError("CSV schema assigns more than one output column");
    output_name = name;
  }
  if (output_name.empty()) throw ValidationError("CSV schema assigns no output column");

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    header_line = line;
    header = split_fields(header_line);
    break;
  }
  if (header.empty()) throw DataError(src + ": missing header row");

  auto find_column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError(src + ": column '" + name + "' not found in header");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t date_col = find_column(schema.date_column);
  std::vector<std::size_t> value_cols;
  for (const auto& col : schema.columns) value_cols.push_back(find_column(col.first));

  struct Row {
    Date date;
    std::vector<std::optional<double>> cells;
    std::size_t line_no;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError(src + ": row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
    Row row{Date::parse(fields[date_col]), {}, line_no};
    for (std::size_t k = 0; k < value_cols.size(); ++k) {
      const auto cell = fields[value_cols[k]];
      auto value = parse_number(cell);
      if (!value && !(cell.empty() && schema.fill == FillPolicy::forward)) {
        throw DataError(src + ": non-numeric value '" + std::string(cell) + "' at row " +
                        std::to_string(line_no) + ", column '" + schema.columns[k].first + "'");
      }
      row.cells.push_back(value);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(src + ": no data rows");

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].date == rows[i - 1].date) {
      throw DataError(src + ": duplicate date " + rows[i].date.iso() + " (rows " +
                      std::to_string(rows[i - 1].line_no) + " and " + std::to_string(rows[i].line_no) + ")");
    }
    if (rows[i].date - rows[i - 1].date > 1 && schema.fill == FillPolicy::none) {
      throw DataError(src + ": missing date " + (rows[i - 1].date + 1).iso());
    }
  }

  const Date start = rows.front().date;
  const auto length = static_cast<std::size_t>(rows.back().date - start) + 1;
  std::vector<std::vector<double>> values(value_cols.size(), std::vector<double>(length));
  std::size_t r = 0;
  for (std::size_t t = 0; t < length; ++t) {
    const bool present = rows[r].date == start + static_cast<std::ptrdiff_t>(t);
    for (std::size_t k = 0; k < value_cols.size(); ++k) {
      const auto& cell = rows[r].cells[k];
      if (present && cell) {
        values[k][t] = *cell;
      } else if (t == 0) {
        throw DataError(src + ": cannot forward-fill column '" + schema.columns[k].first +
                        "' on the first date " + start.iso());
      } else {
        values[k][t] = values[k][t - 1];
      }
    }
    if (present && r + 1 < rows.size()) ++r;
  }

  std::vector<TimeSeries> series;
  for (std::size_t k = 0; k < value_cols.size(); ++k) {
    series.emplace_back(schema.columns[k].first, start, std::move(values[k]));
  }
  return Dataset(std::move(series), output_name);
}

Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");
  return parse_csv(in, schema, path.string());
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_csv(const Dataset& dataset, std::ostream& out) {
  out << "date";
  for (const auto& s : dataset.series()) out << ',' << s.name();
  out << '\n';
  for (std::size_t t = 0; t < dataset.size(); ++t) {
    out << (dataset.start() + static_cast<std::ptrdiff_t>(t)).iso();
    for (const auto& s : dataset.series()) out << ',' << format_double(s[t]);
    out << '\n';
  }
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(dataset, out);
}

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  CsvTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) continue;
    std::vector<std::string> fields;
    for (auto f : split_fields(line)) fields.emplace_back(f);
    if (table.header.empty()) {
      table.header = std::move(fields);
    } else {
      if (fields.size() != table.header.size()) {
        throw DataError(path.string() + ": ragged row in table");
      }
      table.rows.push_back(std::move(fields));
    }
  }
  if (table.header.empty()) throw DataError(path.string() + ": missing header row");
  return table;
}

// Splitting and statistics --------------------------------------------------

std::pair<Dataset, Dataset> split(const Dataset& dataset, const SplitSpec& spec) {
  if (spec.train_len + spec.test_len > dataset.size()) {
    throw ValidationError("split " + std::to_string(spec.train_len) + "+" + std::to_string(spec.test_len) +
                          " exceeds dataset length " + std::to_string(dataset.size()));
  }
  return {dataset.slice(0, spec.train_len), dataset.slice(spec.train_len, spec.train_len + spec.test_len)};
}

double lag_autocorrelation(std::span<const double> values, std::size_t lag) {
  if (lag == 0 || lag >= values.size()) {
    throw ValidationError("lag " + std::to_string(lag) + " must be in [1, " + std::to_string(values.size()) + ")");
  }
  const std::size_t n = values.size() - lag;
  const auto head = values.first(n);
  const auto tail = values.subspan(lag);
  const double mean_head = std::accumulate(head.begin(), head.end(), 0.0) / static_cast<double>(n);
  const double mean_tail = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = head[i] - mean_head;
    const double b = tail[i] - mean_tail;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw NumericalError("autocorrelation undefined for a constant series");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double lag_autocorrelation(const TimeSeries& series, std::size_t lag) {
  return lag_autocorrelation(series.values(), lag);
}

TimeSeries difference(const TimeSeries& cumulative) {
  if (cumulative.size() < 2) throw DataError("difference needs at least two samples");
  std::vector<double> out(cumulative.size() - 1);
  for (std::size_t i = 0; i + 1 < cumulative.size(); ++i) out[i] = cumulative[i + 1] - cumulative[i];
  return TimeSeries(cumulative.name(), cumulative.start() + 1, std::move(out));
}

TimeSeries cumulative_sum(const TimeSeries& daily) {
  std::vector<double> out(daily.size());
  const auto v = daily.values();
  std::partial_sum(v.begin(), v.end(), out.begin());
  return TimeSeries(daily.name(), daily.start(), std::move(out));
}

TimeSeries trailing_sum(const TimeSeries& daily, std::size_t window) {
  if (window == 0) throw ValidationError("trailing window must be positive");
  std::vector<double> out(daily.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < daily.size(); ++i) {
    acc += daily[i];
    if (i >= window) acc -= daily[i - window];
    out[i] = acc;
  }
  return TimeSeries(daily.name(), daily.start(), std::move(out));
}

TimeSeries centered_moving_average(const TimeSeries& series, std::size_t window) {
  if (window == 0 || window % 2 == 0) throw ValidationError("moving-average window must be odd");
  const std::size_t half = window / 2;
  const std::size_t n = series.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = std::min({half, i, n - 1 - i});
    double acc = 0.0;
    for (std::size_t k = i - h; k <= i + h; ++k) acc += series[k];
    out[i] = acc / static_cast<double>(2 * h + 1);
  }
  return TimeSeries(series.name(), series.start(), std::move(out));
}

}  // namespace narx
