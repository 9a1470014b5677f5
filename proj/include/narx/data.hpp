#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace narx {

/// Calendar day stored as a count of days since 1970-01-01.
class Date {
public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

  /// Parses `YYYY-MM-DD`; throws DataError on anything else.
  static Date parse(std::string_view iso);
  [[nodiscard]] std::string iso() const;

  [[nodiscard]] constexpr std::int32_t days_since_epoch() const { return days_; }
  constexpr Date operator+(std::ptrdiff_t n) const {
    return Date(static_cast<std::int32_t>(days_ + n));
  }
  constexpr std::ptrdiff_t operator-(Date other) const { return days_ - other.days_; }
  constexpr auto operator<=>(const Date&) const = default;

private:
  std::int32_t days_ = 0;
};

/// Named sequence of daily observations; entry i belongs to start() + i.
class TimeSeries {
public:
  TimeSeries() = default;
  TimeSeries(std::string name, Date start, std::vector<double> values);

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] Date start() const { return start_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool empty() const { return values_.empty(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] Date date_at(std::size_t i) const { return start_ + static_cast<std::ptrdiff_t>(i); }

  /// Samples [begin, end) with the date axis shifted accordingly.
  [[nodiscard]] TimeSeries slice(std::size_t begin, std::size_t end) const;
  [[nodiscard]] TimeSeries renamed(std::string name) const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
  std::string name_;
  Date start_;
  std::vector<double> values_;
};

enum class Role { output, input };

/// Series sharing one date axis, exactly one of which is the output.
class Dataset {
public:
  Dataset(std::vector<TimeSeries> series, const std::string& output_name);

  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] Date start() const;
  [[nodiscard]] const std::vector<TimeSeries>& series() const { return series_; }
  [[nodiscard]] const TimeSeries& output() const { return series_[output_index_]; }
  [[nodiscard]] const std::string& output_name() const { return output().name(); }
  [[nodiscard]] bool contains(std::string_view name) const;
  /// Throws DataError when the name is unknown.
  [[nodiscard]] const TimeSeries& at(std::string_view name) const;
  [[nodiscard]] Role role(std::string_view name) const;
  [[nodiscard]] Dataset slice(std::size_t begin, std::size_t end) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

private:
  std::vector<TimeSeries> series_;
  std::size_t output_index_ = 0;
};

enum class FillPolicy { none, forward };

struct CsvSchema {
  std::string date_column = "date";
  /// Value columns to read, with their role. Other columns are ignored.
  std::vector<std::pair<std::string, Role>> columns;
  FillPolicy fill = FillPolicy::none;
};

/// Reads a daily CSV. Rows are sorted by date; duplicate dates, gaps and
/// non-numeric cells raise DataError unless `fill` is forward, in which case
/// missing days and empty cells repeat the previous row. Lines starting with
/// '#' are comments.
[[nodiscard]] Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema);
[[nodiscard]] Dataset parse_csv(std::istream& in, const CsvSchema& schema,
                                std::string_view source = "<stream>");

/// Writes `date,<series...>` with shortest round-trip number formatting.
void write_csv(const Dataset& dataset, std::ostream& out);
void write_csv(const Dataset& dataset, const std::filesystem::path& path);

/// Untyped CSV contents, for re-reading report artifacts.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
[[nodiscard]] CsvTable read_csv_table(const std::filesystem::path& path);

struct SplitSpec {
  std::size_t train_len = 0;
  std::size_t test_len = 0;

  friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

/// Leading train_len samples and the test_len samples right after them.
[[nodiscard]] std::pair<Dataset, Dataset> split(const Dataset& dataset, const SplitSpec& spec);

/// Pearson correlation between values[lag:] and values[:-lag].
[[nodiscard]] double lag_autocorrelation(std::span<const double> values, std::size_t lag);
[[nodiscard]] double lag_autocorrelation(const TimeSeries& series, std::size_t lag);

// Derived series.

/// Day-over-day change of a cumulative series; the result starts one day later.
[[nodiscard]] TimeSeries difference(const TimeSeries& cumulative);
[[nodiscard]] TimeSeries cumulative_sum(const TimeSeries& daily);
/// Sum over the trailing `window` days, using the shorter available window
/// at the start of the series.
[[nodiscard]] TimeSeries trailing_sum(const TimeSeries& daily, std::size_t window);
/// Centered moving average over an odd window, shrinking symmetrically at
/// both ends.
[[nodiscard]] TimeSeries centered_moving_average(const TimeSeries& series, std::size_t window);

/// Shortest decimal representation that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

}  // namespace narx
