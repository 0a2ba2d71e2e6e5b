// SPDX-License-Identifier: Apache-2.0
#pragma once

// Tabular channel datasets: CSV persistence, schema checks and the
// preprocessing that turns a table into a feature matrix for regression.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mmwpl/atmosphere.hpp"
#include "mmwpl/channel.hpp"
#include "mmwpl/error.hpp"
#include "mmwpl/linalg.hpp"
#include "mmwpl/random.hpp"

namespace mmwpl {

namespace columns {
inline constexpr std::string_view kSeparation = "T-R Separation Distance (m)";
inline constexpr std::string_view kTimeDelay = "Time Delay (ns)";
inline constexpr std::string_view kReceivedPower = "Received Power (dBm)";
inline constexpr std::string_view kPhase = "Phase (rad)";
inline constexpr std::string_view kAzimuthAoD = "Azimuth AoD (degree)";
inline constexpr std::string_view kElevationAoD = "Elevation AoD (degree)";
inline constexpr std::string_view kAzimuthAoA = "Azimuth AoA (degree)";
inline constexpr std::string_view kElevationAoA = "Elevation AoA (degree)";
inline constexpr std::string_view kRmsDelaySpread = "RMS Delay Spread (ns)";
inline constexpr std::string_view kSeason = "Season";
inline constexpr std::string_view kFrequency = "Frequency";
inline constexpr std::string_view kPathLoss = "Path Loss (dB)";

inline constexpr std::string_view kDataSource = "Data Source";
inline constexpr std::string_view kSimulationNumber = "Simulation Number";

/// The channel dataset schema, in order.
inline constexpr std::array<std::string_view, 12> kSchema{
    kSeparation, kTimeDelay,      kReceivedPower, kPhase,  kAzimuthAoD, kElevationAoD,
    kAzimuthAoA, kElevationAoA, kRmsDelaySpread, kSeason, kFrequency,  kPathLoss};

/// Bookkeeping columns with no bearing on path loss; tolerated by the strict
/// schema check and removed before training.
inline constexpr std::array<std::string_view, 2> kIgnored{kDataSource, kSimulationNumber};
}  // namespace columns

using Cell = std::variant<double, std::string>;

class TabularDataset {
 public:
  TabularDataset() = default;
  explicit TabularDataset(std::vector<std::string> columns) : columns_(std::move(columns)) {
    for (std::size_t i = 0; i < columns_.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (columns_[i] == columns_[j]) throw SchemaError("duplicate column '" + columns_[i] + "'");
  }

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  std::size_t row_count() const { return rows_.size(); }
  std::size_t column_count() const { return columns_.size(); }

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size())
      throw ParseError("row has " + std::to_string(row.size()) + " cells, expected " +
                           std::to_string(columns_.size()),
                       rows_.size() + 1);
    rows_.push_back(std::move(row));
  }

  std::optional<std::size_t> column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
      if (columns_[i] == name) return i;
    return std::nullopt;
  }

  /// Rows at the given indices, in that order.
  TabularDataset select_rows(std::span<const std::size_t> indices) const {
    TabularDataset out(columns_);
    out.rows_.reserve(indices.size());
    for (auto i : indices) out.rows_.push_back(rows_.at(i));
    return out;
  }

  bool operator==(const TabularDataset&) const = default;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// Records to a table in schema column order, seasons as labels.
inline TabularDataset to_table(std::span<const ChannelRecord> records) {
  TabularDataset t(std::vector<std::string>(columns::kSchema.begin(), columns::kSchema.end()));
  for (const auto& r : records)
    t.add_row({r.t_r_separation, r.time_delay, r.received_power, r.phase, r.azimuth_aod, r.elevation_aod,
               r.azimuth_aoa, r.elevation_aoa, r.rms_delay_spread, std::string(season_name(r.season)), r.frequency,
               r.path_loss});
  return t;
}

/// Missing required schema columns, unexpected extras and order mismatches.
/// Empty when the header is a valid schema header.
inline std::vector<std::string> schema_diff(const std::vector<std::string>& header) {
  std::vector<std::string> diff;
  std::vector<std::string> core;
  for (const auto& c : header) {
    const bool ignored = std::find(columns::kIgnored.begin(), columns::kIgnored.end(), c) != columns::kIgnored.end();
    if (ignored) continue;
    if (std::find(columns::kSchema.begin(), columns::kSchema.end(), c) == columns::kSchema.end())
      diff.push_back("unexpected column '" + c + "'");
    else
      core.push_back(c);
  }
  for (auto name : columns::kSchema)
    if (std::find(core.begin(), core.end(), name) == core.end())
      diff.push_back("missing column '" + std::string(name) + "'");
  if (diff.empty() && !std::equal(core.begin(), core.end(), columns::kSchema.begin(), columns::kSchema.end()))
    diff.push_back("columns out of order");
  return diff;
}

inline void check_schema(const TabularDataset& data) {
  auto diff = schema_diff(data.columns());
  if (diff.empty()) return;
  std::string msg = "schema mismatch:";
  for (const auto& d : diff) msg += " " + d + ";";
  msg.pop_back();
  throw SchemaError(msg);
}

// ---------------------------------------------------------------- CSV ----

namespace csv_detail {

inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Strings are quoted when they would otherwise read back as a number, or
// contain a separator, quote or line break.
inline std::string format_text(const std::string& s) {
  const bool needs_quotes = s.empty() || parse_number(s).has_value() ||
                            s.find_first_of(",\"\r\n") != std::string::npos || s.front() == ' ' ||
                            s.back() == ' ';
  if (!needs_quotes) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

struct Field {
  std::string text;
  bool quoted = false;
};

// Split one logical CSV record. Returns false at end of input.
inline bool read_record(std::istream& in, std::vector<Field>& fields, std::size_t& line_no) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  Field cur;
  bool in_quotes = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (in_quotes) {
        cur.text += '\n';
        if (!std::getline(in, line)) throw ParseError("unterminated quoted field", line_no);
        ++line_no;
        i = 0;
        continue;
      }
      break;
    }
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.text += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur.text += c;
      }
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur = {};
    } else if (c == '"' && cur.text.empty() && !cur.quoted) {
      in_quotes = true;
      cur.quoted = true;
    } else if (c == '\r' && i + 1 == line.size()) {
      // CRLF line ending
    } else {
      cur.text += c;
    }
    ++i;
  }
  fields.push_back(std::move(cur));
  return true;
}

}  // namespace csv_detail

inline void write_csv(const TabularDataset& data, std::ostream& out) {
  const auto& cols = data.columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << csv_detail::format_text(cols[i]);
  out << '\n';
  for (const auto& row : data.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (const double* v = std::get_if<double>(&row[i]))
        out << csv_detail::format_number(*v);
      else
        out << csv_detail::format_text(std::get<std::string>(row[i]));
    }
    out << '\n';
  }
}

inline void write_csv(const TabularDataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_csv(data, out);
  if (!out) throw Error("write failed for '" + path + "'");
}

struct CsvOptions {
  bool strict_schema = false;
};

/// Unquoted cells that parse as numbers become numeric; everything else is a
/// label. Empty unquoted cells are missing values and are rejected.
inline TabularDataset read_csv(std::istream& in, const CsvOptions& opts = {}) {
  std::vector<csv_detail::Field> fields;
  std::size_t line_no = 0;
  if (!csv_detail::read_record(in, fields, line_no)) throw ParseError("empty file: header row required");
  std::vector<std::string> header;
  for (auto& f : fields) header.push_back(std::move(f.text));
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);
  TabularDataset data(std::move(header));
  if (opts.strict_schema) check_schema(data);

  std::size_t row_no = 0;
  while (csv_detail::read_record(in, fields, line_no)) {
    if (fields.size() == 1 && fields[0].text.empty() && !fields[0].quoted) continue;  // blank line
    ++row_no;
    if (fields.size() != data.column_count())
      throw ParseError("expected " + std::to_string(data.column_count()) + " cells, found " +
                           std::to_string(fields.size()),
                       row_no);
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      auto& f = fields[i];
      if (f.quoted) {
        row.emplace_back(std::move(f.text));
        continue;
      }
      if (f.text.empty()) throw ParseError("missing value in column '" + data.columns()[i] + "'", row_no);
      if (auto v = csv_detail::parse_number(f.text))
        row.emplace_back(*v);
      else
        row.emplace_back(std::move(f.text));
    }
    data.add_row(std::move(row));
  }
  return data;
}

inline TabularDataset read_csv(const std::string& path, const CsvOptions& opts = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_csv(in, opts);
}

// ------------------------------------------------------- preprocessing ----

/// Remove the bookkeeping columns; idempotent.
inline TabularDataset drop_ignored_columns(const TabularDataset& data) {
  std::vector<std::size_t> keep;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < data.column_count(); ++i) {
    const auto& c = data.columns()[i];
    if (std::find(columns::kIgnored.begin(), columns::kIgnored.end(), c) != columns::kIgnored.end()) continue;
    keep.push_back(i);
    names.push_back(c);
  }
  if (keep.size() == data.column_count()) return data;
  TabularDataset out(std::move(names));
  for (const auto& row : data.rows()) {
    std::vector<Cell> r;
    r.reserve(keep.size());
    for (auto i : keep) r.push_back(row[i]);
    out.add_row(std::move(r));
  }
  return out;
}

/// Label encoding with alphabetical codes: Fall 0, Spring 1, Summer 2, Winter 3.
inline int encode_season(std::string_view label) {
  static constexpr std::array<std::string_view, 4> kAlphabetical{"Fall", "Spring", "Summer", "Winter"};
  for (std::size_t i = 0; i < kAlphabetical.size(); ++i)
    if (kAlphabetical[i] == label) return static_cast<int>(i);
  throw EncodingError("unknown season label '" + std::string(label) + "'");
}

inline std::string decode_season(int code) {
  static constexpr std::array<std::string_view, 4> kAlphabetical{"Fall", "Spring", "Summer", "Winter"};
  if (code < 0 || code >= 4) throw EncodingError("unknown season code " + std::to_string(code));
  return std::string(kAlphabetical[static_cast<std::size_t>(code)]);
}

/// Deterministic shuffled partition. Train receives floor(fraction * rows).
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t rows,
                                                                                   double train_fraction,
                                                                                   std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw DomainError("train fraction must be in (0, 1)");
  if (rows < 2) throw DomainError("split needs at least 2 rows");
  // The epsilon absorbs representation error in products like 2835 * 0.8.
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(rows) + 1e-9));
  if (n_train == 0 || n_train == rows)
    throw DomainError("split of " + std::to_string(rows) + " rows at " + std::to_string(train_fraction) +
                      " leaves an empty side");
  std::vector<std::size_t> perm(rows);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  RandomStream rng(seed);
  for (std::size_t i = rows - 1; i > 0; --i)
    std::swap(perm[i], perm[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
  return {std::vector<std::size_t>(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train)),
          std::vector<std::size_t>(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end())};
}

inline std::pair<TabularDataset, TabularDataset> split(const TabularDataset& data, double train_fraction,
                                                       std::uint64_t seed) {
  auto [train, test] = split_indices(data.row_count(), train_fraction, seed);
  return {data.select_rows(train), data.select_rows(test)};
}

struct FeatureSet {
  std::vector<std::string> names;
  Matrix features;  // rows x p
  Vector target;    // path loss, dB
};

/// Drop ignored columns, label-encode Season and separate the target.
inline FeatureSet to_features(const TabularDataset& raw, std::string_view target = columns::kPathLoss) {
  const TabularDataset data = drop_ignored_columns(raw);
  const auto target_idx = data.column_index(target);
  if (!target_idx) throw SchemaError("missing column '" + std::string(target) + "'");
  FeatureSet fs;
  std::vector<std::size_t> feature_cols;
  for (std::size_t i = 0; i < data.column_count(); ++i)
    if (i != *target_idx) {
      feature_cols.push_back(i);
      fs.names.push_back(data.columns()[i]);
    }
  const auto n = static_cast<Eigen::Index>(data.row_count());
  fs.features.resize(n, static_cast<Eigen::Index>(feature_cols.size()));
  fs.target.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = data.rows()[static_cast<std::size_t>(r)];
    auto numeric = [&](std::size_t col) -> double {
      const Cell& cell = row[col];
      double v;
      if (const double* d = std::get_if<double>(&cell)) {
        v = *d;
      } else if (data.columns()[col] == columns::kSeason) {
        v = encode_season(std::get<std::string>(cell));
      } else {
        throw ParseError("non-numeric value '" + std::get<std::string>(cell) + "' in column '" +
                             data.columns()[col] + "'",
                         static_cast<std::size_t>(r) + 1);
      }
      if (!std::isfinite(v))
        throw ParseError("non-finite value in column '" + data.columns()[col] + "'", static_cast<std::size_t>(r) + 1);
      return v;
    };
    for (std::size_t j = 0; j < feature_cols.size(); ++j)
      fs.features(r, static_cast<Eigen::Index>(j)) = numeric(feature_cols[j]);
    fs.target(r) = numeric(*target_idx);
  }
  return fs;
}

/// Per-column z-score statistics (population sigma).
struct Standardizer {
  Vector mean;
  Vector scale;  // population sigma; 0 marks a constant column

  static Standardizer fit(const Matrix& x) {
    if (x.rows() == 0) throw DomainError("standardize: empty training set");
    Standardizer s;
    s.mean = x.colwise().mean().transpose();
    s.scale.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double var = (x.col(j).array() - s.mean(j)).square().mean();
      // Rounding in the mean leaves a residual variance on constant columns.
      const double sd = std::sqrt(var);
      s.scale(j) = sd > 1e-12 * std::max(1.0, std::abs(s.mean(j))) ? sd : 0.0;
    }
    return s;
  }

  Matrix apply(const Matrix& x) const {
    if (x.cols() != mean.size()) throw ShapeError("standardize: column count mismatch");
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (scale(j) > 0.0)
        out.col(j) = (x.col(j).array() - mean(j)) / scale(j);
      else
        out.col(j).setZero();
    }
    return out;
  }
};

struct StandardizedPair {
  Matrix train;
  Matrix test;
  Standardizer stats;
};

/// Z-score both sets with training statistics only.
inline StandardizedPair standardize(const Matrix& train, const Matrix& test) {
  auto stats = Standardizer::fit(train);
  return {stats.apply(train), stats.apply(test), stats};
}

}  // namespace mmwpl
