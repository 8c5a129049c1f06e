// Copyright 2026 The civsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// CSV emission and parsing for learning_curve.csv, actions.csv and
// matrix.csv. Doubles are written in shortest round-trip form.

#pragma once

#include <charconv>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "civsim/experiment.hpp"
#include "civsim/matrix_analysis.hpp"

namespace civsim {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw CsvError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw CsvError("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  bool has_columns(std::span<const std::string_view> names) const {
    for (auto n : names) {
      if (column(n) < 0) return false;
    }
    return true;
  }
};

// Plain comma-separated values; no field in these schemas needs quoting.
inline CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
      const auto comma = l.find(',', start);
      out.push_back(l.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  };
  bool first = true;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      t.header = split(line);
      first = false;
      continue;
    }
    auto row = split(line);
    if (row.size() != t.header.size()) {
      throw CsvError("line " + std::to_string(lineno) + ": expected " +
                     std::to_string(t.header.size()) + " fields, got " + std::to_string(row.size()));
    }
    t.rows.push_back(std::move(row));
  }
  if (first) throw CsvError("empty CSV: no header");
  return t;
}

inline constexpr std::string_view kLearningCurveHeader =
    "trial,bin_start,cs_sum,cs_avg,invasions,successful_defers";
inline constexpr std::string_view kActionsHeader =
    "trial,bin_start,player,up,down,left,right,stay,defer";
inline constexpr std::string_view kMatrixHeader = "trial,R,P,S,T,fear,greed,classification";

inline void write_learning_curve(std::ostream& os,
                                 std::span<const std::vector<MetricsBin>> trials) {
  os << kLearningCurveHeader << '\n';
  for (std::size_t k = 0; k < trials.size(); ++k) {
    for (const MetricsBin& b : trials[k]) {
      os << k << ',' << b.bin_start << ',' << b.cs_sum << ',' << format_double(b.cs_avg) << ','
         << b.invasions << ',' << b.successful_defers << '\n';
    }
  }
}

inline void write_actions(std::ostream& os, std::span<const std::vector<MetricsBin>> trials) {
  os << kActionsHeader << '\n';
  for (std::size_t k = 0; k < trials.size(); ++k) {
    for (const MetricsBin& b : trials[k]) {
      for (std::size_t i = 0; i < b.action_counts.size(); ++i) {
        os << k << ',' << b.bin_start << ',' << i;
        for (std::int64_t c : b.action_counts[i]) os << ',' << c;
        os << '\n';
      }
    }
  }
}

struct LearningCurveRow {
  int trial = 0;
  std::uint64_t bin_start = 0;
  Points cs_sum = 0;
  double cs_avg = 0.0;
  std::int64_t invasions = 0;
  std::int64_t successful_defers = 0;

  friend bool operator==(const LearningCurveRow&, const LearningCurveRow&) = default;
};

inline std::vector<LearningCurveRow> parse_learning_curve(const CsvTable& t) {
  static constexpr std::string_view kCols[] = {"trial",  "bin_start", "cs_sum",
                                               "cs_avg", "invasions", "successful_defers"};
  if (!t.has_columns(kCols)) throw CsvError("not a learning_curve.csv header");
  std::vector<LearningCurveRow> out;
  for (const auto& r : t.rows) {
    LearningCurveRow row;
    row.trial = static_cast<int>(parse_int(r[t.column("trial")]));
    row.bin_start = static_cast<std::uint64_t>(parse_int(r[t.column("bin_start")]));
    row.cs_sum = parse_int(r[t.column("cs_sum")]);
    row.cs_avg = parse_double(r[t.column("cs_avg")]);
    row.invasions = parse_int(r[t.column("invasions")]);
    row.successful_defers = parse_int(r[t.column("successful_defers")]);
    out.push_back(row);
  }
  return out;
}

struct ActionsRow {
  int trial = 0;
  std::uint64_t bin_start = 0;
  int player = 0;
  ActionCounts counts{};

  friend bool operator==(const ActionsRow&, const ActionsRow&) = default;
};

inline std::vector<ActionsRow> parse_actions(const CsvTable& t) {
  static constexpr std::string_view kCols[] = {"trial", "bin_start", "player", "up",   "down",
                                               "left",  "right",     "stay",   "defer"};
  if (!t.has_columns(kCols)) throw CsvError("not an actions.csv header");
  std::vector<ActionsRow> out;
  for (const auto& r : t.rows) {
    ActionsRow row;
    row.trial = static_cast<int>(parse_int(r[t.column("trial")]));
    row.bin_start = static_cast<std::uint64_t>(parse_int(r[t.column("bin_start")]));
    row.player = static_cast<int>(parse_int(r[t.column("player")]));
    for (Action a : kAllActions) {
      row.counts[action_index(a)] = parse_int(r[t.column(action_name(a))]);
    }
    out.push_back(row);
  }
  return out;
}

// One row per trial; trials whose policies failed classification are
// skipped. The aggregate row carries column means and, in the
// classification column, the Stag Hunt fraction.
inline void write_matrix(std::ostream& os, std::span<const MatrixTrial> trials) {
  os << kMatrixHeader << '\n';
  std::vector<PayoffMatrix> ms;
  for (const MatrixTrial& t : trials) {
    if (!t.estimate) continue;
    const PayoffMatrix& m = t.estimate->matrix;
    ms.push_back(m);
    os << t.trial << ',' << format_double(m.R) << ',' << format_double(m.P) << ','
       << format_double(m.S) << ',' << format_double(m.T) << ',' << format_double(m.fear) << ','
       << format_double(m.greed) << ',' << dilemma_name(m.classification) << '\n';
  }
  const MatrixAggregate agg = aggregate_matrices(ms);
  os << "aggregate," << format_double(agg.R) << ',' << format_double(agg.P) << ','
     << format_double(agg.S) << ',' << format_double(agg.T) << ',' << format_double(agg.fear)
     << ',' << format_double(agg.greed) << ',' << format_double(agg.stag_hunt_fraction) << '\n';
}

}  // namespace civsim
