/* Copyright 2026 The dpdfnet-cpp Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "dpdfnet/prism.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace dpdfnet {
namespace {

constexpr std::array<std::string_view, kMetricCount> kNames = {
    "pesq", "stoi", "sisnr", "sig", "bak", "ovl", "p808", "mos", "noi", "dis", "col", "loud"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

double mean_of(std::span<const double> normalized_row, const std::vector<Metric>& group) {
  double acc = 0.0;
  for (Metric m : group) acc += normalized_row[static_cast<std::size_t>(m)];
  return acc / static_cast<double>(group.size());
}

}  // namespace

std::string_view metric_name(Metric m) { return kNames[static_cast<std::size_t>(m)]; }

std::optional<Metric> metric_from_name(std::string_view name) {
  const std::string key = lower(name);
  for (std::size_t i = 0; i < kMetricCount; ++i) {
    if (key == kNames[i]) return static_cast<Metric>(i);
  }
  return std::nullopt;
}

void MetricTable::validate() const {
  if (rows.size() < 2) {
    throw PrismError("metric table: need at least 2 rows for normalization, got " +
                     std::to_string(rows.size()));
  }
  for (const MetricRow& row : rows) {
    for (std::size_t i = 0; i < kMetricCount; ++i) {
      if (!row.values[i]) {
        throw PrismError("metric table: missing value for model '" + row.model +
                         "', column '" + std::string(kNames[i]) + "'");
      }
      if (!std::isfinite(*row.values[i])) {
        throw PrismError("metric table: non-finite value for model '" + row.model +
                         "', column '" + std::string(kNames[i]) + "'");
      }
    }
  }
}

MetricTable parse_metric_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> cells;

  // Header, skipping blank lines and a UTF-8 byte-order mark.
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw PrismError("metric csv: empty input");

  const std::string header = line;
  cells = split(header);
  if (lower(cells[0]) != "model") {
    throw PrismError("metric csv: first header column must be 'model', got '" +
                     std::string(cells[0]) + "'");
  }
  std::vector<std::optional<Metric>> columns(cells.size());
  std::array<bool, kMetricCount> seen{};
  for (std::size_t c = 1; c < cells.size(); ++c) {
    const auto m = metric_from_name(cells[c]);
    if (!m) throw PrismError("metric csv: unknown column '" + std::string(cells[c]) + "'");
    auto& flag = seen[static_cast<std::size_t>(*m)];
    if (flag) throw PrismError("metric csv: duplicate column '" + std::string(cells[c]) + "'");
    flag = true;
    columns[c] = m;
  }
  for (std::size_t i = 0; i < kMetricCount; ++i) {
    if (!seen[i]) {
      throw PrismError("metric csv: header lacks column '" + std::string(kNames[i]) + "'");
    }
  }

  MetricTable table;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    cells = split(line);
    if (cells.size() != columns.size()) {
      throw PrismError("metric csv: line " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " fields, header has " +
                       std::to_string(columns.size()));
    }
    MetricRow row;
    row.model = std::string(cells[0]);
    if (row.model.empty()) {
      throw PrismError("metric csv: line " + std::to_string(line_no) + " has no model name");
    }
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const std::string_view cell = cells[c];
      if (cell.empty()) continue;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw PrismError("metric csv: line " + std::to_string(line_no) + ", model '" +
                         row.model + "', column '" + std::string(metric_name(*columns[c])) +
                         "': cannot parse '" + std::string(cell) + "'");
      }
      row[*columns[c]] = v;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

MetricTable load_metric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metric table '" + path + "'");
  return parse_metric_csv(in);
}

void PrismGrouping::validate() const {
  std::array<int, kMetricCount> hits{};
  for (const auto* group : {&intrusive, &dnsmos, &nisqa}) {
    if (group->empty()) throw PrismError("prism grouping: empty group");
    for (Metric m : *group) ++hits[static_cast<std::size_t>(m)];
  }
  for (std::size_t i = 0; i < kMetricCount; ++i) {
    if (hits[i] != 1) {
      throw PrismError("prism grouping: column '" + std::string(kNames[i]) + "' appears " +
                       std::to_string(hits[i]) + " times");
    }
  }
}

double si_snr(std::span<const double> estimate, std::span<const double> reference) {
  if (estimate.size() != reference.size()) {
    throw std::invalid_argument("si_snr: length mismatch");
  }
  if (reference.empty()) throw std::invalid_argument("si_snr: empty input");
  const auto n = static_cast<double>(reference.size());
  double mean_y = 0.0, mean_s = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    mean_y += estimate[i];
    mean_s += reference[i];
  }
  mean_y /= n;
  mean_s /= n;

  double dot = 0.0, energy_s = 0.0, raw_s = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double s = reference[i] - mean_s;
    dot += (estimate[i] - mean_y) * s;
    energy_s += s * s;
    raw_s += reference[i] * reference[i];
  }
  // A constant reference leaves only rounding noise after mean removal.
  if (!(energy_s > 1e-20 * raw_s) || !(energy_s > 0.0)) {
    throw std::invalid_argument("si_snr: reference has zero energy");
  }

  const double alpha = dot / energy_s;
  double target = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double st = alpha * (reference[i] - mean_s);
    const double e = (estimate[i] - mean_y) - st;
    target += st * st;
    residual += e * e;
  }
  if (residual < 1e-12 * target) return kSiSnrCeilingDb;
  if (target == 0.0) return -kSiSnrCeilingDb;
  return std::min(kSiSnrCeilingDb, 10.0 * std::log10(target / residual));
}

std::vector<double> minmax_normalize(std::span<const double> column) {
  if (column.empty()) return {};
  const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
  const double min = *lo, max = *hi;
  std::vector<double> out(column.size(), 0.5);
  if (max > min) {
    for (std::size_t i = 0; i < column.size(); ++i) {
      out[i] = (column[i] - min) / (max - min);
    }
  }
  return out;
}

std::vector<PrismScore> prism_score(const MetricTable& table, const PrismGrouping& grouping) {
  grouping.validate();
  table.validate();
  const std::size_t n = table.size();

  std::vector<std::array<double, kMetricCount>> norm(n);
  std::vector<double> column(n);
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    for (std::size_t r = 0; r < n; ++r) column[r] = *table.rows[r].values[m];
    const std::vector<double> scaled = minmax_normalize(column);
    for (std::size_t r = 0; r < n; ++r) norm[r][m] = scaled[r];
  }

  std::vector<PrismScore> out(n);
  for (std::size_t r = 0; r < n; ++r) {
    PrismScore& s = out[r];
    s.model = table.rows[r].model;
    s.intrusive = mean_of(norm[r], grouping.intrusive);
    s.dnsmos = mean_of(norm[r], grouping.dnsmos);
    s.nisqa = mean_of(norm[r], grouping.nisqa);
    s.non_intrusive = 0.5 * (s.dnsmos + s.nisqa);
    s.prism = 0.5 * (s.intrusive + s.non_intrusive);
  }
  return out;
}

std::optional<ReportFormat> report_format_from_name(std::string_view name) {
  const std::string key = lower(name);
  if (key == "text") return ReportFormat::kText;
  if (key == "json") return ReportFormat::kJson;
  if (key == "csv") return ReportFormat::kCsv;
  return std::nullopt;
}

void write_prism_report(std::ostream& out, std::span<const PrismScore> scores,
                        ReportFormat format) {
  switch (format) {
    case ReportFormat::kJson: {
      nlohmann::json rows = nlohmann::json::array();
      for (const PrismScore& s : scores) {
        rows.push_back({{"model", s.model},
                        {"intrusive", s.intrusive},
                        {"dnsmos", s.dnsmos},
                        {"nisqa", s.nisqa},
                        {"non_intrusive", s.non_intrusive},
                        {"prism", s.prism}});
      }
      out << nlohmann::json{{"scores", rows}}.dump(2) << '\n';
      break;
    }
    case ReportFormat::kCsv: {
      out << "model,intrusive,dnsmos,nisqa,non_intrusive,prism\n";
      out << std::setprecision(6) << std::fixed;
      for (const PrismScore& s : scores) {
        out << s.model << ',' << s.intrusive << ',' << s.dnsmos << ',' << s.nisqa << ','
            << s.non_intrusive << ',' << s.prism << '\n';
      }
      break;
    }
    case ReportFormat::kText: {
      std::size_t width = 5;
      for (const PrismScore& s : scores) width = std::max(width, s.model.size());
      std::ostringstream os;
      os << std::left << std::setw(static_cast<int>(width)) << "model" << std::right
         << std::setw(11) << "intrusive" << std::setw(9) << "dnsmos" << std::setw(9)
         << "nisqa" << std::setw(9) << "prism" << '\n';
      os << std::fixed << std::setprecision(4);
      for (const PrismScore& s : scores) {
        os << std::left << std::setw(static_cast<int>(width)) << s.model << std::right
           << std::setw(11) << s.intrusive << std::setw(9) << s.dnsmos << std::setw(9)
           << s.nisqa << std::setw(9) << s.prism << '\n';
      }
      out << os.str();
      break;
    }
  }
}

}  // namespace dpdfnet
