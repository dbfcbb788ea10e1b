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

#pragma once

// SI-SNR and the PRISM composite: per-column min-max normalization across
// models, then group means combined hierarchically.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dpdfnet {

enum class Metric : std::size_t {
  kPesq, kStoi, kSiSnr, kSig, kBak, kOvl, kP808, kMos, kNoi, kDis, kCol, kLoud
};
inline constexpr std::size_t kMetricCount = 12;

// Lowercase CSV column name ("pesq", "sisnr", "p808", ...).
std::string_view metric_name(Metric m);
std::optional<Metric> metric_from_name(std::string_view name);

struct MetricRow {
  std::string model;
  std::array<std::optional<double>, kMetricCount> values{};

  std::optional<double>& operator[](Metric m) {
    return values[static_cast<std::size_t>(m)];
  }
  const std::optional<double>& operator[](Metric m) const {
    return values[static_cast<std::size_t>(m)];
  }
};

struct MetricTable {
  std::vector<MetricRow> rows;

  std::size_t size() const { return rows.size(); }
  // Throws PrismError naming the first missing or non-finite cell.
  void validate() const;
};

class PrismError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Header `model,pesq,stoi,sisnr,sig,bak,ovl,p808,mos,noi,dis,col,loud` (any
// column order, names case-insensitive). Empty cells are kept as missing.
MetricTable parse_metric_csv(std::istream& in);
MetricTable load_metric_csv(const std::string& path);

struct PrismGrouping {
  std::vector<Metric> intrusive{Metric::kPesq, Metric::kStoi, Metric::kSiSnr};
  std::vector<Metric> dnsmos{Metric::kSig, Metric::kBak, Metric::kOvl, Metric::kP808};
  std::vector<Metric> nisqa{Metric::kMos, Metric::kNoi, Metric::kDis, Metric::kCol,
                            Metric::kLoud};

  // Groups non-empty, disjoint and covering all metrics.
  void validate() const;
};

// 10 log10(|s_t|^2 / |y - s_t|^2) on zero-mean signals, where s_t is y
// projected onto s. Clamped to +120 dB when the residual is negligible.
double si_snr(std::span<const double> estimate, std::span<const double> reference);
inline constexpr double kSiSnrCeilingDb = 120.0;

// (v - min) / (max - min); a constant column maps to 0.5.
std::vector<double> minmax_normalize(std::span<const double> column);

struct PrismScore {
  std::string model;
  double intrusive = 0.0;
  double dnsmos = 0.0;
  double nisqa = 0.0;
  double non_intrusive = 0.0;
  double prism = 0.0;
};

// One score per table row, in table order.
std::vector<PrismScore> prism_score(const MetricTable& table,
                                    const PrismGrouping& grouping = {});

enum class ReportFormat { kText, kJson, kCsv };
std::optional<ReportFormat> report_format_from_name(std::string_view name);
void write_prism_report(std::ostream& out, std::span<const PrismScore> scores,
                        ReportFormat format);

}  // namespace dpdfnet
