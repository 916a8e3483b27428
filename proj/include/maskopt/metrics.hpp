#pragma once

#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "maskopt/image.hpp"

namespace maskopt {

inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

// 10 log10(1 / MSE) with MAX = 1; identical images give kPsnrInfinity.
double psnr(const Image& ref, const Image& test);
// MSE over the pixels inside `region` only.
double psnr_masked(const Image& ref, const Image& test, const BinaryMask& region);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

// Local SSIM map (valid windows only) for one channel pair. Entry (y, x) is the
// window whose top-left corner is (y, x).
std::vector<double> ssim_map(const Image& ref, const Image& test, int channel,
                             const SsimParams& params = {});

// Mean local SSIM over every valid window, averaged over channels.
double ssim(const Image& ref, const Image& test, const SsimParams& params = {});
// Mean over windows whose center pixel lies inside `region`.
double ssim_masked(const Image& ref, const Image& test, const BinaryMask& region,
                   const SsimParams& params = {});

struct MaskBin {
  double lo = 0.0;  // inclusive, percent
  double hi = 0.0;  // exclusive, percent
  std::string label() const;
  bool contains(double ratio) const { return ratio >= lo && ratio < hi; }
};

std::vector<MaskBin> default_bins();
// Bin whose half-open range holds `ratio`, if any.
std::optional<MaskBin> find_bin(const std::vector<MaskBin>& bins, double ratio);

struct CoverageStats {
  std::size_t missed = 0;
  std::size_t excess = 0;
  double iou = 0.0;
  bool covered = false;
};

struct MetricsRecord {
  std::string sample_id;
  double mask_ratio = 0.0;
  std::string bin;
  std::string condition;
  double psnr = 0.0;
  double ssim = 0.0;
  CoverageStats coverage;
};

// Header line of the per-record CSV.
inline constexpr const char* kRecordCsvHeader =
    "sample_id,condition,bin,mask_ratio,psnr,ssim,missed,excess,iou";

std::string format_real(double v);
void write_records_csv(std::ostream& out, const std::vector<MetricsRecord>& records);

struct AggregateCell {
  std::string condition;
  std::string bin;
  std::size_t count = 0;
  double psnr_mean = 0.0;  // over finite PSNR values; NaN when none
  std::size_t psnr_inf_count = 0;
  double ssim_mean = 0.0;
  double missed_mean = 0.0;
  double excess_mean = 0.0;
  double iou_mean = 0.0;
};

struct AggregateTable {
  std::vector<std::string> conditions;  // first-seen order
  std::vector<std::string> bins;        // first-seen order unless `bin_order` given
  std::map<std::pair<std::string, std::string>, AggregateCell> cells;

  const AggregateCell* find(const std::string& condition, const std::string& bin) const;
};

// Means per (condition, bin). Throws Aggregation on empty input.
AggregateTable aggregate(const std::vector<MetricsRecord>& records,
                         const std::vector<std::string>& bin_order = {});

// Long format: one row per cell.
void write_aggregate_csv(std::ostream& out, const AggregateTable& table);
// Wide layout: one row per (metric, bin), one column per condition.
void write_wide_table_csv(std::ostream& out, const AggregateTable& table);

}  // namespace maskopt
