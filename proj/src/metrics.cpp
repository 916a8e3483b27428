#include "maskopt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "maskopt/numeric.hpp"

namespace maskopt {
namespace {

void check_pair(const Image& ref, const Image& test, const char* what) {
  require_same_extents(ref.extents(), test.extents(), what);
  if (ref.channels() != test.channels()) {
    fail(ErrorKind::InputShape, std::string(what) + ": channel mismatch");
  }
}

double psnr_from_sq(std::span<const double> sq) {
  const double mse = pairwise_sum(sq) / static_cast<double>(sq.size());
  if (mse == 0.0) return kPsnrInfinity;
  return 10.0 * std::log10(1.0 / mse);
}

std::vector<double> gaussian_window(const SsimParams& p) {
  std::vector<double> w(p.window);
  const double c = (p.window - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < p.window; ++i) {
    w[i] = std::exp(-0.5 * (i - c) * (i - c) / (p.sigma * p.sigma));
    sum += w[i];
  }
  for (auto& v : w) v /= sum;
  return w;
}

// "Valid" separable filtering of a plane.
std::vector<double> filter_valid(const std::vector<double>& plane, int h, int w,
                                 const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int oh = h - n + 1;
  const int ow = w - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[i] * plane[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

double psnr(const Image& ref, const Image& test) {
  check_pair(ref, test, "psnr");
  if (ref.size() == 0) fail(ErrorKind::InputShape, "psnr: empty image");
  std::vector<double> sq(ref.size());
  auto a = ref.data();
  auto b = test.data();
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double d = double(a[i]) - double(b[i]);
    sq[i] = d * d;
  }
  return psnr_from_sq(sq);
}

double psnr_masked(const Image& ref, const Image& test, const BinaryMask& region) {
  check_pair(ref, test, "psnr_masked");
  require_same_extents(ref.extents(), region.extents(), "psnr_masked");
  if (!region.any()) fail(ErrorKind::Domain, "psnr_masked: empty region");
  const int c = ref.channels();
  std::vector<double> sq;
  auto a = ref.data();
  auto b = test.data();
  for (std::size_t p = 0; p < region.size(); ++p) {
    if (!region[p]) continue;
    for (int k = 0; k < c; ++k) {
      const double d = double(a[p * c + k]) - double(b[p * c + k]);
      sq.push_back(d * d);
    }
  }
  return psnr_from_sq(sq);
}

std::vector<double> ssim_map(const Image& ref, const Image& test, int channel,
                             const SsimParams& params) {
  check_pair(ref, test, "ssim");
  const int h = ref.height();
  const int w = ref.width();
  if (params.window < 1 || h < params.window || w < params.window) {
    fail(ErrorKind::InputShape, "ssim: image smaller than the window");
  }
  if (channel < 0 || channel >= ref.channels()) fail(ErrorKind::InputShape, "ssim: bad channel");
  const int c = ref.channels();
  const std::size_t n = static_cast<std::size_t>(h) * w;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = ref.data()[i * c + channel];
    y[i] = test.data()[i * c + channel];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto k = gaussian_window(params);
  const auto mx = filter_valid(x, h, w, k);
  const auto my = filter_valid(y, h, w, k);
  const auto sxx = filter_valid(xx, h, w, k);
  const auto syy = filter_valid(yy, h, w, k);
  const auto sxy = filter_valid(xy, h, w, k);
  constexpr double kRange = 1.0;
  const double c1 = (params.k1 * kRange) * (params.k1 * kRange);
  const double c2 = (params.k2 * kRange) * (params.k2 * kRange);
  std::vector<double> out(mx.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    const double num = (2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2);
    const double den = (mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2);
    out[i] = num / den;
  }
  return out;
}

double ssim(const Image& ref, const Image& test, const SsimParams& params) {
  std::vector<double> per_channel;
  for (int ch = 0; ch < ref.channels(); ++ch) {
    const auto map = ssim_map(ref, test, ch, params);
    per_channel.push_back(pairwise_sum(map) / static_cast<double>(map.size()));
  }
  return pairwise_sum(per_channel) / static_cast<double>(per_channel.size());
}

double ssim_masked(const Image& ref, const Image& test, const BinaryMask& region,
                   const SsimParams& params) {
  require_same_extents(ref.extents(), region.extents(), "ssim_masked");
  const int ow = ref.width() - params.window + 1;
  const int half = params.window / 2;
  std::vector<double> per_channel;
  for (int ch = 0; ch < ref.channels(); ++ch) {
    const auto map = ssim_map(ref, test, ch, params);
    std::vector<double> picked;
    for (std::size_t i = 0; i < map.size(); ++i) {
      const int y = static_cast<int>(i / ow) + half;
      const int x = static_cast<int>(i % ow) + half;
      if (region.at(y, x)) picked.push_back(map[i]);
    }
    if (picked.empty()) fail(ErrorKind::Domain, "ssim_masked: no window centered in the region");
    per_channel.push_back(pairwise_sum(picked) / static_cast<double>(picked.size()));
  }
  return pairwise_sum(per_channel) / static_cast<double>(per_channel.size());
}

std::string MaskBin::label() const {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return std::string(buf);
  };
  return num(lo) + "-" + num(hi);
}

std::vector<MaskBin> default_bins() { return {{0, 10}, {10, 20}, {20, 30}, {30, 40}}; }

std::optional<MaskBin> find_bin(const std::vector<MaskBin>& bins, double ratio) {
  for (const auto& b : bins) {
    if (b.contains(ratio)) return b;
  }
  return std::nullopt;
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_records_csv(std::ostream& out, const std::vector<MetricsRecord>& records) {
  out << kRecordCsvHeader << "\n";
  for (const auto& r : records) {
    out << r.sample_id << ',' << r.condition << ',' << r.bin << ',' << format_real(r.mask_ratio)
        << ',' << format_real(r.psnr) << ',' << format_real(r.ssim) << ',' << r.coverage.missed
        << ',' << r.coverage.excess << ',' << format_real(r.coverage.iou) << "\n";
  }
}

const AggregateCell* AggregateTable::find(const std::string& condition,
                                          const std::string& bin) const {
  auto it = cells.find({condition, bin});
  return it == cells.end() ? nullptr : &it->second;
}

AggregateTable aggregate(const std::vector<MetricsRecord>& records,
                         const std::vector<std::string>& bin_order) {
  if (records.empty()) fail(ErrorKind::Aggregation, "aggregate: no records");
  AggregateTable table;
  table.bins = bin_order;
  struct Sums {
    std::vector<double> psnr, ssim, missed, excess, iou;
    std::size_t inf = 0;
  };
  std::map<std::pair<std::string, std::string>, Sums> sums;
  for (const auto& r : records) {
    if (std::find(table.conditions.begin(), table.conditions.end(), r.condition) ==
        table.conditions.end()) {
      table.conditions.push_back(r.condition);
    }
    if (std::find(table.bins.begin(), table.bins.end(), r.bin) == table.bins.end()) {
      table.bins.push_back(r.bin);
    }
    auto& s = sums[{r.condition, r.bin}];
    if (std::isinf(r.psnr)) {
      ++s.inf;
    } else {
      s.psnr.push_back(r.psnr);
    }
    s.ssim.push_back(r.ssim);
    s.missed.push_back(static_cast<double>(r.coverage.missed));
    s.excess.push_back(static_cast<double>(r.coverage.excess));
    s.iou.push_back(r.coverage.iou);
  }
  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? std::nan("") : pairwise_sum(v) / static_cast<double>(v.size());
  };
  for (const auto& [key, s] : sums) {
    AggregateCell cell;
    cell.condition = key.first;
    cell.bin = key.second;
    cell.count = s.ssim.size();
    cell.psnr_mean = mean(s.psnr);
    cell.psnr_inf_count = s.inf;
    cell.ssim_mean = mean(s.ssim);
    cell.missed_mean = mean(s.missed);
    cell.excess_mean = mean(s.excess);
    cell.iou_mean = mean(s.iou);
    table.cells.emplace(key, cell);
  }
  return table;
}

void write_aggregate_csv(std::ostream& out, const AggregateTable& table) {
  out << "condition,bin,count,psnr_mean,psnr_inf_count,ssim_mean,missed_mean,excess_mean,"
         "iou_mean\n";
  for (const auto& cond : table.conditions) {
    for (const auto& bin : table.bins) {
      const auto* c = table.find(cond, bin);
      if (!c) continue;
      out << cond << ',' << bin << ',' << c->count << ',' << format_real(c->psnr_mean) << ','
          << c->psnr_inf_count << ',' << format_real(c->ssim_mean) << ','
          << format_real(c->missed_mean) << ',' << format_real(c->excess_mean) << ','
          << format_real(c->iou_mean) << "\n";
    }
  }
}

void write_wide_table_csv(std::ostream& out, const AggregateTable& table) {
  out << "metric,bin";
  for (const auto& cond : table.conditions) out << ',' << cond;
  out << "\n";
  for (const char* metric : {"psnr", "ssim"}) {
    for (const auto& bin : table.bins) {
      out << metric << ',' << bin;
      for (const auto& cond : table.conditions) {
        const auto* c = table.find(cond, bin);
        out << ',';
        if (c) out << format_real(metric[0] == 'p' ? c->psnr_mean : c->ssim_mean);
      }
      out << "\n";
    }
  }
}

}  // namespace maskopt
