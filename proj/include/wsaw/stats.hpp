#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace wsaw {

/// A point estimate with a batch-means error bar. log_mean carries the
/// log-domain value for quantities (large partition functions) whose linear
/// mean overflows a double.
struct EstimateWithError {
  double mean = 0.0;
  double std_error = 0.0;
  double n_effective = 1.0;
  double log_mean = -std::numeric_limits<double>::infinity();
};

/// Batch-means estimate: batch size doubles until the batch count lands in
/// [32, 64] (fewer batches for short series). n_effective is the series
/// length deflated by the estimated autocorrelation.
inline EstimateWithError batch_means(std::span<const double> series) {
  EstimateWithError out;
  const std::size_t m = series.size();
  if (m == 0) return out;

  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double x : series) var += (x - mean) * (x - mean);
  var = m > 1 ? var / static_cast<double>(m - 1) : 0.0;

  std::size_t b = 1;
  while (m / b > 64) b <<= 1;
  const std::size_t nb = m / b;

  out.mean = mean;
  out.log_mean = mean > 0 ? std::log(mean) : -std::numeric_limits<double>::infinity();
  if (nb < 2) {
    out.std_error = std::sqrt(var / static_cast<double>(m));
    out.n_effective = static_cast<double>(m);
    return out;
  }

  std::vector<double> bm(nb, 0.0);
  for (std::size_t i = 0; i < nb; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < b; ++j) s += series[i * b + j];
    bm[i] = s / static_cast<double>(b);
  }
  double bmean = 0.0;
  for (double x : bm) bmean += x;
  bmean /= static_cast<double>(nb);
  double bvar = 0.0;
  for (double x : bm) bvar += (x - bmean) * (x - bmean);
  bvar /= static_cast<double>(nb - 1);

  out.std_error = std::sqrt(bvar / static_cast<double>(nb));
  if (bvar > 0.0 && var > 0.0) {
    double neff = static_cast<double>(m) * var / (static_cast<double>(b) * bvar);
    out.n_effective = std::clamp(neff, 1.0, static_cast<double>(m));
  } else {
    out.n_effective = static_cast<double>(m);
  }
  return out;
}

/// log(sum of exp(values)) accumulated without overflow.
class LogAccumulator {
 public:
  void add(double log_x) {
    if (log_x == -std::numeric_limits<double>::infinity()) return;
    if (log_x > max_log_) {
      sum_ = sum_ * std::exp(max_log_ - log_x) + 1.0;
      max_log_ = log_x;
    } else {
      sum_ += std::exp(log_x - max_log_);
    }
  }

  void merge(const LogAccumulator& o) {
    if (o.empty()) return;
    if (o.max_log_ > max_log_) {
      sum_ = sum_ * std::exp(max_log_ - o.max_log_) + o.sum_;
      max_log_ = o.max_log_;
    } else {
      sum_ += o.sum_ * std::exp(o.max_log_ - max_log_);
    }
  }

  bool empty() const { return sum_ == 0.0; }

  double log_sum() const {
    if (empty()) return -std::numeric_limits<double>::infinity();
    return max_log_ + std::log(sum_);
  }

 private:
  double max_log_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

}  // namespace wsaw
