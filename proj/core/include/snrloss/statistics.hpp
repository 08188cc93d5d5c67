#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace snrloss {

struct KsResult {
  double statistic = 0.0;
  double threshold_1pct = 0.0;
  bool pass() const { return statistic < threshold_1pct; }
};

/// One-sample Kolmogorov-Smirnov distance against a continuous cdf.
/// Samples must be sorted ascending; threshold 1.63 / sqrt(M). Throws kEmptySamples.
KsResult ks_distance(const std::vector<double>& sorted_samples, const std::function<double(double)>& cdf);

/// Two-sample statistic; threshold 1.63 sqrt((n + m) / (n m)).
KsResult ks_two_sample(const std::vector<double>& sorted_a, const std::vector<double>& sorted_b);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::uint64_t> counts;

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double left(std::size_t i) const { return lo + bin_width() * static_cast<double>(i); }
  double right(std::size_t i) const {
    return i + 1 == counts.size() ? hi : lo + bin_width() * static_cast<double>(i + 1);
  }
  std::uint64_t total() const;
  void add(double x);
  /// Adds counts of a histogram with identical binning.
  void merge(const Histogram& other);
};

Histogram make_histogram(std::size_t bins, double lo = 0.0, double hi = 1.0);
Histogram histogram_of(const std::vector<double>& samples, std::size_t bins, double lo = 0.0, double hi = 1.0);

struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased
  double std_error() const;
};

/// Computed in the order given; pass sorted samples for order-independent results.
Moments moments_of(const std::vector<double>& samples);

/// Keeps `target` evenly spaced order statistics of a sorted vector.
std::vector<double> thin_sorted(const std::vector<double>& sorted, std::size_t target);

}  // namespace snrloss
