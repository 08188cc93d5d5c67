#include "snrloss/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "snrloss/error.hpp"

namespace snrloss {

KsResult ks_distance(const std::vector<double>& sorted_samples, const std::function<double(double)>& cdf) {
  if (sorted_samples.empty()) throw Error(ErrorCode::kEmptySamples, "KS needs at least one sample");
  const double m = static_cast<double>(sorted_samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
    const double f = cdf(sorted_samples[i]);
    const double lo = static_cast<double>(i) / m;
    const double hi = static_cast<double>(i + 1) / m;
    d = std::max({d, hi - f, f - lo});
  }
  return {d, 1.63 / std::sqrt(m)};
}

KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kEmptySamples, "KS needs non-empty samples");
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return {d, 1.63 * std::sqrt((n + m) / (n * m))};
}

std::uint64_t Histogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

void Histogram::add(double x) {
  const double w = bin_width();
  auto idx = static_cast<std::ptrdiff_t>(std::floor((x - lo) / w));
  idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(counts.size()) - 1);
  ++counts[static_cast<std::size_t>(idx)];
}

void Histogram::merge(const Histogram& other) {
  if (other.counts.size() != counts.size() || other.lo != lo || other.hi != hi) {
    throw Error(ErrorCode::kBadParam, "histogram binning differs");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

Histogram make_histogram(std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo)) throw Error(ErrorCode::kBadParam, "invalid histogram binning");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  return h;
}

Histogram histogram_of(const std::vector<double>& samples, std::size_t bins, double lo, double hi) {
  Histogram h = make_histogram(bins, lo, hi);
  for (double x : samples) h.add(x);
  return h;
}

double Moments::std_error() const {
  return count > 0 ? std::sqrt(variance / static_cast<double>(count)) : 0.0;
}

Moments moments_of(const std::vector<double>& samples) {
  Moments m;
  for (double x : samples) {
    ++m.count;
    const double d = x - m.mean;
    m.mean += d / static_cast<double>(m.count);
    m.variance += d * (x - m.mean);
  }
  m.variance = m.count > 1 ? m.variance / static_cast<double>(m.count - 1) : 0.0;
  return m;
}

std::vector<double> thin_sorted(const std::vector<double>& sorted, std::size_t target) {
  if (sorted.size() <= target || target == 0) return sorted;
  std::vector<double> out(target);
  const double step = static_cast<double>(sorted.size()) / static_cast<double>(target);
  for (std::size_t i = 0; i < target; ++i) {
    out[i] = sorted[static_cast<std::size_t>((static_cast<double>(i) + 0.5) * step)];
  }
  return out;
}

}  // namespace snrloss
