#include "eqt/histogram.hpp"

#include <algorithm>
#include <cmath>

#include "eqt/error.hpp"

namespace eqt {

Histogram Histogram::build(std::span<const double> samples, double lo, double hi,
                           std::size_t bins) {
  if (!(hi > lo) || bins == 0) throw ParameterError("histogram: need hi > lo and bins > 0");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0.0);
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (double s : samples) {
    if (!(s >= lo && s < hi)) {
      ++h.outside;
      continue;
    }
    auto i = static_cast<std::size_t>((s - lo) * scale);
    h.counts[std::min(i, bins - 1)] += 1.0;
  }
  return h;
}

std::vector<double> Histogram::density() const {
  double total = static_cast<double>(outside);
  for (double c : counts) total += c;
  std::vector<double> d(counts.size(), 0.0);
  if (total == 0.0) return d;
  const double norm = 1.0 / (total * bin_width());
  for (std::size_t i = 0; i < counts.size(); ++i) d[i] = counts[i] * norm;
  return d;
}

Histogram Histogram::smoothed(std::size_t window) const {
  if (window <= 1) return *this;
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  Histogram out = *this;
  const auto n = static_cast<std::ptrdiff_t>(counts.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::ptrdiff_t k = i - half; k <= i + half; ++k) {
      if (k >= 0 && k < n) s += counts[static_cast<std::size_t>(k)];
    }
    out.counts[static_cast<std::size_t>(i)] = s / static_cast<double>(window);
  }
  return out;
}

double width_at_fraction(const Histogram& h, double fraction) {
  const auto& c = h.counts;
  if (c.empty()) return 0.0;
  const auto peak_it = std::max_element(c.begin(), c.end());
  const double level = fraction * *peak_it;
  if (*peak_it <= 0.0) return 0.0;

  std::size_t first = 0;
  while (first < c.size() && c[first] < level) ++first;
  std::size_t last = c.size() - 1;
  while (last > 0 && c[last] < level) --last;

  double left = h.center(first);
  if (first > 0) {
    const double t = (level - c[first - 1]) / (c[first] - c[first - 1]);
    left = h.center(first - 1) + t * h.bin_width();
  }
  double right = h.center(last);
  if (last + 1 < c.size()) {
    const double t = (c[last] - level) / (c[last] - c[last + 1]);
    right = h.center(last) + t * h.bin_width();
  }
  return right - left;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw EstimationError("quantile of an empty sample");
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
  const double vlo = values[lo];
  const double vhi = hi == lo ? vlo : *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
  return vlo + (pos - static_cast<double>(lo)) * (vhi - vlo);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double sample_hwhm(std::span<const double> samples, double span_in_iqr, std::size_t bins,
                   std::size_t smooth) {
  std::vector<double> v(samples.begin(), samples.end());
  const double q1 = quantile(v, 0.25);
  const double q3 = quantile(v, 0.75);
  const double med = quantile(v, 0.5);
  const double iqr = q3 - q1;
  if (!(iqr > 0.0)) return 0.0;
  const Histogram h =
      Histogram::build(samples, med - span_in_iqr * iqr, med + span_in_iqr * iqr, bins)
          .smoothed(smooth);
  return 0.5 * width_at_fraction(h, 0.5);
}

}  // namespace eqt
