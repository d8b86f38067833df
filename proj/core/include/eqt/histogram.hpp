#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eqt {

/// Fixed-bin histogram over [lo, hi). Samples outside are counted in `outside`.
struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> counts;
  std::size_t outside = 0;

  static Histogram build(std::span<const double> samples, double lo, double hi, std::size_t bins);

  std::size_t bins() const { return counts.size(); }
  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * bin_width(); }
  /// Counts normalized so the histogram integrates to 1 over all samples.
  std::vector<double> density() const;
  /// Centered moving average over `window` bins (odd).
  Histogram smoothed(std::size_t window) const;
};

/// Full width of a single-peaked profile at `fraction` of its maximum, from the
/// outermost level crossings (linear interpolation between bin centers).
double width_at_fraction(const Histogram& h, double fraction);

/// Half width at half maximum of a sample distribution, measured on a smoothed
/// histogram spanning +-`span_in_iqr` interquartile ranges around the median.
double sample_hwhm(std::span<const double> samples, double span_in_iqr = 4.0,
                   std::size_t bins = 400, std::size_t smooth = 5);

double median(std::vector<double> values);
double quantile(std::vector<double> values, double q);

}  // namespace eqt
