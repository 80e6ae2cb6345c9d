#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace cbf_surrogate {

inline constexpr std::size_t kNumBins = 8;

// Eight contiguous half-open bins [edges[k], edges[k+1]) of width 0.0268 Hz
// starting at 0.01 Hz; the last edge is 0.2244 Hz.
struct BinGrid {
  static constexpr double kStart = 0.01;
  static constexpr double kWidth = 0.0268;

  std::array<double, kNumBins + 1> edges;

  BinGrid();
  double upper() const noexcept { return edges[kNumBins]; }
  double center(std::size_t bin) const { return 0.5 * (edges.at(bin) + edges.at(bin + 1)); }
};

struct SpectralFeatureVector {
  std::array<double, kNumBins> bin_power{};         // mean one-sided power per bin
  std::array<std::size_t, kNumBins> n_freqs_per_bin{};
  double total_variance = 0.0;                       // sum of all one-sided power
};

// Upper frequency of an analysis range; the lower end is always 0.01 Hz.
class FrequencyRange {
 public:
  // Accepts f_max in (0.01, 0.2244]. Values other than 0.10/0.15/0.20 are
  // allowed; is_standard() tells callers whether to warn.
  explicit FrequencyRange(double f_max);

  double f_min() const noexcept { return BinGrid::kStart; }
  double f_max() const noexcept { return f_max_; }
  bool is_standard() const noexcept;

  friend auto operator<=>(const FrequencyRange&, const FrequencyRange&) = default;

 private:
  double f_max_;
};

// Removes the least-squares line a + b*t. Requires at least 3 samples.
std::vector<double> detrend_demean(std::span<const double> series);

struct Periodogram {
  std::vector<double> freqs;  // k / (N tr), k = 1..floor(N/2)
  std::vector<double> power;  // one-sided, sums to the population variance
};

// Rectangular-window periodogram over the whole record. The input must already
// be detrended; N >= 64 and the Nyquist frequency must reach the top bin edge.
Periodogram periodogram(std::span<const double> series, double tr);

// Mean power over grid frequencies inside each bin; throws if a bin is empty.
SpectralFeatureVector bin_power(const Periodogram& pg, const BinGrid& grid = BinGrid{});

// Bins whose left edge lies strictly below f_max.
std::vector<std::size_t> select_bins(const FrequencyRange& range, const BinGrid& grid = BinGrid{});

// detrend_demean -> periodogram -> bin_power.
SpectralFeatureVector spectral_features(std::span<const double> series, double tr);

}  // namespace cbf_surrogate
