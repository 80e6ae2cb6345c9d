#include "cbf_surrogate/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cbf_surrogate/datamodel.hpp"
#include "cbf_surrogate/error.hpp"

namespace cbf_surrogate {

BinGrid::BinGrid() {
  for (std::size_t k = 0; k <= kNumBins; ++k) {
    edges[k] = kStart + static_cast<double>(k) * kWidth;
  }
}

FrequencyRange::FrequencyRange(double f_max) : f_max_(f_max) {
  if (!(f_max > BinGrid::kStart) || f_max > BinGrid{}.upper() + 1e-12) {
    throw ValidationError("frequency range maximum " + std::to_string(f_max) +
                          " Hz outside (0.01, 0.2244]");
  }
}

bool FrequencyRange::is_standard() const noexcept {
  for (double s : {0.10, 0.15, 0.20}) {
    if (std::abs(f_max_ - s) < 1e-12) return true;
  }
  return false;
}

std::vector<double> detrend_demean(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 3) throw ValidationError("detrend needs at least 3 samples");
  // Centered time index makes the intercept and slope decouple.
  const double t_mid = 0.5 * static_cast<double>(n - 1);
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - t_mid;
    stt += t * t;
    sty += t * (series[i] - mean);
  }
  const double slope = sty / stt;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = series[i] - mean - slope * (static_cast<double>(i) - t_mid);
  }
  // Second pass removes the rounding residue left by the first.
  double m2 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) m2 += out[i];
  m2 /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) s2 += (static_cast<double>(i) - t_mid) * (out[i] - m2);
  const double b2 = s2 / stt;
  for (std::size_t i = 0; i < n; ++i) out[i] -= m2 + b2 * (static_cast<double>(i) - t_mid);
  return out;
}

Periodogram periodogram(std::span<const double> series, double tr) {
  const std::size_t n = series.size();
  if (n < kMinTimepoints) {
    throw ValidationError("periodogram needs at least " + std::to_string(kMinTimepoints) +
                          " samples, got " + std::to_string(n));
  }
  if (!(tr > 0)) throw ValidationError("tr must be > 0");
  if (1.0 / (2.0 * tr) < BinGrid{}.upper()) {
    throw ValidationError("tr too long for 8-bin grid (Nyquist " + std::to_string(0.5 / tr) +
                          " Hz < 0.2244 Hz)");
  }

  // Direct DFT. Twiddles come from a table indexed by (k*t mod N), so every
  // angle is reduced exactly before cos/sin.
  std::vector<double> cos_table(n), sin_table(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    cos_table[j] = std::cos(angle);
    sin_table[j] = std::sin(angle);
  }

  const std::size_t half = n / 2;
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  Periodogram out;
  out.freqs.resize(half);
  out.power.resize(half);
  for (std::size_t k = 1; k <= half; ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      re += series[t] * cos_table[idx];
      im -= series[t] * sin_table[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    const double mag2 = re * re + im * im;
    const bool nyquist = (2 * k == n);
    out.freqs[k - 1] = static_cast<double>(k) / (static_cast<double>(n) * tr);
    out.power[k - 1] = (nyquist ? 1.0 : 2.0) * mag2 / nn;
  }
  return out;
}

SpectralFeatureVector bin_power(const Periodogram& pg, const BinGrid& grid) {
  SpectralFeatureVector out;
  std::array<double, kNumBins> sums{};
  for (std::size_t i = 0; i < pg.freqs.size(); ++i) {
    const double f = pg.freqs[i];
    out.total_variance += pg.power[i];
    if (f < grid.edges[0] || f >= grid.edges[kNumBins]) continue;
    for (std::size_t k = 0; k < kNumBins; ++k) {
      if (f >= grid.edges[k] && f < grid.edges[k + 1]) {
        sums[k] += pg.power[i];
        ++out.n_freqs_per_bin[k];
        break;
      }
    }
  }
  for (std::size_t k = 0; k < kNumBins; ++k) {
    if (out.n_freqs_per_bin[k] == 0) {
      throw ValidationError("spectral bin " + std::to_string(k) + " [" +
                            std::to_string(grid.edges[k]) + ", " +
                            std::to_string(grid.edges[k + 1]) +
                            ") Hz contains no frequencies; series too short");
    }
    out.bin_power[k] = sums[k] / static_cast<double>(out.n_freqs_per_bin[k]);
  }
  return out;
}

std::vector<std::size_t> select_bins(const FrequencyRange& range, const BinGrid& grid) {
  std::vector<std::size_t> bins;
  for (std::size_t k = 0; k < kNumBins; ++k) {
    if (grid.edges[k] < range.f_max()) bins.push_back(k);
  }
  return bins;
}

SpectralFeatureVector spectral_features(std::span<const double> series, double tr) {
  const auto clean = detrend_demean(series);
  return bin_power(periodogram(clean, tr));
}

}  // namespace cbf_surrogate
