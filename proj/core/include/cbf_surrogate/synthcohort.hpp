#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace cbf_surrogate {

// Synthetic cohort with a known coupling between in-band spectral power and CBF.
//
// For subject i and ROI j a latent z_ij ~ N(0,1) sets CBF = cbf_base + cbf_sd * z_ij.
// The ROI time series is
//
//   100 + sum_{k in band} A max(0, 1 + kappa z_ij) cos(2 pi k t / N + phi)
//       + sum_{k outside band, 0.01 <= f_k < 0.2244} A exp(0.3 u) cos(2 pi k t / N + phi')
//       + noise_sd * white noise
//
// with every sinusoid on a DFT grid frequency k / (N tr) and random phases, so
// band power is exactly localized. Low-cognition MCI subjects have
// their latent value lowered in the designated ROI "parietal_1" such that its
// lobe-relative CBF drops by deficit_sd standard deviations; MMSE is
// 30 - max(0, round(mmse_coupling * (severity + 0.2 noise))) clamped to [22, 30].
struct SynthConfig {
  std::size_t n_subjects = 71;
  std::size_t n_rois = 8;
  double tr = 0.72;
  std::size_t n_timepoints = 500;
  double band_lo = 0.10;
  double band_hi = 0.15;  // coupled band is [band_lo, band_hi)
  double coupling_kappa = 1.0;
  double noise_sd = 0.1;
  double mci_fraction = 26.0 / 71.0;
  double cbf_base = 60.0;
  double cbf_sd = 10.0;
  double mmse_coupling = 4.0;
  double deficit_sd = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

inline constexpr const char* kSynthTargetRoi = "parietal_1";

// ROI name for index j: lobes are assigned round-robin (frontal, temporal,
// parietal, occipital) and numbered from 1 within each lobe.
std::string synth_roi_name(std::size_t j);

// Writes manifest.csv, atlas.csv, ground_truth.csv and subjects/*.csv under
// out_dir and returns the manifest path. Output bytes depend only on cfg.
std::filesystem::path generate_cohort(const SynthConfig& cfg,
                                      const std::filesystem::path& out_dir);

}  // namespace cbf_surrogate
