#include "cbf_surrogate/synthcohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <vector>

#include "cbf_surrogate/csv.hpp"
#include "cbf_surrogate/datamodel.hpp"
#include "cbf_surrogate/error.hpp"
#include "cbf_surrogate/rng.hpp"
#include "cbf_surrogate/spectral.hpp"

namespace cbf_surrogate {

namespace {

// Sinusoid amplitude. White noise with sd 0.1 at N = 500 puts mean power
// 2 sd^2 / N = 4e-5 on every DFT frequency, five times the coupled power
// A^2 / 2 of a z = 0 subject, so in-band noise limits recoverability.
constexpr double kAmplitude = 0.004;
constexpr double kOffset = 100.0;
constexpr double kMmseNoise = 0.2;

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  const double top = BinGrid{}.upper();
  if (n_subjects < 2) throw ValidationError("synth: n_subjects must be >= 2");
  if (n_rois < 4) throw ValidationError("synth: n_rois must be >= 4 (one per lobe)");
  if (n_timepoints < kMinTimepoints) throw ValidationError("synth: n_timepoints must be >= 64");
  if (!(tr > 0) || 0.5 / tr < top) throw ValidationError("synth: Nyquist frequency below 0.2244 Hz");
  if (!(band_lo >= 0.01 && band_lo < band_hi && band_hi <= top + 1e-12)) {
    throw ValidationError("synth: coupled band must satisfy 0.01 <= lo < hi <= 0.2244");
  }
  if (!(coupling_kappa >= 0)) throw ValidationError("synth: coupling_kappa must be >= 0");
  if (!(noise_sd >= 0)) throw ValidationError("synth: noise_sd must be >= 0");
  if (!(mci_fraction >= 0 && mci_fraction <= 1)) {
    throw ValidationError("synth: mci_fraction must be in [0,1]");
  }
  if (!(cbf_sd >= 0) || !(cbf_base > 0)) throw ValidationError("synth: invalid CBF parameters");
  if (!(deficit_sd >= 0)) throw ValidationError("synth: deficit_sd must be >= 0");
  const double df = 1.0 / (static_cast<double>(n_timepoints) * tr);
  bool any = false;
  for (std::size_t k = 1; k <= n_timepoints / 2; ++k) {
    const double f = static_cast<double>(k) * df;
    if (f >= band_lo && f < band_hi) any = true;
  }
  if (!any) throw ValidationError("synth: coupled band contains no DFT grid frequency");
}

std::string synth_roi_name(std::size_t j) {
  return std::string(to_string(kLobes[j % 4])) + "_" + std::to_string(j / 4 + 1);
}

std::filesystem::path generate_cohort(const SynthConfig& cfg,
                                      const std::filesystem::path& out_dir) {
  cfg.validate();
  std::filesystem::create_directories(out_dir / "subjects");

  const std::size_t n = cfg.n_subjects;
  const std::size_t n_t = cfg.n_timepoints;
  const double df = 1.0 / (static_cast<double>(n_t) * cfg.tr);
  const double top = BinGrid{}.upper();

  std::vector<std::size_t> coupled, distractor;
  for (std::size_t k = 1; k <= n_t / 2; ++k) {
    const double f = static_cast<double>(k) * df;
    if (f >= cfg.band_lo && f < cfg.band_hi) {
      coupled.push_back(k);
    } else if (f >= BinGrid::kStart && f < top) {
      distractor.push_back(k);
    }
  }

  std::vector<std::string> rois(cfg.n_rois);
  for (std::size_t j = 0; j < cfg.n_rois; ++j) rois[j] = synth_roi_name(j);
  const std::size_t target = 2;  // parietal_1
  const std::size_t parietal_count = (cfg.n_rois + 1) / 4;
  // Lowering one member by delta lowers its lobe-relative value by roughly
  // delta * (m-1)/m while that ratio's spread scales with sqrt((m-1)/m).
  const double deficit_latent =
      parietal_count > 1
          ? cfg.deficit_sd / std::sqrt(static_cast<double>(parietal_count - 1) /
                                       static_cast<double>(parietal_count))
          : cfg.deficit_sd;

  {
    auto atlas = open_out(out_dir / "atlas.csv");
    csv::write_record(atlas, {"roi", "lobe", "in_lobar_gm"});
    for (std::size_t j = 0; j < cfg.n_rois; ++j) {
      csv::write_record(atlas, {rois[j], std::string(to_string(kLobes[j % 4])), "1"});
    }
  }

  SplitMix64 rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order, rng);
  const auto n_mci = static_cast<std::size_t>(std::llround(cfg.mci_fraction * static_cast<double>(n)));
  const std::size_t n_low = (n_mci + 1) / 2;
  std::vector<int> group(n, 0), severity(n, 0);
  for (std::size_t p = 0; p < n_mci; ++p) {
    group[order[p]] = 1;
    if (p < n_low) severity[order[p]] = 1;
  }

  // Twiddle tables so sinusoids on grid frequencies are evaluated at exact angles.
  std::vector<double> cos_table(n_t), sin_table(n_t);
  for (std::size_t j = 0; j < n_t; ++j) {
    const double angle =
        2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_t);
    cos_table[j] = std::cos(angle);
    sin_table[j] = std::sin(angle);
  }
  auto add_sinusoid = [&](std::vector<double>& x, std::size_t k, double amp, double phase) {
    const double cp = amp * std::cos(phase), sp = amp * std::sin(phase);
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n_t; ++t) {
      x[t] += cos_table[idx] * cp - sin_table[idx] * sp;
      idx += k;
      if (idx >= n_t) idx -= n_t;
    }
  };

  auto manifest = open_out(out_dir / "manifest.csv");
  csv::write_record(manifest, {"subject_id", "group", "age", "sex", "education", "mmse", "tr",
                               "timeseries_path", "cbf_path"});
  auto truth = open_out(out_dir / "ground_truth.csv");
  csv::write_record(truth, {"subject_id", "roi", "latent_z", "true_coupled_power"});

  for (std::size_t i = 0; i < n; ++i) {
    char id_buf[32];
    std::snprintf(id_buf, sizeof(id_buf), "sub-%03zu", i + 1);
    const std::string id = id_buf;

    const double age = std::round(std::clamp(72.0 + 7.0 * rng.normal(), 55.0, 90.0) * 10.0) / 10.0;
    const bool female = rng.uniform() < 0.5;
    const double education = std::clamp(std::round(16.0 + 2.8 * rng.normal()), 8.0, 22.0);
    const double impairment = cfg.mmse_coupling * (severity[i] + kMmseNoise * rng.normal());
    const double drop = std::max(0.0, std::round(impairment));
    const int mmse = static_cast<int>(std::clamp(30.0 - drop, 22.0, 30.0));

    Matrix series(n_t, cfg.n_rois);
    std::vector<double> cbf(cfg.n_rois);
    for (std::size_t j = 0; j < cfg.n_rois; ++j) {
      double z = rng.normal();
      if (j == target && severity[i] == 1) z -= deficit_latent;
      cbf[j] = cfg.cbf_base + cfg.cbf_sd * z;

      std::vector<double> x(n_t, kOffset);
      const double amp = kAmplitude * std::max(0.0, 1.0 + cfg.coupling_kappa * z);
      for (auto k : coupled) add_sinusoid(x, k, amp, 2.0 * std::numbers::pi * rng.uniform());
      for (auto k : distractor) {
        const double a = kAmplitude * std::exp(0.3 * rng.normal());
        add_sinusoid(x, k, a, 2.0 * std::numbers::pi * rng.uniform());
      }
      for (std::size_t t = 0; t < n_t; ++t) x[t] += cfg.noise_sd * rng.normal();
      for (std::size_t t = 0; t < n_t; ++t) series(t, j) = x[t];

      const double coupled_power = static_cast<double>(coupled.size()) * 0.5 * amp * amp;
      csv::write_record(truth, {id, rois[j], csv::format_double(z),
                                csv::format_double(coupled_power)});
    }

    const std::string ts_rel = "subjects/" + id + "_timeseries.csv";
    const std::string cbf_rel = "subjects/" + id + "_cbf.csv";
    {
      auto ts = open_out(out_dir / ts_rel);
      csv::write_record(ts, rois);
      std::vector<std::string> rec(cfg.n_rois);
      for (std::size_t t = 0; t < n_t; ++t) {
        for (std::size_t j = 0; j < cfg.n_rois; ++j) rec[j] = csv::format_double(series(t, j));
        csv::write_record(ts, rec);
      }
    }
    {
      auto cf = open_out(out_dir / cbf_rel);
      csv::write_record(cf, {"roi", "cbf"});
      for (std::size_t j = 0; j < cfg.n_rois; ++j) {
        csv::write_record(cf, {rois[j], csv::format_double(cbf[j])});
      }
    }
    csv::write_record(manifest, {id, group[i] ? "MCI" : "NC", csv::format_double(age),
                                 female ? "F" : "M", csv::format_double(education),
                                 std::to_string(mmse), csv::format_double(cfg.tr), ts_rel,
                                 cbf_rel});
  }
  return out_dir / "manifest.csv";
}

}  // namespace cbf_surrogate
