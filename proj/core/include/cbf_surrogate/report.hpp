#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cbf_surrogate/crossval.hpp"
#include "cbf_surrogate/datamodel.hpp"
#include "cbf_surrogate/spectral.hpp"
#include "cbf_surrogate/stats.hpp"

namespace cbf_surrogate {

enum class FeatureScope { region, whole_brain };
enum class SweepMode { single, prefix };

struct GridSpec {
  std::vector<double> c_values{0.125, 0.5, 2.0, 8.0, 32.0, 128.0, 512.0};
  std::vector<double> gamma_multipliers{1.0 / 512, 1.0 / 128, 1.0 / 32, 1.0 / 8, 0.5, 2.0};
  std::vector<double> epsilon_values{0.01, 0.1, 0.3};

  HyperGrid for_features(std::size_t d) const {
    return HyperGrid::scaled(c_values, gamma_multipliers, epsilon_values, d);
  }
};

struct ExperimentSettings {
  GridSpec grid;
  CvSettings cv;        // cv.jobs is the worker count for independent tasks
  FeatureScope scope = FeatureScope::region;
  SweepMode sweep_mode = SweepMode::single;
  TTestKind ttest = TTestKind::pooled;
  int mmse_split = 28;  // MCI with mmse >= split is "high"
  CvRunner runner;      // defaults to nested_cv_predict
};

struct PredictionSet {
  RegionKey region;
  double freq_max = 0.0;
  OofPrediction oof;
};

// Holds a cohort with its cached spectral features, covariate-adjusted CBF
// targets and cross-validated predictions.
class Experiment {
 public:
  Experiment(const Cohort& cohort, ExperimentSettings settings);

  const Cohort& cohort() const noexcept { return cohort_; }
  const ExperimentSettings& settings() const noexcept { return settings_; }

  // Age/sex-adjusted region CBF per subject.
  const std::vector<double>& adjusted_cbf(const RegionKey& region);
  // Per-subject feature vectors for the region (or every atlas ROI under
  // whole-brain scope) restricted to `bins`.
  Matrix features(const RegionKey& region, const std::vector<std::size_t>& bins);
  const std::vector<SpectralFeatureVector>& spectra(const RegionKey& region);

  // Cached nested-CV predictions. prefetch runs the missing tasks in parallel.
  const PredictionSet& predict(const RegionKey& region, const FrequencyRange& range);
  void prefetch(const std::vector<std::pair<RegionKey, FrequencyRange>>& tasks);

  // Cached predictions in deterministic (region, freq_max) order.
  std::vector<const PredictionSet*> all_predictions() const;

  OofPrediction run_cv(const Matrix& x, const std::vector<double>& y) const;
  // Same, with the grid search restricted to `jobs` threads.
  OofPrediction run_cv(const Matrix& x, const std::vector<double>& y, std::size_t jobs) const;

 private:
  using Key = std::pair<RegionKey, double>;
  PredictionSet compute(const RegionKey& region, const FrequencyRange& range, std::size_t jobs);

  const Cohort& cohort_;
  ExperimentSettings settings_;
  mutable std::mutex mutex_;
  std::map<RegionKey, std::vector<SpectralFeatureVector>> spectra_;
  std::map<RegionKey, std::vector<double>> adjusted_;
  std::map<Key, PredictionSet> predictions_;
};

struct EvaluationRow {
  RegionKey region;
  double freq_max = 0.0;
  std::size_t n = 0;
  double r = 0.0;
  double p = 1.0;
  double fdr_p = 1.0;
  bool undefined = false;
};

// Nested-CV correlation of actual vs predicted CBF for every (region, range);
// FDR runs across the regions of each range. Sorted by (freq_max, region).
std::vector<EvaluationRow> evaluate_regions(Experiment& experiment,
                                            const std::vector<RegionKey>& regions,
                                            const std::vector<FrequencyRange>& ranges);

struct SweepRow {
  std::size_t bin_index = 0;
  double bin_center = 0.0;
  std::size_t n = 0;
  double r = 0.0;
  double p = 1.0;
  bool undefined = false;
  double mean_abs_diff = 0.0;
  double sd_abs_diff = 0.0;
};

// One nested-CV run per bin: the bin alone (single) or bins 0..k (prefix).
std::vector<SweepRow> frequency_sweep(Experiment& experiment, const RegionKey& region);

struct RelativeCbf {
  RegionKey region;
  RegionKey reference;            // the region's lobe, or total lobar GM for a lobe
  std::vector<double> actual;     // region / reference per subject, then age/sex adjusted
  std::vector<double> predicted;  // predicted region / predicted reference; empty if absent
};

RegionKey reference_region(const RoiAtlas& atlas, const RegionKey& region);

// Relative CBF for a roi or lobe. Predicted values come from the region's and
// its reference's own models at `range`; pass nullopt to skip them.
RelativeCbf relative_cbf_for(Experiment& experiment, const RegionKey& region,
                             const std::optional<FrequencyRange>& range);

enum class Subgroup { NC, MCI_high, MCI_low };
Subgroup subgroup_of(const SubjectRecord& s, int mmse_split);

struct GroupComparison {
  RegionKey region;
  std::string variant;     // "actual" or "predicted"
  std::string comparison;  // e.g. "NC_vs_MCI_low"
  std::size_t n_a = 0, n_b = 0;
  double mean_a = 0.0, mean_b = 0.0;
  StatResult test;
  bool computable = true;
};

// NC, MCI-high and MCI-low compared pairwise by ttest2 on each variant. FDR is
// taken over the three comparisons of one (region, variant).
std::vector<GroupComparison> group_compare(const Cohort& cohort, const RelativeCbf& rel,
                                           int mmse_split, TTestKind kind = TTestKind::pooled);

StatResult cognition_correlation(std::span<const double> relative_cbf,
                                 std::span<const double> mmse);

struct CognitionRow {
  RegionKey region;
  std::string variant;
  StatResult result;
};

// cognition_correlation per region and variant; FDR across regions per variant.
std::vector<CognitionRow> cognition_table(const Cohort& cohort,
                                          const std::vector<RelativeCbf>& rels);

struct DemographicRow {
  std::string variable;
  std::size_t nc_n = 0, mci_n = 0;
  double nc_mean = 0, nc_sd = 0, nc_min = 0, nc_max = 0;
  double mci_mean = 0, mci_sd = 0, mci_min = 0, mci_max = 0;
  std::string test;  // "ttest2" or "chisq"
  StatResult result;
};

// Age, sex (female count / fraction in the mean column), education and MMSE.
std::vector<DemographicRow> summarize_cohort(const Cohort& cohort,
                                             TTestKind kind = TTestKind::pooled);

// CSV writers for the output tables.
void write_features_csv(std::ostream& out, Experiment& experiment,
                        const std::vector<RegionKey>& regions);
void write_predictions_csv(std::ostream& out, const Cohort& cohort,
                           const std::vector<const PredictionSet*>& sets, std::uint64_t seed);
void write_evaluation_csv(std::ostream& out, const std::vector<EvaluationRow>& rows);
void write_sweep_csv(std::ostream& out, const RegionKey& region,
                     const std::vector<SweepRow>& rows);
void write_groups_csv(std::ostream& out, const std::vector<GroupComparison>& rows);
void write_cognition_csv(std::ostream& out, const std::vector<CognitionRow>& rows);
void write_demographics_csv(std::ostream& out, const std::vector<DemographicRow>& rows);

// Scatter of actual vs predicted CBF for one prediction set.
void write_prediction_figure(const PredictionSet& set, const EvaluationRow& row,
                             const std::filesystem::path& path);

std::string format_freq(double f_max);  // "0.15"
std::string region_file_stem(const RegionKey& region);

}  // namespace cbf_surrogate
