#include "cbf_surrogate/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "cbf_surrogate/csv.hpp"
#include "cbf_surrogate/error.hpp"
#include "cbf_surrogate/parallel.hpp"
#include "cbf_surrogate/svg.hpp"

namespace cbf_surrogate {

namespace {

using csv::format_double;

std::string na_or(double v, bool undefined) { return undefined ? "NA" : format_double(v); }

// FDR across the entries flagged usable; others get fdr_p = 1.
std::vector<double> fdr_subset(const std::vector<double>& p, const std::vector<bool>& usable) {
  std::vector<double> sub;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (usable[i]) sub.push_back(p[i]);
  }
  const auto q = fdr_bh(sub);
  std::vector<double> out(p.size(), 1.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (usable[i]) out[i] = q[k++];
  }
  return out;
}

// Unweighted mean of member-ROI CBF per subject.
std::vector<double> raw_region_cbf(const Cohort& cohort, const RegionKey& region) {
  const auto members = region_members(cohort.atlas, region);
  std::vector<double> out(cohort.size());
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const auto& cbf = cohort.subjects[i].cbf;
    if (members.size() == 1) {
      out[i] = cbf.at(members[0]);
      continue;
    }
    double sum = 0.0;
    for (const auto& m : members) sum += cbf.at(m);
    out[i] = sum / static_cast<double>(members.size());
  }
  return out;
}

std::vector<double> adjust_for_age_sex(const Cohort& cohort, const std::vector<double>& values) {
  const std::size_t n = cohort.size();
  if (n < 4) return values;
  std::vector<double> age(n), sex(n);
  for (std::size_t i = 0; i < n; ++i) {
    age[i] = cohort.subjects[i].record.age;
    sex[i] = cohort.subjects[i].record.sex == Sex::M ? 1.0 : 0.0;
  }
  return adjust_covariates(values, age, sex);
}

}  // namespace

std::string format_freq(double f_max) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", f_max);
  std::string s = buf;
  if (s.find('.') != std::string::npos && s.size() - s.find('.') == 2) s += "0";  // 0.1 -> 0.10
  return s;
}

std::string region_file_stem(const RegionKey& region) {
  std::string s = std::string(region.kind_name()) + "_" + region.name;
  for (char& c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-' || c == '.';
    if (!ok) c = '_';
  }
  return s;
}

Experiment::Experiment(const Cohort& cohort, ExperimentSettings settings)
    : cohort_(cohort), settings_(std::move(settings)) {
  if (cohort_.subjects.empty()) throw ValidationError("experiment: empty cohort");
}

const std::vector<SpectralFeatureVector>& Experiment::spectra(const RegionKey& region) {
  {
    std::lock_guard lock(mutex_);
    auto it = spectra_.find(region);
    if (it != spectra_.end()) return it->second;
  }
  std::vector<SpectralFeatureVector> out;
  out.reserve(cohort_.size());
  for (const auto& s : cohort_.subjects) {
    const auto sig = aggregate_region(s.timeseries, s.cbf, cohort_.atlas, region);
    try {
      out.push_back(spectral_features(sig.series, s.timeseries.tr));
    } catch (const ValidationError& e) {
      throw ValidationError("subject " + s.record.subject_id + ", " + region.label() + ": " +
                            e.what());
    }
  }
  std::lock_guard lock(mutex_);
  return spectra_.emplace(region, std::move(out)).first->second;
}

const std::vector<double>& Experiment::adjusted_cbf(const RegionKey& region) {
  {
    std::lock_guard lock(mutex_);
    auto it = adjusted_.find(region);
    if (it != adjusted_.end()) return it->second;
  }
  auto adj = adjust_for_age_sex(cohort_, raw_region_cbf(cohort_, region));
  std::lock_guard lock(mutex_);
  return adjusted_.emplace(region, std::move(adj)).first->second;
}

Matrix Experiment::features(const RegionKey& region, const std::vector<std::size_t>& bins) {
  std::vector<RegionKey> sources;
  if (settings_.scope == FeatureScope::whole_brain) {
    for (const auto& e : cohort_.atlas.entries()) sources.push_back(RegionKey::roi(e.roi));
  } else {
    sources.push_back(region);
  }
  const std::size_t n = cohort_.size();
  Matrix x(n, sources.size() * bins.size());
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto& sp = spectra(sources[s]);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t b = 0; b < bins.size(); ++b) {
        x(i, s * bins.size() + b) = sp[i].bin_power.at(bins[b]);
      }
    }
  }
  return x;
}

OofPrediction Experiment::run_cv(const Matrix& x, const std::vector<double>& y) const {
  return run_cv(x, y, settings_.cv.jobs);
}

OofPrediction Experiment::run_cv(const Matrix& x, const std::vector<double>& y,
                                 std::size_t jobs) const {
  const auto grid = settings_.grid.for_features(x.cols());
  auto cv = settings_.cv;
  cv.jobs = jobs;
  if (settings_.runner) return settings_.runner(x, y, grid, cv);
  return nested_cv_predict(x, y, grid, cv);
}

PredictionSet Experiment::compute(const RegionKey& region, const FrequencyRange& range,
                                  std::size_t jobs) {
  const auto bins = select_bins(range);
  const auto x = features(region, bins);
  const auto& y = adjusted_cbf(region);
  return {region, range.f_max(), run_cv(x, y, jobs)};
}

const PredictionSet& Experiment::predict(const RegionKey& region, const FrequencyRange& range) {
  prefetch({{region, range}});
  std::lock_guard lock(mutex_);
  return predictions_.at({region, range.f_max()});
}

void Experiment::prefetch(const std::vector<std::pair<RegionKey, FrequencyRange>>& tasks) {
  std::vector<std::pair<RegionKey, FrequencyRange>> todo;
  {
    std::lock_guard lock(mutex_);
    for (const auto& t : tasks) {
      const Key key{t.first, t.second.f_max()};
      if (predictions_.contains(key)) continue;
      if (std::any_of(todo.begin(), todo.end(), [&](const auto& d) {
            return d.first == t.first && d.second.f_max() == t.second.f_max();
          })) {
        continue;
      }
      todo.push_back(t);
    }
  }
  if (todo.empty()) return;

  // Features and targets first, so the parallel section only reads caches.
  for (const auto& [region, range] : todo) {
    if (settings_.scope == FeatureScope::whole_brain) {
      for (const auto& e : cohort_.atlas.entries()) spectra(RegionKey::roi(e.roi));
    } else {
      spectra(region);
    }
    adjusted_cbf(region);
  }

  std::vector<std::optional<PredictionSet>> results(todo.size());
  if (todo.size() == 1) {
    results[0] = compute(todo[0].first, todo[0].second, settings_.cv.jobs);
  } else {
    // Parallelism moves to the task level; each CV then runs single-threaded.
    parallel_for(todo.size(), settings_.cv.jobs, [&](std::size_t i) {
      results[i] = compute(todo[i].first, todo[i].second, 1);
    });
  }
  std::lock_guard lock(mutex_);
  for (std::size_t i = 0; i < todo.size(); ++i) {
    predictions_.emplace(Key{todo[i].first, todo[i].second.f_max()}, std::move(*results[i]));
  }
}

std::vector<const PredictionSet*> Experiment::all_predictions() const {
  std::lock_guard lock(mutex_);
  std::vector<const PredictionSet*> out;
  std::vector<std::pair<double, const PredictionSet*>> tmp;
  for (const auto& [key, set] : predictions_) tmp.emplace_back(key.second, &set);
  std::stable_sort(tmp.begin(), tmp.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& t : tmp) out.push_back(t.second);
  return out;
}

std::vector<EvaluationRow> evaluate_regions(Experiment& experiment,
                                            const std::vector<RegionKey>& regions,
                                            const std::vector<FrequencyRange>& ranges) {
  std::vector<std::pair<RegionKey, FrequencyRange>> tasks;
  for (const auto& range : ranges) {
    for (const auto& region : regions) tasks.emplace_back(region, range);
  }
  experiment.prefetch(tasks);

  auto sorted_ranges = ranges;
  std::sort(sorted_ranges.begin(), sorted_ranges.end());
  sorted_ranges.erase(std::unique(sorted_ranges.begin(), sorted_ranges.end()),
                      sorted_ranges.end());
  auto sorted_regions = regions;
  std::sort(sorted_regions.begin(), sorted_regions.end());
  sorted_regions.erase(std::unique(sorted_regions.begin(), sorted_regions.end()),
                       sorted_regions.end());

  std::vector<EvaluationRow> out;
  for (const auto& range : sorted_ranges) {
    std::vector<EvaluationRow> table;
    for (const auto& region : sorted_regions) {
      const auto& set = experiment.predict(region, range);
      std::vector<double> actual, predicted;
      for (const auto& r : set.oof.rows) {
        actual.push_back(r.actual);
        predicted.push_back(r.predicted);
      }
      const auto res = pearson(actual, predicted);
      table.push_back({region, range.f_max(), res.n, res.statistic, res.p, 1.0, res.undefined});
    }
    std::vector<double> p;
    std::vector<bool> usable;
    for (const auto& row : table) {
      p.push_back(row.p);
      usable.push_back(!row.undefined);
    }
    const auto q = fdr_subset(p, usable);
    for (std::size_t i = 0; i < table.size(); ++i) table[i].fdr_p = q[i];
    out.insert(out.end(), table.begin(), table.end());
  }
  return out;
}

std::vector<SweepRow> frequency_sweep(Experiment& experiment, const RegionKey& region) {
  const BinGrid grid;
  const auto& y = experiment.adjusted_cbf(region);
  std::vector<Matrix> inputs;
  for (std::size_t k = 0; k < kNumBins; ++k) {
    std::vector<std::size_t> bins;
    if (experiment.settings().sweep_mode == SweepMode::prefix) {
      for (std::size_t b = 0; b <= k; ++b) bins.push_back(b);
    } else {
      bins.push_back(k);
    }
    inputs.push_back(experiment.features(region, bins));
  }

  std::vector<OofPrediction> oof(kNumBins);
  parallel_for(kNumBins, experiment.settings().cv.jobs,
               [&](std::size_t k) { oof[k] = experiment.run_cv(inputs[k], y, 1); });

  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < kNumBins; ++k) {
    std::vector<double> actual, predicted, diff;
    for (const auto& r : oof[k].rows) {
      actual.push_back(r.actual);
      predicted.push_back(r.predicted);
      diff.push_back(std::abs(r.actual - r.predicted));
    }
    const auto res = pearson(actual, predicted);
    SweepRow row;
    row.bin_index = k;
    row.bin_center = grid.center(k);
    row.n = res.n;
    row.r = res.statistic;
    row.p = res.p;
    row.undefined = res.undefined;
    row.mean_abs_diff = mean(diff);
    row.sd_abs_diff = sample_sd(diff);
    rows.push_back(row);
  }
  return rows;
}

RegionKey reference_region(const RoiAtlas& atlas, const RegionKey& region) {
  switch (region.kind) {
    case RegionKind::roi: {
      const auto& e = atlas.at(region.name);
      if (e.in_lobar_gm) return RegionKey::lobe(e.lobe);
      return RegionKey::total();
    }
    case RegionKind::lobe:
      return RegionKey::total();
    case RegionKind::total_lobar_gm:
      break;
  }
  throw ValidationError("relative CBF is not defined for total lobar gray matter");
}

RelativeCbf relative_cbf_for(Experiment& experiment, const RegionKey& region,
                             const std::optional<FrequencyRange>& range) {
  RelativeCbf out;
  out.region = region;
  out.reference = reference_region(experiment.cohort().atlas, region);
  // Ratio first, then adjustment: each subject's ratio is unchanged by
  // rescaling that subject's CBF table.
  const auto& cohort = experiment.cohort();
  const auto num = raw_region_cbf(cohort, region);
  const auto den = raw_region_cbf(cohort, out.reference);
  std::vector<double> ratio(num.size());
  for (std::size_t i = 0; i < num.size(); ++i) ratio[i] = relative_cbf(num[i], den[i]);
  out.actual = adjust_for_age_sex(cohort, ratio);
  if (range) {
    experiment.prefetch({{region, *range}, {out.reference, *range}});
    const auto& pn = experiment.predict(region, *range).oof.rows;
    const auto& pd = experiment.predict(out.reference, *range).oof.rows;
    for (std::size_t i = 0; i < pn.size(); ++i) {
      out.predicted.push_back(relative_cbf(pn[i].predicted, pd[i].predicted));
    }
  }
  return out;
}

Subgroup subgroup_of(const SubjectRecord& s, int mmse_split) {
  if (s.group == Group::NC) return Subgroup::NC;
  return s.mmse >= mmse_split ? Subgroup::MCI_high : Subgroup::MCI_low;
}

std::vector<GroupComparison> group_compare(const Cohort& cohort, const RelativeCbf& rel,
                                           int mmse_split, TTestKind kind) {
  struct Pair {
    Subgroup a, b;
    const char* name;
  };
  constexpr Pair pairs[] = {{Subgroup::NC, Subgroup::MCI_high, "NC_vs_MCI_high"},
                            {Subgroup::NC, Subgroup::MCI_low, "NC_vs_MCI_low"},
                            {Subgroup::MCI_high, Subgroup::MCI_low, "MCI_high_vs_MCI_low"}};
  std::vector<GroupComparison> out;
  for (const auto* variant : {"actual", "predicted"}) {
    const auto& values = std::string(variant) == "actual" ? rel.actual : rel.predicted;
    if (values.empty()) continue;
    if (values.size() != cohort.size()) {
      throw ValidationError("group comparison: relative CBF length does not match cohort");
    }
    std::vector<GroupComparison> family;
    for (const auto& pr : pairs) {
      std::vector<double> a, b;
      for (std::size_t i = 0; i < cohort.size(); ++i) {
        const auto g = subgroup_of(cohort.subjects[i].record, mmse_split);
        if (g == pr.a) a.push_back(values[i]);
        if (g == pr.b) b.push_back(values[i]);
      }
      GroupComparison row;
      row.region = rel.region;
      row.variant = variant;
      row.comparison = pr.name;
      row.n_a = a.size();
      row.n_b = b.size();
      row.mean_a = a.empty() ? std::numeric_limits<double>::quiet_NaN() : mean(a);
      row.mean_b = b.empty() ? std::numeric_limits<double>::quiet_NaN() : mean(b);
      if (a.size() < 2 || b.size() < 2) {
        row.computable = false;
        row.test.undefined = true;
        row.test.statistic = std::numeric_limits<double>::quiet_NaN();
        row.test.p = 1.0;
      } else {
        row.test = ttest2(a, b, kind);
      }
      family.push_back(row);
    }
    std::vector<double> p;
    std::vector<bool> usable;
    for (const auto& r : family) {
      p.push_back(r.test.p);
      usable.push_back(r.computable);
    }
    const auto q = fdr_subset(p, usable);
    for (std::size_t i = 0; i < family.size(); ++i) family[i].test.fdr_p = q[i];
    out.insert(out.end(), family.begin(), family.end());
  }
  return out;
}

StatResult cognition_correlation(std::span<const double> relative_cbf,
                                 std::span<const double> mmse) {
  if (relative_cbf.size() != mmse.size()) throw ValidationError("cognition: length mismatch");
  if (relative_cbf.size() < 3) throw ValidationError("cognition: need at least 3 subjects");
  return pearson(relative_cbf, mmse);
}

std::vector<CognitionRow> cognition_table(const Cohort& cohort,
                                          const std::vector<RelativeCbf>& rels) {
  std::vector<double> mmse;
  for (const auto& s : cohort.subjects) mmse.push_back(s.record.mmse);
  std::vector<CognitionRow> out;
  for (const auto* variant : {"actual", "predicted"}) {
    std::vector<CognitionRow> family;
    for (const auto& rel : rels) {
      const auto& values = std::string(variant) == "actual" ? rel.actual : rel.predicted;
      if (values.empty()) continue;
      family.push_back({rel.region, variant, cognition_correlation(values, mmse)});
    }
    std::vector<double> p;
    std::vector<bool> usable;
    for (const auto& r : family) {
      p.push_back(r.result.p);
      usable.push_back(!r.result.undefined);
    }
    const auto q = fdr_subset(p, usable);
    for (std::size_t i = 0; i < family.size(); ++i) family[i].result.fdr_p = q[i];
    out.insert(out.end(), family.begin(), family.end());
  }
  return out;
}

std::vector<DemographicRow> summarize_cohort(const Cohort& cohort, TTestKind kind) {
  std::vector<const SubjectRecord*> nc, mci;
  for (const auto& s : cohort.subjects) {
    (s.record.group == Group::NC ? nc : mci).push_back(&s.record);
  }
  if (nc.empty() || mci.empty()) {
    throw ValidationError("demographics: both NC and MCI groups must be non-empty");
  }
  auto numeric = [&](const char* name, auto get) {
    std::vector<double> a, b;
    for (auto* s : nc) a.push_back(get(*s));
    for (auto* s : mci) b.push_back(get(*s));
    DemographicRow row;
    row.variable = name;
    row.test = "ttest2";
    row.nc_n = a.size();
    row.mci_n = b.size();
    row.nc_mean = mean(a);
    row.nc_sd = sample_sd(a);
    row.nc_min = *std::min_element(a.begin(), a.end());
    row.nc_max = *std::max_element(a.begin(), a.end());
    row.mci_mean = mean(b);
    row.mci_sd = sample_sd(b);
    row.mci_min = *std::min_element(b.begin(), b.end());
    row.mci_max = *std::max_element(b.begin(), b.end());
    row.result = ttest2(a, b, kind);
    return row;
  };

  std::vector<DemographicRow> out;
  out.push_back(numeric("age", [](const SubjectRecord& s) { return s.age; }));

  DemographicRow sex;
  sex.variable = "sex_female";
  sex.test = "chisq";
  sex.nc_n = nc.size();
  sex.mci_n = mci.size();
  const auto females = [](const auto& v) {
    return static_cast<double>(
        std::count_if(v.begin(), v.end(), [](auto* s) { return s->sex == Sex::F; }));
  };
  const double nc_f = females(nc), mci_f = females(mci);
  sex.nc_mean = nc_f / static_cast<double>(nc.size());
  sex.mci_mean = mci_f / static_cast<double>(mci.size());
  sex.nc_min = sex.nc_max = nc_f;
  sex.mci_min = sex.mci_max = mci_f;
  try {
    sex.result = chisq_2x2({{{nc_f, static_cast<double>(nc.size()) - nc_f},
                             {mci_f, static_cast<double>(mci.size()) - mci_f}}});
  } catch (const ValidationError&) {
    sex.result.undefined = true;
    sex.result.statistic = std::numeric_limits<double>::quiet_NaN();
    sex.result.p = 1.0;
  }
  out.push_back(sex);

  out.push_back(numeric("education", [](const SubjectRecord& s) { return s.education; }));
  out.push_back(
      numeric("mmse", [](const SubjectRecord& s) { return static_cast<double>(s.mmse); }));
  return out;
}

void write_features_csv(std::ostream& out, Experiment& experiment,
                        const std::vector<RegionKey>& regions) {
  std::vector<std::string> header{"subject_id", "region_kind", "region_name"};
  for (std::size_t k = 0; k < kNumBins; ++k) header.push_back("bin" + std::to_string(k));
  header.push_back("total_variance");
  csv::write_record(out, header);
  const auto& subjects = experiment.cohort().subjects;
  for (const auto& region : regions) {
    const auto& sp = experiment.spectra(region);
    for (std::size_t i = 0; i < subjects.size(); ++i) {
      std::vector<std::string> rec{subjects[i].record.subject_id,
                                   std::string(region.kind_name()), region.name};
      for (double v : sp[i].bin_power) rec.push_back(format_double(v));
      rec.push_back(format_double(sp[i].total_variance));
      csv::write_record(out, rec);
    }
  }
}

void write_predictions_csv(std::ostream& out, const Cohort& cohort,
                           const std::vector<const PredictionSet*>& sets, std::uint64_t seed) {
  csv::write_record(out, {"subject_id", "region_kind", "region_name", "freq_max", "actual_cbf",
                          "predicted_cbf", "outer_fold", "c", "gamma", "epsilon", "seed"});
  for (const auto* set : sets) {
    for (std::size_t i = 0; i < set->oof.rows.size(); ++i) {
      const auto& r = set->oof.rows[i];
      csv::write_record(out, {cohort.subjects[i].record.subject_id,
                              std::string(set->region.kind_name()), set->region.name,
                              format_freq(set->freq_max), format_double(r.actual),
                              format_double(r.predicted), std::to_string(r.outer_fold),
                              format_double(r.params.c), format_double(r.params.gamma),
                              format_double(r.params.epsilon), std::to_string(seed)});
    }
  }
}

void write_evaluation_csv(std::ostream& out, const std::vector<EvaluationRow>& rows) {
  csv::write_record(out, {"region_kind", "region_name", "freq_max", "n", "r", "p", "fdr_p",
                          "undefined"});
  for (const auto& r : rows) {
    csv::write_record(out, {std::string(r.region.kind_name()), r.region.name,
                            format_freq(r.freq_max), std::to_string(r.n),
                            na_or(r.r, r.undefined), na_or(r.p, r.undefined),
                            na_or(r.fdr_p, r.undefined), r.undefined ? "1" : "0"});
  }
}

void write_sweep_csv(std::ostream& out, const RegionKey& region,
                     const std::vector<SweepRow>& rows) {
  csv::write_record(out, {"region_kind", "region_name", "bin_index", "bin_center", "n", "r", "p",
                          "mean_abs_diff", "sd_abs_diff", "undefined"});
  for (const auto& r : rows) {
    csv::write_record(out, {std::string(region.kind_name()), region.name,
                            std::to_string(r.bin_index), format_double(r.bin_center),
                            std::to_string(r.n), na_or(r.r, r.undefined),
                            na_or(r.p, r.undefined), format_double(r.mean_abs_diff),
                            format_double(r.sd_abs_diff), r.undefined ? "1" : "0"});
  }
}

void write_groups_csv(std::ostream& out, const std::vector<GroupComparison>& rows) {
  csv::write_record(out, {"region_kind", "region_name", "variant", "comparison", "n_a", "n_b",
                          "mean_a", "mean_b", "t", "df", "p", "fdr_p", "computable"});
  for (const auto& r : rows) {
    const bool na = !r.computable;
    csv::write_record(out, {std::string(r.region.kind_name()), r.region.name, r.variant,
                            r.comparison, std::to_string(r.n_a), std::to_string(r.n_b),
                            na_or(r.mean_a, std::isnan(r.mean_a)),
                            na_or(r.mean_b, std::isnan(r.mean_b)), na_or(r.test.statistic, na),
                            na_or(r.test.df, na), na_or(r.test.p, na),
                            na_or(r.test.fdr_p.value_or(1.0), na), na ? "0" : "1"});
  }
}

void write_cognition_csv(std::ostream& out, const std::vector<CognitionRow>& rows) {
  csv::write_record(out, {"region_kind", "region_name", "variant", "n", "r", "p", "fdr_p",
                          "undefined"});
  for (const auto& r : rows) {
    const bool na = r.result.undefined;
    csv::write_record(out, {std::string(r.region.kind_name()), r.region.name, r.variant,
                            std::to_string(r.result.n), na_or(r.result.statistic, na),
                            na_or(r.result.p, na), na_or(r.result.fdr_p.value_or(1.0), na),
                            na ? "1" : "0"});
  }
}

void write_demographics_csv(std::ostream& out, const std::vector<DemographicRow>& rows) {
  csv::write_record(out, {"variable", "test", "nc_n", "nc_mean", "nc_sd", "nc_min", "nc_max",
                          "mci_n", "mci_mean", "mci_sd", "mci_min", "mci_max", "statistic", "df",
                          "p"});
  for (const auto& r : rows) {
    const bool na = r.result.undefined;
    csv::write_record(out, {r.variable, r.test, std::to_string(r.nc_n), format_double(r.nc_mean),
                            format_double(r.nc_sd), format_double(r.nc_min),
                            format_double(r.nc_max), std::to_string(r.mci_n),
                            format_double(r.mci_mean), format_double(r.mci_sd),
                            format_double(r.mci_min), format_double(r.mci_max),
                            na_or(r.result.statistic, na), format_double(r.result.df),
                            na_or(r.result.p, na)});
  }
}

void write_prediction_figure(const PredictionSet& set, const EvaluationRow& row,
                             const std::filesystem::path& path) {
  std::vector<double> xs, ys;
  for (const auto& r : set.oof.rows) {
    xs.push_back(r.actual);
    ys.push_back(r.predicted);
  }
  char note[96];
  if (row.undefined) {
    std::snprintf(note, sizeof(note), "r undefined");
  } else {
    std::snprintf(note, sizeof(note), "r = %.2f, FDR-p = %.2g", row.r, row.fdr_p);
  }
  ScatterLabels labels;
  labels.title = set.region.label() + " [0.01-" + format_freq(set.freq_max) + "] Hz";
  labels.x_label = "actual CBF (ml/100g/min)";
  labels.y_label = "predicted CBF (ml/100g/min)";
  labels.annotation = note;
  write_scatter_svg(xs, ys, labels, path);
}

}  // namespace cbf_surrogate
