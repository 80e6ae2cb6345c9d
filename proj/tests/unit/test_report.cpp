#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cbf_surrogate/csv.hpp"
#include "cbf_surrogate/error.hpp"
#include "cbf_surrogate/report.hpp"
#include "cbf_surrogate/rng.hpp"
#include "cbf_surrogate/synthcohort.hpp"
#include "temp_dir.hpp"

using namespace cbf_surrogate;
using cbf_surrogate::testing::TempDir;

namespace {

// Eight ROIs, two per lobe, plus one non-lobar ROI; random series and CBF.
Cohort make_cohort(std::size_t n, std::uint64_t seed) {
  std::vector<AtlasEntry> atlas;
  for (std::size_t j = 0; j < 8; ++j) atlas.push_back({synth_roi_name(j), kLobes[j % 4], true});
  atlas.push_back({"white_matter", Lobe::other, false});
  Cohort c;
  c.atlas = RoiAtlas(atlas);
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    SubjectData s;
    s.record.subject_id = "s" + std::to_string(i);
    s.record.group = i % 3 == 0 ? Group::MCI : Group::NC;
    s.record.age = 60 + 20 * rng.uniform();
    s.record.sex = rng.uniform() < 0.5 ? Sex::F : Sex::M;
    s.record.education = 12 + static_cast<double>(rng.below(8));
    s.record.mmse = s.record.group == Group::MCI ? 25 + static_cast<int>(rng.below(6)) : 30;
    s.record.tr = 0.72;
    s.timeseries.tr = 0.72;
    s.timeseries.samples = Matrix(500, atlas.size());
    for (const auto& e : atlas) {
      s.timeseries.roi_names.push_back(e.roi);
      s.cbf.cbf[e.roi] = 50 + 8 * rng.normal();
    }
    for (std::size_t t = 0; t < 500; ++t) {
      for (std::size_t j = 0; j < atlas.size(); ++j) s.timeseries.samples(t, j) = rng.normal();
    }
    c.subjects.push_back(std::move(s));
  }
  return c;
}

OofPrediction passthrough(const Matrix& x, std::span<const double> y, const HyperGrid&,
                          const CvSettings&) {
  OofPrediction out;
  for (std::size_t i = 0; i < y.size(); ++i) out.rows.push_back({y[i], y[i], 0, {}});
  (void)x;
  return out;
}

// Deterministic noise keyed on the first feature, so p-values differ by region.
OofPrediction noisy(const Matrix& x, std::span<const double> y, const HyperGrid&,
                    const CvSettings&) {
  OofPrediction out;
  SplitMix64 rng(static_cast<std::uint64_t>(x(0, 0) * 1e12));
  for (std::size_t i = 0; i < y.size(); ++i) {
    out.rows.push_back({y[i], y[i] + 20 * rng.normal(), 0, {}});
  }
  return out;
}

ExperimentSettings with_runner(CvRunner r) {
  ExperimentSettings s;
  s.runner = std::move(r);
  return s;
}

std::vector<RegionKey> lobes() {
  std::vector<RegionKey> out;
  for (Lobe l : kLobes) out.push_back(RegionKey::lobe(l));
  return out;
}

const std::vector<FrequencyRange> kRanges{FrequencyRange(0.10), FrequencyRange(0.15),
                                          FrequencyRange(0.20)};

}  // namespace

TEST_CASE("passthrough predictions give r = 1 in a 4 x 3 table") {
  const auto cohort = make_cohort(24, 1);
  Experiment ex(cohort, with_runner(passthrough));
  const auto rows = evaluate_regions(ex, lobes(), kRanges);
  REQUIRE(rows.size() == 12);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].r == doctest::Approx(1.0));
    CHECK(rows[i].fdr_p <= 1e-12);
    CHECK(rows[i].n == 24);
    CHECK(rows[i].freq_max == kRanges[i / 4].f_max());
    if (i % 4) CHECK(rows[i - 1].region < rows[i].region);
  }
  std::ostringstream out;
  write_evaluation_csv(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "region_kind,region_name,freq_max,n,r,p,fdr_p,undefined");
  std::size_t count = 0;
  while (std::getline(in, line)) ++count;
  CHECK(count == 12);
  CHECK(out.str().find("lobe,frontal,0.10,24,1,") != std::string::npos);
}

TEST_CASE("FDR runs per range and never touches raw p") {
  const auto cohort = make_cohort(30, 2);
  Experiment ex(cohort, with_runner(noisy));
  const auto rows = evaluate_regions(ex, lobes(), kRanges);
  for (std::size_t r = 0; r < 3; ++r) {
    std::vector<double> p;
    for (std::size_t i = 0; i < 4; ++i) p.push_back(rows[4 * r + i].p);
    const auto q = fdr_bh(p);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(rows[4 * r + i].fdr_p == q[i]);
      CHECK(rows[4 * r + i].fdr_p >= rows[4 * r + i].p);
    }
  }
  const std::vector<RegionKey> two{RegionKey::lobe(Lobe::frontal), RegionKey::lobe(Lobe::parietal)};
  const auto sub = evaluate_regions(ex, two, {FrequencyRange(0.15)});
  REQUIRE(sub.size() == 2);
  CHECK(sub[0].p == rows[4].p);
  CHECK(sub[1].p == rows[6].p);
}

TEST_CASE("undefined correlations are flagged and kept out of FDR") {
  auto cohort = make_cohort(12, 3);
  for (auto& s : cohort.subjects) {
    for (auto& [roi, v] : s.cbf.cbf) v = 55.0;
  }
  Experiment ex(cohort, with_runner(passthrough));
  const auto rows = evaluate_regions(ex, {RegionKey::total()}, {FrequencyRange(0.15)});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].undefined);
  std::ostringstream out;
  write_evaluation_csv(out, rows);
  CHECK(out.str().find("NA,NA,NA,1") != std::string::npos);
}

TEST_CASE("sweep has eight bins at the grid midpoints") {
  const auto cohort = make_cohort(20, 4);
  std::vector<std::size_t> widths;
  std::mutex m;
  auto runner = [&](const Matrix& x, std::span<const double> y, const HyperGrid& g,
                    const CvSettings& s) {
    std::lock_guard lock(m);
    widths.push_back(x.cols());
    return noisy(x, y, g, s);
  };
  for (auto mode : {SweepMode::single, SweepMode::prefix}) {
    widths.clear();
    auto settings = with_runner(runner);
    settings.sweep_mode = mode;
    settings.cv.jobs = 4;
    Experiment ex(cohort, settings);
    const auto rows = frequency_sweep(ex, RegionKey::total());
    REQUIRE(rows.size() == 8);
    const double centers[] = {0.0234, 0.0502, 0.0770, 0.1038, 0.1306, 0.1574, 0.1842, 0.2110};
    for (std::size_t k = 0; k < 8; ++k) {
      CHECK(rows[k].bin_index == k);
      CHECK(rows[k].bin_center == doctest::Approx(centers[k]).epsilon(1e-9));
      CHECK(rows[k].mean_abs_diff >= 0);
      CHECK(std::isfinite(rows[k].mean_abs_diff));
      CHECK(rows[k].sd_abs_diff >= 0);
    }
    std::sort(widths.begin(), widths.end());
    if (mode == SweepMode::single) {
      CHECK(widths == std::vector<std::size_t>(8, 1));
    } else {
      CHECK(widths == std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8});
    }
    std::ostringstream out;
    write_sweep_csv(out, RegionKey::total(), rows);
    CHECK(out.str().rfind("region_kind,region_name,bin_index,bin_center,n,r,p,mean_abs_diff,"
                          "sd_abs_diff,undefined\n",
                          0) == 0);
  }
}

TEST_CASE("whole-brain scope concatenates every ROI") {
  const auto cohort = make_cohort(10, 5);
  ExperimentSettings s;
  s.scope = FeatureScope::whole_brain;
  Experiment ex(cohort, s);
  const auto x = ex.features(RegionKey::lobe(Lobe::frontal), {0, 1, 2});
  CHECK(x.cols() == 9 * 3);
  Experiment region_only(cohort, ExperimentSettings{});
  CHECK(region_only.features(RegionKey::lobe(Lobe::frontal), {0, 1, 2}).cols() == 3);
  // Column block j holds ROI j's bins.
  const auto& sp = ex.spectra(RegionKey::roi("temporal_1"));
  CHECK(x(4, 3 * 1 + 2) == sp[4].bin_power[2]);
}

TEST_CASE("reference regions") {
  const auto cohort = make_cohort(4, 6);
  const auto& a = cohort.atlas;
  CHECK(reference_region(a, RegionKey::roi("parietal_1")) == RegionKey::lobe(Lobe::parietal));
  CHECK(reference_region(a, RegionKey::roi("white_matter")) == RegionKey::total());
  CHECK(reference_region(a, RegionKey::lobe(Lobe::temporal)) == RegionKey::total());
  CHECK_THROWS_AS(reference_region(a, RegionKey::total()), ValidationError);
}

TEST_CASE("relative CBF ignores a per-subject rescaling of the CBF table") {
  const auto cohort = make_cohort(30, 7);
  auto scaled = cohort;
  for (auto& [roi, v] : scaled.subjects[5].cbf.cbf) v *= 1.7;
  Experiment a(cohort, with_runner(passthrough));
  Experiment b(scaled, with_runner(passthrough));
  for (const auto& region : {RegionKey::roi("parietal_1"), RegionKey::lobe(Lobe::occipital)}) {
    const auto ra = relative_cbf_for(a, region, std::nullopt);
    const auto rb = relative_cbf_for(b, region, std::nullopt);
    CHECK(ra.predicted.empty());
    for (std::size_t i = 0; i < ra.actual.size(); ++i) {
      CHECK(ra.actual[i] == doctest::Approx(rb.actual[i]).epsilon(1e-12));
    }
    const auto ga = group_compare(cohort, ra, 28);
    const auto gb = group_compare(scaled, rb, 28);
    REQUIRE(ga.size() == gb.size());
    for (std::size_t i = 0; i < ga.size(); ++i) {
      CHECK(ga[i].test.p == doctest::Approx(gb[i].test.p).epsilon(1e-9));
    }
  }
}

TEST_CASE("predicted relative CBF divides the region and reference predictions") {
  const auto cohort = make_cohort(20, 8);
  Experiment ex(cohort, with_runner(passthrough));
  const auto region = RegionKey::roi("frontal_2");
  const auto rel = relative_cbf_for(ex, region, FrequencyRange(0.15));
  REQUIRE(rel.predicted.size() == 20);
  CHECK(rel.reference == RegionKey::lobe(Lobe::frontal));
  const auto& num = ex.adjusted_cbf(region);
  const auto& den = ex.adjusted_cbf(rel.reference);
  for (std::size_t i = 0; i < 20; ++i) CHECK(rel.predicted[i] == doctest::Approx(num[i] / den[i]));
  CHECK(ex.all_predictions().size() == 2);
}

TEST_CASE("group comparison subgroups and edge cases") {
  Cohort c = make_cohort(9, 9);
  const int mmse[] = {30, 30, 30, 28, 28, 29, 27, 20, 25};
  for (std::size_t i = 0; i < 9; ++i) {
    c.subjects[i].record.group = i < 3 ? Group::NC : Group::MCI;
    c.subjects[i].record.mmse = mmse[i];
  }
  CHECK(subgroup_of(c.subjects[3].record, 28) == Subgroup::MCI_high);
  CHECK(subgroup_of(c.subjects[6].record, 28) == Subgroup::MCI_low);
  CHECK(subgroup_of(c.subjects[0].record, 28) == Subgroup::NC);

  RelativeCbf flat{RegionKey::roi("parietal_1"), RegionKey::lobe(Lobe::parietal),
                   std::vector<double>(9, 0.9), {}};
  const auto rows = group_compare(c, flat, 28);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.computable);
    CHECK(r.test.p == 1.0);
    CHECK(r.variant == "actual");
  }
  CHECK(rows[1].comparison == "NC_vs_MCI_low");
  CHECK(rows[1].n_a == 3);
  CHECK(rows[1].n_b == 3);

  // Only one MCI-high subject left: comparisons involving it are not computable.
  c.subjects[4].record.mmse = 22;
  c.subjects[5].record.mmse = 22;
  RelativeCbf varied = flat;
  for (std::size_t i = 0; i < 9; ++i) varied.actual[i] = 0.8 + 0.01 * static_cast<double>(i);
  varied.predicted = varied.actual;
  const auto rows2 = group_compare(c, varied, 28);
  REQUIRE(rows2.size() == 6);
  CHECK_FALSE(rows2[0].computable);
  CHECK(rows2[1].computable);
  CHECK_FALSE(rows2[2].computable);
  CHECK(rows2[1].test.fdr_p.value() == doctest::Approx(rows2[1].test.p));
  CHECK(rows2[3].variant == "predicted");
  std::ostringstream out;
  write_groups_csv(out, rows2);
  CHECK(out.str().find(",NA,NA,NA,NA,0\n") != std::string::npos);
  RelativeCbf wrong = flat;
  wrong.actual.pop_back();
  CHECK_THROWS_AS(group_compare(c, wrong, 28), ValidationError);
}

TEST_CASE("cognition correlation") {
  const std::vector<double> mmse{30, 29, 27, 25, 28, 26};
  CHECK(cognition_correlation(mmse, mmse).statistic == doctest::Approx(1.0));
  CHECK(cognition_correlation(mmse, std::vector<double>(6, 30.0)).undefined);
  CHECK_THROWS_AS(cognition_correlation(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
                  ValidationError);

  Cohort c = make_cohort(6, 10);
  for (std::size_t i = 0; i < 6; ++i) c.subjects[i].record.mmse = static_cast<int>(mmse[i]);
  std::vector<RelativeCbf> rels;
  rels.push_back({RegionKey::roi("parietal_1"), RegionKey::lobe(Lobe::parietal), mmse, mmse});
  std::vector<double> other{1, 3, 2, 5, 4, 6};
  rels.push_back({RegionKey::roi("frontal_1"), RegionKey::lobe(Lobe::frontal), other, {}});
  const auto table = cognition_table(c, rels);
  REQUIRE(table.size() == 3);
  CHECK(table[0].variant == "actual");
  CHECK(table[2].variant == "predicted");
  const auto q = fdr_bh(std::vector<double>{table[0].result.p, table[1].result.p});
  CHECK(table[0].result.fdr_p.value() == q[0]);
  CHECK(table[1].result.fdr_p.value() == q[1]);
  CHECK(table[2].result.fdr_p.value() == table[2].result.p);
  std::ostringstream out;
  write_cognition_csv(out, table);
  CHECK(out.str().rfind("region_kind,region_name,variant,n,r,p,fdr_p,undefined\n", 0) == 0);
}

TEST_CASE("demographics on a six-subject cohort") {
  Cohort c = make_cohort(6, 11);
  const double age[] = {70, 72, 75, 68, 80, 77};
  const Sex sex[] = {Sex::F, Sex::M, Sex::F, Sex::F, Sex::M, Sex::M};
  for (std::size_t i = 0; i < 6; ++i) {
    c.subjects[i].record.group = i < 3 ? Group::NC : Group::MCI;
    c.subjects[i].record.age = age[i];
    c.subjects[i].record.sex = sex[i];
  }
  const auto rows = summarize_cohort(c);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].variable == "age");
  // Hand pooled t: means 72.333 / 75, variances 6.3333 / 39, sp^2 = 22.6667.
  const double t = (217.0 / 3 - 75.0) / std::sqrt(68.0 / 3 * (2.0 / 3));
  CHECK(rows[0].result.statistic == doctest::Approx(t));
  CHECK(rows[0].result.df == 4.0);
  CHECK(rows[0].nc_min == 70);
  CHECK(rows[0].mci_max == 80);
  CHECK(rows[1].variable == "sex_female");
  CHECK(rows[1].nc_min == 2);
  CHECK(rows[1].mci_min == 1);
  CHECK(rows[1].nc_mean == doctest::Approx(2.0 / 3));
  CHECK(rows[1].test == "chisq");
  CHECK(rows[3].variable == "mmse");

  // Identical groups: every t-test has p = 1.
  Cohort same = make_cohort(4, 12);
  for (std::size_t i = 0; i < 4; ++i) {
    auto& r = same.subjects[i].record;
    r.group = i % 2 ? Group::MCI : Group::NC;
    r.age = i < 2 ? 70 : 80;
    r.education = i < 2 ? 12 : 16;
    r.mmse = i < 2 ? 29 : 27;
    r.sex = i < 2 ? Sex::F : Sex::M;
  }
  for (const auto& r : summarize_cohort(same)) {
    if (r.test == "ttest2") CHECK(r.result.p == 1.0);
  }
  std::ostringstream out;
  write_demographics_csv(out, rows);
  CHECK(out.str().rfind("variable,test,nc_n,nc_mean,nc_sd,nc_min,nc_max,mci_n,mci_mean,mci_sd,"
                        "mci_min,mci_max,statistic,df,p\n",
                        0) == 0);

  Cohort one_group = make_cohort(4, 13);
  for (auto& s : one_group.subjects) s.record.group = Group::NC;
  CHECK_THROWS_AS(summarize_cohort(one_group), ValidationError);
}

TEST_CASE("feature and prediction tables") {
  const auto cohort = make_cohort(5, 14);
  Experiment ex(cohort, with_runner(passthrough));
  std::ostringstream f;
  write_features_csv(f, ex, {RegionKey::total(), RegionKey::roi("white_matter")});
  const std::string text = f.str();
  CHECK(text.rfind("subject_id,region_kind,region_name,bin0,bin1,bin2,bin3,bin4,bin5,bin6,bin7,"
                   "total_variance\n",
                   0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 11);
  CHECK(text.find("s0,total_lobar_gm,lobar_gm,") != std::string::npos);

  ex.predict(RegionKey::lobe(Lobe::parietal), FrequencyRange(0.20));
  ex.predict(RegionKey::lobe(Lobe::frontal), FrequencyRange(0.10));
  const auto sets = ex.all_predictions();
  REQUIRE(sets.size() == 2);
  CHECK(sets[0]->freq_max == 0.10);
  std::ostringstream p;
  write_predictions_csv(p, cohort, sets, 7);
  const std::string pt = p.str();
  CHECK(pt.rfind("subject_id,region_kind,region_name,freq_max,actual_cbf,predicted_cbf,"
                 "outer_fold,c,gamma,epsilon,seed\n",
                 0) == 0);
  CHECK(std::count(pt.begin(), pt.end(), '\n') == 11);
  CHECK(pt.find("s4,lobe,parietal,0.20,") != std::string::npos);
}

TEST_CASE("figure and naming helpers") {
  CHECK(format_freq(0.1) == "0.10");
  CHECK(format_freq(0.15) == "0.15");
  CHECK(format_freq(0.2) == "0.20");
  CHECK(format_freq(0.125) == "0.125");
  CHECK(region_file_stem(RegionKey::lobe(Lobe::parietal)) == "lobe_parietal");
  CHECK(region_file_stem(RegionKey::roi("a b/c")) == "roi_a_b_c");

  const auto cohort = make_cohort(8, 15);
  Experiment ex(cohort, with_runner(noisy));
  const auto rows = evaluate_regions(ex, {RegionKey::total()}, {FrequencyRange(0.15)});
  TempDir dir("report");
  write_prediction_figure(ex.predict(RegionKey::total(), FrequencyRange(0.15)), rows[0],
                          dir / "fig.svg");
  const auto svg = cbf_surrogate::testing::read_text(dir / "fig.svg");
  CHECK(svg.find("total_lobar_gm:lobar_gm [0.01-0.15] Hz") != std::string::npos);
  CHECK(svg.find("FDR-p = ") != std::string::npos);
}
