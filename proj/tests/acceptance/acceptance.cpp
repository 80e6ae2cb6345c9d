// Acceptance battery: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cbf_surrogate/crossval.hpp"
#include "cbf_surrogate/datamodel.hpp"
#include "cbf_surrogate/report.hpp"
#include "cbf_surrogate/rng.hpp"
#include "cbf_surrogate/spectral.hpp"
#include "cbf_surrogate/stats.hpp"
#include "cbf_surrogate/svr.hpp"
#include "cbf_surrogate/synthcohort.hpp"
#include "cli.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace fs = std::filesystem;
using namespace cbf_surrogate;
using cbf_surrogate::testing::TempDir;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<SolverOptions> solver_variants(double tol) {
  std::vector<SolverOptions> out;
  for (auto ws : {WorkingSet::max_violating_pair, WorkingSet::second_order}) {
    for (bool shrink : {false, true}) {
      SolverOptions o;
      o.tol = tol;
      o.working_set = ws;
      o.shrinking = shrink;
      out.push_back(o);
    }
  }
  return out;
}

double predict_dual(const Matrix& x, std::span<const double> beta, double bias, double gamma,
                    std::span<const double> probe) {
  double f = bias;
  for (std::size_t i = 0; i < x.rows(); ++i) f += beta[i] * rbf_kernel(x.row(i), probe, gamma);
  return f;
}

// ---------------------------------------------------------------------------

Outcome svr_oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  SplitMix64 rng(101);
  double worst_beta = 0, worst_bias = 0, worst_pred = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t n = 2 + rng.below(5), d = 1 + rng.below(3);
    Matrix x(n, d);
    for (bool distinct = false; !distinct;) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.normal();
      }
      distinct = true;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) {
          double dist = 0;
          for (std::size_t j = 0; j < d; ++j) dist += (x(i, j) - x(k, j)) * (x(i, j) - x(k, j));
          if (dist < 1e-4) distinct = false;
        }
      }
    }
    std::vector<double> z(n);
    for (auto& v : z) v = rng.normal();
    const double c = std::ldexp(1.0, static_cast<int>(rng.below(8)) - 3);
    const double gamma = std::ldexp(1.0, static_cast<int>(rng.below(6)) - 3);
    const double eps = rng.uniform(0.0, 0.5);
    const Matrix k = rbf_gram(x, gamma);
    const auto ref = testing::svr_qp_oracle(k, z, c, eps);
    std::vector<std::vector<double>> probes(5, std::vector<double>(d));
    for (auto& p : probes) {
      for (auto& v : p) v = 1.5 * rng.normal();
    }
    for (const auto& opt : solver_variants(1e-10)) {
      const auto sol = solve_svr_dual(k, z, c, eps, opt);
      for (std::size_t i = 0; i < n; ++i) {
        worst_beta = std::max(worst_beta, std::fabs(sol.beta[i] - ref.beta[i]));
      }
      worst_bias = std::max(worst_bias, std::fabs(sol.bias - ref.bias));
      for (const auto& p : probes) {
        worst_pred = std::max(worst_pred, std::fabs(predict_dual(x, sol.beta, sol.bias, gamma, p) -
                                                    predict_dual(x, ref.beta, ref.bias, gamma, p)));
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_beta <= 1e-5 && worst_bias <= 1e-5 && worst_pred <= 1e-5 && secs < 30;
  return {ok, fmt("200 instances x 4 solver variants: max |dbeta| = %.2e, |dbias| = %.2e, "
                  "|dpred| = %.2e, %.2f s",
                  worst_beta, worst_bias, worst_pred, secs)};
}

Outcome kkt_feasibility() {
  SplitMix64 rng(202);
  std::size_t failures = 0, checked = 0;
  double worst_box = 0, worst_sum = 0, worst_drop = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t n = 2 + rng.below(99), d = 1 + rng.below(5);
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.normal();
    }
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = std::sin(2 * x(i, 0)) + 0.3 * rng.normal();
    const double c = std::ldexp(1.0, static_cast<int>(rng.below(10)) - 3);
    const double gamma = std::ldexp(1.0, static_cast<int>(rng.below(8)) - 5);
    const double eps = rng.uniform(0.0, 0.5);
    const Matrix k = rbf_gram(x, gamma);
    auto opt = solver_variants(1e-3)[inst % 4];
    double last = 0.0;  // objective at beta = 0
    double drop = 0.0;
    opt.observer = [&](const SmoStep& s) {
      drop = std::max(drop, (last - s.objective) / std::max(1.0, std::fabs(last)));
      last = s.objective;
    };
    const auto sol = solve_svr_dual(k, z, c, eps, opt);
    ++checked;
    bool ok = drop <= 1e-12;
    worst_drop = std::max(worst_drop, drop);
    double sum = 0;
    for (double b : sol.beta) {
      worst_box = std::max(worst_box, std::fabs(b) - c);
      ok = ok && std::fabs(b) <= c + 1e-12;
      sum += b;
    }
    worst_sum = std::max(worst_sum, std::fabs(sum));
    ok = ok && std::fabs(sum) <= 1e-9;
    const double slack = opt.tol + 1e-9;
    for (std::size_t i = 0; i < n; ++i) {
      double f = sol.bias;
      for (std::size_t j = 0; j < n; ++j) f += k(i, j) * sol.beta[j];
      const double r = z[i] - f, b = sol.beta[i];
      if (b == 0) {
        ok = ok && std::fabs(r) <= eps + slack;
      } else if (b > 0) {
        ok = ok && r >= eps - slack && (b >= c || r <= eps + slack);
      } else {
        ok = ok && r <= -eps + slack && (b <= -c || r >= -eps - slack);
      }
    }
    if (!ok) ++failures;
  }
  return {failures == 0,
          fmt("%zu/%zu instances violate; max |beta|-C = %.1e, max |sum beta| = %.1e, max "
              "relative objective drop = %.1e",
              failures, checked, worst_box, worst_sum, worst_drop)};
}

Outcome spectral_correctness() {
  SplitMix64 rng(303);
  double worst_parseval = 0;
  for (int s = 0; s < 1000; ++s) {
    const std::size_t n = 64 + rng.below(600);
    const double tr = 0.72 * rng.uniform(0.5, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) v = 10.0 * rng.uniform() + std::exp(rng.normal());
    const auto clean = detrend_demean(x);
    double var = 0;
    for (double v : clean) var += v * v;
    var /= static_cast<double>(n);
    double sum = 0;
    for (double p : periodogram(clean, tr).power) sum += p;
    worst_parseval = std::max(worst_parseval, std::fabs(sum - var) / var);
  }
  std::vector<double> cosine(500);
  for (std::size_t t = 0; t < 500; ++t) {
    cosine[t] = std::cos(2 * std::numbers::pi * 0.05 * 0.72 * static_cast<double>(t));
  }
  const auto f = bin_power(periodogram(cosine, 0.72));
  const double bin1_err = std::fabs(f.bin_power[1] - 0.5 / 9);
  double other = 0;
  for (std::size_t k = 0; k < kNumBins; ++k) {
    if (k != 1) other = std::max(other, f.bin_power[k]);
  }
  const bool ok = worst_parseval <= 1e-9 && bin1_err <= 1e-10 && other < 1e-12;
  return {ok, fmt("Parseval max rel err %.1e over 1000 series; cosine bin 1 err %.1e, max other "
                  "bin %.1e",
                  worst_parseval, bin1_err, other)};
}

Outcome statistics_oracles() {
  double closed = 0, quad = 0;
  for (int i = -400; i <= 400; ++i) {
    const double t = i / 20.0;
    closed = std::max(closed, std::fabs(t_cdf(t, 1) - (0.5 + std::atan(t) / std::numbers::pi)));
    closed = std::max(closed, std::fabs(t_cdf(t, 2) - (0.5 + t / (2 * std::sqrt(2 + t * t)))));
  }
  SplitMix64 rng(404);
  for (int i = 0; i < 400; ++i) {
    const double df = i < 200 ? static_cast<double>(i + 1) : rng.uniform(0.5, 200.0);
    const double t = 6 * rng.normal();
    quad = std::max(quad, std::fabs(t_cdf(t, df) - testing::t_cdf_quadrature(t, df)));
  }
  std::size_t mismatches = 0;
  for (int l = 0; l < 10000; ++l) {
    std::vector<double> p(1 + rng.below(40));
    for (auto& v : p) {
      v = rng.uniform() < 0.2 ? std::round(rng.uniform() * 10) / 10 : std::pow(rng.uniform(), 3);
    }
    if (fdr_bh(p) != testing::bh_bruteforce(p)) ++mismatches;
  }
  const double chi_p = chisq_2x2({{{27, 18}, {11, 15}}}).p;
  const bool ok = closed <= 1e-10 && quad <= 1e-10 && mismatches == 0 &&
                  std::fabs(chi_p - 0.15) <= 0.005;
  return {ok, fmt("t_cdf closed-form err %.1e, quadrature err %.1e; fdr_bh mismatches %zu/10000; "
                  "chisq p = %.4f",
                  closed, quad, mismatches, chi_p)};
}

Cohort make_synth(SynthConfig cfg, const TempDir& dir, const std::string& tag) {
  const auto root = dir / tag;
  const auto manifest = generate_cohort(cfg, root);
  return load_cohort(manifest, root / "atlas.csv");
}

Outcome synthetic_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  TempDir dir("acc_recovery");
  SynthConfig cfg;
  cfg.n_subjects = 200;
  cfg.seed = 11;
  const auto cohort = make_synth(cfg, dir, "cohort");
  Experiment ex(cohort, ExperimentSettings{});
  const std::vector<RegionKey> regions{RegionKey::roi("frontal_1"), RegionKey::roi("parietal_1")};
  const auto rows = evaluate_regions(ex, regions, {FrequencyRange(0.10), FrequencyRange(0.15)});
  const double secs = seconds_since(t0);
  // rows: (0.10, frontal_1), (0.10, parietal_1), (0.15, frontal_1), (0.15, parietal_1)
  bool ok = secs < 300;
  std::string detail;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& lo = rows[i];
    const auto& hi = rows[i + 2];
    ok = ok && !hi.undefined && hi.r >= 0.5 && (lo.undefined || hi.r > lo.r);
    detail += fmt("%s r[0.01-0.15] = %.3f, r[0.01-0.10] = %.3f; ", hi.region.label().c_str(),
                  hi.r, lo.r);
  }
  return {ok, detail + fmt("%.1f s", secs)};
}

Outcome sweep_localization() {
  TempDir dir("acc_sweep");
  SynthConfig cfg;
  cfg.n_subjects = 200;
  cfg.seed = 12;
  cfg.band_lo = 0.1172;
  cfg.band_hi = 0.144;
  const auto cohort = make_synth(cfg, dir, "cohort");
  Experiment ex(cohort, ExperimentSettings{});
  const auto rows = frequency_sweep(ex, RegionKey::roi("parietal_1"));
  std::size_t best = 0;
  std::string rs;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double r = rows[k].undefined ? -2.0 : rows[k].r;
    if (r > (rows[best].undefined ? -2.0 : rows[best].r)) best = k;
    rs += fmt("%s%.2f", k ? " " : "", rows[k].r);
  }
  return {best == 4, fmt("argmax bin %zu; r per bin: %s", best, rs.c_str())};
}

Outcome group_cognition() {
  std::size_t passing = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TempDir dir("acc_groups");
    SynthConfig cfg;
    cfg.n_subjects = 200;
    cfg.seed = 100 + seed;
    const auto cohort = make_synth(cfg, dir, "cohort");
    Experiment ex(cohort, ExperimentSettings{});
    const auto rel = relative_cbf_for(ex, RegionKey::roi(kSynthTargetRoi), std::nullopt);
    const auto groups = group_compare(cohort, rel, 28);
    double fdr = 1.0;
    for (const auto& g : groups) {
      if (g.variant == "actual" && g.comparison == "NC_vs_MCI_low" && g.computable) {
        fdr = g.test.fdr_p.value_or(1.0);
      }
    }
    std::vector<double> mmse;
    for (const auto& s : cohort.subjects) mmse.push_back(s.record.mmse);
    const auto cog = cognition_correlation(rel.actual, mmse);
    const bool ok = fdr < 0.05 && !cog.undefined && cog.statistic > 0 && cog.p < 0.05;
    passing += ok;
    detail += fmt("seed %d: FDR-p %.1e, r %.2f (p %.1e)%s; ", static_cast<int>(cfg.seed), fdr,
                  cog.statistic, cog.p, ok ? "" : " [miss]");
  }
  return {passing >= 4, fmt("%zu/5 seeds pass; ", passing) + detail};
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root).generic_string();
    if (rel == "run_meta.json") continue;
    out[rel] = testing::read_text(e.path());
  }
  return out;
}

int quiet_cli(const std::vector<std::string>& args) {
  std::ostringstream sink;
  auto* old_out = std::cout.rdbuf(sink.rdbuf());
  auto* old_err = std::cerr.rdbuf(sink.rdbuf());
  const int code = cli::run(args);
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return code;
}

Outcome determinism() {
  TempDir dir("acc_determinism");
  const auto cohort = (dir / "cohort").string();
  if (quiet_cli({"cbf_surrogate", "synth", "--n-subjects", "40", "--seed", "8", "--out", cohort})) {
    return {false, "synth failed"};
  }
  auto run = [&](const std::string& tag, const std::string& jobs) {
    return quiet_cli({"cbf_surrogate", "all", "--manifest", cohort + "/manifest.csv", "--out",
                      (dir / tag).string(), "--seed", "5", "--jobs", jobs, "--k-outer", "4",
                      "--k-inner", "3", "--grid-c", "1,8", "--grid-gamma", "0.5,2",
                      "--grid-epsilon", "0.1"});
  };
  if (run("a", "1") || run("b", "1") || run("c", "8")) return {false, "an `all` run failed"};
  const auto a = read_tree(dir / "a"), b = read_tree(dir / "b"), c = read_tree(dir / "c");
  std::size_t csv = 0, svg = 0;
  for (const auto& [rel, _] : a) {
    csv += rel.ends_with(".csv");
    svg += rel.ends_with(".svg");
  }
  const bool meta_same = testing::read_text(dir / "a/run_meta.json") ==
                         testing::read_text(dir / "b/run_meta.json");
  const bool ok = !a.empty() && a == b && a == c && meta_same && csv > 0 && svg > 0;
  return {ok, fmt("%zu CSV + %zu SVG files; repeat run identical: %s; jobs 1 vs 8 identical: %s",
                  csv, svg, a == b && meta_same ? "yes" : "no", a == c ? "yes" : "no")};
}

Outcome no_leakage() {
  TempDir dir("acc_leakage");
  SynthConfig cfg;
  cfg.n_subjects = 40;
  cfg.seed = 9;
  const auto cohort = make_synth(cfg, dir, "cohort");
  ExperimentSettings settings;
  settings.grid.c_values = {1, 8};
  settings.grid.gamma_multipliers = {0.5, 2};
  settings.grid.epsilon_values = {0.1};
  settings.cv.k_outer = 5;
  settings.cv.k_inner = 4;
  Experiment ex(cohort, settings);

  // Every prediction row the `all` battery would emit.
  std::vector<std::pair<RegionKey, FrequencyRange>> tasks;
  std::vector<RegionKey> regions{RegionKey::total()};
  for (Lobe l : kLobes) regions.push_back(RegionKey::lobe(l));
  for (const auto& e : cohort.atlas.entries()) regions.push_back(RegionKey::roi(e.roi));
  for (double f : {0.10, 0.15, 0.20}) {
    for (const auto& r : regions) tasks.emplace_back(r, FrequencyRange(f));
  }
  ex.prefetch(tasks);
  const std::size_t n = cohort.size();
  std::size_t rows = 0, bad = 0;
  for (const auto* set : ex.all_predictions()) {
    const auto& oof = set->oof;
    if (oof.rows.size() != n) ++bad;
    for (std::size_t i = 0; i < oof.rows.size(); ++i, ++rows) {
      const auto& row = oof.rows[i];
      const auto& fold = oof.folds.at(row.outer_fold);
      const bool tested = std::count(fold.test_subjects.begin(), fold.test_subjects.end(), i) == 1;
      const bool trained = std::find(fold.train_subjects.begin(), fold.train_subjects.end(), i) !=
                           fold.train_subjects.end();
      std::set<std::size_t> all(fold.train_subjects.begin(), fold.train_subjects.end());
      all.insert(fold.test_subjects.begin(), fold.test_subjects.end());
      const bool partition = all.size() == n &&
                             fold.train_subjects.size() + fold.test_subjects.size() == n;
      if (!tested || trained || !partition || oof.assignment.fold_of[i] != row.outer_fold ||
          !(row.params == fold.params)) {
        ++bad;
      }
    }
  }

  // Perturbing a subject's own target must not move that subject's prediction,
  // which would happen if it entered tuning or training.
  const auto region = RegionKey::lobe(Lobe::parietal);
  const auto x = ex.features(region, select_bins(FrequencyRange(0.15)));
  const auto& y = ex.adjusted_cbf(region);
  const auto base = ex.run_cv(x, y);
  std::size_t moved = 0;
  for (std::size_t victim = 0; victim < n; ++victim) {
    auto poisoned = y;
    poisoned[victim] += 1e4;
    if (ex.run_cv(x, poisoned).rows[victim].predicted != base.rows[victim].predicted) ++moved;
  }
  return {bad == 0 && moved == 0,
          fmt("%zu prediction rows in %zu sets audited, %zu structural violations; %zu/%zu "
              "poisoned subjects shifted their own prediction",
              rows, ex.all_predictions().size(), bad, moved, n)};
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"1 svr_oracle_equivalence", svr_oracle_equivalence},
      {"2 kkt_feasibility", kkt_feasibility},
      {"3 spectral_correctness", spectral_correctness},
      {"4 statistics_oracles", statistics_oracles},
      {"5 synthetic_recovery", synthetic_recovery},
      {"6 sweep_localization", sweep_localization},
      {"7 group_cognition", group_cognition},
      {"8 determinism", determinism},
      {"9 no_leakage", no_leakage},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << name << ": " << o.detail
              << std::endl;
  }
  return failed ? 1 : 0;
}
