#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "cbf_surrogate/csv.hpp"
#include "cbf_surrogate/datamodel.hpp"
#include "cbf_surrogate/error.hpp"
#include "cbf_surrogate/parallel.hpp"
#include "cbf_surrogate/report.hpp"
#include "cbf_surrogate/svg.hpp"
#include "cbf_surrogate/synthcohort.hpp"
#include "checksum.hpp"

namespace cbf_surrogate::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct RunConfig {
  std::string subcommand;
  std::string manifest;
  std::string atlas;
  std::string out = "out";
  std::uint64_t seed = 1;
  std::size_t jobs = 0;
  std::string ranges = "0.10,0.15,0.20";
  std::string regions;
  std::size_t k_outer = 10;
  std::size_t k_inner = 10;
  std::string grid_c;
  std::string grid_gamma;
  std::string grid_epsilon;
  std::string features = "region";
  std::string sweep_mode = "single";
  bool welch = false;
  bool dump_models = false;
  double tol = 1e-3;
  int mmse_split = 28;
  double groups_range = 0.15;
  SynthConfig synth;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = csv::trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const auto& tok : split_list(s)) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || end != tok.data() + tok.size() || !std::isfinite(v)) {
      throw ValidationError(std::string(what) + ": not a number: '" + tok + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError(std::string(what) + ": empty list");
  return out;
}

std::vector<FrequencyRange> parse_ranges(const std::string& s) {
  std::vector<FrequencyRange> out;
  for (double f : parse_doubles(s, "ranges")) {
    FrequencyRange r(f);
    if (!r.is_standard()) {
      std::cerr << "warning: non-standard frequency range [0.01-" << format_freq(f) << "] Hz\n";
    }
    out.push_back(r);
  }
  return out;
}

std::vector<RegionKey> all_lobes(const RoiAtlas& atlas) {
  std::vector<RegionKey> out;
  for (Lobe lobe : kLobes) {
    const bool present = std::any_of(atlas.entries().begin(), atlas.entries().end(),
                                     [&](const AtlasEntry& e) { return e.in_lobar_gm && e.lobe == lobe; });
    if (present) out.push_back(RegionKey::lobe(lobe));
  }
  return out;
}

std::vector<RegionKey> all_rois(const RoiAtlas& atlas) {
  std::vector<RegionKey> out;
  for (const auto& e : atlas.entries()) out.push_back(RegionKey::roi(e.roi));
  return out;
}

// Tokens: "lobes", "rois", "total", "lobe:<name>", "roi:<name>".
std::vector<RegionKey> parse_regions(const std::string& s, const RoiAtlas& atlas,
                                     const std::vector<RegionKey>& fallback) {
  if (csv::trim(s).empty()) return fallback;
  std::vector<RegionKey> out;
  for (const auto& tok : split_list(s)) {
    if (tok == "lobes") {
      for (const auto& r : all_lobes(atlas)) out.push_back(r);
    } else if (tok == "rois") {
      for (const auto& r : all_rois(atlas)) out.push_back(r);
    } else {
      const auto key = RegionKey::parse(tok);
      if (key.kind == RegionKind::roi && !atlas.find(key.name)) {
        throw ValidationError("unknown ROI '" + key.name + "'");
      }
      region_members(atlas, key);
      out.push_back(key);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Files written under the output root, checksummed into run_meta.json.
class Outputs {
 public:
  explicit Outputs(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  const fs::path& root() const { return root_; }

  fs::path reserve(const fs::path& rel) {
    const auto path = root_ / rel;
    fs::create_directories(path.parent_path());
    if (std::find(files_.begin(), files_.end(), rel) == files_.end()) files_.push_back(rel);
    return path;
  }

  template <typename Fn>
  void write(const fs::path& rel, Fn&& fn) {
    std::ostringstream buf;
    fn(buf);
    const auto path = reserve(rel);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << buf.str();
    if (!out) throw std::runtime_error("cannot write " + path.string());
  }

  const std::vector<fs::path>& files() const { return files_; }

 private:
  fs::path root_;
  std::vector<fs::path> files_;
};

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["subcommand"] = c.subcommand;
  if (c.subcommand == "synth") {
    const auto& s = c.synth;
    j["n_subjects"] = s.n_subjects;
    j["n_rois"] = s.n_rois;
    j["tr"] = s.tr;
    j["n_timepoints"] = s.n_timepoints;
    j["band_lo"] = s.band_lo;
    j["band_hi"] = s.band_hi;
    j["coupling_kappa"] = s.coupling_kappa;
    j["noise_sd"] = s.noise_sd;
    j["mci_fraction"] = s.mci_fraction;
    j["cbf_base"] = s.cbf_base;
    j["cbf_sd"] = s.cbf_sd;
    j["mmse_coupling"] = s.mmse_coupling;
    j["deficit_sd"] = s.deficit_sd;
    return j;
  }
  j["manifest"] = c.manifest;
  j["atlas"] = c.atlas;
  j["ranges"] = c.ranges;
  j["regions"] = c.regions;
  j["k_outer"] = c.k_outer;
  j["k_inner"] = c.k_inner;
  j["grid_c"] = c.grid_c;
  j["grid_gamma"] = c.grid_gamma;
  j["grid_epsilon"] = c.grid_epsilon;
  j["features"] = c.features;
  j["sweep_mode"] = c.sweep_mode;
  j["welch"] = c.welch;
  j["dump_models"] = c.dump_models;
  j["tol"] = c.tol;
  j["mmse_split"] = c.mmse_split;
  j["groups_range"] = c.groups_range;
  return j;
}

void write_run_meta(const RunConfig& c, Outputs& outputs) {
  ordered_json meta;
  meta["config"] = config_json(c);
  meta["seed"] = c.seed;
  meta["jobs"] = c.jobs;
  ordered_json sums = ordered_json::object();
  auto files = outputs.files();
  std::sort(files.begin(), files.end());
  for (const auto& rel : files) sums[rel.generic_string()] = sha256_file(outputs.root() / rel);
  meta["artifacts"] = sums;

  const auto path = outputs.root() / "run_meta.json";
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << meta.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + path.string());
  }

  // Self-audit: re-read the meta file and every listed artifact.
  std::ifstream in(path, std::ios::binary);
  const auto reread = ordered_json::parse(in);
  for (const auto& [rel, sum] : reread.at("artifacts").items()) {
    if (sha256_file(outputs.root() / rel) != sum.get<std::string>()) {
      throw std::runtime_error("run_meta checksum mismatch for " + rel);
    }
  }
}

ExperimentSettings make_settings(const RunConfig& c) {
  ExperimentSettings s;
  if (!c.grid_c.empty()) s.grid.c_values = parse_doubles(c.grid_c, "grid-c");
  if (!c.grid_gamma.empty()) s.grid.gamma_multipliers = parse_doubles(c.grid_gamma, "grid-gamma");
  if (!c.grid_epsilon.empty()) s.grid.epsilon_values = parse_doubles(c.grid_epsilon, "grid-epsilon");
  s.grid.for_features(1).validate();
  s.cv.k_outer = c.k_outer;
  s.cv.k_inner = c.k_inner;
  s.cv.seed = c.seed;
  s.cv.solver.tol = c.tol;
  s.cv.jobs = c.jobs;
  s.cv.keep_models = c.dump_models;
  if (!(c.tol > 0)) throw ValidationError("tol must be > 0");
  if (c.features == "region") {
    s.scope = FeatureScope::region;
  } else if (c.features == "whole-brain") {
    s.scope = FeatureScope::whole_brain;
  } else {
    throw ValidationError("features must be 'region' or 'whole-brain'");
  }
  if (c.sweep_mode == "single") {
    s.sweep_mode = SweepMode::single;
  } else if (c.sweep_mode == "prefix") {
    s.sweep_mode = SweepMode::prefix;
  } else {
    throw ValidationError("sweep-mode must be 'single' or 'prefix'");
  }
  s.ttest = c.welch ? TTestKind::welch : TTestKind::pooled;
  s.mmse_split = c.mmse_split;
  return s;
}

// Fold-size preconditions checked up front so nothing runs on a bad config.
void check_folds(const RunConfig& c, std::size_t n) {
  const auto folds = make_folds(n, c.k_outer, c.seed);
  std::size_t largest = 0;
  for (std::size_t f = 0; f < folds.k; ++f) largest = std::max(largest, folds.members(f).size());
  if (c.k_inner < 2 || c.k_inner > n - largest) {
    throw ValidationError("k_inner (" + std::to_string(c.k_inner) +
                          ") must be in [2, smallest outer training set = " +
                          std::to_string(n - largest) + "]");
  }
}

void dump_models(Experiment& exp, Outputs& outputs) {
  for (const auto* set : exp.all_predictions()) {
    for (std::size_t f = 0; f < set->oof.folds.size(); ++f) {
      const auto& fold = set->oof.folds[f];
      if (!fold.model) continue;
      const auto rel = fs::path("models") / (region_file_stem(set->region) + "_f" +
                                             format_freq(set->freq_max) + "_fold" +
                                             std::to_string(f) + ".csv");
      outputs.write(rel, [&](std::ostream& o) { fold.model->write(o); });
    }
  }
}

void write_figures(Experiment& exp, const std::vector<EvaluationRow>& rows, Outputs& outputs) {
  for (const auto& row : rows) {
    const auto& set = exp.predict(row.region, FrequencyRange(row.freq_max));
    const auto rel = fs::path("figures") /
                     (region_file_stem(row.region) + "_f" + format_freq(row.freq_max) + ".svg");
    write_prediction_figure(set, row, outputs.reserve(rel));
  }
}

std::vector<RelativeCbf> relative_table(Experiment& exp, const std::vector<RegionKey>& regions,
                                        const FrequencyRange& range) {
  std::vector<std::pair<RegionKey, FrequencyRange>> tasks;
  for (const auto& r : regions) {
    tasks.emplace_back(r, range);
    tasks.emplace_back(reference_region(exp.cohort().atlas, r), range);
  }
  exp.prefetch(tasks);
  std::vector<RelativeCbf> out;
  for (const auto& r : regions) out.push_back(relative_cbf_for(exp, r, range));
  return out;
}

std::vector<RegionKey> non_total(std::vector<RegionKey> regions) {
  std::erase_if(regions, [](const RegionKey& r) { return r.kind == RegionKind::total_lobar_gm; });
  if (regions.empty()) throw ValidationError("relative CBF needs at least one ROI or lobe region");
  return regions;
}

void write_groups(Experiment& exp, const std::vector<RelativeCbf>& rels, Outputs& outputs) {
  std::vector<GroupComparison> rows;
  for (const auto& rel : rels) {
    auto part = group_compare(exp.cohort(), rel, exp.settings().mmse_split, exp.settings().ttest);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  outputs.write("groups.csv", [&](std::ostream& o) { write_groups_csv(o, rows); });
}

void write_cognition(Experiment& exp, const std::vector<RelativeCbf>& rels, Outputs& outputs) {
  const auto rows = cognition_table(exp.cohort(), rels);
  outputs.write("cognition.csv", [&](std::ostream& o) { write_cognition_csv(o, rows); });
}

void write_cognition_figures(Experiment& exp, const std::vector<RelativeCbf>& rels,
                             const std::vector<CognitionRow>& rows, Outputs& outputs) {
  std::vector<double> mmse;
  for (const auto& s : exp.cohort().subjects) mmse.push_back(s.record.mmse);
  for (const auto& rel : rels) {
    if (rel.predicted.empty()) continue;
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const CognitionRow& r) {
      return r.region == rel.region && r.variant == "predicted";
    });
    char note[96];
    if (it == rows.end() || it->result.undefined) {
      std::snprintf(note, sizeof(note), "r undefined");
    } else {
      std::snprintf(note, sizeof(note), "r = %.2f, FDR-p = %.2g", it->result.statistic,
                    it->result.fdr_p.value_or(1.0));
    }
    ScatterLabels labels{rel.region.label() + " predicted relative CBF vs MMSE",
                         "predicted relative CBF", "MMSE", note};
    const auto rel_path = fs::path("figures") / ("cognition_" + region_file_stem(rel.region) + ".svg");
    write_scatter_svg(rel.predicted, mmse, labels, outputs.reserve(rel_path));
  }
}

void run_synth(const RunConfig& c, Outputs& outputs) {
  auto cfg = c.synth;
  cfg.seed = c.seed;
  cfg.validate();
  const auto manifest = generate_cohort(cfg, outputs.root());
  for (const auto& entry : fs::recursive_directory_iterator(outputs.root())) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), outputs.root());
    if (rel == "run_meta.json") continue;
    outputs.reserve(rel);
  }
  std::cout << "wrote synthetic cohort: " << manifest.string() << '\n';
}

void run_analysis(RunConfig& c, Outputs& outputs) {
  if (c.manifest.empty()) throw ValidationError("--manifest is required");
  if (c.atlas.empty()) c.atlas = (fs::path(c.manifest).parent_path() / "atlas.csv").string();
  const auto settings = make_settings(c);
  const auto ranges = parse_ranges(c.ranges);
  const FrequencyRange groups_range(c.groups_range);
  if (c.mmse_split < 0 || c.mmse_split > 30) throw ValidationError("mmse-split must be in [0, 30]");

  const Cohort cohort = load_cohort(c.manifest, c.atlas);
  const auto& atlas = cohort.atlas;
  const auto& sub = c.subcommand;
  if (sub != "features" && sub != "demographics") check_folds(c, cohort.size());

  Experiment exp(cohort, settings);
  const auto lobes = all_lobes(atlas);

  if (sub == "features") {
    auto fallback = all_rois(atlas);
    for (const auto& l : lobes) fallback.push_back(l);
    fallback.push_back(RegionKey::total());
    const auto regions = parse_regions(c.regions, atlas, fallback);
    outputs.write("features.csv", [&](std::ostream& o) { write_features_csv(o, exp, regions); });
  } else if (sub == "predict") {
    const auto regions = parse_regions(c.regions, atlas, lobes);
    std::vector<std::pair<RegionKey, FrequencyRange>> tasks;
    for (const auto& range : ranges) {
      for (const auto& r : regions) tasks.emplace_back(r, range);
    }
    exp.prefetch(tasks);
    outputs.write("predictions.csv", [&](std::ostream& o) {
      write_predictions_csv(o, cohort, exp.all_predictions(), c.seed);
    });
  } else if (sub == "evaluate") {
    const auto regions = parse_regions(c.regions, atlas, lobes);
    const auto rows = evaluate_regions(exp, regions, ranges);
    outputs.write("evaluation.csv", [&](std::ostream& o) { write_evaluation_csv(o, rows); });
    write_figures(exp, rows, outputs);
  } else if (sub == "sweep") {
    const auto regions = parse_regions(c.regions, atlas, {RegionKey::total()});
    outputs.write("sweep.csv", [&](std::ostream& o) {
      bool first = true;
      for (const auto& r : regions) {
        std::ostringstream part;
        write_sweep_csv(part, r, frequency_sweep(exp, r));
        auto text = part.str();
        if (!first) text.erase(0, text.find('\n') + 1);
        o << text;
        first = false;
      }
    });
  } else if (sub == "groups" || sub == "cognition") {
    const auto regions = non_total(parse_regions(c.regions, atlas, lobes));
    const auto rels = relative_table(exp, regions, groups_range);
    if (sub == "groups") {
      write_groups(exp, rels, outputs);
    } else {
      write_cognition(exp, rels, outputs);
    }
  } else if (sub == "demographics") {
    const auto rows = summarize_cohort(cohort, settings.ttest);
    outputs.write("demographics.csv", [&](std::ostream& o) { write_demographics_csv(o, rows); });
  } else if (sub == "all") {
    const auto rois = all_rois(atlas);
    const auto demo = summarize_cohort(cohort, settings.ttest);
    outputs.write("demographics.csv", [&](std::ostream& o) { write_demographics_csv(o, demo); });

    // One batch so independent CV runs share the worker pool.
    std::vector<std::pair<RegionKey, FrequencyRange>> tasks;
    for (const auto& range : ranges) {
      for (const auto& r : lobes) tasks.emplace_back(r, range);
      tasks.emplace_back(RegionKey::total(), range);
    }
    for (const auto& r : rois) tasks.emplace_back(r, groups_range);
    for (const auto& r : lobes) tasks.emplace_back(r, groups_range);
    tasks.emplace_back(RegionKey::total(), groups_range);
    exp.prefetch(tasks);

    const auto eval_lobes = evaluate_regions(exp, lobes, ranges);
    const auto eval_total = evaluate_regions(exp, {RegionKey::total()}, ranges);
    const auto eval_roi = evaluate_regions(exp, rois, {groups_range});
    outputs.write("evaluation.csv", [&](std::ostream& o) { write_evaluation_csv(o, eval_lobes); });
    outputs.write("evaluation_total.csv",
                  [&](std::ostream& o) { write_evaluation_csv(o, eval_total); });
    outputs.write("evaluation_roi.csv", [&](std::ostream& o) { write_evaluation_csv(o, eval_roi); });
    write_figures(exp, eval_lobes, outputs);
    write_figures(exp, eval_total, outputs);

    const auto sweep = frequency_sweep(exp, RegionKey::total());
    outputs.write("sweep.csv",
                  [&](std::ostream& o) { write_sweep_csv(o, RegionKey::total(), sweep); });

    auto rel_regions = lobes;
    rel_regions.insert(rel_regions.end(), rois.begin(), rois.end());
    const auto rels = relative_table(exp, rel_regions, groups_range);
    write_groups(exp, rels, outputs);
    const auto cog = cognition_table(cohort, rels);
    outputs.write("cognition.csv", [&](std::ostream& o) { write_cognition_csv(o, cog); });
    write_cognition_figures(exp, rels, cog, outputs);

    outputs.write("predictions.csv", [&](std::ostream& o) {
      write_predictions_csv(o, cohort, exp.all_predictions(), c.seed);
    });
  }
  if (c.dump_models) dump_models(exp, outputs);
}

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--manifest", c.manifest, "Subject manifest CSV");
  app.add_option("--atlas", c.atlas, "ROI atlas CSV (default: atlas.csv next to the manifest)");
  app.add_option("--out", c.out, "Output directory")->capture_default_str();
  app.add_option("--seed", c.seed, "Seed for folds and synthetic data")->capture_default_str();
  app.add_option("--jobs", c.jobs, "Worker threads (default: CBF_SURROGATE_JOBS or all cores)");
  app.add_option("--ranges", c.ranges, "Comma-separated f_max values in Hz")->capture_default_str();
  app.add_option("--regions", c.regions,
                 "Comma-separated regions: lobes, rois, total, lobe:<name>, roi:<name>");
  app.add_option("--k-outer", c.k_outer, "Outer CV folds")->capture_default_str();
  app.add_option("--k-inner", c.k_inner, "Inner CV folds")->capture_default_str();
  app.add_option("--grid-c", c.grid_c, "Comma-separated C values");
  app.add_option("--grid-gamma", c.grid_gamma, "Comma-separated gamma multipliers of 1/d");
  app.add_option("--grid-epsilon", c.grid_epsilon, "Comma-separated epsilon values");
  app.add_option("--features", c.features, "Feature scope: region | whole-brain")->capture_default_str();
  app.add_option("--sweep-mode", c.sweep_mode, "Sweep model: single | prefix")->capture_default_str();
  app.add_flag("--welch", c.welch, "Use Welch's t-test instead of pooled variance");
  app.add_flag("--dump-models", c.dump_models, "Write every outer-fold model under models/");
  app.add_option("--tol", c.tol, "SMO KKT tolerance")->capture_default_str();
  app.add_option("--mmse-split", c.mmse_split, "MCI-high threshold (MMSE >= split)")->capture_default_str();
  app.add_option("--groups-range", c.groups_range, "f_max used for relative CBF")->capture_default_str();

  auto& s = c.synth;
  app.add_option("--n-subjects", s.n_subjects, "synth: subjects")->capture_default_str();
  app.add_option("--n-rois", s.n_rois, "synth: ROIs")->capture_default_str();
  app.add_option("--tr", s.tr, "synth: repetition time in s")->capture_default_str();
  app.add_option("--n-timepoints", s.n_timepoints, "synth: samples per series")->capture_default_str();
  app.add_option("--band-lo", s.band_lo, "synth: coupled band lower edge in Hz")->capture_default_str();
  app.add_option("--band-hi", s.band_hi, "synth: coupled band upper edge in Hz")->capture_default_str();
  app.add_option("--kappa", s.coupling_kappa, "synth: coupling strength")->capture_default_str();
  app.add_option("--noise-sd", s.noise_sd, "synth: white-noise sd")->capture_default_str();
  app.add_option("--mci-fraction", s.mci_fraction, "synth: MCI fraction")->capture_default_str();
  app.add_option("--cbf-base", s.cbf_base, "synth: mean CBF")->capture_default_str();
  app.add_option("--cbf-sd", s.cbf_sd, "synth: CBF sd")->capture_default_str();
  app.add_option("--mmse-coupling", s.mmse_coupling, "synth: MMSE drop per severity unit")->capture_default_str();
  app.add_option("--deficit-sd", s.deficit_sd, "synth: relative-CBF deficit in MCI-low (sd units)")
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv) {
  RunConfig config;
  CLI::App app{"Estimate regional CBF from resting-state BOLD spectral power"};
  app.set_config("--config", "", "key=value config file; command-line flags take precedence");
  app.require_subcommand(1, 1);
  app.fallthrough();
  add_options(app, config);

  const std::pair<const char*, const char*> subs[] = {
      {"features", "Dump per-subject spectral bin powers"},
      {"predict", "Nested-CV CBF predictions"},
      {"evaluate", "Correlation tables and scatter plots of actual vs predicted CBF"},
      {"sweep", "Per-bin frequency sweep"},
      {"groups", "NC / MCI subgroup comparisons of relative CBF"},
      {"cognition", "Relative CBF vs MMSE correlations"},
      {"demographics", "Cohort demographics table"},
      {"synth", "Generate a synthetic cohort with known ground truth"},
      {"all", "Full evaluation battery"},
  };
  for (const auto& [name, desc] : subs) app.add_subcommand(name, desc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }
  config.subcommand = app.get_subcommands().front()->get_name();
  if (config.jobs == 0) config.jobs = default_jobs();

  try {
    Outputs outputs(config.out);
    if (config.subcommand == "synth") {
      run_synth(config, outputs);
    } else {
      run_analysis(config, outputs);
    }
    write_run_meta(config, outputs);
    std::cout << "wrote " << outputs.files().size() << " artifacts under " << config.out << '\n';
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace cbf_surrogate::cli
