#include "cbf_surrogate/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "cbf_surrogate/error.hpp"
#include "cbf_surrogate/parallel.hpp"
#include "cbf_surrogate/rng.hpp"

namespace cbf_surrogate {

std::vector<std::size_t> FoldAssignment::members(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::complement(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

FoldAssignment make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("folds: k must be at least 2");
  if (k > n) {
    throw ValidationError("folds: k exceeds n (k = " + std::to_string(k) +
                          ", n = " + std::to_string(n) + ")");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(seed);
  shuffle(order, rng);
  FoldAssignment out;
  out.k = k;
  out.seed = seed;
  out.fold_of.assign(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) out.fold_of[order[pos]] = pos % k;
  return out;
}

HyperGrid HyperGrid::defaults(std::size_t feature_count) {
  return scaled({0.125, 0.5, 2.0, 8.0, 32.0, 128.0, 512.0},
                {1.0 / 512, 1.0 / 128, 1.0 / 32, 1.0 / 8, 0.5, 2.0}, {0.01, 0.1, 0.3},
                feature_count);
}

HyperGrid HyperGrid::scaled(std::vector<double> c_values, std::vector<double> gamma_multipliers,
                            std::vector<double> epsilon_values, std::size_t feature_count) {
  const double inv_d = 1.0 / static_cast<double>(std::max<std::size_t>(feature_count, 1));
  HyperGrid g;
  g.c_values = std::move(c_values);
  for (double m : gamma_multipliers) g.gamma_values.push_back(m * inv_d);
  g.epsilon_values = std::move(epsilon_values);
  return g;
}

void HyperGrid::validate() const {
  if (c_values.empty() || gamma_values.empty() || epsilon_values.empty()) {
    throw ValidationError("hyperparameter grid: every axis needs at least one value");
  }
  for (double c : c_values) {
    if (!(c > 0)) throw ValidationError("hyperparameter grid: C values must be > 0");
  }
  for (double g : gamma_values) {
    if (!(g > 0)) throw ValidationError("hyperparameter grid: gamma values must be > 0");
  }
  for (double e : epsilon_values) {
    if (!(e >= 0)) throw ValidationError("hyperparameter grid: epsilon values must be >= 0");
  }
}

std::vector<SvrHyperParams> HyperGrid::combos() const {
  auto cs = c_values, gs = gamma_values, es = epsilon_values;
  std::sort(cs.begin(), cs.end());
  std::sort(gs.begin(), gs.end());
  std::sort(es.begin(), es.end(), std::greater<>());
  std::vector<SvrHyperParams> out;
  for (double c : cs) {
    for (double g : gs) {
      for (double e : es) out.push_back({c, g, e});
    }
  }
  return out;
}

namespace {

std::vector<double> take(std::span<const double> v, std::span<const std::size_t> idx) {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

struct InnerFold {
  StandardizedData train;
  Matrix validation;                 // raw features
  std::vector<double> validation_y;  // raw targets
};

}  // namespace

GridSearchResult grid_search(const Matrix& features, std::span<const double> targets,
                             const HyperGrid& grid, std::size_t k_inner, std::uint64_t seed,
                             const SolverOptions& solver, std::size_t jobs) {
  grid.validate();
  const std::size_t n = features.rows();
  if (targets.size() != n) throw ValidationError("grid search: feature/target count mismatch");
  if (n < k_inner) {
    throw ValidationError("grid search: k_inner (" + std::to_string(k_inner) +
                          ") exceeds sample count (" + std::to_string(n) + ")");
  }
  const auto combos = grid.combos();
  const auto folds = make_folds(n, k_inner, seed);

  std::vector<InnerFold> inner(k_inner);
  for (std::size_t f = 0; f < k_inner; ++f) {
    const auto tr = folds.complement(f);
    const auto va = folds.members(f);
    inner[f].train = standardize(features.select_rows(tr), take(targets, tr));
    inner[f].validation = features.select_rows(va);
    inner[f].validation_y = take(targets, va);
  }

  // One task per (gamma, inner fold) shares that Gram matrix across all (C, eps).
  auto gammas = grid.gamma_values;
  std::sort(gammas.begin(), gammas.end());
  gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());
  const std::size_t ng = gammas.size();
  // sse[combo][fold]; NaN marks a failed fit.
  std::vector<std::vector<double>> sse(combos.size(), std::vector<double>(k_inner, 0.0));

  parallel_for(ng * k_inner, jobs, [&](std::size_t task) {
    const std::size_t gi = task / k_inner;
    const std::size_t f = task % k_inner;
    const auto& fold = inner[f];
    const Matrix gram = rbf_gram(fold.train.points, gammas[gi]);
    // combos() walks C upward, so each epsilon's previous solution is a
    // feasible warm start for the next C.
    std::map<double, std::vector<double>> warm;
    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
      const auto& hp = combos[ci];
      if (hp.gamma != gammas[gi]) continue;
      auto& start = warm[hp.epsilon];
      try {
        auto sol = solve_svr_dual(gram, fold.train.targets, hp.c, hp.epsilon, solver, start);
        const auto model = SvrModel::from_solution(fold.train, hp, sol);
        start = std::move(sol.beta);
        double s = 0.0;
        for (std::size_t r = 0; r < fold.validation.rows(); ++r) {
          const double e = model.predict(fold.validation.row(r)) - fold.validation_y[r];
          s += e * e;
        }
        sse[ci][f] = s;
      } catch (const ConvergenceError&) {
        sse[ci][f] = std::numeric_limits<double>::quiet_NaN();
        start.clear();
      }
    }
  });

  GridSearchResult out;
  out.rmse.resize(combos.size());
  std::optional<std::size_t> best;
  for (std::size_t ci = 0; ci < combos.size(); ++ci) {
    double mean_rmse = 0.0;
    bool ok = true;
    for (std::size_t f = 0; f < k_inner; ++f) {
      if (std::isnan(sse[ci][f])) {
        ok = false;
        break;
      }
      mean_rmse += std::sqrt(sse[ci][f] / static_cast<double>(inner[f].validation.rows()));
    }
    mean_rmse /= static_cast<double>(k_inner);
    out.rmse[ci] = ok ? mean_rmse : std::numeric_limits<double>::quiet_NaN();
    if (ok && (!best || mean_rmse < out.rmse[*best])) best = ci;
  }
  if (!best) throw ConvergenceError("grid search: every hyperparameter combination failed", 0.0);
  out.best = combos[*best];
  out.best_rmse = out.rmse[*best];
  return out;
}

OofPrediction nested_cv_predict(const Matrix& features, std::span<const double> targets,
                                const HyperGrid& grid, const CvSettings& settings) {
  const std::size_t n = features.rows();
  if (targets.size() != n) throw ValidationError("nested CV: feature/target count mismatch");
  OofPrediction out;
  out.assignment = make_folds(n, settings.k_outer, settings.seed);
  std::size_t largest = 0;
  for (std::size_t f = 0; f < settings.k_outer; ++f) {
    largest = std::max(largest, out.assignment.members(f).size());
  }
  if (settings.k_inner > n - largest) {
    throw ValidationError("nested CV: k_inner (" + std::to_string(settings.k_inner) +
                          ") exceeds the smallest outer training set (" +
                          std::to_string(n - largest) + ")");
  }

  out.rows.resize(n);
  out.folds.resize(settings.k_outer);
  for (std::size_t f = 0; f < settings.k_outer; ++f) {
    auto& rec = out.folds[f];
    rec.train_subjects = out.assignment.complement(f);
    rec.test_subjects = out.assignment.members(f);

    const Matrix train_x = features.select_rows(rec.train_subjects);
    const auto train_y = take(targets, rec.train_subjects);
    const auto search = grid_search(train_x, train_y, grid, settings.k_inner,
                                    derive_seed(settings.seed, f + 1), settings.solver,
                                    settings.jobs);
    rec.params = search.best;
    auto model = train_svr(train_x, train_y, rec.params, settings.solver);
    for (auto s : rec.test_subjects) {
      out.rows[s] = {targets[s], model.predict(features.row(s)), f, rec.params};
    }
    if (settings.keep_models) rec.model = std::move(model);
  }
  return out;
}

}  // namespace cbf_surrogate
