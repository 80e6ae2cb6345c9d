#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cbf_surrogate/matrix.hpp"
#include "cbf_surrogate/svr.hpp"

namespace cbf_surrogate {

struct FoldAssignment {
  std::vector<std::size_t> fold_of;  // subject index -> fold id in [0, k)
  std::size_t k = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> members(std::size_t fold) const;
  std::vector<std::size_t> complement(std::size_t fold) const;
};

// Seeded shuffle of 0..n-1 dealt round-robin into k folds. Requires 2 <= k <= n.
FoldAssignment make_folds(std::size_t n, std::size_t k, std::uint64_t seed);

struct HyperGrid {
  std::vector<double> c_values;
  std::vector<double> gamma_values;  // absolute gammas
  std::vector<double> epsilon_values;

  // C in {2^-3, 2^-1, ..., 2^9}, gamma in {2^-9, ..., 2^1} / d, epsilon in {0.01, 0.1, 0.3}.
  static HyperGrid defaults(std::size_t feature_count);
  // Same C/epsilon defaults with caller-supplied gamma multipliers of 1/d.
  static HyperGrid scaled(std::vector<double> c_values, std::vector<double> gamma_multipliers,
                          std::vector<double> epsilon_values, std::size_t feature_count);

  void validate() const;
  // Combos in tie-break order: c ascending, then gamma ascending, then epsilon descending.
  std::vector<SvrHyperParams> combos() const;
};

// Solver settings used by the CV pipeline: second-order pair selection with shrinking.
inline SolverOptions pipeline_solver() {
  SolverOptions s;
  s.working_set = WorkingSet::second_order;
  s.shrinking = true;
  return s;
}

struct CvSettings {
  std::size_t k_outer = 10;
  std::size_t k_inner = 10;
  std::uint64_t seed = 1;
  SolverOptions solver = pipeline_solver();
  std::size_t jobs = 1;  // 0 = default_jobs()
  bool keep_models = false;
};

struct GridSearchResult {
  SvrHyperParams best;
  double best_rmse = 0.0;
  std::vector<double> rmse;  // per combo in HyperGrid::combos() order; NaN = infeasible
};

// k_inner-fold CV of every combo on the given data; the combo with the lowest
// mean validation RMSE (target units) wins, ties resolved by combos() order.
GridSearchResult grid_search(const Matrix& features, std::span<const double> targets,
                             const HyperGrid& grid, std::size_t k_inner, std::uint64_t seed,
                             const SolverOptions& solver = {}, std::size_t jobs = 1);

struct OofRow {
  double actual = 0.0;
  double predicted = 0.0;
  std::size_t outer_fold = 0;
  SvrHyperParams params;
};

struct OuterFoldRecord {
  std::vector<std::size_t> train_subjects;  // indices used for tuning and training
  std::vector<std::size_t> test_subjects;
  SvrHyperParams params;
  std::optional<SvrModel> model;  // kept when CvSettings::keep_models
};

struct OofPrediction {
  std::vector<OofRow> rows;  // one per subject, in subject order
  std::vector<OuterFoldRecord> folds;
  FoldAssignment assignment;
};

// Outer k-fold: tune on the complement by grid_search, refit with the chosen
// params, predict the held-out fold. Inner fold seeds are derived from the
// outer seed and the outer fold index.
OofPrediction nested_cv_predict(const Matrix& features, std::span<const double> targets,
                                const HyperGrid& grid, const CvSettings& settings);

// Cross-validation step signature used by the report layer (replaceable in tests).
using CvRunner = std::function<OofPrediction(const Matrix&, std::span<const double>,
                                             const HyperGrid&, const CvSettings&)>;

}  // namespace cbf_surrogate
