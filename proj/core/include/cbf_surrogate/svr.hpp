#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "cbf_surrogate/matrix.hpp"

namespace cbf_surrogate {

struct SvrHyperParams {
  double c = 1.0;        // box constraint
  double gamma = 1.0;    // RBF width, in standardized feature units
  double epsilon = 0.1;  // tube half-width, in standardized target units

  void validate() const;
  friend auto operator<=>(const SvrHyperParams&, const SvrHyperParams&) = default;
};

// Reported after every accepted SMO pair update.
struct SmoStep {
  std::size_t iteration = 0;
  std::size_t i = 0;  // variable indices in [0, 2n): i < n is alpha_i, else alpha*_{i-n}
  std::size_t j = 0;
  double objective = 0.0;  // dual objective (maximization form) after the update
};

// Pair selection: i is always the maximal violator of the up set; j is either
// the maximal violator of the low set or the low-set index with the best
// second-order gain. Both stop on the same KKT gap; ties go to the lowest index.
enum class WorkingSet { max_violating_pair, second_order };

struct SolverOptions {
  double tol = 1e-3;              // maximal KKT violation accepted at exit
  WorkingSet working_set = WorkingSet::max_violating_pair;
  bool shrinking = false;         // skip bounded non-violating samples during the scans
  std::size_t max_passes = 10000; // iteration cap = max_passes * n pair updates
  std::function<void(const SmoStep&)> observer;
};

struct DualSolution {
  std::vector<double> beta;  // alpha_i - alpha*_i
  double bias = 0.0;
  std::size_t iterations = 0;
  double max_violation = 0.0;
};

// exp(-gamma * |x - y|^2).
double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

// Full Gram matrix of the rows of `points`.
Matrix rbf_gram(const Matrix& points, double gamma);

// max over beta of  -1/2 b'Kb + b'z - eps * sum|b|.
double svr_dual_objective(const Matrix& kernel, std::span<const double> targets,
                          std::span<const double> beta, double epsilon);

// Epsilon-SVR dual (sum beta = 0, |beta_i| <= C) solved by SMO over the split
// variables (alpha, alpha*) with the maximal-violating-pair working set; ties
// go to the lowest index. Throws ConvergenceError if the KKT gap is still above
// tol after the iteration cap.
// warm_start, when non-empty, is a feasible beta (|beta_i| <= C, sum = 0) to start from.
DualSolution solve_svr_dual(const Matrix& kernel, std::span<const double> targets, double c,
                            double epsilon, const SolverOptions& options = {},
                            std::span<const double> warm_start = {});

// Bias from a dual solution: mean of z_i - (K b)_i - eps*sign(b_i) over free
// coefficients (0 < |b_i| < C); otherwise the midpoint of the interval allowed
// by the KKT conditions, or mean(z) clamped to it when every coefficient is zero.
double svr_bias(const Matrix& kernel, std::span<const double> targets,
                std::span<const double> beta, double c, double epsilon);

// Z-scored copy of a training set. Zero-variance features are dropped.
struct StandardizedData {
  Matrix points;                       // n x kept
  std::vector<double> targets;         // z-scored targets
  std::vector<std::size_t> kept;       // original feature indices retained
  std::vector<double> feature_means;   // per kept feature
  std::vector<double> feature_sds;     // per kept feature (population sd)
  std::size_t input_dim = 0;
  double target_mean = 0.0;
  double target_sd = 1.0;              // 1 when targets are constant
};

StandardizedData standardize(const Matrix& features, std::span<const double> targets);

class SvrModel {
 public:
  SvrModel() = default;

  // Prediction in target units for a raw (unstandardized) feature vector.
  double predict(std::span<const double> x) const;

  std::size_t input_dim() const noexcept { return input_dim_; }
  const Matrix& train_points() const noexcept { return train_points_; }
  const std::vector<double>& dual_coeffs() const noexcept { return dual_coeffs_; }
  const std::vector<std::size_t>& kept_features() const noexcept { return kept_; }
  const std::vector<double>& feature_means() const noexcept { return feature_means_; }
  const std::vector<double>& feature_sds() const noexcept { return feature_sds_; }
  double bias() const noexcept { return bias_; }
  double gamma() const noexcept { return params_.gamma; }
  const SvrHyperParams& params() const noexcept { return params_; }
  double target_mean() const noexcept { return target_mean_; }
  double target_sd() const noexcept { return target_sd_; }
  std::size_t iterations() const noexcept { return iterations_; }

  // Fit on already standardized data with a precomputed Gram matrix
  // (rbf_gram(data.points, params.gamma)).
  static SvrModel fit(const StandardizedData& data, const Matrix& gram,
                      const SvrHyperParams& params, const SolverOptions& options = {});
  // Wraps a dual solution computed on data.points (keeps nonzero coefficients only).
  static SvrModel from_solution(const StandardizedData& data, const SvrHyperParams& params,
                                const DualSolution& solution);

  // Sectioned CSV: [params], [standardization], [support_vectors].
  void write(std::ostream& out) const;

 private:
  Matrix train_points_;               // support vectors, standardized
  std::vector<double> dual_coeffs_;   // beta per support vector
  std::vector<std::size_t> kept_;
  std::vector<double> feature_means_;
  std::vector<double> feature_sds_;
  SvrHyperParams params_;
  std::size_t input_dim_ = 0;
  double bias_ = 0.0;
  double target_mean_ = 0.0;
  double target_sd_ = 1.0;
  std::size_t iterations_ = 0;
};

SvrModel train_svr(const Matrix& features, std::span<const double> targets,
                   const SvrHyperParams& params, const SolverOptions& options = {});

double predict_svr(const SvrModel& model, std::span<const double> x);

}  // namespace cbf_surrogate
