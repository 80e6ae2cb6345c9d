#include "cbf_surrogate/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "cbf_surrogate/csv.hpp"
#include "cbf_surrogate/error.hpp"

namespace cbf_surrogate {

void SvrHyperParams::validate() const {
  if (!(c > 0) || !std::isfinite(c)) throw ValidationError("SVR: C must be > 0");
  if (!(gamma > 0) || !std::isfinite(gamma)) throw ValidationError("SVR: gamma must be > 0");
  if (!(epsilon >= 0) || !std::isfinite(epsilon)) {
    throw ValidationError("SVR: epsilon must be >= 0");
  }
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
  if (x.size() != y.size()) {
    throw ValidationError("rbf_kernel: dimension mismatch (" + std::to_string(x.size()) +
                          " vs " + std::to_string(y.size()) + ")");
  }
  double d2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

Matrix rbf_gram(const Matrix& points, double gamma) {
  const std::size_t n = points.rows();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = rbf_kernel(points.row(i), points.row(j), gamma);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

double svr_dual_objective(const Matrix& kernel, std::span<const double> targets,
                          std::span<const double> beta, double epsilon) {
  const std::size_t n = beta.size();
  double quad = 0.0, lin = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double kb = 0.0;
    for (std::size_t j = 0; j < n; ++j) kb += kernel(i, j) * beta[j];
    quad += beta[i] * kb;
    lin += beta[i] * targets[i];
    l1 += std::abs(beta[i]);
  }
  return -0.5 * quad + lin - epsilon * l1;
}

namespace {

// Split-variable form used by SMO:
//   min_a  1/2 a'Qa + p'a   s.t.  y'a = 0,  0 <= a_t <= C
// with a = (alpha, alpha*), y = (+1..., -1...), Q_st = y_s y_t K(s mod n, t mod n),
// p = (eps - z, eps + z). Both halves of the gradient follow from
// f = K beta - z:  G_s = f_s + eps,  G_{s+n} = eps - f_s.
//
// Samples whose two variables sit at bounds and cannot enter a violating pair
// are shrunk out of the scans (and, unless full_update, out of the gradient
// update); their f values are rebuilt before the final optimality check.
class SmoSolver {
 public:
  SmoSolver(const Matrix& kernel, std::span<const double> z, double c, double epsilon,
            std::span<const double> start, bool full_update)
      : k_(kernel), z_(z), n_(z.size()), c_(c), eps_(epsilon), full_update_(full_update),
        a_(2 * n_, 0.0), f_(n_), diag_(n_), up_pen_(2 * n_), low_pen_(2 * n_),
        gain_(2 * n_), active_(n_) {
    for (std::size_t s = 0; s < n_; ++s) {
      f_[s] = -z[s];
      diag_[s] = k_(s, s);
      active_[s] = s;
    }
    if (!start.empty()) {
      for (std::size_t s = 0; s < n_; ++s) {
        a_[s] = std::clamp(start[s], 0.0, c_);
        a_[s + n_] = std::clamp(-start[s], 0.0, c_);
      }
      for (std::size_t s = 0; s < n_; ++s) f_[s] = -z_[s] + kernel_times_beta(s);
    }
    for (std::size_t t = 0; t < 2 * n_; ++t) refresh_sets(t);
  }

  // -y_t G_t: -f_s - eps for alpha_s, eps - f_s for alpha*_s.
  double violation(std::size_t t) const { return t < n_ ? -f_[t] - eps_ : eps_ - f_[t - n_]; }

  // Maximal violating pair over the active variables in index order (lowest
  // index wins ties); returns the KKT gap. Set membership is folded into
  // +-inf penalties so the scans are branch-free reductions.
  double select(std::size_t& i, std::size_t& j, WorkingSet rule) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    double up_max = -kInf, low_min = kInf;
    const double* f = f_.data();
    const double* up = up_pen_.data();
    const double* low = low_pen_.data();
    const std::size_t* act = active_.data();
    const std::size_t m = active_.size();
#pragma omp simd reduction(max : up_max) reduction(min : low_min)
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t s = act[k];
      const double v0 = -f[s] - eps_;
      const double v1 = eps_ - f[s];
      const double u = std::max(v0 + up[s], v1 + up[s + n_]);
      const double l = std::min(v0 + low[s], v1 + low[s + n_]);
      up_max = u > up_max ? u : up_max;
      low_min = l < low_min ? l : low_min;
    }
    up_max_ = up_max;
    low_min_ = low_min;
    i = j = 2 * n_;
    if (up_max == -kInf || low_min == kInf) return 0.0;
    i = first_match(up_max, up_pen_);
    const double gap = up_max - low_min;
    if (rule == WorkingSet::second_order && gap > 0) {
      j = second_order_partner(i, up_max);
    } else {
      j = first_match(low_min, low_pen_);
    }
    return gap;
  }

  std::size_t first_match(double target, const std::vector<double>& pen) const {
    for (std::size_t s : active_) {
      if (-f_[s] - eps_ + pen[s] == target) return s;
    }
    for (std::size_t s : active_) {
      if (eps_ - f_[s] + pen[s + n_] == target) return s + n_;
    }
    return 2 * n_;
  }

  // Fan-Chen-Lin choice of j for a fixed i: among violating low-set indices,
  // the one with the largest guaranteed objective decrease b^2 / a.
  std::size_t second_order_partner(std::size_t i, double up_max) const {
    constexpr double kTau = 1e-12;
    const std::size_t si = i < n_ ? i : i - n_;
    const double* ri = k_.row(si).data();
    const double kii = ri[si];
    const double* f = f_.data();
    const double* low = low_pen_.data();
    const std::size_t* act = active_.data();
    const std::size_t m = active_.size();
    double* gain = gain_.data();
#pragma omp simd
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t s = act[k];
      double a = kii + diag_[s] - 2.0 * ri[s];
      a = a > 0 ? a : kTau;
      const double b0 = up_max - (-f[s] - eps_ + low[s]);
      const double b1 = up_max - (eps_ - f[s] + low[s + n_]);
      gain[k] = b0 > 0 ? b0 * b0 / a : -1.0;
      gain[k + m] = b1 > 0 ? b1 * b1 / a : -1.0;
    }
    double best = -1.0;
#pragma omp simd reduction(max : best)
    for (std::size_t k = 0; k < 2 * m; ++k) best = gain[k] > best ? gain[k] : best;
    if (best > 0) {
      for (std::size_t k = 0; k < 2 * m; ++k) {
        if (gain[k] == best) return k < m ? act[k] : act[k - m] + n_;
      }
    }
    return first_match(low_min_, low_pen_);
  }

  // Two-variable analytic step with clipping to the box (LIBSVM's update).
  void update(std::size_t i, std::size_t j) {
    const std::size_t si = i < n_ ? i : i - n_;
    const std::size_t sj = j < n_ ? j : j - n_;
    const double yi = i < n_ ? 1.0 : -1.0;
    const double yj = j < n_ ? 1.0 : -1.0;
    const double qii = k_(si, si);
    const double qjj = k_(sj, sj);
    const double qij = yi * yj * k_(si, sj);
    const double gi = -yi * violation(i), gj = -yj * violation(j);
    const double old_ai = a_[i];
    const double old_aj = a_[j];
    constexpr double kTau = 1e-12;

    if (yi != yj) {
      double quad = qii + qjj + 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-gi - gj) / quad;
      const double diff = a_[i] - a_[j];
      a_[i] += delta;
      a_[j] += delta;
      if (diff > 0) {
        if (a_[j] < 0) {
          a_[j] = 0;
          a_[i] = diff;
        }
      } else if (a_[i] < 0) {
        a_[i] = 0;
        a_[j] = -diff;
      }
      if (diff > 0) {
        if (a_[i] > c_) {
          a_[i] = c_;
          a_[j] = c_ - diff;
        }
      } else if (a_[j] > c_) {
        a_[j] = c_;
        a_[i] = c_ + diff;
      }
    } else {
      double quad = qii + qjj - 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (gi - gj) / quad;
      const double sum = a_[i] + a_[j];
      a_[i] -= delta;
      a_[j] += delta;
      if (sum > c_) {
        if (a_[i] > c_) {
          a_[i] = c_;
          a_[j] = sum - c_;
        }
      } else if (a_[j] < 0) {
        a_[j] = 0;
        a_[i] = sum;
      }
      if (sum > c_) {
        if (a_[j] > c_) {
          a_[j] = c_;
          a_[i] = sum - c_;
        }
      } else if (a_[i] < 0) {
        a_[i] = 0;
        a_[j] = sum;
      }
    }

    const double dbi = yi * (a_[i] - old_ai);
    const double dbj = yj * (a_[j] - old_aj);
    const double* ri = k_.row(si).data();
    const double* rj = k_.row(sj).data();
    double* f = f_.data();
    if (full_update_ || active_.size() == n_) {
      for (std::size_t s = 0; s < n_; ++s) f[s] += ri[s] * dbi + rj[s] * dbj;
    } else {
      const std::size_t* act = active_.data();
      const std::size_t m = active_.size();
#pragma omp simd
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t s = act[k];
        f[s] += ri[s] * dbi + rj[s] * dbj;
      }
    }
    refresh_sets(i);
    refresh_sets(j);
  }

  // Drops samples whose variables are bounded and on the non-violating side
  // of the bounds from the last select() call.
  void shrink() {
    const double m = up_max_, lo = low_min_;
    auto removable = [&](std::size_t t) {
      const bool up = up_pen_[t] == 0.0, low = low_pen_[t] == 0.0;
      if (up && low) return false;
      const double v = violation(t);
      return up ? v < lo : v > m;
    };
    std::size_t w = 0;
    for (std::size_t s : active_) {
      if (!(removable(s) && removable(s + n_))) active_[w++] = s;
    }
    active_.resize(w);
  }

  // Rebuilds f for shrunk samples and reactivates everything; false if
  // nothing was shrunk.
  bool unshrink() {
    if (active_.size() == n_) return false;
    if (!full_update_) {
      std::vector<bool> is_active(n_, false);
      for (std::size_t s : active_) is_active[s] = true;
      for (std::size_t s = 0; s < n_; ++s) {
        if (!is_active[s]) f_[s] = -z_[s] + kernel_times_beta(s);
      }
    }
    active_.resize(n_);
    std::iota(active_.begin(), active_.end(), std::size_t{0});
    return true;
  }

  double objective() const {
    double f = 0.0;
    for (std::size_t s = 0; s < n_; ++s) {
      f += a_[s] * (f_[s] + 2.0 * eps_ - z_[s]);
      f += a_[s + n_] * (2.0 * eps_ - f_[s] + z_[s]);
    }
    return -0.5 * f;
  }

  std::vector<double> beta() const {
    std::vector<double> b(n_);
    for (std::size_t i = 0; i < n_; ++i) b[i] = a_[i] - a_[i + n_];
    return b;
  }

 private:
  double kernel_times_beta(std::size_t s) const {
    const auto row = k_.row(s);
    double kb = 0.0;
    for (std::size_t t = 0; t < n_; ++t) {
      const double b = a_[t] - a_[t + n_];
      if (b != 0.0) kb += row[t] * b;
    }
    return kb;
  }

  void refresh_sets(std::size_t t) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const bool is_up = t < n_ ? a_[t] < c_ : a_[t] > 0;
    const bool is_low = t < n_ ? a_[t] > 0 : a_[t] < c_;
    up_pen_[t] = is_up ? 0.0 : -kInf;
    low_pen_[t] = is_low ? 0.0 : kInf;
  }

  const Matrix& k_;
  std::span<const double> z_;
  std::size_t n_;
  double c_;
  double eps_;
  bool full_update_;
  std::vector<double> a_;
  std::vector<double> f_;
  std::vector<double> diag_, up_pen_, low_pen_;
  mutable std::vector<double> gain_;
  std::vector<std::size_t> active_;
  double up_max_ = 0.0, low_min_ = 0.0;
};

}  // namespace

double svr_bias(const Matrix& kernel, std::span<const double> targets,
                std::span<const double> beta, double c, double epsilon) {
  const std::size_t n = beta.size();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double lb = -std::numeric_limits<double>::infinity();
  double ub = std::numeric_limits<double>::infinity();
  bool all_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    double kb = 0.0;
    for (std::size_t j = 0; j < n; ++j) kb += kernel(i, j) * beta[j];
    const double r = targets[i] - kb;  // residual before bias
    const double b = beta[i];
    if (b != 0.0) all_zero = false;
    if (b > 0 && b < c) {
      free_sum += r - epsilon;
      ++free_count;
    } else if (b < 0 && b > -c) {
      free_sum += r + epsilon;
      ++free_count;
    } else if (b == 0.0) {
      lb = std::max(lb, r - epsilon);
      ub = std::min(ub, r + epsilon);
    } else if (b >= c) {
      ub = std::min(ub, r - epsilon);
    } else {
      lb = std::max(lb, r + epsilon);
    }
  }
  if (free_count > 0) return free_sum / static_cast<double>(free_count);
  if (all_zero) {
    // Any b in [lb, ub] is optimal; take the one nearest mean(z).
    double m = 0.0;
    for (double z : targets) m += z;
    m = n ? m / static_cast<double>(n) : 0.0;
    return lb <= ub ? std::clamp(m, lb, ub) : 0.5 * (lb + ub);
  }
  if (!std::isfinite(lb) || !std::isfinite(ub)) return std::isfinite(lb) ? lb : ub;
  return 0.5 * (lb + ub);
}

DualSolution solve_svr_dual(const Matrix& kernel, std::span<const double> targets, double c,
                            double epsilon, const SolverOptions& options,
                            std::span<const double> warm_start) {
  const std::size_t n = targets.size();
  if (n == 0) throw ValidationError("SVR: no training points");
  if (kernel.rows() != n || kernel.cols() != n) {
    throw ValidationError("SVR: kernel matrix does not match target count");
  }
  if (!(options.tol > 0)) throw ValidationError("SVR: tol must be > 0");

  if (!warm_start.empty()) {
    if (warm_start.size() != n) throw ValidationError("SVR: warm start size mismatch");
    double sum = 0.0;
    for (double b : warm_start) {
      if (!(std::abs(b) <= c)) throw ValidationError("SVR: warm start violates |beta| <= C");
      sum += b;
    }
    if (std::abs(sum) > 1e-9) throw ValidationError("SVR: warm start violates sum(beta) = 0");
  }
  SmoSolver solver(kernel, targets, c, epsilon, warm_start,
                   !options.shrinking || static_cast<bool>(options.observer));
  const std::size_t cap = std::max<std::size_t>(1, options.max_passes) * std::max<std::size_t>(n, 1);
  const std::size_t shrink_every = std::min<std::size_t>(n, 1000);
  DualSolution out;
  std::size_t i = 0, j = 0;
  bool unshrunk_near_optimum = false;
  std::size_t last_shrink = 0;
  double gap = solver.select(i, j, options.working_set);
  for (;;) {
    if (gap < options.tol) {
      // Optimal on the active set; confirm on all variables.
      if (!solver.unshrink()) break;
      gap = solver.select(i, j, options.working_set);
      if (gap < options.tol) break;
    }
    if (options.shrinking && out.iterations >= last_shrink + shrink_every) {
      last_shrink = out.iterations;
      if (!unshrunk_near_optimum && gap <= 10.0 * options.tol) {
        unshrunk_near_optimum = true;
        solver.unshrink();
        gap = solver.select(i, j, options.working_set);
      }
      solver.shrink();
      gap = solver.select(i, j, options.working_set);
      if (gap < options.tol) continue;
    }
    if (out.iterations >= cap) {
      throw ConvergenceError("SVR: SMO did not converge in " + std::to_string(cap) +
                                 " iterations (max KKT violation " + std::to_string(gap) + ")",
                             gap);
    }
    solver.update(i, j);
    ++out.iterations;
    if (options.observer) options.observer({out.iterations, i, j, solver.objective()});
    gap = solver.select(i, j, options.working_set);
  }
  out.max_violation = gap;
  out.beta = solver.beta();
  out.bias = svr_bias(kernel, targets, out.beta, c, epsilon);
  return out;
}

StandardizedData standardize(const Matrix& features, std::span<const double> targets) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  if (n == 0) throw ValidationError("SVR: no training points");
  if (targets.size() != n) throw ValidationError("SVR: feature/target count mismatch");

  StandardizedData out;
  out.input_dim = d;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = features(r, c);
      if (!std::isfinite(v)) throw ValidationError("SVR: non-finite feature value");
      mean += v;
    }
    mean *= inv_n;
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dv = features(r, c) - mean;
      ss += dv * dv;
    }
    const double sd = std::sqrt(ss * inv_n);
    if (sd > 1e-12 * std::max(1.0, std::abs(mean))) {
      out.kept.push_back(c);
      out.feature_means.push_back(mean);
      out.feature_sds.push_back(sd);
    }
  }
  out.points = Matrix(n, out.kept.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < out.kept.size(); ++k) {
      out.points(r, k) = (features(r, out.kept[k]) - out.feature_means[k]) / out.feature_sds[k];
    }
  }

  double tm = 0.0;
  for (double y : targets) {
    if (!std::isfinite(y)) throw ValidationError("SVR: non-finite target value");
    tm += y;
  }
  tm *= inv_n;
  double tss = 0.0;
  for (double y : targets) tss += (y - tm) * (y - tm);
  double tsd = std::sqrt(tss * inv_n);
  if (!(tsd > 1e-12 * std::max(1.0, std::abs(tm)))) tsd = 1.0;
  out.target_mean = tm;
  out.target_sd = tsd;
  out.targets.resize(n);
  for (std::size_t r = 0; r < n; ++r) out.targets[r] = (targets[r] - tm) / tsd;
  return out;
}

SvrModel SvrModel::fit(const StandardizedData& data, const Matrix& gram,
                       const SvrHyperParams& params, const SolverOptions& options) {
  params.validate();
  return from_solution(data, params,
                       solve_svr_dual(gram, data.targets, params.c, params.epsilon, options));
}

SvrModel SvrModel::from_solution(const StandardizedData& data, const SvrHyperParams& params,
                                 const DualSolution& sol) {
  if (sol.beta.size() != data.points.rows()) {
    throw ValidationError("SVR: dual solution does not match training data");
  }
  SvrModel m;
  m.params_ = params;
  m.input_dim_ = data.input_dim;
  m.kept_ = data.kept;
  m.feature_means_ = data.feature_means;
  m.feature_sds_ = data.feature_sds;
  m.target_mean_ = data.target_mean;
  m.target_sd_ = data.target_sd;
  m.bias_ = sol.bias;
  m.iterations_ = sol.iterations;

  std::vector<std::size_t> sv;
  for (std::size_t i = 0; i < sol.beta.size(); ++i) {
    if (sol.beta[i] != 0.0) sv.push_back(i);
  }
  m.train_points_ = data.points.select_rows(sv);
  for (auto i : sv) m.dual_coeffs_.push_back(sol.beta[i]);
  return m;
}

double SvrModel::predict(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw ValidationError("SVR predict: expected " + std::to_string(input_dim_) +
                          " features, got " + std::to_string(x.size()));
  }
  std::vector<double> xs(kept_.size());
  for (std::size_t k = 0; k < kept_.size(); ++k) {
    xs[k] = (x[kept_[k]] - feature_means_[k]) / feature_sds_[k];
  }
  double f = bias_;
  for (std::size_t i = 0; i < dual_coeffs_.size(); ++i) {
    f += dual_coeffs_[i] * rbf_kernel(train_points_.row(i), xs, params_.gamma);
  }
  return target_mean_ + target_sd_ * f;
}

void SvrModel::write(std::ostream& out) const {
  using csv::format_double;
  out << "[params]\nc,gamma,epsilon,bias,target_mean,target_sd,input_dim,iterations\n";
  csv::write_record(out, {format_double(params_.c), format_double(params_.gamma),
                          format_double(params_.epsilon), format_double(bias_),
                          format_double(target_mean_), format_double(target_sd_),
                          std::to_string(input_dim_), std::to_string(iterations_)});
  out << "[standardization]\nfeature,mean,sd\n";
  for (std::size_t k = 0; k < kept_.size(); ++k) {
    csv::write_record(out, {std::to_string(kept_[k]), format_double(feature_means_[k]),
                            format_double(feature_sds_[k])});
  }
  out << "[support_vectors]\nbeta";
  for (std::size_t k = 0; k < kept_.size(); ++k) out << ",x" << kept_[k];
  out << '\n';
  for (std::size_t i = 0; i < dual_coeffs_.size(); ++i) {
    std::vector<std::string> rec{format_double(dual_coeffs_[i])};
    for (double v : train_points_.row(i)) rec.push_back(format_double(v));
    csv::write_record(out, rec);
  }
}

SvrModel train_svr(const Matrix& features, std::span<const double> targets,
                   const SvrHyperParams& params, const SolverOptions& options) {
  params.validate();
  const auto data = standardize(features, targets);
  const auto gram = rbf_gram(data.points, params.gamma);
  return SvrModel::fit(data, gram, params, options);
}

double predict_svr(const SvrModel& model, std::span<const double> x) { return model.predict(x); }

}  // namespace cbf_surrogate
