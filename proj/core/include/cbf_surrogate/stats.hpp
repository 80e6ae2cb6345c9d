#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace cbf_surrogate {

struct StatResult {
  double statistic = 0.0;  // r, t or chi-square
  double df = 0.0;
  double p = 1.0;
  std::optional<double> fdr_p;
  std::size_t n = 0;
  bool undefined = false;  // e.g. correlation with a zero-variance input
};

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Student-t CDF. Throws ValidationError when df <= 0.
double t_cdf(double t, double df);
// P(|T| >= |t|), computed directly from the tail to keep small p accurate.
double t_two_sided_p(double t, double df);

// Pearson r with a two-sided p from t = r sqrt((n-2)/(1-r^2)), df = n-2.
// Zero variance in either input yields undefined = true (r is not reported as 0).
StatResult pearson(std::span<const double> x, std::span<const double> y);

// Benjamini-Hochberg step-up adjusted p-values, in input order.
std::vector<double> fdr_bh(std::span<const double> pvals);

enum class TTestKind { pooled, welch };

// Two-sample t-test of a vs b (t > 0 when mean(a) > mean(b)).
StatResult ttest2(std::span<const double> a, std::span<const double> b,
                  TTestKind kind = TTestKind::pooled);

// Pearson chi-square for a 2x2 table, df = 1, no continuity correction.
StatResult chisq_2x2(const std::array<std::array<double, 2>, 2>& counts);

// Residuals of y on [1, age, sex] plus mean(y). Constant or collinear covariate
// columns are dropped before the fit.
std::vector<double> adjust_covariates(std::span<const double> y, std::span<const double> age,
                                      std::span<const double> sex);

// region / lobar; lobar must be > 0.
double relative_cbf(double region_cbf, double lobar_cbf);

double mean(std::span<const double> v);
// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> v);

}  // namespace cbf_surrogate
