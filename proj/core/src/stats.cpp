#include "cbf_surrogate/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cbf_surrogate/error.hpp"

namespace cbf_surrogate {

namespace {

// Lentz's method for the continued fraction of I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw ValidationError("incomplete_beta: a and b must be > 0");
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_two_sided_p(double t, double df) {
  if (!(df > 0)) throw ValidationError("t distribution: df must be > 0");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double x = df / (df + t * t);
  return std::clamp(incomplete_beta(0.5 * df, 0.5, x), 0.0, 1.0);
}

double t_cdf(double t, double df) {
  if (!(df > 0)) throw ValidationError("t distribution: df must be > 0");
  if (t == 0.0) return 0.5;
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * t_two_sided_p(t, df);
  return t > 0 ? 1.0 - tail : tail;
}

double mean(std::span<const double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

StatResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("pearson: length mismatch");
  const std::size_t n = x.size();
  StatResult out;
  out.n = n;
  out.df = n >= 2 ? static_cast<double>(n - 2) : 0.0;
  if (n < 3) {
    out.undefined = true;
    out.statistic = std::numeric_limits<double>::quiet_NaN();
    out.p = 1.0;
    return out;
  }
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0) || !(syy > 0)) {
    out.undefined = true;
    out.statistic = std::numeric_limits<double>::quiet_NaN();
    out.p = 1.0;
    return out;
  }
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  out.statistic = r;
  if (std::abs(r) == 1.0) {
    out.p = 0.0;
  } else {
    const double t = r * std::sqrt(out.df / (1.0 - r * r));
    out.p = t_two_sided_p(t, out.df);
  }
  return out;
}

std::vector<double> fdr_bh(std::span<const double> pvals) {
  const std::size_t m = pvals.size();
  for (double p : pvals) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("fdr_bh: p-value outside [0,1]: " + std::to_string(p));
    }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pvals[a] < pvals[b]; });
  std::vector<double> q(m);
  double running = 1.0;
  for (std::size_t pos = m; pos-- > 0;) {
    const double rank = static_cast<double>(pos + 1);
    const double v = static_cast<double>(m) * pvals[order[pos]] / rank;
    running = std::min(running, v);
    q[order[pos]] = std::min(1.0, running);
  }
  return q;
}

StatResult ttest2(std::span<const double> a, std::span<const double> b, TTestKind kind) {
  if (a.size() < 2 || b.size() < 2) {
    throw ValidationError("ttest2: each group needs at least 2 values");
  }
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double ma = mean(a), mb = mean(b);
  const double va = std::pow(sample_sd(a), 2), vb = std::pow(sample_sd(b), 2);
  StatResult out;
  out.n = a.size() + b.size();
  double se = 0.0;
  if (kind == TTestKind::pooled) {
    out.df = na + nb - 2.0;
    const double sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / out.df;
    se = std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
  } else {
    const double ua = va / na, ub = vb / nb;
    se = std::sqrt(ua + ub);
    const double denom = ua * ua / (na - 1.0) + ub * ub / (nb - 1.0);
    out.df = denom > 0 ? (ua + ub) * (ua + ub) / denom : na + nb - 2.0;
  }
  const double diff = ma - mb;
  if (diff == 0.0) {
    out.statistic = 0.0;
    out.p = 1.0;
    return out;
  }
  if (!(se > 0)) {
    out.statistic = diff > 0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
    out.p = 0.0;
    return out;
  }
  out.statistic = diff / se;
  out.p = t_two_sided_p(out.statistic, out.df);
  return out;
}

StatResult chisq_2x2(const std::array<std::array<double, 2>, 2>& counts) {
  double rows[2] = {0, 0}, cols[2] = {0, 0}, total = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double v = counts[i][j];
      if (!(v >= 0)) throw ValidationError("chisq_2x2: counts must be non-negative");
      rows[i] += v;
      cols[j] += v;
      total += v;
    }
  }
  if (!(rows[0] > 0 && rows[1] > 0 && cols[0] > 0 && cols[1] > 0)) {
    throw ValidationError("chisq_2x2: every row and column sum must be > 0");
  }
  double chi2 = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double e = rows[i] * cols[j] / total;
      const double d = counts[i][j] - e;
      chi2 += d * d / e;
    }
  }
  StatResult out;
  out.statistic = chi2;
  out.df = 1.0;
  out.n = static_cast<std::size_t>(total);
  out.p = std::clamp(std::erfc(std::sqrt(0.5 * chi2)), 0.0, 1.0);
  return out;
}

std::vector<double> adjust_covariates(std::span<const double> y, std::span<const double> age,
                                      std::span<const double> sex) {
  const std::size_t n = y.size();
  if (age.size() != n || sex.size() != n) {
    throw ValidationError("adjust_covariates: length mismatch");
  }
  if (n < 4) throw ValidationError("adjust_covariates: need at least 4 observations");

  // Modified Gram-Schmidt on [1, age, sex]; a column whose remainder is
  // negligible relative to its own centered norm is dropped.
  std::vector<std::vector<double>> basis;
  basis.emplace_back(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (auto col : {age, sex}) {
    std::vector<double> v(col.begin(), col.end());
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += q[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * q[i];
      }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 1e-10 * std::max(scale, 1e-300) * std::sqrt(static_cast<double>(n)))) continue;
    for (double& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  if (basis.size() >= n) throw ValidationError("adjust_covariates: rank-deficient design");
  if (basis.size() == 1) return std::vector<double>(y.begin(), y.end());

  std::vector<double> resid(y.begin(), y.end());
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += q[i] * resid[i];
      for (std::size_t i = 0; i < n; ++i) resid[i] -= dot * q[i];
    }
  }
  const double my = mean(y);
  for (double& r : resid) r += my;
  return resid;
}

double relative_cbf(double region_cbf, double lobar_cbf) {
  if (!(lobar_cbf > 0)) {
    throw ValidationError("relative CBF: lobar CBF must be > 0, got " + std::to_string(lobar_cbf));
  }
  return region_cbf / lobar_cbf;
}

}  // namespace cbf_surrogate
