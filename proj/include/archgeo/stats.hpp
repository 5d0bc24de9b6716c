#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace archgeo {

struct KsResult {
  double d = 0.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double p = 1.0;
};

namespace detail {
/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum_{j>=1}
/// (-1)^{j-1} exp(-2 j^2 lambda^2), truncated once a term drops below 1e-12.
inline double kolmogorov_q(double lambda) {
  if (lambda <= 1e-9) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}
}  // namespace detail

/// Two-sample Kolmogorov-Smirnov test. The statistic is the supremum of
/// |F_x - F_y| over the pooled points, evaluated with right-continuous
/// empirical CDFs; it is computed in integer arithmetic so the result is
/// exact and symmetric in the arguments. The p-value uses the asymptotic
/// series with the effective-size correction
/// lambda = (sqrt(n_e) + 0.12 + 0.11/sqrt(n_e)) * d, n_e = n1*n2/(n1+n2).
inline KsResult ks_two_sample(std::span<const double> x,
                              std::span<const double> y) {
  if (x.empty() || y.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  std::size_t i = 0, j = 0;
  std::uint64_t best = 0;  // max |i*n2 - j*n1| over pooled points
  while (i < n1 || j < n2) {
    const double t = (i < n1 && (j >= n2 || a[i] <= b[j])) ? a[i] : b[j];
    while (i < n1 && a[i] <= t) ++i;
    while (j < n2 && b[j] <= t) ++j;
    const std::uint64_t lhs = static_cast<std::uint64_t>(i) * n2;
    const std::uint64_t rhs = static_cast<std::uint64_t>(j) * n1;
    best = std::max(best, lhs > rhs ? lhs - rhs : rhs - lhs);
  }
  KsResult r;
  r.n1 = n1;
  r.n2 = n2;
  r.d = static_cast<double>(best) / (static_cast<double>(n1) * n2);
  if (best == 0) {
    r.p = 1.0;
    return r;
  }
  const double ne = static_cast<double>(n1) * n2 / (double(n1) + double(n2));
  const double sqrt_ne = std::sqrt(ne);
  r.p = detail::kolmogorov_q((sqrt_ne + 0.12 + 0.11 / sqrt_ne) * r.d);
  return r;
}

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n-1 denominator)
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

inline Summary summarize(std::span<const double> sample) {
  if (sample.empty()) throw std::invalid_argument("summarize: empty sample");
  Summary s;
  s.count = sample.size();
  s.min = sample.front();
  s.max = sample.front();
  double sum = 0.0;
  for (double v : sample) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : sample) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  return s;
}

}  // namespace archgeo
