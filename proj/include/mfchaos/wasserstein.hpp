#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "mfchaos/errors.hpp"
#include "mfchaos/grid.hpp"

namespace mfchaos {

namespace detail {

/// Empirical quantile of a sorted sample: Q(p) = x_(ceil(p*n)).
inline double sample_quantile(std::span<const double> sorted, double p) {
  const std::size_t n = sorted.size();
  std::size_t k = std::size_t(p * double(n));
  if (k >= n) k = n - 1;
  return sorted[k];
}

inline std::vector<double> sorted_copy(std::span<const double> xs) {
  std::vector<double> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  return s;
}

template <class Qa, class Qb>
double w2_from_quantiles(const Qa& qa, const Qb& qb, int qpoints) {
  double acc = 0.0;
  for (int j = 0; j < qpoints; ++j) {
    const double p = (double(j) + 0.5) / double(qpoints);
    const double d = qa(p) - qb(p);
    acc += d * d;
  }
  return std::sqrt(acc / double(qpoints));
}

}  // namespace detail

struct W2Result {
  double distance = 0.0;
  double mass_a = 0.0;  // pre-normalization masses
  double mass_b = 0.0;
};

/// W2 between two grid densities via inverse-CDF matching on a common
/// quantile lattice. Densities are renormalized internally.
inline W2Result wasserstein2_detail(const DensityField& a, const DensityField& b,
                                    int qpoints = 4096) {
  DensityQuantile qa(a), qb(b);
  W2Result r;
  r.mass_a = qa.mass();
  r.mass_b = qb.mass();
  r.distance = detail::w2_from_quantiles([&](double p) { return qa(p); },
                                         [&](double p) { return qb(p); }, qpoints);
  return r;
}

inline double wasserstein2(const DensityField& a, const DensityField& b, int qpoints = 4096) {
  return wasserstein2_detail(a, b, qpoints).distance;
}

/// W2 between sample lists. Equal sizes use exact sorted matching (the 1D
/// optimal coupling); unequal sizes fall back to the quantile lattice.
inline double wasserstein2(std::span<const double> a, std::span<const double> b,
                           int qpoints = 4096) {
  if (a.empty() || b.empty()) throw EmptyInput("wasserstein2: empty sample list");
  std::vector<double> sa = detail::sorted_copy(a);
  std::vector<double> sb = detail::sorted_copy(b);
  if (sa.size() == sb.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) {
      const double d = sa[i] - sb[i];
      acc += d * d;
    }
    return std::sqrt(acc / double(sa.size()));
  }
  return detail::w2_from_quantiles(
      [&](double p) { return detail::sample_quantile(sa, p); },
      [&](double p) { return detail::sample_quantile(sb, p); }, qpoints);
}

/// W2 between an equal-weight sample list and a grid density.
inline double wasserstein2(std::span<const double> samples, const DensityField& b,
                           int qpoints = 4096) {
  if (samples.empty()) throw EmptyInput("wasserstein2: empty sample list");
  std::vector<double> s = detail::sorted_copy(samples);
  DensityQuantile qb(b);
  return detail::w2_from_quantiles([&](double p) { return detail::sample_quantile(s, p); },
                                   [&](double p) { return qb(p); }, qpoints);
}

inline double wasserstein2(const DensityField& a, std::span<const double> samples,
                           int qpoints = 4096) {
  return wasserstein2(samples, a, qpoints);
}

}  // namespace mfchaos
