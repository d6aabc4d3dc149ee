#pragma once

// Goodness-of-fit and interval estimates used by the verification suites.

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "sidla/error.hpp"

namespace sidla {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Survival function of the limiting Kolmogorov distribution, P(K > lambda).
inline double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  constexpr double kPi = 3.14159265358979323846;
  if (lambda < 1.18) {
    // Jacobi-theta form, converges fast for small lambda.
    const double y = -kPi * kPi / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int k = 1; k < 40; k += 2) s += std::exp(static_cast<double>(k * k) * y);
    return std::clamp(1.0 - std::sqrt(2.0 * kPi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

/// One-sample Kolmogorov-Smirnov test against the unit-rate exponential,
/// asymptotic p-value with Stephens' small-sample correction.
inline TestResult ks_test_exp1(std::vector<double> sample) {
  if (sample.size() < 10) throw ConfigError("ks_test_exp1: need at least 10 observations");
  if (std::any_of(sample.begin(), sample.end(), [](double v) { return !(v > 0.0); }))
    throw ConfigError("ks_test_exp1: sample contains nonpositive values");
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = -std::expm1(-sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  const double rn = std::sqrt(n);
  return {d, kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d)};
}

/// Two-sample chi-square homogeneity test on binned counts. Adjacent bins are
/// pooled left to right until both expected counts reach 5; a short tail is
/// merged into the last pooled bin.
inline TestResult chi_square_compare(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  if (a.size() != b.size()) throw ConfigError("chi_square_compare: histograms have different bin counts");
  const double na = static_cast<double>(std::accumulate(a.begin(), a.end(), std::uint64_t{0}));
  const double nb = static_cast<double>(std::accumulate(b.begin(), b.end(), std::uint64_t{0}));
  if (na == 0.0 || nb == 0.0) throw ConfigError("chi_square_compare: empty histogram");

  std::vector<std::pair<double, double>> pooled;
  double ca = 0.0;
  double cb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca += static_cast<double>(a[i]);
    cb += static_cast<double>(b[i]);
    const double total = ca + cb;
    if (total > 0.0 && total * na / (na + nb) >= 5.0 && total * nb / (na + nb) >= 5.0) {
      pooled.emplace_back(ca, cb);
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (pooled.empty())
      pooled.emplace_back(ca, cb);
    else {
      pooled.back().first += ca;
      pooled.back().second += cb;
    }
  }
  if (pooled.size() < 2) return {0.0, 1.0};

  const double ka = std::sqrt(nb / na);
  const double kb = std::sqrt(na / nb);
  double stat = 0.0;
  for (const auto& [x, y] : pooled) {
    const double diff = ka * x - kb * y;
    stat += diff * diff / (x + y);
  }
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(pooled.size() - 1));
  return {stat, boost::math::cdf(boost::math::complement(dist, stat))};
}

struct Proportion {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 1.0;
};

/// Clopper-Pearson interval; `alpha` is the two-sided error, each bound is
/// one-sided at alpha/2.
inline Proportion binomial_interval(std::uint64_t successes, std::uint64_t trials, double alpha) {
  using boost::math::binomial_distribution;
  Proportion p{successes, trials};
  if (trials == 0) return p;
  const auto n = static_cast<double>(trials);
  const auto k = static_cast<double>(successes);
  p.estimate = k / n;
  p.lower = binomial_distribution<>::find_lower_bound_on_p(n, k, alpha / 2);
  p.upper = binomial_distribution<>::find_upper_bound_on_p(n, k, alpha / 2);
  return p;
}

/// One-sided Clopper-Pearson upper bound at confidence 1 - alpha.
inline double binomial_upper_bound(std::uint64_t successes, std::uint64_t trials, double alpha) {
  return boost::math::binomial_distribution<>::find_upper_bound_on_p(static_cast<double>(trials),
                                                                      static_cast<double>(successes), alpha);
}

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

inline MeanEstimate mean_estimate(const std::vector<double>& xs) {
  MeanEstimate m;
  m.n = xs.size();
  if (xs.empty()) return m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std_error = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return m;
}

/// Lag-1 autocorrelation pooled over independent sequences, centred at the
/// grand mean. The standard error under independence is about 1/sqrt(pairs).
struct Autocorrelation {
  double r = 0.0;
  std::size_t pairs = 0;
  double std_error() const { return pairs ? 1.0 / std::sqrt(static_cast<double>(pairs)) : 0.0; }
};

inline Autocorrelation lag1_autocorrelation(const std::vector<std::vector<double>>& sequences) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : sequences) {
    sum += std::accumulate(s.begin(), s.end(), 0.0);
    n += s.size();
  }
  Autocorrelation out;
  if (n < 2) return out;
  const double mean = sum / static_cast<double>(n);
  double num = 0.0;
  double den = 0.0;
  for (const auto& s : sequences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      den += (s[i] - mean) * (s[i] - mean);
      if (i + 1 < s.size()) {
        num += (s[i] - mean) * (s[i + 1] - mean);
        ++out.pairs;
      }
    }
  }
  out.r = den > 0.0 ? num / den : 0.0;
  return out;
}

}  // namespace sidla
