#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace blp {

/// Mean and standard error of a sample. The mean is a plain left-to-right
/// sum divided by the count, so coupled samples that are ordered pointwise
/// have ordered means.
struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased
  double std_error = 0.0;
};

SampleSummary summarize(std::span<const double> values);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}.
double kolmogorov_tail(double lambda);

/// Two-sample Kolmogorov-Smirnov test with the effective-size corrected
/// asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace blp
