#pragma once

#include <optional>
#include <vector>

namespace gsd {

/// Class-conditional normal model of one feature: N(mean, std_dev^2) with
/// prior weight `proportion`.
struct GaussianClassParams {
  double mean = 0.0;
  double std_dev = 1.0;
  double proportion = 0.5;

  bool operator==(const GaussianClassParams&) const = default;
};

/// Throws ErrorCode::invalid_argument unless the parameters are finite,
/// std_dev > 0 and proportion lies in (0, 1).
void validate(const GaussianClassParams& params);

struct BoundaryResult {
  double alpha = 0.0;
  /// Misclassification mass at alpha, in [0, min(p0, p1)].
  double error = 0.0;
  int root_count = 0;

  bool operator==(const BoundaryResult&) const = default;
};

double normal_pdf(double x, double mean, double std_dev);

/// Normal CDF. Absolute error below 1e-9 over the whole real line.
double normal_cdf(double x, double mean, double std_dev);

/// Probability mass assigned to the wrong class when thresholding at alpha:
///   min(p0 F0, p1 F1) + min(p0 (1 - F0), p1 (1 - F1))
double misclassification_area(const GaussianClassParams& c0,
                              const GaussianClassParams& c1, double alpha);

/// Every x where p0 phi0(x) = p1 phi1(x), ascending. Empty when the weighted
/// densities never cross or the two classes share mean and spread.
std::vector<double> boundary_candidates(const GaussianClassParams& c0,
                                        const GaussianClassParams& c1);

/// Candidate with the smallest misclassification area; ties within 1e-12
/// go to the smaller alpha. Absent when there is no candidate.
std::optional<BoundaryResult> select_boundary(const GaussianClassParams& c0,
                                              const GaussianClassParams& c1);

}  // namespace gsd
