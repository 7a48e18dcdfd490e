#pragma once

#include <string>
#include <vector>

#include "scc/types.hpp"

namespace scc {

inline constexpr double kDefaultZeroPseudocount = 1e-5;

/// Rows of proportions on the simplex: entries nonnegative, each row summing
/// to one. Constructed only through the validating factories.
class CompositionMatrix {
 public:
  /// Accepts rows whose sums are within `tolerance` of one and renormalizes
  /// them exactly; anything further off is rejected.
  static CompositionMatrix from_proportions(Matrix values, double tolerance = 1e-6);

  /// Closure operation: divides each nonnegative row by its sum. Rows of raw
  /// amounts (GDP in dollars, counts) become proportions.
  static CompositionMatrix closure(Matrix values);

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index parts() const { return values_.cols(); }
  const Matrix& values() const { return values_; }

 private:
  explicit CompositionMatrix(Matrix values) : values_(std::move(values)) {}
  Matrix values_;
};

/// Orthonormal Helmert sub-matrix (first row of the full Helmert matrix
/// dropped), shape (K-1) x K. Row j (1-based) holds j copies of
/// 1/sqrt(j(j+1)), then -j/sqrt(j(j+1)), then zeros.
Matrix helmert_submatrix(int parts);

/// Inverse map from unconstrained coefficients back to zero-sum log-contrast
/// coefficients, shape K x (K-1).
///
/// Uses the full-rank factorization h = F Q with F = I and Q = h, completes Q
/// with its orthogonal complement to a square M = [Q; Q_perp], and returns
/// the first K-1 columns of M^{-1}. For the Helmert sub-matrix this is h^T.
/// Throws NumericalError when h is rank deficient.
Matrix inverse_projection(const Matrix& h);

struct HelmertProjection {
  Matrix h;
  Matrix m1;

  static HelmertProjection for_parts(int parts);
  int parts() const { return static_cast<int>(h.cols()); }
};

/// Element-wise natural log after replacing zeros with `zero_pseudocount` and
/// re-closing the affected rows.
Matrix log_transform(const CompositionMatrix& x, double zero_pseudocount = kDefaultZeroPseudocount);

struct ConstrainedCoefficients {
  Vector beta_tilde;
};

/// beta_tilde = m1 * beta; the result sums to zero.
ConstrainedCoefficients recover_constrained(const Vector& beta, const Matrix& m1);

/// Observations keyed by location identifier, before any transformation.
struct CompositionalDataset {
  std::vector<std::string> ids;
  Vector y;
  CompositionMatrix composition;
  Matrix covariates;  // n x p, p may be zero

  Eigen::Index size() const { return y.size(); }
  void validate() const;
};

/// Unconstrained regression design: z = log composition, x1 = z * m1.
struct LogContrastDesign {
  Matrix z;
  Matrix x1;
  Matrix x2;
  Vector y;
  HelmertProjection projection;

  Eigen::Index size() const { return y.size(); }
  Eigen::Index parts() const { return z.cols(); }
  Eigen::Index covariates() const { return x2.cols(); }
};

LogContrastDesign make_design(const CompositionalDataset& data,
                              double zero_pseudocount = kDefaultZeroPseudocount);

}  // namespace scc
