#include "scc/composition.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace scc {
namespace {

void require_nonnegative(const Matrix& values) {
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const double v = values(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream msg;
        msg << "invalid composition: entry (" << i << ", " << j << ") = " << v;
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

void require_shape(const Matrix& values) {
  if (values.rows() < 1) throw std::invalid_argument("invalid composition: no rows");
  if (values.cols() < 2) throw std::invalid_argument("invalid composition: need at least 2 parts");
}

}  // namespace

CompositionMatrix CompositionMatrix::from_proportions(Matrix values, double tolerance) {
  require_shape(values);
  require_nonnegative(values);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    const double s = values.row(i).sum();
    if (std::abs(s - 1.0) > tolerance) {
      std::ostringstream msg;
      msg << "invalid composition: row " << i << " sums to " << s;
      throw std::invalid_argument(msg.str());
    }
    values.row(i) /= s;
  }
  return CompositionMatrix(std::move(values));
}

CompositionMatrix CompositionMatrix::closure(Matrix values) {
  require_shape(values);
  require_nonnegative(values);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    const double s = values.row(i).sum();
    if (!(s > 0.0)) {
      std::ostringstream msg;
      msg << "invalid composition: row " << i << " has zero total";
      throw std::invalid_argument(msg.str());
    }
    values.row(i) /= s;
  }
  return CompositionMatrix(std::move(values));
}

Matrix helmert_submatrix(int parts) {
  if (parts < 2) throw std::invalid_argument("Helmert sub-matrix needs at least 2 parts");
  Matrix h = Matrix::Zero(parts - 1, parts);
  for (int j = 1; j < parts; ++j) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(j) * (j + 1));
    h.row(j - 1).head(j).setConstant(scale);
    h(j - 1, j) = -j * scale;
  }
  return h;
}

Matrix inverse_projection(const Matrix& h) {
  const Eigen::Index k = h.cols();
  const Eigen::Index r = h.rows();
  if (k < 2 || r != k - 1) {
    throw std::invalid_argument("inverse_projection expects a (K-1) x K matrix");
  }
  Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv(0));
  if (sv(r - 1) <= cutoff) {
    throw NumericalError("inverse_projection: matrix is rank deficient");
  }

  // Q = h (F = I). The trailing right singular vector spans the orthogonal
  // complement of the row space.
  Matrix m(k, k);
  m.topRows(r) = h;
  m.row(k - 1) = svd.matrixV().col(k - 1).transpose();

  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible()) throw NumericalError("inverse_projection: completed basis is singular");
  Matrix m_inv = lu.inverse();
  return m_inv.leftCols(r);
}

HelmertProjection HelmertProjection::for_parts(int parts) {
  HelmertProjection p;
  p.h = helmert_submatrix(parts);
  p.m1 = inverse_projection(p.h);
  return p;
}

Matrix log_transform(const CompositionMatrix& x, double zero_pseudocount) {
  if (!(zero_pseudocount > 0.0)) throw std::invalid_argument("zero pseudocount must be positive");
  Matrix out = x.values();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    bool had_zero = false;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      if (row(j) < 0.0) throw std::invalid_argument("invalid composition: negative entry");
      if (row(j) == 0.0) {
        row(j) = zero_pseudocount;
        had_zero = true;
      }
    }
    if (had_zero) row /= row.sum();
  }
  return out.array().log().matrix();
}

ConstrainedCoefficients recover_constrained(const Vector& beta, const Matrix& m1) {
  if (m1.cols() != beta.size()) {
    std::ostringstream msg;
    msg << "recover_constrained: beta has " << beta.size() << " entries, m1 has " << m1.cols()
        << " columns";
    throw std::invalid_argument(msg.str());
  }
  return {m1 * beta};
}

void CompositionalDataset::validate() const {
  const auto n = y.size();
  if (n < 1) throw InputError("dataset has no observations");
  if (static_cast<Eigen::Index>(ids.size()) != n) throw InputError("dataset: id count differs from response count");
  if (composition.rows() != n) throw InputError("dataset: composition row count differs from response count");
  if (covariates.rows() != n && covariates.size() != 0) {
    throw InputError("dataset: covariate row count differs from response count");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(y(i))) throw InputError("dataset: non-finite response for id " + ids[i]);
  }
  if (!covariates.allFinite()) throw InputError("dataset: non-finite covariate value");
}

LogContrastDesign make_design(const CompositionalDataset& data, double zero_pseudocount) {
  data.validate();
  LogContrastDesign d;
  d.projection = HelmertProjection::for_parts(static_cast<int>(data.composition.parts()));
  d.z = log_transform(data.composition, zero_pseudocount);
  d.x1 = d.z * d.projection.m1;
  d.x2 = data.covariates.rows() == data.size() ? data.covariates : Matrix(data.size(), 0);
  d.y = data.y;
  return d;
}

}  // namespace scc
