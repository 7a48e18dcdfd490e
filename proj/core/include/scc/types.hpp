#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace scc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Cluster labels are 0-based internally; files and reports use 1-based labels.
using Label = std::int32_t;
inline constexpr Label kUnassigned = -1;

// Malformed user input: files, schemas, configuration values.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical breakdown inside the sampler or a summary (non-finite values,
// a failed factorization, a non-positive posterior rate).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scc
