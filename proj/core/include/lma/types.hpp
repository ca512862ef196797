#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace lma {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Complex = std::complex<double>;

// Error hierarchy. Each failure mode maps to a distinct CLI exit code, so
// keep them as separate types.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonSimpleSpectrum : Error {
  using Error::Error;
};
struct SingularEigenbasis : Error {
  using Error::Error;
};
struct UnstableSystem : Error {
  using Error::Error;
};
struct DivergentPair : Error {
  using Error::Error;
};
struct ZeroEnergy : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct GenerationFailed : Error {
  using Error::Error;
};
struct AmbiguousMatch : Error {
  using Error::Error;
};
struct HorizonTooShort : Error {
  using Error::Error;
};
struct AssumptionViolated : Error {
  using Error::Error;
};

// Real square dynamics matrix, optionally with per-state dimensional
// coefficients c_k (all-ones when the states are already suitably scaled).
struct StateMatrix {
  MatrixXd a;
  VectorXd scale;  // empty means all-ones

  StateMatrix() = default;
  explicit StateMatrix(MatrixXd m) : a(std::move(m)) { validate(); }
  StateMatrix(MatrixXd m, VectorXd c) : a(std::move(m)), scale(std::move(c)) {
    validate();
  }

  int n() const { return static_cast<int>(a.rows()); }

  bool has_scale() const { return scale.size() > 0; }

  double scale_at(int k) const { return has_scale() ? scale(k) : 1.0; }

  void validate() const {
    if (a.rows() < 1 || a.rows() != a.cols())
      throw DimensionMismatch("StateMatrix must be square with n >= 1");
    if (!a.allFinite()) throw Error("StateMatrix entries must be finite");
    if (scale.size() > 0) {
      if (scale.size() != a.rows())
        throw DimensionMismatch("scale vector length must equal n");
      if ((scale.array() <= 0.0).any())
        throw Error("scale entries must be strictly positive");
    }
  }
};

// Hermitian part {M}_H = (M + M^*) / 2.
inline MatrixXcd hermitian_part(const MatrixXcd& m) {
  return 0.5 * (m + m.adjoint());
}

inline MatrixXd symmetric_part(const MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace lma
