#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mmcomp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace detail {

inline void require_square_finite(const Matrix& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument(std::string(who) + ": matrix must be square and non-empty, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  if (!m.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite entry");
}

// Degree-13 Pade coefficients and the 1-norm bound below which no scaling is needed
// (Higham, "The scaling and squaring method for the matrix exponential revisited", 2005).
inline constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};
inline constexpr double kTheta13 = 5.371920351148152;

}  // namespace detail

/// Matrix exponential by scaling and squaring with a [13/13] Pade approximant.
inline Matrix expm(const Matrix& m) {
  detail::require_square_finite(m, "expm");
  const Eigen::Index n = m.rows();
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == 0.0) return Matrix::Identity(n, n);

  int squarings = 0;
  if (norm1 > detail::kTheta13)
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / detail::kTheta13)));
  const Matrix a = m * std::ldexp(1.0, -squarings);

  const auto& b = detail::kPade13;
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;

  const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                         b[3] * a2 + b[1] * id;
  const Matrix u = a * u_inner;
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                   b[2] * a2 + b[0] * id;

  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) r = r * r;
  if (!r.allFinite()) throw std::overflow_error("expm: result overflowed");
  return r;
}

/// exp(M s) v.
inline Vector expm_action(const Matrix& m, const Vector& v, double s) {
  detail::require_square_finite(m, "expm_action");
  if (v.size() != m.rows())
    throw std::invalid_argument("expm_action: vector length " + std::to_string(v.size()) +
                                " does not match matrix dimension " + std::to_string(m.rows()));
  if (!(s >= 0.0)) throw std::invalid_argument("expm_action: s must be >= 0");
  if (s == 0.0) return v;
  return expm(m * s) * v;
}

/// Repeated action of exp(M dt) on a uniform grid; the exponential is formed once.
class ExpmStepper {
 public:
  ExpmStepper(const Matrix& m, double dt) : step_(expm_checked(m, dt)) {}

  const Matrix& step_matrix() const { return step_; }

  Vector apply(const Vector& v, long steps = 1) const {
    if (v.size() != step_.rows())
      throw std::invalid_argument("ExpmStepper: vector length does not match matrix dimension");
    Vector out = v;
    for (long k = 0; k < steps; ++k) out = step_ * out;
    return out;
  }

 private:
  static Matrix expm_checked(const Matrix& m, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("ExpmStepper: dt must be > 0");
    return expm(m * dt);
  }

  Matrix step_;
};

}  // namespace mmcomp
