// Exact-dimension geometry kernel: R^3 / 3x3 linear algebra (via Eigen),
// the skew-map calculus on so(3), SO(3) retractions, and SE(3) poses.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace lgvci {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

namespace config {
// Module-level tolerances. Adjustable for experiments; defaults are what the
// test suite pins.
inline double skew_input_tol = 1e-12;
inline double rotation_ortho_tol = 1e-12;
inline double symmetric_input_tol = 1e-12;
}  // namespace config

/// S(v): the isomorphism from R^3 onto skew-symmetric matrices with
/// S(v) w = v x w.
inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  // clang-format off
  s <<     0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
  // clang-format on
  return s;
}

inline bool is_skew(const Mat3& m, double tol = config::skew_input_tol) {
  return (m + m.transpose()).norm() <= tol * std::max(1.0, m.norm());
}

inline bool is_symmetric(const Mat3& m, double tol = config::symmetric_input_tol) {
  return (m - m.transpose()).norm() <= tol * std::max(1.0, m.norm());
}

/// S^{-1}(M), reading entries (M32, M13, M21). Rejects input that is not
/// skew-symmetric within config::skew_input_tol.
inline Vec3 unskew(const Mat3& m) {
  if (!is_skew(m)) {
    throw std::invalid_argument("unskew: input is not skew-symmetric");
  }
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

/// asym(A) = A - A^T.
inline Mat3 asym(const Mat3& a) { return a - a.transpose(); }

/// sym(A) = A + A^T.
inline Mat3 sym(const Mat3& a) { return a + a.transpose(); }

/// Inner product on so(3) induced by the dot product on R^3:
/// <S(w1), S(w2)>_S = w2 . w1 = (1/2) tr(W2^T W1).
inline double lie_inner(const Mat3& w1, const Mat3& w2) {
  if (!is_skew(w1) || !is_skew(w2)) {
    throw std::invalid_argument("lie_inner: inputs must be skew-symmetric");
  }
  return 0.5 * (w2.transpose() * w1).trace();
}

// Series switch point for the trigonometric coefficients below. At 1e-4 the
// truncation error of the two-term series is below double rounding.
inline constexpr double kSmallAngle = 1e-4;

/// sin(t)/t with a series branch near zero.
inline double sinc(double t) {
  if (std::abs(t) < kSmallAngle) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

/// (1 - cos(t))/t^2 with a series branch near zero.
inline double cosc(double t) {
  if (std::abs(t) < kSmallAngle) return 0.5 - t * t / 24.0;
  return (1.0 - std::cos(t)) / (t * t);
}

namespace detail {
inline Mat3 rodrigues(const Vec3& f) {
  const double t = f.norm();
  const Mat3 s = skew(f);
  return Mat3::Identity() + sinc(t) * s + cosc(t) * (s * s);
}

inline Mat3 cayley(const Vec3& f) {
  const double n2 = f.squaredNorm();
  const Mat3 s = skew(f);
  return ((1.0 + n2) * Mat3::Identity() + 2.0 * s + 2.0 * (s * s)) / (1.0 + n2);
}
}  // namespace detail

/// A 3x3 matrix constrained to SO(3). Validation happens once at the
/// boundary; products of rotations trust the invariant so that integrator
/// drift stays observable.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  explicit Rotation(const Mat3& m) : m_(m) {
    const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
    const double det_err = std::abs(m.determinant() - 1.0);
    if (ortho > config::rotation_ortho_tol || det_err > config::rotation_ortho_tol) {
      throw std::invalid_argument("Rotation: matrix is not in SO(3) (|R^T R - I| = " +
                                  std::to_string(ortho) + ", |det - 1| = " +
                                  std::to_string(det_err) + ")");
    }
  }

  static Rotation identity() { return Rotation(); }

  /// Wraps a matrix without the SO(3) check. For internal products and
  /// oracles whose drift the tests measure.
  static Rotation from_matrix_unchecked(const Mat3& m) {
    Rotation r;
    r.m_ = m;
    return r;
  }

  /// Nearest rotation in the polar sense (used when ingesting hand-edited
  /// matrices).
  static Rotation project(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
      Mat3 flip = Mat3::Identity();
      flip(2, 2) = -1.0;
      r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return from_matrix_unchecked(r);
  }

  const Mat3& matrix() const { return m_; }
  Rotation transposed() const { return from_matrix_unchecked(m_.transpose()); }

  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Rotation operator*(const Rotation& o) const { return from_matrix_unchecked(m_ * o.m_); }

  double orthogonality_defect() const {
    return (m_.transpose() * m_ - Mat3::Identity()).norm();
  }

 private:
  Mat3 m_;
};

/// exp(S(f)) by Rodrigues' formula.
inline Rotation exp_so3(const Vec3& f) {
  return Rotation::from_matrix_unchecked(detail::rodrigues(f));
}

/// cay(S(f)) = (I + S(f))(I - S(f))^{-1}, written without the inverse.
inline Rotation cayley_so3(const Vec3& f) {
  return Rotation::from_matrix_unchecked(detail::cayley(f));
}

/// A rigid placement (x, R): z |-> R z + x.
struct Pose {
  Vec3 position = Vec3::Zero();
  Rotation attitude;

  static Pose identity() { return Pose{}; }
};

inline Vec3 apply_pose(const Pose& a, const Vec3& z) {
  return a.attitude * z + a.position;
}

inline Pose compose_pose(const Pose& a, const Pose& b) {
  return Pose{a.attitude * b.position + a.position, a.attitude * b.attitude};
}

inline Pose inverse_pose(const Pose& a) {
  const Rotation rt = a.attitude.transposed();
  return Pose{-(rt * a.position), rt};
}

/// Central-difference gradient of a scalar field over 3x3 matrices,
/// entrywise. Test oracle for the closed-form matrix derivatives.
inline Mat3 fd_matrix_gradient(const std::function<double(const Mat3&)>& field,
                               const Mat3& at, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_matrix_gradient: step must be > 0");
  Mat3 g;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Mat3 hi = at, lo = at;
      hi(i, j) += step;
      lo(i, j) -= step;
      g(i, j) = (field(hi) - field(lo)) / (2.0 * step);
    }
  }
  return g;
}

/// Central-difference gradient of a scalar field over R^3.
inline Vec3 fd_vector_gradient(const std::function<double(const Vec3&)>& field,
                               const Vec3& at, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_vector_gradient: step must be > 0");
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 hi = at, lo = at;
    hi[i] += step;
    lo[i] -= step;
    g[i] = (field(hi) - field(lo)) / (2.0 * step);
  }
  return g;
}

}  // namespace lgvci
