// The variational integrator core: the discrete Hamiltonian flow map on
// SE(3), the implicit relative-rotation solve (exponential and Cayley
// retractions with Newton), the elastic momentum-energy jump map, discrete
// and continuous energies, and reference/validation maps.
#pragma once

#include <lgvci/body.hpp>
#include <lgvci/contact.hpp>
#include <lgvci/geom.hpp>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace lgvci {

/// Phase point: position, attitude, linear momentum, body-frame angular
/// momentum.
struct State {
  Vec3 x = Vec3::Zero();
  Rotation R;
  Vec3 gamma = Vec3::Zero();
  Vec3 Pi = Vec3::Zero();
};

inline Pose pose_of(const State& s) { return Pose{s.x, s.R}; }

enum class Retraction { Exp, Cayley };

struct SolverConfig {
  double eps_tol = 1e-15;
  int max_newton_iters = 50;
  Retraction retraction = Retraction::Exp;
};

struct WorldParams {
  double gravity = 9.80665;
  Plane plane;
  RigidBody body;

  WorldParams(double g, Plane p, RigidBody b)
      : gravity(g), plane(std::move(p)), body(std::move(b)) {
    if (!(gravity >= 0.0)) throw std::invalid_argument("WorldParams: gravity must be >= 0");
  }
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by the jump map when the nonzero impulse root degenerates to zero
/// (tangential contact). The driver records these and continues.
class GrazingContact : public std::runtime_error {
 public:
  explicit GrazingContact(double lambda_value)
      : std::runtime_error("grazing contact: impulse magnitude is numerically zero"),
        lambda(lambda_value) {}
  double lambda;
};

namespace detail {

// Vector forms of asym(F J_d) = S(g) under each retraction, with Jacobians.
// Exp:    G(f)  = sinc|f| J f + cosc|f| f x J f
// Cayley: G_c(f) = 2 (J f + f x J f) / (1 + |f|^2)

inline Vec3 residual_exp(const Mat3& j, const Vec3& f) {
  const double t = f.norm();
  const Vec3 jf = j * f;
  return sinc(t) * jf + cosc(t) * f.cross(jf);
}

inline Mat3 jacobian_exp(const Mat3& j, const Vec3& f) {
  const double t = f.norm();
  const Vec3 jf = j * f;
  const Vec3 fxjf = f.cross(jf);
  // d(sinc)/dt / t and d(cosc)/dt / t, with series branches near zero.
  double c1, c2;
  if (t < kSmallAngle) {
    c1 = -1.0 / 3.0 + t * t / 30.0;
    c2 = -1.0 / 12.0 + t * t / 180.0;
  } else {
    c1 = (t * std::cos(t) - std::sin(t)) / (t * t * t);
    c2 = (t * std::sin(t) - 2.0 * (1.0 - std::cos(t))) / (t * t * t * t);
  }
  return c1 * jf * f.transpose() + sinc(t) * j + c2 * fxjf * f.transpose() +
         cosc(t) * (skew(f) * j - skew(jf));
}

inline Vec3 residual_cayley(const Mat3& j, const Vec3& f) {
  const Vec3 jf = j * f;
  return 2.0 * (jf + f.cross(jf)) / (1.0 + f.squaredNorm());
}

inline Mat3 jacobian_cayley(const Mat3& j, const Vec3& f) {
  const double w = 1.0 + f.squaredNorm();
  const Vec3 jf = j * f;
  const Vec3 fxjf = f.cross(jf);
  return (2.0 / w) * ((j + skew(f) * j - skew(jf)) - (2.0 / w) * (jf + fxjf) * f.transpose());
}

inline bool newton_solve(const Mat3& j, const Vec3& g, Retraction retraction,
                         const SolverConfig& cfg, Vec3& f_out, int* iters_out = nullptr) {
  const double tol = cfg.eps_tol * std::max(1.0, g.norm()) / std::sqrt(2.0);
  Vec3 f = j.inverse() * g;  // exact in the isotropic small-angle limit
  for (int it = 0; it < cfg.max_newton_iters; ++it) {
    const Vec3 res = (retraction == Retraction::Exp ? residual_exp(j, f)
                                                    : residual_cayley(j, f)) -
                     g;
    if (res.norm() <= tol) {
      f_out = f;
      if (iters_out) *iters_out = it;
      return true;
    }
    const Mat3 jac = retraction == Retraction::Exp ? jacobian_exp(j, f)
                                                   : jacobian_cayley(j, f);
    f -= jac.inverse() * res;
    if (retraction == Retraction::Exp && f.norm() >= M_PI) return false;  // left the chart
  }
  const Vec3 res = (retraction == Retraction::Exp ? residual_exp(j, f)
                                                  : residual_cayley(j, f)) -
                   g;
  if (res.norm() <= tol) {
    f_out = f;
    if (iters_out) *iters_out = cfg.max_newton_iters;
    return true;
  }
  return false;
}

}  // namespace detail

/// Solves asym(F J_d) = S(g) for F in SO(3). Newton under the configured
/// retraction, falling back to the other retraction if the first stalls.
inline Rotation solve_relative_rotation(const Vec3& g, const RigidBody& body,
                                        const SolverConfig& cfg) {
  Vec3 f;
  const Retraction primary = cfg.retraction;
  const Retraction other =
      primary == Retraction::Exp ? Retraction::Cayley : Retraction::Exp;
  if (detail::newton_solve(body.inertia(), g, primary, cfg, f)) {
    return primary == Retraction::Exp ? exp_so3(f) : cayley_so3(f);
  }
  if (detail::newton_solve(body.inertia(), g, other, cfg, f)) {
    return other == Retraction::Exp ? exp_so3(f) : cayley_so3(f);
  }
  throw SolverError("solve_relative_rotation: Newton failed to converge (|g| = " +
                    std::to_string(g.norm()) + ")");
}

/// One step of the discrete Hamiltonian flow over timestep h:
///   x'  = x + (h/m) gamma - (1/2) g h^2 e3
///   gamma' = gamma - m g h e3
///   S(Pi) = (1/h) asym(F J_d)        (implicit solve for F)
///   Pi' = F^T Pi
///   R'  = R F
inline State discrete_flow(const State& s, double h, const WorldParams& w,
                           const SolverConfig& cfg) {
  if (!(h > 0.0)) throw std::invalid_argument("discrete_flow: h must be positive");
  const double m = w.body.mass();
  State out;
  out.x = s.x + (h / m) * s.gamma - 0.5 * w.gravity * h * h * Vec3::UnitZ();
  out.gamma = s.gamma - m * w.gravity * h * Vec3::UnitZ();
  const Rotation f = solve_relative_rotation(h * s.Pi, w.body, cfg);
  out.Pi = f.matrix().transpose() * s.Pi;
  out.R = s.R * f;
  return out;
}

/// Elastic jump at a contact configuration. Eliminating the post-impact
/// momenta from the energy balance leaves a quadratic in the impulse with a
/// root at zero; the unique nonzero root is
///   lambda = -(gamma.a/m + chi^T J^{-1} Pi) / (|a|^2/(2m) + chi^T J^{-1} chi / 2)
/// with a = dPhi/dx. Throws GrazingContact when that root is numerically
/// zero and the contact is tangential.
struct JumpResult {
  double lambda = 0.0;
  State plus;
};

inline JumpResult jump(const State& s, const ContactGeometry& cg, const WorldParams& w) {
  const double m = w.body.mass();
  const Vec3& a = cg.dphi_dx;
  const Vec3 jinv_chi = w.body.inertia_inverse() * cg.chi;
  const double numerator = s.gamma.dot(a) / m + cg.chi.dot(w.body.inertia_inverse() * s.Pi);
  const double denominator = a.squaredNorm() / (2.0 * m) + 0.5 * cg.chi.dot(jinv_chi);
  if (!(denominator > 0.0)) {
    throw SolverError("jump: degenerate impulse denominator");
  }
  const double lambda = -numerator / denominator;
  const double momentum_scale = std::max(1.0, s.gamma.norm() + s.Pi.norm());
  if (std::abs(lambda) < 1e-12 * momentum_scale) {
    throw GrazingContact(lambda);
  }
  JumpResult out;
  out.lambda = lambda;
  out.plus = s;
  out.plus.gamma = s.gamma + lambda * a;
  out.plus.Pi = s.Pi + lambda * cg.chi;
  return out;
}

/// Total energy |gamma|^2/(2m) + Pi^T J^{-1} Pi / 2 + m g e3.x.
inline double energy(const State& s, const WorldParams& w) {
  const double m = w.body.mass();
  return s.gamma.squaredNorm() / (2.0 * m) +
         0.5 * s.Pi.dot(w.body.inertia_inverse() * s.Pi) +
         m * w.gravity * s.x.z();
}

/// Translational-plus-potential part of the energy (for energy-transfer
/// plots).
inline double translational_potential_energy(const State& s, const WorldParams& w) {
  const double m = w.body.mass();
  return s.gamma.squaredNorm() / (2.0 * m) + m * w.gravity * s.x.z();
}

/// Rotational kinetic energy Pi^T J^{-1} Pi / 2.
inline double rotational_energy(const State& s, const WorldParams& w) {
  return 0.5 * s.Pi.dot(w.body.inertia_inverse() * s.Pi);
}

/// Discrete energy of a configuration segment:
///   E_d = m |x' - x|^2 / (2 h^2) + tr[(I - F) J_d] / h^2
///       + (m g / 2) e3.(x' + x),   F = R^T R'.
inline double discrete_energy(const Pose& q0, const Pose& q1, double h, const WorldParams& w) {
  if (!(h > 0.0)) throw std::invalid_argument("discrete_energy: h must be positive");
  const double m = w.body.mass();
  const Mat3 f = q0.attitude.matrix().transpose() * q1.attitude.matrix();
  const double kin_t = m * (q1.position - q0.position).squaredNorm() / (2.0 * h * h);
  const double kin_r = ((Mat3::Identity() - f) * w.body.inertia_nonstandard()).trace() / (h * h);
  const double pot = 0.5 * m * w.gravity * (q1.position.z() + q0.position.z());
  return kin_t + kin_r + pot;
}

/// Discrete Euler-Lagrange residual of a pose triple with (possibly unequal)
/// timesteps. Zero, up to solver tolerance, on triples produced by the
/// discrete flow with no impulse applied at the middle pose.
inline std::pair<Vec3, Mat3> del_residual(const Pose& q_prev, const Pose& q, const Pose& q_next,
                                          double h_prev, double h_next, const WorldParams& w) {
  if (!(h_prev > 0.0 && h_next > 0.0)) {
    throw std::invalid_argument("del_residual: timesteps must be positive");
  }
  const double m = w.body.mass();
  const Vec3 translational = (m / h_next) * (q_next.position - q.position) -
                             (m / h_prev) * (q.position - q_prev.position) +
                             0.5 * m * w.gravity * (h_prev + h_next) * Vec3::UnitZ();
  const Mat3 f_prev = q_prev.attitude.matrix().transpose() * q.attitude.matrix();
  const Mat3 f_next = q.attitude.matrix().transpose() * q_next.attitude.matrix();
  const Mat3& jd = w.body.inertia_nonstandard();
  const Mat3 rotational = asym(jd * f_prev / h_prev - f_next * jd / h_next);
  return {translational, rotational};
}

/// Classical 4th-order one-step reference for the smooth Hamiltonian flow
///   x. = gamma/m, R. = R S(Omega), gamma. = -m g e3, Pi. = Pi x Omega,
/// with Omega = J^{-1} Pi. Validation oracle only; the attitude is
/// integrated in the ambient space and is not reprojected onto SO(3).
inline State continuous_reference(const State& s, double t, const WorldParams& w, int substeps) {
  if (substeps < 1) throw std::invalid_argument("continuous_reference: substeps must be >= 1");
  struct Raw {
    Vec3 x;
    Mat3 r;
    Vec3 gamma;
    Vec3 pi;
  };
  const double m = w.body.mass();
  const Mat3& jinv = w.body.inertia_inverse();
  const auto deriv = [&](const Raw& y) {
    const Vec3 omega = jinv * y.pi;
    return Raw{y.gamma / m, y.r * skew(omega), -m * w.gravity * Vec3::UnitZ(),
               y.pi.cross(omega)};
  };
  const auto axpy = [](const Raw& y, double a, const Raw& d) {
    return Raw{y.x + a * d.x, y.r + a * d.r, y.gamma + a * d.gamma, y.pi + a * d.pi};
  };

  Raw y{s.x, s.R.matrix(), s.gamma, s.Pi};
  const double dt = t / substeps;
  for (int i = 0; i < substeps; ++i) {
    const Raw k1 = deriv(y);
    const Raw k2 = deriv(axpy(y, 0.5 * dt, k1));
    const Raw k3 = deriv(axpy(y, 0.5 * dt, k2));
    const Raw k4 = deriv(axpy(y, dt, k3));
    y.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    y.r += dt / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
    y.gamma += dt / 6.0 * (k1.gamma + 2.0 * k2.gamma + 2.0 * k3.gamma + k4.gamma);
    y.pi += dt / 6.0 * (k1.pi + 2.0 * k2.pi + 2.0 * k3.pi + k4.pi);
  }
  State out;
  out.x = y.x;
  out.R = Rotation::from_matrix_unchecked(y.r);
  out.gamma = y.gamma;
  out.Pi = y.pi;
  return out;
}

}  // namespace lgvci
