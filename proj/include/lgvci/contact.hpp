// Collision detection between a rigid body and a plane: the signed
// separation Phi, its partial derivatives in (x, R), the angular-impulse
// direction chi, and closest-point computations for every supported shape.
#pragma once

#include <lgvci/body.hpp>
#include <lgvci/geom.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace lgvci {

/// A plane { z : n.z + D = 0 } with unit normal, n3 > 0 so "above" is
/// well defined. Dynamics fixes D = 0; the separation oracles accept any D.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  Plane() = default;
  Plane(const Vec3& n, double d) : normal(n), offset(d) {
    if (std::abs(normal.norm() - 1.0) > 1e-14) {
      throw std::invalid_argument("Plane: normal must be unit length");
    }
    if (!(normal.z() > 0.0)) {
      throw std::invalid_argument("Plane: normal must have positive z component");
    }
  }

  static Plane horizontal() { return Plane(); }

  /// Plane through the origin tilted about the y-axis: normal = R_y(theta) e3.
  static Plane tilted_about_y(double theta_rad) {
    return Plane(Vec3(std::sin(theta_rad), 0.0, std::cos(theta_rad)), 0.0);
  }
};

/// Everything the jump conditions need at one configuration: the separation
/// value, its partials, chi = S^{-1}(asym(R^T dPhi/dR)), and the body-frame
/// closest point on the surface.
struct ContactGeometry {
  double phi = 0.0;
  Vec3 dphi_dx = Vec3::Zero();
  Mat3 dphi_dR = Mat3::Zero();
  Vec3 chi = Vec3::Zero();
  Vec3 closest_point = Vec3::Zero();
};

// ---------------------------------------------------------------------------
// Ellipsoid against a plane (closed forms)
// ---------------------------------------------------------------------------

/// Phi(x, R) = n.x + D - |I_E R^T n|. Positive iff the body is separated on
/// the +n side, zero at grazing contact, negative on interpenetration.
inline double phi_ellipsoid(const Pose& pose, const Ellipsoid& e, const Plane& p) {
  const Vec3 body_normal = pose.attitude.matrix().transpose() * p.normal;
  const Vec3 scaled = e.semiaxis_matrix() * body_normal;
  return p.normal.dot(pose.position) + p.offset - scaled.norm();
}

/// (dPhi/dx, dPhi/dR) = (n, -n n^T R I_E^2 / |I_E R^T n|).
inline std::pair<Vec3, Mat3> phi_grad_ellipsoid(const Pose& pose, const Ellipsoid& e,
                                                const Plane& p) {
  const Mat3& r = pose.attitude.matrix();
  const Vec3 body_normal = r.transpose() * p.normal;
  const Mat3 ie2 = Vec3(e.a * e.a, e.b * e.b, e.c * e.c).asDiagonal();
  const double denom = (e.semiaxis_matrix() * body_normal).norm();
  const Mat3 dr = -(p.normal * p.normal.transpose()) * r * ie2 / denom;
  return {p.normal, dr};
}

/// chi with S(chi) = asym(R^T dPhi/dR), computed both through the inverse
/// skew map and through the row-wise cross-product sum; the two must agree.
inline Vec3 chi_vector(const Rotation& r, const Mat3& dphi_dR) {
  const Mat3 a = asym(r.matrix().transpose() * dphi_dR);
  const Vec3 via_unskew(a(2, 1), a(0, 2), a(1, 0));

  Vec3 via_cross = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    const Vec3 phi_row = dphi_dR.row(i).transpose();
    const Vec3 r_row = r.matrix().row(i).transpose();
    via_cross += phi_row.cross(r_row);
  }
  const double scale = std::max(1.0, dphi_dR.norm());
  if ((via_unskew - via_cross).norm() > 1e-12 * scale) {
    throw std::runtime_error("chi_vector: unskew and cross-product evaluations disagree");
  }
  return via_cross;
}

/// Body-frame closest point on the ellipsoid boundary to the plane:
/// rho_C(R) = -I_E^2 R^T n / |I_E R^T n|.
inline Vec3 closest_point_ellipsoid(const Rotation& r, const Ellipsoid& e, const Plane& p) {
  const Vec3 body_normal = r.matrix().transpose() * p.normal;
  const Vec3 scaled = e.semiaxis_matrix() * body_normal;
  const Mat3 ie2 = Vec3(e.a * e.a, e.b * e.b, e.c * e.c).asDiagonal();
  return -(ie2 * body_normal) / scaled.norm();
}

// ---------------------------------------------------------------------------
// Polyhedron against a plane
// ---------------------------------------------------------------------------

/// The vertex minimizing n^T R v (ties broken by lowest index) and the
/// contact point on the rounded surface, v - eps R^T n.
inline std::pair<std::size_t, Vec3> closest_point_polyhedron(const Rotation& r,
                                                             const ConvexPolyhedron& poly,
                                                             const Plane& p) {
  const Vec3 body_normal = r.matrix().transpose() * p.normal;
  std::size_t best = 0;
  double best_val = body_normal.dot(poly.vertices()[0]);
  for (std::size_t i = 1; i < poly.vertices().size(); ++i) {
    const double v = body_normal.dot(poly.vertices()[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  return {best, poly.vertices()[best] - poly.rounding() * body_normal};
}

// ---------------------------------------------------------------------------
// Inversive-geometry separation oracles (general plane offset D)
// ---------------------------------------------------------------------------

/// min | (D + n.x) +- |I_E R^T n| |: the distance between the displaced
/// ellipsoid and the plane when they do not intersect.
inline double ellipsoid_plane_distance(const Pose& pose, const Ellipsoid& e, const Plane& p) {
  const double shift = p.offset + p.normal.dot(pose.position);
  const double reach = (e.semiaxis_matrix() * (pose.attitude.matrix().transpose() * p.normal)).norm();
  return std::min(std::abs(shift + reach), std::abs(shift - reach));
}

/// |I_E R^T n| < |D + n.x| iff the ellipsoid and plane are disjoint.
inline bool is_separated(const Pose& pose, const Ellipsoid& e, const Plane& p) {
  const double shift = p.offset + p.normal.dot(pose.position);
  const double reach = (e.semiaxis_matrix() * (pose.attitude.matrix().transpose() * p.normal)).norm();
  return reach < std::abs(shift);
}

/// Pole of a point with respect to the ellipsoid: p' = p / f_E(p). Involutive.
inline Vec3 pole_of_point(const Vec3& point, const Ellipsoid& e) {
  const double f = e.level(point);
  if (!(f > 0.0)) {
    throw std::invalid_argument("pole_of_point: point at the center has no pole");
  }
  return point / f;
}

/// Pole of the plane { n.z + D = 0 } with respect to the ellipsoid:
/// p*' = -(A a^2, B b^2, C c^2) / D.
inline Vec3 pole_of_plane(const Plane& p, const Ellipsoid& e) {
  if (p.offset == 0.0) {
    throw std::invalid_argument("pole_of_plane: plane through the center has no pole");
  }
  return -Vec3(p.normal.x() * e.a * e.a, p.normal.y() * e.b * e.b,
               p.normal.z() * e.c * e.c) /
         p.offset;
}

// ---------------------------------------------------------------------------
// General bodies: dispatch over the supported shape family
// ---------------------------------------------------------------------------

namespace detail {

struct SupportCandidate {
  Vec3 point;
  double value;  // n^T R point
};

inline SupportCandidate ellipsoid_support(const ShapeNode::EllipsoidPrim& prim,
                                          const Vec3& body_normal) {
  const Ellipsoid& e = prim.shape;
  const Mat3 ie2 = Vec3(e.a * e.a, e.b * e.b, e.c * e.c).asDiagonal();
  const double reach = (e.semiaxis_matrix() * body_normal).norm();
  const Vec3 rho = prim.offset - (ie2 * body_normal) / reach;
  return {rho, body_normal.dot(rho)};
}

// Projected-gradient descent of n^T R rho on the boundary of an intersection
// of two ellipsoids, multi-started around the intersection curve. Returns the
// best converged candidate, if any.
inline std::optional<SupportCandidate> intersection_curve_candidate(
    const ShapeNode::EllipsoidPrim& e1, const ShapeNode::EllipsoidPrim& e2,
    const Vec3& body_normal) {
  const auto f1 = [&](const Vec3& z) { return e1.shape.implicit(z - e1.offset); };
  const auto f2 = [&](const Vec3& z) { return e2.shape.implicit(z - e2.offset); };
  const auto g1 = [&](const Vec3& z) { return e1.shape.implicit_gradient(z - e1.offset); };
  const auto g2 = [&](const Vec3& z) { return e2.shape.implicit_gradient(z - e2.offset); };

  // Project a point onto the curve {f1 = 0, f2 = 0} by Newton on the two
  // constraints, moving within span{grad f1, grad f2}.
  const auto project_to_curve = [&](Vec3 z) -> std::optional<Vec3> {
    for (int it = 0; it < 80; ++it) {
      const double v1 = f1(z), v2 = f2(z);
      if (std::abs(v1) <= 1e-13 && std::abs(v2) <= 1e-13) return z;
      const Vec3 a = g1(z), b = g2(z);
      Eigen::Matrix2d gram;
      gram << a.dot(a), a.dot(b), a.dot(b), b.dot(b);
      if (std::abs(gram.determinant()) < 1e-14) return std::nullopt;  // parallel normals
      const Eigen::Vector2d rhs(-v1, -v2);
      const Eigen::Vector2d coef = gram.inverse() * rhs;
      z += coef[0] * a + coef[1] * b;
    }
    return std::nullopt;
  };

  // Seeds spread around the plane through both centers, orthogonal to the
  // center-to-center axis.
  const Vec3 axis_raw = e2.offset - e1.offset;
  Vec3 axis = axis_raw.norm() > 1e-12 ? axis_raw.normalized() : Vec3::UnitX();
  Vec3 u = axis.cross(Vec3::UnitZ());
  if (u.norm() < 1e-6) u = axis.cross(Vec3::UnitY());
  u.normalize();
  const Vec3 w = axis.cross(u);
  const Vec3 mid = 0.5 * (e1.offset + e2.offset);
  const double spread =
      std::max({e1.shape.a, e1.shape.b, e1.shape.c, e2.shape.a, e2.shape.b, e2.shape.c});

  std::optional<SupportCandidate> best;
  for (int s = 0; s < 8; ++s) {
    const double ang = 2.0 * M_PI * s / 8.0;
    auto z_opt = project_to_curve(mid + spread * (std::cos(ang) * u + std::sin(ang) * w));
    if (!z_opt) continue;
    Vec3 z = *z_opt;
    double step = 0.25 * spread;
    double val = body_normal.dot(z);
    for (int it = 0; it < 200 && step > 1e-14 * spread; ++it) {
      const Vec3 a = g1(z), b = g2(z);
      Vec3 tangent = a.cross(b);
      if (tangent.norm() < 1e-14) break;
      tangent.normalize();
      const Vec3 dir = tangent * tangent.dot(-body_normal);  // descent along the curve
      if (dir.norm() < 1e-16) break;
      auto trial_opt = project_to_curve(z + step * dir.normalized());
      if (!trial_opt) {
        step *= 0.5;
        continue;
      }
      const double trial_val = body_normal.dot(*trial_opt);
      if (trial_val < val - 1e-15 * std::max(1.0, std::abs(val))) {
        z = *trial_opt;
        val = trial_val;
      } else {
        step *= 0.5;
      }
    }
    if (!best || val < best->value) best = SupportCandidate{z, val};
  }
  return best;
}

}  // namespace detail

/// Full contact geometry of a supported body against the plane. Supported
/// shapes: a centered ellipsoid, an eps-rounded convex polyhedron, and
/// unions/intersections of two ellipsoids. dPhi/dR comes from the envelope
/// of the support minimization; the n^T R (d rho_C / dR) term vanishes at
/// configurations with a unique closest point (checked against finite
/// differences in the test suite).
inline ContactGeometry phi_general(const Pose& pose, const RigidBody& body, const Plane& p) {
  const Mat3& r = pose.attitude.matrix();
  const Vec3 body_normal = r.transpose() * p.normal;
  const double base = p.normal.dot(pose.position) + p.offset;

  ContactGeometry cg;
  cg.dphi_dx = p.normal;

  const auto& payload = body.shape().payload();
  if (const auto* e = std::get_if<ShapeNode::EllipsoidPrim>(&payload)) {
    const auto cand = detail::ellipsoid_support(*e, body_normal);
    cg.closest_point = cand.point;
    cg.phi = cand.value + base;
    cg.dphi_dR = p.normal * cand.point.transpose();
  } else if (const auto* poly = std::get_if<ShapeNode::PolyhedronPrim>(&payload)) {
    const auto [idx, rounded] = closest_point_polyhedron(pose.attitude, *poly->shape, p);
    const Vec3& vertex = poly->shape->vertices()[idx];
    cg.closest_point = rounded;
    cg.phi = body_normal.dot(vertex) + base - poly->shape->rounding();
    cg.dphi_dR = p.normal * vertex.transpose() -
                 poly->shape->rounding() * (p.normal * p.normal.transpose()) * r;
  } else if (const auto* uni = std::get_if<ShapeNode::Union>(&payload)) {
    const auto* e1 = std::get_if<ShapeNode::EllipsoidPrim>(&uni->left->payload());
    const auto* e2 = std::get_if<ShapeNode::EllipsoidPrim>(&uni->right->payload());
    if (!e1 || !e2) throw std::invalid_argument("phi_general: unsupported CSG operands");
    const auto c1 = detail::ellipsoid_support(*e1, body_normal);
    const auto c2 = detail::ellipsoid_support(*e2, body_normal);
    // A candidate strictly interior to the other constituent is not on the
    // union boundary.
    const bool keep1 = sdf_eval(*uni->right, c1.point) >= -config::csg_tie_tol;
    const bool keep2 = sdf_eval(*uni->left, c2.point) >= -config::csg_tie_tol;
    const detail::SupportCandidate* win = nullptr;
    if (keep1 && (!keep2 || c1.value <= c2.value)) win = &c1;
    else if (keep2) win = &c2;
    if (!win) throw std::runtime_error("phi_general: union support selection failed");
    cg.closest_point = win->point;
    cg.phi = win->value + base;
    cg.dphi_dR = p.normal * win->point.transpose();
    sdf_grad(body.shape(), win->point);  // raises GradientUndefinedError at shared-boundary ties
  } else if (const auto* inter = std::get_if<ShapeNode::Intersection>(&payload)) {
    const auto* e1 = std::get_if<ShapeNode::EllipsoidPrim>(&inter->left->payload());
    const auto* e2 = std::get_if<ShapeNode::EllipsoidPrim>(&inter->right->payload());
    if (!e1 || !e2) throw std::invalid_argument("phi_general: unsupported CSG operands");
    const auto c1 = detail::ellipsoid_support(*e1, body_normal);
    const auto c2 = detail::ellipsoid_support(*e2, body_normal);
    std::optional<detail::SupportCandidate> win;
    // A constituent's support point is feasible only inside the other body.
    if (sdf_eval(*inter->right, c1.point) <= config::csg_tie_tol) win = c1;
    if (sdf_eval(*inter->left, c2.point) <= config::csg_tie_tol &&
        (!win || c2.value < win->value)) {
      win = c2;
    }
    const auto curve = detail::intersection_curve_candidate(*e1, *e2, body_normal);
    bool on_curve = false;
    if (curve && (!win || curve->value < win->value)) {
      win = curve;
      on_curve = true;
    }
    if (!win) throw std::runtime_error("phi_general: intersection support selection failed");
    cg.closest_point = win->point;
    cg.phi = win->value + base;
    cg.dphi_dR = p.normal * win->point.transpose();
    if (on_curve) {
      throw GradientUndefinedError(
          "phi_general: closest point lies on the intersection curve; the surface normal "
          "is undefined there");
    }
    sdf_grad(body.shape(), win->point);
  } else {
    throw std::invalid_argument("phi_general: unsupported shape");
  }

  cg.chi = chi_vector(pose.attitude, cg.dphi_dR);
  return cg;
}

/// Separation value only (skips chi and the tie checks where possible).
inline double phi_value(const Pose& pose, const RigidBody& body, const Plane& p) {
  const Mat3& r = pose.attitude.matrix();
  const Vec3 body_normal = r.transpose() * p.normal;
  const double base = p.normal.dot(pose.position) + p.offset;

  const auto& payload = body.shape().payload();
  if (const auto* e = std::get_if<ShapeNode::EllipsoidPrim>(&payload)) {
    return detail::ellipsoid_support(*e, body_normal).value + base;
  }
  if (const auto* poly = std::get_if<ShapeNode::PolyhedronPrim>(&payload)) {
    const auto [idx, rounded] = closest_point_polyhedron(pose.attitude, *poly->shape, p);
    (void)rounded;
    return body_normal.dot(poly->shape->vertices()[idx]) + base - poly->shape->rounding();
  }
  if (const auto* uni = std::get_if<ShapeNode::Union>(&payload)) {
    const auto* e1 = std::get_if<ShapeNode::EllipsoidPrim>(&uni->left->payload());
    const auto* e2 = std::get_if<ShapeNode::EllipsoidPrim>(&uni->right->payload());
    if (!e1 || !e2) throw std::invalid_argument("phi_value: unsupported CSG operands");
    // The global support of the union is the lower of the two supports and is
    // automatically on the union boundary.
    return std::min(detail::ellipsoid_support(*e1, body_normal).value,
                    detail::ellipsoid_support(*e2, body_normal).value) +
           base;
  }
  if (const auto* inter = std::get_if<ShapeNode::Intersection>(&payload)) {
    const auto* e1 = std::get_if<ShapeNode::EllipsoidPrim>(&inter->left->payload());
    const auto* e2 = std::get_if<ShapeNode::EllipsoidPrim>(&inter->right->payload());
    if (!e1 || !e2) throw std::invalid_argument("phi_value: unsupported CSG operands");
    const auto c1 = detail::ellipsoid_support(*e1, body_normal);
    const auto c2 = detail::ellipsoid_support(*e2, body_normal);
    std::optional<double> best;
    if (sdf_eval(*inter->right, c1.point) <= config::csg_tie_tol) best = c1.value;
    if (sdf_eval(*inter->left, c2.point) <= config::csg_tie_tol &&
        (!best || c2.value < *best)) {
      best = c2.value;
    }
    const auto curve = detail::intersection_curve_candidate(*e1, *e2, body_normal);
    if (curve && (!best || curve->value < *best)) best = curve->value;
    if (!best) throw std::runtime_error("phi_value: intersection support selection failed");
    return *best + base;
  }
  throw std::invalid_argument("phi_value: unsupported shape");
}

}  // namespace lgvci
