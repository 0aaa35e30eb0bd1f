// Rigid-body shape descriptions (ellipsoids, eps-rounded convex polyhedra,
// CSG compositions), implicit-function evaluation, and inertia tensors.
#pragma once

#include <lgvci/geom.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <variant>
#include <vector>

namespace lgvci {

namespace config {
// Tie tolerance for CSG min/max gradient selection, in length units.
inline double csg_tie_tol = 1e-12;
inline double csg_grad_agree_tol = 1e-9;
// Allowed centroid offset of a composite solid, relative to its bounding
// radius. The tabulated two-ellipsoid union ships with a centering constant
// that leaves a ~1.5e-3 relative residual, so the gate sits just above that.
inline double centroid_rel_tol = 2e-3;
}  // namespace config

/// Raised where an implicit-surface gradient is genuinely undefined (equal
/// child values with disagreeing gradients at a CSG node, or a polyhedron
/// edge/vertex).
class GradientUndefinedError : public std::runtime_error {
 public:
  explicit GradientUndefinedError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Primitives
// ---------------------------------------------------------------------------

/// Axis-aligned ellipsoid in its own frame: f(z) = z^T diag(a,b,c)^{-2} z <= 1.
struct Ellipsoid {
  double a = 1.0, b = 1.0, c = 1.0;

  Ellipsoid() = default;
  Ellipsoid(double a_, double b_, double c_) : a(a_), b(b_), c(c_) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0)) {
      throw std::invalid_argument("Ellipsoid: semiaxes must be positive");
    }
  }

  Mat3 semiaxis_matrix() const { return Vec3(a, b, c).asDiagonal(); }

  /// f(z) = (z1/a)^2 + (z2/b)^2 + (z3/c)^2; boundary at f = 1.
  double level(const Vec3& z) const {
    const double u = z.x() / a, v = z.y() / b, w = z.z() / c;
    return u * u + v * v + w * w;
  }

  /// Normalized implicit function |diag(a,b,c)^{-1} z| - 1. Shares the zero
  /// set with the metric SDF; metric distances to planes are obtained from
  /// the closed-form contact formulas instead.
  double implicit(const Vec3& z) const { return std::sqrt(level(z)) - 1.0; }

  Vec3 implicit_gradient(const Vec3& z) const {
    const Vec3 scaled(z.x() / (a * a), z.y() / (b * b), z.z() / (c * c));
    const double r = std::sqrt(level(z));
    if (r <= 0.0) {
      throw GradientUndefinedError("ellipsoid implicit gradient at the center");
    }
    return scaled / r;
  }
};

/// Convex polyhedron given by its vertex set, with an eps-rounding radius
/// that smooths corners for impact purposes. Faces are enumerated once at
/// construction (brute force over vertex triples; vertex counts here are
/// small).
class ConvexPolyhedron {
 public:
  ConvexPolyhedron(std::vector<Vec3> vertices, double rounding)
      : vertices_(std::move(vertices)), rounding_(rounding) {
    if (!(rounding_ > 0.0)) {
      throw std::invalid_argument("ConvexPolyhedron: rounding eps must be > 0");
    }
    if (vertices_.size() < 4) {
      throw std::invalid_argument("ConvexPolyhedron: need at least 4 vertices");
    }
    enumerate_faces();
    validate_centroid();
  }

  /// Cube of side s centered at the origin.
  static ConvexPolyhedron cube(double side, double rounding) {
    if (!(side > 0.0)) throw std::invalid_argument("cube: side must be positive");
    const double h = 0.5 * side;
    std::vector<Vec3> v;
    for (int sx : {-1, 1})
      for (int sy : {-1, 1})
        for (int sz : {-1, 1}) v.emplace_back(sx * h, sy * h, sz * h);
    return ConvexPolyhedron(std::move(v), rounding);
  }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  double rounding() const { return rounding_; }

  struct Face {
    Vec3 normal;    // outward unit normal
    double offset;  // plane is normal . z = offset
  };
  const std::vector<Face>& faces() const { return faces_; }

  /// max over faces of (n.z - d), minus the rounding radius. Exact signed
  /// distance on the inside and near faces; near corners the sharp polyhedral
  /// offset stands in for the rounded one (discrepancy O(eps)).
  double implicit(const Vec3& z) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const Face& f : faces_) best = std::max(best, f.normal.dot(z) - f.offset);
    return best - rounding_;
  }

  Vec3 implicit_gradient(const Vec3& z) const {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < faces_.size(); ++i) {
      const double v = faces_[i].normal.dot(z) - faces_[i].offset;
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    for (std::size_t i = 0; i < faces_.size(); ++i) {
      if (i == arg) continue;
      const double v = faces_[i].normal.dot(z) - faces_[i].offset;
      if (best - v <= config::csg_tie_tol &&
          (faces_[i].normal - faces_[arg].normal).norm() > config::csg_grad_agree_tol) {
        throw GradientUndefinedError("polyhedron gradient on an edge or vertex");
      }
    }
    return faces_[arg].normal;
  }

  double bounding_radius() const {
    double r = 0.0;
    for (const Vec3& v : vertices_) r = std::max(r, v.norm());
    return r + rounding_;
  }

 private:
  void enumerate_faces() {
    const std::size_t n = vertices_.size();
    const double scale = bounding_radius();
    const double plane_tol = 1e-9 * std::max(1.0, scale);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
          Vec3 nrm = (vertices_[j] - vertices_[i]).cross(vertices_[k] - vertices_[i]);
          const double len = nrm.norm();
          if (len <= 1e-12 * scale * scale) continue;  // degenerate triple
          nrm /= len;
          double lo = std::numeric_limits<double>::infinity();
          double hi = -std::numeric_limits<double>::infinity();
          for (const Vec3& v : vertices_) {
            const double d = nrm.dot(v - vertices_[i]);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
          }
          // A supporting plane has all vertices on one side.
          if (lo < -plane_tol && hi > plane_tol) continue;
          if (hi > plane_tol) nrm = -nrm;  // make the normal point outward
          const double off = nrm.dot(vertices_[i]);
          bool dup = false;
          for (const Face& f : faces_) {
            if ((f.normal - nrm).norm() < 1e-9 && std::abs(f.offset - off) < plane_tol) {
              dup = true;
              break;
            }
          }
          if (!dup) faces_.push_back(Face{nrm, off});
        }
      }
    }
    if (faces_.size() < 4) {
      throw std::invalid_argument("ConvexPolyhedron: vertex set is degenerate (coplanar?)");
    }
  }

  // The solid hull centroid must sit at the origin (it is the center of mass
  // in the body frame). Fan triangulation of each face, tetrahedra against
  // the vertex mean.
  void validate_centroid() {
    Vec3 apex = Vec3::Zero();
    for (const Vec3& v : vertices_) apex += v;
    apex /= static_cast<double>(vertices_.size());

    double vol = 0.0;
    Vec3 moment = Vec3::Zero();
    for (const Face& f : faces_) {
      const std::vector<Vec3> ring = face_ring(f);
      if (ring.size() < 3) continue;
      for (std::size_t t = 1; t + 1 < ring.size(); ++t) {
        const Vec3& a = ring[0];
        const Vec3& b = ring[t];
        const Vec3& c = ring[t + 1];
        const double tet = (b - apex).cross(c - apex).dot(a - apex) / 6.0;
        vol += tet;
        moment += tet * (apex + a + b + c) / 4.0;
      }
    }
    if (std::abs(vol) <= 0.0) {
      throw std::invalid_argument("ConvexPolyhedron: hull has no volume");
    }
    if ((moment / vol).norm() > 1e-9 * std::max(1.0, bounding_radius())) {
      throw std::invalid_argument("ConvexPolyhedron: hull centroid is not at the origin");
    }
  }

  std::vector<Vec3> face_ring(const Face& f) const {
    const double tol = 1e-9 * std::max(1.0, bounding_radius());
    std::vector<Vec3> ring;
    for (const Vec3& v : vertices_) {
      if (std::abs(f.normal.dot(v) - f.offset) < tol) ring.push_back(v);
    }
    if (ring.size() < 3) return ring;
    Vec3 center = Vec3::Zero();
    for (const Vec3& v : ring) center += v;
    center /= static_cast<double>(ring.size());
    const Vec3 u = (ring[0] - center).normalized();
    const Vec3 w = f.normal.cross(u);
    std::sort(ring.begin(), ring.end(), [&](const Vec3& p, const Vec3& q) {
      return std::atan2(w.dot(p - center), u.dot(p - center)) <
             std::atan2(w.dot(q - center), u.dot(q - center));
    });
    // Orient the ring so the fan normals agree with the outward face normal.
    if ((ring[1] - ring[0]).cross(ring[2] - ring[0]).dot(f.normal) < 0.0) {
      std::reverse(ring.begin(), ring.end());
    }
    return ring;
  }

  std::vector<Vec3> vertices_;
  double rounding_;
  std::vector<Face> faces_;
};

// ---------------------------------------------------------------------------
// CSG shape tree
// ---------------------------------------------------------------------------

/// Axis-aligned bounding box; empty() means unbounded (half-spaces,
/// complements).
struct Aabb {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  bool bounded = false;
};

/// Finite CSG tree over convex primitives. Nodes are immutable and shareable.
class ShapeNode {
 public:
  struct EllipsoidPrim {
    Ellipsoid shape;
    Vec3 offset;
  };
  struct PolyhedronPrim {
    std::shared_ptr<const ConvexPolyhedron> shape;
  };
  struct HalfSpace {
    Vec3 normal;
    double offset;  // psi(z) = normal . z + offset
  };
  struct Union {
    std::shared_ptr<const ShapeNode> left, right;
  };
  struct Intersection {
    std::shared_ptr<const ShapeNode> left, right;
  };
  struct Complement {
    std::shared_ptr<const ShapeNode> child;
  };

  using Payload = std::variant<EllipsoidPrim, PolyhedronPrim, HalfSpace, Union,
                               Intersection, Complement>;

  static ShapeNode ellipsoid(const Ellipsoid& e, const Vec3& offset = Vec3::Zero()) {
    return ShapeNode(EllipsoidPrim{e, offset});
  }
  static ShapeNode polyhedron(ConvexPolyhedron poly) {
    return ShapeNode(PolyhedronPrim{std::make_shared<const ConvexPolyhedron>(std::move(poly))});
  }
  static ShapeNode half_space(const Vec3& unit_normal, double offset) {
    if (std::abs(unit_normal.norm() - 1.0) > 1e-12) {
      throw std::invalid_argument("half_space: normal must be unit length");
    }
    return ShapeNode(HalfSpace{unit_normal, offset});
  }
  static ShapeNode csg_union(ShapeNode left, ShapeNode right) {
    return ShapeNode(Union{std::make_shared<const ShapeNode>(std::move(left)),
                           std::make_shared<const ShapeNode>(std::move(right))});
  }
  static ShapeNode csg_intersection(ShapeNode left, ShapeNode right) {
    return ShapeNode(Intersection{std::make_shared<const ShapeNode>(std::move(left)),
                                  std::make_shared<const ShapeNode>(std::move(right))});
  }
  static ShapeNode complement(ShapeNode child) {
    return ShapeNode(Complement{std::make_shared<const ShapeNode>(std::move(child))});
  }

  const Payload& payload() const { return payload_; }

 private:
  explicit ShapeNode(Payload p) : payload_(std::move(p)) {}
  Payload payload_;
};

/// Implicit-function value: negative strictly inside, positive strictly
/// outside, zero on the interface. Union takes the min of its children,
/// intersection the max, complement the negation.
inline double sdf_eval(const ShapeNode& node, const Vec3& z) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ShapeNode::EllipsoidPrim>) {
          return n.shape.implicit(z - n.offset);
        } else if constexpr (std::is_same_v<T, ShapeNode::PolyhedronPrim>) {
          return n.shape->implicit(z);
        } else if constexpr (std::is_same_v<T, ShapeNode::HalfSpace>) {
          return n.normal.dot(z) + n.offset;
        } else if constexpr (std::is_same_v<T, ShapeNode::Union>) {
          return std::min(sdf_eval(*n.left, z), sdf_eval(*n.right, z));
        } else if constexpr (std::is_same_v<T, ShapeNode::Intersection>) {
          return std::max(sdf_eval(*n.left, z), sdf_eval(*n.right, z));
        } else {
          return -sdf_eval(*n.child, z);
        }
      },
      node.payload());
}

/// Gradient of sdf_eval where defined. At a union/intersection tie the
/// gradient exists only if both children agree; otherwise
/// GradientUndefinedError is raised.
inline Vec3 sdf_grad(const ShapeNode& node, const Vec3& z) {
  return std::visit(
      [&](const auto& n) -> Vec3 {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ShapeNode::EllipsoidPrim>) {
          return n.shape.implicit_gradient(z - n.offset);
        } else if constexpr (std::is_same_v<T, ShapeNode::PolyhedronPrim>) {
          return n.shape->implicit_gradient(z);
        } else if constexpr (std::is_same_v<T, ShapeNode::HalfSpace>) {
          return n.normal;
        } else if constexpr (std::is_same_v<T, ShapeNode::Union> ||
                             std::is_same_v<T, ShapeNode::Intersection>) {
          const double l = sdf_eval(*n.left, z);
          const double r = sdf_eval(*n.right, z);
          constexpr bool take_min = std::is_same_v<T, ShapeNode::Union>;
          if (std::abs(l - r) <= config::csg_tie_tol) {
            const Vec3 gl = sdf_grad(*n.left, z);
            const Vec3 gr = sdf_grad(*n.right, z);
            if ((gl - gr).norm() <= config::csg_grad_agree_tol) return gl;
            throw GradientUndefinedError("CSG gradient tie with disagreeing children");
          }
          const bool left_active = take_min ? (l < r) : (l > r);
          return left_active ? sdf_grad(*n.left, z) : sdf_grad(*n.right, z);
        } else {
          return -sdf_grad(*n.child, z);
        }
      },
      node.payload());
}

/// Conservative bounding box of the shape (unbounded for half-spaces and
/// complements unless intersected with something bounded).
inline Aabb bounding_box(const ShapeNode& node) {
  return std::visit(
      [&](const auto& n) -> Aabb {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ShapeNode::EllipsoidPrim>) {
          const Vec3 r(n.shape.a, n.shape.b, n.shape.c);
          return Aabb{n.offset - r, n.offset + r, true};
        } else if constexpr (std::is_same_v<T, ShapeNode::PolyhedronPrim>) {
          Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
          Vec3 hi = -lo;
          for (const Vec3& v : n.shape->vertices()) {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
          }
          const double eps = n.shape->rounding();
          return Aabb{lo - Vec3::Constant(eps), hi + Vec3::Constant(eps), true};
        } else if constexpr (std::is_same_v<T, ShapeNode::HalfSpace>) {
          return Aabb{};
        } else if constexpr (std::is_same_v<T, ShapeNode::Union>) {
          const Aabb a = bounding_box(*n.left), b = bounding_box(*n.right);
          if (!a.bounded || !b.bounded) return Aabb{};
          return Aabb{a.lo.cwiseMin(b.lo), a.hi.cwiseMax(b.hi), true};
        } else if constexpr (std::is_same_v<T, ShapeNode::Intersection>) {
          const Aabb a = bounding_box(*n.left), b = bounding_box(*n.right);
          if (a.bounded && b.bounded)
            return Aabb{a.lo.cwiseMax(b.lo), a.hi.cwiseMin(b.hi), true};
          if (a.bounded) return a;
          if (b.bounded) return b;
          return Aabb{};
        } else {
          return Aabb{};
        }
      },
      node.payload());
}

// ---------------------------------------------------------------------------
// Inertia
// ---------------------------------------------------------------------------

/// Solid uniform ellipsoid: J = (m/5) diag(b^2+c^2, a^2+c^2, a^2+b^2).
inline Mat3 inertia_ellipsoid(double m, double a, double b, double c) {
  if (!(m > 0.0 && a > 0.0 && b > 0.0 && c > 0.0)) {
    throw std::invalid_argument("inertia_ellipsoid: all arguments must be positive");
  }
  return Vec3(m / 5.0 * (b * b + c * c), m / 5.0 * (a * a + c * c),
              m / 5.0 * (a * a + b * b))
      .asDiagonal();
}

/// Solid uniform cube: J = (m s^2 / 6) I.
inline Mat3 inertia_cube(double m, double s) {
  if (!(m > 0.0 && s > 0.0)) {
    throw std::invalid_argument("inertia_cube: all arguments must be positive");
  }
  return (m * s * s / 6.0) * Mat3::Identity();
}

/// J_d = (1/2) tr(J) I - J.
inline Mat3 jd_from_j(const Mat3& j) {
  if (!is_symmetric(j)) throw std::invalid_argument("jd_from_j: J must be symmetric");
  return 0.5 * j.trace() * Mat3::Identity() - j;
}

/// J = tr(J_d) I - J_d.
inline Mat3 j_from_jd(const Mat3& jd) {
  if (!is_symmetric(jd)) throw std::invalid_argument("j_from_jd: J_d must be symmetric");
  return jd.trace() * Mat3::Identity() - jd;
}

/// Both sides of the identity S(J w) = S(w) J_d + J_d S(w), exposed as a
/// checkable pair. The pair (J, J_d) must be consistent.
inline std::pair<Mat3, Mat3> identity_sj(const Mat3& j, const Mat3& jd, const Vec3& omega) {
  if ((jd_from_j(j) - jd).norm() > 1e-12 * std::max(1.0, j.norm())) {
    throw std::invalid_argument("identity_sj: J and J_d are not related by the trace identity");
  }
  const Mat3 lhs = skew(j * omega);
  const Mat3 s = skew(omega);
  const Mat3 rhs = s * jd + jd * s;
  return {lhs, rhs};
}

/// Centroid and standard inertia of a uniform solid classified by the sign
/// of sdf_eval, sampled on a stratified midpoint grid over the bounding box.
struct QuadratureResult {
  Mat3 inertia = Mat3::Zero();  // about the origin, total mass as requested
  Vec3 centroid = Vec3::Zero();
  double fill_fraction = 0.0;  // inside samples / total samples
};

inline QuadratureResult inertia_quadrature(const ShapeNode& node, double m, int resolution) {
  if (!(m > 0.0)) throw std::invalid_argument("inertia_quadrature: mass must be positive");
  if (resolution < 32) throw std::invalid_argument("inertia_quadrature: resolution must be >= 32");
  const Aabb box = bounding_box(node);
  if (!box.bounded) throw std::invalid_argument("inertia_quadrature: shape is unbounded");

  const Vec3 extent = box.hi - box.lo;
  const Vec3 cell = extent / static_cast<double>(resolution);
  std::int64_t inside = 0;
  Vec3 first = Vec3::Zero();
  Mat3 second = Mat3::Zero();
  for (int i = 0; i < resolution; ++i) {
    const double x = box.lo.x() + (i + 0.5) * cell.x();
    for (int j = 0; j < resolution; ++j) {
      const double y = box.lo.y() + (j + 0.5) * cell.y();
      for (int k = 0; k < resolution; ++k) {
        const Vec3 z(x, y, box.lo.z() + (k + 0.5) * cell.z());
        if (sdf_eval(node, z) <= 0.0) {
          ++inside;
          first += z;
          second += z * z.transpose();
        }
      }
    }
  }
  if (inside == 0) throw std::runtime_error("inertia_quadrature: no interior samples");

  QuadratureResult out;
  const double w = m / static_cast<double>(inside);
  out.centroid = first / static_cast<double>(inside);
  out.inertia = w * (second.trace() * Mat3::Identity() - second);
  out.fill_fraction = static_cast<double>(inside) /
                      (static_cast<double>(resolution) * resolution * resolution);
  return out;
}

/// Standard inertia for a uniform composite body, validated to be centered at
/// the origin. Errors on unbounded shapes and off-origin centroids.
inline Mat3 inertia_composite(const ShapeNode& node, double m, int resolution) {
  const QuadratureResult q = inertia_quadrature(node, m, resolution);
  const Aabb box = bounding_box(node);
  const double bound_radius = std::max(box.lo.norm(), box.hi.norm());
  if (q.centroid.norm() > config::centroid_rel_tol * bound_radius) {
    throw std::invalid_argument("inertia_composite: centroid is off the origin by " +
                                std::to_string(q.centroid.norm()));
  }
  return q.inertia;
}

// ---------------------------------------------------------------------------
// Rigid body
// ---------------------------------------------------------------------------

/// Mass, the standard/nonstandard inertia pair, and the shape. J and J_d are
/// kept together because every discrete map needs both.
class RigidBody {
 public:
  RigidBody(double mass, const Mat3& inertia, ShapeNode shape, bool validate_shape_centroid = true)
      : mass_(mass), j_(inertia), shape_(std::move(shape)) {
    if (!(mass_ > 0.0)) throw std::invalid_argument("RigidBody: mass must be positive");
    if (!is_symmetric(j_)) throw std::invalid_argument("RigidBody: J must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> es(j_);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw std::invalid_argument("RigidBody: J must be positive definite");
    }
    jd_ = jd_from_j(j_);
    j_inv_ = j_.inverse();
    if (validate_shape_centroid) check_centroid();
  }

  double mass() const { return mass_; }
  const Mat3& inertia() const { return j_; }
  const Mat3& inertia_nonstandard() const { return jd_; }
  const Mat3& inertia_inverse() const { return j_inv_; }
  const ShapeNode& shape() const { return shape_; }

  static RigidBody make_ellipsoid(double mass, double a, double b, double c) {
    return RigidBody(mass, inertia_ellipsoid(mass, a, b, c),
                     ShapeNode::ellipsoid(Ellipsoid(a, b, c)));
  }

  static RigidBody make_sphere(double mass, double radius) {
    return make_ellipsoid(mass, radius, radius, radius);
  }

  static RigidBody make_cube(double mass, double side, double rounding) {
    return RigidBody(mass, inertia_cube(mass, side),
                     ShapeNode::polyhedron(ConvexPolyhedron::cube(side, rounding)));
  }

 private:
  void check_centroid() {
    const bool composite =
        std::holds_alternative<ShapeNode::Union>(shape_.payload()) ||
        std::holds_alternative<ShapeNode::Intersection>(shape_.payload());
    if (composite) {
      // Coarse quadrature centroid check; inertia_composite revalidates at
      // its own resolution when it is the one computing J.
      const QuadratureResult q = inertia_quadrature(shape_, mass_, 64);
      const Aabb box = bounding_box(shape_);
      const double bound_radius = std::max(box.lo.norm(), box.hi.norm());
      if (q.centroid.norm() > config::centroid_rel_tol * bound_radius) {
        throw std::invalid_argument("RigidBody: composite shape centroid is off the origin");
      }
    } else if (const auto* e = std::get_if<ShapeNode::EllipsoidPrim>(&shape_.payload())) {
      if (e->offset.norm() > 1e-9) {
        throw std::invalid_argument("RigidBody: primitive ellipsoid must be centered");
      }
    }
    // Polyhedra validate their own centroid at construction.
  }

  double mass_;
  Mat3 j_, jd_, j_inv_;
  ShapeNode shape_;
};

}  // namespace lgvci
