#include <lgvci/body.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace lgvci;
using lgvci::testing::make_rng;
using lgvci::testing::random_spd;
using lgvci::testing::random_vec;
using lgvci::testing::uniform;

namespace {

// Case III geometry: two overlapping ellipsoids shifted so the union's
// centroid sits at the origin.
ShapeNode case3_union() {
  const Vec3 shift(-0.9937128, 0.0, 0.0);
  return ShapeNode::csg_union(
      ShapeNode::ellipsoid(Ellipsoid(3, 4, 5), Vec3(1.5, 0, 0) + shift),
      ShapeNode::ellipsoid(Ellipsoid(6, 1, 1), Vec3(-4.5, 0, 0) + shift));
}

double rel_err(const Mat3& got, const Mat3& want) {
  return (got - want).norm() / want.norm();
}

}  // namespace

TEST_CASE("inertia_ellipsoid closed form") {
  CHECK(rel_err(inertia_ellipsoid(1, 2, 3, 4), Vec3(5, 4, 2.6).asDiagonal()) < 1e-15);
  CHECK(rel_err(inertia_ellipsoid(1, 1, 1, 1), (0.4 * Mat3::Identity()).eval()) < 1e-15);
  CHECK(rel_err(inertia_ellipsoid(2, 2, 3, 4), Vec3(10, 8, 5.2).asDiagonal()) < 1e-15);
  CHECK_THROWS_AS(inertia_ellipsoid(-1, 2, 3, 4), std::invalid_argument);
  CHECK_THROWS_AS(inertia_ellipsoid(1, 0, 3, 4), std::invalid_argument);
}

TEST_CASE("inertia_cube closed form") {
  CHECK(rel_err(inertia_cube(1, 2 * std::sqrt(3.0)), (2.0 * Mat3::Identity()).eval()) < 1e-15);
  CHECK(rel_err(inertia_cube(1, 1), (Mat3::Identity() / 6.0).eval()) < 1e-15);
  CHECK(rel_err(inertia_cube(3, 1), (0.5 * Mat3::Identity()).eval()) < 1e-15);
  CHECK_THROWS_AS(inertia_cube(1, -2), std::invalid_argument);
}

TEST_CASE("jd_from_j and j_from_jd") {
  const Mat3 jd = jd_from_j(Vec3(5, 4, 2.6).asDiagonal());
  CHECK(rel_err(jd, Vec3(0.8, 1.8, 3.2).asDiagonal()) < 1e-15);

  CHECK(rel_err(jd_from_j((0.4 * Mat3::Identity()).eval()), (0.2 * Mat3::Identity()).eval()) <
        1e-15);

  auto rng = make_rng(11);
  for (int i = 0; i < 20; ++i) {
    const Mat3 j = random_spd(rng);
    CHECK((j_from_jd(jd_from_j(j)) - j).norm() < 1e-13);
    CHECK((jd_from_j(j) - jd_from_j(j).transpose()).norm() < 1e-14);
  }

  Mat3 asymmetric = Mat3::Identity();
  asymmetric(0, 1) = 0.5;
  CHECK_THROWS_AS(jd_from_j(asymmetric), std::invalid_argument);
  CHECK_THROWS_AS(j_from_jd(asymmetric), std::invalid_argument);
}

TEST_CASE("identity S(J w) = S(w) Jd + Jd S(w)") {
  const Mat3 j_sphere = 0.4 * Mat3::Identity();
  const Mat3 jd_sphere = jd_from_j(j_sphere);

  auto [l0, r0] = identity_sj(j_sphere, jd_sphere, Vec3::Zero());
  CHECK(l0.isZero(0.0));
  CHECK(r0.isZero(0.0));

  auto [l1, r1] = identity_sj(j_sphere, jd_sphere, Vec3::UnitX());
  CHECK((l1 - skew(0.4 * Vec3::UnitX())).norm() < 1e-15);
  CHECK((l1 - r1).norm() < 1e-15);

  auto rng = make_rng(12);
  for (int i = 0; i < 30; ++i) {
    const Mat3 j = random_spd(rng);
    const Vec3 omega = random_vec(rng, 4.0);
    auto [lhs, rhs] = identity_sj(j, jd_from_j(j), omega);
    CHECK((lhs - rhs).norm() < 1e-12 * std::max(1.0, lhs.norm()));
  }

  CHECK_THROWS_AS(identity_sj(j_sphere, j_sphere, Vec3::UnitX()), std::invalid_argument);
}

TEST_CASE("rotational kinetic energy in both inertia representations") {
  auto rng = make_rng(13);
  for (int i = 0; i < 30; ++i) {
    const Mat3 j = random_spd(rng);
    const Mat3 jd = jd_from_j(j);
    const Vec3 omega = random_vec(rng, 5.0);
    const double via_jd = 0.5 * (skew(omega) * jd * skew(omega).transpose()).trace();
    const double via_j = 0.5 * omega.dot(j * omega);
    CHECK(via_jd == Catch::Approx(via_j).epsilon(1e-12));
  }
}

TEST_CASE("sdf_eval over primitives and CSG") {
  const ShapeNode half = ShapeNode::half_space(Vec3::UnitZ(), 0.0);
  CHECK(sdf_eval(half, Vec3(0, 0, 2)) == Catch::Approx(2.0));

  const ShapeNode ball = ShapeNode::ellipsoid(Ellipsoid(1, 1, 1));
  CHECK(sdf_eval(ball, Vec3::Zero()) == Catch::Approx(-1.0));

  const ShapeNode two_balls = ShapeNode::csg_union(
      ShapeNode::ellipsoid(Ellipsoid(1, 1, 1), Vec3(1, 0, 0)),
      ShapeNode::ellipsoid(Ellipsoid(1, 1, 1), Vec3(-1, 0, 0)));
  CHECK(sdf_eval(two_balls, Vec3::Zero()) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("De Morgan consistency of CSG values") {
  const ShapeNode a = ShapeNode::ellipsoid(Ellipsoid(1.5, 1, 2), Vec3(0.5, 0, 0));
  const ShapeNode b = ShapeNode::ellipsoid(Ellipsoid(1, 2, 1), Vec3(-0.5, 0.2, 0));
  const ShapeNode lhs = ShapeNode::complement(ShapeNode::csg_union(a, b));
  const ShapeNode rhs = ShapeNode::csg_intersection(ShapeNode::complement(a),
                                                    ShapeNode::complement(b));
  auto rng = make_rng(14);
  for (int i = 0; i < 200; ++i) {
    const Vec3 z = random_vec(rng, 3.0);
    CHECK(sdf_eval(lhs, z) == Catch::Approx(sdf_eval(rhs, z)).margin(1e-15));
  }
}

TEST_CASE("sdf sign agrees with analytic membership") {
  const Ellipsoid e(2, 3, 4);
  const ShapeNode node = ShapeNode::ellipsoid(e);
  const ConvexPolyhedron cube = ConvexPolyhedron::cube(2.0, 1e-3);
  const ShapeNode cube_node = ShapeNode::polyhedron(cube);

  auto rng = make_rng(15);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 z = random_vec(rng, 5.0);
    const double lv = e.level(z);
    if (std::abs(lv - 1.0) > 1e-9) {
      CHECK((sdf_eval(node, z) < 0.0) == (lv < 1.0));
      ++checked;
    }
    // Rounded cube membership: inside iff every face plane clears -eps.
    const double m = z.cwiseAbs().maxCoeff();
    if (std::abs(m - (1.0 + 1e-3)) > 1e-9) {
      CHECK((sdf_eval(cube_node, z) < 0.0) == (m < 1.0 + 1e-3));
    }
  }
  CHECK(checked > 9000);
}

TEST_CASE("sdf_grad selects the active child") {
  const ShapeNode half = ShapeNode::half_space(Vec3::UnitZ(), 0.0);
  CHECK((sdf_grad(half, Vec3(3, -2, 7)) - Vec3::UnitZ()).norm() == 0.0);

  const ShapeNode a = ShapeNode::ellipsoid(Ellipsoid(1, 1, 1), Vec3(1, 0, 0));
  const ShapeNode b = ShapeNode::ellipsoid(Ellipsoid(1, 1, 1), Vec3(-1, 0, 0));
  const ShapeNode u = ShapeNode::csg_union(a, b);

  // Point clearly nearer ellipsoid a: gradient of a is active.
  const Vec3 z(1.2, 0.3, 0.0);
  REQUIRE(sdf_eval(a, z) < sdf_eval(b, z));
  CHECK((sdf_grad(u, z) - sdf_grad(a, z)).norm() == 0.0);

  // Equidistant point on the symmetry plane: values tie, gradients disagree.
  CHECK_THROWS_AS(sdf_grad(u, Vec3(0.0, 0.4, 0.0)), GradientUndefinedError);

  // Complement negates.
  CHECK((sdf_grad(ShapeNode::complement(a), z) + sdf_grad(a, z)).norm() == 0.0);
}

TEST_CASE("convex polyhedron construction and validation") {
  const ConvexPolyhedron cube = ConvexPolyhedron::cube(2 * std::sqrt(3.0), 1e-13);
  CHECK(cube.faces().size() == 6);
  CHECK(cube.vertices().size() == 8);

  // Tetrahedron with centroid at the origin.
  std::vector<Vec3> tet = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  CHECK_NOTHROW(ConvexPolyhedron(tet, 1e-6));

  // Off-origin hull is rejected.
  std::vector<Vec3> shifted = tet;
  for (Vec3& v : shifted) v += Vec3(0.3, 0, 0);
  CHECK_THROWS_AS(ConvexPolyhedron(shifted, 1e-6), std::invalid_argument);

  // Coplanar points are rejected.
  std::vector<Vec3> flat = {{1, 1, 0}, {1, -1, 0}, {-1, 1, 0}, {-1, -1, 0}};
  CHECK_THROWS_AS(ConvexPolyhedron(flat, 1e-6), std::invalid_argument);

  CHECK_THROWS_AS(ConvexPolyhedron(tet, 0.0), std::invalid_argument);
  std::vector<Vec3> three = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}};
  CHECK_THROWS_AS(ConvexPolyhedron(three, 1e-6), std::invalid_argument);
}

TEST_CASE("quadrature inertia matches the ellipsoid closed form") {
  const ShapeNode node = ShapeNode::ellipsoid(Ellipsoid(2, 3, 4));
  const Mat3 expected = inertia_ellipsoid(1, 2, 3, 4);
  CHECK(rel_err(inertia_composite(node, 1.0, 128), expected) < 1e-3);

  const ShapeNode ball = ShapeNode::ellipsoid(Ellipsoid(1, 1, 1));
  CHECK(rel_err(inertia_composite(ball, 1.0, 128), (0.4 * Mat3::Identity()).eval()) < 1e-3);
}

TEST_CASE("quadrature inertia converges with resolution") {
  const ShapeNode node = ShapeNode::ellipsoid(Ellipsoid(2, 3, 4));
  const Mat3 expected = inertia_ellipsoid(1, 2, 3, 4);
  const double e32 = rel_err(inertia_composite(node, 1.0, 32), expected);
  const double e128 = rel_err(inertia_composite(node, 1.0, 128), expected);
  CHECK(e128 < e32);
}

TEST_CASE("quadrature inertia of the two-ellipsoid union") {
  const Mat3 expected = Vec3(7.5932718, 9.9326434, 8.2731252).asDiagonal();
  const Mat3 got = inertia_composite(case3_union(), 1.0, 160);
  CHECK(rel_err(got, expected) < 1e-2);
}

TEST_CASE("quadrature rejects unbounded and off-center shapes") {
  CHECK_THROWS_AS(inertia_composite(ShapeNode::half_space(Vec3::UnitZ(), 0.0), 1.0, 64),
                  std::invalid_argument);
  const ShapeNode off = ShapeNode::csg_union(
      ShapeNode::ellipsoid(Ellipsoid(1, 1, 1), Vec3(2, 0, 0)),
      ShapeNode::ellipsoid(Ellipsoid(1, 1, 1), Vec3(1, 0, 0)));
  CHECK_THROWS_AS(inertia_composite(off, 1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(inertia_composite(ShapeNode::ellipsoid(Ellipsoid(1, 1, 1)), 1.0, 16),
                  std::invalid_argument);
}

TEST_CASE("rigid body invariants") {
  const RigidBody body = RigidBody::make_ellipsoid(1.0, 2, 3, 4);
  const Mat3& j = body.inertia();
  const Mat3& jd = body.inertia_nonstandard();
  CHECK((jd - (0.5 * j.trace() * Mat3::Identity() - j)).norm() < 1e-12);
  CHECK((j - (jd.trace() * Mat3::Identity() - jd)).norm() < 1e-12);

  auto rng = make_rng(16);
  for (int i = 0; i < 10; ++i) {
    const Mat3 jj = random_spd(rng, 1.0, 6.0);
    const RigidBody rb(1.0, jj, ShapeNode::ellipsoid(Ellipsoid(1, 1, 1)));
    CHECK((rb.inertia_nonstandard() - jd_from_j(jj)).norm() < 1e-13);
  }

  CHECK_THROWS_AS(RigidBody(0.0, Mat3::Identity(), ShapeNode::ellipsoid(Ellipsoid(1, 1, 1))),
                  std::invalid_argument);
  Mat3 not_pd = Mat3::Identity();
  not_pd(2, 2) = -1.0;
  CHECK_THROWS_AS(RigidBody(1.0, not_pd, ShapeNode::ellipsoid(Ellipsoid(1, 1, 1))),
                  std::invalid_argument);

  // Union bodies get a centroid check at construction.
  CHECK_NOTHROW(RigidBody(1.0, Vec3(7.5932718, 9.9326434, 8.2731252).asDiagonal(),
                          case3_union()));
  const ShapeNode off = ShapeNode::csg_union(
      ShapeNode::ellipsoid(Ellipsoid(1, 1, 1), Vec3(2, 0, 0)),
      ShapeNode::ellipsoid(Ellipsoid(1, 1, 1), Vec3(1, 0, 0)));
  CHECK_THROWS_AS(RigidBody(1.0, Mat3::Identity(), off), std::invalid_argument);
}
