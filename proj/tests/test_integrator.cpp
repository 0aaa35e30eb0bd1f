#include <lgvci/integrator.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace lgvci;
using lgvci::testing::make_rng;
using lgvci::testing::random_rotation;
using lgvci::testing::random_spd;
using lgvci::testing::random_unit;
using lgvci::testing::random_vec;
using lgvci::testing::uniform;

namespace {

WorldParams case1_world() {
  return WorldParams(9.80665, Plane::horizontal(), RigidBody::make_ellipsoid(1.0, 2, 3, 4));
}

State case1_initial() {
  State s;
  s.x = Vec3(0, 0, 10);
  s.gamma = Vec3(2, 2, 10);
  s.Pi = Vec3(4, -4, 4);
  return s;
}

double state_error(const State& a, const State& b) {
  return (a.x - b.x).norm() + (a.R.matrix() - b.R.matrix()).norm() +
         (a.gamma - b.gamma).norm() + (a.Pi - b.Pi).norm();
}

double matrix_residual(const Vec3& g, const Mat3& jd, const Rotation& f) {
  return (asym(f.matrix() * jd) - skew(g)).norm();
}

}  // namespace

TEST_CASE("solve_relative_rotation basics") {
  const RigidBody body = RigidBody::make_ellipsoid(1.0, 2, 3, 4);
  const SolverConfig cfg;

  CHECK((solve_relative_rotation(Vec3::Zero(), body, cfg).matrix() - Mat3::Identity())
            .norm() < 1e-15);

  // Isotropic inertia: the solution reduces to f = arcsin(|g|/j) ghat.
  const RigidBody ball(1.0, 0.8 * Mat3::Identity(), ShapeNode::ellipsoid(Ellipsoid(1, 1, 1)));
  auto rng = make_rng(40);
  for (int i = 0; i < 20; ++i) {
    const Vec3 g = uniform(rng, 1e-4, 0.07) * random_unit(rng);
    const Rotation f = solve_relative_rotation(g, ball, cfg);
    const Vec3 f_expected = std::asin(g.norm() / 0.8) * g.normalized();
    CHECK((f.matrix() - exp_so3(f_expected).matrix()).norm() < 1e-12);
  }

  // Case I body at the working step size: residual at tolerance, both
  // retractions agree.
  const Vec3 g = 0.01 * Vec3(4, -4, 4);
  SolverConfig exp_cfg, cay_cfg;
  cay_cfg.retraction = Retraction::Cayley;
  const Rotation fe = solve_relative_rotation(g, body, exp_cfg);
  const Rotation fc = solve_relative_rotation(g, body, cay_cfg);
  CHECK(matrix_residual(g, body.inertia_nonstandard(), fe) < 1e-13);
  CHECK(matrix_residual(g, body.inertia_nonstandard(), fc) < 1e-13);
  CHECK((fe.matrix() - fc.matrix()).norm() < 1e-10);
}

TEST_CASE("newton converges fast within the working range") {
  auto rng = make_rng(41);
  const SolverConfig cfg;
  for (int i = 0; i < 200; ++i) {
    const Mat3 j = random_spd(rng, 0.5, 5.0);
    const double lam_min = Eigen::SelfAdjointEigenSolver<Mat3>(j).eigenvalues().minCoeff();
    const Vec3 g = uniform(rng, 0.0, 0.1 * lam_min) * random_unit(rng);
    Vec3 f;
    int iters = 0;
    REQUIRE(detail::newton_solve(j, g, Retraction::Exp, cfg, f, &iters));
    CHECK(iters <= 6);
  }
}

TEST_CASE("discrete_flow translational update is exact ballistic flight") {
  const WorldParams w = case1_world();
  const SolverConfig cfg;
  State s = case1_initial();
  const State next = discrete_flow(s, 0.01, w, cfg);
  CHECK(next.x.x() == Catch::Approx(0.02).margin(1e-16));
  CHECK(next.x.y() == Catch::Approx(0.02).margin(1e-16));
  CHECK(next.x.z() == Catch::Approx(10.0 + 0.1 - 0.5 * 9.80665 * 1e-4).margin(1e-14));
  CHECK(next.gamma.x() == 2.0);
  CHECK(next.gamma.y() == 2.0);
  CHECK(next.gamma.z() == Catch::Approx(10.0 - 0.0980665).margin(1e-16));
}

TEST_CASE("discrete_flow leaves the attitude alone when Pi = 0") {
  const WorldParams w = case1_world();
  State s = case1_initial();
  s.Pi = Vec3::Zero();
  const State next = discrete_flow(s, 0.01, w, SolverConfig{});
  CHECK((next.R.matrix() - s.R.matrix()).norm() < 1e-15);
}

TEST_CASE("discrete_flow conserves momentum magnitudes and spatial momentum") {
  WorldParams w(0.0, Plane::horizontal(), RigidBody::make_ellipsoid(1.0, 2, 3, 4));
  const SolverConfig cfg;
  State s = case1_initial();
  s.gamma = Vec3::Zero();
  const Vec3 x0 = s.x;
  const Vec3 spatial0 = s.R.matrix() * s.Pi;
  const double pi_norm0 = s.Pi.norm();
  for (int i = 0; i < 10000; ++i) s = discrete_flow(s, 0.01, w, cfg);
  CHECK((s.x - x0).norm() < 1e-12);
  CHECK(std::abs(s.Pi.norm() - pi_norm0) < 1e-12 * pi_norm0);
  CHECK((s.R.matrix() * s.Pi - spatial0).norm() < 1e-12 * spatial0.norm());
  CHECK(s.R.orthogonality_defect() < 1e-12);
}

TEST_CASE("jump reflects a sphere specularly") {
  WorldParams w(9.80665, Plane::horizontal(), RigidBody::make_sphere(1.0, 1.0));
  State s;
  s.x = Vec3(0, 0, 1.0);
  s.gamma = Vec3(2, 2, -10);
  const ContactGeometry cg = phi_general(pose_of(s), w.body, w.plane);
  const JumpResult jr = jump(s, cg, w);
  CHECK(jr.lambda == Catch::Approx(20.0));
  CHECK((jr.plus.gamma - Vec3(2, 2, 10)).norm() < 1e-12);
  CHECK((jr.plus.Pi - s.Pi).norm() < 1e-12);
}

TEST_CASE("tangential contact is reported as grazing") {
  WorldParams w(9.80665, Plane::horizontal(), RigidBody::make_sphere(1.0, 1.0));
  State s;
  s.x = Vec3(0, 0, 1.0);
  s.gamma = Vec3(2, 0, 0);
  const ContactGeometry cg = phi_general(pose_of(s), w.body, w.plane);
  CHECK_THROWS_AS(jump(s, cg, w), GrazingContact);
}

TEST_CASE("jump satisfies all three conditions on random impact attitudes") {
  const WorldParams w = case1_world();
  auto rng = make_rng(42);
  const Ellipsoid e(2, 3, 4);
  int accepted = 0;
  for (int i = 0; i < 300 && accepted < 100; ++i) {
    State s;
    s.R = random_rotation(rng);
    const double reach = (e.semiaxis_matrix() * (s.R.matrix().transpose() * w.plane.normal)).norm();
    s.x = Vec3(uniform(rng, -2, 2), uniform(rng, -2, 2), reach);
    s.gamma = random_vec(rng, 8.0);
    s.gamma.z() = -std::abs(s.gamma.z()) - 1.0;
    s.Pi = random_vec(rng, 6.0);

    const ContactGeometry cg = phi_general(pose_of(s), w.body, w.plane);
    REQUIRE(std::abs(cg.phi) < 1e-12);
    // Keep only genuinely approaching contact states; a separating state on
    // the contact set is not an impact.
    const double approach = s.gamma.dot(cg.dphi_dx) / w.body.mass() +
                            cg.chi.dot(w.body.inertia_inverse() * s.Pi);
    if (approach > -0.1) continue;
    JumpResult jr;
    try {
      jr = jump(s, cg, w);
    } catch (const GrazingContact&) {
      continue;
    }
    ++accepted;
    CHECK(jr.lambda != 0.0);
    const double pscale = 1.0 + s.gamma.norm() + s.Pi.norm();
    CHECK((jr.plus.gamma - s.gamma - jr.lambda * cg.dphi_dx).norm() < 1e-13 * pscale);
    CHECK((jr.plus.Pi - s.Pi - jr.lambda * cg.chi).norm() < 1e-13 * pscale);
    const double e_minus = energy(s, w);
    const double e_plus = energy(jr.plus, w);
    CHECK(std::abs(e_plus - e_minus) <= 1e-10 * std::abs(e_minus));

    // The post-impact motion must open the gap.
    const double phi_rate = jr.plus.gamma.dot(cg.dphi_dx) / w.body.mass() +
                            cg.chi.dot(w.body.inertia_inverse() * jr.plus.Pi);
    CHECK(phi_rate >= 0.0);
  }
  CHECK(accepted == 100);
}

TEST_CASE("energy values") {
  const WorldParams w = case1_world();
  State rest;
  rest.x = Vec3::Zero();
  CHECK(energy(rest, w) == 0.0);

  CHECK(energy(case1_initial(), w) == Catch::Approx(158.74342307692308).epsilon(1e-14));

  // Pure free fall conserves the energy of the discrete flow exactly.
  State s;
  s.x = Vec3(0, 0, 50);
  s.gamma = Vec3(1, -2, 3);
  const double e0 = energy(s, w);
  for (int i = 0; i < 1000; ++i) {
    s = discrete_flow(s, 0.01, w, SolverConfig{});
  }
  CHECK(std::abs(energy(s, w) - e0) < 1e-12 * std::abs(e0));
}

TEST_CASE("discrete energy of a static pair is the potential") {
  const WorldParams w = case1_world();
  Pose q;
  q.position = Vec3(0.5, -1.0, 3.0);
  CHECK(discrete_energy(q, q, 0.01, w) ==
        Catch::Approx(1.0 * 9.80665 * 3.0).epsilon(1e-14));
}

TEST_CASE("discrete energy deviates from the energy at second order") {
  const WorldParams w = case1_world();
  const SolverConfig cfg;
  State s = case1_initial();

  const auto deviation = [&](double h) {
    const State n = discrete_flow(s, h, w, cfg);
    const State mid = discrete_flow(s, h / 2, w, cfg);
    return std::abs(discrete_energy(pose_of(s), pose_of(n), h, w) -
                    energy(mid, w));
  };
  const double d1 = deviation(0.01);
  const double d2 = deviation(0.005);
  CHECK(d1 / d2 == Catch::Approx(4.0).margin(0.6));
}

TEST_CASE("del_residual vanishes on flow triples") {
  const WorldParams w = case1_world();
  const SolverConfig cfg;

  // Static triple without gravity.
  WorldParams w0(0.0, Plane::horizontal(), RigidBody::make_ellipsoid(1.0, 2, 3, 4));
  Pose q;
  q.position = Vec3(1, 2, 3);
  const auto [t0, r0] = del_residual(q, q, q, 0.01, 0.01, w0);
  CHECK(t0.norm() == 0.0);
  CHECK(r0.norm() == 0.0);

  // Triples generated by the discrete flow.
  auto rng = make_rng(43);
  for (int i = 0; i < 20; ++i) {
    State s = case1_initial();
    s.R = random_rotation(rng);
    s.Pi = random_vec(rng, 6.0);
    const double h1 = uniform(rng, 0.002, 0.02);
    const double h2 = uniform(rng, 0.002, 0.02);
    const State s1 = discrete_flow(s, h1, w, cfg);
    const State s2 = discrete_flow(s1, h2, w, cfg);
    const auto [rt, rr] =
        del_residual(pose_of(s), pose_of(s1), pose_of(s2), h1, h2, w);
    CHECK(rt.norm() < 1e-10);
    CHECK(rr.norm() < 1e-10);
  }
}

TEST_CASE("del_residual responds linearly to a position perturbation") {
  const WorldParams w = case1_world();
  const SolverConfig cfg;
  State s = case1_initial();
  const double h1 = 0.01, h2 = 0.004;
  const State s1 = discrete_flow(s, h1, w, cfg);
  const State s2 = discrete_flow(s1, h2, w, cfg);
  Pose mid = pose_of(s1);
  mid.position += Vec3(1e-3, 0, 0);
  const auto [rt, rr] = del_residual(pose_of(s), mid, pose_of(s2), h1, h2, w);
  (void)rr;
  const double expected = 1.0 * 1e-3 * (1.0 / h1 + 1.0 / h2);
  CHECK(rt.norm() == Catch::Approx(expected).epsilon(1e-6));
}

TEST_CASE("continuous reference: straight-line motion and free-body invariants") {
  WorldParams w(0.0, Plane::horizontal(), RigidBody::make_ellipsoid(1.0, 2, 3, 4));
  State s;
  s.x = Vec3(1, 2, 3);
  s.gamma = Vec3(0.5, -0.25, 1.0);
  const State out = continuous_reference(s, 2.0, w, 100);
  CHECK((out.x - (s.x + 2.0 * s.gamma)).norm() < 1e-13);

  State spin = case1_initial();
  WorldParams wg(9.80665, Plane::horizontal(), RigidBody::make_ellipsoid(1.0, 2, 3, 4));
  const State ref = continuous_reference(spin, 1.0, wg, 10000);
  CHECK(std::abs(ref.Pi.norm() - spin.Pi.norm()) < 1e-10);
  CHECK(std::abs(rotational_energy(ref, wg) - rotational_energy(spin, wg)) < 1e-10);

  CHECK_THROWS_AS(continuous_reference(s, 1.0, w, 0), std::invalid_argument);
}

TEST_CASE("discrete flow converges to the smooth flow at second order") {
  const WorldParams w = case1_world();
  const SolverConfig cfg;
  const State s0 = case1_initial();
  const double horizon = 0.5;
  const State ref = continuous_reference(s0, horizon, w, 20000);

  std::vector<double> errors;
  for (double h : {0.01, 0.005, 0.0025}) {
    State s = s0;
    const int n = static_cast<int>(std::round(horizon / h));
    for (int i = 0; i < n; ++i) s = discrete_flow(s, h, w, cfg);
    errors.push_back(state_error(s, ref));
  }
  const double order1 = std::log2(errors[0] / errors[1]);
  const double order2 = std::log2(errors[1] / errors[2]);
  CHECK(order1 >= 1.9);
  CHECK(order2 >= 1.9);
}
