#include <lgvci/scenario.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "test_support.hpp"

using namespace lgvci;

#ifndef LGVCI_SOURCE_DIR
#define LGVCI_SOURCE_DIR "."
#endif

namespace {
std::string scenario_path(const char* name) {
  return std::string(LGVCI_SOURCE_DIR) + "/scenarios/" + name;
}
}  // namespace

TEST_CASE("case1 scenario loads with the tabulated parameters") {
  const Scenario sc = load_scenario_file(scenario_path("case1.json"));
  CHECK(sc.kind == Scenario::BodyKind::Ellipsoid);
  CHECK(sc.a == 2.0);
  CHECK(sc.b == 3.0);
  CHECK(sc.c == 4.0);
  CHECK(sc.mass == 1.0);
  CHECK(sc.h == 0.01);
  CHECK((sc.x0 - Vec3(0, 0, 10)).norm() == 0.0);
  CHECK((sc.gamma0 - Vec3(2, 2, 10)).norm() == 0.0);
  CHECK((sc.Pi0 - Vec3(4, -4, 4)).norm() == 0.0);
  CHECK((sc.R0 - Mat3::Identity()).norm() == 0.0);

  const CompiledScenario cs = compile_scenario(sc);
  CHECK((cs.world.body.inertia() - Mat3(Vec3(5, 4, 2.6).asDiagonal())).norm() < 1e-15);
  CHECK(cs.solver.eps_tol == 1e-15);
  CHECK(cs.solver.retraction == Retraction::Exp);
}

TEST_CASE("case2 scenario builds the tilted plane from the tilt angle") {
  const Scenario sc = load_scenario_file(scenario_path("case2.json"));
  REQUIRE(sc.tilt_deg.has_value());
  const CompiledScenario cs = compile_scenario(sc);
  const double theta = -M_PI / 90.0;
  CHECK(cs.world.plane.normal.x() == Catch::Approx(std::sin(theta)).margin(1e-16));
  CHECK(cs.world.plane.normal.z() == Catch::Approx(std::cos(theta)).margin(1e-16));
}

TEST_CASE("case4 scenario loads the rounded cube") {
  const Scenario sc = load_scenario_file(scenario_path("case4.json"));
  CHECK(sc.kind == Scenario::BodyKind::Cube);
  CHECK(sc.rounding == 1e-13);
  const CompiledScenario cs = compile_scenario(sc);
  CHECK((cs.world.body.inertia() - 2.0 * Mat3::Identity()).norm() < 1e-14);
}

TEST_CASE("inadmissible initial states are rejected at load") {
  const std::string text = R"({
    "schema_version": 1,
    "name": "bad",
    "body": {"type": "ellipsoid", "a": 2, "b": 3, "c": 4},
    "mass": 1.0,
    "plane": {"normal": [0, 0, 1]},
    "initial": {"x": [0, 0, 1], "gamma": [0, 0, 0], "Pi": [0, 0, 0]},
    "sim": {"h": 0.01, "M": 10}
  })";
  CHECK_THROWS_AS(load_scenario(text), std::invalid_argument);
}

TEST_CASE("schema violations are rejected") {
  CHECK_THROWS_AS(load_scenario("{}"), std::invalid_argument);
  CHECK_THROWS_AS(load_scenario("not json"), std::invalid_argument);
  const std::string wrong_version = R"({"schema_version": 99})";
  CHECK_THROWS_AS(load_scenario(wrong_version), std::invalid_argument);
}

TEST_CASE("scenario write/load round trip preserves every field") {
  for (const char* name : {"case1.json", "case2.json", "case3.json", "case4.json"}) {
    const Scenario sc = load_scenario_file(scenario_path(name));
    const Scenario rt = load_scenario(write_scenario(sc));
    CHECK(rt.name == sc.name);
    CHECK(rt.kind == sc.kind);
    CHECK(rt.a == sc.a);
    CHECK(rt.b == sc.b);
    CHECK(rt.c == sc.c);
    CHECK(rt.side == sc.side);
    CHECK(rt.rounding == sc.rounding);
    CHECK(rt.mass == sc.mass);
    CHECK(rt.gravity == sc.gravity);
    CHECK(rt.inertia_override.has_value() == sc.inertia_override.has_value());
    if (sc.inertia_override) CHECK((*rt.inertia_override - *sc.inertia_override).norm() == 0.0);
    CHECK(rt.tilt_deg == sc.tilt_deg);
    CHECK((rt.x0 - sc.x0).norm() == 0.0);
    CHECK((rt.gamma0 - sc.gamma0).norm() == 0.0);
    CHECK((rt.Pi0 - sc.Pi0).norm() == 0.0);
    CHECK((rt.R0 - sc.R0).norm() == 0.0);
    CHECK(rt.h == sc.h);
    CHECK(rt.steps == sc.steps);
    CHECK(rt.eps_tol == sc.eps_tol);
    CHECK(rt.retraction == sc.retraction);
    REQUIRE(rt.parts.size() == sc.parts.size());
    for (std::size_t i = 0; i < sc.parts.size(); ++i) {
      CHECK(rt.parts[i].a == sc.parts[i].a);
      CHECK((rt.parts[i].offset - sc.parts[i].offset).norm() == 0.0);
    }
  }
}

TEST_CASE("trajectory files round-trip and the energy column re-evaluates") {
  const Scenario sc = load_scenario_file(scenario_path("sphere_drop.json"));
  CompiledScenario cs = compile_scenario(sc);
  SimConfig sim = cs.sim;
  sim.steps = 200;
  const Trajectory traj = run(cs.initial, cs.world, sim, cs.solver);

  std::ostringstream os;
  write_trajectory(traj, cs.world, os);
  std::istringstream is(os.str());
  const TrajectoryData data = read_trajectory(is);

  REQUIRE(data.rows.size() == traj.samples.size());
  CHECK(data.meta.mass == cs.world.body.mass());
  CHECK(data.meta.gravity == cs.world.gravity);
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const TrajectoryRow& row = data.rows[i];
    CHECK(row.t == traj.samples[i].t);
    // Recompute the energy from the parsed state; it must match the stored
    // column to full precision.
    const double e = energy(row.state, cs.world);
    CHECK(std::abs(e - row.energy) <= 1e-15 * std::max(1.0, std::abs(row.energy)));
  }
}

TEST_CASE("trajectory bytes are identical across repeated runs") {
  const Scenario sc = load_scenario_file(scenario_path("case1.json"));
  CompiledScenario cs = compile_scenario(sc);
  SimConfig sim = cs.sim;
  sim.steps = 300;
  std::ostringstream a, b;
  write_trajectory(run(cs.initial, cs.world, sim, cs.solver), cs.world, a);
  write_trajectory(run(cs.initial, cs.world, sim, cs.solver), cs.world, b);
  CHECK(a.str() == b.str());
}

TEST_CASE("events file carries the bounce sequence") {
  const Scenario sc = load_scenario_file(scenario_path("sphere_drop.json"));
  CompiledScenario cs = compile_scenario(sc);
  const Trajectory traj = run(cs.initial, cs.world, cs.sim, cs.solver);

  std::ostringstream os;
  write_events(traj, cs.world, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,alpha,alpha_tot,lambda,grazing,energy_pre,energy_post");

  const double t_star = std::sqrt(2.0 / 9.80665);
  int k = 0;
  while (std::getline(is, line) && k < 3) {
    const double t = std::stod(line.substr(0, line.find(',')));
    CHECK(std::abs(t - (2 * k + 1) * t_star) < 1e-9);
    ++k;
  }
  CHECK(k == 3);

  // Free fall: header only.
  WorldParams far(9.80665, Plane::horizontal(), RigidBody::make_sphere(1.0, 1.0));
  State high;
  high.x = Vec3(0, 0, 100);
  const Trajectory quiet = run(high, far, SimConfig(0.01, 50), SolverConfig{});
  std::ostringstream empty_os;
  write_events(quiet, far, empty_os);
  CHECK(empty_os.str() == "t,alpha,alpha_tot,lambda,grazing,energy_pre,energy_post\n");
}

TEST_CASE("intersection bodies load and simulate") {
  const std::string text = R"({
    "schema_version": 1,
    "name": "lens",
    "body": {
      "type": "intersection_of_ellipsoids",
      "parts": [
        {"a": 2, "b": 2, "c": 2, "offset": [0, 0, 1]},
        {"a": 2, "b": 2, "c": 2, "offset": [0, 0, -1]}
      ]
    },
    "mass": 1.0,
    "inertia_resolution": 64,
    "plane": {"normal": [0, 0, 1]},
    "initial": {"x": [0, 0, 6], "gamma": [0, 0, 2], "Pi": [0, 0, 1]},
    "sim": {"h": 0.01, "M": 50}
  })";
  const Scenario sc = load_scenario(text);
  CHECK(sc.kind == Scenario::BodyKind::IntersectionOfEllipsoids);
  const CompiledScenario cs = compile_scenario(sc);
  // Quadrature inertia of the symmetric lens is diagonal with Jxx = Jyy.
  const Mat3& j = cs.world.body.inertia();
  CHECK(j(0, 0) == Catch::Approx(j(1, 1)).epsilon(1e-2));
  CHECK(std::abs(j(0, 1)) < 1e-3 * j(0, 0));
  const Trajectory traj = run(cs.initial, cs.world, cs.sim, cs.solver);
  CHECK(traj.termination == Termination::Completed);
}

TEST_CASE("impacts exchange translational-potential and rotational energy") {
  const Scenario sc = load_scenario_file(scenario_path("case1.json"));
  CompiledScenario cs = compile_scenario(sc);
  const Trajectory traj = run(cs.initial, cs.world, cs.sim, cs.solver);
  REQUIRE(traj.events.size() >= 1);
  const double e0 = energy(cs.initial, cs.world);
  for (const CollisionEvent& ev : traj.events) {
    const double d_tpe = translational_potential_energy(ev.state_plus, cs.world) -
                         translational_potential_energy(ev.state_minus, cs.world);
    const double d_re = rotational_energy(ev.state_plus, cs.world) -
                        rotational_energy(ev.state_minus, cs.world);
    // The jumps in the two traces cancel: the transfer conserves the total.
    CHECK(std::abs(d_tpe + d_re) < 1e-10 * std::abs(e0));
    CHECK(std::abs(d_re) > 0.0);  // the triaxial body really does exchange energy
  }
}

TEST_CASE("energy plot is a standalone SVG") {
  const Scenario sc = load_scenario_file(scenario_path("case1.json"));
  CompiledScenario cs = compile_scenario(sc);
  SimConfig sim = cs.sim;
  sim.steps = 400;
  const Trajectory traj = run(cs.initial, cs.world, sim, cs.solver);
  const std::string svg = render_energy_svg(traj, cs.world);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);

  // A single-sample trajectory still renders.
  Trajectory tiny;
  tiny.samples.push_back(Sample{0.0, 0.0, cs.initial, SampleKind::Grid});
  CHECK_NOTHROW(render_energy_svg(tiny, cs.world));

  // Without gravity and away from the plane the rotational trace is flat.
  WorldParams free_world(0.0, Plane::horizontal(), RigidBody::make_ellipsoid(1.0, 2, 3, 4));
  State s;
  s.x = Vec3(0, 0, 10);
  s.Pi = Vec3(4, -4, 4);
  const Trajectory free_traj = run(s, free_world, SimConfig(0.01, 200), SolverConfig{});
  const double re0 = rotational_energy(free_traj.samples.front().state, free_world);
  for (const Sample& smp : free_traj.samples) {
    CHECK(std::abs(rotational_energy(smp.state, free_world) - re0) < 1e-12 * re0);
  }
}
