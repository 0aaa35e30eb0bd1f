// Named verification suites: each acceptance-level property of the
// integrator is implemented here once, with its tolerance pinned, and is
// reused by the command-line `verify` subcommand and the acceptance runner.
#pragma once

#include <lgvci/scenario.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace lgvci::verify {

struct CheckResult {
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline std::mt19937_64 rng_for(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(seed * 0x9e3779b97f4a7c15ull + stream);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_vec(std::mt19937_64& rng, double scale) {
  return Vec3(uniform(rng, -scale, scale), uniform(rng, -scale, scale),
              uniform(rng, -scale, scale));
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  Vec3 v;
  do {
    v = random_vec(rng, 1.0);
  } while (v.norm() < 1e-3);
  return v.normalized();
}

inline Rotation random_rotation(std::mt19937_64& rng) {
  return exp_so3(uniform(rng, 0.0, M_PI * 0.999) * random_unit(rng));
}

inline Mat3 random_spd(std::mt19937_64& rng, double lo, double hi) {
  const Mat3 q = random_rotation(rng).matrix();
  const Vec3 eig(uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi));
  return q * eig.asDiagonal() * q.transpose();
}

inline ShapeNode case3_union() {
  const Vec3 shift(-0.9937128, 0.0, 0.0);
  return ShapeNode::csg_union(
      ShapeNode::ellipsoid(Ellipsoid(3, 4, 5), Vec3(1.5, 0, 0) + shift),
      ShapeNode::ellipsoid(Ellipsoid(6, 1, 1), Vec3(-4.5, 0, 0) + shift));
}

inline RigidBody case3_body() {
  return RigidBody(1.0, Vec3(7.5932718, 9.9326434, 8.2731252).asDiagonal(), case3_union());
}

inline RigidBody case4_cube() {
  return RigidBody::make_cube(1.0, 2.0 * std::sqrt(3.0), 1e-13);
}

inline State reference_initial_state() {
  State s;
  s.x = Vec3(0, 0, 10);
  s.gamma = Vec3(2, 2, 10);
  s.Pi = Vec3(4, -4, 4);
  return s;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// C1: tabulated inertia parameters
// ---------------------------------------------------------------------------

inline CheckResult criterion_table1() {
  detail::Stopwatch timer;
  const Mat3 je = inertia_ellipsoid(1, 2, 3, 4);
  const Mat3 je_want = Vec3(5, 4, 2.6).asDiagonal();
  const double e_ell = (je - je_want).norm() / je_want.norm();

  const Mat3 jc = inertia_cube(1, 2.0 * std::sqrt(3.0));
  const double e_cube = (jc - 2.0 * Mat3::Identity()).norm() / (2.0 * std::sqrt(3.0));

  const Mat3 ju = inertia_composite(detail::case3_union(), 1.0, 256);
  const Mat3 ju_want = Vec3(7.5932718, 9.9326434, 8.2731252).asDiagonal();
  const double e_union = (ju - ju_want).norm() / ju_want.norm();

  CheckResult r;
  r.id = "C1";
  r.name = "table1-parameters";
  r.pass = e_ell <= 1e-15 && e_cube <= 1e-15 && e_union <= 1e-2;
  r.detail = "ellipsoid rel err " + detail::fmt(e_ell) + ", cube rel err " +
             detail::fmt(e_cube) + ", union rel err " + detail::fmt(e_union) +
             " (tol 1e-2 at resolution 256), " + detail::fmt(timer.seconds()) + " s";
  return r;
}

// ---------------------------------------------------------------------------
// C2: jump-map conservation over randomized impact states
// ---------------------------------------------------------------------------

inline CheckResult criterion_jump_conservation(std::uint64_t seed, const SolverConfig&) {
  detail::Stopwatch timer;
  struct Setup {
    const char* label;
    WorldParams world;
  };
  std::vector<Setup> setups;
  setups.push_back({"ellipsoid", WorldParams(9.80665, Plane::horizontal(),
                                             RigidBody::make_ellipsoid(1, 2, 3, 4))});
  setups.push_back({"tilted", WorldParams(9.80665, Plane::tilted_about_y(-M_PI / 90.0),
                                          RigidBody::make_ellipsoid(1, 2, 3, 4))});
  setups.push_back({"union", WorldParams(9.80665, Plane::horizontal(), detail::case3_body())});
  setups.push_back({"cube", WorldParams(9.80665, Plane::horizontal(), detail::case4_cube())});

  double max_energy = 0.0, max_gamma_orth = 0.0, max_pi_res = 0.0;
  int total = 0;
  for (std::size_t k = 0; k < setups.size(); ++k) {
    const WorldParams& w = setups[k].world;
    auto rng = detail::rng_for(seed, 100 + k);
    int done = 0;
    while (done < 1000) {
      State s;
      s.R = detail::random_rotation(rng);
      // Place the body exactly on the contact set for this attitude.
      const double support = phi_value(Pose{Vec3::Zero(), s.R}, w.body, w.plane);
      s.x = -support * w.plane.normal + detail::uniform(rng, -2, 2) *
                                            Vec3(w.plane.normal.z(), 0, -w.plane.normal.x());
      s.gamma = detail::random_vec(rng, 8.0);
      s.Pi = detail::random_vec(rng, 6.0);

      const ContactGeometry cg = phi_general(pose_of(s), w.body, w.plane);
      const double approach = s.gamma.dot(cg.dphi_dx) / w.body.mass() +
                              cg.chi.dot(w.body.inertia_inverse() * s.Pi);
      if (approach > -0.1) continue;  // not an impact; redraw

      JumpResult jr;
      try {
        jr = jump(s, cg, w);
      } catch (const GrazingContact&) {
        continue;
      }
      ++done;
      ++total;

      const double e_minus = energy(s, w);
      const double e_plus = energy(jr.plus, w);
      max_energy = std::max(max_energy, std::abs(e_plus - e_minus) / std::abs(e_minus));

      const Vec3 dgamma = jr.plus.gamma - s.gamma;
      const Vec3& a = cg.dphi_dx;
      max_gamma_orth = std::max(max_gamma_orth, (dgamma - dgamma.dot(a) * a).norm());
      max_pi_res = std::max(max_pi_res, (jr.plus.Pi - s.Pi - jr.lambda * cg.chi).norm());
    }
  }

  CheckResult r;
  r.id = "C2";
  r.name = "jump-conservation";
  r.pass = max_energy <= 1e-10 && max_gamma_orth <= 1e-13 && max_pi_res <= 1e-13;
  r.detail = std::to_string(total) + " impacts: max |dE|/E " + detail::fmt(max_energy) +
             " (tol 1e-10), max gamma-orth " + detail::fmt(max_gamma_orth) +
             " (tol 1e-13), max Pi residual " + detail::fmt(max_pi_res) + " (tol 1e-13), " +
             detail::fmt(timer.seconds()) + " s";
  return r;
}

// ---------------------------------------------------------------------------
// C3: analytic sphere-bounce regression
// ---------------------------------------------------------------------------

inline CheckResult criterion_sphere_bounce(const SolverConfig& solver) {
  WorldParams w(9.80665, Plane::horizontal(), RigidBody::make_sphere(1.0, 1.0));
  State s0;
  s0.x = Vec3(0, 0, 2);
  const Trajectory traj = run(s0, w, SimConfig(0.01, 1000), solver);

  const double t_star = std::sqrt(2.0 / 9.80665);
  bool pass = traj.termination == Termination::Completed && traj.events.size() >= 10;
  double first_err = std::numeric_limits<double>::infinity();
  double max_seq_err = 0.0, max_reflect = 0.0;
  if (pass) {
    first_err = std::abs(traj.events[0].t - t_star);
    for (int k = 0; k < 10; ++k) {
      max_seq_err = std::max(max_seq_err,
                             std::abs(traj.events[k].t - (2.0 * k + 1.0) * t_star));
      const double before = traj.events[k].state_minus.gamma.z();
      const double after = traj.events[k].state_plus.gamma.z();
      max_reflect = std::max(max_reflect,
                             std::abs(after + before) / std::max(1.0, std::abs(before)));
    }
    pass = first_err <= 1e-12 && max_seq_err <= 1e-9 && max_reflect <= 1e-13;
  }

  CheckResult r;
  r.id = "C3";
  r.name = "sphere-bounce";
  r.pass = pass;
  r.detail = "first-impact err " + detail::fmt(first_err) + " (tol 1e-12), sequence err " +
             detail::fmt(max_seq_err) + " (tol 1e-9 over 10 bounces), reflection err " +
             detail::fmt(max_reflect) + " (tol 1e-13)";
  return r;
}

// ---------------------------------------------------------------------------
// C4: long-run structure preservation (rounded cube, 1e5 steps)
// ---------------------------------------------------------------------------

inline CheckResult criterion_long_run(const SolverConfig& solver) {
  detail::Stopwatch timer;
  WorldParams w(9.80665, Plane::horizontal(), detail::case4_cube());
  const State s0 = detail::reference_initial_state();
  const Trajectory traj = run(s0, w, SimConfig(0.01, 100000), solver);

  double max_ortho = 0.0, max_gxy = 0.0;
  const double e0 = energy(s0, w);
  double max_drift = 0.0, final_drift = 0.0;
  for (const Sample& s : traj.samples) {
    max_ortho = std::max(max_ortho, s.state.R.orthogonality_defect());
    max_gxy = std::max({max_gxy, std::abs(s.state.gamma.x() - s0.gamma.x()),
                        std::abs(s.state.gamma.y() - s0.gamma.y())});
    final_drift = (energy(s.state, w) - e0) / std::abs(e0);
    max_drift = std::max(max_drift, std::abs(final_drift));
  }

  CheckResult r;
  r.id = "C4";
  r.name = "long-run-structure";
  r.pass = traj.termination == Termination::Completed && max_ortho <= 1e-11 &&
           max_gxy <= 1e-12 && max_drift <= 1e-3;
  r.detail = std::to_string(traj.events.size()) + " impacts: max |R^T R - I| " +
             detail::fmt(max_ortho) + " (tol 1e-11), max horizontal-momentum deviation " +
             detail::fmt(max_gxy) + " (tol 1e-12), max |energy drift| " +
             detail::fmt(max_drift) + " (tol 1e-3), final drift " +
             detail::fmt(final_drift) +
             (final_drift >= 0 ? " (upward)" : " (downward)") + ", " +
             detail::fmt(timer.seconds()) + " s";
  return r;
}

// ---------------------------------------------------------------------------
// C5: discrete-energy balance across impacts
// ---------------------------------------------------------------------------

inline CheckResult criterion_discrete_energy(const SolverConfig& solver) {
  detail::Stopwatch timer;
  struct Setup {
    const char* label;
    WorldParams world;
  };
  std::vector<Setup> setups;
  setups.push_back({"I", WorldParams(9.80665, Plane::horizontal(),
                                     RigidBody::make_ellipsoid(1, 2, 3, 4))});
  setups.push_back({"II", WorldParams(9.80665, Plane::tilted_about_y(-M_PI / 90.0),
                                      RigidBody::make_ellipsoid(1, 2, 3, 4))});
  setups.push_back({"III", WorldParams(9.80665, Plane::horizontal(), detail::case3_body())});
  setups.push_back({"IV", WorldParams(9.80665, Plane::horizontal(), detail::case4_cube())});

  double max_imbalance = 0.0;
  int events = 0;
  for (const Setup& setup : setups) {
    const Trajectory traj =
        run(detail::reference_initial_state(), setup.world, SimConfig(0.01, 10000), solver);
    for (std::size_t i = 1; i + 1 < traj.samples.size(); ++i) {
      if (traj.samples[i].kind != SampleKind::Impact) continue;
      const double ed_pre =
          discrete_energy(pose_of(traj.samples[i - 1].state), pose_of(traj.samples[i].state),
                          traj.samples[i].dt_from_prev, setup.world);
      const double ed_post =
          discrete_energy(pose_of(traj.samples[i].state), pose_of(traj.samples[i + 1].state),
                          traj.samples[i + 1].dt_from_prev, setup.world);
      max_imbalance =
          std::max(max_imbalance, std::abs(ed_post - ed_pre) / std::abs(ed_pre));
      ++events;
    }
  }

  CheckResult r;
  r.id = "C5";
  r.name = "discrete-energy-balance";
  r.pass = max_imbalance <= 1e-9 && events > 0;
  r.detail = std::to_string(events) + " impacts: max relative discrete-energy imbalance " +
             detail::fmt(max_imbalance) + " (tol 1e-9), " + detail::fmt(timer.seconds()) + " s";
  return r;
}

// ---------------------------------------------------------------------------
// C6: gradient correctness against central finite differences
// ---------------------------------------------------------------------------

inline CheckResult criterion_gradients(std::uint64_t seed) {
  detail::Stopwatch timer;
  struct Setup {
    const char* label;
    WorldParams world;
  };
  std::vector<Setup> setups;
  setups.push_back({"ellipsoid", WorldParams(9.80665, Plane::horizontal(),
                                             RigidBody::make_ellipsoid(1, 2, 3, 4))});
  setups.push_back({"tilted", WorldParams(9.80665, Plane::tilted_about_y(-M_PI / 90.0),
                                          RigidBody::make_ellipsoid(1, 2, 3, 4))});
  setups.push_back({"cube", WorldParams(9.80665, Plane::horizontal(), detail::case4_cube())});
  setups.push_back({"union", WorldParams(9.80665, Plane::horizontal(), detail::case3_body())});

  double worst = 0.0;
  const double step = 1e-6;
  for (std::size_t k = 0; k < setups.size(); ++k) {
    const WorldParams& w = setups[k].world;
    auto rng = detail::rng_for(seed, 200 + k);
    int done = 0;
    while (done < 100) {
      Pose pose{Vec3(detail::uniform(rng, -2, 2), detail::uniform(rng, -2, 2),
                     detail::uniform(rng, 10, 18)),
                detail::random_rotation(rng)};

      // Probable poses only: the support point must be stable under the
      // finite-difference perturbation, so skip near-ties.
      ContactGeometry cg;
      try {
        cg = phi_general(pose, w.body, w.plane);
      } catch (const GradientUndefinedError&) {
        continue;
      }
      const Vec3 body_normal = pose.attitude.matrix().transpose() * w.plane.normal;
      if (const auto* poly = std::get_if<ShapeNode::PolyhedronPrim>(&w.body.shape().payload())) {
        std::vector<double> vals;
        for (const Vec3& v : poly->shape->vertices()) vals.push_back(body_normal.dot(v));
        std::sort(vals.begin(), vals.end());
        if (vals[1] - vals[0] < 1e-3) continue;
      }
      if (const auto* uni = std::get_if<ShapeNode::Union>(&w.body.shape().payload())) {
        const auto* e1 = std::get_if<ShapeNode::EllipsoidPrim>(&uni->left->payload());
        const auto* e2 = std::get_if<ShapeNode::EllipsoidPrim>(&uni->right->payload());
        const double v1 = ::lgvci::detail::ellipsoid_support(*e1, body_normal).value;
        const double v2 = ::lgvci::detail::ellipsoid_support(*e2, body_normal).value;
        if (std::abs(v1 - v2) < 1e-3) continue;
      }
      ++done;

      const Vec3 fdx = fd_vector_gradient(
          [&](const Vec3& x) { return phi_value(Pose{x, pose.attitude}, w.body, w.plane); },
          pose.position, step);
      const Mat3 fdr = fd_matrix_gradient(
          [&](const Mat3& m) {
            return phi_value(Pose{pose.position, Rotation::from_matrix_unchecked(m)}, w.body,
                             w.plane);
          },
          pose.attitude.matrix(), step);
      worst = std::max({worst, (fdx - cg.dphi_dx).norm(), (fdr - cg.dphi_dR).norm()});
    }
  }

  CheckResult r;
  r.id = "C6";
  r.name = "gradient-correctness";
  r.pass = worst <= 1e-6;
  r.detail = "max |fd - analytic| " + detail::fmt(worst) +
             " (tol 1e-6, 100 poses per shape), " + detail::fmt(timer.seconds()) + " s";
  return r;
}

// ---------------------------------------------------------------------------
// C7: implicit rotation solver
// ---------------------------------------------------------------------------

inline CheckResult criterion_solver(std::uint64_t seed, const SolverConfig& base) {
  detail::Stopwatch timer;
  auto rng = detail::rng_for(seed, 300);
  double max_res = 0.0, max_agree = 0.0;
  bool ok = true;
  for (int i = 0; i < 10000; ++i) {
    const Mat3 j = detail::random_spd(rng, 0.5, 5.0);
    const Mat3 jd = jd_from_j(j);
    const double lam_min = Eigen::SelfAdjointEigenSolver<Mat3>(j).eigenvalues().minCoeff();
    const Vec3 g = detail::uniform(rng, 0.0, 0.1 * lam_min) * detail::random_unit(rng);
    const RigidBody body(1.0, j, ShapeNode::ellipsoid(Ellipsoid(1, 1, 1)));

    SolverConfig exp_cfg = base, cay_cfg = base;
    exp_cfg.retraction = Retraction::Exp;
    cay_cfg.retraction = Retraction::Cayley;
    try {
      const Rotation fe = solve_relative_rotation(g, body, exp_cfg);
      const Rotation fc = solve_relative_rotation(g, body, cay_cfg);
      max_res = std::max({max_res, (asym(fe.matrix() * jd) - skew(g)).norm(),
                          (asym(fc.matrix() * jd) - skew(g)).norm()});
      max_agree = std::max(max_agree, (fe.matrix() - fc.matrix()).norm());
    } catch (const SolverError&) {
      ok = false;
      break;
    }
  }

  CheckResult r;
  r.id = "C7";
  r.name = "rotation-solver";
  r.pass = ok && max_res <= 1e-13 && max_agree <= 1e-10;
  r.detail = std::string(ok ? "" : "solver failure; ") + "max residual " +
             detail::fmt(max_res) + " (tol 1e-13), max exp/cayley disagreement " +
             detail::fmt(max_agree) + " (tol 1e-10) over 10^4 draws, " +
             detail::fmt(timer.seconds()) + " s";
  return r;
}

// ---------------------------------------------------------------------------
// C8: convergence order on a collision-free segment
// ---------------------------------------------------------------------------

inline CheckResult criterion_convergence(const SolverConfig& solver) {
  detail::Stopwatch timer;
  WorldParams w(9.80665, Plane::horizontal(), RigidBody::make_ellipsoid(1, 2, 3, 4));
  const State s0 = detail::reference_initial_state();
  const double horizon = 1.0;
  const State ref = continuous_reference(s0, horizon, w, 20000);

  std::vector<double> errors;
  for (double h : {0.01, 0.005, 0.0025}) {
    State s = s0;
    const int n = static_cast<int>(std::round(horizon / h));
    for (int i = 0; i < n; ++i) {
      s = discrete_flow(s, h, w, solver);
      if (phi_value(pose_of(s), w.body, w.plane) <= 0.0) {
        CheckResult r;
        r.id = "C8";
        r.name = "convergence-order";
        r.pass = false;
        r.detail = "collision inside the test horizon";
        return r;
      }
    }
    errors.push_back((s.x - ref.x).norm() + (s.R.matrix() - ref.R.matrix()).norm() +
                     (s.gamma - ref.gamma).norm() + (s.Pi - ref.Pi).norm());
  }
  const double o1 = std::log2(errors[0] / errors[1]);
  const double o2 = std::log2(errors[1] / errors[2]);

  CheckResult r;
  r.id = "C8";
  r.name = "convergence-order";
  r.pass = o1 >= 1.9 && o2 >= 1.9;
  r.detail = "errors {" + detail::fmt(errors[0]) + ", " + detail::fmt(errors[1]) + ", " +
             detail::fmt(errors[2]) + "}, observed orders " + detail::fmt(o1) + ", " +
             detail::fmt(o2) + " (threshold 1.9), " + detail::fmt(timer.seconds()) + " s";
  return r;
}

// ---------------------------------------------------------------------------
// C9: sensitivity to initial conditions (rounded cube)
// ---------------------------------------------------------------------------

inline CheckResult criterion_sensitivity(const SolverConfig& solver) {
  detail::Stopwatch timer;
  WorldParams w(9.80665, Plane::horizontal(), detail::case4_cube());
  const SimConfig sim(0.01, 6000);

  const State base = detail::reference_initial_state();
  State pos = base;
  pos.x += Vec3(0, 0, 1e-8);
  State att = base;
  const double theta = 1e-8 * M_PI;
  Mat3 dr;
  dr << std::cos(theta), 0, std::sin(theta), 0, 1, 0, -std::sin(theta), 0, std::cos(theta);
  att.R = Rotation::from_matrix_unchecked(base.R.matrix() * dr);

  const Trajectory tb = run(base, w, sim, solver);
  const Trajectory tp = run(pos, w, sim, solver);
  const Trajectory ta = run(att, w, sim, solver);

  const auto grid_states = [](const Trajectory& t) {
    std::vector<const State*> out;
    for (const Sample& s : t.samples)
      if (s.kind == SampleKind::Grid) out.push_back(&s.state);
    return out;
  };
  const auto gb = grid_states(tb), gp = grid_states(tp), ga = grid_states(ta);
  const std::size_t n = std::min({gb.size(), gp.size(), ga.size()});

  const auto err = [](const State& a, const State& b) {
    return (a.x - b.x).norm() + (a.R.matrix() - b.R.matrix()).operatorNorm();
  };

  const double err_pos0 = err(*gp[0], *gb[0]);
  const double err_att0 = err(*ga[0], *gb[0]);

  // Envelope of the divergence up to the tenth collision of the base run.
  double t10 = tb.samples.back().t;
  if (tb.events.size() >= 10) t10 = tb.events[9].t;
  double env_pos = 0.0, env_att = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = i * sim.h;
    if (t > t10) break;
    env_pos = std::max(env_pos, err(*gp[i], *gb[i]));
    env_att = std::max(env_att, err(*ga[i], *gb[i]));
  }

  CheckResult r;
  r.id = "C9";
  r.name = "sensitivity";
  r.pass = tb.events.size() >= 10 && std::abs(err_pos0 - 1e-8) <= 1e-10 &&
           err_att0 >= 1e-8 && err_att0 <= 5e-8 && env_pos >= 1e-5 && env_att >= 1e-5;
  r.detail = "Err_pos(0) " + detail::fmt(err_pos0) + ", Err_att(0) " + detail::fmt(err_att0) +
             ", envelopes by 10th collision " + detail::fmt(env_pos) + " / " +
             detail::fmt(env_att) + " (threshold 1e-5), " +
             std::to_string(tb.events.size()) + " base impacts, " +
             detail::fmt(timer.seconds()) + " s";
  return r;
}

// ---------------------------------------------------------------------------
// C10: discrete Euler-Lagrange residual along a trajectory with impacts
// ---------------------------------------------------------------------------

inline CheckResult criterion_del(const SolverConfig& solver) {
  detail::Stopwatch timer;
  WorldParams w(9.80665, Plane::horizontal(), RigidBody::make_ellipsoid(1, 2, 3, 4));
  const Trajectory traj = run(detail::reference_initial_state(), w, SimConfig(0.01, 1000), solver);

  double worst = 0.0;
  int triples = 0, impact_adjacent = 0;
  for (std::size_t i = 1; i + 1 < traj.samples.size(); ++i) {
    // Triples whose middle pose carries an impulse satisfy the jump
    // conditions instead of the force-free equations; all others must
    // satisfy the discrete Euler-Lagrange equations, including the
    // mixed-timestep triples next to impacts.
    if (traj.samples[i].kind != SampleKind::Grid) continue;
    const auto [rt, rr] = del_residual(
        pose_of(traj.samples[i - 1].state), pose_of(traj.samples[i].state),
        pose_of(traj.samples[i + 1].state), traj.samples[i].dt_from_prev,
        traj.samples[i + 1].dt_from_prev, w);
    worst = std::max({worst, rt.norm(), rr.norm()});
    ++triples;
    if (traj.samples[i - 1].kind == SampleKind::Impact ||
        traj.samples[i + 1].kind == SampleKind::Impact) {
      ++impact_adjacent;
    }
  }

  CheckResult r;
  r.id = "C10";
  r.name = "del-residual";
  r.pass = worst <= 1e-10 && triples > 0 && impact_adjacent > 0 && !traj.events.empty();
  r.detail = "max residual " + detail::fmt(worst) + " (tol 1e-10) over " +
             std::to_string(triples) + " triples (" + std::to_string(impact_adjacent) +
             " impact-adjacent), " + detail::fmt(timer.seconds()) + " s";
  return r;
}

// ---------------------------------------------------------------------------

inline std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed,
                                          const SolverConfig& solver) {
  std::vector<CheckResult> out;
  const auto want = [&](const char* name) { return suite == "all" || suite == name; };
  if (want("table1")) out.push_back(criterion_table1());
  if (want("jump-conservation")) out.push_back(criterion_jump_conservation(seed, solver));
  if (want("sphere-bounce")) out.push_back(criterion_sphere_bounce(solver));
  if (want("long-run")) out.push_back(criterion_long_run(solver));
  if (want("discrete-energy")) out.push_back(criterion_discrete_energy(solver));
  if (want("gradients")) out.push_back(criterion_gradients(seed));
  if (want("solver")) out.push_back(criterion_solver(seed, solver));
  if (want("convergence")) out.push_back(criterion_convergence(solver));
  if (want("sensitivity")) out.push_back(criterion_sensitivity(solver));
  if (want("del")) out.push_back(criterion_del(solver));
  return out;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "table1",   "jump-conservation", "sphere-bounce", "long-run", "discrete-energy",
      "gradients", "solver",           "convergence",   "sensitivity", "del"};
  return names;
}

}  // namespace lgvci::verify
