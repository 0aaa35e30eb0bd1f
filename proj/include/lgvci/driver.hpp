// Event-driven simulation loop: fixed-step discrete flow, interpenetration
// detection, bisection to the impact time, jump application, completion of
// the remaining fraction of the step, multiple-impact chaining, and a guard
// against Zeno accumulation.
#pragma once

#include <lgvci/integrator.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace lgvci {

struct SimConfig {
  double h = 0.01;
  int steps = 1;
  double contact_tol = 1e-12;     // width of the |Phi| contact band, length units
  int zeno_j_max = 64;            // impacts allowed within one grid step
  int bisection_max_iters = 200;

  SimConfig() = default;
  SimConfig(double h_, int steps_) : h(h_), steps(steps_) {
    if (!(h > 0.0)) throw std::invalid_argument("SimConfig: h must be positive");
    if (steps < 1) throw std::invalid_argument("SimConfig: steps must be >= 1");
  }
};

struct CollisionEvent {
  double t = 0.0;
  double alpha = 0.0;      // fraction of the grid step taken to reach this impact
  double alpha_tot = 0.0;  // running sum of alphas within the grid step
  double lambda = 0.0;
  State state_minus;
  State state_plus;
  bool grazing = false;
};

enum class SampleKind { Grid, Impact };

struct Sample {
  double t = 0.0;
  double dt_from_prev = 0.0;  // exact flow timestep used to reach this sample
  State state;
  SampleKind kind = SampleKind::Grid;
};

enum class Termination { Completed, ZenoGuard, SolverFailure };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::ZenoGuard: return "zeno_guard";
    case Termination::SolverFailure: return "solver_failure";
  }
  return "unknown";
}

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<CollisionEvent> events;
  Termination termination = Termination::Completed;
};

class BisectionError : public std::runtime_error {
 public:
  explicit BisectionError(const std::string& what) : std::runtime_error(what) {}
};

struct BisectImpactResult {
  double alpha = 0.0;  // fraction of h_window
  double dt = 0.0;     // the exact flow timestep alpha * h_window that was used
  State state;         // discrete_flow(s, dt)
};

/// Locates the impact inside (0, h_window) by bisection on the step fraction,
/// always keeping the admissible endpoint so the returned state satisfies
/// 0 <= Phi <= contact_tol. Requires Phi(s) >= 0 and interpenetration at the
/// full window.
inline BisectImpactResult bisect_impact(const State& s, double h_window, const WorldParams& w,
                                        const SimConfig& sim, const SolverConfig& solver) {
  const double phi_start = phi_value(pose_of(s), w.body, w.plane);
  if (phi_start < 0.0) {
    throw BisectionError("bisect_impact: start state is inadmissible");
  }
  {
    const State full = discrete_flow(s, h_window, w, solver);
    if (phi_value(pose_of(full), w.body, w.plane) >= 0.0) {
      throw BisectionError("bisect_impact: no interpenetration bracket at the full window");
    }
  }

  double lo = 0.0, hi = 1.0;
  State best = s;  // last admissible candidate
  double best_dt = 0.0;
  bool have_interior = false;
  for (int it = 0; it < sim.bisection_max_iters; ++it) {
    const double alpha = 0.5 * (lo + hi);
    const double dt = alpha * h_window;
    const State cand = discrete_flow(s, dt, w, solver);
    const double phi = phi_value(pose_of(cand), w.body, w.plane);
    if (phi >= 0.0 && phi <= sim.contact_tol) {
      return {alpha, dt, cand};
    }
    if (phi > 0.0) {
      lo = alpha;
      best = cand;
      best_dt = dt;
      have_interior = true;
    } else {
      hi = alpha;
    }
    if (hi - lo <= solver.eps_tol) {
      // Interval exhausted before the Phi band was hit; fall back to the
      // admissible endpoint.
      const State& fallback = have_interior ? best : s;
      const double phi_fb = phi_value(pose_of(fallback), w.body, w.plane);
      if (phi_fb >= 0.0 && phi_fb <= sim.contact_tol) {
        return {have_interior ? lo : 0.0, have_interior ? best_dt : 0.0, fallback};
      }
      throw BisectionError("bisect_impact: interval exhausted away from the contact band");
    }
  }
  throw BisectionError("bisect_impact: iteration limit reached");
}

struct StepResult {
  std::vector<CollisionEvent> events;
  std::vector<Sample> impact_samples;  // one per non-degenerate event time
  State end_state;
  double end_dt = 0.0;  // exact flow timestep into end_state
  bool zeno = false;
};

/// Advances one grid step of size h from an admissible state, resolving any
/// impacts inside the step. After each jump the remaining (1 - alpha_tot) h
/// is attempted again; repeated interpenetration chains further impacts with
/// alpha_j in (0, 1 - alpha_tot). Trips the Zeno guard once the per-step
/// impact count exceeds zeno_j_max.
inline StepResult resolve_step_with_collisions(const State& s0, double t0, const WorldParams& w,
                                               const SimConfig& sim, const SolverConfig& solver) {
  StepResult out;
  State s = s0;
  double alpha_tot = 0.0;
  double alpha_comp = 0.0;  // Kahan compensation for alpha_tot
  int j = 0;

  while (true) {
    const double remaining = 1.0 - alpha_tot;
    const double window = remaining * sim.h;
    const State candidate = discrete_flow(s, window, w, solver);
    const double phi = phi_value(pose_of(candidate), w.body, w.plane);
    if (phi > sim.contact_tol) {
      out.end_state = candidate;
      out.end_dt = window;
      return out;
    }

    // An impact lies in this window (or the window endpoint itself is on
    // contact). Locate it, jump, and keep going with the remainder.
    double alpha_j;
    double dt_j;
    State s_tilde;
    if (phi >= -sim.contact_tol) {
      alpha_j = remaining;  // contact exactly at the grid time
      dt_j = window;
      s_tilde = candidate;
    } else {
      const BisectImpactResult hit = bisect_impact(s, window, w, sim, solver);
      alpha_j = hit.alpha * remaining;
      dt_j = hit.dt;
      s_tilde = hit.state;
    }

    ++j;
    if (j > sim.zeno_j_max) {
      out.zeno = true;
      out.end_state = s;
      return out;
    }

    CollisionEvent ev;
    ev.alpha = alpha_j;
    ev.state_minus = s_tilde;
    const ContactGeometry cg = phi_general(pose_of(s_tilde), w.body, w.plane);
    try {
      const JumpResult jr = jump(s_tilde, cg, w);
      ev.lambda = jr.lambda;
      ev.state_plus = jr.plus;
    } catch (const GrazingContact& gc) {
      ev.grazing = true;
      ev.lambda = gc.lambda;
      ev.state_plus = s_tilde;
    }

    // alpha_tot += alpha_j with compensation; sub-times stay consistent to
    // ~1e-14 over long chains.
    const double y = alpha_j - alpha_comp;
    const double t_sum = alpha_tot + y;
    alpha_comp = (t_sum - alpha_tot) - y;
    alpha_tot = t_sum;

    ev.alpha_tot = alpha_tot;
    ev.t = t0 + alpha_tot * sim.h;
    out.events.push_back(ev);

    if (alpha_j >= remaining) {
      // The jump happened exactly at the grid time; the post-jump state is
      // the grid sample, no separate impact sample.
      out.end_state = ev.state_plus;
      out.end_dt = dt_j;
      return out;
    }
    if (alpha_j > 0.0) {
      // A zero-advance event (degenerate grazing chain) keeps its event
      // record but adds no sample; sample times stay strictly increasing.
      out.impact_samples.push_back(Sample{ev.t, dt_j, ev.state_plus, SampleKind::Impact});
    }
    s = ev.state_plus;
  }
}

/// Runs the full event-driven simulation for sim.steps grid steps. Solver
/// and contact failures terminate the trajectory with a status instead of
/// propagating.
inline Trajectory run(const State& initial, const WorldParams& w, const SimConfig& sim,
                      const SolverConfig& solver) {
  if (phi_value(pose_of(initial), w.body, w.plane) < 0.0) {
    throw std::invalid_argument("run: initial state is inadmissible (Phi < 0)");
  }
  Trajectory traj;
  traj.samples.push_back(Sample{0.0, 0.0, initial, SampleKind::Grid});
  State s = initial;
  for (int i = 1; i <= sim.steps; ++i) {
    const double t_prev = (i - 1) * sim.h;
    StepResult step;
    try {
      step = resolve_step_with_collisions(s, t_prev, w, sim, solver);
    } catch (const SolverError&) {
      traj.termination = Termination::SolverFailure;
      return traj;
    } catch (const BisectionError&) {
      traj.termination = Termination::SolverFailure;
      return traj;
    } catch (const GradientUndefinedError&) {
      traj.termination = Termination::SolverFailure;
      return traj;
    }
    for (const CollisionEvent& ev : step.events) traj.events.push_back(ev);
    for (const Sample& sample : step.impact_samples) traj.samples.push_back(sample);
    if (step.zeno) {
      traj.termination = Termination::ZenoGuard;
      return traj;
    }
    const double t_grid = i * sim.h;
    traj.samples.push_back(Sample{t_grid, step.end_dt, step.end_state, SampleKind::Grid});
    s = step.end_state;
  }
  traj.termination = Termination::Completed;
  return traj;
}

}  // namespace lgvci
