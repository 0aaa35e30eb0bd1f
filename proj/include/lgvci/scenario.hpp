// Scenario configuration (JSON), trajectory and event persistence (CSV with
// round-trip-exact numeric formatting), and energy plot emission (SVG).
#pragma once

#include <lgvci/driver.hpp>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lgvci {

inline constexpr int kScenarioSchemaVersion = 1;

/// Shortest decimal form that round-trips a double exactly.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Scenario document
// ---------------------------------------------------------------------------

struct EllipsoidPart {
  double a = 1.0, b = 1.0, c = 1.0;
  Vec3 offset = Vec3::Zero();
};

struct Scenario {
  std::string name;

  enum class BodyKind { Ellipsoid, Cube, Polyhedron, UnionOfEllipsoids, IntersectionOfEllipsoids };
  BodyKind kind = BodyKind::Ellipsoid;
  double a = 1.0, b = 1.0, c = 1.0;      // ellipsoid semiaxes
  double side = 1.0;                     // cube side
  double rounding = 1e-13;               // cube / polyhedron eps
  std::vector<Vec3> vertices;            // polyhedron
  std::vector<EllipsoidPart> parts;      // union / intersection

  double mass = 1.0;
  std::optional<Mat3> inertia_override;
  int inertia_resolution = 128;

  double gravity = 9.80665;
  std::optional<double> tilt_deg;        // plane tilt about the y-axis
  Vec3 plane_normal = Vec3::UnitZ();     // used when tilt_deg is absent

  Vec3 x0 = Vec3::Zero();
  Vec3 gamma0 = Vec3::Zero();
  Vec3 Pi0 = Vec3::Zero();
  Mat3 R0 = Mat3::Identity();

  double h = 0.01;
  int steps = 1000;
  double contact_tol = 1e-12;
  int zeno_j_max = 64;
  int bisection_max_iters = 200;

  double eps_tol = 1e-15;
  std::string retraction = "exp";

  std::string out_trajectory = "trajectory.csv";
  std::string out_events = "events.csv";
  std::string out_energy = "energy.svg";
};

/// Runtime objects compiled from a scenario document.
struct CompiledScenario {
  WorldParams world;
  State initial;
  SimConfig sim;
  SolverConfig solver;
};

namespace detail {

inline Vec3 parse_vec3(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument("scenario: " + what + " must be an array of 3 numbers");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline Mat3 parse_mat3(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 9) {
    throw std::invalid_argument("scenario: " + what + " must be an array of 9 numbers (row-major)");
  }
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = j[3 * r + c].get<double>();
  return m;
}

inline nlohmann::json dump_vec3(const Vec3& v) {
  return nlohmann::json::array({v.x(), v.y(), v.z()});
}

inline nlohmann::json dump_mat3(const Mat3& m) {
  nlohmann::json j = nlohmann::json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) j.push_back(m(r, c));
  return j;
}

}  // namespace detail

inline RigidBody build_body(const Scenario& sc) {
  const auto inertia_for = [&](const ShapeNode& node) -> Mat3 {
    if (sc.inertia_override) return *sc.inertia_override;
    return inertia_composite(node, sc.mass, sc.inertia_resolution);
  };

  switch (sc.kind) {
    case Scenario::BodyKind::Ellipsoid: {
      const ShapeNode node = ShapeNode::ellipsoid(Ellipsoid(sc.a, sc.b, sc.c));
      const Mat3 j = sc.inertia_override ? *sc.inertia_override
                                         : inertia_ellipsoid(sc.mass, sc.a, sc.b, sc.c);
      return RigidBody(sc.mass, j, node);
    }
    case Scenario::BodyKind::Cube: {
      const ShapeNode node = ShapeNode::polyhedron(ConvexPolyhedron::cube(sc.side, sc.rounding));
      const Mat3 j =
          sc.inertia_override ? *sc.inertia_override : inertia_cube(sc.mass, sc.side);
      return RigidBody(sc.mass, j, node);
    }
    case Scenario::BodyKind::Polyhedron: {
      ShapeNode node = ShapeNode::polyhedron(ConvexPolyhedron(sc.vertices, sc.rounding));
      const Mat3 j = inertia_for(node);
      return RigidBody(sc.mass, j, std::move(node));
    }
    case Scenario::BodyKind::UnionOfEllipsoids:
    case Scenario::BodyKind::IntersectionOfEllipsoids: {
      if (sc.parts.size() != 2) {
        throw std::invalid_argument("scenario: union/intersection bodies take exactly 2 parts");
      }
      ShapeNode left = ShapeNode::ellipsoid(Ellipsoid(sc.parts[0].a, sc.parts[0].b, sc.parts[0].c),
                                            sc.parts[0].offset);
      ShapeNode right = ShapeNode::ellipsoid(Ellipsoid(sc.parts[1].a, sc.parts[1].b, sc.parts[1].c),
                                             sc.parts[1].offset);
      ShapeNode node = sc.kind == Scenario::BodyKind::UnionOfEllipsoids
                           ? ShapeNode::csg_union(std::move(left), std::move(right))
                           : ShapeNode::csg_intersection(std::move(left), std::move(right));
      const Mat3 j = inertia_for(node);
      return RigidBody(sc.mass, j, std::move(node));
    }
  }
  throw std::logic_error("build_body: unhandled body kind");
}

inline Plane build_plane(const Scenario& sc) {
  if (sc.tilt_deg) {
    return Plane::tilted_about_y(-*sc.tilt_deg * M_PI / 180.0);
  }
  const double n = sc.plane_normal.norm();
  if (n <= 0.0) throw std::invalid_argument("scenario: plane normal must be nonzero");
  return Plane(sc.plane_normal / n, 0.0);
}

/// Compiles and fully validates a scenario: body, plane, initial state (with
/// attitude re-projection), and the admissibility of the initial pose.
inline CompiledScenario compile_scenario(const Scenario& sc) {
  RigidBody body = build_body(sc);
  const Plane plane = build_plane(sc);

  const double ortho = (sc.R0.transpose() * sc.R0 - Mat3::Identity()).norm();
  if (ortho > 1e-9) {
    throw std::invalid_argument("scenario: initial attitude is not orthogonal (defect " +
                                fmt17(ortho) + ")");
  }
  State initial;
  initial.x = sc.x0;
  initial.R = ortho <= config::rotation_ortho_tol ? Rotation(sc.R0) : Rotation::project(sc.R0);
  initial.gamma = sc.gamma0;
  initial.Pi = sc.Pi0;

  WorldParams world(sc.gravity, plane, std::move(body));
  if (phi_value(pose_of(initial), world.body, world.plane) < 0.0) {
    throw std::invalid_argument("scenario: initial state is inadmissible (Phi < 0)");
  }

  SimConfig sim(sc.h, sc.steps);
  sim.contact_tol = sc.contact_tol;
  sim.zeno_j_max = sc.zeno_j_max;
  sim.bisection_max_iters = sc.bisection_max_iters;

  SolverConfig solver;
  solver.eps_tol = sc.eps_tol;
  if (sc.retraction == "exp") {
    solver.retraction = Retraction::Exp;
  } else if (sc.retraction == "cayley") {
    solver.retraction = Retraction::Cayley;
  } else {
    throw std::invalid_argument("scenario: retraction must be 'exp' or 'cayley'");
  }

  return CompiledScenario{std::move(world), initial, sim, solver};
}

inline Scenario load_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: JSON parse error: ") + e.what());
  }

  if (!j.contains("schema_version") || j["schema_version"].get<int>() != kScenarioSchemaVersion) {
    throw std::invalid_argument("scenario: missing or unsupported schema_version");
  }

  Scenario sc;
  sc.name = j.value("name", "unnamed");

  const auto& body = j.at("body");
  const std::string type = body.at("type").get<std::string>();
  if (type == "ellipsoid") {
    sc.kind = Scenario::BodyKind::Ellipsoid;
    sc.a = body.at("a").get<double>();
    sc.b = body.at("b").get<double>();
    sc.c = body.at("c").get<double>();
  } else if (type == "cube") {
    sc.kind = Scenario::BodyKind::Cube;
    sc.side = body.at("s").get<double>();
    sc.rounding = body.at("eps").get<double>();
  } else if (type == "polyhedron") {
    sc.kind = Scenario::BodyKind::Polyhedron;
    for (const auto& v : body.at("vertices")) {
      sc.vertices.push_back(detail::parse_vec3(v, "body.vertices[i]"));
    }
    sc.rounding = body.at("eps").get<double>();
  } else if (type == "union_of_ellipsoids" || type == "intersection_of_ellipsoids") {
    sc.kind = type == "union_of_ellipsoids" ? Scenario::BodyKind::UnionOfEllipsoids
                                            : Scenario::BodyKind::IntersectionOfEllipsoids;
    for (const auto& p : body.at("parts")) {
      EllipsoidPart part;
      part.a = p.at("a").get<double>();
      part.b = p.at("b").get<double>();
      part.c = p.at("c").get<double>();
      part.offset = detail::parse_vec3(p.at("offset"), "body.parts[i].offset");
      sc.parts.push_back(part);
    }
  } else {
    throw std::invalid_argument("scenario: unknown body type '" + type + "'");
  }

  sc.mass = j.at("mass").get<double>();
  if (j.contains("inertia")) sc.inertia_override = detail::parse_mat3(j["inertia"], "inertia");
  sc.inertia_resolution = j.value("inertia_resolution", 128);
  sc.gravity = j.value("gravity", 9.80665);

  const auto& plane = j.at("plane");
  if (plane.contains("tilt_deg")) {
    sc.tilt_deg = plane["tilt_deg"].get<double>();
  } else {
    sc.plane_normal = detail::parse_vec3(plane.at("normal"), "plane.normal");
  }

  const auto& init = j.at("initial");
  sc.x0 = detail::parse_vec3(init.at("x"), "initial.x");
  sc.gamma0 = detail::parse_vec3(init.at("gamma"), "initial.gamma");
  sc.Pi0 = detail::parse_vec3(init.at("Pi"), "initial.Pi");
  if (init.contains("R")) sc.R0 = detail::parse_mat3(init["R"], "initial.R");

  const auto& sim = j.at("sim");
  sc.h = sim.at("h").get<double>();
  sc.steps = sim.at("M").get<int>();
  sc.contact_tol = sim.value("contact_tol", 1e-12);
  sc.zeno_j_max = sim.value("zeno_j_max", 64);
  sc.bisection_max_iters = sim.value("bisection_max_iters", 200);

  if (j.contains("solver")) {
    sc.eps_tol = j["solver"].value("eps_tol", 1e-15);
    sc.retraction = j["solver"].value("retraction", "exp");
  }

  if (j.contains("outputs")) {
    sc.out_trajectory = j["outputs"].value("trajectory", sc.out_trajectory);
    sc.out_events = j["outputs"].value("events", sc.out_events);
    sc.out_energy = j["outputs"].value("energy", sc.out_energy);
  }

  compile_scenario(sc);  // full validation; throws on any inconsistency
  return sc;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scenario: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

inline std::string write_scenario(const Scenario& sc) {
  nlohmann::json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["name"] = sc.name;

  nlohmann::json body;
  switch (sc.kind) {
    case Scenario::BodyKind::Ellipsoid:
      body["type"] = "ellipsoid";
      body["a"] = sc.a;
      body["b"] = sc.b;
      body["c"] = sc.c;
      break;
    case Scenario::BodyKind::Cube:
      body["type"] = "cube";
      body["s"] = sc.side;
      body["eps"] = sc.rounding;
      break;
    case Scenario::BodyKind::Polyhedron: {
      body["type"] = "polyhedron";
      nlohmann::json verts = nlohmann::json::array();
      for (const Vec3& v : sc.vertices) verts.push_back(detail::dump_vec3(v));
      body["vertices"] = verts;
      body["eps"] = sc.rounding;
      break;
    }
    case Scenario::BodyKind::UnionOfEllipsoids:
    case Scenario::BodyKind::IntersectionOfEllipsoids: {
      body["type"] = sc.kind == Scenario::BodyKind::UnionOfEllipsoids
                         ? "union_of_ellipsoids"
                         : "intersection_of_ellipsoids";
      nlohmann::json parts = nlohmann::json::array();
      for (const EllipsoidPart& p : sc.parts) {
        parts.push_back({{"a", p.a}, {"b", p.b}, {"c", p.c}, {"offset", detail::dump_vec3(p.offset)}});
      }
      body["parts"] = parts;
      break;
    }
  }
  j["body"] = body;

  j["mass"] = sc.mass;
  if (sc.inertia_override) j["inertia"] = detail::dump_mat3(*sc.inertia_override);
  j["inertia_resolution"] = sc.inertia_resolution;
  j["gravity"] = sc.gravity;

  if (sc.tilt_deg) {
    j["plane"] = {{"tilt_deg", *sc.tilt_deg}};
  } else {
    j["plane"] = {{"normal", detail::dump_vec3(sc.plane_normal)}};
  }

  j["initial"] = {{"x", detail::dump_vec3(sc.x0)},
                  {"gamma", detail::dump_vec3(sc.gamma0)},
                  {"Pi", detail::dump_vec3(sc.Pi0)},
                  {"R", detail::dump_mat3(sc.R0)}};
  j["sim"] = {{"h", sc.h},
              {"M", sc.steps},
              {"contact_tol", sc.contact_tol},
              {"zeno_j_max", sc.zeno_j_max},
              {"bisection_max_iters", sc.bisection_max_iters}};
  j["solver"] = {{"eps_tol", sc.eps_tol}, {"retraction", sc.retraction}};
  j["outputs"] = {{"trajectory", sc.out_trajectory},
                  {"events", sc.out_events},
                  {"energy", sc.out_energy}};
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Trajectory and event files
// ---------------------------------------------------------------------------

/// Metadata carried in the trajectory header so a file is self-contained for
/// replotting.
struct TrajectoryMeta {
  double mass = 1.0;
  double gravity = 9.80665;
  Mat3 inertia = Mat3::Identity();
  Vec3 plane_normal = Vec3::UnitZ();
  double plane_offset = 0.0;
  std::string termination = "completed";
};

struct TrajectoryRow {
  double t = 0.0;
  State state;
  int kind = 0;  // 0 grid, 1 impact
  double energy = 0.0;
  double phi = 0.0;
};

struct TrajectoryData {
  TrajectoryMeta meta;
  std::vector<TrajectoryRow> rows;
};

inline void write_trajectory(const Trajectory& traj, const WorldParams& w, std::ostream& os) {
  os << "# lgvci trajectory v1";
  os << " m=" << fmt17(w.body.mass());
  os << " g=" << fmt17(w.gravity);
  os << " J=";
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) os << (r + c ? "," : "") << fmt17(w.body.inertia()(r, c));
  os << " n=" << fmt17(w.plane.normal.x()) << ',' << fmt17(w.plane.normal.y()) << ','
     << fmt17(w.plane.normal.z());
  os << " D=" << fmt17(w.plane.offset);
  os << " termination=" << to_string(traj.termination) << '\n';

  os << "t,x1,x2,x3,r11,r12,r13,r21,r22,r23,r31,r32,r33,g1,g2,g3,p1,p2,p3,kind,energy,phi\n";
  for (const Sample& s : traj.samples) {
    os << fmt17(s.t);
    for (int i = 0; i < 3; ++i) os << ',' << fmt17(s.state.x[i]);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) os << ',' << fmt17(s.state.R.matrix()(r, c));
    for (int i = 0; i < 3; ++i) os << ',' << fmt17(s.state.gamma[i]);
    for (int i = 0; i < 3; ++i) os << ',' << fmt17(s.state.Pi[i]);
    os << ',' << (s.kind == SampleKind::Impact ? 1 : 0);
    os << ',' << fmt17(energy(s.state, w));
    os << ',' << fmt17(phi_value(pose_of(s.state), w.body, w.plane));
    os << '\n';
  }
}

inline void write_events(const Trajectory& traj, const WorldParams& w, std::ostream& os) {
  os << "t,alpha,alpha_tot,lambda,grazing,energy_pre,energy_post\n";
  for (const CollisionEvent& ev : traj.events) {
    os << fmt17(ev.t) << ',' << fmt17(ev.alpha) << ',' << fmt17(ev.alpha_tot) << ','
       << fmt17(ev.lambda) << ',' << (ev.grazing ? 1 : 0) << ','
       << fmt17(energy(ev.state_minus, w)) << ',' << fmt17(energy(ev.state_plus, w)) << '\n';
  }
}

namespace detail {

inline std::vector<double> split_doubles(const std::string& line) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t next = line.find(',', pos);
    const std::string tok = line.substr(pos, next == std::string::npos ? next : next - pos);
    if (!tok.empty()) out.push_back(std::stod(tok));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

inline std::string header_field(const std::string& header, const std::string& key) {
  const std::string needle = " " + key + "=";
  const std::size_t at = header.find(needle);
  if (at == std::string::npos) {
    throw std::invalid_argument("trajectory: header field '" + key + "' missing");
  }
  const std::size_t start = at + needle.size();
  const std::size_t end = header.find(' ', start);
  return header.substr(start, end == std::string::npos ? end : end - start);
}

}  // namespace detail

inline TrajectoryData read_trajectory(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# lgvci trajectory", 0) != 0) {
    throw std::invalid_argument("trajectory: missing metadata header");
  }
  TrajectoryData data;
  data.meta.mass = std::stod(detail::header_field(header, "m"));
  data.meta.gravity = std::stod(detail::header_field(header, "g"));
  const auto j = detail::split_doubles(detail::header_field(header, "J"));
  if (j.size() != 9) throw std::invalid_argument("trajectory: malformed J header");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) data.meta.inertia(r, c) = j[3 * r + c];
  const auto n = detail::split_doubles(detail::header_field(header, "n"));
  if (n.size() != 3) throw std::invalid_argument("trajectory: malformed n header");
  data.meta.plane_normal = Vec3(n[0], n[1], n[2]);
  data.meta.plane_offset = std::stod(detail::header_field(header, "D"));
  data.meta.termination = detail::header_field(header, "termination");

  std::string line;
  std::getline(is, line);  // column header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto v = detail::split_doubles(line);
    if (v.size() != 22) throw std::invalid_argument("trajectory: malformed row");
    TrajectoryRow row;
    row.t = v[0];
    row.state.x = Vec3(v[1], v[2], v[3]);
    Mat3 r;
    for (int rr = 0; rr < 3; ++rr)
      for (int cc = 0; cc < 3; ++cc) r(rr, cc) = v[4 + 3 * rr + cc];
    row.state.R = Rotation::from_matrix_unchecked(r);
    row.state.gamma = Vec3(v[13], v[14], v[15]);
    row.state.Pi = Vec3(v[16], v[17], v[18]);
    row.kind = static_cast<int>(v[19]);
    row.energy = v[20];
    row.phi = v[21];
    data.rows.push_back(row);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Energy plot
// ---------------------------------------------------------------------------

/// Standalone SVG line plot of total, translational-plus-potential, and
/// rotational energy against time, with impact times marked.
inline std::string render_energy_svg(const TrajectoryData& data) {
  const double width = 880, height = 500;
  const double ml = 70, mr = 20, mt = 30, mb = 50;

  const Mat3 j_inv = data.meta.inertia.inverse();
  struct Series {
    std::vector<double> t, te, tpe, re;
  } s;
  std::vector<double> impact_times;
  for (const TrajectoryRow& row : data.rows) {
    const double re = 0.5 * row.state.Pi.dot(j_inv * row.state.Pi);
    const double tpe = row.state.gamma.squaredNorm() / (2.0 * data.meta.mass) +
                       data.meta.mass * data.meta.gravity * row.state.x.z();
    s.t.push_back(row.t);
    s.te.push_back(tpe + re);
    s.tpe.push_back(tpe);
    s.re.push_back(re);
    if (row.kind == 1) impact_times.push_back(row.t);
  }
  if (s.t.empty()) throw std::invalid_argument("render_energy_svg: empty trajectory");

  double t_lo = s.t.front(), t_hi = s.t.back();
  if (t_hi <= t_lo) t_hi = t_lo + 1.0;
  double y_lo = s.re.front(), y_hi = s.re.front();
  for (const auto* v : {&s.te, &s.tpe, &s.re}) {
    for (double y : *v) {
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  const auto px = [&](double t) { return ml + (t - t_lo) / (t_hi - t_lo) * (width - ml - mr); };
  const auto py = [&](double y) {
    return height - mb - (y - y_lo) / (y_hi - y_lo) * (height - mt - mb);
  };
  const auto polyline = [&](const std::vector<double>& ys, const char* color) {
    std::string out = "  <polyline fill=\"none\" stroke=\"";
    out += color;
    out += "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < ys.size(); ++i) {
      out += fmt17(px(s.t[i])) + "," + fmt17(py(ys[i])) + " ";
    }
    out += "\"/>\n";
    return out;
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt17(width) +
         "\" height=\"" + fmt17(height) + "\">\n";
  svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (double t : impact_times) {
    svg += "  <line x1=\"" + fmt17(px(t)) + "\" y1=\"" + fmt17(mt) + "\" x2=\"" + fmt17(px(t)) +
           "\" y2=\"" + fmt17(height - mb) +
           "\" stroke=\"#cc3333\" stroke-width=\"0.6\" stroke-dasharray=\"4,3\"/>\n";
  }
  svg += "  <line x1=\"" + fmt17(ml) + "\" y1=\"" + fmt17(height - mb) + "\" x2=\"" +
         fmt17(width - mr) + "\" y2=\"" + fmt17(height - mb) + "\" stroke=\"black\"/>\n";
  svg += "  <line x1=\"" + fmt17(ml) + "\" y1=\"" + fmt17(mt) + "\" x2=\"" + fmt17(ml) +
         "\" y2=\"" + fmt17(height - mb) + "\" stroke=\"black\"/>\n";
  svg += polyline(s.te, "#000000");
  svg += polyline(s.tpe, "#3355cc");
  svg += polyline(s.re, "#cc7722");
  for (int k = 0; k <= 4; ++k) {
    const double tv = t_lo + k * (t_hi - t_lo) / 4.0;
    const double yv = y_lo + pad + k * (y_hi - y_lo - 2 * pad) / 4.0;
    svg += "  <text x=\"" + fmt17(px(tv)) + "\" y=\"" + fmt17(height - mb + 18) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + fmt17(tv) + "</text>\n";
    svg += "  <text x=\"" + fmt17(ml - 8) + "\" y=\"" + fmt17(py(yv) + 4) +
           "\" font-size=\"11\" text-anchor=\"end\">" + fmt17(yv) + "</text>\n";
  }
  svg += "  <text x=\"" + fmt17((ml + width - mr) / 2) + "\" y=\"" + fmt17(height - 12) +
         "\" font-size=\"13\" text-anchor=\"middle\">t (s)</text>\n";
  svg += "  <text x=\"" + fmt17(width - mr - 260) + "\" y=\"" + fmt17(mt - 8) +
         "\" font-size=\"12\">total";
  svg += " <tspan fill=\"#3355cc\">T.P.E.</tspan> <tspan fill=\"#cc7722\">R.E.</tspan>";
  svg += " <tspan fill=\"#cc3333\">| impacts</tspan></text>\n";
  svg += "</svg>\n";
  return svg;
}

inline std::string render_energy_svg(const Trajectory& traj, const WorldParams& w) {
  TrajectoryData data;
  data.meta.mass = w.body.mass();
  data.meta.gravity = w.gravity;
  data.meta.inertia = w.body.inertia();
  data.meta.plane_normal = w.plane.normal;
  data.meta.plane_offset = w.plane.offset;
  data.meta.termination = to_string(traj.termination);
  for (const Sample& s : traj.samples) {
    TrajectoryRow row;
    row.t = s.t;
    row.state = s.state;
    row.kind = s.kind == SampleKind::Impact ? 1 : 0;
    row.energy = energy(s.state, w);
    row.phi = phi_value(pose_of(s.state), w.body, w.plane);
    data.rows.push_back(row);
  }
  return render_energy_svg(data);
}

}  // namespace lgvci
