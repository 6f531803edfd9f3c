#include "rwhec/io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rwhec/parallel.hpp"
#include "rwhec/pose_estimate.hpp"

namespace rwhec {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

std::vector<double> parse_numbers(const std::string& line) {
  std::vector<double> out;
  std::istringstream ss(line);
  double v;
  while (ss >> v) out.push_back(v);
  return out;
}

std::string pattern_file(const std::string& pattern, int index) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern.c_str(), index);
  return buf;
}

}  // namespace

void write_htm(const fs::path& path, const HTM& h) {
  auto out = open_out(path);
  const Mat4 m = h.matrix();
  for (int r = 0; r < 3; ++r) {
    out << fmt(m(r, 0)) << ' ' << fmt(m(r, 1)) << ' ' << fmt(m(r, 2)) << ' '
        << fmt(m(r, 3)) << '\n';
  }
  out << "0 0 0 1\n";
}

HTM read_htm(const fs::path& path) {
  auto in = open_in(path);
  Mat4 m;
  std::string line;
  for (int r = 0; r < 4; ++r) {
    if (!std::getline(in, line))
      throw IoError("truncated HTM file " + path.string());
    const auto vals = parse_numbers(line);
    if (vals.size() != 4)
      throw IoError("HTM row with " + std::to_string(vals.size()) +
                    " values in " + path.string());
    for (int c = 0; c < 4; ++c) m(r, c) = vals[c];
  }
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0)
    throw IoError("HTM bottom row must be 0 0 0 1 in " + path.string());
  const HTM h = HTM::from_matrix(m);
  if (!is_rotation(h.r, 1e-6))
    throw IoError("rotation block is not orthonormal in " + path.string());
  return h;
}

void write_intrinsics(const fs::path& path, const CameraIntrinsics& k) {
  auto out = open_out(path);
  out << fmt(k.fx) << ' ' << fmt(k.fy) << ' ' << fmt(k.cx) << ' ' << fmt(k.cy)
      << '\n';
  for (int i = 0; i < 8; ++i) out << (i ? " " : "") << fmt(k.dist[i]);
  out << '\n';
}

CameraIntrinsics read_intrinsics(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty intrinsics " + path.string());
  auto head = parse_numbers(line);
  if (head.size() != 4)
    throw IoError("intrinsics line 1 must hold fx fy cx cy in " +
                  path.string());
  CameraIntrinsics k;
  k.fx = head[0];
  k.fy = head[1];
  k.cx = head[2];
  k.cy = head[3];
  if (k.fx <= 0 || k.fy <= 0)
    throw IoError("focal lengths must be positive in " + path.string());
  if (!std::getline(in, line))
    throw IoError("missing distortion line in " + path.string());
  auto dist = parse_numbers(line);
  if (dist.size() != 8)
    throw IoError("expected 8 distortion coefficients in " + path.string());
  std::copy(dist.begin(), dist.end(), k.dist.begin());
  return k;
}

void write_target(const fs::path& path, const TargetModel& t) {
  auto out = open_out(path);
  out << t.points.size() << '\n';
  for (const auto& p : t.points)
    out << fmt(p.x()) << ' ' << fmt(p.y()) << ' ' << fmt(p.z()) << '\n';
}

TargetModel read_target(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty target " + path.string());
  const int m = std::stoi(line);
  TargetModel t;
  for (int j = 0; j < m; ++j) {
    if (!std::getline(in, line))
      throw IoError("truncated target " + path.string());
    auto vals = parse_numbers(line);
    if (vals.size() != 3)
      throw IoError("target rows need x y z in " + path.string());
    t.points.emplace_back(vals[0], vals[1], vals[2]);
  }
  return t;
}

void write_observations(const fs::path& path, int camera_id,
                        const std::vector<Observation>& obs) {
  auto out = open_out(path);
  out << "camera,pose,point,u,v\n";
  for (const auto& o : obs)
    out << camera_id << ',' << o.pose << ',' << o.point << ',' << fmt(o.uv.x())
        << ',' << fmt(o.uv.y()) << '\n';
}

std::vector<Observation> read_observations(const fs::path& path,
                                           int camera_id) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "camera,pose,point,u,v")
    throw IoError("observations header must be camera,pose,point,u,v in " +
                  path.string());
  std::vector<Observation> obs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    int cam, pose, point;
    double u, v;
    if (!(ss >> cam >> pose >> point >> u >> v))
      throw IoError("bad observation row in " + path.string());
    if (cam == camera_id) obs.push_back(Observation{pose, point, Vec2(u, v)});
  }
  return obs;
}

DatasetManifest read_manifest(const fs::path& path) {
  auto in = open_in(path);
  DatasetManifest m;
  m.root = path.parent_path();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ManifestError(path.string() + ":" + std::to_string(lineno) +
                          ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "n_poses") {
      m.n_poses = std::stoi(value);
    } else if (key == "b_pose_pattern") {
      m.b_pose_pattern = value;
    } else if (key == "target_file") {
      m.target_file = value;
    } else if (key == "units") {
      m.units = value;
    } else if (key == "camera.id") {
      ManifestCamera cam;
      cam.id = std::stoi(value);
      m.cameras.push_back(cam);
    } else if (key.rfind("camera.", 0) == 0) {
      if (m.cameras.empty())
        throw ManifestError(path.string() + ":" + std::to_string(lineno) +
                            ": camera key before camera.id");
      auto& cam = m.cameras.back();
      const std::string sub = key.substr(7);
      if (sub == "intrinsics_file") {
        cam.intrinsics_file = value;
      } else if (sub == "a_pose_pattern") {
        cam.a_pose_pattern = value;
      } else if (sub == "observations_file") {
        cam.observations_file = value;
      } else if (sub == "visibility") {
        std::string v = value;
        std::replace(v.begin(), v.end(), ',', ' ');
        std::istringstream ss(v);
        int idx;
        while (ss >> idx) cam.visibility.push_back(idx);
      } else {
        throw ManifestError(path.string() + ": unknown key " + key);
      }
    } else {
      throw ManifestError(path.string() + ": unknown key " + key);
    }
  }
  if (m.n_poses <= 0) throw ManifestError(path.string() + ": n_poses missing");
  if (m.b_pose_pattern.empty())
    throw ManifestError(path.string() + ": b_pose_pattern missing");
  if (m.cameras.empty())
    throw ManifestError(path.string() + ": no cameras declared");
  return m;
}

void write_manifest(const fs::path& path, const DatasetManifest& m) {
  auto out = open_out(path);
  out << "n_poses=" << m.n_poses << '\n';
  out << "b_pose_pattern=" << m.b_pose_pattern << '\n';
  if (!m.target_file.empty()) out << "target_file=" << m.target_file << '\n';
  if (!m.units.empty()) out << "units=" << m.units << '\n';
  for (const auto& cam : m.cameras) {
    out << "camera.id=" << cam.id << '\n';
    if (!cam.intrinsics_file.empty())
      out << "camera.intrinsics_file=" << cam.intrinsics_file << '\n';
    if (!cam.a_pose_pattern.empty())
      out << "camera.a_pose_pattern=" << cam.a_pose_pattern << '\n';
    if (!cam.observations_file.empty())
      out << "camera.observations_file=" << cam.observations_file << '\n';
    if (!cam.visibility.empty()) {
      out << "camera.visibility=";
      for (size_t i = 0; i < cam.visibility.size(); ++i)
        out << (i ? "," : "") << cam.visibility[i];
      out << '\n';
    }
  }
}

CalibProblem load_dataset(const fs::path& manifest_path) {
  const DatasetManifest m = read_manifest(manifest_path);
  CalibProblem problem;

  for (int i = 0; i < m.n_poses; ++i) {
    const fs::path p = m.root / pattern_file(m.b_pose_pattern, i);
    if (!fs::exists(p))
      throw ManifestError("missing B pose file for index " + std::to_string(i) +
                          ": " + p.string());
    problem.b_poses.push_back(read_htm(p));
  }
  if (!m.target_file.empty())
    problem.target = read_target(m.root / m.target_file);

  for (const auto& mc : m.cameras) {
    CameraData cam;
    cam.id = mc.id;
    cam.visibility = mc.visibility;
    if (cam.visibility.empty())
      for (int i = 0; i < m.n_poses; ++i) cam.visibility.push_back(i);
    std::sort(cam.visibility.begin(), cam.visibility.end());

    if (!mc.intrinsics_file.empty()) {
      cam.intrinsics = read_intrinsics(m.root / mc.intrinsics_file);
      cam.has_intrinsics = true;
    }
    if (!mc.observations_file.empty())
      cam.observations =
          read_observations(m.root / mc.observations_file, mc.id);
    for (const auto& obs : cam.observations) {
      if (obs.pose < 0 || obs.pose >= m.n_poses)
        throw ManifestError("observation pose index out of range for camera " +
                            std::to_string(mc.id));
      if (obs.point < 0 ||
          obs.point >= static_cast<int>(problem.target.points.size()))
        throw ManifestError("observation point index out of range for camera " +
                            std::to_string(mc.id));
    }

    if (!mc.a_pose_pattern.empty()) {
      for (int i : cam.visibility) {
        const fs::path p = m.root / pattern_file(mc.a_pose_pattern, i);
        if (!fs::exists(p))
          throw ManifestError("missing A pose file for camera " +
                              std::to_string(mc.id) + " index " +
                              std::to_string(i) + ": " + p.string());
        cam.a_poses[i] = read_htm(p);
      }
    } else if (cam.has_intrinsics && !cam.observations.empty()) {
      // Reconstruct the world->camera poses from the detections.
      for (int i : cam.visibility) {
        std::vector<Observation> view;
        for (const auto& obs : cam.observations)
          if (obs.pose == i) view.push_back(obs);
        try {
          cam.a_poses[i] = estimate_planar_pose(problem.target, view,
                                                cam.intrinsics);
        } catch (const Error& e) {
          throw ExtrinsicsError("camera " + std::to_string(mc.id) + " pose " +
                                std::to_string(i) + ": " + e.what());
        }
      }
    }
    problem.cameras.push_back(std::move(cam));
  }
  return problem;
}

void dump_sim_dataset(const fs::path& dir, const SimDataset& ds) {
  fs::create_directories(dir);
  for (int i = 0; i < ds.config.n_poses; ++i) {
    write_htm(dir / pattern_file("A_%04d.txt", i), ds.a_poses[i]);
    write_htm(dir / pattern_file("B_%04d.txt", i), ds.b_poses[i]);
  }
  write_htm(dir / "truth_X.txt", ds.truth_x);
  write_htm(dir / "truth_Z.txt", ds.truth_z);

  DatasetManifest m;
  m.n_poses = ds.config.n_poses;
  m.b_pose_pattern = "B_%04d.txt";
  m.units = ds.config.scale == TranslationScale::Unit ? "unit" : "mm";
  ManifestCamera cam;
  cam.id = 0;
  cam.a_pose_pattern = "A_%04d.txt";
  m.cameras.push_back(cam);
  write_manifest(dir / "manifest.txt", m);
}

void dump_camera_dataset(const fs::path& dir, const SynthCameraDataset& ds) {
  fs::create_directories(dir);
  const auto& cam = ds.problem.cameras.front();
  for (int i = 0; i < ds.problem.n_poses(); ++i) {
    write_htm(dir / pattern_file("A_%04d.txt", i), cam.a_poses.at(i));
    write_htm(dir / pattern_file("B_%04d.txt", i), ds.problem.b_poses[i]);
  }
  write_htm(dir / "truth_X.txt", ds.truth_x);
  write_htm(dir / "truth_Z.txt", ds.truth_z);
  write_intrinsics(dir / "intrinsics_0.txt", cam.intrinsics);
  write_target(dir / "target.txt", ds.problem.target);
  write_observations(dir / "observations_0.csv", 0, cam.observations);

  DatasetManifest m;
  m.n_poses = ds.problem.n_poses();
  m.b_pose_pattern = "B_%04d.txt";
  m.target_file = "target.txt";
  m.units = "mm";
  ManifestCamera mc;
  mc.id = 0;
  mc.a_pose_pattern = "A_%04d.txt";
  mc.intrinsics_file = "intrinsics_0.txt";
  mc.observations_file = "observations_0.csv";
  m.cameras.push_back(mc);
  write_manifest(dir / "manifest.txt", m);
}

Method method_from_name(const std::string& name) {
  if (name == "c1-sim") return Method::C1Sim;
  if (name == "c1-sep") return Method::C1Sep;
  if (name == "c2-sim") return Method::C2Sim;
  if (name == "c2-sep") return Method::C2Sep;
  if (name == "rp1") return Method::RP1;
  if (name == "rp2") return Method::RP2;
  throw ConfigError("unknown method '" + name +
                    "' (expected c1-sim, c1-sep, c2-sim, c2-sep, rp1, rp2)");
}

RotationKind rotation_from_name(const std::string& name) {
  if (name == "euler") return RotationKind::EulerXYZ;
  if (name == "axis-angle") return RotationKind::AxisAngle;
  if (name == "quaternion") return RotationKind::Quaternion;
  throw ConfigError("unknown rotation '" + name +
                    "' (expected euler, axis-angle, quaternion)");
}

namespace {

bool problem_has_observations(const CalibProblem& p) {
  if (p.target.points.empty()) return false;
  for (const auto& cam : p.cameras)
    if (!cam.has_intrinsics || cam.observations.empty()) return false;
  return true;
}

RunEntry run_one(Method method, RotationKind kind, const CalibProblem& problem,
                 const SolverOptions& options) {
  RunEntry entry;
  entry.method = method;
  entry.rotation = kind;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (method) {
      case Method::C1Sim:
        entry.result = solve_c1_simultaneous(problem, kind, options);
        break;
      case Method::C1Sep:
        entry.result = solve_c1_separable(problem, kind, options);
        break;
      case Method::C2Sim:
        entry.result = solve_c2_simultaneous(problem, kind, options);
        break;
      case Method::C2Sep:
        entry.result = solve_c2_separable(problem, kind, options);
        break;
      case Method::RP1: {
        ReprojResult r = solve_rp1(problem, kind, options);
        entry.result = r.base;
        break;
      }
      case Method::RP2: {
        ReprojResult r = solve_rp2(problem, kind, options);
        entry.result = r.base;
        entry.refined_intrinsics = r.refined_intrinsics;
        break;
      }
    }
    entry.ok = true;
  } catch (const Error& e) {
    entry.error = e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (entry.ok) {
    const std::vector<CameraIntrinsics>* ks =
        entry.refined_intrinsics ? &*entry.refined_intrinsics : nullptr;
    entry.metrics =
        compute_metrics(entry.result.x, entry.result.z, problem, elapsed, ks);
  }
  return entry;
}

}  // namespace

std::vector<RunEntry> run_methods(const RunConfig& config,
                                  const CalibProblem& problem) {
  if (config.methods.empty() || config.rotations.empty())
    throw ConfigError("need at least one method and one rotation kind");

  const bool needs_obs =
      std::any_of(config.methods.begin(), config.methods.end(), [](Method m) {
        return m == Method::RP1 || m == Method::RP2;
      });
  if (needs_obs && !problem_has_observations(problem))
    throw ConfigError(
        "rp1/rp2 need intrinsics, target geometry, and observations");

  std::vector<std::pair<Method, RotationKind>> cells;
  for (Method m : config.methods)
    for (RotationKind k : config.rotations) cells.emplace_back(m, k);

  std::vector<RunEntry> entries(cells.size());
  if (config.parallel_cells) {
    const int n = static_cast<int>(cells.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel_enabled())
#endif
    for (int i = 0; i < n; ++i)
      entries[i] = run_one(cells[i].first, cells[i].second, problem,
                           config.solver_options);
  } else {
    for (size_t i = 0; i < cells.size(); ++i)
      entries[i] = run_one(cells[i].first, cells[i].second, problem,
                           config.solver_options);
  }

  if (std::none_of(entries.begin(), entries.end(),
                   [](const RunEntry& e) { return e.ok; }))
    throw ConvergenceFailure("every requested method failed");

  if (!config.output_dir.empty()) {
    fs::create_directories(config.output_dir);
    write_report_csv(config.output_dir / "report.csv", entries,
                     problem.n_cameras());
    for (const auto& e : entries) {
      if (!e.ok) continue;
      const std::string tag = std::string(method_name(e.method)) + "_" +
                              rotation_kind_name(e.rotation);
      write_htm(config.output_dir / ("X_" + tag + ".txt"), e.result.x);
      for (size_t d = 0; d < e.result.z.size(); ++d)
        write_htm(config.output_dir /
                      ("Z" + std::to_string(d) + "_" + tag + ".txt"),
                  e.result.z[d]);
    }
  }
  return entries;
}

std::string report_csv_header(int n_cameras) {
  std::string h = "method,rotation,time_s,e_r1,e_r2_deg,e_t_mm2,e_c";
  for (int d = 0; d < n_cameras; ++d)
    h += ",rrmse_px_" + std::to_string(d);
  h += ",rae_mm,rae_sq_mm2,status";
  return h;
}

void write_report_csv(const fs::path& path, const std::vector<RunEntry>& rows,
                      int n_cameras) {
  auto out = open_out(path);
  out << report_csv_header(n_cameras) << '\n';
  for (const auto& e : rows) {
    out << method_name(e.method) << ',' << rotation_kind_name(e.rotation);
    if (!e.ok) {
      out << ",nan,nan,nan,nan,nan";
      for (int d = 0; d < n_cameras; ++d) out << ",nan";
      out << ",nan,nan,failed: " << e.error << '\n';
      continue;
    }
    const auto& m = e.metrics;
    out << ',' << fmt(m.runtime_s) << ',' << fmt(m.e_r1) << ','
        << fmt(m.e_r2_deg) << ',' << fmt(m.e_t_mm2) << ',' << fmt(m.e_c);
    for (int d = 0; d < n_cameras; ++d) {
      if (d < static_cast<int>(m.rrmse_per_camera.size()))
        out << ',' << fmt(m.rrmse_per_camera[d]);
      else
        out << ",nan";
    }
    out << ',' << fmt(m.rae_mm) << ',' << fmt(m.rae_sq_mm2) << ",ok\n";
  }
}

void write_sweep_csv(const fs::path& path, const SweepReport& report) {
  auto out = open_out(path);
  out << "solver,rotation,eta,trial,e_RX,e_RZ,e_tX,e_tZ,time_s\n";
  for (const auto& r : report.rows) {
    out << method_name(r.method) << ',' << rotation_kind_name(r.rotation)
        << ',' << fmt(r.eta) << ',' << r.trial << ',';
    if (r.failed)
      out << "nan,nan,nan,nan";
    else
      out << fmt(r.errors.e_rx) << ',' << fmt(r.errors.e_rz) << ','
          << fmt(r.errors.e_tx) << ',' << fmt(r.errors.e_tz);
    out << ',' << fmt(r.time_s) << '\n';
  }
}

void write_sweep_means_csv(const fs::path& path,
                           const std::vector<SweepMeanRow>& means) {
  auto out = open_out(path);
  out << "solver,rotation,eta,mean_e_RX,mean_e_RZ,mean_e_tX,mean_e_tZ,"
         "trials_ok\n";
  for (const auto& m : means) {
    out << method_name(m.method) << ',' << rotation_kind_name(m.rotation)
        << ',' << fmt(m.eta) << ',' << fmt(m.mean.e_rx) << ','
        << fmt(m.mean.e_rz) << ',' << fmt(m.mean.e_tx) << ','
        << fmt(m.mean.e_tz) << ',' << m.trials_ok << '\n';
  }
}

}  // namespace rwhec
