#include "rwhec/simulate.hpp"

#include <chrono>
#include <cmath>

#include "rwhec/calib_axzb.hpp"
#include "rwhec/parallel.hpp"

namespace rwhec {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 step over base ^ stream
  std::uint64_t z = (base ^ stream) + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VecX q(4);
  do {
    for (int i = 0; i < 4; ++i) q[i] = gauss(rng);
  } while (q.norm() < 1e-12);
  return rot_from_param(RotationParam{RotationKind::Quaternion, q, false});
}

Mat3 add_quaternion_noise(const Mat3& r, double eta, std::mt19937_64& rng) {
  const RotationParam q = param_from_rot(r, RotationKind::Quaternion);
  std::uniform_real_distribution<double> noise(-eta, eta);
  VecX qn(4);
  do {
    for (int i = 0; i < 4; ++i) qn[i] = q.p[i] + noise(rng);
  } while (qn.norm() < 1e-9);
  return rot_from_param(RotationParam{RotationKind::Quaternion, qn, false});
}

namespace {

Vec3 random_translation(std::mt19937_64& rng, double hi) {
  std::uniform_real_distribution<double> uni(0.0, hi);
  Vec3 t;
  for (int i = 0; i < 3; ++i) t[i] = uni(rng);
  return t;
}

}  // namespace

SimDataset generate(const SimConfig& config) {
  if (config.eta < 0.0 || config.eta > 0.25)
    throw ConfigError("eta must lie in [0, 0.25]");
  if (config.n_poses < 3) throw ConfigError("need at least 3 poses");

  std::mt19937_64 rng(config.seed);
  const double hi = config.scale == TranslationScale::Unit ? 1.0 : 1000.0;

  SimDataset ds;
  ds.config = config;
  ds.truth_x = HTM{random_rotation(rng), random_translation(rng, hi)};
  ds.truth_z = HTM{random_rotation(rng), random_translation(rng, hi)};
  const HTM z_inv = inverse(ds.truth_z);
  for (int i = 0; i < config.n_poses; ++i) {
    HTM a{random_rotation(rng), random_translation(rng, hi)};
    ds.a_poses.push_back(a);
    ds.b_poses.push_back(compose(z_inv, compose(a, ds.truth_x)));
  }
  if (config.eta > 0.0) {
    for (auto& b : ds.b_poses)
      b.r = add_quaternion_noise(b.r, config.eta, rng);
  }
  return ds;
}

CalibProblem to_problem(const SimDataset& ds) {
  CalibProblem p;
  p.b_poses = ds.b_poses;
  CameraData cam;
  cam.id = 0;
  for (int i = 0; i < ds.config.n_poses; ++i) {
    cam.a_poses[i] = ds.a_poses[i];
    cam.visibility.push_back(i);
  }
  p.cameras.push_back(std::move(cam));
  return p;
}

std::vector<double> sweep_eta_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 19; ++k) grid.push_back(0.25 * k / 19.0);
  return grid;
}

namespace {

CalibResult dispatch_class1(Method m, const CalibProblem& p,
                            RotationKind kind) {
  switch (m) {
    case Method::C1Sim: return solve_c1_simultaneous(p, kind);
    case Method::C1Sep: return solve_c1_separable(p, kind);
    case Method::C2Sim: return solve_c2_simultaneous(p, kind);
    case Method::C2Sep: return solve_c2_separable(p, kind);
    default:
      throw ConfigError("sweep supports the class-1 methods only");
  }
}

}  // namespace

SweepReport run_sweep(const SimConfig& base, const std::vector<Method>& methods,
                      const std::vector<RotationKind>& rotations) {
  if (methods.empty()) throw ConfigError("sweep needs at least one solver");
  for (Method m : methods)
    if (m == Method::RP1 || m == Method::RP2)
      throw ConfigError("sweep supports the class-1 methods only");

  const std::vector<double> grid = sweep_eta_grid();
  const int n_eta = static_cast<int>(grid.size());
  const int cells = n_eta * base.trials;
  const int per_cell = static_cast<int>(methods.size() * rotations.size());

  SweepReport report;
  report.rows.resize(static_cast<size_t>(cells) * per_cell);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel_enabled())
#endif
  for (int cell = 0; cell < cells; ++cell) {
    const int eta_idx = cell / base.trials;
    const int trial = cell % base.trials;
    SimConfig cfg = base;
    cfg.eta = grid[eta_idx];
    cfg.seed = derive_seed(base.seed,
                           static_cast<std::uint64_t>(eta_idx) * 1000003ull +
                               static_cast<std::uint64_t>(trial));
    const SimDataset ds = generate(cfg);
    const CalibProblem problem = to_problem(ds);

    int slot = cell * per_cell;
    for (Method m : methods) {
      for (RotationKind kind : rotations) {
        SweepRow row;
        row.method = m;
        row.rotation = kind;
        row.eta = cfg.eta;
        row.trial = trial;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          const CalibResult res = dispatch_class1(m, problem, kind);
          row.errors =
              sim_errors(res.x, res.z.front(), ds.truth_x, ds.truth_z);
        } catch (const Error&) {
          row.failed = true;
        }
        row.time_s = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
        report.rows[slot++] = row;
      }
    }
  }
  return report;
}

std::vector<SweepMeanRow> sweep_means(const SweepReport& report) {
  // Preserve first-appearance order of (method, rotation, eta).
  std::vector<SweepMeanRow> means;
  for (const auto& row : report.rows) {
    SweepMeanRow* slot = nullptr;
    for (auto& m : means) {
      if (m.method == row.method && m.rotation == row.rotation &&
          m.eta == row.eta) {
        slot = &m;
        break;
      }
    }
    if (!slot) {
      means.push_back(SweepMeanRow{row.method, row.rotation, row.eta,
                                   SimErrors{}, 0});
      slot = &means.back();
    }
    if (!row.failed) {
      slot->mean.e_rx += row.errors.e_rx;
      slot->mean.e_rz += row.errors.e_rz;
      slot->mean.e_tx += row.errors.e_tx;
      slot->mean.e_tz += row.errors.e_tz;
      slot->trials_ok += 1;
    }
  }
  for (auto& m : means) {
    if (m.trials_ok > 0) {
      m.mean.e_rx /= m.trials_ok;
      m.mean.e_rz /= m.trials_ok;
      m.mean.e_tx /= m.trials_ok;
      m.mean.e_tz /= m.trials_ok;
    }
  }
  return means;
}

SynthCameraDataset synth_camera_dataset(int n_poses, const TargetModel& target,
                                        const CameraIntrinsics& k,
                                        const HTM& truth_x, const HTM& truth_z,
                                        double pixel_noise_sigma,
                                        std::uint64_t seed) {
  if (n_poses < 3) throw ConfigError("need at least 3 poses");
  if (target.points.size() < 4) throw ConfigError("target needs >= 4 points");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  Vec3 centroid = Vec3::Zero();
  for (const auto& p : target.points) centroid += p;
  centroid /= static_cast<double>(target.points.size());
  double extent = 0.0;
  for (const auto& p : target.points)
    extent = std::max(extent, (p - centroid).norm());
  extent = std::max(extent, 1.0);

  const HTM xtilde = inverse(truth_x);
  const HTM z_inv = inverse(truth_z);

  SynthCameraDataset out;
  out.truth_x = truth_x;
  out.truth_z = truth_z;

  CameraData cam;
  cam.id = 0;
  cam.has_intrinsics = true;
  cam.intrinsics = k;

  for (int i = 0; i < n_poses; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      // Camera center on a jittered shell in front of the target, looking
      // at a point near the centroid with a random roll.
      Vec3 dir(gauss(rng), gauss(rng), -std::abs(gauss(rng)) - 0.5);
      dir.normalize();
      const double radius = extent * (2.5 + 2.0 * uni(rng));
      const Vec3 center = centroid - radius * dir;
      const Vec3 look_at =
          centroid + 0.15 * extent * Vec3(gauss(rng), gauss(rng), 0.0);

      const Vec3 zc = (look_at - center).normalized();
      Vec3 up(gauss(rng), gauss(rng), gauss(rng));
      up -= up.dot(zc) * zc;
      if (up.norm() < 1e-6) continue;
      up.normalize();
      const Vec3 xc = up.cross(zc).normalized();
      const Vec3 yc = zc.cross(xc);

      Mat3 r_wc;  // world -> camera
      r_wc.row(0) = xc;
      r_wc.row(1) = yc;
      r_wc.row(2) = zc;
      const HTM a{r_wc, -(r_wc * center)};

      bool visible = true;
      for (const auto& pt : target.points) {
        const Vec3 pc = a.apply(pt);
        if (pc.z() <= 1e-6) {
          visible = false;
          break;
        }
        // Keep normalized radius moderate so distortion stays invertible.
        const double nx = pc.x() / pc.z();
        const double ny = pc.y() / pc.z();
        if (nx * nx + ny * ny > 1.0) {
          visible = false;
          break;
        }
      }
      if (!visible) continue;

      const HTM b = compose(z_inv, compose(a, truth_x));
      out.problem.b_poses.push_back(b);
      cam.a_poses[i] = a;
      cam.visibility.push_back(i);
      for (int j = 0; j < static_cast<int>(target.points.size()); ++j) {
        Vec2 uv = project_chain(k, truth_z, b, xtilde, target.points[j]);
        if (pixel_noise_sigma > 0.0) {
          uv.x() += pixel_noise_sigma * gauss(rng);
          uv.y() += pixel_noise_sigma * gauss(rng);
        }
        cam.observations.push_back(Observation{i, j, uv});
      }
      placed = true;
    }
    if (!placed)
      throw GeometryError("could not place camera pose " + std::to_string(i) +
                          " with full target visibility");
  }

  out.problem.cameras.push_back(std::move(cam));
  out.problem.target = target;
  return out;
}

}  // namespace rwhec
