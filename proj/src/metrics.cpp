#include "rwhec/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "rwhec/parallel.hpp"

namespace rwhec {

namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

// Pooled mean over all (camera, visible pose) pairs.
template <typename Term>
double pooled_mean(const CalibProblem& p, const std::vector<HTM>& z,
                   Term term) {
  double sum = 0.0;
  int count = 0;
  for (int d = 0; d < p.n_cameras(); ++d) {
    const auto& cam = p.cameras[d];
    for (int i : cam.visibility) {
      sum += term(cam.a_poses.at(i), p.b_poses[i], z[d]);
      ++count;
    }
  }
  return count > 0 ? sum / count : 0.0;
}

}  // namespace

double e_r1(const HTM& x, const std::vector<HTM>& z, const CalibProblem& p) {
  return pooled_mean(p, z, [&x](const HTM& a, const HTM& b, const HTM& zd) {
    return (a.r * x.r - zd.r * b.r).squaredNorm();
  });
}

double e_r2(const HTM& x, const std::vector<HTM>& z, const CalibProblem& p) {
  const double mean_rad =
      pooled_mean(p, z, [&x](const HTM& a, const HTM& b, const HTM& zd) {
        const Mat3 rel = (zd.r * b.r).transpose() * (a.r * x.r);
        return rotation_angle(rel);
      });
  return mean_rad * kRadToDeg;
}

double e_t(const HTM& x, const std::vector<HTM>& z, const CalibProblem& p) {
  return pooled_mean(p, z, [&x](const HTM& a, const HTM& b, const HTM& zd) {
    const Vec3 lhs = a.r * x.t + a.t;
    const Vec3 rhs = zd.r * b.t + zd.t;
    return (lhs - rhs).squaredNorm();
  });
}

double e_c(const HTM& x, const std::vector<HTM>& z, const CalibProblem& p) {
  return pooled_mean(p, z, [&x](const HTM& a, const HTM& b, const HTM& zd) {
    const HTM lhs = compose(a, x);
    const HTM rhs = compose(zd, b);
    return (lhs.r - rhs.r).squaredNorm() + (lhs.t - rhs.t).squaredNorm();
  });
}

SimErrors sim_errors(const HTM& est_x, const HTM& est_z, const HTM& true_x,
                     const HTM& true_z) {
  SimErrors e;
  e.e_rx = (est_x.r - true_x.r).norm();
  e.e_rz = (est_z.r - true_z.r).norm();
  e.e_tx = (est_x.t - true_x.t).norm();
  e.e_tz = (est_z.t - true_z.t).norm();
  return e;
}

namespace {

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit
};

Ray sighting_ray(const Sighting& s) {
  const Vec2 xy = undistort_normalized(s.intrinsics, s.uv);
  const Mat3 rt = s.world_to_cam.r.transpose();
  Ray ray;
  ray.origin = -(rt * s.world_to_cam.t);
  ray.dir = (rt * Vec3(xy.x(), xy.y(), 1.0)).normalized();
  return ray;
}

// Midpoint of the shortest segment between two lines; falls back to the
// mean origin when the lines are (numerically) parallel.
Vec3 ray_midpoint(const Ray& a, const Ray& b) {
  const Vec3 w0 = a.origin - b.origin;
  const double dab = a.dir.dot(b.dir);
  const double denom = 1.0 - dab * dab;
  if (denom < 1e-14) return 0.5 * (a.origin + b.origin);
  const double s = (dab * w0.dot(b.dir) - w0.dot(a.dir)) / denom;
  const double t = (w0.dot(b.dir) - dab * w0.dot(a.dir)) / denom;
  return 0.5 * ((a.origin + s * a.dir) + (b.origin + t * b.dir));
}

}  // namespace

TriangulatedPoint triangulate_point(const std::vector<Sighting>& sightings) {
  if (sightings.size() < 2)
    throw InsufficientViews("triangulation needs at least 2 sightings");

  std::vector<Ray> rays;
  rays.reserve(sightings.size());
  for (const auto& s : sightings) rays.push_back(sighting_ray(s));

  // Seed from the two most widely separated rays.
  size_t best_i = 0, best_j = 1;
  double best_angle = -1.0;
  for (size_t i = 0; i < rays.size(); ++i) {
    for (size_t j = i + 1; j < rays.size(); ++j) {
      const double angle =
          std::acos(std::clamp(rays[i].dir.dot(rays[j].dir), -1.0, 1.0));
      if (angle > best_angle) {
        best_angle = angle;
        best_i = i;
        best_j = j;
      }
    }
  }

  TriangulatedPoint out;
  out.ill_conditioned = best_angle < 0.1 * M_PI / 180.0;
  const Vec3 seed = ray_midpoint(rays[best_i], rays[best_j]);

  LeastSquaresProblem lsq;
  lsq.initial_params = seed;
  lsq.residual_fn = [&sightings](const VecX& p) {
    VecX r(2 * sightings.size());
    const Vec3 y(p[0], p[1], p[2]);
    int idx = 0;
    for (const auto& s : sightings) {
      const Vec3 pc = s.world_to_cam.apply(y);
      if (pc.z() <= 1e-9) {
        r[idx++] = 1e6;
        r[idx++] = 1e6;
        continue;
      }
      const Vec2 proj = project(s.intrinsics, pc);
      r[idx++] = s.uv.x() - proj.x();
      r[idx++] = s.uv.y() - proj.y();
    }
    return r;
  };
  const LMResult lm = solve_lm(lsq);
  out.point = Vec3(lm.params[0], lm.params[1], lm.params[2]);
  return out;
}

RaeReport rae(const HTM& x, const std::vector<HTM>& z,
              const std::vector<CameraIntrinsics>& k, const CalibProblem& p) {
  const int m = static_cast<int>(p.target.points.size());
  const HTM xtilde = inverse(x);

  // Sightings of each target point across cameras and poses.
  std::vector<std::vector<Sighting>> per_point(m);
  for (int d = 0; d < p.n_cameras(); ++d) {
    for (const auto& obs : p.cameras[d].observations) {
      Sighting s;
      s.world_to_cam = compose(z[d], compose(p.b_poses[obs.pose], xtilde));
      s.intrinsics = k[d];
      s.uv = obs.uv;
      per_point[obs.point].push_back(s);
    }
  }

  std::vector<double> dist(m, 0.0);
  std::vector<unsigned char> ill(m, 0);
  std::vector<std::string> errors(m);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel_enabled())
#endif
  for (int j = 0; j < m; ++j) {
    try {
      const TriangulatedPoint tp = triangulate_point(per_point[j]);
      dist[j] = (tp.point - p.target.points[j]).norm();
      ill[j] = tp.ill_conditioned ? 1 : 0;
    } catch (const Error& e) {
      errors[j] = e.what();
    }
  }
  for (int j = 0; j < m; ++j)
    if (!errors[j].empty())
      throw InsufficientViews("target point " + std::to_string(j) + ": " +
                              errors[j]);

  RaeReport report;
  for (int j = 0; j < m; ++j) {
    report.rae_mm += dist[j];
    report.rae_sq_mm2 += dist[j] * dist[j];
    report.any_ill_conditioned |= (ill[j] != 0);
  }
  report.rae_mm /= m;
  report.rae_sq_mm2 /= m;
  return report;
}

MetricsReport compute_metrics(const HTM& x, const std::vector<HTM>& z,
                              const CalibProblem& p, double runtime_s,
                              const std::vector<CameraIntrinsics>* intrinsics) {
  MetricsReport report;
  report.runtime_s = runtime_s;

  bool have_a = true;
  for (const auto& cam : p.cameras)
    for (int i : cam.visibility)
      if (!cam.a_poses.count(i)) have_a = false;
  if (have_a) {
    report.e_r1 = e_r1(x, z, p);
    report.e_r2_deg = e_r2(x, z, p);
    report.e_t_mm2 = e_t(x, z, p);
    report.e_c = e_c(x, z, p);
  }

  bool have_obs = !p.target.points.empty();
  std::vector<CameraIntrinsics> ks;
  for (const auto& cam : p.cameras) {
    if (!cam.has_intrinsics || cam.observations.empty()) have_obs = false;
    ks.push_back(cam.intrinsics);
  }
  if (intrinsics) ks = *intrinsics;
  if (have_obs) {
    const RsseReport rsse = compute_rsse(x, z, ks, p);
    report.rrmse_per_camera = rsse.rrmse_per_camera;

    std::vector<int> sighting_count(p.target.points.size(), 0);
    for (const auto& cam : p.cameras)
      for (const auto& obs : cam.observations) ++sighting_count[obs.point];
    const bool triangulable =
        std::all_of(sighting_count.begin(), sighting_count.end(),
                    [](int c) { return c >= 2; });
    if (triangulable) {
      const RaeReport r = rae(x, z, ks, p);
      report.rae_mm = r.rae_mm;
      report.rae_sq_mm2 = r.rae_sq_mm2;
    }
  }
  return report;
}

}  // namespace rwhec
