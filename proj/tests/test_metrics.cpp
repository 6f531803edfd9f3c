#include <doctest.h>

#include <random>

#include "rwhec/metrics.hpp"
#include "support.hpp"

using namespace rwhec;

namespace {

// Random, not necessarily consistent, pose data.
CalibProblem random_problem(std::mt19937_64& rng, int n = 10) {
  CalibProblem p;
  CameraData cam;
  for (int i = 0; i < n; ++i) {
    p.b_poses.push_back(test::random_htm(rng, 2.0));
    cam.a_poses[i] = test::random_htm(rng, 2.0);
    cam.visibility.push_back(i);
  }
  p.cameras.push_back(std::move(cam));
  return p;
}

}  // namespace

TEST_CASE("metrics vanish at an exact solution") {
  const auto gen = test::generated_problem(1234);
  const std::vector<HTM> z{gen.truth_z};
  CHECK(e_r1(gen.truth_x, z, gen.problem) < 1e-20);
  CHECK(e_r2(gen.truth_x, z, gen.problem) < 1e-5);
  CHECK(e_t(gen.truth_x, z, gen.problem) < 1e-20);
  CHECK(e_c(gen.truth_x, z, gen.problem) < 1e-20);
}

TEST_CASE("e_r1 of a small rotation offset matches the closed form") {
  // Identity A, B, Z; X rotated by theta about z: ||R - I||_F^2 = 4(1-cos).
  CalibProblem p;
  CameraData cam;
  for (int i = 0; i < 4; ++i) {
    p.b_poses.push_back(HTM{});
    cam.a_poses[i] = HTM{};
    cam.visibility.push_back(i);
  }
  p.cameras.push_back(std::move(cam));

  const double theta = 0.01;
  VecX rot(3);
  rot << 0, 0, theta;
  HTM x;
  x.r = rot_from_param({RotationKind::EulerXYZ, rot, false});
  const double val = e_r1(x, {HTM{}}, p);
  CHECK(val == doctest::Approx(4.0 * (1.0 - std::cos(theta))).epsilon(1e-9));
  CHECK(val == doctest::Approx(2e-4).epsilon(1e-2));
}

TEST_CASE("e_r2 of a one-degree relative rotation is one degree") {
  CalibProblem p;
  CameraData cam;
  for (int i = 0; i < 3; ++i) {
    p.b_poses.push_back(HTM{});
    cam.a_poses[i] = HTM{};
    cam.visibility.push_back(i);
  }
  p.cameras.push_back(std::move(cam));

  VecX rot(3);
  rot << M_PI / 180.0, 0, 0;
  HTM x;
  x.r = rot_from_param({RotationKind::AxisAngle, rot, false});
  CHECK(e_r2(x, {HTM{}}, p) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("e_t translation offset") {
  CalibProblem p;
  CameraData cam;
  for (int i = 0; i < 5; ++i) {
    p.b_poses.push_back(HTM{});
    cam.a_poses[i] = HTM{};
    cam.visibility.push_back(i);
  }
  p.cameras.push_back(std::move(cam));
  HTM x;
  x.t = Vec3(1, 1, 1);
  CHECK(e_t(x, {HTM{}}, p) == doctest::Approx(3.0));
}

TEST_CASE("decomposition identity e_c = e_r1 + e_t") {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 200; ++trial) {
    const CalibProblem p = random_problem(rng);
    const HTM x = test::random_htm(rng, 2.0);
    const std::vector<HTM> z{test::random_htm(rng, 2.0)};
    const double lhs = e_c(x, z, p);
    const double rhs = e_r1(x, z, p) + e_t(x, z, p);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("frobenius-angle identity links e_r1 and e_r2") {
  std::mt19937_64 rng(314);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat3 r1 = test::random_rotation_matrix(rng);
    const Mat3 r2 = test::random_rotation_matrix(rng);
    const double frob2 = (r1 - r2).squaredNorm();
    const double theta = rotation_angle(r1.transpose() * r2);
    CHECK(std::abs(frob2 - 4.0 * (1.0 - std::cos(theta))) <=
          1e-9 * std::max(1.0, frob2));
  }
}

TEST_CASE("metrics consume matrices only: identical across rotation kinds") {
  const auto gen = test::generated_problem(555);
  // Same (X, Z) delivered through different parameterizations round-trips
  // to the same matrices, hence the same metric values.
  for (RotationKind kind : {RotationKind::EulerXYZ, RotationKind::AxisAngle,
                            RotationKind::Quaternion}) {
    HTM x = gen.truth_x;
    x.r = rot_from_param(param_from_rot(gen.truth_x.r, kind));
    const double v = e_c(x, {gen.truth_z}, gen.problem);
    CHECK(v < 1e-15);
  }
}

TEST_CASE("sim_errors basics") {
  std::mt19937_64 rng(9);
  const HTM t = test::random_htm(rng);
  const SimErrors zero = sim_errors(t, t, t, t);
  CHECK(zero.e_rx == 0.0);
  CHECK(zero.e_rz == 0.0);
  CHECK(zero.e_tx == 0.0);
  CHECK(zero.e_tz == 0.0);

  // Half-turn about a perpendicular axis gives the maximum Frobenius
  // distance 2*sqrt(2).
  HTM flipped = t;
  VecX p(3);
  p << M_PI, 0, 0;
  flipped.r = t.r * rot_from_param({RotationKind::AxisAngle, p, false});
  const SimErrors e = sim_errors(flipped, t, t, t);
  CHECK(e.e_rx == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("triangulation recovers target points from clean sightings") {
  std::mt19937_64 rng(99);
  CameraIntrinsics k;
  k.fx = 900.0;
  k.fy = 910.0;
  k.cx = 320.0;
  k.cy = 240.0;
  const HTM truth_x{random_rotation(rng), Vec3(60.0, -20.0, 30.0)};
  const HTM truth_z{random_rotation(rng), Vec3(10.0, 5.0, 40.0)};
  const SynthCameraDataset ds = synth_camera_dataset(
      12, make_chessboard(4, 5, 12.0), k, truth_x, truth_z, 0.0, 2101);

  const HTM xtilde = inverse(ds.truth_x);
  for (int j = 0; j < 4; ++j) {
    std::vector<Sighting> sightings;
    for (const auto& obs : ds.problem.cameras[0].observations) {
      if (obs.point != j) continue;
      Sighting s;
      s.world_to_cam = compose(ds.truth_z,
                               compose(ds.problem.b_poses[obs.pose], xtilde));
      s.intrinsics = k;
      s.uv = obs.uv;
      sightings.push_back(s);
    }
    const TriangulatedPoint tp = triangulate_point(sightings);
    CHECK((tp.point - ds.problem.target.points[j]).norm() < 1e-8);
    CHECK_FALSE(tp.ill_conditioned);
  }
}

TEST_CASE("triangulation exact two-view intersection") {
  CameraIntrinsics k;
  k.fx = k.fy = 800.0;
  k.cx = 400.0;
  k.cy = 300.0;
  // Camera 1 at the origin, point (0, 0, 100) on its optical axis.
  HTM cam1;
  Sighting s1{cam1, k, Vec2(400.0, 300.0)};
  // Camera 2 at (100, 0, 100) looking along -x toward the same point.
  Mat3 r2;
  r2 << 0, 0, 1, 0, 1, 0, -1, 0, 0;
  HTM cam2{r2, -(r2 * Vec3(100.0, 0.0, 100.0))};
  Sighting s2{cam2, k, project(k, cam2.apply(Vec3(0, 0, 100)))};
  const TriangulatedPoint tp = triangulate_point({s1, s2});
  CHECK((tp.point - Vec3(0, 0, 100)).norm() < 1e-8);
}

TEST_CASE("triangulation needs two views") {
  CameraIntrinsics k;
  k.fx = k.fy = 800.0;
  k.cx = 400.0;
  k.cy = 300.0;
  CHECK_THROWS_AS(triangulate_point({Sighting{HTM{}, k, Vec2(1, 2)}}),
                  InsufficientViews);
}

TEST_CASE("nearly parallel rays are flagged ill-conditioned") {
  CameraIntrinsics k;
  k.fx = k.fy = 800.0;
  k.cx = 400.0;
  k.cy = 300.0;
  HTM cam1;
  HTM cam2;
  cam2.t = Vec3(1e-4, 0, 0);  // microscopic baseline
  const Vec3 pt(0, 0, 1000.0);
  const Sighting s1{cam1, k, project(k, cam1.apply(pt))};
  const Sighting s2{cam2, k, project(k, cam2.apply(pt))};
  const TriangulatedPoint tp = triangulate_point({s1, s2});
  CHECK(tp.ill_conditioned);
}

TEST_CASE("triangulation close to the linear DLT oracle under noise") {
  std::mt19937_64 rng(424);
  CameraIntrinsics k;
  k.fx = 900.0;
  k.fy = 900.0;
  k.cx = 320.0;
  k.cy = 240.0;
  const HTM truth_x{random_rotation(rng), Vec3(60.0, -20.0, 30.0)};
  const HTM truth_z{random_rotation(rng), Vec3(10.0, 5.0, 40.0)};
  SynthCameraDataset ds = synth_camera_dataset(
      25, make_chessboard(4, 5, 12.0), k, truth_x, truth_z, 0.5, 2102);

  const HTM xtilde = inverse(ds.truth_x);
  const int j = 7;
  std::vector<Sighting> sightings;
  for (const auto& obs : ds.problem.cameras[0].observations) {
    if (obs.point != j) continue;
    Sighting s;
    s.world_to_cam =
        compose(ds.truth_z, compose(ds.problem.b_poses[obs.pose], xtilde));
    s.intrinsics = k;
    s.uv = obs.uv;
    sightings.push_back(s);
  }
  const TriangulatedPoint tp = triangulate_point(sightings);

  // DLT oracle on undistorted normalized coordinates.
  MatX design(2 * sightings.size(), 4);
  for (size_t i = 0; i < sightings.size(); ++i) {
    const Vec2 xy = undistort_normalized(k, sightings[i].uv);
    MatX p34(3, 4);
    p34.leftCols<3>() = sightings[i].world_to_cam.r;
    p34.col(3) = sightings[i].world_to_cam.t;
    design.row(2 * i) = xy.x() * p34.row(2) - p34.row(0);
    design.row(2 * i + 1) = xy.y() * p34.row(2) - p34.row(1);
  }
  Eigen::JacobiSVD<MatX> svd(design, Eigen::ComputeFullV);
  const Eigen::Vector4d h = svd.matrixV().col(3);
  const Vec3 dlt = h.head<3>() / h[3];

  const double err_lm = (tp.point - ds.problem.target.points[j]).norm();
  const double err_dlt = (dlt - ds.problem.target.points[j]).norm();
  CHECK(err_lm <= 5.0 * err_dlt + 1e-9);
}

TEST_CASE("rae is zero for a perfect calibration and clean observations") {
  std::mt19937_64 rng(11);
  CameraIntrinsics k;
  k.fx = 1000.0;
  k.fy = 1000.0;
  k.cx = 640.0;
  k.cy = 480.0;
  const HTM truth_x{random_rotation(rng), Vec3(100.0, 0.0, 50.0)};
  const HTM truth_z{random_rotation(rng), Vec3(0.0, 20.0, 70.0)};
  const SynthCameraDataset ds = synth_camera_dataset(
      10, make_chessboard(4, 4, 15.0), k, truth_x, truth_z, 0.0, 2103);
  const RaeReport r = rae(ds.truth_x, {ds.truth_z}, {k}, ds.problem);
  CHECK(r.rae_mm < 1e-6);
  CHECK(r.rae_sq_mm2 < 1e-12);
}

TEST_CASE("systematic X offset shows up in rae") {
  std::mt19937_64 rng(12);
  CameraIntrinsics k;
  k.fx = 1000.0;
  k.fy = 1000.0;
  k.cx = 640.0;
  k.cy = 480.0;
  const HTM truth_x{random_rotation(rng), Vec3(100.0, 0.0, 50.0)};
  const HTM truth_z{random_rotation(rng), Vec3(0.0, 20.0, 70.0)};
  const SynthCameraDataset ds = synth_camera_dataset(
      10, make_chessboard(4, 4, 15.0), k, truth_x, truth_z, 0.0, 2104);
  HTM shifted_x = ds.truth_x;
  shifted_x.t += ds.truth_x.r * Vec3(1.0, 0.0, 0.0);
  const RaeReport r = rae(shifted_x, {ds.truth_z}, {k}, ds.problem);
  CHECK(r.rae_mm > 0.5);
  CHECK(r.rae_mm < 2.0);
}
