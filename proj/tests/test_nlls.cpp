#include <doctest.h>

#include <random>

#include "rwhec/camera.hpp"
#include "rwhec/nlls.hpp"
#include "rwhec/parallel.hpp"

using namespace rwhec;

TEST_CASE("linear scalar problem converges immediately") {
  LeastSquaresProblem p;
  p.initial_params = VecX::Zero(1);
  p.residual_fn = [](const VecX& x) {
    VecX r(1);
    r[0] = x[0] - 3.0;
    return r;
  };
  const LMResult out = solve_lm(p);
  CHECK(std::abs(out.params[0] - 3.0) < 1e-10);
  // Within 1e-10 after at most three accepted steps.
  REQUIRE(out.report.cost_trace.size() >= 4);
  CHECK(out.report.cost_trace[3] < 1e-20);
  for (size_t i = 1; i < out.report.cost_trace.size(); ++i)
    CHECK(out.report.cost_trace[i] <= out.report.cost_trace[i - 1]);
}

TEST_CASE("rosenbrock reaches the global minimum") {
  LeastSquaresProblem p;
  p.initial_params = VecX(2);
  p.initial_params << -1.2, 1.0;
  p.residual_fn = [](const VecX& x) {
    VecX r(2);
    r[0] = 10.0 * (x[1] - x[0] * x[0]);
    r[1] = 1.0 - x[0];
    return r;
  };
  const LMResult out = solve_lm(p);
  CHECK(std::abs(out.params[0] - 1.0) < 1e-6);
  CHECK(std::abs(out.params[1] - 1.0) < 1e-6);
}

TEST_CASE("linear least squares matches the QR solution") {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    MatX a(20, 6);
    VecX b(20);
    for (int i = 0; i < a.rows(); ++i) {
      for (int j = 0; j < a.cols(); ++j) a(i, j) = gauss(rng);
      b[i] = gauss(rng);
    }
    const VecX x_qr = a.colPivHouseholderQr().solve(b);

    LeastSquaresProblem p;
    p.initial_params = VecX::Zero(6);
    p.residual_fn = [&a, &b](const VecX& x) { return VecX(a * x - b); };
    const LMResult out = solve_lm(p);
    CHECK((out.params - x_qr).norm() / (1.0 + x_qr.norm()) < 1e-8);
  }
}

TEST_CASE("invalid start is rejected") {
  LeastSquaresProblem p;
  p.initial_params = VecX::Zero(1);
  p.residual_fn = [](const VecX&) {
    VecX r(1);
    r[0] = std::numeric_limits<double>::quiet_NaN();
    return r;
  };
  CHECK_THROWS_AS(solve_lm(p), InvalidStart);
}

TEST_CASE("stalled termination at an unimprovable point") {
  // Cost floor at |x| = 0 cannot be improved; damping escalates and the
  // solver reports Stalled instead of looping.
  LeastSquaresProblem p;
  p.initial_params = VecX::Zero(1);
  p.residual_fn = [](const VecX& x) {
    VecX r(1);
    r[0] = std::sqrt(std::abs(x[0]) + 1.0);
    return r;
  };
  const LMResult out = solve_lm(p);
  CHECK(out.report.termination == Termination::Stalled);
  CHECK(out.report.final_cost == doctest::Approx(1.0));
}

TEST_CASE("jacobian of x^2 at 2") {
  LeastSquaresProblem p;
  p.initial_params = VecX::Zero(1);
  p.residual_fn = [](const VecX& x) {
    VecX r(1);
    r[0] = x[0] * x[0];
    return r;
  };
  VecX at(1);
  at << 2.0;
  const MatX j = jacobian(p, at);
  CHECK(std::abs(j(0, 0) - 4.0) < 1e-6);
}

TEST_CASE("jacobian is exact for linear maps") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  MatX a(9, 4);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) a(i, j) = gauss(rng);
  LeastSquaresProblem p;
  p.initial_params = VecX::Zero(4);
  p.residual_fn = [&a](const VecX& x) { return VecX(a * x); };
  VecX at(4);
  at << 0.3, -1.2, 0.7, 2.0;
  const MatX j = jacobian(p, at);
  CHECK((j - a).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("jacobian falls back to backward differences") {
  // Residual is NaN for x > 1; forward step from 1 - 1e-9 crosses the edge.
  LeastSquaresProblem p;
  p.initial_params = VecX::Zero(1);
  p.residual_fn = [](const VecX& x) {
    VecX r(1);
    r[0] = x[0] > 1.0 ? std::numeric_limits<double>::quiet_NaN() : x[0] * 2.0;
    return r;
  };
  VecX at(1);
  at << 1.0 - 1e-9;
  const MatX j = jacobian(p, at);
  CHECK(std::abs(j(0, 0) - 2.0) < 1e-6);
}

TEST_CASE("jacobian throws when both directions are non-finite") {
  LeastSquaresProblem p;
  p.initial_params = VecX::Zero(1);
  int calls = 0;
  p.residual_fn = [&calls](const VecX& x) {
    VecX r(1);
    ++calls;
    r[0] = calls == 1 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    return r;
  };
  VecX at(1);
  at << 0.0;
  const VecX r0 = [&] {
    VecX r(1);
    r[0] = 0.0;
    return r;
  }();
  calls = 1;
  CHECK_THROWS_AS(jacobian(p.residual_fn, at, r0), NonFiniteJacobian);
}

TEST_CASE("throwing residuals behave like non-finite ones") {
  // A residual that raises past a boundary: the jacobian falls back to the
  // other difference direction, and the solver rejects steps that cross.
  auto fn = [](const VecX& x) {
    if (x[0] > 1.0) throw PointBehindCamera("past the boundary");
    VecX r(1);
    r[0] = x[0] - 1.0;
    return r;
  };
  VecX at(1);
  at << 1.0 - 1e-9;
  const VecX r0 = fn(at);
  const MatX j = jacobian(fn, at, r0);
  CHECK(std::abs(j(0, 0) - 1.0) < 1e-6);

  LeastSquaresProblem p;
  p.initial_params = VecX::Zero(1);
  p.residual_fn = fn;
  const LMResult out = solve_lm(p);
  CHECK(out.params[0] <= 1.0);
  CHECK(std::abs(out.params[0] - 1.0) < 1e-6);
}

TEST_CASE("jacobian of the projection matches central differences") {
  CameraIntrinsics k;
  k.fx = 1000.0;
  k.fy = 980.0;
  k.cx = 512.0;
  k.cy = 384.0;
  k.dist = {0.05, -0.02, 0.001, -0.001, 0.002, 0.01, -0.005, 0.001};

  auto fn = [&k](const VecX& p) {
    const Vec2 uv = project(k, Vec3(p[0], p[1], p[2]));
    VecX r(2);
    r << uv.x(), uv.y();
    return r;
  };
  VecX at(3);
  at << 0.12, -0.07, 1.4;
  const MatX fwd = jacobian(fn, at, fn(at));

  MatX central(2, 3);
  const double h = 1e-5;
  for (int i = 0; i < 3; ++i) {
    VecX hi = at, lo = at;
    hi[i] += h;
    lo[i] -= h;
    central.col(i) = (fn(hi) - fn(lo)) / (2.0 * h);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(fwd(i, j) - central(i, j)) <=
            1e-4 * std::max(1.0, std::abs(central(i, j))));
}

TEST_CASE("solver is deterministic") {
  auto run = [] {
    LeastSquaresProblem p;
    p.initial_params = VecX(2);
    p.initial_params << -1.2, 1.0;
    p.residual_fn = [](const VecX& x) {
      VecX r(2);
      r[0] = 10.0 * (x[1] - x[0] * x[0]);
      r[1] = 1.0 - x[0];
      return r;
    };
    return solve_lm(p);
  };
  const LMResult a = run();
  const LMResult b = run();
  CHECK(a.params[0] == b.params[0]);
  CHECK(a.params[1] == b.params[1]);
  CHECK(a.report.final_cost == b.report.final_cost);
  CHECK(a.report.cost_trace == b.report.cost_trace);
}
