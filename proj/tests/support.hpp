#pragma once

// Shared helpers for the test suites.

#include <random>

#include "rwhec/problem.hpp"
#include "rwhec/se3.hpp"
#include "rwhec/simulate.hpp"

namespace rwhec::test {

inline Mat3 random_rotation_matrix(std::mt19937_64& rng) {
  return random_rotation(rng);
}

inline HTM random_htm(std::mt19937_64& rng, double t_scale = 1.0) {
  std::uniform_real_distribution<double> uni(-t_scale, t_scale);
  HTM h;
  h.r = random_rotation(rng);
  h.t = Vec3(uni(rng), uni(rng), uni(rng));
  return h;
}

/// Consistent single-camera problem A_i = Z B_i X^-1 built from random
/// poses; returns the problem and the ground truth.
struct GeneratedProblem {
  CalibProblem problem;
  HTM truth_x;
  HTM truth_z;
};

inline GeneratedProblem generated_problem(std::uint64_t seed, int n_poses = 25,
                                          TranslationScale scale =
                                              TranslationScale::Unit) {
  SimConfig cfg;
  cfg.n_poses = n_poses;
  cfg.scale = scale;
  cfg.eta = 0.0;
  cfg.seed = seed;
  const SimDataset ds = generate(cfg);
  return {to_problem(ds), ds.truth_x, ds.truth_z};
}

}  // namespace rwhec::test
