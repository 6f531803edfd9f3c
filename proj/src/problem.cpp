#include "rwhec/problem.hpp"

#include <algorithm>

namespace rwhec {

const char* method_name(Method m) {
  switch (m) {
    case Method::C1Sim: return "c1-sim";
    case Method::C1Sep: return "c1-sep";
    case Method::C2Sim: return "c2-sim";
    case Method::C2Sep: return "c2-sep";
    case Method::RP1: return "rp1";
    case Method::RP2: return "rp2";
  }
  return "?";
}

std::vector<double> camera_weights(const CalibProblem& problem) {
  std::vector<double> w(problem.cameras.size(), 1.0);
  if (problem.cameras.empty()) return w;
  size_t min_s = problem.cameras.front().visibility.size();
  for (const auto& cam : problem.cameras)
    min_s = std::min(min_s, cam.visibility.size());
  for (size_t d = 0; d < problem.cameras.size(); ++d)
    w[d] = static_cast<double>(min_s) /
           static_cast<double>(problem.cameras[d].visibility.size());
  return w;
}

void validate_problem(const CalibProblem& problem, bool require_a_poses) {
  const int n = problem.n_poses();
  if (n < 3) throw ConfigError("need at least 3 robot poses");
  if (problem.cameras.empty()) throw ConfigError("need at least one camera");
  for (const auto& cam : problem.cameras) {
    if (cam.visibility.size() < 3)
      throw ConfigError("camera " + std::to_string(cam.id) +
                        " sees fewer than 3 poses");
    if (!std::is_sorted(cam.visibility.begin(), cam.visibility.end()))
      throw ConfigError("camera " + std::to_string(cam.id) +
                        " visibility list is not sorted");
    for (int i : cam.visibility) {
      if (i < 0 || i >= n)
        throw ConfigError("camera " + std::to_string(cam.id) +
                          " visibility index " + std::to_string(i) +
                          " out of range");
      if (require_a_poses && !cam.a_poses.count(i))
        throw ConfigError("camera " + std::to_string(cam.id) +
                          " missing A pose for index " + std::to_string(i));
    }
  }
}

}  // namespace rwhec
