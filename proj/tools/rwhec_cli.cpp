// Command-line driver: dataset simulation, noise sweeps, calibration runs,
// metric evaluation of given transforms, and synthetic camera datasets.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "rwhec/calib_axzb.hpp"
#include "rwhec/io.hpp"
#include "rwhec/parallel.hpp"
#include "rwhec/simulate.hpp"
#include "rwhec/version.hpp"

namespace {

using namespace rwhec;

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<Method> parse_methods(const std::string& csv) {
  std::vector<Method> out;
  for (const auto& name : split_csv(csv)) out.push_back(method_from_name(name));
  if (out.empty()) throw ConfigError("no methods given");
  return out;
}

std::vector<RotationKind> parse_rotations(const std::string& csv) {
  std::vector<RotationKind> out;
  for (const auto& name : split_csv(csv))
    out.push_back(rotation_from_name(name));
  if (out.empty()) throw ConfigError("no rotations given");
  return out;
}

TranslationScale parse_scale(const std::string& s) {
  if (s == "unit") return TranslationScale::Unit;
  if (s == "mm") return TranslationScale::Millimeter;
  throw ConfigError("scale must be 'unit' or 'mm'");
}

// rows x cols x square_mm, e.g. 6x8x10
TargetModel parse_board(const std::string& s) {
  int rows = 0, cols = 0;
  double square = 0.0;
  if (std::sscanf(s.c_str(), "%dx%dx%lf", &rows, &cols, &square) != 3 ||
      rows < 2 || cols < 2 || square <= 0.0)
    throw ConfigError("board spec must be RxCxS, e.g. 6x8x10");
  return make_chessboard(rows, cols, square);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Robot-world hand-eye calibration toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // simulate: dump a ground-truth pose dataset
  auto* sim = app.add_subcommand("simulate", "Generate a simulated dataset");
  std::string sim_scale = "unit";
  double sim_eta = 0.0;
  int sim_poses = 25;
  int sim_trials = 1;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  sim->add_option("--scale", sim_scale, "Translation scale: unit or mm");
  sim->add_option("--eta", sim_eta, "Rotation noise magnitude in [0, 0.25]");
  sim->add_option("--poses", sim_poses, "Number of robot poses");
  sim->add_option("--trials", sim_trials,
                  "Datasets to generate (trial subdirectories when > 1)");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "Output directory")->required();

  // sweep: eta grid x trials x solvers
  auto* swp = app.add_subcommand("sweep", "Noise sweep over the eta grid");
  std::string swp_solvers = "c1-sim,c1-sep,c2-sim,c2-sep";
  std::string swp_rotations = "euler,axis-angle,quaternion";
  std::string swp_scale = "unit";
  int swp_poses = 25;
  int swp_trials = 10;
  std::uint64_t swp_seed = 0;
  std::string swp_out;
  swp->add_option("--solvers", swp_solvers, "Comma-separated class-1 methods");
  swp->add_option("--rotations", swp_rotations, "Comma-separated rotations");
  swp->add_option("--scale", swp_scale, "Translation scale: unit or mm");
  swp->add_option("--poses", swp_poses, "Poses per dataset");
  swp->add_option("--trials", swp_trials, "Trials per eta value");
  swp->add_option("--seed", swp_seed, "RNG seed");
  swp->add_option("--out", swp_out, "Output directory")->required();

  // calibrate: run methods on a manifest
  auto* cal = app.add_subcommand("calibrate", "Calibrate from a manifest");
  std::string cal_manifest;
  std::string cal_methods = "c1-sim,c1-sep,c2-sim,c2-sep";
  std::string cal_rotations = "euler,axis-angle,quaternion";
  std::string cal_out;
  int cal_max_iterations = 1000;
  bool cal_parallel = false;
  cal->add_option("--manifest", cal_manifest, "Dataset manifest")->required();
  cal->add_option("--methods", cal_methods, "Comma-separated methods");
  cal->add_option("--rotations", cal_rotations, "Comma-separated rotations");
  cal->add_option("--max-iterations", cal_max_iterations,
                  "Solver iteration cap");
  cal->add_flag("--parallel", cal_parallel,
                "Run (method, rotation) cells concurrently");
  cal->add_option("--out", cal_out, "Output directory")->required();

  // evaluate: metrics for given transforms
  auto* ev = app.add_subcommand("evaluate",
                                "Evaluate metrics for given X and Z files");
  std::string ev_manifest, ev_x, ev_out;
  std::vector<std::string> ev_z;
  ev->add_option("--manifest", ev_manifest, "Dataset manifest")->required();
  ev->add_option("--x", ev_x, "X transform file")->required();
  ev->add_option("--z", ev_z, "Z transform file (repeat per camera)")
      ->required();
  ev->add_option("--out", ev_out, "Output directory")->required();

  // synth-camera: synthetic dataset with image observations
  auto* syn = app.add_subcommand("synth-camera",
                                 "Generate a synthetic camera dataset");
  int syn_poses = 25;
  std::string syn_board = "6x8x10";
  double syn_noise = 0.0;
  std::uint64_t syn_seed = 0;
  std::string syn_out;
  syn->add_option("--poses", syn_poses, "Number of robot poses");
  syn->add_option("--board", syn_board, "Chessboard spec RxCxS (mm)");
  syn->add_option("--noise-px", syn_noise, "Pixel noise sigma");
  syn->add_option("--seed", syn_seed, "RNG seed");
  syn->add_option("--out", syn_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*sim) {
      SimConfig cfg;
      cfg.n_poses = sim_poses;
      cfg.scale = parse_scale(sim_scale);
      cfg.eta = sim_eta;
      cfg.trials = sim_trials;
      if (sim_trials == 1) {
        cfg.seed = sim_seed;
        dump_sim_dataset(sim_out, generate(cfg));
      } else {
        for (int t = 0; t < sim_trials; ++t) {
          cfg.seed = derive_seed(sim_seed, t);
          char sub[32];
          std::snprintf(sub, sizeof(sub), "trial_%02d", t);
          dump_sim_dataset(fs::path(sim_out) / sub, generate(cfg));
        }
      }
      std::cout << "wrote dataset to " << sim_out << "\n";
    } else if (*swp) {
      SimConfig cfg;
      cfg.n_poses = swp_poses;
      cfg.scale = parse_scale(swp_scale);
      cfg.trials = swp_trials;
      cfg.seed = swp_seed;
      const SweepReport report =
          run_sweep(cfg, parse_methods(swp_solvers),
                    parse_rotations(swp_rotations));
      fs::create_directories(swp_out);
      write_sweep_csv(fs::path(swp_out) / "sweep.csv", report);
      write_sweep_means_csv(fs::path(swp_out) / "sweep_means.csv",
                            sweep_means(report));
      std::cout << "wrote " << report.rows.size() << " rows to " << swp_out
                << "/sweep.csv\n";
    } else if (*cal) {
      const CalibProblem problem = load_dataset(cal_manifest);
      RunConfig cfg;
      cfg.methods = parse_methods(cal_methods);
      cfg.rotations = parse_rotations(cal_rotations);
      cfg.solver_options.max_iterations = cal_max_iterations;
      cfg.output_dir = cal_out;
      cfg.parallel_cells = cal_parallel;
      const auto entries = run_methods(cfg, problem);
      int failures = 0;
      for (const auto& e : entries) {
        if (!e.ok) {
          ++failures;
          std::cerr << method_name(e.method) << "/"
                    << rotation_kind_name(e.rotation) << " failed: " << e.error
                    << "\n";
        }
      }
      std::cout << "wrote " << entries.size() << " rows to " << cal_out
                << "/report.csv";
      if (failures) std::cout << " (" << failures << " failed)";
      std::cout << "\n";
    } else if (*ev) {
      const CalibProblem problem = load_dataset(ev_manifest);
      if (static_cast<int>(ev_z.size()) != problem.n_cameras())
        throw ConfigError("need one --z per camera (" +
                          std::to_string(problem.n_cameras()) + ")");
      const HTM x = read_htm(ev_x);
      std::vector<HTM> z;
      for (const auto& path : ev_z) z.push_back(read_htm(path));
      const MetricsReport m = compute_metrics(x, z, problem, 0.0);
      fs::create_directories(ev_out);
      std::ofstream out(fs::path(ev_out) / "evaluation.csv");
      out << std::setprecision(17);
      out << report_csv_header(problem.n_cameras()) << "\n";
      out << "evaluate,-,0," << m.e_r1 << ',' << m.e_r2_deg << ','
          << m.e_t_mm2 << ',' << m.e_c;
      for (int d = 0; d < problem.n_cameras(); ++d) {
        if (d < static_cast<int>(m.rrmse_per_camera.size()))
          out << ',' << m.rrmse_per_camera[d];
        else
          out << ",nan";
      }
      out << ',' << m.rae_mm << ',' << m.rae_sq_mm2 << ",ok\n";
      std::cout << "e_r1=" << m.e_r1 << " e_r2_deg=" << m.e_r2_deg
                << " e_t_mm2=" << m.e_t_mm2 << " e_c=" << m.e_c << "\n";
    } else if (*syn) {
      const TargetModel board = parse_board(syn_board);
      CameraIntrinsics k;
      k.fx = 1000.0;
      k.fy = 1000.0;
      k.cx = 640.0;
      k.cy = 480.0;
      std::mt19937_64 rng(derive_seed(syn_seed, 0xc0ffee));
      const HTM truth_x{random_rotation(rng), Vec3(120.0, -40.0, 60.0)};
      const HTM truth_z{random_rotation(rng), Vec3(15.0, 25.0, 80.0)};
      const SynthCameraDataset ds = synth_camera_dataset(
          syn_poses, board, k, truth_x, truth_z, syn_noise, syn_seed);
      dump_camera_dataset(syn_out, ds);
      std::cout << "wrote synthetic camera dataset to " << syn_out << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
