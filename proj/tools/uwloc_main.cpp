// Command line front end for the underwater localization experiments.
//
// Exit codes: 0 success, 2 usage error, 3 data/parse error, 4 numerical
// failure.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uwloc/channel_model.hpp"
#include "uwloc/io.hpp"
#include "uwloc/network.hpp"
#include "uwloc/selfloc.hpp"
#include "uwloc/sim.hpp"
#include "uwloc/srls.hpp"
#include "uwloc/version.hpp"

namespace {

namespace fs = std::filesystem;
using uwloc::io::format_double;
using uwloc::io::HeaderEcho;

std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

uwloc::Scenario load_or_reference(const std::string& path, HeaderEcho& echo) {
  if (path.empty()) {
    echo.emplace_back("scenario", "reference");
    return uwloc::reference_scenario();
  }
  echo.emplace_back("scenario", path);
  return uwloc::io::load_scenario(path);
}

struct FitChannelOpts {
  std::string samples_csv;
  std::string out_path;
  bool defaults = false;
};

int cmd_fit_channel(const FitChannelOpts& opt) {
  if (opt.defaults == opt.samples_csv.empty() && !opt.defaults) {
    std::cerr << "error: provide a samples CSV or --defaults\n";
    return 2;
  }
  if (opt.defaults && !opt.samples_csv.empty()) {
    std::cerr << "error: --defaults excludes a samples CSV\n";
    return 2;
  }

  uwloc::ChannelModel model;
  HeaderEcho echo;
  echo.emplace_back("command", "fit-channel");
  if (opt.defaults) {
    echo.emplace_back("source", "defaults");
  } else {
    const auto samples = uwloc::io::load_gain_samples(opt.samples_csv);
    model = uwloc::fit_linear_model(samples);
    echo.emplace_back("source", opt.samples_csv);
    echo.emplace_back("n_samples", std::to_string(samples.size()));
  }

  std::cout << "slope_a_db_per_m = " << format_double(model.slope_a) << "\n"
            << "intercept_b_db = " << format_double(model.intercept_b) << "\n"
            << "noise_var_db2 = " << format_double(model.noise_var) << "\n";
  if (!opt.out_path.empty())
    uwloc::io::save_channel_model(model, opt.out_path, echo);
  return 0;
}

struct GenScenarioOpts {
  std::size_t rows = 3;
  std::size_t cols = 9;
  double spacing = 5.0;
  std::vector<uwloc::NodeId> anchors = {0, 8, 18, 26};
  double comm_radius = 10.0;
  double sense_radius = 8.0;
  std::string out_path;
};

int cmd_gen_scenario(const GenScenarioOpts& opt) {
  const uwloc::Scenario s =
      uwloc::build_grid(opt.rows, opt.cols, opt.spacing, opt.anchors,
                        opt.comm_radius, opt.sense_radius);
  HeaderEcho echo;
  echo.emplace_back("command", "gen-scenario");
  echo.emplace_back("rows", std::to_string(opt.rows));
  echo.emplace_back("cols", std::to_string(opt.cols));
  echo.emplace_back("spacing_m", format_double(opt.spacing));
  std::string anchors;
  for (auto a : opt.anchors) anchors += (anchors.empty() ? "" : " ") + std::to_string(a);
  echo.emplace_back("anchors", anchors);
  echo.emplace_back("comm_radius_m", format_double(opt.comm_radius));
  echo.emplace_back("sense_radius_m", format_double(opt.sense_radius));
  uwloc::io::save_scenario(s, opt.out_path, echo);
  std::cout << "nodes = " << s.size() << "\n"
            << "anchors = " << s.anchor_ids().size() << "\n";
  return 0;
}

struct SelfLocOpts {
  std::string scenario_path;
  std::string config_path;
  std::string out_dir = ".";
  uwloc::selfloc::SelfLocConfig cfg;
  double sigma_d = uwloc::kDefaultSigmaD;
  std::vector<double> loss_sweep;
  int sweep_seeds = 50;
};

void apply_selfloc_config_file(const std::string& path, SelfLocOpts& o) {
  const auto kv = uwloc::io::read_key_value_file(path);
  for (const auto& [key, value] : kv) {
    const auto num = [&] { return uwloc::io::parse_double(value, path, 0); };
    if (key == "max_iters")
      o.cfg.max_iters = static_cast<int>(num());
    else if (key == "inner_tol")
      o.cfg.inner_tol = num();
    else if (key == "inner_max_iters")
      o.cfg.inner_max_iters = static_cast<int>(num());
    else if (key == "packet_loss_prob")
      o.cfg.packet_loss_prob = num();
    else if (key == "proximal_tau")
      o.cfg.proximal_tau = num();
    else if (key == "seed")
      o.cfg.seed = static_cast<std::uint64_t>(num());
    else if (key == "sigma_d")
      o.sigma_d = num();
    else if (key == "init_xmin" || key == "init_ymin" || key == "init_xmax" ||
             key == "init_ymax") {
      uwloc::Box box = o.cfg.init_box.value_or(uwloc::Box{});
      if (key == "init_xmin") box.xmin = num();
      if (key == "init_ymin") box.ymin = num();
      if (key == "init_xmax") box.xmax = num();
      if (key == "init_ymax") box.ymax = num();
      o.cfg.init_box = box;
    } else {
      throw uwloc::ParseError(path + ": unknown config key '" + key + "'");
    }
  }
}

void echo_selfloc_config(const SelfLocOpts& o, HeaderEcho& echo) {
  echo.emplace_back("seed", fmt_u64(o.cfg.seed));
  echo.emplace_back("max_iters", std::to_string(o.cfg.max_iters));
  echo.emplace_back("inner_tol", format_double(o.cfg.inner_tol));
  echo.emplace_back("inner_max_iters", std::to_string(o.cfg.inner_max_iters));
  echo.emplace_back("packet_loss_prob", format_double(o.cfg.packet_loss_prob));
  echo.emplace_back("proximal_tau", format_double(o.cfg.proximal_tau));
  echo.emplace_back("sigma_d", format_double(o.sigma_d));
  if (o.cfg.init_box) {
    const uwloc::Box& b = *o.cfg.init_box;
    echo.emplace_back("init_box",
                      format_double(b.xmin) + " " + format_double(b.ymin) +
                          " " + format_double(b.xmax) + " " +
                          format_double(b.ymax));
  } else {
    echo.emplace_back("init_box", "auto");
  }
}

int cmd_selfloc(const SelfLocOpts& opt) {
  HeaderEcho echo;
  echo.emplace_back("command", "selfloc");
  const uwloc::Scenario s = load_or_reference(opt.scenario_path, echo);
  echo_selfloc_config(opt, echo);

  fs::create_directories(opt.out_dir);
  const fs::path out_dir(opt.out_dir);

  if (!opt.loss_sweep.empty()) {
    echo.emplace_back("sweep_seeds", std::to_string(opt.sweep_seeds));
    std::string levels;
    for (double p : opt.loss_sweep)
      levels += (levels.empty() ? "" : " ") + format_double(p);
    echo.emplace_back("loss_sweep", levels);
    const auto curves = uwloc::sim::run_selfloc_experiment(
        s, opt.loss_sweep, opt.sweep_seeds, opt.cfg, opt.sigma_d);
    uwloc::io::write_curves_csv(curves, out_dir / "selfloc_curves.csv", echo);
    for (const auto& c : curves)
      std::cout << "loss=" << format_double(c.loss_prob)
                << " final_mae_m=" << format_double(c.mean_mae.back()) << "\n";
    return 0;
  }

  const auto meas = uwloc::sim::generate_measurements(s, opt.sigma_d, opt.cfg.seed);
  const auto trace = uwloc::selfloc::run(s, meas, opt.cfg);
  uwloc::io::write_trace_csv(trace, out_dir / "trace.csv", echo);
  uwloc::io::write_summary_csv(trace, out_dir / "summary.csv", echo);
  std::cout << "final_mae_m = " << format_double(trace.mae.back()) << "\n"
            << "final_objective = " << format_double(trace.objective.back())
            << "\n";
  return 0;
}

struct TrackOpts {
  std::string scenario_path;
  std::string trajectory_path;
  std::string model_path;
  std::string out_path = "tracking.csv";
  double step = 0.5;
  std::string mode = "distance";
  uwloc::sim::TrackingConfig cfg;
};

int cmd_track(const TrackOpts& opt) {
  HeaderEcho echo;
  echo.emplace_back("command", "track");
  const uwloc::Scenario s = load_or_reference(opt.scenario_path, echo);

  uwloc::sim::TrackingConfig cfg = opt.cfg;
  if (opt.mode == "distance") {
    cfg.mode = uwloc::sim::RangingMode::kDistanceNoise;
  } else if (opt.mode == "power") {
    cfg.mode = uwloc::sim::RangingMode::kPowerNoise;
  } else {
    std::cerr << "error: --mode must be 'distance' or 'power'\n";
    return 2;
  }
  if (!opt.model_path.empty())
    cfg.channel = uwloc::io::load_channel_model(opt.model_path);

  std::vector<uwloc::Position> trajectory;
  if (opt.trajectory_path.empty()) {
    trajectory = uwloc::sim::reference_trajectory(s, opt.step);
    echo.emplace_back("trajectory", "reference");
  } else {
    const auto waypoints = uwloc::io::load_waypoints(opt.trajectory_path);
    trajectory = uwloc::sim::make_trajectory(waypoints, opt.step);
    echo.emplace_back("trajectory", opt.trajectory_path);
  }
  echo.emplace_back("step_m", format_double(opt.step));
  echo.emplace_back("mode", opt.mode);
  echo.emplace_back("sigma_d", format_double(cfg.sigma_d));
  echo.emplace_back("tx_power_dbm", format_double(cfg.tx_power_dbm));
  echo.emplace_back("seed", fmt_u64(cfg.seed));
  echo.emplace_back("samples", std::to_string(trajectory.size()));

  const auto run = uwloc::sim::run_tracking(s, trajectory, cfg);
  uwloc::io::write_tracking_csv(run, opt.out_path, echo);
  std::cout << "mae_m = "
            << (run.mae ? format_double(*run.mae) : std::string("nan")) << "\n"
            << "flagged = " << run.n_flagged << " of " << run.samples.size()
            << "\n";
  return 0;
}

struct SrlsSolveOpts {
  std::string instance_csv;
  double eps = uwloc::srls::kDefaultBisectionTol;
};

int cmd_srls_solve(const SrlsSolveOpts& opt) {
  const auto input = uwloc::io::load_srls_instance(opt.instance_csv);
  const auto sol = uwloc::srls::solve(input, opt.eps);
  std::cout << "x_est_m,y_est_m,lambda_star,phi_residual\n"
            << format_double(sol.position.x) << ','
            << format_double(sol.position.y) << ','
            << format_double(sol.lambda_star) << ','
            << format_double(sol.phi_residual) << "\n";
  return 0;
}

int run_guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const uwloc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const uwloc::InvalidAnchor& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const uwloc::UnknownNode& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const uwloc::InvalidDistance& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const uwloc::Error& e) {
    // DegenerateFit, RankDeficient, NearSingular, NoBracket, ...
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"underwater radio localization experiments"};
  app.set_version_flag("--version", std::string("uwloc ") + uwloc::kVersion);
  app.require_subcommand(1);

  FitChannelOpts fit_opt;
  CLI::App* fit = app.add_subcommand(
      "fit-channel", "Fit the linear gain-vs-distance channel model");
  fit->add_option("samples", fit_opt.samples_csv,
                  "CSV with header distance_m,gain_db");
  fit->add_flag("--defaults", fit_opt.defaults,
                "Use the campaign default model instead of fitting");
  fit->add_option("--out", fit_opt.out_path, "Write the model file here");

  GenScenarioOpts gen_opt;
  CLI::App* gen = app.add_subcommand("gen-scenario",
                                     "Write a grid scenario CSV (+ .radii)");
  gen->add_option("--rows", gen_opt.rows, "Grid rows")->capture_default_str();
  gen->add_option("--cols", gen_opt.cols, "Grid columns")->capture_default_str();
  gen->add_option("--spacing", gen_opt.spacing, "Grid spacing in meters")
      ->capture_default_str();
  gen->add_option("--anchors", gen_opt.anchors, "Anchor node ids")
      ->delimiter(',')
      ->capture_default_str();
  gen->add_option("--comm-radius", gen_opt.comm_radius, "Comm radius in meters")
      ->capture_default_str();
  gen->add_option("--sense-radius", gen_opt.sense_radius,
                  "Sensing radius in meters")
      ->capture_default_str();
  gen->add_option("--out", gen_opt.out_path, "Output scenario CSV path")
      ->required();

  SelfLocOpts sl_opt;
  std::vector<double> init_box_vals;
  CLI::App* sl = app.add_subcommand(
      "selfloc", "Run the distributed self-positioning experiment");
  sl->add_option("--scenario", sl_opt.scenario_path,
                 "Scenario CSV (default: built-in reference grid)");
  sl->add_option("--config", sl_opt.config_path, "Key-value config file");
  sl->add_option("--out", sl_opt.out_dir, "Output directory")
      ->capture_default_str();
  auto* o_seed = sl->add_option("--seed", sl_opt.cfg.seed, "Base RNG seed");
  auto* o_iters =
      sl->add_option("--max-iters", sl_opt.cfg.max_iters, "Outer iterations");
  auto* o_itol = sl->add_option("--inner-tol", sl_opt.cfg.inner_tol,
                                "Local solver gradient tolerance");
  auto* o_imax = sl->add_option("--inner-max-iters", sl_opt.cfg.inner_max_iters,
                                "Local solver iteration cap");
  auto* o_loss = sl->add_option("--loss", sl_opt.cfg.packet_loss_prob,
                                "Broadcast loss probability");
  auto* o_tau =
      sl->add_option("--tau", sl_opt.cfg.proximal_tau, "Proximal coefficient");
  auto* o_sigma =
      sl->add_option("--sigma-d", sl_opt.sigma_d, "Range noise std in meters");
  auto* o_box = sl->add_option("--init-box", init_box_vals,
                               "Init box: xmin ymin xmax ymax")
                    ->expected(4);
  sl->add_option("--loss-sweep", sl_opt.loss_sweep,
                 "Loss levels; runs the averaged convergence study")
      ->delimiter(',');
  sl->add_option("--sweep-seeds", sl_opt.sweep_seeds,
                 "Seeds per level in the sweep")
      ->capture_default_str();

  TrackOpts tr_opt;
  CLI::App* tr = app.add_subcommand("track", "Track a target along a trajectory");
  tr->add_option("--scenario", tr_opt.scenario_path,
                 "Scenario CSV (default: built-in reference grid)");
  tr->add_option("--trajectory", tr_opt.trajectory_path,
                 "Waypoint CSV with header x_m,y_m (default: reference path)");
  tr->add_option("--step", tr_opt.step, "Arc-length sample step in meters")
      ->capture_default_str();
  tr->add_option("--sigma-d", tr_opt.cfg.sigma_d, "Range noise std in meters")
      ->capture_default_str();
  tr->add_option("--mode", tr_opt.mode, "Ranging mode: distance | power")
      ->capture_default_str();
  tr->add_option("--model", tr_opt.model_path,
                 "Channel model file (power mode)");
  tr->add_option("--tx-power", tr_opt.cfg.tx_power_dbm,
                 "Transmit power in dBm (power mode)")
      ->capture_default_str();
  tr->add_option("--seed", tr_opt.cfg.seed, "Base RNG seed");
  tr->add_option("--out", tr_opt.out_path, "Output tracking CSV")
      ->capture_default_str();

  SrlsSolveOpts sr_opt;
  CLI::App* sr = app.add_subcommand(
      "srls-solve", "Solve one squared-range instance from a CSV");
  sr->add_option("instance", sr_opt.instance_csv,
                 "CSV with header x_m,y_m,range_m")
      ->required();
  sr->add_option("--eps", sr_opt.eps, "Bisection tolerance")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (fit->parsed()) return run_guarded([&] { return cmd_fit_channel(fit_opt); });
  if (gen->parsed()) return run_guarded([&] { return cmd_gen_scenario(gen_opt); });
  if (sl->parsed()) {
    return run_guarded([&] {
      // Precedence: defaults < config file < explicit flags.
      SelfLocOpts resolved = sl_opt;
      if (!sl_opt.config_path.empty()) {
        SelfLocOpts from_file;
        from_file.scenario_path = sl_opt.scenario_path;
        from_file.out_dir = sl_opt.out_dir;
        from_file.loss_sweep = sl_opt.loss_sweep;
        from_file.sweep_seeds = sl_opt.sweep_seeds;
        apply_selfloc_config_file(sl_opt.config_path, from_file);
        if (o_seed->count() == 0) resolved.cfg.seed = from_file.cfg.seed;
        if (o_iters->count() == 0) resolved.cfg.max_iters = from_file.cfg.max_iters;
        if (o_itol->count() == 0) resolved.cfg.inner_tol = from_file.cfg.inner_tol;
        if (o_imax->count() == 0)
          resolved.cfg.inner_max_iters = from_file.cfg.inner_max_iters;
        if (o_loss->count() == 0)
          resolved.cfg.packet_loss_prob = from_file.cfg.packet_loss_prob;
        if (o_tau->count() == 0)
          resolved.cfg.proximal_tau = from_file.cfg.proximal_tau;
        if (o_sigma->count() == 0) resolved.sigma_d = from_file.sigma_d;
        if (o_box->count() == 0) resolved.cfg.init_box = from_file.cfg.init_box;
      }
      if (o_box->count() > 0)
        resolved.cfg.init_box = uwloc::Box{init_box_vals[0], init_box_vals[1],
                                           init_box_vals[2], init_box_vals[3]};
      return cmd_selfloc(resolved);
    });
  }
  if (tr->parsed()) return run_guarded([&] { return cmd_track(tr_opt); });
  if (sr->parsed()) return run_guarded([&] { return cmd_srls_solve(sr_opt); });
  return 2;
}
