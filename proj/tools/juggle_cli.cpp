// Command-line front end for the stick-juggling library.
//
// Subcommands:
//   fixed-point  closed-form steady-juggling state and input
//   linearize    finite-difference A, B of the rotating-frame return map
//   gains        LQR gain and closed-loop spectral radius
//   simulate     closed-loop run with optional noise; CSV/JSON export
//   sweep        feasibility and spectral radius over a design grid
//   precess      steady-precession (hoop) limit and consistency check
//
// Exit codes: 0 success, 2 infeasible or invalid spec, 3 simulation or
// synthesis error, 4 I/O error.
#include "juggle/io.hpp"
#include "juggle/lqr.hpp"
#include "juggle/sim.hpp"
#include "juggle/steady_state.hpp"

#include "CLI11.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace juggle;
using nlohmann::json;

namespace {

constexpr int kExitInfeasible = 2;
constexpr int kExitSimError = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
  double m = 0.1;
  double ell = 0.5;
  std::optional<double> J;  // default: uniform stick m*ell^2/12
  double g = 9.81;
  double beta_star = M_PI / 3;
  double delta_alpha_star = 2 * M_PI / 3;
  std::optional<double> delta_star;
  std::optional<double> p;
  double h_bar_z = 1.6;
  std::string config_path;
};

StickParamsd make_params(const CommonOpts& o) {
  StickParamsd params = StickParamsd::uniform(o.m, o.ell, o.g);
  if (o.J) params.J = *o.J;
  return params;
}

JuggleSpecd make_spec(const CommonOpts& o) {
  JuggleSpecd spec{o.beta_star, o.delta_alpha_star, o.delta_star, o.p};
  if (!spec.delta_star && !spec.p) spec.delta_star = 0.6;
  return spec;
}

void add_common_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path,
                  "JSON config file; flags override its values");
  cmd->add_option("--mass", o.m, "stick mass, kg");
  cmd->add_option("--length", o.ell, "stick length, m");
  cmd->add_option("--inertia", [&o](const std::vector<std::string>& v) {
        o.J = std::stod(v.at(0));
        return true;
      },
      "transverse moment of inertia, kg m^2 (default m*ell^2/12)");
  cmd->add_option("--gravity", o.g, "gravitational acceleration, m/s^2");
  cmd->add_option("--beta-star", o.beta_star, "section angle, rad");
  cmd->add_option("--delta-alpha-star", o.delta_alpha_star,
                  "steady precession per flight, rad");
  cmd->add_option("--delta-star", [&o](const std::vector<std::string>& v) {
        o.delta_star = std::stod(v.at(0));
        return true;
      },
      "steady time of flight, s");
  cmd->add_option("--flight-multiplier", [&o](const std::vector<std::string>& v) {
        o.p = std::stod(v.at(0));
        return true;
      },
      "delta* as a multiple p >= 1 of the minimum flight time");
  cmd->add_option("--height", o.h_bar_z, "steady section height, m");
}

// Applies a JSON config file underneath the parsed flags: the file sets
// values, and any flag given explicitly on the command line overrides it.
void apply_config_file(const CLI::App* cmd, CommonOpts& o, SimConfig* sim) {
  if (o.config_path.empty()) return;
  std::ifstream in(o.config_path);
  if (!in) throw IoError("cannot open config: " + o.config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("bad JSON in " + o.config_path + ": " + e.what());
  }

  auto overridden = [&](const std::string& flag) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    return opt && opt->count() > 0;
  };

  if (j.contains("params")) {
    const auto& p = j["params"];
    if (p.contains("m") && !overridden("--mass")) o.m = p["m"];
    if (p.contains("ell") && !overridden("--length")) o.ell = p["ell"];
    if (p.contains("J") && !overridden("--inertia")) o.J = p["J"];
    if (p.contains("g") && !overridden("--gravity")) o.g = p["g"];
  }
  if (j.contains("spec")) {
    const auto& s = j["spec"];
    if (s.contains("beta_star") && !overridden("--beta-star"))
      o.beta_star = s["beta_star"];
    if (s.contains("delta_alpha_star") && !overridden("--delta-alpha-star"))
      o.delta_alpha_star = s["delta_alpha_star"];
    if (s.contains("delta_star") && !overridden("--delta-star"))
      o.delta_star = s["delta_star"];
    if (s.contains("p") && !overridden("--flight-multiplier"))
      o.p = s["p"];
  }
  if (j.contains("h_bar_z_star") && !overridden("--height"))
    o.h_bar_z = j["h_bar_z_star"];

  if (!sim) return;
  if (j.contains("initial_state")) {
    const auto& s = j["initial_state"];
    for (int i = 0; i < 3; ++i) {
      sim->initial_state.h[i] = s["h"].at(i);
      sim->initial_state.v[i] = s["v"].at(i);
    }
    sim->initial_state.alpha_dot = s["alpha_dot"];
    sim->initial_state.beta_dot = s["beta_dot"];
  }
  if (j.contains("n_steps") && !overridden("--steps"))
    sim->n_steps = j["n_steps"];
  if (j.contains("seed") && !overridden("--seed"))
    sim->rng_seed = j["seed"].get<std::uint64_t>();
  if (j.contains("q_diag"))
    for (int i = 0; i < 8; ++i) sim->q_diag[i] = j["q_diag"].at(i);
  if (j.contains("r_diag"))
    for (int i = 0; i < 3; ++i) sim->r_diag[i] = j["r_diag"].at(i);
  if (j.contains("render_samples_per_flight") && !overridden("--render"))
    sim->render_samples_per_flight = j["render_samples_per_flight"];
  if (j.contains("noise") && !overridden("--noise")) {
    NoiseSpec n;
    const auto& jn = j["noise"];
    if (jn.contains("impulse_loss_max")) n.impulse_loss_max = jn["impulse_loss_max"];
    if (jn.contains("position_noise_max"))
      n.position_noise_max = jn["position_noise_max"];
    if (jn.contains("velocity_noise_max"))
      n.velocity_noise_max = jn["velocity_noise_max"];
    sim->noise = n;
  }
}

json fixed_point_json(const FixedPointd& fp) {
  json j = to_json(fp);
  return j;
}

std::string resolve_out_dir(std::string flag_value) {
  // environment override wins over the flag so batch drivers can redirect
  // output without touching per-run command lines
  if (const char* env = std::getenv("JUGGLE_OUT_DIR")) return env;
  return flag_value;
}

int run_fixed_point(const CLI::App* cmd, CommonOpts& o) {
  apply_config_file(cmd, o, nullptr);
  const auto fp = solve_fixed_point(make_spec(o), make_params(o), o.h_bar_z);
  std::cout << fixed_point_json(fp).dump(2) << "\n";
  return 0;
}

int run_linearize(const CLI::App* cmd, CommonOpts& o) {
  apply_config_file(cmd, o, nullptr);
  const auto params = make_params(o);
  const auto fp = solve_fixed_point(make_spec(o), params, o.h_bar_z);
  const PoincareSectiond section(fp.beta_star, params);
  const auto lm = linearize(section, fp);
  json j;
  j["fixed_point"] = fixed_point_json(fp);
  j["A"] = matrix_to_json(lm.A);
  j["B"] = matrix_to_json(lm.B);
  j["step_scale"] = lm.step_scale;
  j["controllability_rank"] = controllability_rank(lm);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_gains(const CLI::App* cmd, CommonOpts& o, std::vector<double>& q_diag,
              std::vector<double>& r_diag) {
  apply_config_file(cmd, o, nullptr);
  const auto params = make_params(o);
  const auto fp = solve_fixed_point(make_spec(o), params, o.h_bar_z);
  const PoincareSectiond section(fp.beta_star, params);
  const auto lm = linearize(section, fp);
  Vec8<double> q = Vec8<double>::Ones();
  Vec3d r(2.0, 0.5, 1.0);
  if (!q_diag.empty()) {
    if (q_diag.size() != 8)
      throw std::invalid_argument("--q-diag needs exactly 8 values");
    for (int i = 0; i < 8; ++i) q[i] = q_diag[i];
  }
  if (!r_diag.empty()) {
    if (r_diag.size() != 3)
      throw std::invalid_argument("--r-diag needs exactly 3 values");
    for (int i = 0; i < 3; ++i) r[i] = r_diag[i];
  }
  const auto gain =
      lqr_gain(lm, Mat8<double>(q.asDiagonal()), Mat3d(r.asDiagonal()));
  json j;
  j["K"] = matrix_to_json(gain.K);
  j["closed_loop_spectral_radius"] = gain.closed_loop_spectral_radius;
  j["q_diag"] = std::vector<double>(q.data(), q.data() + 8);
  j["r_diag"] = std::vector<double>(r.data(), r.data() + 3);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_simulate(const CLI::App* cmd, CommonOpts& o, SimConfig& cfg,
                 bool noise_flag, std::string& out_dir) {
  apply_config_file(cmd, o, &cfg);
  cfg.params = make_params(o);
  cfg.spec = make_spec(o);
  cfg.h_bar_z_star = o.h_bar_z;
  if (noise_flag && !cfg.noise) cfg.noise = NoiseSpec{};

  const auto log = run_closed_loop(cfg);

  const std::string dir = resolve_out_dir(out_dir);
  if (!dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir);
    export_log(log, dir);
    std::cerr << "wrote " << dir << "/steps.csv";
    if (!log.trajectory.empty()) std::cerr << ", " << dir << "/trajectory.csv";
    std::cerr << ", " << dir << "/summary.json\n";
  } else {
    std::cout << summary_json(log).dump(2) << "\n";
  }
  return 0;
}

int run_sweep(const CLI::App* cmd, CommonOpts& o,
              std::vector<double>& betas, std::vector<double>& deltas_alpha,
              std::vector<double>& multipliers) {
  apply_config_file(cmd, o, nullptr);
  const auto params = make_params(o);
  if (betas.empty()) betas = {M_PI / 6, M_PI / 4, M_PI / 3, 0.45 * M_PI};
  if (deltas_alpha.empty())
    deltas_alpha = {M_PI / 6, M_PI / 2, 2 * M_PI / 3, M_PI};
  if (multipliers.empty()) multipliers = {1.0, 1.5, 3.0};

  std::cout << "beta_star,delta_alpha_star,p,status,delta_star,"
               "controllability_rank,spectral_radius\n";
  for (double beta : betas) {
    for (double da : deltas_alpha) {
      for (double p : multipliers) {
        std::cout << beta << ',' << da << ',' << p << ',';
        try {
          const auto fp = solve_fixed_point(
              JuggleSpecd{beta, da, std::nullopt, p}, params, o.h_bar_z);
          const PoincareSectiond section(beta, params);
          const auto lm = linearize(section, fp);
          const auto gain = lqr_gain(
              lm, Mat8<double>(Mat8<double>::Identity()),
              Mat3d(Vec3d(2.0, 0.5, 1.0).asDiagonal()));
          std::cout << "ok," << fp.delta_star << ','
                    << controllability_rank(lm) << ','
                    << gain.closed_loop_spectral_radius << '\n';
        } catch (const InfeasibleFlightTime&) {
          std::cout << "infeasible,,,\n";
        } catch (const OffsetOutOfRange&) {
          // p = 1 puts the nominal offset exactly at the stick end, where a
          // central difference cannot be taken
          std::cout << "offset-at-boundary,,,\n";
        } catch (const NotStabilizable&) {
          std::cout << "not-stabilizable,,,\n";
        }
      }
    }
  }
  return 0;
}

int run_precess(const CLI::App* cmd, CommonOpts& o, double p_free) {
  apply_config_file(cmd, o, nullptr);
  const auto params = make_params(o);
  const auto s = precession_limit(o.beta_star, p_free, params);

  // consistency: the small-precession fixed point must approach the limit
  const double da = 1e-4;
  const auto fp = solve_fixed_point(
      JuggleSpecd{o.beta_star, da, std::nullopt, p_free}, params, o.h_bar_z);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  const double worst = std::max(
      {rel(fp.u_star.impulse / fp.delta_star, s.force),
       rel(fp.u_star.offset, s.offset), rel(fp.y_star.alpha_dot, s.alpha_dot),
       rel(fp.y_star.h[0], s.h_bar_x), rel(fp.y_star.v[1], s.v_bar_y)});

  json j;
  j["beta_star"] = o.beta_star;
  j["p"] = p_free;
  j["h_bar_x"] = s.h_bar_x;
  j["v_bar_y"] = s.v_bar_y;
  j["alpha_dot"] = s.alpha_dot;
  j["force"] = s.force;
  j["offset"] = s.offset;
  j["precession_period"] = 2 * M_PI / s.alpha_dot;
  j["limit_check"] = {{"delta_alpha", da},
                      {"max_relative_deviation", worst},
                      {"consistent", worst < 1e-3}};
  std::cout << j.dump(2) << "\n";
  return worst < 1e-3 ? 0 : kExitSimError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stick-juggling simulator: closed-form return maps, "
               "steady-state solutions, LQR stabilization"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* cmd_fp = app.add_subcommand(
      "fixed-point", "print the steady-juggling state and input as JSON");
  add_common_options(cmd_fp, opts);

  auto* cmd_lin = app.add_subcommand(
      "linearize", "print the linearized return map (A, B) as JSON");
  add_common_options(cmd_lin, opts);

  std::vector<double> q_diag, r_diag;
  auto* cmd_gains = app.add_subcommand(
      "gains", "print the LQR gain and closed-loop spectral radius");
  add_common_options(cmd_gains, opts);
  cmd_gains->add_option("--q-diag", q_diag, "8 diagonal entries of Q");
  cmd_gains->add_option("--r-diag", r_diag, "3 diagonal entries of R");

  SimConfig sim_cfg;
  sim_cfg.spec = JuggleSpecd{M_PI / 3, 2 * M_PI / 3, 0.6, std::nullopt};
  sim_cfg.initial_state =
      SectionStateJugglerd{Vec3d(0.9, -0.2, 1.2), Vec3d(1.3, 0.2, -1.7),
                           2.2, 2.1};
  bool noise_flag = false;
  std::string out_dir;
  auto* cmd_sim = app.add_subcommand(
      "simulate", "run the closed loop and export CSV/JSON logs");
  add_common_options(cmd_sim, opts);
  cmd_sim->add_option("--steps", sim_cfg.n_steps, "number of section steps");
  cmd_sim->add_option("--seed", sim_cfg.rng_seed, "RNG seed");
  cmd_sim->add_flag("--noise", noise_flag,
                    "enable the benchmark noise levels (2.5% impulse loss, "
                    "1% position, 2.5% velocity)");
  cmd_sim->add_option("--render", sim_cfg.render_samples_per_flight,
                      "dense trajectory samples per flight");
  cmd_sim->add_option("--out-dir", out_dir,
                      "output directory (env JUGGLE_OUT_DIR overrides); "
                      "summary JSON goes to stdout when unset");

  std::vector<double> sweep_betas, sweep_das, sweep_ps;
  auto* cmd_sweep = app.add_subcommand(
      "sweep", "grid over the design space, CSV report to stdout");
  add_common_options(cmd_sweep, opts);
  cmd_sweep->add_option("--betas", sweep_betas, "section angles, rad");
  cmd_sweep->add_option("--delta-alphas", sweep_das, "precession targets, rad");
  cmd_sweep->add_option("--multipliers", sweep_ps, "flight-time multipliers");

  double p_free = 1.0;
  auto* cmd_precess = app.add_subcommand(
      "precess", "steady-precession (hoop) limit table and consistency check");
  add_common_options(cmd_precess, opts);
  cmd_precess->add_option("--p", p_free, "offset parameter, p >= 1");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_fp->parsed()) return run_fixed_point(cmd_fp, opts);
    if (cmd_lin->parsed()) return run_linearize(cmd_lin, opts);
    if (cmd_gains->parsed()) return run_gains(cmd_gains, opts, q_diag, r_diag);
    if (cmd_sim->parsed())
      return run_simulate(cmd_sim, opts, sim_cfg, noise_flag, out_dir);
    if (cmd_sweep->parsed())
      return run_sweep(cmd_sweep, opts, sweep_betas, sweep_das, sweep_ps);
    if (cmd_precess->parsed()) return run_precess(cmd_precess, opts, p_free);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const InfeasibleFlightTime& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::domain_error& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return kExitSimError;
  } catch (const std::runtime_error& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return kExitSimError;
  }
  return 0;
}
