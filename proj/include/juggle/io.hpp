#pragma once

#include "juggle/sim.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace juggle {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// 17 significant digits round-trips doubles exactly through text.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

}  // namespace detail

/// One row per section crossing: juggler-frame state, applied input,
/// precession and flight time, saturation flags.
inline void write_steps_csv(const SimLog& log, const std::string& path) {
  auto out = detail::open_out(path);
  out << "k,hx,hy,hz,vx,vy,vz,alpha_dot,beta_dot,"
         "impulse,offset,phi,delta_alpha,delta,"
         "impulse_saturated,offset_saturated\n";
  for (const auto& s : log.steps) {
    using detail::fmt17;
    out << s.k;
    for (int i = 0; i < 3; ++i) out << ',' << fmt17(s.pre.h[i]);
    for (int i = 0; i < 3; ++i) out << ',' << fmt17(s.pre.v[i]);
    out << ',' << fmt17(s.pre.alpha_dot) << ',' << fmt17(s.pre.beta_dot);
    out << ',' << fmt17(s.applied.impulse) << ',' << fmt17(s.applied.offset)
        << ',' << fmt17(s.applied.phi);
    out << ',' << fmt17(s.delta_alpha) << ',' << fmt17(s.flight.delta);
    out << ',' << (s.impulse_saturated ? 1 : 0) << ','
        << (s.offset_saturated ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

/// Dense inertial-frame trajectory samples.
inline void write_trajectory_csv(const SimLog& log, const std::string& path) {
  auto out = detail::open_out(path);
  out << "t,hx,hy,hz,alpha,beta\n";
  for (const auto& s : log.trajectory) {
    using detail::fmt17;
    out << fmt17(s.t);
    for (int i = 0; i < 3; ++i) out << ',' << fmt17(s.h[i]);
    out << ',' << fmt17(s.alpha) << ',' << fmt17(s.beta) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

inline nlohmann::json to_json(const StickParamsd& p) {
  return {{"m", p.m}, {"ell", p.ell}, {"J", p.J}, {"g", p.g}};
}

inline nlohmann::json to_json(const FixedPointd& fp) {
  return {{"beta_star", fp.beta_star},
          {"delta_star", fp.delta_star},
          {"delta_alpha_star", fp.delta_alpha_star},
          {"psi", fp.psi},
          {"xi", fp.xi},
          {"delta_min", fp.delta_min},
          {"h", {fp.y_star.h[0], fp.y_star.h[1], fp.y_star.h[2]}},
          {"v", {fp.y_star.v[0], fp.y_star.v[1], fp.y_star.v[2]}},
          {"alpha_dot", fp.y_star.alpha_dot},
          {"beta_dot", fp.y_star.beta_dot},
          {"impulse", fp.u_star.impulse},
          {"offset", fp.u_star.offset},
          {"phi", fp.u_star.phi}};
}

template <typename Derived>
nlohmann::json matrix_to_json(const Eigen::MatrixBase<Derived>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json summary_json(const SimLog& log) {
  const SimConfig& cfg = log.config;
  nlohmann::json j;
  j["params"] = to_json(cfg.params);
  j["spec"] = {{"beta_star", cfg.spec.beta_star},
               {"delta_alpha_star", cfg.spec.delta_alpha_star}};
  if (cfg.spec.delta_star) j["spec"]["delta_star"] = *cfg.spec.delta_star;
  if (cfg.spec.p) j["spec"]["p"] = *cfg.spec.p;
  j["h_bar_z_star"] = cfg.h_bar_z_star;
  j["initial_state"] = {
      {"h", {cfg.initial_state.h[0], cfg.initial_state.h[1],
             cfg.initial_state.h[2]}},
      {"v", {cfg.initial_state.v[0], cfg.initial_state.v[1],
             cfg.initial_state.v[2]}},
      {"alpha_dot", cfg.initial_state.alpha_dot},
      {"beta_dot", cfg.initial_state.beta_dot}};
  j["n_steps"] = cfg.n_steps;
  j["seed"] = cfg.rng_seed;
  if (cfg.noise)
    j["noise"] = {{"impulse_loss_max", cfg.noise->impulse_loss_max},
                  {"position_noise_max", cfg.noise->position_noise_max},
                  {"velocity_noise_max", cfg.noise->velocity_noise_max}};
  j["fixed_point"] = to_json(log.fixed_point);
  j["gain"] = {{"K", matrix_to_json(log.gain.K)},
               {"closed_loop_spectral_radius",
                log.gain.closed_loop_spectral_radius}};
  j["A"] = matrix_to_json(log.linearization.A);
  j["B"] = matrix_to_json(log.linearization.B);
  j["summary"] = {
      {"convergence_step", log.summary.convergence_step},
      {"max_error_norm", log.summary.max_error_norm},
      {"impulse_saturation_count", log.summary.impulse_saturation_count},
      {"offset_saturation_count", log.summary.offset_saturation_count}};
  return j;
}

inline void write_summary_json(const SimLog& log, const std::string& path) {
  auto out = detail::open_out(path);
  out << summary_json(log).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

/// Write steps.csv, trajectory.csv (when rendered) and summary.json.
inline void export_log(const SimLog& log, const std::string& out_dir) {
  write_steps_csv(log, out_dir + "/steps.csv");
  if (!log.trajectory.empty())
    write_trajectory_csv(log, out_dir + "/trajectory.csv");
  write_summary_json(log, out_dir + "/summary.json");
}

}  // namespace juggle
