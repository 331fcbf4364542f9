// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fris/ao.hpp"
#include "fris/baselines.hpp"
#include "fris/channel.hpp"
#include "fris/codebook.hpp"
#include "fris/errors.hpp"
#include "fris/rng.hpp"
#include "fris/support_search.hpp"

namespace fris {

/// Load a general codebook from a JSON array of phase angles in radians.
inline PhaseCodebook codebook_from_json(const nlohmann::json& arr) {
  if (!arr.is_array() || arr.empty())
    throw ConfigError("codebook: expected a nonempty JSON array of angles");
  std::vector<double> angles;
  angles.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) throw ConfigError("codebook: angles must be numbers");
    angles.push_back(v.get<double>());
  }
  try {
    return PhaseCodebook::from_angles(angles);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("codebook: ") + e.what());
  }
}

struct CodebookConfig {
  std::string type = "regular";  // "regular" | "general"
  int m_p = 8;
  std::vector<double> angles;    // general only
};

struct SweepConfig {
  std::string variable;  // m | m_x | m_o | m_p | w_x | snr_db
  std::vector<double> values;
};

/// One experiment: geometry, system parameters, codebook, trial count and
/// seeding, optional one-variable sweep.
struct ExperimentConfig {
  std::array<double, 3> bs_pos{0.0, 0.0, 5.0};
  std::array<double, 3> fris_pos{10.0, 10.0, 5.0};
  std::array<double, 3> user_pos{50.0, 0.0, 0.0};
  int m_x = 8;
  int m_ports = 0;  // 0: use the full m_x * m_x grid; else first m_ports ports
  double w_x = 2.0;
  double carrier_hz = 3.5e9;

  int n = 16;
  std::size_t m_o = 8;
  double snr_db = 0.0;
  double pathloss_exp = 2.5;
  double k_factor_db = 3.0;
  double epsilon = 1e-6;
  int max_iters = 50;

  CodebookConfig codebook;
  std::string strategy = "exact_partition";  // general codebooks: exact_partition | uniform_grid
  std::size_t n_phi = 4096;

  std::optional<SweepConfig> sweep;
  std::size_t trials = 1000;
  std::uint64_t master_seed = 1;
  std::string out_path = "results.csv";
  int threads = 1;
};

namespace detail {

inline void require_known_keys(const nlohmann::json& j,
                               std::initializer_list<const char*> keys,
                               const char* scope) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError(std::string("unknown config key '") + item.key() + "' in " + scope);
  }
}

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

inline void read_vec3(const nlohmann::json& j, const char* key, std::array<double, 3>& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 3)
    throw ConfigError(std::string("config key '") + key + "' must be a 3-element array");
  for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = v.at(i).get<double>();
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  detail::require_known_keys(
      j,
      {"geometry", "system", "codebook", "strategy", "n_phi", "sweep", "trials",
       "master_seed", "out", "threads"},
      "the top level");
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    detail::require_known_keys(
        g, {"bs", "fris", "user", "m_x", "m_ports", "w_x", "carrier_hz"}, "geometry");
    detail::read_vec3(g, "bs", cfg.bs_pos);
    detail::read_vec3(g, "fris", cfg.fris_pos);
    detail::read_vec3(g, "user", cfg.user_pos);
    detail::read_field(g, "m_x", cfg.m_x);
    detail::read_field(g, "m_ports", cfg.m_ports);
    detail::read_field(g, "w_x", cfg.w_x);
    detail::read_field(g, "carrier_hz", cfg.carrier_hz);
  }
  if (j.contains("system")) {
    const auto& s = j.at("system");
    detail::require_known_keys(
        s, {"n", "m_o", "snr_db", "pathloss_exp", "k_factor_db", "epsilon", "max_iters"},
        "system");
    detail::read_field(s, "n", cfg.n);
    detail::read_field(s, "m_o", cfg.m_o);
    detail::read_field(s, "snr_db", cfg.snr_db);
    detail::read_field(s, "pathloss_exp", cfg.pathloss_exp);
    detail::read_field(s, "k_factor_db", cfg.k_factor_db);
    detail::read_field(s, "epsilon", cfg.epsilon);
    detail::read_field(s, "max_iters", cfg.max_iters);
  }
  if (j.contains("codebook")) {
    const auto& c = j.at("codebook");
    detail::require_known_keys(c, {"type", "m_p", "angles"}, "codebook");
    detail::read_field(c, "type", cfg.codebook.type);
    detail::read_field(c, "m_p", cfg.codebook.m_p);
    if (c.contains("angles")) {
      cfg.codebook.angles.clear();
      for (const auto& a : c.at("angles")) cfg.codebook.angles.push_back(a.get<double>());
    }
    if (cfg.codebook.type != "regular" && cfg.codebook.type != "general")
      throw ConfigError("codebook.type must be 'regular' or 'general'");
    if (cfg.codebook.type == "general" && cfg.codebook.angles.empty())
      throw ConfigError("codebook.type 'general' requires codebook.angles");
  }
  detail::read_field(j, "strategy", cfg.strategy);
  if (cfg.strategy != "exact_partition" && cfg.strategy != "uniform_grid")
    throw ConfigError("strategy must be 'exact_partition' or 'uniform_grid'");
  detail::read_field(j, "n_phi", cfg.n_phi);
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    detail::require_known_keys(s, {"variable", "values"}, "sweep");
    SweepConfig sw;
    detail::read_field(s, "variable", sw.variable);
    if (s.contains("values"))
      for (const auto& v : s.at("values")) sw.values.push_back(v.get<double>());
    if (sw.variable.empty() || sw.values.empty())
      throw ConfigError("sweep requires both variable and values");
    cfg.sweep = std::move(sw);
  }
  detail::read_field(j, "trials", cfg.trials);
  detail::read_field(j, "master_seed", cfg.master_seed);
  detail::read_field(j, "out", cfg.out_path);
  detail::read_field(j, "threads", cfg.threads);
  return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

inline ExperimentConfig apply_sweep_value(ExperimentConfig cfg, const std::string& var,
                                          double value) {
  if (var == "m_x") {
    cfg.m_x = static_cast<int>(value);
  } else if (var == "m") {
    const int mx = static_cast<int>(std::lround(std::sqrt(value)));
    if (mx * mx != static_cast<int>(value))
      throw ConfigError("sweep over m requires perfect-square values");
    cfg.m_x = mx;
  } else if (var == "m_o") {
    cfg.m_o = static_cast<std::size_t>(value);
  } else if (var == "m_p") {
    if (cfg.codebook.type != "regular")
      throw ConfigError("sweep over m_p requires a regular codebook");
    cfg.codebook.m_p = static_cast<int>(value);
  } else if (var == "w_x") {
    cfg.w_x = value;
  } else if (var == "snr_db") {
    cfg.snr_db = value;
  } else {
    throw ConfigError("unsupported sweep variable: " + var);
  }
  return cfg;
}

/// Immutable per-config objects shared by all trials.
struct ExperimentContext {
  SystemGeometry geom;
  SystemParams params;
  std::vector<Eigen::Vector3d> ports;
  SpatialCorrelation corr;
  CodebookSpec spec{RegularPolygonCodebook(8)};
  GeneralStrategy strategy{ExactPartition{}};
};

inline ExperimentContext make_context(const ExperimentConfig& cfg) {
  ExperimentContext ctx;
  ctx.geom.bs_pos = Eigen::Vector3d(cfg.bs_pos[0], cfg.bs_pos[1], cfg.bs_pos[2]);
  ctx.geom.fris_center = Eigen::Vector3d(cfg.fris_pos[0], cfg.fris_pos[1], cfg.fris_pos[2]);
  ctx.geom.user_pos = Eigen::Vector3d(cfg.user_pos[0], cfg.user_pos[1], cfg.user_pos[2]);
  ctx.geom.m_x = cfg.m_x;
  ctx.geom.w_x = cfg.w_x;
  ctx.geom.carrier_hz = cfg.carrier_hz;
  if (cfg.m_x < 1) throw ConfigError("geometry.m_x must be at least 1");

  ctx.ports = port_positions(ctx.geom);
  if (cfg.m_ports > 0) {
    if (cfg.m_ports > static_cast<int>(ctx.ports.size()))
      throw ConfigError("geometry.m_ports exceeds the grid size m_x * m_x");
    ctx.ports.resize(static_cast<std::size_t>(cfg.m_ports));
  }
  ctx.corr = correlation_matrix(ctx.ports, ctx.geom.wavelength());

  ctx.params.n = cfg.n;
  ctx.params.m_o = cfg.m_o;
  ctx.params.p = std::pow(10.0, cfg.snr_db / 10.0);  // sigma2 normalized to 1
  ctx.params.sigma2 = 1.0;
  ctx.params.k_factor_db = cfg.k_factor_db;
  ctx.params.pathloss_exp = cfg.pathloss_exp;
  ctx.params.epsilon = cfg.epsilon;
  ctx.params.max_iters = cfg.max_iters;
  if (cfg.n < 1) throw ConfigError("system.n must be at least 1");
  if (cfg.m_o < 1 || cfg.m_o > ctx.ports.size())
    throw ConfigError("system.m_o must be between 1 and the port count");

  if (cfg.codebook.type == "regular") {
    if (cfg.codebook.m_p < 2) throw ConfigError("codebook.m_p must be at least 2");
    ctx.spec = RegularPolygonCodebook(cfg.codebook.m_p);
  } else {
    ctx.spec = CodebookSet::shared(codebook_from_json(nlohmann::json(cfg.codebook.angles)),
                                   ctx.ports.size());
  }
  if (cfg.strategy == "uniform_grid") {
    if (cfg.n_phi < 1) throw ConfigError("n_phi must be at least 1");
    ctx.strategy = UniformGrid{cfg.n_phi};
  }
  return ctx;
}

inline const char* const kSchemes[] = {"proposed", "top_h", "random"};

struct TrialRow {
  std::size_t trial = 0;
  std::string scheme;
  std::size_t iters = 0;
  double abs_z = 0.0;
  double rate = 0.0;
  std::optional<double> delta_g;
};

namespace detail {

inline FrisConfiguration optimal_update(const CascadedLink& link, const ExperimentContext& ctx) {
  if (const auto* poly = std::get_if<RegularPolygonCodebook>(&ctx.spec))
    return optimize_polygon(link, ctx.params.m_o, poly->m_p);
  return optimize_general(link, std::get<CodebookSet>(ctx.spec), ctx.params.m_o, ctx.strategy);
}

inline std::vector<std::size_t> random_port_subset(std::size_t ports, std::size_t m_o,
                                                   CounterRng& rng) {
  std::vector<std::size_t> idx(ports);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < m_o; ++i) {
    const std::size_t j = i + rng.below(ports - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m_o);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Per-trial solve of all three schemes on one shared realization. The random
// scheme fixes its port subset for the whole trial; the Top-|h| scheme
// reselects deterministically every iteration.
struct TrialSolves {
  AoResult proposed;
  AoResult top_h;
  AoResult random;
};

template <class ProposedUpdate>
TrialSolves solve_trial_schemes(const ExperimentContext& ctx, const ChannelRealization& real,
                                std::uint64_t master_seed, std::size_t trial,
                                ProposedUpdate&& proposed_update) {
  TrialSolves out;
  const std::size_t ports = ctx.ports.size();
  const std::size_t m_o = ctx.params.m_o;

  CounterRng init_prop = CounterRng::stream(master_seed, trial, "init/proposed");
  out.proposed = ao_solve_with(
      real, ctx.params, random_initial_coefficients(ports, m_o, ctx.spec, init_prop),
      proposed_update);

  CounterRng init_top = CounterRng::stream(master_seed, trial, "init/top_h");
  out.top_h = ao_solve_with(
      real, ctx.params, random_initial_coefficients(ports, m_o, ctx.spec, init_top),
      [&](const CascadedLink& link) { return top_h_baseline(link, m_o, ctx.spec); });

  CounterRng init_rand = CounterRng::stream(master_seed, trial, "init/random");
  CounterRng port_rng = CounterRng::stream(master_seed, trial, "ports/random");
  const std::vector<std::size_t> gamma = random_port_subset(ports, m_o, port_rng);
  out.random = ao_solve_with(
      real, ctx.params, random_initial_coefficients(ports, m_o, ctx.spec, init_rand),
      [&](const CascadedLink& link) { return fixed_ports_aligned(link, gamma, ctx.spec); });
  return out;
}

template <class Fn>
void parallel_for_trials(std::size_t trials, int threads, Fn&& fn) {
  if (threads <= 1 || trials <= 1) {
    for (std::size_t t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int count = std::min<int>(threads, static_cast<int>(trials));
  pool.reserve(static_cast<std::size_t>(count));
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int i = 0; i < count; ++i) {
    pool.emplace_back([&] {
      try {
        for (std::size_t t; (t = next.fetch_add(1)) < trials;) fn(t);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// Monte Carlo run of the three schemes over shared channel realizations.
/// Rows come back sorted by (trial, scheme) and are reproducible bytes given
/// (config, master_seed), independent of the thread count.
inline std::vector<TrialRow> run_trials(const ExperimentConfig& cfg) {
  const ExperimentContext ctx = make_context(cfg);
  std::vector<std::array<TrialRow, 3>> slots(cfg.trials);
  detail::parallel_for_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
    const ChannelRealization real =
        draw_channels(ctx.geom, ctx.params, ctx.corr, ctx.ports,
                      ChannelStreams::for_trial(cfg.master_seed, t));
    const detail::TrialSolves s = detail::solve_trial_schemes(
        ctx, real, cfg.master_seed, t,
        [&](const CascadedLink& link) { return detail::optimal_update(link, ctx); });
    const AoResult* results[3] = {&s.proposed, &s.top_h, &s.random};
    for (int i = 0; i < 3; ++i) {
      TrialRow row;
      row.trial = t;
      row.scheme = kSchemes[i];
      row.iters = results[i]->trace.iteration_count();
      row.abs_z = std::abs(results[i]->config.z);
      row.rate = achievable_rate(results[i]->config.z, ctx.params.sigma2);
      slots[t][static_cast<std::size_t>(i)] = std::move(row);
    }
  });
  std::vector<TrialRow> rows;
  rows.reserve(cfg.trials * 3);
  for (auto& s : slots)
    for (auto& r : s) rows.push_back(std::move(r));
  return rows;
}

struct SweepPoint {
  double value = std::numeric_limits<double>::quiet_NaN();
  std::vector<TrialRow> rows;
};

inline std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> points;
  if (!cfg.sweep) {
    points.push_back({std::numeric_limits<double>::quiet_NaN(), run_trials(cfg)});
    return points;
  }
  for (double v : cfg.sweep->values) {
    ExperimentConfig point = apply_sweep_value(cfg, cfg.sweep->variable, v);
    point.sweep.reset();
    points.push_back({v, run_trials(point)});
  }
  return points;
}

/// Oracle validation on a small instance: per-scheme end-to-end gain ratios
/// against the joint brute-force optimum (matched beamformer per enumerated
/// configuration), plus the per-iteration subproblem ratio of the proposed
/// update against the fixed-beamformer oracle.
struct ValidationOutput {
  std::vector<TrialRow> rows;
  double subproblem_min = std::numeric_limits<double>::infinity();
  double subproblem_max = -std::numeric_limits<double>::infinity();
};

inline ValidationOutput validate_against_oracle(const ExperimentConfig& cfg) {
  const ExperimentContext ctx = make_context(cfg);
  {
    // fail fast on oversized instances before spawning workers
    const double bound = [&] {
      double combos = 1.0;
      for (std::size_t i = 0; i < ctx.params.m_o; ++i)
        combos *= static_cast<double>(ctx.ports.size() - i) / static_cast<double>(i + 1);
      return combos * std::pow(static_cast<double>(codebook_size_bound(ctx.spec)),
                               static_cast<double>(ctx.params.m_o));
    }();
    if (bound > 1e8)
      throw InstanceTooLargeError("validate: enumeration exceeds the 1e8 bound");
  }
  struct TrialOut {
    std::array<TrialRow, 3> rows;
    double sub_min = std::numeric_limits<double>::infinity();
    double sub_max = -std::numeric_limits<double>::infinity();
  };
  std::vector<TrialOut> slots(cfg.trials);
  detail::parallel_for_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
    const ChannelRealization real =
        draw_channels(ctx.geom, ctx.params, ctx.corr, ctx.ports,
                      ChannelStreams::for_trial(cfg.master_seed, t));
    const JointOracleResult joint =
        exhaustive_joint_oracle(real, ctx.params.p, ctx.params.m_o, ctx.spec);
    TrialOut& out = slots[t];
    const detail::TrialSolves s = detail::solve_trial_schemes(
        ctx, real, cfg.master_seed, t, [&](const CascadedLink& link) {
          FrisConfiguration cfg_opt = detail::optimal_update(link, ctx);
          const OracleResult orc = exhaustive_oracle(link, ctx.params.m_o, ctx.spec);
          const double ratio = gain_ratio(cfg_opt.z, orc.z_opt);
          out.sub_min = std::min(out.sub_min, ratio);
          out.sub_max = std::max(out.sub_max, ratio);
          return cfg_opt;
        });
    const AoResult* results[3] = {&s.proposed, &s.top_h, &s.random};
    for (int i = 0; i < 3; ++i) {
      TrialRow row;
      row.trial = t;
      row.scheme = kSchemes[i];
      row.iters = results[i]->trace.iteration_count();
      row.abs_z = std::abs(results[i]->config.z);
      row.rate = achievable_rate(results[i]->config.z, ctx.params.sigma2);
      row.delta_g = row.abs_z / joint.abs_z;
      out.rows[static_cast<std::size_t>(i)] = std::move(row);
    }
  });
  ValidationOutput out;
  out.rows.reserve(cfg.trials * 3);
  for (auto& s : slots) {
    for (auto& r : s.rows) out.rows.push_back(std::move(r));
    out.subproblem_min = std::min(out.subproblem_min, s.sub_min);
    out.subproblem_max = std::max(out.subproblem_max, s.sub_max);
  }
  return out;
}

struct ProfileRow {
  double phi = 0.0;
  double support = 0.0;
  std::vector<std::size_t> gamma;
  bool star = false;
};

/// Support profile of the configuration subproblem for one trial's channel
/// at the initial matched beamformer: n_phi uniform samples plus every
/// candidate angle of the finite search, with the maximizer marked.
inline std::vector<ProfileRow> dump_support_profile(const ExperimentConfig& cfg,
                                                    std::size_t trial) {
  const ExperimentContext ctx = make_context(cfg);
  const ChannelRealization real =
      draw_channels(ctx.geom, ctx.params, ctx.corr, ctx.ports,
                    ChannelStreams::for_trial(cfg.master_seed, trial));
  CounterRng init = CounterRng::stream(cfg.master_seed, trial, "init/proposed");
  const std::vector<Complex> w0 =
      random_initial_coefficients(ctx.ports.size(), ctx.params.m_o, ctx.spec, init);
  Eigen::VectorXcd f;
  try {
    f = mrt_beamformer(w0, real, ctx.params.p);
  } catch (const DegenerateChannelError&) {
    f = Eigen::VectorXcd::Zero(real.h_d.size());
    f(0) = std::sqrt(ctx.params.p);
  }
  const CascadedLink link = cascaded_link(real, f);

  std::vector<double> phis;
  phis.reserve(cfg.n_phi + 64);
  for (std::size_t i = 0; i < cfg.n_phi; ++i)
    phis.push_back(kTwoPi * static_cast<double>(i) / static_cast<double>(cfg.n_phi));
  const BreakpointPartition part = [&] {
    if (const auto* poly = std::get_if<RegularPolygonCodebook>(&ctx.spec))
      return build_breakpoint_partition(link, ctx.params.m_o, poly->m_p);
    return build_general_partition(link, std::get<CodebookSet>(ctx.spec), ctx.params.m_o);
  }();
  for (double c : detail::candidate_angles(part)) phis.push_back(c);
  std::sort(phis.begin(), phis.end());
  phis.erase(std::unique(phis.begin(), phis.end()), phis.end());

  std::vector<ProfileRow> rows;
  rows.reserve(phis.size());
  std::size_t best = 0;
  for (double phi : phis) {
    const DirectionalEvaluation ev = [&] {
      if (const auto* poly = std::get_if<RegularPolygonCodebook>(&ctx.spec))
        return support_at(phi, link, *poly, ctx.params.m_o);
      return support_at(phi, link, std::get<CodebookSet>(ctx.spec), ctx.params.m_o);
    }();
    ProfileRow row;
    row.phi = phi;
    row.support = ev.support_value;
    row.gamma = ev.gamma;
    rows.push_back(std::move(row));
    if (rows.back().support > rows[best].support) best = rows.size() - 1;
  }
  if (!rows.empty()) rows[best].star = true;
  return rows;
}

struct ConvergenceRow {
  std::size_t trial = 0;
  std::size_t iter = 0;
  double abs_z = 0.0;
  double rate = 0.0;
};

/// Per-iteration trace of the proposed scheme over all trials.
inline std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg) {
  const ExperimentContext ctx = make_context(cfg);
  std::vector<std::vector<ConvergenceRow>> slots(cfg.trials);
  detail::parallel_for_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
    const ChannelRealization real =
        draw_channels(ctx.geom, ctx.params, ctx.corr, ctx.ports,
                      ChannelStreams::for_trial(cfg.master_seed, t));
    CounterRng init = CounterRng::stream(cfg.master_seed, t, "init/proposed");
    const AoResult res = ao_solve_with(
        real, ctx.params,
        random_initial_coefficients(ctx.ports.size(), ctx.params.m_o, ctx.spec, init),
        [&](const CascadedLink& link) { return detail::optimal_update(link, ctx); });
    for (std::size_t i = 0; i < res.trace.iterations.size(); ++i)
      slots[t].push_back(
          {t, i + 1, res.trace.iterations[i].abs_z, res.trace.iterations[i].rate});
  });
  std::vector<ConvergenceRow> rows;
  for (auto& s : slots)
    for (auto& r : s) rows.push_back(r);
  return rows;
}

// ---------------------------------------------------------------------------
// CSV emission. Formatting is pinned so reruns are byte-identical.

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_gamma(const std::vector<std::size_t>& gamma) {
  std::string s;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (i) s += '|';
    s += std::to_string(gamma[i]);
  }
  return s;
}

inline void write_run_csv(const std::vector<TrialRow>& rows, std::ostream& os) {
  os << "trial,scheme,iters,abs_z,rate,delta_g\n";
  for (const TrialRow& r : rows) {
    os << r.trial << ',' << r.scheme << ',' << r.iters << ',' << format_double(r.abs_z)
       << ',' << format_double(r.rate) << ',';
    if (r.delta_g) os << format_double(*r.delta_g);
    os << '\n';
  }
}

inline void write_profile_csv(const std::vector<ProfileRow>& rows, std::ostream& os) {
  os << "phi,support,gamma,is_star\n";
  for (const ProfileRow& r : rows)
    os << format_double(r.phi) << ',' << format_double(r.support) << ','
       << format_gamma(r.gamma) << ',' << (r.star ? 1 : 0) << '\n';
}

inline void write_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& os) {
  os << "trial,iter,abs_z,rate\n";
  for (const ConvergenceRow& r : rows)
    os << r.trial << ',' << r.iter << ',' << format_double(r.abs_z) << ','
       << format_double(r.rate) << '\n';
}

template <class Writer>
void write_csv_file(const std::string& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  writer(out);
  out.flush();
  if (!out) throw ConfigError("failed writing output file: " + path);
}

struct SchemeAggregate {
  std::string scheme;
  double mean_abs_z = 0.0;
  double mean_rate = 0.0;
  double mean_iters = 0.0;
  std::optional<double> mean_delta_g;
};

inline std::vector<SchemeAggregate> aggregate_rows(const std::vector<TrialRow>& rows) {
  std::vector<SchemeAggregate> out;
  for (const char* scheme : kSchemes) {
    SchemeAggregate agg;
    agg.scheme = scheme;
    double delta_sum = 0.0;
    std::size_t n = 0, n_delta = 0;
    for (const TrialRow& r : rows) {
      if (r.scheme != scheme) continue;
      agg.mean_abs_z += r.abs_z;
      agg.mean_rate += r.rate;
      agg.mean_iters += static_cast<double>(r.iters);
      if (r.delta_g) {
        delta_sum += *r.delta_g;
        ++n_delta;
      }
      ++n;
    }
    if (n == 0) continue;
    agg.mean_abs_z /= static_cast<double>(n);
    agg.mean_rate /= static_cast<double>(n);
    agg.mean_iters /= static_cast<double>(n);
    if (n_delta > 0) agg.mean_delta_g = delta_sum / static_cast<double>(n_delta);
    out.push_back(std::move(agg));
  }
  return out;
}

/// Output path for one sweep point: inserts _<variable>_<value> before the
/// extension.
inline std::string sweep_out_path(const std::string& base, const std::string& variable,
                                  double value) {
  const std::size_t dot = base.find_last_of('.');
  std::string tag = "_" + variable + "_" + format_double(value);
  if (dot == std::string::npos) return base + tag;
  return base.substr(0, dot) + tag + base.substr(dot);
}

}  // namespace fris
