// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fris/channel.hpp"
#include "fris/codebook.hpp"
#include "fris/rng.hpp"
#include "fris/support_search.hpp"

namespace fris {

/// Rate of a scalar channel with gain |z| over noise power sigma2.
inline double achievable_rate(Complex z, double sigma2) {
  if (sigma2 <= 0.0) throw std::invalid_argument("achievable_rate: sigma2 must be positive");
  return std::log2(1.0 + std::norm(z) / sigma2);
}

struct AoIteration {
  double abs_z = 0.0;
  double rate = 0.0;
  double a_norm = 0.0;  // effective channel norm feeding this iteration's beamformer
  std::vector<std::size_t> gamma;
};

struct AoTrace {
  std::vector<AoIteration> iterations;
  bool converged = false;
  std::size_t iteration_count() const noexcept { return iterations.size(); }
};

struct AoResult {
  Eigen::VectorXcd beamformer;
  FrisConfiguration config;
  AoTrace trace;
};

/// Random feasible starting point: a uniformly random m_o-subset of ports,
/// each with a uniformly random codeword.
inline std::vector<Complex> random_initial_coefficients(std::size_t ports, std::size_t m_o,
                                                        const CodebookSpec& spec,
                                                        CounterRng& rng) {
  if (m_o < 1 || m_o > ports)
    throw std::invalid_argument("random_initial_coefficients: need 1 <= m_o <= M");
  std::vector<std::size_t> idx(ports);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < m_o; ++i) {
    const std::size_t j = i + rng.below(ports - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<Complex> w(ports, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < m_o; ++i) {
    if (const auto* poly = std::get_if<RegularPolygonCodebook>(&spec)) {
      const auto k = rng.below(static_cast<std::uint64_t>(poly->m_p));
      w[idx[i]] = std::polar(1.0, kTwoPi * static_cast<double>(k) / poly->m_p);
    } else {
      const auto& cb = std::get<CodebookSet>(spec)[idx[i]];
      w[idx[i]] = cb.codewords()[rng.below(cb.size())];
    }
  }
  return w;
}

/// Alternating ascent between the matched beamformer and a configuration
/// update. The update callable maps a CascadedLink to a FrisConfiguration;
/// plugging in an optimal update makes the |z| sequence nondecreasing.
/// Stops when successive |z| values differ by at most epsilon or the
/// iteration cap is reached.
template <class FrisUpdate>
AoResult ao_solve_with(const ChannelRealization& real, const SystemParams& params,
                       std::vector<Complex> w0, FrisUpdate&& update) {
  AoResult res;
  std::vector<Complex> w = std::move(w0);
  double prev_abs = 0.0;
  for (int t = 0; t < params.max_iters; ++t) {
    Eigen::VectorXcd f;
    double a_norm = 0.0;
    try {
      const Eigen::VectorXcd a = effective_channel(real, w);
      a_norm = a.norm();
      if (a_norm < 1e-15) throw DegenerateChannelError("effective channel vanished");
      f = (std::sqrt(params.p) / a_norm) * a;
    } catch (const DegenerateChannelError&) {
      // fall back to the first unit basis vector at full power
      f = Eigen::VectorXcd::Zero(real.h_d.size());
      f(0) = std::sqrt(params.p);
    }
    const CascadedLink link = cascaded_link(real, f);
    bool all_zero = std::abs(link.d) == 0.0;
    for (const Complex& hm : link.h) all_zero = all_zero && std::abs(hm) == 0.0;
    if (all_zero) throw DegenerateChannelError("ao_solve: channel is identically zero");

    FrisConfiguration cfg = update(link);
    const double abs_z = std::abs(cfg.z);
    res.trace.iterations.push_back(
        {abs_z, achievable_rate(cfg.z, params.sigma2), a_norm, cfg.gamma});
    w = cfg.w;
    res.beamformer = std::move(f);
    res.config = std::move(cfg);
    if (std::abs(abs_z - prev_abs) <= params.epsilon) {
      res.trace.converged = true;
      break;
    }
    prev_abs = abs_z;
  }
  return res;
}

/// Full solver: random initialization, then alternate the matched beamformer
/// with the optimal configuration update for the given codebook.
inline AoResult ao_solve(const ChannelRealization& real, const SystemParams& params,
                         const CodebookSpec& spec, CounterRng init_rng) {
  const auto ports = static_cast<std::size_t>(real.g.rows());
  std::vector<Complex> w0 = random_initial_coefficients(ports, params.m_o, spec, init_rng);
  if (const auto* poly = std::get_if<RegularPolygonCodebook>(&spec)) {
    const int m_p = poly->m_p;
    return ao_solve_with(real, params, std::move(w0), [&params, m_p](const CascadedLink& link) {
      return optimize_polygon(link, params.m_o, m_p);
    });
  }
  const auto& cbs = std::get<CodebookSet>(spec);
  return ao_solve_with(real, params, std::move(w0), [&params, &cbs](const CascadedLink& link) {
    return optimize_general(link, cbs, params.m_o, ExactPartition{});
  });
}

}  // namespace fris
