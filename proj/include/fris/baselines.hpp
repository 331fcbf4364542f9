// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fris/channel.hpp"
#include "fris/codebook.hpp"
#include "fris/errors.hpp"
#include "fris/rng.hpp"
#include "fris/support_search.hpp"

namespace fris {

namespace detail {

// Codeword closest in angle to `target`; ties go to the lowest index.
inline Complex nearest_to_angle(double target, const CodebookSpec& spec, std::size_t port) {
  if (const auto* poly = std::get_if<RegularPolygonCodebook>(&spec))
    return nearest_codeword(target, poly->m_p).codeword;
  const auto& cb = std::get<CodebookSet>(spec)[port];
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const double d = std::abs(wrap(cb.angles()[i] - target));
    if (d < best) {
      best = d;
      best_i = i;
    }
  }
  return cb.codewords()[best_i];
}

// Phase-alignment coefficients on a fixed selection: each selected port gets
// the codeword nearest to arg(d) - arg(h_m), with arg(0) read as 0.
inline FrisConfiguration aligned_configuration(const CascadedLink& link,
                                               std::vector<std::size_t> gamma,
                                               const CodebookSpec& spec) {
  FrisConfiguration cfg;
  cfg.w.assign(link.ports(), Complex{0.0, 0.0});
  const double alpha_d = std::abs(link.d) > 0.0 ? std::arg(link.d) : 0.0;
  Complex z = link.d;
  for (std::size_t m : gamma) {
    const double alpha_m = std::abs(link.h[m]) > 0.0 ? std::arg(link.h[m]) : 0.0;
    const Complex w = nearest_to_angle(alpha_d - alpha_m, spec, m);
    cfg.w[m] = w;
    z += link.h[m] * w;
  }
  cfg.gamma = std::move(gamma);
  cfg.z = z;
  return cfg;
}

}  // namespace detail

/// Phase-alignment update on a caller-chosen port subset; the benchmark
/// schemes reuse this inside the alternating loop.
inline FrisConfiguration fixed_ports_aligned(const CascadedLink& link,
                                             std::vector<std::size_t> gamma,
                                             const CodebookSpec& spec) {
  validate_link(link);
  for (std::size_t m : gamma)
    if (m >= link.ports())
      throw std::invalid_argument("fixed_ports_aligned: port index out of range");
  return detail::aligned_configuration(link, std::move(gamma), spec);
}

/// Benchmark: a uniformly random m_o-subset of ports with quantized phase
/// alignment toward the direct term.
inline FrisConfiguration random_ports_baseline(const CascadedLink& link, std::size_t m_o,
                                               const CodebookSpec& spec, CounterRng& rng) {
  validate_link(link);
  const std::size_t m = link.ports();
  if (m_o < 1 || m_o > m)
    throw std::invalid_argument("random_ports_baseline: need 1 <= m_o <= M");
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < m_o; ++i) {
    const std::size_t j = i + rng.below(m - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m_o);
  std::sort(idx.begin(), idx.end());
  return detail::aligned_configuration(link, std::move(idx), spec);
}

/// Benchmark: deterministically keep the m_o ports with the largest |h_m|
/// (ties to the lowest index), aligned the same way.
inline FrisConfiguration top_h_baseline(const CascadedLink& link, std::size_t m_o,
                                        const CodebookSpec& spec) {
  validate_link(link);
  std::vector<double> mags(link.ports());
  for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(link.h[i]);
  return detail::aligned_configuration(link, top_mo_select(mags, m_o), spec);
}

namespace detail {

// Lexicographic enumeration over selections and codeword tuples. The visitor
// gets (gamma, codeword indices); first maximizer wins on ties.
template <class Visit>
void enumerate_configurations(std::size_t ports, std::size_t m_o, Visit&& visit) {
  std::vector<std::size_t> gamma(m_o);
  std::iota(gamma.begin(), gamma.end(), std::size_t{0});
  while (true) {
    visit(gamma);
    // next combination
    std::size_t i = m_o;
    while (i > 0) {
      --i;
      if (gamma[i] != i + ports - m_o) {
        ++gamma[i];
        for (std::size_t k = i + 1; k < m_o; ++k) gamma[k] = gamma[k - 1] + 1;
        i = m_o + 1;
        break;
      }
    }
    if (i != m_o + 1) break;
  }
}

inline double oracle_work_bound(std::size_t ports, std::size_t m_o, std::size_t cb_size) {
  double combos = 1.0;
  for (std::size_t i = 0; i < m_o; ++i)
    combos *= static_cast<double>(ports - i) / static_cast<double>(i + 1);
  return combos * std::pow(static_cast<double>(cb_size), static_cast<double>(m_o));
}

}  // namespace detail

struct OracleResult {
  Complex z_opt{};
  FrisConfiguration config;
};

/// Brute-force search over every selection and codeword tuple, maximizing
/// |d + sum h_m w_m|. Ties resolve to the lexicographically smallest
/// (selection, codeword indices). Guarded against oversized instances.
inline OracleResult exhaustive_oracle(const CascadedLink& link, std::size_t m_o,
                                      const CodebookSpec& spec) {
  validate_link(link);
  const std::size_t m = link.ports();
  if (m_o < 1 || m_o > m)
    throw std::invalid_argument("exhaustive_oracle: need 1 <= m_o <= M");
  if (detail::oracle_work_bound(m, m_o, codebook_size_bound(spec)) > 1e8)
    throw InstanceTooLargeError("exhaustive_oracle: enumeration exceeds the 1e8 bound");
  const CodebookSet cbs = materialize(spec, m);

  double best_mag = -1.0;
  OracleResult res;
  std::vector<std::size_t> cw(m_o);
  detail::enumerate_configurations(m, m_o, [&](const std::vector<std::size_t>& gamma) {
    std::fill(cw.begin(), cw.end(), std::size_t{0});
    while (true) {
      Complex z = link.d;
      for (std::size_t i = 0; i < m_o; ++i)
        z += link.h[gamma[i]] * cbs[gamma[i]].codewords()[cw[i]];
      if (std::abs(z) > best_mag) {
        best_mag = std::abs(z);
        res.z_opt = z;
        res.config.gamma = gamma;
        res.config.z = z;
        res.config.w.assign(m, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < m_o; ++i)
          res.config.w[gamma[i]] = cbs[gamma[i]].codewords()[cw[i]];
      }
      // odometer over codeword indices
      std::size_t i = m_o;
      while (i > 0) {
        --i;
        if (++cw[i] < cbs[gamma[i]].size()) break;
        cw[i] = 0;
        if (i == 0) return;
      }
    }
  });
  return res;
}

struct JointOracleResult {
  double abs_z = 0.0;  // sqrt(p) * ||a(w)|| at the best configuration
  FrisConfiguration config;
};

/// Brute force over every configuration with the matched beamformer applied
/// per configuration: maximizes sqrt(p) * ||a(w)||, the best gain any
/// beamformer can realize for that configuration.
inline JointOracleResult exhaustive_joint_oracle(const ChannelRealization& real, double p,
                                                 std::size_t m_o, const CodebookSpec& spec) {
  const auto m = static_cast<std::size_t>(real.g.rows());
  if (m_o < 1 || m_o > m)
    throw std::invalid_argument("exhaustive_joint_oracle: need 1 <= m_o <= M");
  if (detail::oracle_work_bound(m, m_o, codebook_size_bound(spec)) > 1e8)
    throw InstanceTooLargeError("exhaustive_joint_oracle: enumeration exceeds the 1e8 bound");
  const CodebookSet cbs = materialize(spec, m);

  // per-port contribution vectors: a(w) = h_d + sum conj(w_m) v_m
  std::vector<Eigen::VectorXcd> v(m);
  for (std::size_t i = 0; i < m; ++i)
    v[i] = real.h_r(static_cast<Eigen::Index>(i)) *
           real.g.row(static_cast<Eigen::Index>(i)).adjoint();

  double best = -1.0;
  JointOracleResult res;
  std::vector<std::size_t> cw(m_o);
  detail::enumerate_configurations(m, m_o, [&](const std::vector<std::size_t>& gamma) {
    std::fill(cw.begin(), cw.end(), std::size_t{0});
    while (true) {
      Eigen::VectorXcd a = real.h_d;
      for (std::size_t i = 0; i < m_o; ++i)
        a += std::conj(cbs[gamma[i]].codewords()[cw[i]]) * v[gamma[i]];
      const double gain = std::sqrt(p) * a.norm();
      if (gain > best) {
        best = gain;
        res.abs_z = gain;
        res.config.gamma = gamma;
        res.config.w.assign(m, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < m_o; ++i)
          res.config.w[gamma[i]] = cbs[gamma[i]].codewords()[cw[i]];
        res.config.z = Complex{gain, 0.0};
      }
      std::size_t i = m_o;
      while (i > 0) {
        --i;
        if (++cw[i] < cbs[gamma[i]].size()) break;
        cw[i] = 0;
        if (i == 0) return;
      }
    }
  });
  return res;
}

/// Achieved gain normalized by the brute-force optimum.
inline double gain_ratio(Complex z, Complex z_opt) {
  if (std::abs(z_opt) == 0.0)
    throw std::invalid_argument("gain_ratio: reference optimum must be nonzero");
  return std::abs(z) / std::abs(z_opt);
}

}  // namespace fris
