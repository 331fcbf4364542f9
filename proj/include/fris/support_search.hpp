// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "fris/codebook.hpp"

namespace fris {

/// Direct-path scalar and per-port cascaded coefficients for a fixed
/// beamformer.
struct CascadedLink {
  Complex d{};
  std::vector<Complex> h;
  std::size_t ports() const noexcept { return h.size(); }
};

inline void validate_link(const CascadedLink& link) {
  if (link.h.empty()) throw std::invalid_argument("CascadedLink: at least one port required");
  const auto finite = [](Complex v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  };
  if (!finite(link.d))
    throw std::invalid_argument("CascadedLink: direct term must be finite");
  for (const Complex& v : link.h)
    if (!finite(v))
      throw std::invalid_argument("CascadedLink: cascaded coefficients must be finite");
}

/// Magnitude/phase view of a link. Zero entries get phase 0.
struct PolarLink {
  Complex d{};
  double a_d = 0.0;
  double alpha_d = 0.0;
  std::vector<double> a;
  std::vector<double> alpha;
};

inline PolarLink make_polar(const CascadedLink& link) {
  PolarLink p;
  p.d = link.d;
  p.a_d = std::abs(link.d);
  p.alpha_d = p.a_d > 0.0 ? std::arg(link.d) : 0.0;
  p.a.reserve(link.h.size());
  p.alpha.reserve(link.h.size());
  for (const Complex& hm : link.h) {
    const double am = std::abs(hm);
    p.a.push_back(am);
    p.alpha.push_back(am > 0.0 ? std::arg(hm) : 0.0);
  }
  return p;
}

/// Selected ports, the full coefficient vector (zero off the selection) and
/// the achieved combined sum z = d + sum_{m in gamma} h_m w_m.
struct FrisConfiguration {
  std::vector<std::size_t> gamma;  // sorted, |gamma| = m_o
  std::vector<Complex> w;          // size M
  Complex z{};
};

/// One direction phi with its support value, the induced port selection and
/// the chosen codeword per selected port.
struct DirectionalEvaluation {
  double phi = 0.0;
  double support_value = 0.0;
  std::vector<std::size_t> gamma;          // sorted
  std::vector<std::size_t> codeword_index;  // aligned with gamma
  std::vector<Complex> codeword;            // aligned with gamma
};

struct PortScore {
  double score;
  std::size_t codeword_index;
  Complex codeword;
};

/// Best directional contribution of one port under a general codebook:
/// max_w Re{e^{-j phi} h_m w}. Ties go to the lowest codeword index.
inline PortScore port_score(double phi, Complex h_m, const PhaseCodebook& cb) {
  const Complex u = std::polar(1.0, -phi) * h_m;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const double v = std::real(u * cb.codewords()[i]);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  return {best, best_i, cb.codewords()[best_i]};
}

struct PolygonScore {
  double score;
  int k;
  Complex codeword;
};

/// Closed-form score for the regular m_p-gon: a_m * cos of the quantization
/// residual of (phi - alpha_m), attained at the nearest grid codeword.
inline PolygonScore port_score_polygon(double phi, double a_m, double alpha_m, int m_p) {
  if (a_m < 0.0)
    throw std::invalid_argument("port_score_polygon: magnitude must be nonnegative");
  const CodewordChoice cw = nearest_codeword(phi - alpha_m, m_p);
  const double score = a_m * std::cos(quant_residual(phi - alpha_m, m_p));
  return {score, cw.index, cw.codeword};
}

/// Indices of the m_o largest scores, ties to the lowest index, returned
/// sorted ascending.
inline std::vector<std::size_t> top_mo_select(std::span<const double> scores, std::size_t m_o) {
  const std::size_t m = scores.size();
  if (m_o < 1 || m_o > m)
    throw std::invalid_argument("top_mo_select: need 1 <= m_o <= M");
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto before = [&scores](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  if (m_o < m)
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m_o), idx.end(), before);
  idx.resize(m_o);
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Support of the reachable combined-sum set along direction phi under
/// general per-port codebooks, with the realizing selection and codewords.
inline DirectionalEvaluation support_at(double phi, const CascadedLink& link,
                                        const CodebookSet& cbs, std::size_t m_o) {
  validate_link(link);
  const std::size_t m = link.ports();
  if (cbs.port_count() != m)
    throw std::invalid_argument("support_at: codebook set does not cover all ports");
  std::vector<double> scores(m);
  std::vector<std::size_t> cw_idx(m);
  std::vector<Complex> cw(m);
  for (std::size_t i = 0; i < m; ++i) {
    const PortScore ps = port_score(phi, link.h[i], cbs[i]);
    scores[i] = ps.score;
    cw_idx[i] = ps.codeword_index;
    cw[i] = ps.codeword;
  }
  DirectionalEvaluation ev;
  ev.phi = phi;
  ev.gamma = top_mo_select(scores, m_o);
  double total = std::real(std::polar(1.0, -phi) * link.d);
  ev.codeword_index.reserve(m_o);
  ev.codeword.reserve(m_o);
  for (std::size_t port : ev.gamma) {
    total += scores[port];
    ev.codeword_index.push_back(cw_idx[port]);
    ev.codeword.push_back(cw[port]);
  }
  ev.support_value = total;
  return ev;
}

/// Closed-form variant for a shared regular m_p-gon codebook.
inline DirectionalEvaluation support_at(double phi, const PolarLink& link, int m_p,
                                        std::size_t m_o) {
  const std::size_t m = link.a.size();
  std::vector<double> scores(m);
  std::vector<int> cw_idx(m);
  for (std::size_t i = 0; i < m; ++i) {
    const PolygonScore ps = port_score_polygon(phi, link.a[i], link.alpha[i], m_p);
    scores[i] = ps.score;
    cw_idx[i] = ps.k;
  }
  DirectionalEvaluation ev;
  ev.phi = phi;
  ev.gamma = top_mo_select(scores, m_o);
  double total = link.a_d * std::cos(phi - link.alpha_d);
  const double cell = kTwoPi / m_p;
  ev.codeword_index.reserve(m_o);
  ev.codeword.reserve(m_o);
  for (std::size_t port : ev.gamma) {
    total += scores[port];
    ev.codeword_index.push_back(static_cast<std::size_t>(cw_idx[port]));
    ev.codeword.push_back(std::polar(1.0, cell * cw_idx[port]));
  }
  ev.support_value = total;
  return ev;
}

inline DirectionalEvaluation support_at(double phi, const CascadedLink& link,
                                        const RegularPolygonCodebook& cb, std::size_t m_o) {
  validate_link(link);
  return support_at(phi, make_polar(link), cb.m_p, m_o);
}

/// Quantization midpoint angles: for every alpha, the midpoints between
/// adjacent grid points of the m_p-ary lattice shifted by alpha. Sorted
/// ascending in [0, 2*pi), duplicates within 1e-12 merged.
inline std::vector<double> build_quant_breakpoints(std::span<const double> alphas, int m_p) {
  if (m_p < 2)
    throw std::invalid_argument("build_quant_breakpoints: m_p must be at least 2");
  const double cell = kTwoPi / m_p;
  std::vector<double> out;
  out.reserve(alphas.size() * static_cast<std::size_t>(2 * m_p));
  for (double alpha : alphas) {
    for (int k = 0; k < m_p; ++k) {
      for (double sign : {0.5, -0.5}) {
        double ang = wrap(alpha + cell * (static_cast<double>(k) + sign));
        if (ang < 0.0) ang += kTwoPi;
        if (ang >= kTwoPi) ang -= kTwoPi;
        out.push_back(ang);
      }
    }
  }
  std::sort(out.begin(), out.end());
  std::vector<double> dedup;
  dedup.reserve(out.size());
  for (double v : out) {
    if (dedup.empty() || v - dedup.back() > 1e-12) dedup.push_back(v);
  }
  // circular duplicate across the 0/2*pi seam
  while (dedup.size() > 1 && (dedup.front() + kTwoPi) - dedup.back() <= 1e-12)
    dedup.pop_back();
  return dedup;
}

/// Complex resultant of one fixed region: d plus the selected ports'
/// quantized contributions. The support on the region is Re{e^{-j phi} C}.
inline Complex region_resultant(std::span<const std::size_t> gamma,
                                std::span<const double> betas,
                                std::span<const double> amps, Complex d) {
  Complex c = d;
  for (std::size_t m : gamma) c += std::polar(amps[m], betas[m]);
  return c;
}

/// One interval of the direction axis on which every port keeps its codeword
/// and the selection keeps its membership.
struct PartitionRegion {
  double lo = 0.0;  // open interval (lo, hi); hi may extend past 2*pi
  double hi = 0.0;
  std::vector<int> codeword;        // chosen codeword index per port
  std::vector<std::size_t> gamma;   // sorted selection on the region
  Complex resultant{};
};

struct BreakpointPartition {
  std::vector<double> breakpoints;       // sorted region boundaries in [0, 2*pi)
  std::vector<PartitionRegion> regions;  // region i spans (breakpoints[i], next)
};

namespace detail {

// Scratch space reused across probes of one optimization call.
struct SelectScratch {
  std::vector<double> scores;
  std::vector<std::size_t> gamma;

  // Top-m_o under fixed per-port sinusoid parameters (amp, beta) at phi.
  void select(std::span<const double> amp, std::span<const double> beta, double phi,
              std::size_t m_o) {
    const std::size_t m = amp.size();
    scores.resize(m);
    for (std::size_t i = 0; i < m; ++i) scores[i] = amp[i] * std::cos(phi - beta[i]);
    gamma = top_mo_select(scores, m_o);
  }
};

struct RegionBuild {
  std::span<const double> amp;
  std::span<const double> beta;
  Complex d;
  std::size_t m_o;
  const std::vector<int>* codeword;
  std::vector<PartitionRegion>* out;
  SelectScratch scratch;
  double width_floor = 1e-9;

  std::vector<std::size_t> gamma_at(double phi) {
    scratch.select(amp, beta, phi, m_o);
    return scratch.gamma;
  }

  void emit(double lo, double hi, std::vector<std::size_t> gamma) {
    PartitionRegion r;
    r.lo = lo;
    r.hi = hi;
    r.codeword = *codeword;
    r.resultant = region_resultant(gamma, beta, amp, d);
    r.gamma = std::move(gamma);
    out->push_back(std::move(r));
  }

  // Roots of amp_p cos(phi - beta_p) = amp_q cos(phi - beta_q) inside (x, y).
  void pair_tie_roots(std::size_t p, std::size_t q, double x, double y,
                      std::vector<double>& cuts) const {
    const Complex diff = std::polar(amp[p], beta[p]) - std::polar(amp[q], beta[q]);
    if (std::abs(diff) < 1e-15) return;  // identical sinusoids, tie is vacuous
    const double base = std::arg(diff);
    for (double r : {base + 0.5 * kPi, base - 0.5 * kPi}) {
      const double t = r + kTwoPi * std::ceil((x - r) / kTwoPi);
      if (t > x + 1e-13 && t < y - 1e-13) cuts.push_back(t);
    }
  }

  // Tie roots of every port swapped between the selections at x and y. Each
  // swapped pair is ordered oppositely at the two ends, so a root exists.
  void swap_roots(const std::vector<std::size_t>& ga, const std::vector<std::size_t>& gb,
                  double x, double y, std::vector<double>& cuts) const {
    std::vector<std::size_t> exited, entered;
    std::set_difference(ga.begin(), ga.end(), gb.begin(), gb.end(),
                        std::back_inserter(exited));
    std::set_difference(gb.begin(), gb.end(), ga.begin(), ga.end(),
                        std::back_inserter(entered));
    for (std::size_t p : exited)
      for (std::size_t q : entered) pair_tie_roots(p, q, x, y, cuts);
  }

  // Split (lo, hi) until the selection is provably constant on each leaf.
  // Within one fixed-codeword region every pair of port sinusoids crosses at
  // most once (the interval is narrower than pi), so equal selections at both
  // endpoints imply a constant selection inside; disagreement is resolved by
  // cutting at the swapped pairs' tie angles and at the midpoint.
  void refine(double lo, double hi, const std::vector<std::size_t>& gamma_lo,
              const std::vector<std::size_t>& gamma_hi, int depth) {
    const double mid = 0.5 * (lo + hi);
    std::vector<std::size_t> gamma_mid = gamma_at(mid);
    if (gamma_lo == gamma_mid && gamma_mid == gamma_hi) {
      emit(lo, hi, std::move(gamma_mid));
      return;
    }
    if (hi - lo < width_floor || depth <= 0) {
      emit(lo, hi, std::move(gamma_mid));
      return;
    }
    std::vector<double> cuts;
    swap_roots(gamma_lo, gamma_mid, lo, mid, cuts);
    swap_roots(gamma_mid, gamma_hi, mid, hi, cuts);
    cuts.push_back(mid);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return b - a <= 1e-13; }),
               cuts.end());
    double x = lo;
    const std::vector<std::size_t>* gx = &gamma_lo;
    std::vector<std::size_t> gx_store;
    for (double c : cuts) {
      std::vector<std::size_t> gc = gamma_at(c);
      refine(x, c, *gx, gc, depth - 1);
      gx_store = std::move(gc);
      gx = &gx_store;
      x = c;
    }
    refine(x, hi, *gx, gamma_hi, depth - 1);
  }
};

/// Build the partition from initial boundaries (already sorted in [0, 2*pi))
/// and a per-port codeword policy choose(m, phi) -> {index, beta}.
///
/// Boundary selections are shared between neighboring regions: port scores
/// are continuous across a codeword switch, so the Top-m_o set at a boundary
/// is the same whichever side's codewords evaluate it.
template <class ChoiceFn>
BreakpointPartition build_partition(const CascadedLink& link, std::size_t m_o,
                                    std::vector<double> boundaries, ChoiceFn&& choose) {
  const std::size_t m = link.ports();
  if (m_o < 1 || m_o > m)
    throw std::invalid_argument("build_partition: need 1 <= m_o <= M");
  if (boundaries.empty()) boundaries = {0.0, 0.5 * kPi, kPi, 1.5 * kPi};

  // Cap region widths at pi/2 so every pair of fixed sinusoids crosses at
  // most once per region.
  std::vector<double> bounds;
  bounds.reserve(boundaries.size() * 2);
  const std::size_t nb = boundaries.size();
  for (std::size_t i = 0; i < nb; ++i) {
    const double lo = boundaries[i];
    const double hi = (i + 1 < nb) ? boundaries[i + 1] : boundaries[0] + kTwoPi;
    bounds.push_back(lo);
    const double gap = hi - lo;
    if (gap > 0.5 * kPi) {
      const int extra = static_cast<int>(std::ceil(gap / (0.5 * kPi))) - 1;
      for (int k = 1; k <= extra; ++k)
        bounds.push_back(lo + gap * static_cast<double>(k) / (extra + 1));
    }
  }

  PolarLink polar = make_polar(link);
  std::vector<PartitionRegion> regions;
  std::vector<double> amp = polar.a;
  std::vector<double> beta(m);
  std::vector<int> codeword(m);
  const std::size_t nr = bounds.size();
  std::vector<std::size_t> gamma_lo, gamma_first;
  for (std::size_t i = 0; i < nr; ++i) {
    const double lo = bounds[i];
    const double hi = (i + 1 < nr) ? bounds[i + 1] : bounds[0] + kTwoPi;
    const double mid = 0.5 * (lo + hi);
    for (std::size_t p = 0; p < m; ++p) {
      const auto [idx, b] = choose(p, mid);
      codeword[p] = idx;
      beta[p] = b;
    }
    RegionBuild rb{amp, beta, link.d, m_o, &codeword, &regions};
    if (i == 0) {
      gamma_lo = rb.gamma_at(lo);
      gamma_first = gamma_lo;
    }
    std::vector<std::size_t> gamma_hi =
        (i + 1 < nr) ? rb.gamma_at(hi) : gamma_first;  // scores are 2*pi-periodic
    rb.refine(lo, hi, gamma_lo, gamma_hi, 64);
    gamma_lo = std::move(gamma_hi);
  }

  BreakpointPartition part;
  part.regions = std::move(regions);
  for (PartitionRegion& r : part.regions) {
    if (r.lo >= kTwoPi) {
      r.lo -= kTwoPi;
      r.hi -= kTwoPi;
    }
  }
  std::sort(part.regions.begin(), part.regions.end(),
            [](const PartitionRegion& a, const PartitionRegion& b) { return a.lo < b.lo; });
  part.breakpoints.reserve(part.regions.size());
  for (const PartitionRegion& r : part.regions) part.breakpoints.push_back(r.lo);
  return part;
}

}  // namespace detail

/// Partition of the direction axis for a shared regular m_p-gon codebook:
/// quantization midpoints refined by the detected selection-switch angles.
inline BreakpointPartition build_breakpoint_partition(const CascadedLink& link,
                                                      std::size_t m_o, int m_p) {
  validate_link(link);
  const PolarLink polar = make_polar(link);
  std::vector<double> active_alphas;
  for (std::size_t i = 0; i < polar.a.size(); ++i)
    if (polar.a[i] > 0.0) active_alphas.push_back(polar.alpha[i]);
  std::vector<double> bps;
  if (!active_alphas.empty()) bps = build_quant_breakpoints(active_alphas, m_p);
  const double cell = kTwoPi / m_p;
  auto choose = [&polar, m_p, cell](std::size_t p, double phi) {
    const CodewordChoice cw = nearest_codeword(phi - polar.alpha[p], m_p);
    return std::pair<int, double>{cw.index, polar.alpha[p] + cell * cw.index};
  };
  if (m_p < 2) throw std::invalid_argument("build_breakpoint_partition: m_p must be at least 2");
  return detail::build_partition(link, m_o, std::move(bps), choose);
}

/// Partition for general per-port codebooks; the per-port codeword switches
/// at the bisectors between consecutive effective phases of h_m * W_m.
inline BreakpointPartition build_general_partition(const CascadedLink& link,
                                                   const CodebookSet& cbs, std::size_t m_o) {
  validate_link(link);
  if (cbs.port_count() != link.ports())
    throw std::invalid_argument("build_general_partition: codebook set does not cover all ports");
  const PolarLink polar = make_polar(link);
  std::vector<double> bounds;
  for (std::size_t p = 0; p < link.ports(); ++p) {
    if (polar.a[p] <= 0.0 || cbs[p].size() < 2) continue;
    std::vector<double> eff;
    eff.reserve(cbs[p].size());
    for (double th : cbs[p].angles()) {
      double g = wrap(polar.alpha[p] + th);
      if (g < 0.0) g += kTwoPi;
      eff.push_back(g);
    }
    std::sort(eff.begin(), eff.end());
    for (std::size_t i = 0; i < eff.size(); ++i) {
      const double a = eff[i];
      const double b = (i + 1 < eff.size()) ? eff[i + 1] : eff[0] + kTwoPi;
      double mid = 0.5 * (a + b);
      if (mid >= kTwoPi) mid -= kTwoPi;
      bounds.push_back(mid);
    }
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end(),
                           [](double a, double b) { return b - a <= 1e-12; }),
               bounds.end());
  while (bounds.size() > 1 && (bounds.front() + kTwoPi) - bounds.back() <= 1e-12)
    bounds.pop_back();
  auto choose = [&link, &cbs](std::size_t p, double phi) {
    const PortScore ps = port_score(phi, link.h[p], cbs[p]);
    const Complex eff = link.h[p] * ps.codeword;
    const double b = std::abs(eff) > 0.0 ? std::arg(eff) : 0.0;
    return std::pair<int, double>{static_cast<int>(ps.codeword_index), b};
  };
  return detail::build_partition(link, m_o, std::move(bounds), choose);
}

/// Angles at which the Top-m_o membership changes, i.e. boundaries between
/// partition regions whose selections differ.
inline std::vector<double> detect_top_switch_angles(const BreakpointPartition& part) {
  std::vector<double> out;
  const std::size_t n = part.regions.size();
  if (n < 2) return out;
  for (std::size_t i = 0; i < n; ++i) {
    const PartitionRegion& cur = part.regions[i];
    const PartitionRegion& next = part.regions[(i + 1) % n];
    if (cur.gamma != next.gamma) out.push_back(next.lo);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<double> detect_top_switch_angles(const CascadedLink& link,
                                                    std::size_t m_o, int m_p) {
  return detect_top_switch_angles(build_breakpoint_partition(link, m_o, m_p));
}

namespace detail {

// Candidate directions: every region boundary plus each region's interior
// stationary angle arg(C) when it falls inside the region.
inline std::vector<double> candidate_angles(const BreakpointPartition& part) {
  std::vector<double> cand = part.breakpoints;
  for (const PartitionRegion& r : part.regions) {
    if (std::abs(r.resultant) < 1e-15) continue;  // no usable stationary direction
    const double ang = std::arg(r.resultant);
    const double t = ang + kTwoPi * std::ceil((r.lo - ang) / kTwoPi);
    if (t > r.lo && t < r.hi) {
      double v = t;
      if (v >= kTwoPi) v -= kTwoPi;
      cand.push_back(v);
    }
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end(),
                         [](double a, double b) { return b - a <= 1e-14; }),
             cand.end());
  return cand;
}

// On each region the support equals Re{e^{-j phi} C}, so every candidate can
// be scored from the resultants alone; boundary values come from both
// adjacent regions. Returns the maximizing angle, ties to the smallest.
inline double best_candidate_angle(const BreakpointPartition& part) {
  double best_phi = 0.0;
  double best_val = -std::numeric_limits<double>::infinity();
  const std::size_t n = part.regions.size();
  auto consider = [&](double phi, double val) {
    if (val > best_val || (val == best_val && phi < best_phi)) {
      best_val = val;
      best_phi = phi;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    const PartitionRegion& r = part.regions[i];
    const PartitionRegion& prev = part.regions[(i + n - 1) % n];
    const double at_lo = std::real(std::polar(1.0, -r.lo) * r.resultant);
    const double at_lo_prev = std::real(std::polar(1.0, -r.lo) * prev.resultant);
    consider(r.lo, std::max(at_lo, at_lo_prev));
    if (std::abs(r.resultant) < 1e-15) continue;
    const double ang = std::arg(r.resultant);
    const double t = ang + kTwoPi * std::ceil((r.lo - ang) / kTwoPi);
    if (t > r.lo && t < r.hi) {
      double v = t;
      if (v >= kTwoPi) v -= kTwoPi;
      consider(v, std::abs(r.resultant));
    }
  }
  return best_phi;
}

inline FrisConfiguration make_configuration(const CascadedLink& link,
                                            const DirectionalEvaluation& ev) {
  FrisConfiguration cfg;
  cfg.gamma = ev.gamma;
  cfg.w.assign(link.ports(), Complex{0.0, 0.0});
  Complex z = link.d;
  for (std::size_t i = 0; i < ev.gamma.size(); ++i) {
    cfg.w[ev.gamma[i]] = ev.codeword[i];
    z += link.h[ev.gamma[i]] * ev.codeword[i];
  }
  cfg.z = z;
  return cfg;
}

}  // namespace detail

/// Globally optimal port selection and codeword assignment for a shared
/// regular m_p-gon codebook: the support maximum over the finite candidate
/// set of boundary and stationary angles.
inline FrisConfiguration optimize_polygon(const CascadedLink& link, std::size_t m_o,
                                          int m_p) {
  const BreakpointPartition part = build_breakpoint_partition(link, m_o, m_p);
  const double phi_star = detail::best_candidate_angle(part);
  const DirectionalEvaluation ev = support_at(phi_star, make_polar(link), m_p, m_o);
  return detail::make_configuration(link, ev);
}

struct ExactPartition {};
struct UniformGrid {
  std::size_t n_phi = 4096;
};
using GeneralStrategy = std::variant<ExactPartition, UniformGrid>;

/// Optimal configuration for general per-port codebooks. The exact strategy
/// searches the finite candidate set of the partition; the uniform grid
/// evaluates n_phi equispaced directions and then iterates phi <- arg(z),
/// which never decreases the support and makes the reported value consistent
/// with the realized |z|.
inline FrisConfiguration optimize_general(const CascadedLink& link, const CodebookSet& cbs,
                                          std::size_t m_o,
                                          const GeneralStrategy& strategy = ExactPartition{}) {
  validate_link(link);
  if (std::holds_alternative<ExactPartition>(strategy)) {
    const BreakpointPartition part = build_general_partition(link, cbs, m_o);
    const double phi_star = detail::best_candidate_angle(part);
    const DirectionalEvaluation ev = support_at(phi_star, link, cbs, m_o);
    return detail::make_configuration(link, ev);
  }
  const std::size_t n = std::get<UniformGrid>(strategy).n_phi;
  if (n < 1) throw std::invalid_argument("optimize_general: grid needs at least one angle");
  DirectionalEvaluation best;
  best.support_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    DirectionalEvaluation ev = support_at(kTwoPi * static_cast<double>(i) / n, link, cbs, m_o);
    if (ev.support_value > best.support_value) best = std::move(ev);
  }
  for (int round = 0; round < 8; ++round) {
    const FrisConfiguration cfg = detail::make_configuration(link, best);
    if (std::abs(cfg.z) < 1e-15) break;
    double phi = std::arg(cfg.z);
    if (phi < 0.0) phi += kTwoPi;
    DirectionalEvaluation ev = support_at(phi, link, cbs, m_o);
    if (ev.support_value > best.support_value) {
      best = std::move(ev);
    } else {
      break;
    }
  }
  return detail::make_configuration(link, best);
}

}  // namespace fris
