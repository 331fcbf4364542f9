// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fris/errors.hpp"
#include "fris/rng.hpp"
#include "fris/support_search.hpp"

namespace fris {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Placement of the BS, the reflecting surface, and the user, plus the
/// surface sampling grid. The grid has m_x * m_x candidate ports on a square
/// aperture of side w_x wavelengths.
struct SystemGeometry {
  Eigen::Vector3d bs_pos{0.0, 0.0, 5.0};
  Eigen::Vector3d fris_center{10.0, 10.0, 5.0};
  Eigen::Vector3d user_pos{50.0, 0.0, 0.0};
  int m_x = 8;
  double w_x = 2.0;
  double carrier_hz = 3.5e9;

  double wavelength() const noexcept { return kSpeedOfLight / carrier_hz; }
  int total_ports() const noexcept { return m_x * m_x; }
};

struct SystemParams {
  int n = 16;              // BS antennas
  std::size_t m_o = 8;     // selected ports
  double p = 1.0;          // transmit power
  double sigma2 = 1.0;     // noise power
  double k_factor_db = 3.0;
  double pathloss_exp = 2.5;
  double epsilon = 1e-6;   // AO stopping tolerance on |z|
  int max_iters = 50;
};

/// Candidate port positions: an m_x-by-m_x grid in the x-z plane centered at
/// the surface center, spacing w_x * lambda / m_x. Port m = iz * m_x + ix.
inline std::vector<Eigen::Vector3d> port_positions(const SystemGeometry& geom) {
  if (geom.m_x < 1) throw std::invalid_argument("port_positions: m_x must be at least 1");
  const double spacing = geom.w_x * geom.wavelength() / geom.m_x;
  const double half = 0.5 * (geom.m_x - 1);
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(static_cast<std::size_t>(geom.m_x) * geom.m_x);
  for (int iz = 0; iz < geom.m_x; ++iz) {
    for (int ix = 0; ix < geom.m_x; ++ix) {
      Eigen::Vector3d p = geom.fris_center;
      p.x() += (ix - half) * spacing;
      p.z() += (iz - half) * spacing;
      pts.push_back(p);
    }
  }
  return pts;
}

/// Isotropic-scattering correlation kernel and its principal square root.
/// Negative eigenvalues from round-off are clipped at zero before the root.
struct SpatialCorrelation {
  Eigen::MatrixXd r;          // j0 kernel, unit diagonal
  Eigen::MatrixXd r_clipped;  // eigenvalue-clipped PSD version of r
  Eigen::MatrixXd r_sqrt;     // symmetric principal square root of r_clipped
};

inline double sinc_j0(double x) noexcept {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

inline SpatialCorrelation correlation_matrix(const std::vector<Eigen::Vector3d>& positions,
                                             double lambda) {
  if (positions.empty())
    throw std::invalid_argument("correlation_matrix: at least one position required");
  const auto m = static_cast<Eigen::Index>(positions.size());
  SpatialCorrelation c;
  c.r.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    c.r(i, i) = 1.0;
    for (Eigen::Index k = i + 1; k < m; ++k) {
      const double dist = (positions[static_cast<std::size_t>(i)] -
                           positions[static_cast<std::size_t>(k)])
                              .norm();
      const double v = sinc_j0(kTwoPi * dist / lambda);
      c.r(i, k) = v;
      c.r(k, i) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.r);
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  c.r_clipped = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
  c.r_sqrt =
      es.eigenvectors() * clipped.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return c;
}

/// Log-distance power gain anchored at the free-space 1 m reference.
inline double path_gain(double dist_m, double lambda, double exponent) {
  if (dist_m < 1.0)
    throw std::invalid_argument("path_gain: distance must be at least the 1 m reference");
  const double ref = lambda / (4.0 * kPi);
  return ref * ref * std::pow(dist_m, -exponent);
}

/// One fading draw: BS-to-surface matrix, surface-to-user vector, and the
/// direct BS-to-user vector, spatial correlation and path gains applied.
struct ChannelRealization {
  Eigen::MatrixXcd g;    // M x N
  Eigen::VectorXcd h_r;  // M
  Eigen::VectorXcd h_d;  // N
};

/// Independent streams per channel component, so a draw of one component
/// never perturbs the others and sweeps that resize one component keep the
/// rest identical trial by trial.
struct ChannelStreams {
  CounterRng g;
  CounterRng h_r;
  CounterRng h_d;

  static ChannelStreams for_trial(std::uint64_t master_seed, std::uint64_t trial) {
    return {CounterRng::stream(master_seed, trial, "channel/g"),
            CounterRng::stream(master_seed, trial, "channel/hr"),
            CounterRng::stream(master_seed, trial, "channel/hd")};
  }
};

/// Draw a channel realization. The BS-to-surface link is Rician: a
/// deterministic unit-modulus plane-wave outer product (surface steering
/// toward the BS times the conjugated steering of a half-wavelength ULA
/// along x toward the surface) plus an i.i.d. scattered part. The remaining
/// links are Rayleigh. Entries are drawn row-major so a run is reproducible
/// from the stream seeds alone.
inline ChannelRealization draw_channels(const SystemGeometry& geom, const SystemParams& params,
                                        const SpatialCorrelation& corr,
                                        const std::vector<Eigen::Vector3d>& ports,
                                        ChannelStreams streams) {
  const auto m = static_cast<Eigen::Index>(ports.size());
  const Eigen::Index n = params.n;
  if (corr.r_sqrt.rows() != m)
    throw std::invalid_argument("draw_channels: correlation does not match the port count");
  const double lambda = geom.wavelength();
  const double wave_num = kTwoPi / lambda;

  const double pg_bf = path_gain((geom.fris_center - geom.bs_pos).norm(), lambda,
                                 params.pathloss_exp);
  const double pg_fu = path_gain((geom.user_pos - geom.fris_center).norm(), lambda,
                                 params.pathloss_exp);
  const double pg_bu = path_gain((geom.user_pos - geom.bs_pos).norm(), lambda,
                                 params.pathloss_exp);

  // LOS steering vectors
  const Eigen::Vector3d to_bs = (geom.bs_pos - geom.fris_center).normalized();
  const Eigen::Vector3d to_fris = (geom.fris_center - geom.bs_pos).normalized();
  Eigen::VectorXcd a_fris(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double phase = wave_num * (ports[static_cast<std::size_t>(i)] - geom.fris_center).dot(to_bs);
    a_fris(i) = std::polar(1.0, phase);
  }
  Eigen::VectorXcd a_bs(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double phase = wave_num * (0.5 * lambda * j) * to_fris.x();
    a_bs(j) = std::polar(1.0, phase);
  }

  const double kappa = std::pow(10.0, params.k_factor_db / 10.0);
  const double los_w = std::sqrt(kappa / (kappa + 1.0));
  const double nlos_w = std::sqrt(1.0 / (kappa + 1.0));

  Eigen::MatrixXcd g_tilde(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g_tilde(i, j) = los_w * a_fris(i) * std::conj(a_bs(j)) + nlos_w * streams.g.cnormal();

  Eigen::VectorXcd hr_tilde(m);
  for (Eigen::Index i = 0; i < m; ++i) hr_tilde(i) = streams.h_r.cnormal();

  ChannelRealization real;
  real.g = std::sqrt(pg_bf) * (corr.r_sqrt * g_tilde);
  real.h_r = std::sqrt(pg_fu) * (corr.r_sqrt * hr_tilde);
  real.h_d.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) real.h_d(j) = std::sqrt(pg_bu) * streams.h_d.cnormal();
  return real;
}

/// Direct scalar and per-port cascaded coefficients for a fixed beamformer:
/// d = h_d^H f, h_m = conj(h_r,m) * (g row m) * f.
inline CascadedLink cascaded_link(const ChannelRealization& real, const Eigen::VectorXcd& f) {
  if (f.size() != real.g.cols() || f.size() != real.h_d.size())
    throw std::invalid_argument("cascaded_link: beamformer size mismatch");
  CascadedLink link;
  link.d = real.h_d.dot(f);  // Eigen dot conjugates the left argument
  const auto m = real.g.rows();
  link.h.resize(static_cast<std::size_t>(m));
  const Eigen::VectorXcd gf = real.g * f;
  for (Eigen::Index i = 0; i < m; ++i)
    link.h[static_cast<std::size_t>(i)] = std::conj(real.h_r(i)) * gf(i);
  return link;
}

/// Effective channel vector a(w) = h_d + G^H diag(conj w) h_r; the matched
/// beamformer sqrt(p) a / ||a|| attains |a^H f| = sqrt(p) ||a||.
inline Eigen::VectorXcd effective_channel(const ChannelRealization& real,
                                          const std::vector<Complex>& w) {
  if (static_cast<Eigen::Index>(w.size()) != real.g.rows())
    throw std::invalid_argument("effective_channel: coefficient size mismatch");
  const Eigen::Map<const Eigen::VectorXcd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
  return real.h_d + real.g.adjoint() * wv.conjugate().cwiseProduct(real.h_r);
}

inline Eigen::VectorXcd mrt_beamformer(const std::vector<Complex>& w,
                                       const ChannelRealization& real, double p) {
  const Eigen::VectorXcd a = effective_channel(real, w);
  const double norm = a.norm();
  if (norm < 1e-15)
    throw DegenerateChannelError("mrt_beamformer: effective channel vanished");
  return (std::sqrt(p) / norm) * a;
}

}  // namespace fris
