// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

namespace fris {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Principal-value angle reduction onto (-pi, pi].
inline double wrap(double phi) {
  if (!std::isfinite(phi)) throw std::invalid_argument("wrap: angle must be finite");
  double w = phi - kTwoPi * std::floor((phi + kPi) / kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  if (w > kPi) w -= kTwoPi;
  return w;
}

/// Angular distance from phi to the nearest point of the uniform m_p-ary
/// phase grid {2*pi*k/m_p}. Bounded by pi/m_p.
inline double quant_residual(double phi, int m_p) {
  if (m_p < 2) throw std::invalid_argument("quant_residual: m_p must be at least 2");
  const double cell = kTwoPi / m_p;
  const double t = wrap(phi);
  const double k = std::round(t / cell);
  return std::abs(t - k * cell);
}

struct CodewordChoice {
  int index;         // grid index in [0, m_p)
  Complex codeword;  // exp(j*2*pi*index/m_p)
};

/// Nearest grid codeword to phi; exact midpoint ties resolve to the smaller
/// index so results are reproducible.
inline CodewordChoice nearest_codeword(double phi, int m_p) {
  if (m_p < 2) throw std::invalid_argument("nearest_codeword: m_p must be at least 2");
  const double cell = kTwoPi / m_p;
  const double t = wrap(phi);
  const long kf = static_cast<long>(std::floor(t / cell));
  const long kc = kf + 1;
  const double df = std::abs(t - static_cast<double>(kf) * cell);
  const double dc = std::abs(static_cast<double>(kc) * cell - t);
  const long a = ((kf % m_p) + m_p) % m_p;
  const long b = ((kc % m_p) + m_p) % m_p;
  long k;
  if (df < dc) {
    k = a;
  } else if (dc < df) {
    k = b;
  } else {
    k = std::min(a, b);
  }
  return {static_cast<int>(k), std::polar(1.0, cell * static_cast<double>(k))};
}

/// Support value of the regular m_p-gon codebook along direction phi:
/// cos of the quantization residual, in [cos(pi/m_p), 1].
inline double polygon_support(double phi, int m_p) {
  return std::cos(quant_residual(phi, m_p));
}

/// Finite set of unit-modulus reflection codewords.
class PhaseCodebook {
 public:
  explicit PhaseCodebook(std::vector<Complex> codewords) : codewords_(std::move(codewords)) {
    if (codewords_.empty())
      throw std::invalid_argument("PhaseCodebook: codebook must be nonempty");
    angles_.reserve(codewords_.size());
    for (const Complex& w : codewords_) {
      if (std::abs(std::abs(w) - 1.0) > 1e-12)
        throw std::invalid_argument("PhaseCodebook: codewords must have unit modulus");
      angles_.push_back(std::arg(w));
    }
    // pairwise distinct up to angular tolerance
    std::vector<double> sorted = angles_;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      if (sorted[i + 1] - sorted[i] <= 1e-12)
        throw std::invalid_argument("PhaseCodebook: codewords must be pairwise distinct");
    }
    if (sorted.size() > 1 && (sorted.front() + kTwoPi) - sorted.back() <= 1e-12)
      throw std::invalid_argument("PhaseCodebook: codewords must be pairwise distinct");
  }

  static PhaseCodebook regular(int m_p) {
    if (m_p < 2) throw std::invalid_argument("PhaseCodebook::regular: m_p must be at least 2");
    std::vector<Complex> w;
    w.reserve(static_cast<std::size_t>(m_p));
    const double cell = kTwoPi / m_p;
    for (int k = 0; k < m_p; ++k) w.push_back(std::polar(1.0, cell * k));
    return PhaseCodebook(std::move(w));
  }

  static PhaseCodebook from_angles(const std::vector<double>& angles) {
    std::vector<Complex> w;
    w.reserve(angles.size());
    for (double a : angles) w.push_back(std::polar(1.0, a));
    return PhaseCodebook(std::move(w));
  }

  const std::vector<Complex>& codewords() const noexcept { return codewords_; }
  const std::vector<double>& angles() const noexcept { return angles_; }
  std::size_t size() const noexcept { return codewords_.size(); }

 private:
  std::vector<Complex> codewords_;
  std::vector<double> angles_;
};

struct SupportPoint {
  double value;
  std::size_t index;
  Complex codeword;
};

/// Support of a general codebook along a unit direction: the codeword with
/// the largest projection Re{conj(u) w}. Ties go to the lowest index.
inline SupportPoint general_support(Complex direction, const PhaseCodebook& cb) {
  if (std::abs(std::abs(direction) - 1.0) > 1e-9)
    throw std::invalid_argument("general_support: direction must have unit modulus");
  const Complex u = std::conj(direction);
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

/// Uniform m_p-ary phase-shifter codebook, kept symbolic: the closed-form
/// score path never materializes the vertices.
struct RegularPolygonCodebook {
  int m_p;
  explicit RegularPolygonCodebook(int levels) : m_p(levels) {
    if (m_p < 2)
      throw std::invalid_argument("RegularPolygonCodebook: m_p must be at least 2");
  }
  PhaseCodebook materialize() const { return PhaseCodebook::regular(m_p); }
};

/// Codebook assignment for every candidate port: either one shared codebook
/// or an explicit per-port list.
class CodebookSet {
 public:
  static CodebookSet shared(PhaseCodebook cb, std::size_t port_count) {
    CodebookSet s;
    s.books_.push_back(std::move(cb));
    s.ports_ = port_count;
    s.shared_ = true;
    return s;
  }

  static CodebookSet per_port(std::vector<PhaseCodebook> books) {
    if (books.empty())
      throw std::invalid_argument("CodebookSet: at least one codebook required");
    CodebookSet s;
    s.ports_ = books.size();
    s.books_ = std::move(books);
    s.shared_ = false;
    return s;
  }

  const PhaseCodebook& operator[](std::size_t m) const {
    return shared_ ? books_.front() : books_.at(m);
  }
  std::size_t port_count() const noexcept { return ports_; }

  std::size_t max_size() const noexcept {
    std::size_t n = 0;
    for (const auto& b : books_) n = std::max(n, b.size());
    return n;
  }

 private:
  CodebookSet() = default;
  std::vector<PhaseCodebook> books_;
  std::size_t ports_ = 0;
  bool shared_ = false;
};

/// Either a symbolic regular polygon (shared by all ports) or explicit
/// general codebooks.
using CodebookSpec = std::variant<RegularPolygonCodebook, CodebookSet>;

inline CodebookSet materialize(const CodebookSpec& spec, std::size_t port_count) {
  if (const auto* poly = std::get_if<RegularPolygonCodebook>(&spec))
    return CodebookSet::shared(poly->materialize(), port_count);
  return std::get<CodebookSet>(spec);
}

inline std::size_t codebook_size_bound(const CodebookSpec& spec) {
  if (const auto* poly = std::get_if<RegularPolygonCodebook>(&spec))
    return static_cast<std::size_t>(poly->m_p);
  return std::get<CodebookSet>(spec).max_size();
}

}  // namespace fris
