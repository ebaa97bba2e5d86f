#pragma once

// Reference computations written independently of the library code paths they check.

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "opgrowth/dense.hpp"
#include "opgrowth/protocol.hpp"

namespace oracle {

// E_J[sin^2(2 J tau / L^alpha)] for J uniform on [-1, 1], composite Simpson rule.
inline double p1_quadrature(double tau, double length, double alpha, int panels = 20000) {
  const double w = 2.0 * tau / std::pow(length, alpha);
  auto f = [w](double j) {
    const double s = std::sin(w * j);
    return s * s;
  };
  const double h = 1.0 / panels;
  double acc = f(0.0) + f(1.0);
  for (int k = 1; k < panels; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(k * h);
  return acc * h / 3.0;
}

struct MeanEstimate {
  double mean = 0.0;
  double sigma = 0.0;
};

inline MeanEstimate p1_monte_carlo(double tau, double length, double alpha, long long draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double w = 2.0 * tau / std::pow(length, alpha);
  double s1 = 0.0, s2 = 0.0;
  for (long long k = 0; k < draws; ++k) {
    const double v = std::pow(std::sin(w * u(rng)), 2);
    s1 += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(draws);
  const double mean = s1 / n;
  const double var = std::max(0.0, s2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

// Probability of an odd number of flips after ell steps of the two-state parity chain.
inline double p_ell_markov(double p1, int ell) {
  double a = 1.0, b = 0.0;
  for (int k = 0; k < ell; ++k) {
    const double na = a * (1.0 - p1) + b * p1;
    const double nb = a * p1 + b * (1.0 - p1);
    a = na;
    b = nb;
  }
  return b;
}

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Closed form sum_k C(M,k) sum_{p=N}^k (-1)^{k-p} C(k,p).
inline long long inclusion_exclusion_closed(int N, int M) {
  long long total = 0;
  for (int k = N; k <= M; ++k) {
    long long c = 0;
    for (int p = N; p <= k; ++p) c += ((k - p) % 2 ? -1 : 1) * binomial(k, p);
    total += binomial(M, k) * c;
  }
  return total;
}

// Diagonal of the disorder-averaged super-density over Pauli strings on a chain of n sites
// (index digit 2*(n-1-s) .. holds the letter of site s as 2 bits x + 2 z, i.e. I=0, X=1, Z=2, Y=3).
class SuperDensityDiagonal {
 public:
  explicit SuperDensityDiagonal(int n) : n_(n), w_(std::size_t(1) << (2 * n), 0.0) {}

  static int code(int letter) {  // library letter code 0..3 (I,X,Y,Z) to x + 2z
    static const int map[4] = {0, 1, 3, 2};
    return map[letter];
  }
  static int letter(int c) {
    static const int map[4] = {0, 1, 3, 2};
    return map[c];
  }
  int site_code(std::size_t idx, int s) const { return static_cast<int>(idx >> (2 * s)) & 3; }

  void set_single(int site, int letter_code) {
    std::fill(w_.begin(), w_.end(), 0.0);
    w_[std::size_t(code(letter_code)) << (2 * site)] = 1.0;
  }

  // Averaged exp(-i theta Z_i Z_j) conjugation: anticommuting strings pick up Z_i Z_j with probability p1.
  void zz_pair(int i, int j, double p1) {
    std::vector<double> out(w_.size(), 0.0);
    const std::size_t flip = (std::size_t(2) << (2 * i)) | (std::size_t(2) << (2 * j));
    for (std::size_t k = 0; k < w_.size(); ++k) {
      if (w_[k] == 0.0) continue;
      const int xi = site_code(k, i) & 1, xj = site_code(k, j) & 1;
      if (xi ^ xj) {
        out[k] += (1.0 - p1) * w_[k];
        out[k ^ flip] += p1 * w_[k];
      } else {
        out[k] += w_[k];
      }
    }
    w_ = std::move(out);
  }

  // Group-averaged single-site channel read off the diagonal block of a 16x16 transfer matrix.
  void depolarize(int site, const opgrowth::Matrix& transfer) {
    std::vector<double> out(w_.size(), 0.0);
    for (std::size_t k = 0; k < w_.size(); ++k) {
      if (w_[k] == 0.0) continue;
      const int a = letter(site_code(k, site));
      const std::size_t base = k & ~(std::size_t(3) << (2 * site));
      for (int b = 0; b < 4; ++b) {
        const double t = transfer(4 * b + b, 4 * a + a).real();
        if (t != 0.0) out[base | (std::size_t(code(b)) << (2 * site))] += t * w_[k];
      }
    }
    w_ = std::move(out);
  }

  // Occupancy bitmask (bit s set when site s carries a non-identity letter) -> probability.
  std::map<unsigned, double> occupancy_distribution() const {
    std::map<unsigned, double> d;
    for (std::size_t k = 0; k < w_.size(); ++k) {
      if (w_[k] == 0.0) continue;
      unsigned mask = 0;
      for (int s = 0; s < n_; ++s)
        if (site_code(k, s)) mask |= 1u << s;
      d[mask] += w_[k];
    }
    return d;
  }

  double total() const {
    double t = 0.0;
    for (double v : w_) t += v;
    return t;
  }

 private:
  int n_;
  std::vector<double> w_;
};

// Runs the averaged channel for a d=1 schedule starting from X on site 0.
inline std::map<unsigned, double> exact_occupancy_distribution(const opgrowth::protocol::ProtocolSchedule& s) {
  const auto& p = s.params;
  const int n = static_cast<int>(p.site_count());
  SuperDensityDiagonal rho(n);
  rho.set_single(0, 1);
  const opgrowth::Matrix transfer = opgrowth::depolarizer_transfer();
  for (const auto& layer : s.layers) {
    if (layer.kind == opgrowth::protocol::LayerKind::ZZGrow) {
      const int side = static_cast<int>(std::lround(std::pow(p.m, layer.q)));
      const double p1 = p1_quadrature(layer.duration * layer.prefactor, 1.0, 1.0);
      for (int c = 0; c < n; c += side)
        for (int i = c; i < c + side; ++i)
          for (int j = i + 1; j < c + side; ++j) rho.zz_pair(i, j, p1);
    } else {
      for (int site = 0; site < n; ++site) rho.depolarize(site, transfer);
    }
  }
  return rho.occupancy_distribution();
}

inline double total_variation(const std::map<unsigned, double>& a, const std::map<unsigned, double>& b) {
  std::map<unsigned, double> diff = a;
  for (const auto& [k, v] : b) diff[k] -= v;
  double tv = 0.0;
  for (const auto& [k, v] : diff) tv += std::abs(v);
  return 0.5 * tv;
}

// Pearson chi-square statistic of observed counts against expected probabilities.
inline double chi_square(const std::vector<long long>& counts, const std::vector<double>& probs) {
  long long n = 0;
  for (auto c : counts) n += c;
  double chi = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double e = probs[k] * static_cast<double>(n);
    chi += (counts[k] - e) * (counts[k] - e) / e;
  }
  return chi;
}

}  // namespace oracle
