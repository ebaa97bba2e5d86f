#include "opgrowth/scale.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "opgrowth/error.hpp"

namespace opgrowth::scale {

namespace {

bool power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

char code_letter(int c) { return "IXYZ"[c]; }

int letter_code(char c) {
  switch (c) {
    case 'X': return 1;
    case 'Y': return 2;
    case 'Z': return 3;
    default: throw ConfigError(std::string("bad coupling letter '") + c + "'");
  }
}

}  // namespace

int max_scale(int R) {
  if (R < 1 || !power_of_two(static_cast<long long>(R) + 1)) throw ContractError("R + 1 must be a power of two");
  int q = 0;
  while ((1LL << (q + 2)) <= static_cast<long long>(R) + 1) ++q;
  return q;
}

ScaleBlock block(int q, int k) {
  if (q < 0 || k < 0) throw ContractError("negative block index");
  return {q, k, (1 << q) * k, (1 << q) * (k + 2) - 1};
}

std::vector<ScaleBlock> blocks(int R) {
  const int qs = max_scale(R);
  std::vector<ScaleBlock> out;
  for (int q = 0; q <= qs; ++q) {
    const int K = (R + 1) / (1 << q) - 1;
    for (int k = 0; k <= K; ++k) {
      ScaleBlock b = block(q, k);
      b.hi = std::min(b.hi, R);
      out.push_back(b);
    }
  }
  return out;
}

ScaleTag assign_scale(int i, int j, int R) {
  if (i >= j) throw ContractError("assign_scale needs i < j");
  if (i < 0 || j > R) throw ContractError("sites outside [0, R]");
  max_scale(R);
  for (int q = 0;; ++q) {
    const int bi = i >> q, bj = j >> q;
    if (bj - bi <= 1) return {q, std::max(0, bj - 1)};
  }
}

double PowerLawHamiltonian::max_bound_ratio() const {
  double m = 0.0;
  for (const auto& c : couplings) m = std::max(m, std::abs(c.J) * std::pow(lattice.distance(c.i, c.j), alpha));
  return m;
}

void PowerLawHamiltonian::tag_scales(int R) {
  for (auto& c : couplings) c.tag = assign_scale(std::min(c.i, c.j), std::max(c.i, c.j), R);
}

WeightedPauliSum PowerLawHamiltonian::to_pauli_sum() const {
  WeightedPauliSum h(n);
  for (const auto& c : couplings) {
    PauliString p(n);
    p.set_letter_code(c.i, c.a);
    p.set_letter_code(c.j, c.b);
    h.add(p, c.J);
  }
  return h;
}

HamiltonianTerms PowerLawHamiltonian::to_terms() const {
  HamiltonianTerms t = hamiltonian_from_pauli_sum(to_pauli_sum());
  t.power_law = true;
  t.alpha = alpha;
  return t;
}

double h2_norm(const PowerLawHamiltonian& h) {
  double s = 0.0;
  for (const auto& c : h.couplings) s += c.J * c.J;
  return std::sqrt(s);
}

double h2_norm_grouped(const PowerLawHamiltonian& h) {
  std::map<std::pair<int, int>, WeightedPauliSum> pairs;
  for (const auto& c : h.couplings) {
    auto key = std::minmax(c.i, c.j);
    auto [it, ins] = pairs.try_emplace({key.first, key.second}, 2);
    PauliString p(2);
    p.set_letter_code(c.i < c.j ? 0 : 1, c.a);
    p.set_letter_code(c.i < c.j ? 1 : 0, c.b);
    it->second.add(p, c.J);
  }
  double s = 0.0;
  for (const auto& [k, op] : pairs) {
    double nrm = schatten_norm(to_matrix(op, 2).m, kInf, false);
    s += nrm * nrm;
  }
  return std::sqrt(s);
}

InteractionNorms region_interaction_norms(const std::vector<int>& ball1, const std::vector<int>& ball2,
                                          double alpha, const Lattice& lattice) {
  for (int x : ball1)
    if (std::find(ball2.begin(), ball2.end(), x) != ball2.end()) throw ContractError("regions overlap");
  InteractionNorms out;
  double sq = 0.0;
  for (int x : ball1)
    for (int y : ball2) {
      double d = lattice.distance(x, y);
      out.sum_bound += std::pow(d, -alpha);
      sq += std::pow(d, -2.0 * alpha);
    }
  out.sqrt_sum_bound = std::sqrt(sq);
  return out;
}

InteractionNorms region_interaction_norms(const std::vector<int>& ball1, const std::vector<int>& ball2,
                                          double alpha) {
  int mx = 0;
  for (int x : ball1) mx = std::max(mx, x);
  for (int x : ball2) mx = std::max(mx, x);
  return region_interaction_norms(ball1, ball2, alpha, Lattice::chain(mx + 1));
}

PowerLawHamiltonian sample_powerlaw_hamiltonian(const Lattice& lattice, double alpha, Rng& rng,
                                                SampleMode mode) {
  if (!(alpha > 0.0)) throw ContractError("alpha must be positive");
  PowerLawHamiltonian h;
  h.n = lattice.size();
  h.alpha = alpha;
  h.lattice = lattice;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> letter(1, 3);
  for (int i = 0; i < h.n; ++i)
    for (int j = i + 1; j < h.n; ++j) {
      const double bound = std::pow(lattice.distance(i, j), -alpha);
      if (mode == SampleMode::Sampled) {
        int a = letter(rng);
        int b = letter(rng);
        h.couplings.push_back({i, j, a, b, bound * u(rng), std::nullopt});
      } else {
        for (int a = 1; a <= 3; ++a)
          for (int b = 1; b <= 3; ++b) {
            double J = mode == SampleMode::Dense ? bound : bound * u(rng);
            h.couplings.push_back({i, j, a, b, J, std::nullopt});
          }
      }
    }
  return h;
}

PowerLawHamiltonian sample_powerlaw_hamiltonian(int n, double alpha, Rng& rng, SampleMode mode) {
  return sample_powerlaw_hamiltonian(Lattice::chain(n), alpha, rng, mode);
}

std::string to_text(const PowerLawHamiltonian& h) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "alpha=%.17g n=%d\n", h.alpha, h.n);
  out += buf;
  for (const auto& c : h.couplings) {
    std::snprintf(buf, sizeof buf, "%d %d %c %c %.17g\n", c.i, c.j, code_letter(c.a), code_letter(c.b), c.J);
    out += buf;
  }
  return out;
}

PowerLawHamiltonian parse_hamiltonian(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  PowerLawHamiltonian h;
  bool header = false;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!header) {
      double a;
      int n;
      if (std::sscanf(line.c_str() + first, "alpha=%lf n=%d", &a, &n) != 2)
        throw ConfigError("Hamiltonian header must read 'alpha=<a> n=<n>'");
      h.alpha = a;
      h.n = n;
      h.lattice = Lattice::chain(n);
      header = true;
      continue;
    }
    std::istringstream ls(line);
    Coupling c;
    char a, b;
    if (!(ls >> c.i >> c.j >> a >> b >> c.J)) throw ConfigError("malformed coupling line: " + line);
    if (c.i < 0 || c.j < 0 || c.i >= h.n || c.j >= h.n || c.i == c.j) throw ConfigError("coupling sites out of range");
    c.a = letter_code(a);
    c.b = letter_code(b);
    h.couplings.push_back(c);
  }
  if (!header) throw ConfigError("missing Hamiltonian header");
  return h;
}

}  // namespace opgrowth::scale
