#include "opgrowth/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "opgrowth/error.hpp"

namespace opgrowth {

namespace {

int words_for(int n) { return (n + 63) / 64; }

int letter_to_code(char c) {
  switch (c) {
    case 'I': return 0;
    case 'X': return 1;
    case 'Y': return 2;
    case 'Z': return 3;
    default: throw ContractError(std::string("unknown Pauli letter '") + c + "'");
  }
}

constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};

}  // namespace

Lattice Lattice::chain(int n) {
  if (n < 1) throw DimensionError("lattice needs at least one site");
  return Lattice{1, n, 1};
}

Lattice Lattice::square(int lx, int ly) {
  if (lx < 1 || ly < 1) throw DimensionError("lattice needs at least one site");
  return Lattice{2, lx, ly};
}

std::pair<int, int> Lattice::coord(int s) const {
  if (s < 0 || s >= size()) throw DimensionError("site out of range");
  return {s % lx, s / lx};
}

int Lattice::site(int x, int y) const {
  if (x < 0 || x >= lx || y < 0 || y >= ly) throw DimensionError("coordinate out of range");
  return y * lx + x;
}

int Lattice::distance(int i, int j) const {
  auto [xi, yi] = coord(i);
  auto [xj, yj] = coord(j);
  return std::abs(xi - xj) + std::abs(yi - yj);
}

PauliString::PauliString(int n) : n_(n), x_(words_for(n), 0), z_(words_for(n), 0) {
  if (n < 0) throw DimensionError("negative qubit count");
}

PauliString PauliString::single(int n, int site, char letter) {
  PauliString p(n);
  p.set_letter(site, letter);
  return p;
}

PauliString PauliString::from_letters(std::string_view letters) {
  PauliString p(static_cast<int>(letters.size()));
  for (std::size_t i = 0; i < letters.size(); ++i) p.set_letter(static_cast<int>(i), letters[i]);
  return p;
}

cplx PauliString::phase_value() const {
  static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[phase_];
}

void PauliString::check_site(int site) const {
  if (site < 0 || site >= n_) throw DimensionError("site out of range");
}

bool PauliString::x_bit(int site) const {
  check_site(site);
  return (x_[site / 64] >> (site % 64)) & 1ULL;
}

bool PauliString::z_bit(int site) const {
  check_site(site);
  return (z_[site / 64] >> (site % 64)) & 1ULL;
}

int PauliString::letter_code(int site) const {
  bool x = x_bit(site), z = z_bit(site);
  if (!x && !z) return 0;
  if (x && !z) return 1;
  if (x && z) return 2;
  return 3;
}

char PauliString::letter(int site) const { return kLetters[letter_code(site)]; }

void PauliString::set_letter(int site, char c) { set_letter_code(site, letter_to_code(c)); }

void PauliString::set_letter_code(int site, int code) {
  check_site(site);
  const std::uint64_t bit = 1ULL << (site % 64);
  const int w = site / 64;
  bool x = code == 1 || code == 2;
  bool z = code == 2 || code == 3;
  x_[w] = x ? (x_[w] | bit) : (x_[w] & ~bit);
  z_[w] = z ? (z_[w] | bit) : (z_[w] & ~bit);
}

bool PauliString::is_identity() const {
  for (std::size_t w = 0; w < x_.size(); ++w)
    if (x_[w] | z_[w]) return false;
  return true;
}

std::vector<int> PauliString::support() const {
  std::vector<int> out;
  for (std::size_t w = 0; w < x_.size(); ++w) {
    std::uint64_t m = x_[w] | z_[w];
    while (m) {
      int b = std::countr_zero(m);
      out.push_back(static_cast<int>(w) * 64 + b);
      m &= m - 1;
    }
  }
  return out;
}

int PauliString::weight() const {
  int c = 0;
  for (std::size_t w = 0; w < x_.size(); ++w) c += std::popcount(x_[w] | z_[w]);
  return c;
}

int PauliString::rightmost() const {
  for (int w = static_cast<int>(x_.size()) - 1; w >= 0; --w) {
    std::uint64_t m = x_[w] | z_[w];
    if (m) return w * 64 + 63 - std::countl_zero(m);
  }
  return -1;
}

PauliString PauliString::phase_free() const {
  PauliString p = *this;
  p.phase_ = 0;
  return p;
}

std::string PauliString::letters() const {
  std::string s(static_cast<std::size_t>(n_), 'I');
  for (int i = 0; i < n_; ++i) s[i] = letter(i);
  return s;
}

bool operator<(const PauliString& a, const PauliString& b) {
  if (a.n_ != b.n_) return a.n_ < b.n_;
  if (a.x_ != b.x_) return a.x_ < b.x_;
  if (a.z_ != b.z_) return a.z_ < b.z_;
  return a.phase_ < b.phase_;
}

PauliString multiply(const PauliString& a, const PauliString& b) {
  if (a.n_ != b.n_) throw DimensionError("Pauli strings on different lattices");
  PauliString c(a.n_);
  int k = a.phase_ + b.phase_;
  for (std::size_t w = 0; w < a.x_.size(); ++w) {
    std::uint64_t x3 = a.x_[w] ^ b.x_[w];
    std::uint64_t z3 = a.z_[w] ^ b.z_[w];
    k += std::popcount(a.x_[w] & a.z_[w]) + std::popcount(b.x_[w] & b.z_[w]) +
         2 * std::popcount(a.z_[w] & b.x_[w]) - std::popcount(x3 & z3);
    c.x_[w] = x3;
    c.z_[w] = z3;
  }
  c.set_phase(k);
  return c;
}

bool commutes(const PauliString& a, const PauliString& b) {
  if (a.n_ != b.n_) throw DimensionError("Pauli strings on different lattices");
  int s = 0;
  for (std::size_t w = 0; w < a.x_.size(); ++w)
    s += std::popcount(a.x_[w] & b.z_[w]) + std::popcount(a.z_[w] & b.x_[w]);
  return (s & 1) == 0;
}

std::size_t PauliHash::operator()(const PauliString& p) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(p.size());
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
  };
  for (auto v : p.x_words()) mix(v);
  for (auto v : p.z_words()) mix(v);
  mix(static_cast<std::uint64_t>(p.phase()));
  return static_cast<std::size_t>(h);
}

WeightedPauliSum WeightedPauliSum::from_string(const PauliString& p, cplx c) {
  WeightedPauliSum s(p.size());
  s.add(p, c);
  return s;
}

void WeightedPauliSum::check_compatible(int n) const {
  if (n != n_) throw DimensionError("operator sums on different lattices");
}

void WeightedPauliSum::add(const PauliString& p, cplx c) {
  check_compatible(p.size());
  if (c == cplx(0.0)) return;
  PauliString key = p.phase_free();
  cplx v = c * p.phase_value();
  auto [it, inserted] = terms_.try_emplace(std::move(key), v);
  if (!inserted) {
    it->second += v;
    if (it->second == cplx(0.0)) terms_.erase(it);
  }
}

cplx WeightedPauliSum::coefficient(const PauliString& p) const {
  check_compatible(p.size());
  auto it = terms_.find(p.phase_free());
  if (it == terms_.end()) return 0.0;
  return it->second * p.phase_value();
}

void WeightedPauliSum::normalize(double tol) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= tol)
      it = terms_.erase(it);
    else
      ++it;
  }
}

std::vector<std::pair<PauliString, cplx>> WeightedPauliSum::sorted_terms() const {
  std::vector<std::pair<PauliString, cplx>> v(terms_.begin(), terms_.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.first.letters() < b.first.letters();
  });
  return v;
}

WeightedPauliSum& WeightedPauliSum::operator+=(const WeightedPauliSum& o) {
  check_compatible(o.n_);
  for (const auto& [p, c] : o.terms_) add(p, c);
  return *this;
}

WeightedPauliSum& WeightedPauliSum::operator-=(const WeightedPauliSum& o) {
  check_compatible(o.n_);
  for (const auto& [p, c] : o.terms_) add(p, -c);
  return *this;
}

WeightedPauliSum& WeightedPauliSum::operator*=(cplx s) {
  if (s == cplx(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [p, c] : terms_) c *= s;
  return *this;
}

WeightedPauliSum WeightedPauliSum::adjoint() const {
  WeightedPauliSum out(n_);
  for (const auto& [p, c] : terms_) out.terms_.emplace(p, std::conj(c));
  return out;
}

bool WeightedPauliSum::is_hermitian(double tol) const {
  for (const auto& [p, c] : terms_)
    if (std::abs(c.imag()) > tol) return false;
  return true;
}

double WeightedPauliSum::max_abs_difference(const WeightedPauliSum& o) const {
  check_compatible(o.n_);
  double m = 0.0;
  for (const auto& [p, c] : terms_) m = std::max(m, std::abs(c - o.coefficient(p)));
  for (const auto& [p, c] : o.terms_)
    if (!terms_.count(p)) m = std::max(m, std::abs(c));
  return m;
}

WeightedPauliSum product(const WeightedPauliSum& a, const WeightedPauliSum& b) {
  if (a.size() != b.size()) throw DimensionError("operator sums on different lattices");
  WeightedPauliSum out(a.size());
  for (const auto& [p, c] : a.terms())
    for (const auto& [q, d] : b.terms()) out.add(multiply(p, q), c * d);
  return out;
}

WeightedPauliSum commutator(const WeightedPauliSum& a, const WeightedPauliSum& b) {
  if (a.size() != b.size()) throw DimensionError("operator sums on different lattices");
  WeightedPauliSum out(a.size());
  for (const auto& [p, c] : a.terms())
    for (const auto& [q, d] : b.terms()) {
      if (commutes(p, q)) continue;
      out.add(multiply(p, q), 2.0 * c * d);
    }
  return out;
}

double frobenius_norm(const WeightedPauliSum& a) {
  double s = 0.0;
  for (const auto& [p, c] : a.terms()) s += std::norm(c);
  return std::sqrt(s);
}

WeightedPauliSum project_site(const WeightedPauliSum& a, int x) {
  if (x < 0 || x >= a.size()) throw DimensionError("site out of range");
  WeightedPauliSum out(a.size());
  for (const auto& [p, c] : a.terms())
    if (p.letter_code(x) != 0) out.add(p, c);
  return out;
}

int rightmost_sector(const PauliString& p, int R) {
  int r = p.rightmost();
  if (r < 0) return 0;
  return std::min(r, R);
}

WeightedPauliSum rightmost_project(const WeightedPauliSum& a, int x, int R) {
  if (R < 0 || x < 0 || x > R) throw ContractError("sector outside [0, R]");
  WeightedPauliSum out(a.size());
  for (const auto& [p, c] : a.terms())
    if (rightmost_sector(p, R) == x) out.add(p, c);
  return out;
}

double front_expectation(const WeightedPauliSum& a, int R) {
  if (R < 0) throw ContractError("negative cutoff");
  double norm = frobenius_norm(a);
  if (std::abs(norm - 1.0) > 1e-9) throw ContractError("front expectation needs a unit-norm operator");
  double f = 0.0;
  for (const auto& [p, c] : a.terms()) f += rightmost_sector(p, R) * std::norm(c);
  return f;
}

int diameter_with_origin(const PauliString& p, const Lattice& lattice) {
  if (p.size() != lattice.size()) throw DimensionError("string does not match lattice");
  auto sites = p.support();
  sites.push_back(0);
  int lo_s = 1 << 30, hi_s = -(1 << 30), lo_d = 1 << 30, hi_d = -(1 << 30);
  for (int s : sites) {
    auto [x, y] = lattice.coord(s);
    lo_s = std::min(lo_s, x + y);
    hi_s = std::max(hi_s, x + y);
    lo_d = std::min(lo_d, x - y);
    hi_d = std::max(hi_d, x - y);
  }
  return std::max(hi_s - lo_s, hi_d - lo_d);
}

WeightedPauliSum project_min_diameter(const WeightedPauliSum& a, int L, const Lattice& lattice) {
  if (L < 0) throw ContractError("negative diameter");
  WeightedPauliSum out(a.size());
  for (const auto& [p, c] : a.terms())
    if (diameter_with_origin(p, lattice) >= L) out.add(p, c);
  return out;
}

WeightedPauliSum project_min_diameter(const WeightedPauliSum& a, int L) {
  return project_min_diameter(a, L, Lattice::chain(std::max(1, a.size())));
}

std::string to_text(const WeightedPauliSum& a) {
  std::string out;
  char buf[64];
  for (const auto& [p, c] : a.sorted_terms()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g ", c.real(), c.imag());
    out += buf;
    out += p.letters();
    out += '\n';
  }
  return out;
}

WeightedPauliSum parse_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  WeightedPauliSum out;
  bool sized = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double re, im;
    std::string letters;
    if (!(ls >> re >> im >> letters))
      throw ConfigError("malformed operator line " + std::to_string(lineno));
    PauliString p = PauliString::from_letters(letters);
    if (!sized) {
      out = WeightedPauliSum(p.size());
      sized = true;
    }
    out.add(p, cplx(re, im));
  }
  return out;
}

}  // namespace opgrowth
