#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace opgrowth {

using cplx = std::complex<double>;

// Sites are indexed row-major; d=1 chains have ly = 1.
struct Lattice {
  int d = 1;
  int lx = 1;
  int ly = 1;

  static Lattice chain(int n);
  static Lattice square(int lx, int ly);

  int size() const { return lx * ly; }
  std::pair<int, int> coord(int site) const;
  int site(int x, int y) const;
  int distance(int i, int j) const;
};

// Letter codes: 0=I, 1=X, 2=Y, 3=Z. The letter (x,z) stands for i^{xz} X^x Z^z.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n);

  static PauliString identity(int n) { return PauliString(n); }
  static PauliString single(int n, int site, char letter);
  static PauliString from_letters(std::string_view letters);

  int size() const { return n_; }
  int phase() const { return phase_; }
  cplx phase_value() const;
  void set_phase(int k) { phase_ = static_cast<std::uint8_t>(((k % 4) + 4) % 4); }

  int letter_code(int site) const;
  char letter(int site) const;
  void set_letter(int site, char letter);
  void set_letter_code(int site, int code);

  bool x_bit(int site) const;
  bool z_bit(int site) const;
  const std::vector<std::uint64_t>& x_words() const { return x_; }
  const std::vector<std::uint64_t>& z_words() const { return z_; }

  bool is_identity() const;
  std::vector<int> support() const;
  int weight() const;
  // Largest non-identity site, or -1 for the identity.
  int rightmost() const;

  PauliString phase_free() const;
  std::string letters() const;

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.n_ == b.n_ && a.phase_ == b.phase_ && a.x_ == b.x_ && a.z_ == b.z_;
  }
  friend bool operator<(const PauliString& a, const PauliString& b);

  friend PauliString multiply(const PauliString& a, const PauliString& b);
  friend bool commutes(const PauliString& a, const PauliString& b);

 private:
  void check_site(int site) const;

  int n_ = 0;
  std::uint8_t phase_ = 0;
  std::vector<std::uint64_t> x_;
  std::vector<std::uint64_t> z_;
};

PauliString multiply(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);

struct PauliHash {
  std::size_t operator()(const PauliString& p) const;
};

class WeightedPauliSum {
 public:
  using Map = std::unordered_map<PauliString, cplx, PauliHash>;

  WeightedPauliSum() = default;
  explicit WeightedPauliSum(int n) : n_(n) {}
  static WeightedPauliSum from_string(const PauliString& p, cplx c = 1.0);

  int size() const { return n_; }
  std::size_t term_count() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const Map& terms() const { return terms_; }

  void add(const PauliString& p, cplx c);
  cplx coefficient(const PauliString& p) const;
  // Drops entries with |c| <= tol.
  void normalize(double tol = 0.0);

  std::vector<std::pair<PauliString, cplx>> sorted_terms() const;

  WeightedPauliSum& operator+=(const WeightedPauliSum& o);
  WeightedPauliSum& operator-=(const WeightedPauliSum& o);
  WeightedPauliSum& operator*=(cplx s);
  friend WeightedPauliSum operator+(WeightedPauliSum a, const WeightedPauliSum& b) { return a += b; }
  friend WeightedPauliSum operator-(WeightedPauliSum a, const WeightedPauliSum& b) { return a -= b; }
  friend WeightedPauliSum operator*(WeightedPauliSum a, cplx s) { return a *= s; }
  friend WeightedPauliSum operator*(cplx s, WeightedPauliSum a) { return a *= s; }

  WeightedPauliSum adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;
  double max_abs_difference(const WeightedPauliSum& o) const;

 private:
  void check_compatible(int n) const;

  int n_ = 0;
  Map terms_;
};

WeightedPauliSum product(const WeightedPauliSum& a, const WeightedPauliSum& b);
WeightedPauliSum commutator(const WeightedPauliSum& a, const WeightedPauliSum& b);

double frobenius_norm(const WeightedPauliSum& a);

// Terms with a non-identity letter at site x.
WeightedPauliSum project_site(const WeightedPauliSum& a, int x);

// Rightmost-site sector x of a d=1 chain truncated at R: sector 0 holds strings
// trivial on every site > 0, sector R holds anything touching a site >= R.
int rightmost_sector(const PauliString& p, int R);
WeightedPauliSum rightmost_project(const WeightedPauliSum& a, int x, int R);
double front_expectation(const WeightedPauliSum& a, int R);

// Diameter of support together with the origin (site 0).
int diameter_with_origin(const PauliString& p, const Lattice& lattice);
WeightedPauliSum project_min_diameter(const WeightedPauliSum& a, int L, const Lattice& lattice);
WeightedPauliSum project_min_diameter(const WeightedPauliSum& a, int L);

// One term per line: "<re> <im> <letters>".
std::string to_text(const WeightedPauliSum& a);
WeightedPauliSum parse_text(std::string_view text);

}  // namespace opgrowth
