#include "opgrowth/dense.hpp"

#include <bit>
#include <cmath>
#include <complex>

#include "opgrowth/error.hpp"

namespace opgrowth {

namespace {

void check_cap(int n, int cap) {
  if (n < 0) throw DimensionError("negative qubit count");
  if (n > cap) throw ResourceError("dense oracle limited to " + std::to_string(cap) + " qubits");
}

// Masks with site s mapped to matrix bit n-1-s.
void matrix_masks(const PauliString& p, std::uint64_t& xm, std::uint64_t& zm) {
  const int n = p.size();
  xm = zm = 0;
  for (int s = 0; s < n; ++s) {
    const std::uint64_t bit = 1ULL << (n - 1 - s);
    if (p.x_bit(s)) xm |= bit;
    if (p.z_bit(s)) zm |= bit;
  }
}

const cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

Matrix2 pauli2(int code) {
  Matrix2 m;
  switch (code) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

}  // namespace

DenseOperator DenseOperator::identity(int n) {
  check_cap(n, 30);
  const Eigen::Index d = Eigen::Index(1) << n;
  return {n, Matrix::Identity(d, d)};
}

double DenseOperator::hermiticity_defect() const { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

void HamiltonianTerms::add_pauli(const PauliString& p, double coefficient) {
  if (p.size() != n) throw DimensionError("term does not match Hamiltonian size");
  HamiltonianTerm t;
  t.sites = p.support();
  PauliString local = PauliString::identity(static_cast<int>(t.sites.size()));
  for (std::size_t j = 0; j < t.sites.size(); ++j) local.set_letter_code(static_cast<int>(j), p.letter_code(t.sites[j]));
  local.set_phase(p.phase());
  t.local = pauli_matrix(local);
  t.coefficient = coefficient;
  terms.push_back(std::move(t));
}

HamiltonianTerms hamiltonian_from_pauli_sum(const WeightedPauliSum& h) {
  if (!h.is_hermitian(1e-12)) throw ContractError("Hamiltonian must be Hermitian");
  HamiltonianTerms out;
  out.n = h.size();
  for (const auto& [p, c] : h.sorted_terms()) out.add_pauli(p, c.real());
  return out;
}

Matrix pauli_matrix(const PauliString& p, int cap) {
  const int n = p.size();
  check_cap(n, cap);
  const std::uint64_t d = 1ULL << n;
  std::uint64_t xm, zm;
  matrix_masks(p, xm, zm);
  const int base = p.phase() + std::popcount(xm & zm);
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::uint64_t b = 0; b < d; ++b) {
    int k = base + 2 * std::popcount(b & zm);
    m(static_cast<Eigen::Index>(b ^ xm), static_cast<Eigen::Index>(b)) = kIPow[k & 3];
  }
  return m;
}

DenseOperator to_matrix(const WeightedPauliSum& a, int n, int cap) {
  check_cap(n, cap);
  if (a.size() != n) throw DimensionError("operator size does not match qubit count");
  const std::uint64_t d = 1ULL << n;
  DenseOperator out{n, Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))};
  for (const auto& [p, c] : a.terms()) {
    std::uint64_t xm, zm;
    matrix_masks(p, xm, zm);
    const int base = std::popcount(xm & zm);
    for (std::uint64_t b = 0; b < d; ++b) {
      int k = base + 2 * std::popcount(b & zm);
      out.m(static_cast<Eigen::Index>(b ^ xm), static_cast<Eigen::Index>(b)) += c * kIPow[k & 3];
    }
  }
  return out;
}

Matrix embed(const Matrix& local, const std::vector<int>& sites, int n) {
  const int k = static_cast<int>(sites.size());
  if (local.rows() != (Eigen::Index(1) << k) || local.cols() != local.rows())
    throw DimensionError("local operator does not match its site list");
  std::vector<std::uint64_t> bit(k);
  for (int j = 0; j < k; ++j) {
    if (sites[j] < 0 || sites[j] >= n) throw DimensionError("term site out of range");
    bit[j] = 1ULL << (n - 1 - sites[j]);
  }
  const std::uint64_t d = 1ULL << n;
  const std::uint64_t ld = 1ULL << k;
  std::uint64_t mask = 0;
  for (auto b : bit) mask |= b;
  auto scatter = [&](std::uint64_t local_index) {
    std::uint64_t out = 0;
    for (int j = 0; j < k; ++j)
      if ((local_index >> (k - 1 - j)) & 1ULL) out |= bit[j];
    return out;
  };
  std::vector<std::uint64_t> spread(ld);
  for (std::uint64_t l = 0; l < ld; ++l) spread[l] = scatter(l);
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::uint64_t b = 0; b < d; ++b) {
    std::uint64_t col_local = 0;
    for (int j = 0; j < k; ++j)
      if (b & bit[j]) col_local |= 1ULL << (k - 1 - j);
    const std::uint64_t rest = b & ~mask;
    for (std::uint64_t r = 0; r < ld; ++r) {
      cplx v = local(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_local));
      if (v != cplx(0.0)) m(static_cast<Eigen::Index>(rest | spread[r]), static_cast<Eigen::Index>(b)) += v;
    }
  }
  return m;
}

DenseOperator to_matrix(const HamiltonianTerms& h, int cap) {
  check_cap(h.n, cap);
  const Eigen::Index d = Eigen::Index(1) << h.n;
  DenseOperator out{h.n, Matrix::Zero(d, d)};
  for (const auto& t : h.terms) out.m += t.coefficient * embed(t.local, t.sites, h.n);
  return out;
}

WeightedPauliSum to_pauli_sum(const DenseOperator& a, double tol) {
  const int n = a.n;
  const std::uint64_t d = 1ULL << n;
  const double inv = 1.0 / static_cast<double>(d);
  WeightedPauliSum out(n);
  const std::uint64_t count = 1ULL << (2 * n);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    PauliString p = pauli_from_index(static_cast<int>(idx), n);
    std::uint64_t xm, zm;
    matrix_masks(p, xm, zm);
    const int base = std::popcount(xm & zm);
    cplx s = 0.0;
    for (std::uint64_t b = 0; b < d; ++b) {
      int k = base + 2 * std::popcount(b & zm);
      s += std::conj(kIPow[k & 3]) * a.m(static_cast<Eigen::Index>(b ^ xm), static_cast<Eigen::Index>(b));
    }
    s *= inv;
    if (std::abs(s) > tol) out.add(p, s);
  }
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

void check_hermitian(const Matrix& h) {
  double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ContractError("Hamiltonian is not Hermitian");
}

void check_unitary(const Matrix& u) {
  Matrix e = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  if (e.cwiseAbs().maxCoeff() >= 1e-10) throw ContractError("propagator failed the unitarity check");
}

}  // namespace

Matrix unitary(const Matrix& h, double t) {
  HermitianEvolver ev(h);
  return ev.unitary(t);
}

HermitianEvolver::HermitianEvolver(const Matrix& h) {
  check_hermitian(h);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw ContractError("eigendecomposition failed");
  vecs_ = es.eigenvectors();
  evals_ = es.eigenvalues();
}

Matrix HermitianEvolver::unitary(double t) const {
  Eigen::VectorXcd ph(evals_.size());
  for (Eigen::Index i = 0; i < evals_.size(); ++i) ph(i) = std::polar(1.0, -evals_(i) * t);
  Matrix u = vecs_ * ph.asDiagonal() * vecs_.adjoint();
  check_unitary(u);
  return u;
}

Matrix HermitianEvolver::heisenberg(const Matrix& a, double t) const {
  Matrix at;
  heisenberg_rotated(rotate_in(a), t, at, nullptr);
  return at;
}

Matrix HermitianEvolver::rotate_in(const Matrix& a) const { return vecs_.adjoint() * a * vecs_; }

void HermitianEvolver::heisenberg_rotated(const Matrix& a_eig, double t, Matrix& at, Matrix* dat) const {
  const Eigen::Index d = evals_.size();
  Eigen::VectorXcd ph(d);
  for (Eigen::Index i = 0; i < d; ++i) ph(i) = std::polar(1.0, evals_(i) * t);
  Matrix b = ph.asDiagonal() * a_eig * ph.conjugate().asDiagonal();
  at.noalias() = vecs_ * b * vecs_.adjoint();
  if (dat) {
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i) b(i, j) *= cplx(0.0, evals_(i) - evals_(j));
    dat->noalias() = vecs_ * b * vecs_.adjoint();
  }
}

DenseOperator evolve_heisenberg(const DenseOperator& a, const HamiltonianTerms& h, double t) {
  if (h.n != a.n) throw DimensionError("operator and Hamiltonian sizes differ");
  if (t == 0.0) return a;
  DenseOperator hm = to_matrix(h);
  HermitianEvolver ev(hm.m);
  Matrix u = ev.unitary(t);
  return {a.n, u.adjoint() * a.m * u};
}

DenseOperator evolve_heisenberg(const DenseOperator& a, const std::vector<HamiltonianTerms>& segments,
                                double t) {
  const Eigen::Index d = a.m.rows();
  Matrix u = Matrix::Identity(d, d);
  double prev_end = -kInf;
  for (const auto& seg : segments) {
    if (seg.n != a.n) throw DimensionError("operator and Hamiltonian sizes differ");
    if (seg.t_start < prev_end) throw ContractError("schedule segments are not ordered");
    prev_end = seg.t_end;
    double dt = std::min(seg.t_end, t) - seg.t_start;
    if (dt <= 0.0) continue;
    HermitianEvolver ev(to_matrix(seg).m);
    u = ev.unitary(dt) * u;
  }
  check_unitary(u);
  return {a.n, u.adjoint() * a.m * u};
}

double schatten_norm(const Matrix& a, double p, bool normalized) {
  if (!(p >= 1.0)) throw ContractError("Schatten norm needs p >= 1");
  const double dim = static_cast<double>(a.rows());
  if (p == 2.0) {
    const double norm = a.norm();
    return normalized ? norm / std::sqrt(dim) : norm;
  }
  const bool even = std::isfinite(p) && p <= 16.0 && std::floor(p / 2.0) * 2.0 == p;
  if (even && a.rows() > 64) {
    const Matrix b = a.adjoint() * a;
    const double scale = b.diagonal().real().maxCoeff();
    if (scale == 0.0) return 0.0;
    const Matrix bn = b / scale;
    Matrix acc = bn;
    for (int j = 2; j <= static_cast<int>(p / 2.0); ++j) acc = acc * bn;
    const double tr = std::max(acc.trace().real(), 0.0);
    double norm = std::sqrt(scale) * std::pow(tr, 1.0 / p);
    if (normalized) norm /= std::pow(dim, 1.0 / p);
    return norm;
  }
  Eigen::VectorXd s;
  if (a.isApprox(a.adjoint(), 1e-14)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    s = es.eigenvalues().cwiseAbs();
  } else if (a.rows() <= 64) {
    Eigen::JacobiSVD<Matrix> svd(a);
    s = svd.singularValues();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.adjoint() * a, Eigen::EigenvaluesOnly);
    s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  }
  if (std::isinf(p)) return s.size() ? s.maxCoeff() : 0.0;
  double mx = s.size() ? s.maxCoeff() : 0.0;
  if (mx == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i) / mx, p);
  double norm = mx * std::pow(acc, 1.0 / p);
  if (normalized) norm /= std::pow(dim, 1.0 / p);
  return norm;
}

double schatten_norm(const DenseOperator& a, double p, bool normalized) {
  return schatten_norm(a.m, p, normalized);
}

double otoc_commutator_norm(const WeightedPauliSum& a, const WeightedPauliSum& b,
                            const HamiltonianTerms& h, double t, double p) {
  DenseOperator am = to_matrix(a, h.n);
  DenseOperator bm = to_matrix(b, h.n);
  DenseOperator at = evolve_heisenberg(am, h, t);
  Matrix c = at.m * bm.m - bm.m * at.m;
  return schatten_norm(c, p, true);
}

Matrix site_projector_channel(const Matrix& a, int n, int x) {
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (int code = 1; code <= 3; ++code) {
    Matrix s = embed(Matrix(pauli2(code)), {x}, n);
    Matrix inner = s * a - a * s;
    out += s * inner - inner * s;
  }
  return out / 8.0;
}

std::vector<double> cumulative_left_weights(const Matrix& a, int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    const Eigen::Index dB = Eigen::Index(1) << (n - 1 - x);
    const Eigen::Index dA = Eigen::Index(1) << (x + 1);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < dA; ++j)
      for (Eigen::Index i = 0; i < dA; ++i) {
        cplx tr = 0.0;
        for (Eigen::Index k = 0; k < dB; ++k) tr += a(i * dB + k, j * dB + k);
        acc += std::norm(tr);
      }
    w[x] = acc / (static_cast<double>(dA) * static_cast<double>(dB) * static_cast<double>(dB));
  }
  return w;
}

std::vector<double> rightmost_weights(const Matrix& a, int n, int R) {
  if (R < 0 || R > n - 1) throw ContractError("cutoff outside the chain");
  auto w = cumulative_left_weights(a, n);
  std::vector<double> q(static_cast<std::size_t>(R) + 1);
  if (R == 0) {
    q[0] = w[n - 1];
    return q;
  }
  q[0] = w[0];
  for (int x = 1; x < R; ++x) q[x] = w[x] - w[x - 1];
  q[R] = w[n - 1] - w[R - 1];
  return q;
}

const std::vector<Matrix2>& depolarizer_group() {
  static const std::vector<Matrix2> group = [] {
    std::vector<Matrix2> g;
    const Matrix2 id = pauli2(0);
    const cplx i(0, 1);
    const double h = 1.0 / std::sqrt(2.0);
    for (int s : {1, -1}) g.push_back(double(s) * id);
    for (int a = 1; a <= 3; ++a)
      for (int s0 : {1, -1})
        for (int s1 : {1, -1}) g.push_back(h * (double(s0) * id + double(s1) * i * pauli2(a)));
    for (int a = 1; a <= 3; ++a)
      for (int s : {1, -1}) g.push_back(double(s) * i * pauli2(a));
    for (int a = 1; a <= 3; ++a)
      for (int b = a + 1; b <= 3; ++b)
        for (int s0 : {1, -1})
          for (int s1 : {1, -1}) g.push_back(h * (double(s0) * i * pauli2(a) + double(s1) * i * pauli2(b)));
    for (int s0 : {1, -1})
      for (int s1 : {1, -1})
        for (int s2 : {1, -1})
          for (int s3 : {1, -1})
            g.push_back(0.5 * (double(s0) * id + double(s1) * i * pauli2(1) + double(s2) * i * pauli2(2) +
                               double(s3) * i * pauli2(3)));
    return g;
  }();
  return group;
}

const std::vector<std::array<SignedLetter, 4>>& depolarizer_conjugation_table() {
  static const std::vector<std::array<SignedLetter, 4>> table = [] {
    std::vector<std::array<SignedLetter, 4>> t;
    for (const auto& d : depolarizer_group()) {
      std::array<SignedLetter, 4> row{};
      row[0] = {0, 1};
      for (int a = 1; a <= 3; ++a) {
        Matrix2 m = d.adjoint() * pauli2(a) * d;
        bool found = false;
        for (int b = 1; b <= 3 && !found; ++b)
          for (int s : {1, -1})
            if ((m - double(s) * pauli2(b)).cwiseAbs().maxCoeff() < 1e-12) {
              row[a] = {b, s};
              found = true;
              break;
            }
        if (!found) throw ContractError("group element is not Clifford");
      }
      t.push_back(row);
    }
    return t;
  }();
  return table;
}

int pauli_index(const PauliString& p) {
  int idx = 0;
  for (int s = 0; s < p.size(); ++s) idx = idx * 4 + p.letter_code(s);
  return idx;
}

PauliString pauli_from_index(int index, int n) {
  PauliString p(n);
  for (int s = n - 1; s >= 0; --s) {
    p.set_letter_code(s, index % 4);
    index /= 4;
  }
  return p;
}

Matrix depolarizer_transfer() {
  Matrix t = Matrix::Zero(16, 16);
  const auto& group = depolarizer_group();
  for (const auto& d : group) {
    // c[a'][a] = (a'| D^dagger a D)
    Eigen::Matrix4cd c;
    for (int a = 0; a < 4; ++a) {
      Matrix2 m = d.adjoint() * pauli2(a) * d;
      for (int ap = 0; ap < 4; ++ap) c(ap, a) = (pauli2(ap).adjoint() * m).trace() / 2.0;
    }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int ap = 0; ap < 4; ++ap)
          for (int bp = 0; bp < 4; ++bp) t(4 * ap + bp, 4 * a + b) += c(ap, a) * std::conj(c(bp, b));
  }
  return t / static_cast<double>(group.size());
}

Matrix superdensity_depolarize(const Matrix& table, int n, int site) {
  if (n < 1 || n > 6) throw ResourceError("super-density tables limited to 6 sites");
  const Eigen::Index d = Eigen::Index(1) << (2 * n);
  if (table.rows() != d || table.cols() != d) throw DimensionError("table size does not match site count");
  if (site < 0 || site >= n) throw DimensionError("site out of range");
  static const Matrix t = depolarizer_transfer();
  const Eigen::Index stride = Eigen::Index(1) << (2 * (n - 1 - site));
  Matrix out = Matrix::Zero(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const int b = static_cast<int>((c / stride) % 4);
    const Eigen::Index c0 = c - b * stride;
    for (Eigen::Index r = 0; r < d; ++r) {
      const cplx v = table(r, c);
      if (v == cplx(0.0)) continue;
      const int a = static_cast<int>((r / stride) % 4);
      const Eigen::Index r0 = r - a * stride;
      for (int ap = 0; ap < 4; ++ap)
        for (int bp = 0; bp < 4; ++bp) {
          const cplx w = t(4 * ap + bp, 4 * a + b);
          if (w != cplx(0.0)) out(r0 + ap * stride, c0 + bp * stride) += w * v;
        }
    }
  }
  return out;
}

}  // namespace opgrowth
