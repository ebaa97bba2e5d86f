#pragma once

#include <Eigen/Dense>
#include <array>
#include <limits>
#include <vector>

#include "opgrowth/pauli.hpp"

namespace opgrowth {

using Matrix = Eigen::MatrixXcd;
using Matrix2 = Eigen::Matrix2cd;

inline constexpr int kDefaultQubitCap = 12;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct DenseOperator {
  int n = 0;
  Matrix m;

  static DenseOperator identity(int n);
  int dim() const { return static_cast<int>(m.rows()); }
  // Largest |M - M^dagger| entry.
  double hermiticity_defect() const;
};

struct HamiltonianTerm {
  std::vector<int> sites;  // first site is the most significant local factor
  Matrix local;
  double coefficient = 1.0;
};

struct HamiltonianTerms {
  int n = 0;
  std::vector<HamiltonianTerm> terms;
  double t_start = 0.0;
  double t_end = kInf;
  bool power_law = false;
  double alpha = 0.0;

  void add_pauli(const PauliString& p, double coefficient);
};

HamiltonianTerms hamiltonian_from_pauli_sum(const WeightedPauliSum& h);

Matrix pauli_matrix(const PauliString& p, int cap = kDefaultQubitCap);
DenseOperator to_matrix(const WeightedPauliSum& a, int n, int cap = kDefaultQubitCap);
DenseOperator to_matrix(const HamiltonianTerms& h, int cap = kDefaultQubitCap);
// Embeds a local operator acting on the listed sites.
Matrix embed(const Matrix& local, const std::vector<int>& sites, int n);
// Pauli expansion; coefficients with |c| <= tol are dropped.
WeightedPauliSum to_pauli_sum(const DenseOperator& a, double tol = 0.0);

Matrix kron(const Matrix& a, const Matrix& b);

// exp(-i H t) for Hermitian H.
Matrix unitary(const Matrix& h, double t);

// Eigendecomposition of a fixed Hermitian H reused across times.
class HermitianEvolver {
 public:
  explicit HermitianEvolver(const Matrix& h);
  Matrix unitary(double t) const;
  // Returns U^dagger A U with U = exp(-i H t).
  Matrix heisenberg(const Matrix& a, double t) const;
  // V^dagger A V in the eigenbasis of H.
  Matrix rotate_in(const Matrix& a) const;
  // From a rotated operator: A(t) and, if requested, dA/dt = i[H, A(t)].
  void heisenberg_rotated(const Matrix& a_eig, double t, Matrix& at, Matrix* dat) const;
  const Eigen::VectorXd& eigenvalues() const { return evals_; }

 private:
  Matrix vecs_;
  Eigen::VectorXd evals_;
};

DenseOperator evolve_heisenberg(const DenseOperator& a, const HamiltonianTerms& h, double t);
// Piecewise-constant schedule: segments ordered by their windows.
DenseOperator evolve_heisenberg(const DenseOperator& a, const std::vector<HamiltonianTerms>& segments,
                                double t);

double schatten_norm(const Matrix& a, double p, bool normalized);
double schatten_norm(const DenseOperator& a, double p, bool normalized);

double otoc_commutator_norm(const WeightedPauliSum& a, const WeightedPauliSum& b,
                            const HamiltonianTerms& h, double t, double p);

// Dense form of project_site: (1/8) sum_a [X^a_x, [X^a_x, A]].
Matrix site_projector_channel(const Matrix& a, int n, int x);

// W[x] = squared Frobenius weight of the part of A acting trivially on all sites > x (d=1 chain).
std::vector<double> cumulative_left_weights(const Matrix& a, int n);
// Sector weights ||Q_x A||_F^2 for x = 0..R.
std::vector<double> rightmost_weights(const Matrix& a, int n, int R);

// The 48-element single-qubit group G, in a fixed listing order.
const std::vector<Matrix2>& depolarizer_group();
// D^dagger P D = sign * P' for letter codes 1..3; index [g][a] -> {a', sign}. Entry 0 is the identity.
struct SignedLetter {
  int code;
  int sign;
};
const std::vector<std::array<SignedLetter, 4>>& depolarizer_conjugation_table();

// Super-density tables are 4^n x 4^n with rows/columns indexed by Pauli strings
// in base 4 (site 0 most significant digit, digits = letter codes).
int pauli_index(const PauliString& p);
PauliString pauli_from_index(int index, int n);

// 16x16 transfer matrix of the group-averaged Conj_D (x) Conj_D on one site,
// indexed by 4*a + b for |a)(b|.
Matrix depolarizer_transfer();
Matrix superdensity_depolarize(const Matrix& table, int n, int site);

}  // namespace opgrowth
