#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opgrowth/dense.hpp"
#include "opgrowth/pauli.hpp"
#include "opgrowth/seed.hpp"

namespace opgrowth::scale {

struct ScaleBlock {
  int q = 0;
  int k = 0;
  int lo = 0;  // 2^q k
  int hi = 0;  // 2^q (k+2) - 1
  bool contains(int site) const { return site >= lo && site <= hi; }
};

// Largest scale q* for R = 2^{q*+1} - 1.
int max_scale(int R);
ScaleBlock block(int q, int k);
std::vector<ScaleBlock> blocks(int R);

struct ScaleTag {
  int q = 0;
  int k = 0;
  friend bool operator==(const ScaleTag&, const ScaleTag&) = default;
};
ScaleTag assign_scale(int i, int j, int R);

struct Coupling {
  int i = 0;
  int j = 0;
  int a = 1;  // letter codes 1..3
  int b = 1;
  double J = 0.0;
  std::optional<ScaleTag> tag;
};

struct PowerLawHamiltonian {
  int n = 0;
  double alpha = 0.0;
  Lattice lattice;
  std::vector<Coupling> couplings;

  // Largest |J| d(i,j)^alpha over couplings; admissible when <= 1.
  double max_bound_ratio() const;
  void tag_scales(int R);
  WeightedPauliSum to_pauli_sum() const;
  HamiltonianTerms to_terms() const;
};

// sqrt(sum J^2) over couplings, each X^a X^b having unit operator norm.
double h2_norm(const PowerLawHamiltonian& h);
// sqrt(sum over pairs of ||H_ij||_inf^2) with H_ij the full two-site term.
double h2_norm_grouped(const PowerLawHamiltonian& h);

struct InteractionNorms {
  double sum_bound = 0.0;
  double sqrt_sum_bound = 0.0;
};
InteractionNorms region_interaction_norms(const std::vector<int>& ball1, const std::vector<int>& ball2,
                                          double alpha, const Lattice& lattice);
InteractionNorms region_interaction_norms(const std::vector<int>& ball1, const std::vector<int>& ball2,
                                          double alpha);

enum class SampleMode {
  Sampled,      // one random channel per pair, J uniform within the bound
  Dense,        // all nine channels per pair, J at the bound
  DenseRandom,  // all nine channels per pair, J uniform within the bound
};

PowerLawHamiltonian sample_powerlaw_hamiltonian(int n, double alpha, Rng& rng,
                                                SampleMode mode = SampleMode::Sampled);
PowerLawHamiltonian sample_powerlaw_hamiltonian(const Lattice& lattice, double alpha, Rng& rng,
                                                SampleMode mode = SampleMode::Sampled);

// Header "alpha=<a> n=<n>", then one "i j a b J" line per coupling with a, b in {X,Y,Z}.
std::string to_text(const PowerLawHamiltonian& h);
PowerLawHamiltonian parse_hamiltonian(std::string_view text);

}  // namespace opgrowth::scale
