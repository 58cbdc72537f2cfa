#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradman/errors.hpp"
#include "gradman/exactnum.hpp"

namespace gradman {

// Levels are positive: level i refers to E_{-i}.
//
// mu(i) has one row per stored tensor basis element and one column per frame
// element of E_{-i}. The stored basis lists blocks (j, k) with j <= k and
// j + k = i in lexicographic order, index pairs (b, c) lexicographic inside a
// block. Blocks with j > k follow from cocommutativity.
class CoalgebraBundle {
 public:
  CoalgebraBundle() = default;
  CoalgebraBundle(std::vector<std::string> base, std::vector<std::size_t> ranks);

  std::size_t nvars() const { return base_.size(); }
  const std::vector<std::string>& base() const { return base_; }
  int n() const { return static_cast<int>(ranks_.size()); }
  std::size_t rank(int i) const { return ranks_.at(i - 1); }
  const std::vector<std::size_t>& ranks() const { return ranks_; }

  const PolyMatrix& mu(int i) const;
  void set_mu(int i, PolyMatrix m);
  bool is_constant() const;

  // Stored tensor basis of level i.
  std::size_t stored_dim(int i) const;
  std::size_t stored_offset(int i, int j) const;  // requires j <= i - j
  // Full tensor basis: ordered blocks (j, i - j), j = 1..i-1.
  std::size_t full_dim(int i) const;
  std::size_t full_offset(int i, int j) const;
  PolyMatrix full_mu(int i) const;

  CoalgebraBundle evaluate(const std::vector<Rat>& point) const;
  bool operator==(const CoalgebraBundle& o) const;

 private:
  std::vector<std::string> base_;
  std::vector<std::size_t> ranks_;
  std::vector<PolyMatrix> mu_;  // index i - 1; level 1 is an empty matrix
};

struct CoalgebraWitness {
  int level = 0;
  std::size_t frame_index = 0;
  std::string description;
};

struct CoalgebraReport {
  bool cocommutative = true;
  bool coassociative = true;
  std::vector<CoalgebraWitness> witnesses;
  bool ok() const { return cocommutative && coassociative; }
};

CoalgebraReport check_coalgebra(const CoalgebraBundle& e);

struct KSpace {
  int level = 0;
  std::vector<KernelVector> basis;  // vectors in the full tensor basis
  std::size_t rank() const { return basis.size(); }
};

// Linear constraints whose common kernel is K at the given level, as rows
// over the full tensor basis.
std::vector<std::map<std::size_t, Poly>> k_constraints(const CoalgebraBundle& e, int level);
KSpace compute_K(const CoalgebraBundle& e, int level);

struct PointCheck {
  std::vector<Rat> point;
  std::size_t im_rank = 0;
  std::size_t K_rank = 0;
  bool equal = false;
};

struct LevelAdmissibility {
  int level = 0;
  std::size_t im_rank = 0;
  std::size_t K_rank = 0;
  bool contained = false;  // im(mu) inside K
  bool equal = false;      // over Q(x)
  bool constant_rank = false;
  bool pointwise_equal = false;
  std::vector<PointCheck> points;
};

struct AdmissibilityReport {
  std::vector<LevelAdmissibility> levels;
  bool admissible() const;
};

AdmissibilityReport check_admissible(const CoalgebraBundle& e, const std::vector<std::vector<Rat>>& sample_points);

// Frames of the split bundle: the frame of E*_{-i} is the list of canonical
// monomials of degree i in generators with counts d[0..n-1] (see split_monomials).
CoalgebraBundle split_coalgebra(const std::vector<std::size_t>& d, std::vector<std::string> base = {});
std::vector<std::vector<int>> split_monomials(const std::vector<std::size_t>& d, int level);
CoalgebraBundle wedge_coalgebra(std::size_t m, int n, std::vector<std::string> base = {});

struct DvbData {
  std::size_t rank_a = 0, rank_b = 0, rank_c = 0, rank_omega = 0;
  PolyMatrix phi;  // (rank_a * rank_b) x rank_omega, row (a, b) lexicographic
};
CoalgebraBundle dvb_coalgebra(const DvbData& data, int n, std::vector<std::string> base = {});

CoalgebraBundle truncate(const CoalgebraBundle& e, int k);

struct CoalgebraMorphism {
  std::vector<PolyMatrix> phi;  // phi[i - 1] : E_{-i} -> F_{-i}
  const PolyMatrix& at(int i) const { return phi.at(i - 1); }
};

CoalgebraMorphism identity_morphism(const CoalgebraBundle& e);
CoalgebraMorphism compose(const CoalgebraMorphism& second, const CoalgebraMorphism& first);
// (Phi (x) Phi) on the stored tensor basis of level i.
PolyMatrix tensor_square(const CoalgebraMorphism& phi, const CoalgebraBundle& src, const CoalgebraBundle& dst, int i);
bool morphism_check(const CoalgebraMorphism& phi, const CoalgebraBundle& e, const CoalgebraBundle& f);
// Bundle with mu_i replaced by (Phi (x) Phi) mu_i Phi_i^{-1}; Phi must be polynomially invertible.
CoalgebraBundle transport(const CoalgebraBundle& e, const CoalgebraMorphism& phi);

struct SplittingIso {
  std::vector<std::size_t> kernel_ranks;
  CoalgebraBundle split;    // split_coalgebra(kernel_ranks)
  CoalgebraMorphism phi;    // E -> split
  CoalgebraMorphism psi;    // split -> E, inverse of phi
};

// Requires constant mu and admissibility.
SplittingIso splitting_iso(const CoalgebraBundle& e);

}  // namespace gradman
