#pragma once

#include <string>
#include <vector>

#include "gradman/coalgebra.hpp"
#include "gradman/geometrize.hpp"
#include "gradman/gradedring.hpp"

namespace gradman {

// A degree-k derivation stored by its values on the coordinates of its
// signature (base coordinates first, then generators in canonical order).
class VectorField {
 public:
  VectorField() = default;
  VectorField(SigPtr sig, int degree);

  // d/dc for coordinate c; degree -|c|.
  static VectorField coordinate_field(SigPtr sig, std::size_t c);

  const SigPtr& sig() const { return sig_; }
  int degree() const { return degree_; }
  const GradedFunction& action(std::size_t c) const { return action_.at(c); }
  const std::vector<GradedFunction>& actions() const { return action_; }
  // Throws InvalidInput unless value is zero or homogeneous of degree |c| + k.
  void set_action(std::size_t c, GradedFunction value);

  GradedFunction apply(const GradedFunction& f) const;

  VectorField operator+(const VectorField& o) const;
  VectorField operator-(const VectorField& o) const;
  VectorField operator*(const Rat& c) const;
  bool operator==(const VectorField& o) const;
  bool operator!=(const VectorField& o) const { return !(*this == o); }
  bool is_zero() const;

  // "d/dc = value" entries joined by "; ", zero actions omitted.
  std::string str() const;

 private:
  void check_compatible(const VectorField& o) const;
  SigPtr sig_;
  int degree_ = 0;
  std::vector<GradedFunction> action_;
};

// f * X, of degree |f| + |X|; f must be homogeneous.
VectorField times(const GradedFunction& f, const VectorField& x);
VectorField bracket(const VectorField& x, const VectorField& y);

struct TangentVector {
  std::vector<Rat> point;
  std::vector<Rat> components;  // per coordinate
  bool operator==(const TangentVector& o) const { return point == o.point && components == o.components; }
};

TangentVector tangent_at(const VectorField& x, const std::vector<Rat>& point);
bool linearly_independent(const std::vector<VectorField>& fields, const std::vector<std::vector<Rat>>& points);

// Requires degree 1.
bool is_homological(const VectorField& q);

// D[i] maps the frame of level i to the frame of level i + k; level 0 is the
// trivial line spanned by the constant function 1. Entries with i + k < 0 are
// empty matrices.
struct CompatDerivation {
  int degree = 0;
  std::vector<PolyMatrix> d;  // index 0..n
  std::vector<Poly> symbol;   // base vector field when degree == 0
  bool operator==(const CompatDerivation& o) const {
    return degree == o.degree && d == o.d && symbol == o.symbol;
  }
};

CompatDerivation to_compat_derivation(const VectorField& x, const ChartAlgebra& a);
VectorField from_compat_derivation(const CompatDerivation& d, const ChartAlgebra& a);
bool compat_check(const CompatDerivation& d, const CoalgebraBundle& e);
// D applied to a level-i section given by frame coefficients.
std::vector<Poly> apply_compat(const CompatDerivation& d, const CoalgebraBundle& e, int level, const std::vector<Poly>& v);
CompatDerivation bracket(const CompatDerivation& x, const CompatDerivation& y, const CoalgebraBundle& e);
// Theta(e (x) D) = m(e, D(.)) for a level-i frame vector e.
CompatDerivation theta(const CoalgebraBundle& e, int level, const std::vector<Poly>& elem, const CompatDerivation& d);

// Dimension of constant compatible derivations of degree -n, computed
// directly from mu: frame functionals on E*_{-n} killing every mu*(th_b, th_c).
std::size_t top_degree_compat_dimension(const CoalgebraBundle& e);

// Field on the signature truncated to generators of degree <= r.
VectorField restrict_truncation(const VectorField& x, int r);
// Rebuilds a field from its restriction to degree <= n-1 and its action on
// the top-degree coordinates.
VectorField assemble_from_truncation(const VectorField& restricted, const std::vector<GradedFunction>& top_actions,
                                     const SigPtr& sig, int degree);

}  // namespace gradman
