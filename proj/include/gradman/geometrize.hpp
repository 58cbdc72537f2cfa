#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradman/coalgebra.hpp"
#include "gradman/gradedring.hpp"

namespace gradman {

struct RewriteRule {
  int level = 0;
  std::vector<Rat> lhs;  // element of the E*_{-level} frame
  GradedFunction rhs;    // product of lower-degree chart coordinates
};

// Chart coordinates z<i>_<s> are a basis of (ker mu_{-i})*; frame elements
// th<i>_<a> of E*_{-i} live in frame_signature().
class ChartAlgebra {
 public:
  ChartAlgebra(CoalgebraBundle e, int max_degree = -1);

  const CoalgebraBundle& bundle() const { return bundle_; }
  const SplittingIso& splitting() const { return iso_; }
  const SigPtr& signature() const { return sig_; }
  const SigPtr& frame_signature() const { return frame_sig_; }
  int n() const { return bundle_.n(); }

  // Image of frame element a of E*_{-level}.
  const GradedFunction& embedding(int level, std::size_t a) const;
  // Frame vector of the kernel-dual coordinate s of degree level.
  std::vector<Rat> coordinate_in_frame(int level, std::size_t s) const;
  const std::vector<RewriteRule>& rewrite_rules() const { return rules_; }

  GradedFunction reduce(const GradedFunction& expr) const;
  // Chart function rewritten over frame elements: each z<i>_<s> becomes its frame vector.
  GradedFunction lift(const GradedFunction& chart_fn) const;
  // Inverse of the embedding on homogeneous degree-level chart functions.
  std::vector<Poly> unembed(const GradedFunction& f, int level) const;
  // Chart function for a frame vector of E*_{-level}.
  GradedFunction embed_vector(const std::vector<Poly>& v, int level) const;

 private:
  CoalgebraBundle bundle_;
  SplittingIso iso_;
  SigPtr sig_, frame_sig_;
  std::vector<std::vector<GradedFunction>> emb_;
  std::vector<RewriteRule> rules_;
};

ChartAlgebra geometrize(const CoalgebraBundle& e, int max_degree = -1);

// mu*(th_b, th_c) in the frame of E*_{-(j+k)}.
std::vector<Poly> mu_star(const CoalgebraBundle& e, int j, std::size_t b, int k, std::size_t c);

struct ConfluenceReport {
  bool ok = true;
  int level_j = 0, level_k = 0;
  std::size_t b = 0, c = 0;
};
// emb(th_b) emb(th_c) == emb(mu*(th_b, th_c)) for all frame pairs with j + k <= n.
ConfluenceReport confluence_check(const ChartAlgebra& a);

// Rank of the reduction map on degree-l products of frame elements.
std::size_t quotient_dimension(const ChartAlgebra& a, int l);

CoalgebraBundle coalgebra_of(const ChartAlgebra& a);

// Pullback table: images, in target's signature, of every coordinate of source.
struct ChartMorphism {
  SigPtr source, target;
  std::vector<GradedFunction> images;
  GradedFunction pull(const GradedFunction& f) const { return f.substitute(images, target); }
};

ChartMorphism identity_chart_morphism(const SigPtr& sig);
// Pullback along phi : E -> F, from the chart of F to the chart of E.
ChartMorphism functor_on_morphism(const CoalgebraMorphism& phi, const ChartAlgebra& from, const ChartAlgebra& to);
// Pullback of (psi o phi) from the pullbacks of psi and phi.
ChartMorphism compose_pullbacks(const ChartMorphism& psi_star, const ChartMorphism& phi_star);

}  // namespace gradman
