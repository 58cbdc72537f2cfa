#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gradman/exactnum.hpp"

namespace gradman {

struct Generator {
  std::string name;
  int degree = 1;
  bool operator==(const Generator& o) const { return name == o.name && degree == o.degree; }
};

// Generators are stored in canonical order: by degree, then declared index.
// A generator id is its position in that order.
class GradedSignature {
 public:
  GradedSignature() = default;
  GradedSignature(std::vector<std::string> base, std::vector<Generator> gens, int n = -1, int max_degree = -1);

  std::size_t m0() const { return base_.size(); }
  std::size_t num_gens() const { return gens_.size(); }
  int n() const { return n_; }
  int max_degree() const { return max_degree_; }
  const std::vector<std::string>& base() const { return base_; }
  const std::vector<Generator>& gens() const { return gens_; }
  const Generator& gen(int id) const { return gens_.at(id); }
  int degree(int id) const { return gens_.at(id).degree; }
  bool odd(int id) const { return gens_.at(id).degree % 2 != 0; }
  std::size_t count(int degree) const;
  std::vector<int> gens_of_degree(int degree) const;
  std::optional<int> find_gen(const std::string& name) const;
  std::optional<std::size_t> find_base(const std::string& name) const;
  // Base names followed by generator names.
  std::vector<std::string> coordinate_names() const;
  std::size_t num_coordinates() const { return base_.size() + gens_.size(); }
  // Degree of coordinate index c (base coordinates have degree 0).
  int coordinate_degree(std::size_t c) const;
  // Signature keeping only generators of degree <= r.
  GradedSignature truncated(int r) const;

  bool operator==(const GradedSignature& o) const;
  bool operator!=(const GradedSignature& o) const { return !(*this == o); }

 private:
  std::vector<std::string> base_;
  std::vector<Generator> gens_;
  int n_ = 0;
  int max_degree_ = 0;
};

using SigPtr = std::shared_ptr<const GradedSignature>;
SigPtr make_signature(std::vector<std::string> base, std::vector<Generator> gens, int n = -1, int max_degree = -1);

using GenList = std::vector<int>;

struct Normalized {
  int sign = 1;  // 0 when an odd generator repeats
  GenList gens;
};

Normalized normalize(const GradedSignature& sig, const GenList& gens);
int gen_list_degree(const GradedSignature& sig, const GenList& gens);

// Canonical monomials (coefficient 1) of total degree l.
std::vector<GenList> monomials_of_degree(const GradedSignature& sig, int l);

class GradedFunction {
 public:
  using TermMap = std::map<GenList, Poly>;

  GradedFunction() = default;
  explicit GradedFunction(SigPtr sig);

  static GradedFunction constant(SigPtr sig, const Rat& c);
  static GradedFunction from_poly(SigPtr sig, const Poly& p);
  static GradedFunction generator(SigPtr sig, int id);
  static GradedFunction base_var(SigPtr sig, std::size_t index);
  // Coordinate c in the ordering of coordinate_names().
  static GradedFunction coordinate(SigPtr sig, std::size_t c);
  static GradedFunction monomial(SigPtr sig, const GenList& gens, const Poly& coeff);

  const SigPtr& sig() const { return sig_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // Adds coeff * gens, normalizing the generator list first.
  void add_term(const GenList& gens, const Poly& coeff);

  GradedFunction operator+(const GradedFunction& o) const;
  GradedFunction operator-(const GradedFunction& o) const;
  GradedFunction operator*(const GradedFunction& o) const;
  GradedFunction operator*(const Rat& c) const;
  GradedFunction operator-() const;
  GradedFunction& operator+=(const GradedFunction& o);
  GradedFunction& operator-=(const GradedFunction& o);
  bool operator==(const GradedFunction& o) const;
  bool operator!=(const GradedFunction& o) const { return !(*this == o); }

  GradedFunction scale(const Poly& p) const;
  bool is_homogeneous() const;
  // Degree of a homogeneous nonzero function; nullopt for zero or mixed.
  std::optional<int> degree() const;
  GradedFunction component(int l) const;
  Poly body() const;
  Rat body_eval(const std::vector<Rat>& point) const;
  int max_term_degree() const;

  GradedFunction d_base(std::size_t index) const;
  GradedFunction d_gen(int id) const;
  // Images for every coordinate of this function's signature, all over one target signature.
  GradedFunction substitute(const std::vector<GradedFunction>& images, const SigPtr& target) const;

  std::string str() const;

 private:
  void check_sig(const GradedFunction& o) const;
  SigPtr sig_;
  TermMap terms_;
};

GradedFunction operator*(const Rat& c, const GradedFunction& f);
// Product of canonical monomials with the Koszul sign.
Normalized multiply_gen_lists(const GradedSignature& sig, const GenList& a, const GenList& b);

}  // namespace gradman
