#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradman/fields.hpp"

namespace gradman {

struct Distribution {
  SigPtr sig;
  std::vector<VectorField> generators;  // grouped by degree 0, -1, ..., -n; declared order inside a group
  std::vector<std::size_t> ranks;       // d_0..d_n
  std::vector<std::vector<Rat>> sample_points;
  std::string rank_str() const;
};

// Throws InvalidInput on a degree outside [-n, 0] or dependent tangents at a
// sample point. With no sample points the origin is used.
Distribution make_distribution(const SigPtr& sig, std::vector<VectorField> generators,
                               std::vector<std::vector<Rat>> sample_points = {});

struct MembershipCertificate {
  bool member = false;
  bool non_polynomial = false;           // a solution exists only over Q(x)
  std::vector<GradedFunction> coefficients;  // one per generator when member
  // query - sum coeff * generator for the best polynomial fit; when the fit is
  // rational the whole identity is scaled by its common denominator.
  VectorField residual;
  std::optional<std::size_t> witness_coordinate;
  int witness_degree = 0;
};

MembershipCertificate membership(const VectorField& x, const std::vector<VectorField>& generators);
MembershipCertificate membership(const VectorField& x, const Distribution& d);

struct InvolutivityReport {
  bool involutive = true;
  std::size_t first = 0, second = 0;  // failing generator pair
  VectorField bracket;
  MembershipCertificate certificate;
};

InvolutivityReport is_involutive(const Distribution& d);
Distribution restrict_distribution(const Distribution& d, int r);

// G with dG/de = g. For odd e requires dg/de = 0.
GradedFunction graded_antiderivative(const GradedFunction& g, int gen_id);

// Degree-preserving change of coordinates on one signature. Base images
// must be linear in the base coordinates.
struct CoordinateChange {
  SigPtr sig;
  std::vector<GradedFunction> new_in_old;
  std::vector<GradedFunction> old_in_new;
};

CoordinateChange identity_change(const SigPtr& sig);
// Computes and verifies the inverse; throws NonPolynomialFlatFrame when it is not polynomial.
CoordinateChange make_change(const SigPtr& sig, std::vector<GradedFunction> new_in_old);
// first, then second.
CoordinateChange then(const CoordinateChange& first, const CoordinateChange& second);
bool inverse_check(const CoordinateChange& ch);
GradedFunction to_new(const GradedFunction& f, const CoordinateChange& ch);
VectorField to_new(const VectorField& x, const CoordinateChange& ch);

struct FrobeniusChart {
  CoordinateChange change;
  std::vector<VectorField> flattened;        // d/dx^1..d/dx^{d_0}, d/de_j^1..d/de_j^{d_j}
  std::vector<VectorField> transformed;      // original generators in the new coordinates
  bool span_preserved = false;
  bool invertible = false;
  std::vector<std::string> log;
};

FrobeniusChart frobenius_normal_form(const Distribution& d);
// lambda defaults to the coefficient found by membership of [X, X] in <X>.
FrobeniusChart single_field_normal_form(const VectorField& x, const std::vector<Rat>& point,
                                        const std::optional<GradedFunction>& lambda = std::nullopt);

}  // namespace gradman
