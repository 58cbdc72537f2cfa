#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "gradman/distrib.hpp"

using namespace gradman;

namespace {

std::size_t index_of(const SigPtr& s, const std::string& name) {
  auto names = s->coordinate_names();
  for (std::size_t c = 0; c < names.size(); ++c)
    if (names[c] == name) return c;
  throw std::runtime_error("no coordinate " + name);
}

GradedFunction coord(const SigPtr& s, const std::string& name) { return GradedFunction::coordinate(s, index_of(s, name)); }
VectorField d(const SigPtr& s, const std::string& name) { return VectorField::coordinate_field(s, index_of(s, name)); }

template <class E>
ErrorKind kind_of(E&& fn) {
  try {
    fn();
  } catch (const GradmanError& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidInput;
}

SigPtr ex2() { return make_signature({}, {{"e", 1}, {"p", 2}}); }

Poly random_poly(std::mt19937& rng, std::size_t nv, int max_deg = 1) {
  Poly p(nv);
  for (int t = 0; t < 2; ++t) {
    Exponent e(nv, 0);
    for (auto& v : e) v = int(rng() % std::size_t(max_deg + 1));
    if (exponent_degree(e) > max_deg) continue;
    p.add_term(e, Rat(long(rng() % 5) - 2));
  }
  return p;
}

GradedFunction random_homogeneous(std::mt19937& rng, const SigPtr& sig, int degree) {
  GradedFunction f(sig);
  if (degree < 0) return f;
  auto mons = monomials_of_degree(*sig, degree);
  if (mons.empty()) return f;
  for (int t = 0; t < 2; ++t) f.add_term(mons[rng() % mons.size()], random_poly(rng, sig->m0()));
  return f;
}

}  // namespace

TEST_CASE("make_distribution ranks and validation") {
  auto s = ex2();
  auto dd = make_distribution(s, {d(s, "e")});
  CHECK(dd.rank_str() == "0|1|0");
  VectorField dp = d(s, "e") + times(coord(s, "e"), d(s, "p"));
  CHECK(make_distribution(s, {dp}).rank_str() == "0|1|0");
  CHECK(make_distribution(s, {}).rank_str() == "0|0|0");
  auto t = make_signature({"x"}, {{"e", 1}});
  CHECK_THROWS_AS(make_distribution(t, {d(t, "e"), times(coord(t, "e"), d(t, "e"))}), GradmanError);
  CHECK_THROWS_AS(make_distribution(t, {times(coord(t, "x"), d(t, "x"))}, {{Rat(0)}}), GradmanError);
  CHECK_NOTHROW(make_distribution(t, {times(coord(t, "x"), d(t, "x"))}, {{Rat(1)}}));
  VectorField q(t, 1);
  CHECK_THROWS_AS(make_distribution(t, {q}), GradmanError);
  // generators are grouped by degree
  auto g = make_distribution(t, {d(t, "e"), d(t, "x")});
  CHECK(g.generators[0].degree() == 0);
  CHECK(g.rank_str() == "1|1");
}

TEST_CASE("membership examples") {
  auto t = make_signature({"x"}, {{"e", 1}});
  auto dd = make_distribution(t, {d(t, "e")});
  auto cert = membership(times(coord(t, "x"), d(t, "e")), dd);
  REQUIRE(cert.member);
  CHECK(cert.coefficients[0] == coord(t, "x"));

  auto s = ex2();
  auto ce = membership(d(s, "p"), make_distribution(s, {d(s, "e")}));
  CHECK_FALSE(ce.member);
  REQUIRE(ce.witness_coordinate);
  CHECK(*ce.witness_coordinate == index_of(s, "p"));
  VectorField dp = d(s, "e") + times(coord(s, "e"), d(s, "p"));
  CHECK_FALSE(membership(d(s, "p") * Rat(2), make_distribution(s, {dp})).member);
  // degree -1 query: e-multiples of d/dp cannot be matched by f * D'
  CHECK_FALSE(membership(times(coord(s, "e"), d(s, "p")), make_distribution(s, {dp})).member);

  // a rational solution is flagged
  auto nonpoly = membership(d(t, "e"), std::vector<VectorField>{times(coord(t, "x"), d(t, "e"))});
  CHECK_FALSE(nonpoly.member);
  CHECK(nonpoly.non_polynomial);
}

TEST_CASE("membership recovers random combinations exactly") {
  std::mt19937 rng(61);
  auto s = make_signature({"x", "y"}, {{"a", 1}, {"b", 1}, {"p", 2}, {"q", 3}});
  for (int t = 0; t < 40; ++t) {
    // independent generators: coordinate fields plus higher-order tails
    std::vector<VectorField> gens = {d(s, "x"), d(s, "a"), d(s, "p")};
    for (auto& g : gens)
      for (std::size_t c = 0; c < s->num_coordinates(); ++c) {
        int deg = s->coordinate_degree(c) + g.degree();
        if (deg >= 1 && rng() % 2) g.set_action(c, random_homogeneous(rng, s, deg));
      }
    int k = -int(rng() % 3);
    VectorField target(s, k);
    std::vector<GradedFunction> u;
    for (const auto& g : gens) {
      u.push_back(random_homogeneous(rng, s, k - g.degree()));
      if (!u.back().is_zero()) target = target + times(u.back(), g);
    }
    auto cert = membership(target, gens);
    REQUIRE(cert.member);
    for (std::size_t j = 0; j < gens.size(); ++j) CHECK(cert.coefficients[j] == u[j]);
    // no nonzero relation among independent generators
    auto zero = membership(VectorField(s, k), gens);
    CHECK(zero.member);
    for (const auto& c : zero.coefficients) CHECK(c.is_zero());
  }
}

TEST_CASE("involutivity of the bent odd line") {
  auto s = ex2();
  CHECK(is_involutive(make_distribution(s, {d(s, "e")})).involutive);
  VectorField dp = d(s, "e") + times(coord(s, "e"), d(s, "p"));
  auto rep = is_involutive(make_distribution(s, {dp}));
  CHECK_FALSE(rep.involutive);
  CHECK(rep.certificate.residual == d(s, "p") * Rat(2));
  CHECK(rep.bracket == d(s, "p") * Rat(2));
  REQUIRE(rep.certificate.witness_coordinate);
  CHECK(*rep.certificate.witness_coordinate == index_of(s, "p"));
  CHECK(rep.certificate.witness_degree == 0);
  // tangent vectors of D and D' agree
  CHECK(tangent_at(dp, {}) == tangent_at(d(s, "e"), {}));
}

TEST_CASE("hamiltonian fields of a rank 1 action algebroid") {
  // anchor d/dx + x d/dy, so X = d/dx + x d/dy and Y = d/de
  auto s = make_signature({"x", "y"}, {{"e", 1}});
  VectorField x = d(s, "x") + times(coord(s, "x"), d(s, "y"));
  auto dd = make_distribution(s, {x, d(s, "e")}, {{Rat(0), Rat(0)}, {Rat(2), Rat(-1)}});
  CHECK(dd.rank_str() == "1|1");
  CHECK(is_involutive(dd).involutive);
  CHECK(kind_of([&] { frobenius_normal_form(dd); }) == ErrorKind::NonConstantSymbols);
}

TEST_CASE("restrict_distribution") {
  auto s = make_signature({"x"}, {{"e", 1}, {"p", 2}});
  VectorField y = d(s, "e") + times(coord(s, "e") * coord(s, "x"), d(s, "p"));
  VectorField x0 = d(s, "x") + times(coord(s, "p"), d(s, "p"));
  auto dd = make_distribution(s, {x0, y, d(s, "p")});
  CHECK(restrict_distribution(dd, 2).generators == dd.generators);
  auto r1 = restrict_distribution(dd, 1);
  CHECK(r1.rank_str() == "1|1");
  CHECK(r1.generators[1] == VectorField::coordinate_field(r1.sig, 1));
  auto r0 = restrict_distribution(dd, 0);
  CHECK(r0.rank_str() == "1");
  CHECK(r0.generators[0] == VectorField::coordinate_field(r0.sig, 0));
  auto inv = make_distribution(s, {d(s, "e"), d(s, "p")});
  CHECK(is_involutive(restrict_distribution(inv, 1)).involutive);
}

TEST_CASE("graded antiderivative") {
  auto s = make_signature({"x"}, {{"e1", 1}, {"e2", 1}, {"p", 2}, {"q", 2}});
  int e1 = *s->find_gen("e1"), p = *s->find_gen("p"), q = *s->find_gen("q");
  CHECK(graded_antiderivative(coord(s, "e2"), e1) == coord(s, "e1") * coord(s, "e2"));
  CHECK(graded_antiderivative(coord(s, "p"), q) == coord(s, "q") * coord(s, "p"));
  CHECK(graded_antiderivative(coord(s, "q"), q) == coord(s, "q") * coord(s, "q") * make_rat(1, 2));
  CHECK_THROWS_AS(graded_antiderivative(coord(s, "e1"), e1), GradmanError);
  std::mt19937 rng(62);
  for (int t = 0; t < 100; ++t) {
    int id = std::vector<int>{e1, p, q}[rng() % 3];
    auto g = random_homogeneous(rng, s, int(rng() % 4));
    if (s->odd(id)) g = g - GradedFunction::generator(s, id) * g.d_gen(id);
    CHECK(graded_antiderivative(g, id).d_gen(id) == g);
  }
}

namespace {

// Random unipotent-triangular change mixing each coordinate with later ones of
// the same degree and with products of lower-degree coordinates.
CoordinateChange random_change(std::mt19937& rng, const SigPtr& s) {
  auto img = identity_change(s).new_in_old;
  const std::size_t nv = s->m0();
  for (std::size_t c = nv; c < s->num_coordinates(); ++c) {
    int deg = s->coordinate_degree(c);
    for (std::size_t o = c + 1; o < s->num_coordinates(); ++o)
      if (s->coordinate_degree(o) == deg && rng() % 2)
        img[c] += GradedFunction::coordinate(s, o).scale(random_poly(rng, nv));
    for (const auto& m : monomials_of_degree(*s, deg))
      if (m.size() > 1 && rng() % 3 == 0) img[c].add_term(m, random_poly(rng, nv));
  }
  return make_change(s, img);
}

}  // namespace

TEST_CASE("coordinate changes invert and compose") {
  std::mt19937 rng(63);
  auto s = make_signature({"x", "y"}, {{"a", 1}, {"b", 1}, {"p", 2}, {"q", 3}});
  for (int t = 0; t < 30; ++t) {
    auto img = random_change(rng, s).new_in_old;
    img[0] = coord(s, "x") + coord(s, "y") * Rat(long(rng() % 3)) + GradedFunction::constant(s, Rat(1));
    auto ch = make_change(s, img);
    CHECK(inverse_check(ch));
    auto f = random_homogeneous(rng, s, int(rng() % 4));
    CHECK(f.substitute(ch.new_in_old, s).substitute(ch.old_in_new, s) == f);
    CHECK(to_new(to_new(f, ch), make_change(s, ch.old_in_new)) == f);
    auto ch2 = then(ch, ch);
    CHECK(inverse_check(ch2));
  }
  auto bad = identity_change(s).new_in_old;
  bad[index_of(s, "a")] = coord(s, "a").scale(Poly::variable(2, 0));
  CHECK(kind_of([&] { make_change(s, bad); }) == ErrorKind::NonPolynomialFlatFrame);
}

TEST_CASE("Frobenius stage A on the single-generator example") {
  auto s = make_signature({}, {{"e1", 1}, {"e2", 1}, {"phat", 2}});
  VectorField y = d(s, "e1") + times(coord(s, "e2"), d(s, "phat"));
  auto dd = make_distribution(s, {y});
  CHECK(is_involutive(dd).involutive);
  auto chart = frobenius_normal_form(dd);
  CHECK(chart.change.new_in_old[index_of(s, "phat")] == coord(s, "phat") - coord(s, "e1") * coord(s, "e2"));
  CHECK(chart.change.old_in_new[index_of(s, "phat")] == coord(s, "phat") + coord(s, "e1") * coord(s, "e2"));
  REQUIRE(chart.flattened.size() == 1);
  CHECK(chart.flattened[0] == d(s, "e1"));
  CHECK(chart.transformed[0] == d(s, "e1"));
  CHECK(chart.span_preserved);
  CHECK(chart.invertible);
}

TEST_CASE("already flat distributions get the identity") {
  auto s = make_signature({"x1", "x2"}, {{"e1", 1}, {"e2", 1}});
  auto chart = frobenius_normal_form(make_distribution(s, {d(s, "x1"), d(s, "e1")}));
  CHECK(chart.change.new_in_old == identity_change(s).new_in_old);
  CHECK(chart.log.empty());
  CHECK(chart.span_preserved);
}

TEST_CASE("non-involutive and unsupported inputs") {
  auto s = ex2();
  VectorField dp = d(s, "e") + times(coord(s, "e"), d(s, "p"));
  CHECK(kind_of([&] { frobenius_normal_form(make_distribution(s, {dp})); }) == ErrorKind::NotInvolutive);
  auto t = make_signature({"x"}, {{"e", 1}});
  VectorField grow = d(t, "x") + times(coord(t, "e"), d(t, "e"));
  CHECK(kind_of([&] { frobenius_normal_form(make_distribution(t, {grow})); }) == ErrorKind::NonPolynomialFlatFrame);
}

TEST_CASE("nilpotent connections flatten to the first base coordinates") {
  auto s = make_signature({"x", "y"}, {{"e1", 1}, {"e2", 1}, {"p", 2}});
  VectorField x = d(s, "y") * Rat(2) + d(s, "x") + times(coord(s, "e2"), d(s, "e1")) +
                  times(coord(s, "e1") * coord(s, "e2") * Rat(3), d(s, "p"));
  auto chart = frobenius_normal_form(make_distribution(s, {x}));
  REQUIRE(chart.flattened.size() == 1);
  CHECK(chart.flattened[0] == d(s, "x"));
  CHECK(chart.span_preserved);
  CHECK(chart.invertible);
  // the flat frame is killed by the original field
  for (const char* name : {"e1", "e2", "p"}) CHECK(x.apply(chart.change.new_in_old[index_of(s, name)]).is_zero());
}


TEST_CASE("randomized perturbations of flat distributions flatten back") {
  std::mt19937 rng(64);
  auto s = make_signature({"x", "y"}, {{"a1", 1}, {"a2", 1}, {"b1", 2}, {"b2", 2}, {"c", 3}});
  int flattened = 0;
  for (int t = 0; t < 20; ++t) {
    std::vector<VectorField> flat;
    if (t % 2) flat.push_back(d(s, "x"));
    flat.push_back(d(s, "a1"));
    if (t % 3 != 2) flat.push_back(d(s, "b1"));
    if (t % 4 == 0) flat.push_back(d(s, "c"));
    auto ch = random_change(rng, s);
    std::vector<VectorField> gens;
    for (const auto& f : flat) gens.push_back(to_new(f, ch));
    // triangular recombination of the generators
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (std::size_t j = i + 1; j < gens.size(); ++j) {
        int deg = gens[i].degree() - gens[j].degree();
        if (deg < 0 || rng() % 2) continue;
        auto f = random_homogeneous(rng, s, deg);
        if (!f.is_zero()) gens[i] = gens[i] + times(f, gens[j]);
      }
    auto dd = make_distribution(s, gens, {{Rat(0), Rat(0)}, {Rat(1), Rat(-2)}});
    REQUIRE(is_involutive(dd).involutive);
    auto chart = frobenius_normal_form(dd);
    CHECK(chart.span_preserved);
    CHECK(chart.invertible);
    CHECK(chart.flattened.size() == flat.size());
    // involutivity is invariant under the coordinate change
    CHECK(is_involutive(make_distribution(s, chart.transformed, dd.sample_points)).involutive);
    // restrictions of the flat form stay flat
    for (int r = 0; r <= 3; ++r) {
      auto res = restrict_distribution(make_distribution(s, chart.flattened), r);
      for (const auto& g : res.generators) {
        bool coordinate_field = false;
        for (std::size_t c = 0; c < res.sig->num_coordinates(); ++c)
          coordinate_field = coordinate_field || g == VectorField::coordinate_field(res.sig, c);
        CHECK(coordinate_field);
      }
    }
    ++flattened;
  }
  CHECK(flattened == 20);
}

TEST_CASE("involutivity is invariant under coordinate changes") {
  std::mt19937 rng(65);
  auto s = make_signature({"x"}, {{"e", 1}, {"f", 1}, {"p", 2}});
  VectorField dp = d(s, "e") + times(coord(s, "e"), d(s, "p"));
  for (int t = 0; t < 10; ++t) {
    auto ch = random_change(rng, s);
    for (const auto& gens : std::vector<std::vector<VectorField>>{{dp}, {d(s, "e"), d(s, "p")}, {d(s, "x"), d(s, "f")}}) {
      auto before = make_distribution(s, gens);
      std::vector<VectorField> moved;
      for (const auto& g : gens) moved.push_back(to_new(g, ch));
      CHECK(is_involutive(before).involutive == is_involutive(make_distribution(s, moved)).involutive);
    }
  }
}

TEST_CASE("single field normal form") {
  auto s = make_signature({}, {{"e1", 1}, {"e2", 1}, {"phat", 2}});
  VectorField y = d(s, "e1") + times(coord(s, "e2"), d(s, "phat"));
  auto chart = single_field_normal_form(y, {});
  CHECK(chart.flattened[0] == d(s, "e1"));
  CHECK(chart.transformed[0] == d(s, "e1"));
  CHECK(single_field_normal_form(y, {}, GradedFunction(s)).span_preserved);

  auto t = ex2();
  VectorField dp = d(t, "e") + times(coord(t, "e"), d(t, "p"));
  CHECK(kind_of([&] { single_field_normal_form(dp, {}); }) == ErrorKind::HypothesisFailed);
  CHECK(kind_of([&] { single_field_normal_form(d(t, "p") * Rat(0), {}); }) == ErrorKind::HypothesisFailed);

  auto u = make_signature({"x"}, {{"e", 1}});
  auto cx = single_field_normal_form(d(u, "x"), {Rat(3)});
  CHECK(cx.change.new_in_old == identity_change(u).new_in_old);
}
