#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "gradman/exactnum.hpp"

using namespace gradman;

namespace {

Poly var(std::size_t n, std::size_t i) { return Poly::variable(n, i); }
Poly cst(std::size_t n, long c) { return Poly(n, Rat(c)); }

Poly random_poly(std::mt19937& rng, std::size_t nv, int max_deg, int terms) {
  std::uniform_int_distribution<int> coef(-4, 4), deg(0, max_deg);
  Poly p(nv);
  for (int t = 0; t < terms; ++t) {
    Exponent e(nv, 0);
    int budget = deg(rng);
    for (int k = 0; k < budget; ++k) e[rng() % nv] += 1;
    p.add_term(e, make_rat(coef(rng), 1 + rng() % 3));
  }
  return p;
}

// Dense coefficient arrays in two variables, degree < 9 per variable.
using Dense = std::vector<std::vector<Rat>>;

Dense to_dense(const Poly& p) {
  Dense d(9, std::vector<Rat>(9, Rat(0)));
  for (const auto& [e, c] : p.terms()) d[e[0]][e[1]] = c;
  return d;
}

Dense dense_mul(const Dense& a, const Dense& b) {
  Dense r(9, std::vector<Rat>(9, Rat(0)));
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      for (int k = 0; i + k < 9; ++k)
        for (int l = 0; j + l < 9; ++l) r[i + k][j + l] += a[i][j] * b[k][l];
  return r;
}

PolyMatrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, std::size_t nv) {
  PolyMatrix m(r, c, nv);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      if (rng() % 3) m.at(i, j) = random_poly(rng, nv, 2, 2);
  return m;
}

}  // namespace

TEST_CASE("rational canonical form") {
  Rat r = parse_rat("6/-4");
  CHECK(r.get_num() == -3);
  CHECK(r.get_den() == 2);
  CHECK(rat_str(parse_rat("10/5")) == "2");
  CHECK_THROWS(parse_rat("1/0"));
  CHECK_THROWS(parse_rat("abc"));
}

TEST_CASE("poly arithmetic examples") {
  Poly x = var(2, 0), y = var(2, 1), one = cst(2, 1);
  CHECK((x + one) * (x - one) == x * x - one);
  CHECK(x + Poly(2) == x);
  CHECK((cst(2, 2) * x) * (cst(2, 3) * y) == cst(2, 6) * x * y);
  CHECK(((x + y) * (x - y)).str({"x", "y"}) == "x^2 - y^2");
}

TEST_CASE("poly multiplication agrees with dense oracle") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Poly a = random_poly(rng, 2, 4, 4), b = random_poly(rng, 2, 4, 4);
    Dense expect = dense_mul(to_dense(a), to_dense(b));
    CHECK(to_dense(a * b) == expect);
  }
}

TEST_CASE("poly ring axioms") {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    Poly a = random_poly(rng, 3, 3, 3), b = random_poly(rng, 3, 3, 3), c = random_poly(rng, 3, 3, 3);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    CHECK(a - a == Poly(3));
  }
}

TEST_CASE("exact division, derivative, integral, compose") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    Poly a = random_poly(rng, 2, 3, 3), b = random_poly(rng, 2, 3, 3);
    if (b.is_zero()) continue;
    auto q = (a * b).divide_exact(b);
    REQUIRE(q.has_value());
    CHECK(*q == a);
    CHECK(a.integral(0).derivative(0) == a);
  }
  Poly x = var(1, 0);
  CHECK_FALSE((x + cst(1, 1)).divide_exact(x).has_value());
  Poly p = x * x + cst(1, 3);
  CHECK(p.compose({x + cst(1, 1)}) == x * x + cst(1, 2) * x + cst(1, 4));
  CHECK(p.eval({Rat(2)}) == 7);
}

TEST_CASE("kernel basis examples") {
  PolyMatrix id = PolyMatrix::identity(3, 1);
  CHECK(kernel_basis(id).empty());
  PolyMatrix z(2, 2, 1);
  CHECK(kernel_basis(z).size() == 2);
  PolyMatrix m(1, 2, 1);
  m.at(0, 0) = var(1, 0);
  m.at(0, 1) = cst(1, -1);
  auto k = kernel_basis(m);
  REQUIRE(k.size() == 1);
  CHECK(k[0].polynomial);
  CHECK(k[0].v[0] == cst(1, 1));
  CHECK(k[0].v[1] == var(1, 0));
}

TEST_CASE("rank examples") {
  Poly x = var(1, 0);
  PolyMatrix a = PolyMatrix::identity(2, 1);
  CHECK(rank_generic(a) == 2);
  CHECK(rank_at(a, {Rat(5)}) == 2);
  PolyMatrix b(1, 1, 1);
  b.at(0, 0) = x;
  CHECK(rank_generic(b) == 1);
  CHECK(rank_at(b, {Rat(0)}) == 0);
  PolyMatrix c(2, 2, 1);
  c.at(0, 0) = x;
  c.at(0, 1) = x;
  c.at(1, 0) = cst(1, 1);
  c.at(1, 1) = cst(1, 1);
  CHECK(rank_generic(c) == 1);
}

TEST_CASE("kernel vectors annihilate and generic rank dominates") {
  std::mt19937 rng(14);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t r = 1 + rng() % 4, c = 1 + rng() % 5;
    PolyMatrix m = random_matrix(rng, r, c, 2);
    if (trial % 3 == 0 && r > 1)
      for (std::size_t j = 0; j < c; ++j) m.at(r - 1, j) = m.at(0, j) * var(2, 1);
    auto k = kernel_basis(m);
    std::size_t rk = rank_generic(m);
    CHECK(k.size() + rk == c);
    for (const auto& kv : k) {
      auto img = m.apply(kv.v);
      for (const auto& e : img) CHECK(e.is_zero());
    }
    for (int p = 0; p < 5; ++p) {
      std::vector<Rat> pt = {make_rat(static_cast<long>(rng() % 7) - 3), make_rat(static_cast<long>(rng() % 5))};
      CHECK(rank_at(m, pt) <= rk);
    }
  }
}

TEST_CASE("solve and polynomial inverse") {
  Poly x = var(1, 0), one = cst(1, 1);
  PolyMatrix m(2, 2, 1);
  m.at(0, 0) = one;
  m.at(0, 1) = x;
  m.at(1, 1) = one;
  auto inv = inverse_polynomial(m);
  REQUIRE(inv.has_value());
  CHECK(m * *inv == PolyMatrix::identity(2, 1));
  PolyMatrix d(1, 1, 1);
  d.at(0, 0) = x + one;
  CHECK_FALSE(inverse_polynomial(d).has_value());
  SolveResult s = solve(d, {x * x - one});
  CHECK(s.consistent);
  CHECK(s.polynomial);
  CHECK(s.x[0] == x - one);
  SolveResult t = solve(d, {one});
  CHECK(t.consistent);
  CHECK_FALSE(t.polynomial);
}

TEST_CASE("rational echelon kernel") {
  RatMatrix m(2, 3, Rat(0));
  m.at(0, 0) = 1;
  m.at(0, 1) = 2;
  m.at(1, 0) = 2;
  m.at(1, 1) = 4;
  m.at(1, 2) = 1;
  CHECK(rank(m) == 2);
  auto k = kernel_basis(m);
  REQUIRE(k.size() == 1);
  CHECK(k[0][0] == -2);
  CHECK(k[0][1] == 1);
  CHECK(k[0][2] == 0);
  auto inv = inverse(rat_identity(3));
  REQUIRE(inv.has_value());
  CHECK(*inv == rat_identity(3));
}
