#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "gradman/gradedring.hpp"

using namespace gradman;

namespace {

SigPtr mixed_sig() {
  return make_signature({"x", "y"}, {{"a", 1}, {"b", 1}, {"c", 2}, {"d", 2}, {"f", 3}});
}

// Bubble sort by adjacent transpositions, tracking the Koszul sign directly.
int oracle_sign(const GradedSignature& sig, GenList g) {
  int sign = 1;
  bool swapped = true;
  while (swapped) {
    swapped = false;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      if (g[i] > g[i + 1]) {
        if (sig.odd(g[i]) && sig.odd(g[i + 1])) sign = -sign;
        std::swap(g[i], g[i + 1]);
        swapped = true;
      }
    }
  }
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    if (g[i] == g[i + 1] && sig.odd(g[i])) return 0;
  return sign;
}

GradedFunction random_function(std::mt19937& rng, const SigPtr& sig, int terms) {
  GradedFunction f(sig);
  for (int t = 0; t < terms; ++t) {
    GenList g;
    int len = static_cast<int>(rng() % 4);
    for (int k = 0; k < len; ++k) g.push_back(static_cast<int>(rng() % sig->num_gens()));
    Exponent e(sig->m0(), 0);
    for (auto& v : e) v = static_cast<int>(rng() % 2);
    f.add_term(g, Poly::monomial(e, make_rat(static_cast<long>(rng() % 7) - 3)));
  }
  return f;
}

GradedFunction random_homogeneous(std::mt19937& rng, const SigPtr& sig, int degree) {
  GradedFunction f(sig);
  auto mons = monomials_of_degree(*sig, degree);
  for (const auto& m : mons)
    if (rng() % 2) f.add_term(m, Poly(sig->m0(), make_rat(static_cast<long>(rng() % 5) - 2)));
  return f;
}

// Number of monomials of degree l: odd generators appear at most once.
long count_oracle(const std::vector<int>& degrees, std::size_t i, int l) {
  if (l == 0) return 1;
  if (i == degrees.size() || l < 0) return 0;
  long total = 0;
  int d = degrees[i];
  int cap = d % 2 ? 1 : l / d;
  for (int k = 0; k <= cap && k * d <= l; ++k) total += count_oracle(degrees, i + 1, l - k * d);
  return total;
}

}  // namespace

TEST_CASE("signature orders generators by degree") {
  auto sig = make_signature({"x"}, {{"p", 2}, {"e", 1}, {"q", 2}, {"f", 1}});
  CHECK(sig->gen(0).name == "e");
  CHECK(sig->gen(1).name == "f");
  CHECK(sig->gen(2).name == "p");
  CHECK(sig->gen(3).name == "q");
  CHECK(sig->n() == 2);
  CHECK(sig->max_degree() == 6);
  CHECK(sig->count(2) == 2);
  CHECK(sig->coordinate_names() == std::vector<std::string>{"x", "e", "f", "p", "q"});
  CHECK(sig->truncated(1).num_gens() == 2);
  CHECK_THROWS(make_signature({"x"}, {{"x", 1}}));
  CHECK_THROWS(make_signature({}, {{"e", 0}}));
}

TEST_CASE("normalization sign matches transposition oracle") {
  auto sig = mixed_sig();
  std::mt19937 rng(21);
  for (int trial = 0; trial < 3000; ++trial) {
    GenList g;
    int len = static_cast<int>(rng() % 7);
    for (int k = 0; k < len; ++k) g.push_back(static_cast<int>(rng() % sig->num_gens()));
    Normalized n = normalize(*sig, g);
    CHECK(n.sign == oracle_sign(*sig, g));
    if (n.sign != 0) CHECK(std::is_sorted(n.gens.begin(), n.gens.end()));
  }
}

TEST_CASE("product of lists matches normalizing the concatenation") {
  auto sig = mixed_sig();
  std::mt19937 rng(22);
  for (int trial = 0; trial < 2000; ++trial) {
    GenList a, b;
    for (int k = 0, len = static_cast<int>(rng() % 4); k < len; ++k) a.push_back(static_cast<int>(rng() % 5));
    for (int k = 0, len = static_cast<int>(rng() % 4); k < len; ++k) b.push_back(static_cast<int>(rng() % 5));
    Normalized na = normalize(*sig, a), nb = normalize(*sig, b);
    if (na.sign == 0 || nb.sign == 0) continue;
    GenList cat = na.gens;
    cat.insert(cat.end(), nb.gens.begin(), nb.gens.end());
    Normalized expect = normalize(*sig, cat);
    Normalized got = multiply_gen_lists(*sig, na.gens, nb.gens);
    CHECK(got.sign == expect.sign);
    if (got.sign) CHECK(got.gens == expect.gens);
  }
}

TEST_CASE("graded commutativity and associativity") {
  auto sig = mixed_sig();
  std::mt19937 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    int da = static_cast<int>(rng() % 5), db = static_cast<int>(rng() % 5);
    GradedFunction a = random_homogeneous(rng, sig, da), b = random_homogeneous(rng, sig, db);
    Rat s = (da * db) % 2 ? Rat(-1) : Rat(1);
    CHECK(a * b == s * (b * a));
    GradedFunction f = random_function(rng, sig, 3), g = random_function(rng, sig, 3), h = random_function(rng, sig, 3);
    CHECK((f * g) * h == f * (g * h));
    CHECK(f * (g + h) == f * g + f * h);
  }
}

TEST_CASE("odd generators square to zero") {
  auto sig = mixed_sig();
  auto a = GradedFunction::generator(sig, 0);
  auto c = GradedFunction::generator(sig, 2);
  CHECK((a * a).is_zero());
  CHECK_FALSE((c * c).is_zero());
  auto b = GradedFunction::generator(sig, 1);
  CHECK(a * b == -(b * a));
  CHECK((a * b).str() == "a*b");
}

TEST_CASE("monomial counts match partition oracle") {
  std::vector<std::vector<int>> cases = {{1, 1, 2, 2, 3}, {1, 1, 1}, {2, 2}, {1, 2, 3, 4}, {1, 1, 1, 2, 2, 3, 3, 4}};
  for (const auto& degs : cases) {
    std::vector<Generator> gens;
    for (std::size_t i = 0; i < degs.size(); ++i) gens.push_back({"g" + std::to_string(i), degs[i]});
    auto sig = make_signature({}, gens);
    for (int l = 0; l <= 9; ++l) {
      auto mons = monomials_of_degree(*sig, l);
      CHECK(static_cast<long>(mons.size()) == count_oracle(degs, 0, l));
      for (const auto& m : mons) CHECK(gen_list_degree(*sig, m) == l);
    }
  }
}

TEST_CASE("generator derivatives are graded derivations") {
  auto sig = mixed_sig();
  std::mt19937 rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    int da = static_cast<int>(rng() % 5);
    GradedFunction f = random_homogeneous(rng, sig, da), g = random_function(rng, sig, 3);
    for (int id = 0; id < static_cast<int>(sig->num_gens()); ++id) {
      Rat s = (da * sig->degree(id)) % 2 ? Rat(-1) : Rat(1);
      CHECK((f * g).d_gen(id) == f.d_gen(id) * g + s * (f * g.d_gen(id)));
    }
    for (std::size_t b = 0; b < sig->m0(); ++b) CHECK((f * g).d_base(b) == f.d_base(b) * g + f * g.d_base(b));
  }
  auto c = GradedFunction::generator(sig, 2);
  CHECK((c * c * c).d_gen(2) == Rat(3) * (c * c));
}

TEST_CASE("substitution is a ring morphism") {
  auto sig = mixed_sig();
  std::mt19937 rng(25);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<GradedFunction> images;
    for (std::size_t c = 0; c < sig->num_coordinates(); ++c) {
      GradedFunction img = GradedFunction::coordinate(sig, c);
      int deg = sig->coordinate_degree(c);
      if (rng() % 2) img += random_homogeneous(rng, sig, deg);
      images.push_back(img);
    }
    GradedFunction f = random_function(rng, sig, 3), g = random_function(rng, sig, 3);
    CHECK((f * g).substitute(images, sig) == f.substitute(images, sig) * g.substitute(images, sig));
    CHECK((f + g).substitute(images, sig) == f.substitute(images, sig) + g.substitute(images, sig));
  }
  std::vector<GradedFunction> id;
  for (std::size_t c = 0; c < sig->num_coordinates(); ++c) id.push_back(GradedFunction::coordinate(sig, c));
  GradedFunction f = random_function(rng, sig, 5);
  CHECK(f.substitute(id, sig) == f);
}
