#include "gradman/distrib.hpp"

#include <algorithm>
#include <map>

namespace gradman {

namespace {

std::vector<std::size_t> coords_of_degree(const GradedSignature& sig, int degree) {
  std::vector<std::size_t> out;
  for (int id : sig.gens_of_degree(degree)) out.push_back(sig.m0() + std::size_t(id));
  return out;
}

bool same_sig(const SigPtr& a, const SigPtr& b) { return a == b || *a == *b; }

GradedFunction integrate_base(const GradedFunction& f, std::size_t var) {
  GradedFunction r(f.sig());
  for (const auto& [g, c] : f.terms()) r += GradedFunction::monomial(f.sig(), g, c.integral(var));
  return r;
}

// First column subset (lexicographic) whose square block has a polynomial inverse.
struct Alignment {
  std::vector<std::size_t> cols;
  PolyMatrix inverse;
};

std::optional<Alignment> align(const std::vector<std::vector<Poly>>& z, std::size_t ncols, std::size_t nv) {
  const std::size_t r = z.size();
  if (r == 0) return Alignment{{}, PolyMatrix(0, 0, nv)};
  if (r > ncols) return std::nullopt;
  std::vector<std::size_t> cols(r);
  for (std::size_t i = 0; i < r; ++i) cols[i] = i;
  for (int tries = 0; tries < 20000; ++tries) {
    PolyMatrix s(r, r, nv);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b) s.at(a, b) = z[a][cols[b]];
    if (auto inv = inverse_polynomial(s)) return Alignment{cols, *inv};
    // next combination
    std::size_t i = r;
    while (i > 0 && cols[i - 1] == ncols - r + i - 1) --i;
    if (i == 0) return std::nullopt;
    ++cols[i - 1];
    for (std::size_t j = i; j < r; ++j) cols[j] = cols[j - 1] + 1;
  }
  return std::nullopt;
}

VectorField combine(const PolyMatrix& m, std::size_t row, const std::vector<VectorField>& fields, const SigPtr& sig, int degree) {
  VectorField out(sig, degree);
  for (std::size_t b = 0; b < fields.size(); ++b)
    if (!m.at(row, b).is_zero()) out = out + times(GradedFunction::from_poly(sig, m.at(row, b)), fields[b]);
  return out;
}

std::vector<Poly> linear_coefficients(const Poly& p, std::size_t nv, Rat& constant) {
  std::vector<Poly> row;
  constant = 0;
  std::vector<Rat> lin(nv, Rat(0));
  for (const auto& [e, c] : p.terms()) {
    int deg = exponent_degree(e);
    if (deg == 0) {
      constant = c;
    } else if (deg == 1) {
      for (std::size_t a = 0; a < nv; ++a)
        if (e[a]) lin[a] = c;
    } else {
      throw GradmanError(ErrorKind::Unsupported, "base coordinate change must be affine");
    }
  }
  for (const auto& v : lin) row.push_back(Poly(nv, v));
  return row;
}

}  // namespace

std::string Distribution::rank_str() const {
  std::string s;
  for (std::size_t k = 0; k < ranks.size(); ++k) s += (k ? "|" : "") + std::to_string(ranks[k]);
  return s;
}

Distribution make_distribution(const SigPtr& sig, std::vector<VectorField> generators, std::vector<std::vector<Rat>> sample_points) {
  Distribution d;
  d.sig = sig;
  const int n = sig->n();
  d.ranks.assign(std::size_t(n + 1), 0);
  for (const auto& g : generators) {
    if (!same_sig(g.sig(), sig)) throw GradmanError(ErrorKind::InvalidInput, "generator lives on another chart");
    if (g.degree() > 0 || g.degree() < -n)
      throw GradmanError(ErrorKind::InvalidInput, "generator degree " + std::to_string(g.degree()) + " outside [-n, 0]");
  }
  std::stable_sort(generators.begin(), generators.end(),
                   [](const VectorField& a, const VectorField& b) { return a.degree() > b.degree(); });
  for (const auto& g : generators) ++d.ranks[std::size_t(-g.degree())];
  if (sample_points.empty()) sample_points.push_back(std::vector<Rat>(sig->m0(), Rat(0)));
  for (const auto& p : sample_points) {
    if (p.size() != sig->m0()) throw GradmanError(ErrorKind::InvalidInput, "sample point has the wrong dimension");
    if (!linearly_independent(generators, {p}))
      throw GradmanError(ErrorKind::InvalidInput, "generators are dependent at a sample point");
  }
  d.generators = std::move(generators);
  d.sample_points = std::move(sample_points);
  return d;
}

MembershipCertificate membership(const VectorField& x, const std::vector<VectorField>& generators) {
  const SigPtr& sig = x.sig();
  const std::size_t nv = sig->m0();
  const std::size_t nc = sig->num_coordinates();
  // unknown (j, m): coefficient of monomial m in the multiplier of generator j
  std::vector<std::pair<std::size_t, GenList>> unknowns;
  for (std::size_t j = 0; j < generators.size(); ++j) {
    if (!same_sig(generators[j].sig(), sig)) throw GradmanError(ErrorKind::InvalidInput, "signature mismatch");
    int delta = x.degree() - generators[j].degree();
    if (delta < 0) continue;
    if (delta > sig->max_degree())
      throw GradmanError(ErrorKind::DegreeOverflow, "membership coefficient degree " + std::to_string(delta) +
                                                        " exceeds max degree " + std::to_string(sig->max_degree()));
    for (auto& m : monomials_of_degree(*sig, delta)) unknowns.emplace_back(j, std::move(m));
  }
  std::map<std::pair<std::size_t, GenList>, std::size_t> row_index;
  std::vector<std::map<std::size_t, Poly>> rows;
  std::vector<Poly> rhs;
  auto row_of = [&](std::size_t c, const GenList& g) {
    auto key = std::make_pair(c, g);
    auto it = row_index.find(key);
    if (it != row_index.end()) return it->second;
    row_index.emplace(key, rows.size());
    rows.emplace_back();
    rhs.emplace_back(nv);
    return rows.size() - 1;
  };
  for (std::size_t c = 0; c < nc; ++c)
    for (const auto& [g, p] : x.action(c).terms()) rhs[row_of(c, g)] += p;
  const Poly one(nv, Rat(1));
  for (std::size_t u = 0; u < unknowns.size(); ++u) {
    const auto& [j, m] = unknowns[u];
    GradedFunction mono = GradedFunction::monomial(sig, m, one);
    for (std::size_t c = 0; c < nc; ++c) {
      const GradedFunction& a = generators[j].action(c);
      if (a.is_zero()) continue;
      const GradedFunction prod = mono * a;
      for (const auto& [g, p] : prod.terms()) {
        auto& cell = rows[row_of(c, g)][u];
        if (cell.nvars() != nv) cell = Poly(nv);
        cell += p;
      }
    }
  }
  PolyMatrix a(rows.size(), unknowns.size(), nv);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [u, p] : rows[r]) a.at(r, u) = p;

  MembershipCertificate cert;
  auto assemble = [&](const std::vector<Poly>& sol, const Poly& scale) {
    std::vector<GradedFunction> coeff(generators.size(), GradedFunction(sig));
    for (std::size_t u = 0; u < unknowns.size(); ++u)
      if (!sol[u].is_zero()) coeff[unknowns[u].first] += GradedFunction::monomial(sig, unknowns[u].second, sol[u]);
    VectorField res = times(GradedFunction::from_poly(sig, scale), x);
    for (std::size_t j = 0; j < generators.size(); ++j)
      if (!coeff[j].is_zero()) res = res - times(coeff[j], generators[j]);
    return std::make_pair(coeff, res);
  };
  auto finish = [&](VectorField res) {
    cert.residual = std::move(res);
    for (std::size_t c = 0; c < nc; ++c)
      if (!cert.residual.action(c).is_zero()) {
        cert.witness_coordinate = c;
        cert.witness_degree = sig->coordinate_degree(c) + x.degree();
        break;
      }
  };

  if (unknowns.empty()) {
    cert.member = x.is_zero();
    if (cert.member) cert.coefficients.assign(generators.size(), GradedFunction(sig));
    finish(x);
    return cert;
  }
  SolveResult s = solve(a, rhs);
  if (s.consistent && s.polynomial) {
    auto [coeff, res] = assemble(s.x, one);
    if (!res.is_zero()) throw GradmanError(ErrorKind::InvalidInput, "membership solution failed re-expansion");
    cert.member = true;
    cert.coefficients = std::move(coeff);
    cert.residual = std::move(res);
    return cert;
  }
  if (s.consistent) {
    cert.non_polynomial = true;
    finish(assemble(s.numerators, s.denominator).second);
    return cert;
  }
  // best fit on a maximal set of independent equations
  FFForm t = ff_gauss_jordan(a.transpose());
  std::vector<std::size_t> keep = t.pivot_cols;
  PolyMatrix sub(keep.size(), unknowns.size(), nv);
  std::vector<Poly> sub_rhs;
  for (std::size_t r = 0; r < keep.size(); ++r) {
    for (std::size_t u = 0; u < unknowns.size(); ++u) sub.at(r, u) = a.at(keep[r], u);
    sub_rhs.push_back(rhs[keep[r]]);
  }
  SolveResult fit = keep.empty() ? SolveResult{} : solve(sub, sub_rhs);
  if (keep.empty() || !fit.consistent)
    finish(x);
  else if (fit.polynomial)
    finish(assemble(fit.x, one).second);
  else
    finish(assemble(fit.numerators, fit.denominator).second);
  return cert;
}

MembershipCertificate membership(const VectorField& x, const Distribution& d) { return membership(x, d.generators); }

InvolutivityReport is_involutive(const Distribution& d) {
  InvolutivityReport rep;
  const auto& g = d.generators;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i; j < g.size(); ++j) {
      if (i == j && g[i].degree() % 2 == 0) continue;
      VectorField b = bracket(g[i], g[j]);
      if (b.is_zero()) continue;
      auto cert = membership(b, g);
      if (!cert.member) {
        rep.involutive = false;
        rep.first = i;
        rep.second = j;
        rep.bracket = std::move(b);
        rep.certificate = std::move(cert);
        return rep;
      }
    }
  return rep;
}

Distribution restrict_distribution(const Distribution& d, int r) {
  std::vector<VectorField> gens;
  SigPtr t = std::make_shared<const GradedSignature>(d.sig->truncated(r));
  for (const auto& g : d.generators)
    if (g.degree() >= -r) gens.push_back(restrict_truncation(g, r));
  return make_distribution(t, std::move(gens), d.sample_points);
}

GradedFunction graded_antiderivative(const GradedFunction& g, int gen_id) {
  const SigPtr& sig = g.sig();
  GradedFunction e = GradedFunction::generator(sig, gen_id);
  if (sig->odd(gen_id)) {
    if (!g.d_gen(gen_id).is_zero())
      throw GradmanError(ErrorKind::InvalidInput, "odd antiderivative needs a function independent of " + sig->gen(gen_id).name);
    return e * g;
  }
  GradedFunction out(sig);
  for (const auto& [gens, c] : g.terms()) {
    long t = std::count(gens.begin(), gens.end(), gen_id);
    GenList up = gens;
    up.push_back(gen_id);
    out.add_term(up, c * make_rat(1, t + 1));
  }
  return out;
}

CoordinateChange identity_change(const SigPtr& sig) {
  CoordinateChange ch;
  ch.sig = sig;
  for (std::size_t c = 0; c < sig->num_coordinates(); ++c) {
    ch.new_in_old.push_back(GradedFunction::coordinate(sig, c));
    ch.old_in_new.push_back(GradedFunction::coordinate(sig, c));
  }
  return ch;
}

CoordinateChange make_change(const SigPtr& sig, std::vector<GradedFunction> new_in_old) {
  const std::size_t nv = sig->m0(), nc = sig->num_coordinates();
  if (new_in_old.size() != nc) throw GradmanError(ErrorKind::InvalidInput, "coordinate change has the wrong size");
  for (std::size_t c = 0; c < nc; ++c) {
    const auto& f = new_in_old[c];
    if (!f.is_zero() && f.degree() != sig->coordinate_degree(c))
      throw GradmanError(ErrorKind::InvalidInput, "coordinate change does not preserve degrees");
  }
  CoordinateChange ch;
  ch.sig = sig;
  ch.old_in_new.assign(nc, GradedFunction(sig));
  // base: x_new = A x_old + b
  RatMatrix amat(nv, nv, Rat(0));
  std::vector<Rat> shift(nv);
  for (std::size_t a = 0; a < nv; ++a) {
    auto row = linear_coefficients(new_in_old[a].body(), nv, shift[a]);
    for (std::size_t b = 0; b < nv; ++b) amat.at(a, b) = row[b].constant_term();
  }
  auto ainv = inverse(amat);
  if (!ainv) throw GradmanError(ErrorKind::NonPolynomialFlatFrame, "base coordinate change is singular");
  std::vector<Poly> base_old(nv, Poly(nv));
  for (std::size_t a = 0; a < nv; ++a) {
    for (std::size_t b = 0; b < nv; ++b) {
      Rat v = ainv->at(a, b);
      if (v == 0) continue;
      base_old[a] += (Poly::variable(nv, b) - Poly(nv, shift[b])) * v;
    }
    ch.old_in_new[a] = GradedFunction::from_poly(sig, base_old[a]);
  }
  for (int j = 1; j <= sig->n(); ++j) {
    auto cj = coords_of_degree(*sig, j);
    if (cj.empty()) continue;
    std::map<GenList, std::size_t> local;
    for (std::size_t t = 0; t < cj.size(); ++t) local[GenList{int(cj[t] - nv)}] = t;
    PolyMatrix l(cj.size(), cj.size(), nv);
    std::vector<GradedFunction> rest;
    for (std::size_t r = 0; r < cj.size(); ++r) {
      GradedFunction nl(sig);
      for (const auto& [g, p] : new_in_old[cj[r]].terms()) {
        auto it = local.find(g);
        if (it != local.end())
          l.at(r, it->second) = nv ? p.compose(base_old) : p;
        else
          nl += GradedFunction::monomial(sig, g, p);
      }
      // lower-degree products only, so old_in_new is already known for every factor
      rest.push_back(nl.substitute(ch.old_in_new, sig));
    }
    auto linv = inverse_polynomial(l);
    if (!linv) throw GradmanError(ErrorKind::NonPolynomialFlatFrame, "coordinate change is not polynomially invertible");
    for (std::size_t c = 0; c < cj.size(); ++c) {
      GradedFunction f(sig);
      for (std::size_t r = 0; r < cj.size(); ++r)
        if (!linv->at(c, r).is_zero())
          f += (GradedFunction::coordinate(sig, cj[r]) - rest[r]).scale(linv->at(c, r));
      ch.old_in_new[cj[c]] = std::move(f);
    }
  }
  ch.new_in_old = std::move(new_in_old);
  if (!inverse_check(ch)) throw GradmanError(ErrorKind::NonPolynomialFlatFrame, "coordinate change inverse failed verification");
  return ch;
}

CoordinateChange then(const CoordinateChange& first, const CoordinateChange& second) {
  CoordinateChange ch;
  ch.sig = first.sig;
  for (std::size_t c = 0; c < first.new_in_old.size(); ++c) {
    ch.new_in_old.push_back(second.new_in_old[c].substitute(first.new_in_old, ch.sig));
    ch.old_in_new.push_back(first.old_in_new[c].substitute(second.old_in_new, ch.sig));
  }
  return ch;
}

bool inverse_check(const CoordinateChange& ch) {
  for (std::size_t c = 0; c < ch.new_in_old.size(); ++c) {
    GradedFunction id = GradedFunction::coordinate(ch.sig, c);
    if (ch.new_in_old[c].substitute(ch.old_in_new, ch.sig) != id) return false;
    if (ch.old_in_new[c].substitute(ch.new_in_old, ch.sig) != id) return false;
  }
  return true;
}

GradedFunction to_new(const GradedFunction& f, const CoordinateChange& ch) { return f.substitute(ch.old_in_new, ch.sig); }

VectorField to_new(const VectorField& x, const CoordinateChange& ch) {
  VectorField out(ch.sig, x.degree());
  for (std::size_t c = 0; c < ch.new_in_old.size(); ++c) out.set_action(c, to_new(x.apply(ch.new_in_old[c]), ch));
  return out;
}

namespace {

struct Work {
  SigPtr sig;
  CoordinateChange total;
  std::vector<VectorField> gens;
  std::vector<long> assigned;
  std::vector<std::string>* log;

  void apply(const CoordinateChange& ch) {
    for (auto& g : gens) g = to_new(g, ch);
    total = then(total, ch);
  }

  bool is_identity(const std::vector<GradedFunction>& images) const {
    for (std::size_t c = 0; c < images.size(); ++c)
      if (images[c] != GradedFunction::coordinate(sig, c)) return false;
    return true;
  }

  void change(std::vector<GradedFunction> images, const std::string& stage) {
    if (is_identity(images)) return;
    auto names = sig->coordinate_names();
    for (std::size_t c = 0; c < images.size(); ++c)
      if (images[c] != GradedFunction::coordinate(sig, c)) log->push_back(stage + ": " + names[c] + " -> " + images[c].str());
    apply(make_change(sig, std::move(images)));
  }

  std::vector<GradedFunction> identity() const { return identity_change(sig).new_in_old; }
};

void stage_a(Work& w, const std::vector<int>& level) {
  const SigPtr& sig = w.sig;
  const std::size_t nv = sig->m0();
  for (int L = 1; L <= sig->n(); ++L) {
    auto cl = coords_of_degree(*sig, L);
    std::vector<std::size_t> zs;
    for (std::size_t i = 0; i < w.gens.size(); ++i)
      if (level[i] == L) zs.push_back(i);
    std::vector<std::vector<Poly>> z;
    for (std::size_t i : zs) {
      std::vector<Poly> row;
      for (std::size_t c : cl) row.push_back(w.gens[i].action(c).body());
      z.push_back(std::move(row));
    }
    auto al = align(z, cl.size(), nv);
    if (!al)
      throw GradmanError(ErrorKind::NonPolynomialFlatFrame,
                         "degree -" + std::to_string(L) + " generators admit no polynomial alignment with coordinates");
    std::vector<VectorField> old;
    for (std::size_t i : zs) old.push_back(w.gens[i]);
    for (std::size_t r = 0; r < zs.size(); ++r) w.gens[zs[r]] = combine(al->inverse, r, old, sig, -L);
    // pivot coordinates first, the rest corrected to be killed by the aligned fields
    std::vector<bool> pivot(cl.size(), false);
    for (std::size_t c : al->cols) pivot[c] = true;
    auto images = w.identity();
    std::size_t pos = 0;
    for (std::size_t c = 0; c < zs.size(); ++c) images[cl[pos++]] = GradedFunction::coordinate(sig, cl[al->cols[c]]);
    for (std::size_t l = 0; l < cl.size(); ++l) {
      if (pivot[l]) continue;
      GradedFunction f = GradedFunction::coordinate(sig, cl[l]);
      for (std::size_t c = 0; c < zs.size(); ++c) {
        Poly h = w.gens[zs[c]].action(cl[l]).body();
        if (!h.is_zero()) f -= GradedFunction::coordinate(sig, cl[al->cols[c]]).scale(h);
      }
      images[cl[pos++]] = std::move(f);
    }
    w.change(std::move(images), "align degree " + std::to_string(L));
    for (std::size_t c = 0; c < zs.size(); ++c) w.assigned[zs[c]] = long(cl[c]);
    const std::size_t dl = zs.size();

    std::vector<std::size_t> ys;
    for (std::size_t i = 0; i < w.gens.size(); ++i)
      if (level[i] >= 1 && level[i] < L) ys.push_back(i);
    std::stable_sort(ys.begin(), ys.end(), [&](std::size_t a, std::size_t b) { return level[a] > level[b]; });
    for (std::size_t s : ys) {
      VectorField y = w.gens[s];
      for (std::size_t c = 0; c < dl; ++c) {
        const GradedFunction& k = y.action(cl[c]);
        if (!k.is_zero()) y = y - times(k, w.gens[zs[c]]);
      }
      for (std::size_t c = 0; c < sig->num_coordinates(); ++c) {
        if (sig->coordinate_degree(c) >= L) continue;
        GradedFunction want = long(c) == w.assigned[s] ? GradedFunction::constant(sig, Rat(1)) : GradedFunction(sig);
        if (y.action(c) != want) throw GradmanError(ErrorKind::NotInvolutive, "generator does not restrict to a coordinate field");
      }
      w.gens[s] = y;
      int es = int(std::size_t(w.assigned[s]) - nv);
      auto img = w.identity();
      for (std::size_t l = dl; l < cl.size(); ++l) {
        const GradedFunction& g = y.action(cl[l]);
        if (g.is_zero()) continue;
        if (sig->odd(es) && !g.d_gen(es).is_zero())
          throw GradmanError(ErrorKind::NotInvolutive, "odd generator has a non-closed self bracket");
        img[cl[l]] -= graded_antiderivative(g, es);
      }
      w.change(std::move(img), "flatten degree " + std::to_string(L));
    }
  }
}

void stage_b(Work& w, const std::vector<int>& level) {
  const SigPtr& sig = w.sig;
  const std::size_t nv = sig->m0();
  std::vector<std::size_t> flat;
  for (std::size_t i = 0; i < w.gens.size(); ++i)
    if (level[i] >= 1) flat.push_back(i);
  for (std::size_t i = 0; i < w.gens.size(); ++i) {
    if (level[i] != 0) continue;
    VectorField x = w.gens[i];
    for (std::size_t f : flat) {
      const GradedFunction& k = x.action(std::size_t(w.assigned[f]));
      if (!k.is_zero()) x = x - times(k, w.gens[f]);
    }
    for (std::size_t f : flat) {
      int id = int(std::size_t(w.assigned[f]) - nv);
      for (const auto& a : x.actions())
        if (!a.d_gen(id).is_zero()) throw GradmanError(ErrorKind::NotInvolutive, "degree 0 generator depends on a flat coordinate");
    }
    w.gens[i] = x;
  }
}

void stage_c(Work& w, const std::vector<int>& level) {
  const SigPtr& sig = w.sig;
  const std::size_t nv = sig->m0();
  std::vector<std::size_t> xs;
  for (std::size_t i = 0; i < w.gens.size(); ++i)
    if (level[i] == 0) xs.push_back(i);
  if (xs.empty()) return;
  std::vector<std::vector<Poly>> g;
  for (std::size_t i : xs) {
    std::vector<Poly> row;
    for (std::size_t a = 0; a < nv; ++a) row.push_back(w.gens[i].action(a).body());
    g.push_back(std::move(row));
  }
  auto al = align(g, nv, nv);
  if (!al) throw GradmanError(ErrorKind::NonConstantSymbols, "symbols admit no polynomial normalization");
  std::vector<VectorField> old;
  for (std::size_t i : xs) old.push_back(w.gens[i]);
  for (std::size_t r = 0; r < xs.size(); ++r) w.gens[xs[r]] = combine(al->inverse, r, old, sig, 0);
  RatMatrix b(nv, nv, Rat(0));
  for (std::size_t r = 0; r < xs.size(); ++r)
    for (std::size_t a = 0; a < nv; ++a) {
      Poly s = w.gens[xs[r]].action(a).body();
      if (!s.is_constant())
        throw GradmanError(ErrorKind::NonConstantSymbols, "symbol coefficient " + s.str(sig->base()) + " is not constant");
      b.at(r, a) = s.constant_term();
    }
  std::vector<bool> pivot(nv, false);
  for (std::size_t c : al->cols) pivot[c] = true;
  std::size_t row = xs.size();
  for (std::size_t a = 0; a < nv; ++a)
    if (!pivot[a]) b.at(row++, a) = 1;
  RatMatrix bt(nv, nv, Rat(0));
  for (std::size_t r = 0; r < nv; ++r)
    for (std::size_t c = 0; c < nv; ++c) bt.at(r, c) = b.at(c, r);
  auto binv = inverse(bt);
  if (!binv) throw GradmanError(ErrorKind::NonConstantSymbols, "symbols are dependent");
  auto images = w.identity();
  for (std::size_t a = 0; a < nv; ++a) {
    Poly p(nv);
    for (std::size_t c = 0; c < nv; ++c)
      if (binv->at(a, c) != 0) p += Poly::variable(nv, c) * binv->at(a, c);
    images[a] = GradedFunction::from_poly(sig, p);
  }
  w.change(std::move(images), "straighten symbols");
  for (std::size_t r = 0; r < xs.size(); ++r) w.assigned[xs[r]] = long(r);

  std::vector<bool> is_flat(sig->num_coordinates(), false);
  for (std::size_t i = 0; i < w.gens.size(); ++i)
    if (level[i] >= 1) is_flat[std::size_t(w.assigned[i])] = true;
  const int cap = 64;
  for (std::size_t r = 0; r < xs.size(); ++r) {
    const VectorField& x = w.gens[xs[r]];
    auto img = w.identity();
    for (std::size_t c = nv; c < sig->num_coordinates(); ++c) {
      if (is_flat[c]) continue;
      GradedFunction q = GradedFunction::coordinate(sig, c), cur = q;
      bool done = false;
      for (int it = 0; it < cap && !done; ++it) {
        GradedFunction v = x.apply(cur) - cur.d_base(r);
        GradedFunction next = q - integrate_base(v, r);
        done = next == cur;
        cur = std::move(next);
      }
      if (!done)
        throw GradmanError(ErrorKind::NonPolynomialFlatFrame,
                           "flat frame for " + sig->coordinate_names()[c] + " is not polynomial (connection is not nilpotent)");
      img[c] = cur;
    }
    w.change(std::move(img), "flat frame");
  }
}

}  // namespace

FrobeniusChart frobenius_normal_form(const Distribution& d) {
  auto inv = is_involutive(d);
  if (!inv.involutive)
    throw GradmanError(ErrorKind::NotInvolutive, "bracket of generators " + std::to_string(inv.first + 1) + " and " +
                                                     std::to_string(inv.second + 1) + " leaves the distribution: " +
                                                     inv.certificate.residual.str());
  FrobeniusChart chart;
  Work w{d.sig, identity_change(d.sig), d.generators, std::vector<long>(d.generators.size(), -1), &chart.log};
  std::vector<int> level;
  for (const auto& g : d.generators) level.push_back(-g.degree());
  stage_a(w, level);
  stage_b(w, level);
  stage_c(w, level);
  for (std::size_t i = 0; i < w.gens.size(); ++i)
    if (w.gens[i] != VectorField::coordinate_field(d.sig, std::size_t(w.assigned[i])))
      throw GradmanError(ErrorKind::NonPolynomialFlatFrame, "generator " + std::to_string(i + 1) + " was not flattened");
  chart.change = w.total;
  std::vector<std::size_t> flat;
  for (long a : w.assigned) flat.push_back(std::size_t(a));
  std::sort(flat.begin(), flat.end());
  for (std::size_t c : flat) chart.flattened.push_back(VectorField::coordinate_field(d.sig, c));
  for (const auto& g : d.generators) chart.transformed.push_back(to_new(g, chart.change));
  chart.invertible = inverse_check(chart.change);
  chart.span_preserved = true;
  for (const auto& g : chart.transformed) chart.span_preserved = chart.span_preserved && membership(g, chart.flattened).member;
  for (const auto& f : chart.flattened) chart.span_preserved = chart.span_preserved && membership(f, chart.transformed).member;
  return chart;
}

FrobeniusChart single_field_normal_form(const VectorField& x, const std::vector<Rat>& point,
                                        const std::optional<GradedFunction>& lambda) {
  auto t = tangent_at(x, point);
  if (std::all_of(t.components.begin(), t.components.end(), [](const Rat& r) { return r == 0; }))
    throw GradmanError(ErrorKind::HypothesisFailed, "field vanishes at the given point");
  VectorField b = bracket(x, x);
  if (lambda) {
    if (b != times(*lambda, x)) throw GradmanError(ErrorKind::HypothesisFailed, "[X, X] is not lambda X");
  } else if (!membership(b, std::vector<VectorField>{x}).member) {
    throw GradmanError(ErrorKind::HypothesisFailed, "[X, X] = " + b.str() + " is not a multiple of X");
  }
  return frobenius_normal_form(make_distribution(x.sig(), {x}, {point}));
}

}  // namespace gradman
