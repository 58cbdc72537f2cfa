#include "gradman/geometrize.hpp"

#include <map>

namespace gradman {

namespace {

std::vector<Generator> numbered(const std::string& stem, const std::vector<std::size_t>& counts) {
  std::vector<Generator> gens;
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t s = 0; s < counts[i]; ++s)
      gens.push_back({stem + std::to_string(i + 1) + "_" + std::to_string(s + 1), int(i + 1)});
  return gens;
}

}  // namespace

ChartAlgebra::ChartAlgebra(CoalgebraBundle e, int max_degree) : bundle_(std::move(e)) {
  iso_ = splitting_iso(bundle_);
  const int n = bundle_.n();
  sig_ = make_signature(bundle_.base(), numbered("z", iso_.kernel_ranks), n, max_degree);
  frame_sig_ = make_signature(bundle_.base(), numbered("th", bundle_.ranks()), n, max_degree);
  const std::size_t nv = bundle_.nvars();
  for (int i = 1; i <= n; ++i) {
    auto mons = split_monomials(iso_.kernel_ranks, i);
    const PolyMatrix& psi = iso_.psi.at(i);
    const PolyMatrix& phi = iso_.phi.at(i);
    std::vector<GradedFunction> level;
    for (std::size_t a = 0; a < bundle_.rank(i); ++a) {
      GradedFunction f(sig_);
      for (std::size_t m = 0; m < mons.size(); ++m) f.add_term(mons[m], psi.at(a, m));
      level.push_back(std::move(f));
    }
    emb_.push_back(std::move(level));
    for (std::size_t m = 0; m < mons.size(); ++m) {
      if (mons[m].size() < 2) continue;
      RewriteRule r;
      r.level = i;
      for (std::size_t a = 0; a < bundle_.rank(i); ++a) r.lhs.push_back(phi.at(m, a).constant_term());
      r.rhs = GradedFunction::monomial(sig_, mons[m], Poly(nv, Rat(1)));
      rules_.push_back(std::move(r));
    }
  }
}

const GradedFunction& ChartAlgebra::embedding(int level, std::size_t a) const {
  return emb_.at(std::size_t(level - 1)).at(a);
}

std::vector<Rat> ChartAlgebra::coordinate_in_frame(int level, std::size_t s) const {
  auto mons = split_monomials(iso_.kernel_ranks, level);
  int id = -1, seen = 0;
  for (std::size_t m = 0; m < mons.size(); ++m)
    if (mons[m].size() == 1 && seen++ == int(s)) id = int(m);
  if (id < 0) throw GradmanError(ErrorKind::InvalidInput, "no such chart coordinate");
  std::vector<Rat> v;
  for (std::size_t a = 0; a < bundle_.rank(level); ++a) v.push_back(iso_.phi.at(level).at(std::size_t(id), a).constant_term());
  return v;
}

GradedFunction ChartAlgebra::reduce(const GradedFunction& expr) const {
  if (expr.max_term_degree() > frame_sig_->max_degree())
    throw GradmanError(ErrorKind::DegreeOverflow, "expression degree " + std::to_string(expr.max_term_degree()) +
                                                      " exceeds max degree " + std::to_string(frame_sig_->max_degree()));
  std::vector<GradedFunction> images;
  for (std::size_t b = 0; b < bundle_.nvars(); ++b) images.push_back(GradedFunction::base_var(sig_, b));
  for (const auto& g : frame_sig_->gens()) {
    // frame generator names are th<i>_<a>
    auto us = g.name.find('_');
    std::size_t a = std::stoul(g.name.substr(us + 1)) - 1;
    images.push_back(embedding(g.degree, a));
  }
  return expr.substitute(images, sig_);
}

GradedFunction ChartAlgebra::lift(const GradedFunction& chart_fn) const {
  std::vector<GradedFunction> images;
  const std::size_t nv = bundle_.nvars();
  for (std::size_t b = 0; b < nv; ++b) images.push_back(GradedFunction::base_var(frame_sig_, b));
  std::vector<int> offsets(1, 0);
  for (int i = 1; i <= n(); ++i) offsets.push_back(offsets.back() + int(bundle_.rank(i)));
  for (int i = 1; i <= n(); ++i)
    for (std::size_t s = 0; s < sig_->count(i); ++s) {
      auto v = coordinate_in_frame(i, s);
      GradedFunction f(frame_sig_);
      for (std::size_t a = 0; a < v.size(); ++a)
        if (v[a] != 0) f.add_term({offsets[std::size_t(i - 1)] + int(a)}, Poly(nv, v[a]));
      images.push_back(std::move(f));
    }
  return chart_fn.substitute(images, frame_sig_);
}

std::vector<Poly> ChartAlgebra::unembed(const GradedFunction& f, int level) const {
  auto mons = split_monomials(iso_.kernel_ranks, level);
  std::map<GenList, std::size_t> index;
  for (std::size_t m = 0; m < mons.size(); ++m) index[mons[m]] = m;
  const std::size_t nv = bundle_.nvars();
  std::vector<Poly> out(bundle_.rank(level), Poly(nv));
  const PolyMatrix& phi = iso_.phi.at(level);
  for (const auto& [g, c] : f.terms()) {
    auto it = index.find(g);
    if (it == index.end()) throw GradmanError(ErrorKind::InvalidInput, "function is not homogeneous of degree " + std::to_string(level));
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += c * phi.at(it->second, a);
  }
  return out;
}

GradedFunction ChartAlgebra::embed_vector(const std::vector<Poly>& v, int level) const {
  GradedFunction f(sig_);
  for (std::size_t a = 0; a < v.size(); ++a) f += embedding(level, a).scale(v[a]);
  return f;
}

ChartAlgebra geometrize(const CoalgebraBundle& e, int max_degree) { return ChartAlgebra(e, max_degree); }

std::vector<Poly> mu_star(const CoalgebraBundle& e, int j, std::size_t b, int k, std::size_t c) {
  int i = j + k;
  std::vector<Poly> out(i <= e.n() ? e.rank(i) : 0, Poly(e.nvars()));
  if (i > e.n()) return out;
  PolyMatrix fm = e.full_mu(i);
  std::size_t row = e.full_offset(i, j) + b * e.rank(k) + c;
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = fm.at(row, a);
  return out;
}

ConfluenceReport confluence_check(const ChartAlgebra& a) {
  ConfluenceReport rep;
  const CoalgebraBundle& e = a.bundle();
  for (int i = 2; i <= e.n(); ++i) {
    PolyMatrix fm = e.full_mu(i);
    for (int j = 1; j < i; ++j) {
      int k = i - j;
      for (std::size_t b = 0; b < e.rank(j); ++b)
        for (std::size_t c = 0; c < e.rank(k); ++c) {
          std::vector<Poly> v(e.rank(i), Poly(e.nvars()));
          std::size_t row = e.full_offset(i, j) + b * e.rank(k) + c;
          for (std::size_t x = 0; x < v.size(); ++x) v[x] = fm.at(row, x);
          if (a.embedding(j, b) * a.embedding(k, c) != a.embed_vector(v, i)) {
            rep.ok = false;
            rep.level_j = j;
            rep.level_k = k;
            rep.b = b;
            rep.c = c;
            return rep;
          }
        }
    }
  }
  return rep;
}

std::size_t quotient_dimension(const ChartAlgebra& a, int l) {
  auto target = monomials_of_degree(*a.signature(), l);
  std::map<GenList, std::size_t> index;
  for (std::size_t m = 0; m < target.size(); ++m) index[target[m]] = m;
  RatEchelon ech(target.size());
  const std::size_t nv = a.bundle().nvars();
  for (const auto& src : monomials_of_degree(*a.frame_signature(), l)) {
    GradedFunction f = a.reduce(GradedFunction::monomial(a.frame_signature(), src, Poly(nv, Rat(1))));
    std::map<std::size_t, Rat> row;
    for (const auto& [g, c] : f.terms()) row[index.at(g)] = c.constant_term();
    ech.add_row(std::move(row));
    if (ech.rank() == target.size()) break;
  }
  return ech.rank();
}

CoalgebraBundle coalgebra_of(const ChartAlgebra& a) {
  std::vector<std::size_t> counts;
  for (int i = 1; i <= a.signature()->n(); ++i) counts.push_back(a.signature()->count(i));
  return split_coalgebra(counts, a.signature()->base());
}

ChartMorphism identity_chart_morphism(const SigPtr& sig) {
  ChartMorphism m;
  m.source = sig;
  m.target = sig;
  for (std::size_t c = 0; c < sig->num_coordinates(); ++c) m.images.push_back(GradedFunction::coordinate(sig, c));
  return m;
}

ChartMorphism functor_on_morphism(const CoalgebraMorphism& phi, const ChartAlgebra& from, const ChartAlgebra& to) {
  if (!morphism_check(phi, from.bundle(), to.bundle()))
    throw GradmanError(ErrorKind::InvalidInput, "map does not intertwine the comultiplications");
  ChartMorphism m;
  m.source = to.signature();
  m.target = from.signature();
  const std::size_t nv = from.bundle().nvars();
  for (std::size_t b = 0; b < nv; ++b) m.images.push_back(GradedFunction::base_var(m.target, b));
  for (int i = 1; i <= to.n(); ++i) {
    for (std::size_t s = 0; s < to.signature()->count(i); ++s) {
      std::vector<Rat> z = to.coordinate_in_frame(i, s);
      std::vector<Poly> v(from.bundle().rank(i), Poly(nv));
      for (std::size_t a = 0; a < z.size(); ++a) {
        if (z[a] == 0) continue;
        for (std::size_t b = 0; b < v.size(); ++b) v[b] += phi.at(i).at(a, b) * z[a];
      }
      m.images.push_back(from.embed_vector(v, i));
    }
  }
  return m;
}

ChartMorphism compose_pullbacks(const ChartMorphism& psi_star, const ChartMorphism& phi_star) {
  if (*psi_star.target != *phi_star.source) throw GradmanError(ErrorKind::InvalidInput, "pullbacks are not composable");
  ChartMorphism m;
  m.source = psi_star.source;
  m.target = phi_star.target;
  for (const auto& img : psi_star.images) m.images.push_back(phi_star.pull(img));
  return m;
}

}  // namespace gradman
