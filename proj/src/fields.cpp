#include "gradman/fields.hpp"

#include <sstream>

namespace gradman {

namespace {

std::size_t level_rank(const CoalgebraBundle& e, int level) { return level == 0 ? 1 : e.rank(level); }

std::vector<Poly> unit(std::size_t size, std::size_t index, std::size_t nv) {
  std::vector<Poly> v(size, Poly(nv));
  v[index] = Poly(nv, Rat(1));
  return v;
}

void axpy(std::vector<Poly>& acc, const Poly& s, const std::vector<Poly>& v) {
  if (s.is_zero()) return;
  for (std::size_t a = 0; a < v.size(); ++a)
    if (!v[a].is_zero()) acc[a] += s * v[a];
}

// m(u, w) for u at level j and w at level l, j + l <= n; level 0 is scalar.
std::vector<Poly> product(const CoalgebraBundle& e, int j, const std::vector<Poly>& u, int l, const std::vector<Poly>& w) {
  const std::size_t nv = e.nvars();
  if (j == 0) {
    std::vector<Poly> out(w.size(), Poly(nv));
    axpy(out, u[0], w);
    return out;
  }
  if (l == 0) {
    std::vector<Poly> out(u.size(), Poly(nv));
    axpy(out, w[0], u);
    return out;
  }
  std::vector<Poly> out(e.rank(j + l), Poly(nv));
  for (std::size_t b = 0; b < u.size(); ++b) {
    if (u[b].is_zero()) continue;
    for (std::size_t c = 0; c < w.size(); ++c) {
      if (w[c].is_zero()) continue;
      axpy(out, u[b] * w[c], mu_star(e, j, b, l, c));
    }
  }
  return out;
}

Poly symbol_apply(const std::vector<Poly>& symbol, const Poly& f) {
  Poly r(f.nvars());
  for (std::size_t a = 0; a < symbol.size(); ++a)
    if (!symbol[a].is_zero()) r += symbol[a] * f.derivative(a);
  return r;
}

std::vector<Poly> unembed_level(const ChartAlgebra& a, const GradedFunction& f, int level) {
  if (level == 0) {
    if (f != f.component(0))
      throw GradmanError(ErrorKind::InvalidInput, "function is not of degree 0");
    return {f.body()};
  }
  return a.unembed(f, level);
}

GradedFunction embed_level(const ChartAlgebra& a, const std::vector<Poly>& v, int level) {
  if (level == 0) return GradedFunction::from_poly(a.signature(), v.at(0));
  return a.embed_vector(v, level);
}

}  // namespace

VectorField::VectorField(SigPtr sig, int degree) : sig_(std::move(sig)), degree_(degree) {
  action_.assign(sig_->num_coordinates(), GradedFunction(sig_));
}

VectorField VectorField::coordinate_field(SigPtr sig, std::size_t c) {
  VectorField x(sig, -sig->coordinate_degree(c));
  x.set_action(c, GradedFunction::constant(sig, Rat(1)));
  return x;
}

void VectorField::set_action(std::size_t c, GradedFunction value) {
  if (c >= action_.size()) throw GradmanError(ErrorKind::InvalidInput, "coordinate index out of range");
  if (!value.is_zero()) {
    int want = sig_->coordinate_degree(c) + degree_;
    auto d = value.degree();
    if (!d || *d != want)
      throw GradmanError(ErrorKind::InvalidInput, "action on " + sig_->coordinate_names()[c] + " must have degree " +
                                                      std::to_string(want));
  }
  action_[c] = std::move(value);
}

GradedFunction VectorField::apply(const GradedFunction& f) const {
  if (f.sig() != sig_ && *f.sig() != *sig_) throw GradmanError(ErrorKind::InvalidInput, "signature mismatch");
  const std::size_t m0 = sig_->m0();
  GradedFunction out(sig_);
  const Poly one(m0, Rat(1));
  for (const auto& [g, p] : f.terms()) {
    GradedFunction mono = GradedFunction::monomial(sig_, g, one);
    for (std::size_t a = 0; a < m0; ++a) {
      if (action_[a].is_zero()) continue;
      Poly dp = p.derivative(a);
      if (!dp.is_zero()) out += action_[a].scale(dp) * mono;
    }
    int before = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const GradedFunction& xg = action_[m0 + std::size_t(g[i])];
      if (!xg.is_zero()) {
        GradedFunction left = GradedFunction::monomial(sig_, GenList(g.begin(), g.begin() + long(i)), p);
        GradedFunction right = GradedFunction::monomial(sig_, GenList(g.begin() + long(i) + 1, g.end()), one);
        GradedFunction t = left * xg * right;
        if ((long(degree_) * before) % 2) out -= t;
        else out += t;
      }
      before += sig_->degree(g[i]);
    }
  }
  return out;
}

void VectorField::check_compatible(const VectorField& o) const {
  if (degree_ != o.degree_) throw GradmanError(ErrorKind::InvalidInput, "vector fields have different degrees");
  if (sig_ != o.sig_ && *sig_ != *o.sig_) throw GradmanError(ErrorKind::InvalidInput, "signature mismatch");
}

VectorField VectorField::operator+(const VectorField& o) const {
  check_compatible(o);
  VectorField r = *this;
  for (std::size_t c = 0; c < action_.size(); ++c) r.action_[c] += o.action_[c];
  return r;
}

VectorField VectorField::operator-(const VectorField& o) const {
  check_compatible(o);
  VectorField r = *this;
  for (std::size_t c = 0; c < action_.size(); ++c) r.action_[c] -= o.action_[c];
  return r;
}

VectorField VectorField::operator*(const Rat& c) const {
  VectorField r = *this;
  for (auto& a : r.action_) a = a * c;
  return r;
}

bool VectorField::operator==(const VectorField& o) const {
  if (is_zero() && o.is_zero()) return *sig_ == *o.sig_;
  return degree_ == o.degree_ && *sig_ == *o.sig_ && action_ == o.action_;
}

bool VectorField::is_zero() const {
  for (const auto& a : action_)
    if (!a.is_zero()) return false;
  return true;
}

std::string VectorField::str() const {
  std::ostringstream out;
  auto names = sig_->coordinate_names();
  bool first = true;
  for (std::size_t c = 0; c < action_.size(); ++c) {
    if (action_[c].is_zero()) continue;
    if (!first) out << "; ";
    first = false;
    out << "d/d" << names[c] << " = " << action_[c].str();
  }
  return first ? "0" : out.str();
}

VectorField times(const GradedFunction& f, const VectorField& x) {
  if (f.is_zero()) return VectorField(x.sig(), x.degree());
  auto d = f.degree();
  if (!d) throw GradmanError(ErrorKind::InvalidInput, "coefficient is not homogeneous");
  VectorField r(x.sig(), x.degree() + *d);
  for (std::size_t c = 0; c < x.actions().size(); ++c) r.set_action(c, f * x.action(c));
  return r;
}

VectorField bracket(const VectorField& x, const VectorField& y) {
  if (*x.sig() != *y.sig()) throw GradmanError(ErrorKind::InvalidInput, "signature mismatch");
  VectorField r(x.sig(), x.degree() + y.degree());
  const bool minus = (long(x.degree()) * y.degree()) % 2 == 0;
  for (std::size_t c = 0; c < x.actions().size(); ++c) {
    GradedFunction xy = x.apply(y.action(c)), yx = y.apply(x.action(c));
    r.set_action(c, minus ? xy - yx : xy + yx);
  }
  return r;
}

TangentVector tangent_at(const VectorField& x, const std::vector<Rat>& point) {
  TangentVector t;
  t.point = point;
  for (const auto& a : x.actions()) t.components.push_back(a.body_eval(point));
  return t;
}

bool linearly_independent(const std::vector<VectorField>& fields, const std::vector<std::vector<Rat>>& points) {
  if (fields.empty()) return true;
  for (const auto& p : points) {
    const std::size_t nc = fields[0].sig()->num_coordinates();
    RatMatrix m(fields.size(), nc, Rat(0));
    for (std::size_t r = 0; r < fields.size(); ++r) {
      auto t = tangent_at(fields[r], p);
      for (std::size_t c = 0; c < nc; ++c) m.at(r, c) = t.components[c];
    }
    if (rank(m) < fields.size()) return false;
  }
  return true;
}

bool is_homological(const VectorField& q) {
  if (q.degree() != 1) throw GradmanError(ErrorKind::InvalidInput, "homological fields have degree 1");
  return bracket(q, q).is_zero();
}

CompatDerivation to_compat_derivation(const VectorField& x, const ChartAlgebra& a) {
  if (x.degree() > 0) throw GradmanError(ErrorKind::InvalidInput, "compatible derivations have non-positive degree");
  if (*x.sig() != *a.signature()) throw GradmanError(ErrorKind::InvalidInput, "field is not on the chart of this bundle");
  const CoalgebraBundle& e = a.bundle();
  const std::size_t nv = e.nvars();
  const int k = x.degree();
  CompatDerivation d;
  d.degree = k;
  for (int i = 0; i <= e.n(); ++i) {
    int t = i + k;
    if (t < 0) {
      d.d.emplace_back();
      continue;
    }
    PolyMatrix m(level_rank(e, t), level_rank(e, i), nv);
    if (i > 0) {
      for (std::size_t c = 0; c < e.rank(i); ++c) {
        auto col = unembed_level(a, x.apply(a.embedding(i, c)), t);
        for (std::size_t r = 0; r < col.size(); ++r) m.at(r, c) = col[r];
      }
    }
    d.d.push_back(std::move(m));
  }
  if (k == 0)
    for (std::size_t b = 0; b < nv; ++b) d.symbol.push_back(x.action(b).body());
  return d;
}

VectorField from_compat_derivation(const CompatDerivation& d, const ChartAlgebra& a) {
  const CoalgebraBundle& e = a.bundle();
  const std::size_t nv = e.nvars();
  const SigPtr& sig = a.signature();
  VectorField x(sig, d.degree);
  if (d.degree == 0)
    for (std::size_t b = 0; b < nv; ++b) x.set_action(b, GradedFunction::from_poly(sig, d.symbol.at(b)));
  std::size_t c = nv;
  for (int i = 1; i <= e.n(); ++i) {
    int t = i + d.degree;
    for (std::size_t s = 0; s < sig->count(i); ++s, ++c) {
      if (t < 0) continue;
      auto z = a.coordinate_in_frame(i, s);
      std::vector<Poly> v(level_rank(e, t), Poly(nv));
      for (std::size_t col = 0; col < z.size(); ++col)
        if (z[col] != 0)
          for (std::size_t r = 0; r < v.size(); ++r) v[r] += d.d[std::size_t(i)].at(r, col) * z[col];
      x.set_action(c, embed_level(a, v, t));
    }
  }
  return x;
}

std::vector<Poly> apply_compat(const CompatDerivation& d, const CoalgebraBundle& e, int level, const std::vector<Poly>& v) {
  const std::size_t nv = e.nvars();
  const int t = level + d.degree;
  if (t < 0) return {};
  std::vector<Poly> out(level_rank(e, t), Poly(nv));
  const PolyMatrix& m = d.d.at(std::size_t(level));
  for (std::size_t c = 0; c < v.size(); ++c) {
    if (v[c].is_zero()) continue;
    for (std::size_t r = 0; r < out.size(); ++r)
      if (!m.at(r, c).is_zero()) out[r] += v[c] * m.at(r, c);
  }
  if (!d.symbol.empty())
    for (std::size_t c = 0; c < v.size(); ++c) out[c] += symbol_apply(d.symbol, v[c]);
  return out;
}

bool compat_check(const CompatDerivation& d, const CoalgebraBundle& e) {
  const int n = e.n(), k = d.degree;
  const std::size_t nv = e.nvars();
  for (int j = 1; j <= n; ++j)
    for (int l = 1; j + l <= n; ++l)
      for (std::size_t b = 0; b < e.rank(j); ++b)
        for (std::size_t c = 0; c < e.rank(l); ++c) {
          auto ub = unit(e.rank(j), b, nv), uc = unit(e.rank(l), c, nv);
          auto lhs = apply_compat(d, e, j + l, mu_star(e, j, b, l, c));
          if (j + l + k < 0) continue;
          std::vector<Poly> rhs(lhs.size(), Poly(nv));
          if (j + k >= 0) axpy(rhs, Poly(nv, Rat(1)), product(e, j + k, apply_compat(d, e, j, ub), l, uc));
          if (l + k >= 0) {
            Poly s(nv, Rat((long(k) * j) % 2 ? -1 : 1));
            axpy(rhs, s, product(e, j, ub, l + k, apply_compat(d, e, l, uc)));
          }
          if (lhs != rhs) return false;
        }
  return true;
}

CompatDerivation bracket(const CompatDerivation& x, const CompatDerivation& y, const CoalgebraBundle& e) {
  const std::size_t nv = e.nvars();
  CompatDerivation r;
  r.degree = x.degree + y.degree;
  const bool minus = (long(x.degree) * y.degree) % 2 == 0;
  for (int i = 0; i <= e.n(); ++i) {
    int t = i + r.degree;
    if (t < 0) {
      r.d.emplace_back();
      continue;
    }
    PolyMatrix m(level_rank(e, t), level_rank(e, i), nv);
    if (i > 0) {
      for (std::size_t c = 0; c < e.rank(i); ++c) {
        auto u = unit(e.rank(i), c, nv);
        std::vector<Poly> col(level_rank(e, t), Poly(nv));
        auto yu = apply_compat(y, e, i, u);
        if (!yu.empty()) col = apply_compat(x, e, i + y.degree, yu);
        auto xu = apply_compat(x, e, i, u);
        if (!xu.empty()) {
          auto yx = apply_compat(y, e, i + x.degree, xu);
          axpy(col, Poly(nv, Rat(minus ? -1 : 1)), yx);
        }
        for (std::size_t row = 0; row < col.size(); ++row) m.at(row, c) = col[row];
      }
    }
    r.d.push_back(std::move(m));
  }
  if (r.degree == 0) {
    r.symbol.assign(nv, Poly(nv));
    if (!x.symbol.empty() && !y.symbol.empty())
      for (std::size_t b = 0; b < nv; ++b) r.symbol[b] = symbol_apply(x.symbol, y.symbol[b]) - symbol_apply(y.symbol, x.symbol[b]);
  }
  return r;
}

CompatDerivation theta(const CoalgebraBundle& e, int level, const std::vector<Poly>& elem, const CompatDerivation& d) {
  const int k = d.degree + level;
  if (k > 0) throw GradmanError(ErrorKind::InvalidInput, "theta lands in positive degree");
  const std::size_t nv = e.nvars();
  CompatDerivation r;
  r.degree = k;
  for (int j = 0; j <= e.n(); ++j) {
    int t = j + k;
    if (t < 0) {
      r.d.emplace_back();
      continue;
    }
    PolyMatrix m(level_rank(e, t), level_rank(e, j), nv);
    if (j > 0 && j + d.degree >= 0) {
      for (std::size_t c = 0; c < e.rank(j); ++c) {
        auto col = product(e, level, elem, j + d.degree, apply_compat(d, e, j, unit(e.rank(j), c, nv)));
        for (std::size_t row = 0; row < col.size(); ++row) m.at(row, c) = col[row];
      }
    }
    r.d.push_back(std::move(m));
  }
  if (k == 0) r.symbol.assign(nv, Poly(nv));
  return r;
}

std::size_t top_degree_compat_dimension(const CoalgebraBundle& e) {
  const int n = e.n();
  if (n == 0) return 0;
  std::vector<std::vector<Poly>> rows;
  for (int j = 1; j < n; ++j)
    for (std::size_t b = 0; b < e.rank(j); ++b)
      for (std::size_t c = 0; c < e.rank(n - j); ++c) rows.push_back(mu_star(e, j, b, n - j, c));
  if (rows.empty()) return e.rank(n);
  PolyMatrix m(rows.size(), e.rank(n), e.nvars());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t a = 0; a < e.rank(n); ++a) m.at(r, a) = rows[r][a];
  return kernel_basis(m).size();
}

namespace {

// Old coordinate index -> truncated coordinate index, or -1.
std::vector<long> truncation_map(const GradedSignature& sig, const GradedSignature& t) {
  std::vector<long> map;
  for (std::size_t b = 0; b < sig.m0(); ++b) map.push_back(long(b));
  for (const auto& g : sig.gens()) {
    auto id = t.find_gen(g.name);
    map.push_back(id ? long(t.m0()) + *id : -1);
  }
  return map;
}

}  // namespace

VectorField restrict_truncation(const VectorField& x, int r) {
  if (x.degree() > 0) throw GradmanError(ErrorKind::InvalidInput, "restriction needs a non-positive degree field");
  SigPtr t = std::make_shared<const GradedSignature>(x.sig()->truncated(r));
  auto map = truncation_map(*x.sig(), *t);
  std::vector<GradedFunction> images;
  for (long m : map) images.push_back(m < 0 ? GradedFunction(t) : GradedFunction::coordinate(t, std::size_t(m)));
  VectorField out(t, x.degree());
  for (std::size_t c = 0; c < map.size(); ++c)
    if (map[c] >= 0) out.set_action(std::size_t(map[c]), x.action(c).substitute(images, t));
  return out;
}

VectorField assemble_from_truncation(const VectorField& restricted, const std::vector<GradedFunction>& top_actions,
                                     const SigPtr& sig, int degree) {
  auto map = truncation_map(*sig, *restricted.sig());
  std::vector<GradedFunction> images;
  std::vector<std::size_t> inverse(restricted.sig()->num_coordinates());
  for (std::size_t c = 0; c < map.size(); ++c)
    if (map[c] >= 0) inverse[std::size_t(map[c])] = c;
  for (std::size_t c : inverse) images.push_back(GradedFunction::coordinate(sig, c));
  VectorField x(sig, degree);
  std::size_t top = 0;
  for (std::size_t c = 0; c < map.size(); ++c) {
    if (map[c] >= 0)
      x.set_action(c, restricted.action(std::size_t(map[c])).substitute(images, sig));
    else
      x.set_action(c, top_actions.at(top++));
  }
  return x;
}

}  // namespace gradman
