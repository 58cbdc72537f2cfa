#include "gradman/exactnum.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace gradman {

Rat make_rat(long num, long den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Rat parse_rat(const std::string& text) {
  Rat r;
  if (text.empty() || r.set_str(text, 10) != 0)
    throw std::invalid_argument("bad rational literal: " + text);
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
  r.canonicalize();
  return r;
}

std::string rat_str(const Rat& r) { return r.get_str(); }

bool GrlexLess::operator()(const Exponent& a, const Exponent& b) const {
  int da = exponent_degree(a), db = exponent_degree(b);
  if (da != db) return da < db;
  return a < b;
}

int exponent_degree(const Exponent& e) {
  int d = 0;
  for (int v : e) d += v;
  return d;
}

Poly::Poly(std::size_t nvars) : nvars_(nvars) {}

Poly::Poly(std::size_t nvars, const Rat& c) : nvars_(nvars) {
  if (c != 0) terms_.emplace(Exponent(nvars, 0), c);
}

Poly Poly::variable(std::size_t nvars, std::size_t index) {
  if (index >= nvars) throw std::out_of_range("variable index");
  Exponent e(nvars, 0);
  e[index] = 1;
  return monomial(e, Rat(1));
}

Poly Poly::monomial(const Exponent& e, const Rat& c) {
  Poly p(e.size());
  p.add_term(e, c);
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && exponent_degree(terms_.begin()->first) == 0);
}

Rat Poly::constant_term() const {
  auto it = terms_.find(Exponent(nvars_, 0));
  return it == terms_.end() ? Rat(0) : it->second;
}

int Poly::total_degree() const {
  if (terms_.empty()) return -1;
  return exponent_degree(terms_.rbegin()->first);
}

const Exponent& Poly::leading_exponent() const {
  if (terms_.empty()) throw std::logic_error("leading exponent of zero");
  return terms_.rbegin()->first;
}

const Rat& Poly::leading_coeff() const {
  if (terms_.empty()) throw std::logic_error("leading coefficient of zero");
  return terms_.rbegin()->second;
}

void Poly::add_term(const Exponent& e, const Rat& c) {
  if (e.size() != nvars_) throw std::invalid_argument("exponent length mismatch");
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Poly::check_compatible(const Poly& o) const {
  if (nvars_ != o.nvars_) throw std::invalid_argument("polynomials over different base variable counts");
}

Poly& Poly::operator+=(const Poly& o) {
  check_compatible(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  check_compatible(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Poly& Poly::operator*=(const Rat& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  r += o;
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  r -= o;
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  check_compatible(o);
  Poly r(nvars_);
  Exponent e(nvars_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      for (std::size_t i = 0; i < nvars_; ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Poly Poly::operator*(const Rat& c) const {
  Poly r = *this;
  r *= c;
  return r;
}

Poly operator*(const Rat& c, const Poly& p) { return p * c; }

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [e, v] : r.terms_) v = -v;
  return r;
}

bool Poly::operator==(const Poly& o) const {
  if (terms_.empty() && o.terms_.empty()) return true;
  return nvars_ == o.nvars_ && terms_ == o.terms_;
}

bool Poly::operator<(const Poly& o) const {
  if (nvars_ != o.nvars_) return nvars_ < o.nvars_;
  auto a = terms_.begin(), b = o.terms_.begin();
  for (; a != terms_.end() && b != o.terms_.end(); ++a, ++b) {
    if (a->first != b->first) return GrlexLess()(a->first, b->first);
    if (a->second != b->second) return a->second < b->second;
  }
  return a == terms_.end() && b != o.terms_.end();
}

Poly Poly::derivative(std::size_t var) const {
  Poly r(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponent f = e;
    f[var] -= 1;
    r.add_term(f, c * e[var]);
  }
  return r;
}

Poly Poly::integral(std::size_t var) const {
  Poly r(nvars_);
  for (const auto& [e, c] : terms_) {
    Exponent f = e;
    f[var] += 1;
    r.add_term(f, c / Rat(f[var]));
  }
  return r;
}

Rat Poly::eval(const std::vector<Rat>& point) const {
  if (point.size() != nvars_) throw std::invalid_argument("point length mismatch");
  Rat sum = 0;
  for (const auto& [e, c] : terms_) {
    Rat t = c;
    for (std::size_t i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= point[i];
    sum += t;
  }
  return sum;
}

Poly Poly::pow(int k) const {
  Poly r(nvars_, Rat(1));
  for (int i = 0; i < k; ++i) r = r * *this;
  return r;
}

Poly Poly::compose(const std::vector<Poly>& images) const {
  if (images.size() != nvars_) throw std::invalid_argument("compose arity mismatch");
  std::size_t out = images.empty() ? 0 : images[0].nvars();
  Poly r(out);
  std::vector<std::vector<Poly>> powers(nvars_);
  for (const auto& [e, c] : terms_) {
    Poly t(out, c);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      auto& pw = powers[i];
      if (pw.empty()) pw.push_back(Poly(out, Rat(1)));
      while (static_cast<int>(pw.size()) <= e[i]) pw.push_back(pw.back() * images[i]);
      t = t * pw[e[i]];
    }
    r += t;
  }
  return r;
}

std::optional<Poly> Poly::divide_exact(const Poly& d) const {
  check_compatible(d);
  if (d.is_zero()) throw std::domain_error("division by zero polynomial");
  Poly rem = *this;
  Poly q(nvars_);
  const Exponent& ld = d.leading_exponent();
  const Rat& lc = d.leading_coeff();
  Exponent e(nvars_);
  while (!rem.is_zero()) {
    const Exponent& lr = rem.leading_exponent();
    for (std::size_t i = 0; i < nvars_; ++i) {
      e[i] = lr[i] - ld[i];
      if (e[i] < 0) return std::nullopt;
    }
    Poly t = monomial(e, rem.leading_coeff() / lc);
    q += t;
    rem -= t * d;
  }
  return q;
}

std::string Poly::str(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Rat a = abs(c);
    bool neg = c < 0;
    if (first) {
      if (neg) out << "-";
    } else {
      out << (neg ? " - " : " + ");
    }
    first = false;
    bool unit = exponent_degree(e) == 0;
    bool wrote = false;
    if (a != 1 || unit) {
      out << a.get_str();
      wrote = true;
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (wrote) out << "*";
      out << (i < names.size() ? names[i] : "x" + std::to_string(i));
      if (e[i] > 1) out << "^" << e[i];
      wrote = true;
    }
  }
  return out.str();
}

PolyMatrix PolyMatrix::identity(std::size_t n, std::size_t nvars) {
  PolyMatrix m(n, n, nvars);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Poly(nvars, Rat(1));
  return m;
}

PolyMatrix PolyMatrix::from_rat(const RatMatrix& r, std::size_t nvars) {
  PolyMatrix m(r.rows(), r.cols(), nvars);
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j) m.at(i, j) = Poly(nvars, r.at(i, j));
  return m;
}

bool PolyMatrix::is_constant() const {
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j)
      if (!at(i, j).is_constant()) return false;
  return true;
}

bool PolyMatrix::is_zero() const {
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j)
      if (!at(i, j).is_zero()) return false;
  return true;
}

RatMatrix PolyMatrix::evaluate(const std::vector<Rat>& point) const {
  RatMatrix m(rows(), cols(), Rat(0));
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j)
      if (!at(i, j).is_zero()) m.at(i, j) = at(i, j).eval(point);
  return m;
}

PolyMatrix PolyMatrix::operator*(const PolyMatrix& o) const {
  if (cols() != o.rows()) throw std::invalid_argument("matrix product shape mismatch");
  PolyMatrix r(rows(), o.cols(), nvars_);
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t k = 0; k < cols(); ++k) {
      if (at(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < o.cols(); ++j)
        if (!o.at(k, j).is_zero()) r.at(i, j) += at(i, k) * o.at(k, j);
    }
  return r;
}

PolyMatrix PolyMatrix::operator+(const PolyMatrix& o) const {
  if (rows() != o.rows() || cols() != o.cols()) throw std::invalid_argument("matrix sum shape mismatch");
  PolyMatrix r = *this;
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j) r.at(i, j) += o.at(i, j);
  return r;
}

PolyMatrix PolyMatrix::operator-(const PolyMatrix& o) const {
  if (rows() != o.rows() || cols() != o.cols()) throw std::invalid_argument("matrix difference shape mismatch");
  PolyMatrix r = *this;
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j) r.at(i, j) -= o.at(i, j);
  return r;
}

PolyMatrix PolyMatrix::transpose() const {
  PolyMatrix r(cols(), rows(), nvars_);
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j) r.at(j, i) = at(i, j);
  return r;
}

std::vector<Poly> PolyMatrix::column(std::size_t c) const {
  std::vector<Poly> v;
  v.reserve(rows());
  for (std::size_t i = 0; i < rows(); ++i) v.push_back(at(i, c));
  return v;
}

std::vector<Poly> PolyMatrix::apply(const std::vector<Poly>& v) const {
  if (v.size() != cols()) throw std::invalid_argument("matrix-vector shape mismatch");
  std::vector<Poly> r(rows(), Poly(nvars_));
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j)
      if (!at(i, j).is_zero() && !v[j].is_zero()) r[i] += at(i, j) * v[j];
  return r;
}

RatMatrix rat_identity(std::size_t n) {
  RatMatrix m(n, n, Rat(0));
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

RatMatrix rat_mul(const RatMatrix& a, const RatMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product shape mismatch");
  RatMatrix r(a.rows(), b.cols(), Rat(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a.at(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) r.at(i, j) += a.at(i, k) * b.at(k, j);
    }
  return r;
}

void RatEchelon::reduce(std::map<std::size_t, Rat>& row) const {
  auto it = row.begin();
  while (it != row.end()) {
    auto piv = rows_.find(it->first);
    if (piv == rows_.end()) {
      ++it;
      continue;
    }
    const Rat f = it->second;
    const std::size_t col = it->first;
    for (const auto& [c, v] : piv->second) {
      auto [jt, inserted] = row.emplace(c, -f * v);
      if (!inserted) {
        jt->second -= f * v;
        if (jt->second == 0) row.erase(jt);
      }
    }
    it = row.upper_bound(col);
  }
}

bool RatEchelon::add_row(std::map<std::size_t, Rat> row) {
  for (auto it = row.begin(); it != row.end();) it = it->second == 0 ? row.erase(it) : std::next(it);
  reduce(row);
  if (row.empty()) return false;
  std::size_t col = row.begin()->first;
  Rat lead = row.begin()->second;
  for (auto& [c, v] : row) v /= lead;
  for (auto& [pc, other] : rows_) {
    auto it = other.find(col);
    if (it == other.end()) continue;
    Rat f = it->second;
    for (const auto& [c, v] : row) {
      auto [jt, inserted] = other.emplace(c, -f * v);
      if (!inserted) {
        jt->second -= f * v;
        if (jt->second == 0) other.erase(jt);
      }
    }
  }
  rows_.emplace(col, std::move(row));
  return true;
}

bool RatEchelon::reduces_to_zero(std::map<std::size_t, Rat> row) const {
  for (auto it = row.begin(); it != row.end();) it = it->second == 0 ? row.erase(it) : std::next(it);
  reduce(row);
  return row.empty();
}

std::vector<std::size_t> RatEchelon::pivot_columns() const {
  std::vector<std::size_t> p;
  for (const auto& [c, r] : rows_) p.push_back(c);
  return p;
}

std::vector<std::vector<Rat>> RatEchelon::kernel_basis() const {
  std::vector<std::vector<Rat>> basis;
  for (std::size_t f = 0; f < ncols_; ++f) {
    if (rows_.count(f)) continue;
    std::vector<Rat> v(ncols_, Rat(0));
    v[f] = 1;
    for (const auto& [pc, row] : rows_) {
      auto it = row.find(f);
      if (it != row.end()) v[pc] = -it->second;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

namespace {

RatEchelon echelon_of(const RatMatrix& m) {
  RatEchelon e(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::map<std::size_t, Rat> row;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m.at(i, j) != 0) row.emplace(j, m.at(i, j));
    e.add_row(std::move(row));
  }
  return e;
}

// Lower is a better pivot: constants first, then sparse low-degree entries.
bool better_pivot(const Poly& a, const Poly& b) {
  int da = a.total_degree(), db = b.total_degree();
  if (da != db) return da < db;
  if (a.terms().size() != b.terms().size()) return a.terms().size() < b.terms().size();
  return GrlexLess()(a.leading_exponent(), b.leading_exponent());
}

}  // namespace

std::size_t rank(const RatMatrix& m) { return echelon_of(m).rank(); }

std::vector<std::vector<Rat>> kernel_basis(const RatMatrix& m) { return echelon_of(m).kernel_basis(); }

std::optional<RatMatrix> inverse(const RatMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
  std::size_t n = m.rows();
  RatMatrix a(n, 2 * n, Rat(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a.at(i, j) = m.at(i, j);
    a.at(i, n + i) = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a.at(p, c) == 0) ++p;
    if (p == n) return std::nullopt;
    if (p != c)
      for (std::size_t j = 0; j < 2 * n; ++j) std::swap(a.at(p, j), a.at(c, j));
    Rat inv = 1 / a.at(c, c);
    for (std::size_t j = 0; j < 2 * n; ++j) a.at(c, j) *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a.at(i, c) == 0) continue;
      Rat f = a.at(i, c);
      for (std::size_t j = 0; j < 2 * n; ++j) a.at(i, j) -= f * a.at(c, j);
    }
  }
  RatMatrix r(n, n, Rat(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r.at(i, j) = a.at(i, n + j);
  return r;
}

FFForm ff_gauss_jordan(const PolyMatrix& m, std::size_t pivot_limit) {
  FFForm out;
  out.R = m;
  PolyMatrix& A = out.R;
  const std::size_t nr = A.rows(), nc = A.cols(), nv = m.nvars();
  Poly prev(nv, Rat(1));
  std::vector<bool> col_used(nc, false);
  std::size_t r = 0;
  while (r < nr) {
    std::size_t bi = nr, bj = nc;
    for (std::size_t j = 0; j < std::min(nc, pivot_limit); ++j) {
      if (col_used[j]) continue;
      for (std::size_t i = r; i < nr; ++i) {
        const Poly& e = A.at(i, j);
        if (e.is_zero()) continue;
        if (bi == nr || better_pivot(e, A.at(bi, bj))) {
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == nr) break;
    if (bi != r)
      for (std::size_t j = 0; j < nc; ++j) std::swap(A.at(bi, j), A.at(r, j));
    Poly p = A.at(r, bj);
    for (std::size_t i = 0; i < nr; ++i) {
      if (i == r) continue;
      Poly f = A.at(i, bj);
      for (std::size_t j = 0; j < nc; ++j) {
        Poly t = p * A.at(i, j);
        if (!f.is_zero() && !A.at(r, j).is_zero()) t -= f * A.at(r, j);
        if (prev.is_constant()) {
          t *= 1 / prev.constant_term();
          A.at(i, j) = std::move(t);
        } else {
          auto q = t.divide_exact(prev);
          if (!q) throw std::logic_error("fraction-free elimination produced an inexact division");
          A.at(i, j) = std::move(*q);
        }
      }
    }
    prev = p;
    col_used[bj] = true;
    out.pivot_rows.push_back(r);
    out.pivot_cols.push_back(bj);
    ++r;
  }
  out.d = prev;
  return out;
}

std::vector<KernelVector> kernel_basis(const PolyMatrix& m) {
  const std::size_t nc = m.cols(), nv = m.nvars();
  if (m.is_constant()) {
    std::vector<KernelVector> out;
    for (auto& v : kernel_basis(m.evaluate(std::vector<Rat>(nv, Rat(0))))) {
      KernelVector kv;
      for (auto& x : v) kv.v.push_back(Poly(nv, x));
      out.push_back(std::move(kv));
    }
    return out;
  }
  FFForm ff = ff_gauss_jordan(m);
  std::vector<bool> is_pivot(nc, false);
  for (auto c : ff.pivot_cols) is_pivot[c] = true;
  std::vector<KernelVector> out;
  for (std::size_t f = 0; f < nc; ++f) {
    if (is_pivot[f]) continue;
    KernelVector kv;
    kv.v.assign(nc, Poly(nv));
    kv.v[f] = ff.d;
    for (std::size_t k = 0; k < ff.pivot_cols.size(); ++k) kv.v[ff.pivot_cols[k]] = -ff.R.at(ff.pivot_rows[k], f);
    std::vector<Poly> normalized;
    bool ok = true;
    for (const auto& x : kv.v) {
      auto q = x.divide_exact(ff.d);
      if (!q) {
        ok = false;
        break;
      }
      normalized.push_back(std::move(*q));
    }
    if (ok) kv.v = std::move(normalized);
    kv.polynomial = ok;
    out.push_back(std::move(kv));
  }
  return out;
}

std::size_t rank_generic(const PolyMatrix& m) {
  if (m.is_constant()) return rank(m.evaluate(std::vector<Rat>(m.nvars(), Rat(0))));
  return ff_gauss_jordan(m).pivot_cols.size();
}

std::size_t rank_at(const PolyMatrix& m, const std::vector<Rat>& point) { return rank(m.evaluate(point)); }

SolveResult solve(const PolyMatrix& m, const std::vector<Poly>& b) {
  if (b.size() != m.rows()) throw std::invalid_argument("right-hand side length mismatch");
  const std::size_t nc = m.cols(), nv = m.nvars();
  PolyMatrix aug(m.rows(), nc + 1, nv);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < nc; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, nc) = b[i];
  }
  SolveResult res;
  FFForm ff = ff_gauss_jordan(aug, nc);
  for (std::size_t i = ff.pivot_cols.size(); i < aug.rows(); ++i)
    if (!ff.R.at(i, nc).is_zero()) return res;
  res.consistent = true;
  res.denominator = ff.d;
  res.numerators.assign(nc, Poly(nv));
  for (std::size_t k = 0; k < ff.pivot_cols.size(); ++k) res.numerators[ff.pivot_cols[k]] = ff.R.at(ff.pivot_rows[k], nc);
  res.polynomial = true;
  for (const auto& num : res.numerators) {
    auto q = num.divide_exact(ff.d);
    if (!q) {
      res.polynomial = false;
      res.x.clear();
      break;
    }
    res.x.push_back(std::move(*q));
  }
  return res;
}

std::optional<PolyMatrix> inverse_polynomial(const PolyMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
  std::size_t n = m.rows(), nv = m.nvars();
  if (rank_generic(m) != n) return std::nullopt;
  PolyMatrix inv(n, n, nv);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<Poly> e(n, Poly(nv));
    e[c] = Poly(nv, Rat(1));
    SolveResult s = solve(m, e);
    if (!s.consistent || !s.polynomial) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i) inv.at(i, c) = s.x[i];
  }
  return inv;
}

}  // namespace gradman
