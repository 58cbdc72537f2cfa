#include "gradman/gradedring.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gradman {

GradedSignature::GradedSignature(std::vector<std::string> base, std::vector<Generator> gens, int n, int max_degree)
    : base_(std::move(base)), gens_(std::move(gens)) {
  std::set<std::string> seen;
  for (const auto& b : base_)
    if (!seen.insert(b).second) throw std::invalid_argument("duplicate coordinate name: " + b);
  int top = 0;
  for (const auto& g : gens_) {
    if (g.degree < 1) throw std::invalid_argument("generator degree must be positive: " + g.name);
    if (!seen.insert(g.name).second) throw std::invalid_argument("duplicate coordinate name: " + g.name);
    top = std::max(top, g.degree);
  }
  std::stable_sort(gens_.begin(), gens_.end(), [](const Generator& a, const Generator& b) { return a.degree < b.degree; });
  if (n >= 0 && n < top) throw std::invalid_argument("degree bound below a generator degree");
  n_ = std::max(n, top);
  max_degree_ = max_degree >= 0 ? max_degree : 3 * n_;
}

std::size_t GradedSignature::count(int degree) const {
  std::size_t c = 0;
  for (const auto& g : gens_) c += g.degree == degree;
  return c;
}

std::vector<int> GradedSignature::gens_of_degree(int degree) const {
  std::vector<int> ids;
  for (std::size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].degree == degree) ids.push_back(static_cast<int>(i));
  return ids;
}

std::optional<int> GradedSignature::find_gen(const std::string& name) const {
  for (std::size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<std::size_t> GradedSignature::find_base(const std::string& name) const {
  for (std::size_t i = 0; i < base_.size(); ++i)
    if (base_[i] == name) return i;
  return std::nullopt;
}

std::vector<std::string> GradedSignature::coordinate_names() const {
  std::vector<std::string> names = base_;
  for (const auto& g : gens_) names.push_back(g.name);
  return names;
}

int GradedSignature::coordinate_degree(std::size_t c) const {
  if (c < base_.size()) return 0;
  return gens_.at(c - base_.size()).degree;
}

GradedSignature GradedSignature::truncated(int r) const {
  std::vector<Generator> kept;
  for (const auto& g : gens_)
    if (g.degree <= r) kept.push_back(g);
  return GradedSignature(base_, kept, std::min(r, n_));
}

bool GradedSignature::operator==(const GradedSignature& o) const {
  return base_ == o.base_ && gens_ == o.gens_ && n_ == o.n_;
}

SigPtr make_signature(std::vector<std::string> base, std::vector<Generator> gens, int n, int max_degree) {
  return std::make_shared<const GradedSignature>(std::move(base), std::move(gens), n, max_degree);
}

Normalized normalize(const GradedSignature& sig, const GenList& gens) {
  Normalized out;
  for (int id : gens)
    if (id < 0 || static_cast<std::size_t>(id) >= sig.num_gens())
      throw std::out_of_range("unknown generator id " + std::to_string(id));
  out.gens = gens;
  int inversions = 0;
  for (std::size_t i = 1; i < out.gens.size(); ++i) {
    int v = out.gens[i];
    std::size_t j = i;
    while (j > 0 && out.gens[j - 1] > v) {
      if (sig.odd(v) && sig.odd(out.gens[j - 1])) ++inversions;
      out.gens[j] = out.gens[j - 1];
      --j;
    }
    out.gens[j] = v;
  }
  for (std::size_t i = 1; i < out.gens.size(); ++i)
    if (out.gens[i] == out.gens[i - 1] && sig.odd(out.gens[i])) {
      out.sign = 0;
      out.gens.clear();
      return out;
    }
  out.sign = inversions % 2 ? -1 : 1;
  return out;
}

int gen_list_degree(const GradedSignature& sig, const GenList& gens) {
  int d = 0;
  for (int id : gens) d += sig.degree(id);
  return d;
}

Normalized multiply_gen_lists(const GradedSignature& sig, const GenList& a, const GenList& b) {
  Normalized out;
  out.gens.reserve(a.size() + b.size());
  // Each odd generator of b passes the odd generators of a that are larger.
  std::size_t i = 0, j = 0;
  int odd_remaining_a = 0;
  for (int id : a) odd_remaining_a += sig.odd(id);
  int swaps = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      if (j < b.size() && a[i] == b[j] && sig.odd(a[i])) {
        out.sign = 0;
        out.gens.clear();
        return out;
      }
      odd_remaining_a -= sig.odd(a[i]);
      out.gens.push_back(a[i++]);
    } else {
      if (sig.odd(b[j])) swaps += odd_remaining_a;
      out.gens.push_back(b[j++]);
    }
  }
  out.sign = swaps % 2 ? -1 : 1;
  return out;
}

std::vector<GenList> monomials_of_degree(const GradedSignature& sig, int l) {
  std::vector<GenList> out;
  GenList cur;
  const int ng = static_cast<int>(sig.num_gens());
  auto rec = [&](auto&& self, int start, int remaining) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int id = start; id < ng; ++id) {
      int d = sig.degree(id);
      if (d > remaining) break;
      cur.push_back(id);
      self(self, sig.odd(id) ? id + 1 : id, remaining - d);
      cur.pop_back();
    }
  };
  if (l >= 0) rec(rec, 0, l);
  std::sort(out.begin(), out.end());
  return out;
}

GradedFunction::GradedFunction(SigPtr sig) : sig_(std::move(sig)) {}

GradedFunction GradedFunction::constant(SigPtr sig, const Rat& c) {
  std::size_t m0 = sig->m0();
  GradedFunction f(std::move(sig));
  if (c != 0) f.terms_.emplace(GenList{}, Poly(m0, c));
  return f;
}

GradedFunction GradedFunction::from_poly(SigPtr sig, const Poly& p) {
  if (p.nvars() != sig->m0() && !p.is_zero()) throw std::invalid_argument("coefficient variable count mismatch");
  GradedFunction f(std::move(sig));
  if (!p.is_zero()) f.terms_.emplace(GenList{}, p);
  return f;
}

GradedFunction GradedFunction::generator(SigPtr sig, int id) {
  std::size_t m0 = sig->m0();
  GradedFunction f(std::move(sig));
  f.add_term(GenList{id}, Poly(m0, Rat(1)));
  return f;
}

GradedFunction GradedFunction::base_var(SigPtr sig, std::size_t index) {
  std::size_t m0 = sig->m0();
  return from_poly(std::move(sig), Poly::variable(m0, index));
}

GradedFunction GradedFunction::coordinate(SigPtr sig, std::size_t c) {
  if (c < sig->m0()) return base_var(std::move(sig), c);
  int id = static_cast<int>(c - sig->m0());
  return generator(std::move(sig), id);
}

GradedFunction GradedFunction::monomial(SigPtr sig, const GenList& gens, const Poly& coeff) {
  GradedFunction f(std::move(sig));
  f.add_term(gens, coeff);
  return f;
}

void GradedFunction::add_term(const GenList& gens, const Poly& coeff) {
  if (coeff.is_zero()) return;
  if (coeff.nvars() != sig_->m0()) throw std::invalid_argument("coefficient variable count mismatch");
  Normalized n = normalize(*sig_, gens);
  if (n.sign == 0) return;
  auto it = terms_.find(n.gens);
  if (it == terms_.end()) {
    terms_.emplace(std::move(n.gens), n.sign > 0 ? coeff : -coeff);
    return;
  }
  if (n.sign > 0)
    it->second += coeff;
  else
    it->second -= coeff;
  if (it->second.is_zero()) terms_.erase(it);
}

void GradedFunction::check_sig(const GradedFunction& o) const {
  if (sig_ == o.sig_) return;
  if (!sig_ || !o.sig_ || *sig_ != *o.sig_) throw std::invalid_argument("signature mismatch");
}

GradedFunction& GradedFunction::operator+=(const GradedFunction& o) {
  check_sig(o);
  for (const auto& [g, c] : o.terms_) {
    auto it = terms_.find(g);
    if (it == terms_.end()) {
      terms_.emplace(g, c);
      continue;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
  return *this;
}

GradedFunction& GradedFunction::operator-=(const GradedFunction& o) {
  check_sig(o);
  for (const auto& [g, c] : o.terms_) {
    auto it = terms_.find(g);
    if (it == terms_.end()) {
      terms_.emplace(g, -c);
      continue;
    }
    it->second -= c;
    if (it->second.is_zero()) terms_.erase(it);
  }
  return *this;
}

GradedFunction GradedFunction::operator+(const GradedFunction& o) const {
  GradedFunction r = *this;
  r += o;
  return r;
}

GradedFunction GradedFunction::operator-(const GradedFunction& o) const {
  GradedFunction r = *this;
  r -= o;
  return r;
}

GradedFunction GradedFunction::operator*(const GradedFunction& o) const {
  check_sig(o);
  GradedFunction r(sig_);
  for (const auto& [ga, ca] : terms_) {
    for (const auto& [gb, cb] : o.terms_) {
      Normalized n = multiply_gen_lists(*sig_, ga, gb);
      if (n.sign == 0) continue;
      Poly c = ca * cb;
      if (c.is_zero()) continue;
      auto it = r.terms_.find(n.gens);
      if (it == r.terms_.end()) {
        r.terms_.emplace(std::move(n.gens), n.sign > 0 ? std::move(c) : -c);
        continue;
      }
      if (n.sign > 0)
        it->second += c;
      else
        it->second -= c;
      if (it->second.is_zero()) r.terms_.erase(it);
    }
  }
  return r;
}

GradedFunction GradedFunction::operator*(const Rat& c) const {
  GradedFunction r(sig_);
  if (c == 0) return r;
  r.terms_ = terms_;
  for (auto& [g, p] : r.terms_) p *= c;
  return r;
}

GradedFunction operator*(const Rat& c, const GradedFunction& f) { return f * c; }

GradedFunction GradedFunction::operator-() const { return *this * Rat(-1); }

bool GradedFunction::operator==(const GradedFunction& o) const {
  if (terms_.empty() && o.terms_.empty()) return true;
  if (sig_ != o.sig_ && (!sig_ || !o.sig_ || *sig_ != *o.sig_)) return false;
  return terms_ == o.terms_;
}

GradedFunction GradedFunction::scale(const Poly& p) const {
  GradedFunction r(sig_);
  if (p.is_zero()) return r;
  for (const auto& [g, c] : terms_) {
    Poly q = c * p;
    if (!q.is_zero()) r.terms_.emplace(g, std::move(q));
  }
  return r;
}

bool GradedFunction::is_homogeneous() const {
  std::optional<int> d;
  for (const auto& [g, c] : terms_) {
    int k = gen_list_degree(*sig_, g);
    if (d && *d != k) return false;
    d = k;
  }
  return true;
}

std::optional<int> GradedFunction::degree() const {
  if (terms_.empty() || !is_homogeneous()) return std::nullopt;
  return gen_list_degree(*sig_, terms_.begin()->first);
}

GradedFunction GradedFunction::component(int l) const {
  GradedFunction r(sig_);
  for (const auto& [g, c] : terms_)
    if (gen_list_degree(*sig_, g) == l) r.terms_.emplace(g, c);
  return r;
}

Poly GradedFunction::body() const {
  auto it = terms_.find(GenList{});
  return it == terms_.end() ? Poly(sig_ ? sig_->m0() : 0) : it->second;
}

Rat GradedFunction::body_eval(const std::vector<Rat>& point) const { return body().eval(point); }

int GradedFunction::max_term_degree() const {
  int d = -1;
  for (const auto& [g, c] : terms_) d = std::max(d, gen_list_degree(*sig_, g));
  return d;
}

GradedFunction GradedFunction::d_base(std::size_t index) const {
  GradedFunction r(sig_);
  for (const auto& [g, c] : terms_) {
    Poly q = c.derivative(index);
    if (!q.is_zero()) r.terms_.emplace(g, std::move(q));
  }
  return r;
}

GradedFunction GradedFunction::d_gen(int id) const {
  GradedFunction r(sig_);
  const bool odd = sig_->odd(id);
  for (const auto& [g, c] : terms_) {
    auto first = std::find(g.begin(), g.end(), id);
    if (first == g.end()) continue;
    std::size_t pos = static_cast<std::size_t>(first - g.begin());
    std::size_t mult = static_cast<std::size_t>(std::count(g.begin(), g.end(), id));
    GenList rest = g;
    rest.erase(rest.begin() + static_cast<long>(pos));
    Poly coeff = c;
    if (odd) {
      int before = 0;
      for (std::size_t i = 0; i < pos; ++i) before += sig_->degree(g[i]);
      if (before % 2) coeff = -coeff;
    } else {
      coeff *= Rat(static_cast<long>(mult));
    }
    auto it = r.terms_.find(rest);
    if (it == r.terms_.end()) {
      r.terms_.emplace(std::move(rest), std::move(coeff));
    } else {
      it->second += coeff;
      if (it->second.is_zero()) r.terms_.erase(it);
    }
  }
  return r;
}

GradedFunction GradedFunction::substitute(const std::vector<GradedFunction>& images, const SigPtr& target) const {
  if (images.size() != sig_->num_coordinates()) throw std::invalid_argument("substitution table size mismatch");
  const std::size_t m0 = sig_->m0();
  bool base_identity = target->m0() == m0;
  for (std::size_t a = 0; a < m0 && base_identity; ++a)
    base_identity = images[a] == GradedFunction::base_var(target, a);
  std::map<std::pair<std::size_t, int>, GradedFunction> power_cache;
  auto base_power = [&](std::size_t a, int k) -> const GradedFunction& {
    auto key = std::make_pair(a, k);
    auto it = power_cache.find(key);
    if (it != power_cache.end()) return it->second;
    GradedFunction p = GradedFunction::constant(target, Rat(1));
    for (int i = 0; i < k; ++i) p = p * images[a];
    return power_cache.emplace(key, std::move(p)).first->second;
  };
  GradedFunction result(target);
  for (const auto& [g, c] : terms_) {
    GradedFunction coeff(target);
    if (base_identity) {
      coeff = GradedFunction::from_poly(target, c);
    } else {
      for (const auto& [e, v] : c.terms()) {
        GradedFunction t = GradedFunction::constant(target, v);
        for (std::size_t a = 0; a < m0; ++a)
          if (e[a]) t = t * base_power(a, e[a]);
        coeff += t;
      }
    }
    GradedFunction prod = coeff;
    for (int id : g) {
      if (prod.is_zero()) break;
      prod = prod * images[m0 + static_cast<std::size_t>(id)];
    }
    result += prod;
  }
  return result;
}

std::string GradedFunction::str() const {
  if (terms_.empty()) return "0";
  std::vector<const std::pair<const GenList, Poly>*> order;
  for (const auto& t : terms_) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [&](auto* a, auto* b) {
    int da = gen_list_degree(*sig_, a->first), db = gen_list_degree(*sig_, b->first);
    if (da != db) return da < db;
    return a->first < b->first;
  });
  std::ostringstream out;
  bool first = true;
  for (auto* t : order) {
    const GenList& g = t->first;
    std::string gens;
    for (std::size_t i = 0; i < g.size();) {
      std::size_t j = i;
      while (j < g.size() && g[j] == g[i]) ++j;
      if (!gens.empty()) gens += "*";
      gens += sig_->gen(g[i]).name;
      if (j - i > 1) gens += "^" + std::to_string(j - i);
      i = j;
    }
    const Poly& c = t->second;
    std::string cs = c.str(sig_->base());
    bool single = c.terms().size() == 1;
    bool neg = single && c.leading_coeff() < 0;
    if (neg) cs = (-c).str(sig_->base());
    if (!first) out << (neg ? " - " : " + ");
    else if (neg) out << "-";
    first = false;
    if (gens.empty()) {
      out << (single ? cs : "(" + cs + ")");
    } else if (single && cs == "1") {
      out << gens;
    } else {
      out << (single ? cs : "(" + cs + ")") << "*" << gens;
    }
  }
  return out.str();
}

}  // namespace gradman
