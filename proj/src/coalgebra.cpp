#include "gradman/coalgebra.hpp"

#include <map>
#include <sstream>
#include <tuple>

#include "gradman/gradedring.hpp"

namespace gradman {

namespace {

using Slot = std::pair<int, int>;  // (level, frame index)
using TensorKey = std::vector<Slot>;
using Tensor = std::map<TensorKey, Poly>;

int koszul(int a, int b) { return (a % 2 && b % 2) ? -1 : 1; }

void accumulate(Tensor& t, const TensorKey& k, const Poly& c) {
  if (c.is_zero()) return;
  auto it = t.find(k);
  if (it == t.end()) {
    t.emplace(k, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) t.erase(it);
}

struct Entry {
  int j;
  int b;
  int k;
  int c;
  Poly coef;
};

// Full comultiplication of every frame element, with both orders of blocks.
class Comult {
 public:
  explicit Comult(const CoalgebraBundle& e) : e_(e), entries_(static_cast<std::size_t>(e.n())) {
    for (int i = 2; i <= e.n(); ++i) {
      auto& lvl = entries_[static_cast<std::size_t>(i - 1)];
      lvl.resize(e.rank(i));
      const PolyMatrix& m = e.mu(i);
      for (int j = 1; j <= i - j; ++j) {
        int k = i - j;
        std::size_t off = e.stored_offset(i, j);
        for (std::size_t b = 0; b < e.rank(j); ++b)
          for (std::size_t c = 0; c < e.rank(k); ++c) {
            std::size_t row = off + b * e.rank(k) + c;
            for (std::size_t a = 0; a < e.rank(i); ++a) {
              const Poly& p = m.at(row, a);
              if (p.is_zero()) continue;
              lvl[a].push_back({j, int(b), k, int(c), p});
              if (j != k) lvl[a].push_back({k, int(c), j, int(b), koszul(j, k) < 0 ? -p : p});
            }
          }
      }
    }
  }

  const std::vector<Entry>& of(int level, int a) const {
    static const std::vector<Entry> none;
    if (level < 2) return none;
    return entries_[static_cast<std::size_t>(level - 1)][static_cast<std::size_t>(a)];
  }

  // Applies mu to the last slot of every key.
  Tensor apply_last(const Tensor& t) const {
    Tensor out;
    for (const auto& [key, coef] : t) {
      const Slot& last = key.back();
      for (const auto& en : of(last.first, last.second)) {
        TensorKey k2(key.begin(), key.end() - 1);
        k2.emplace_back(en.j, en.b);
        k2.emplace_back(en.k, en.c);
        accumulate(out, k2, coef * en.coef);
      }
    }
    return out;
  }

  // Applies mu to slot s of every key.
  Tensor apply_at(const Tensor& t, std::size_t s) const {
    Tensor out;
    for (const auto& [key, coef] : t) {
      const Slot& sl = key[s];
      for (const auto& en : of(sl.first, sl.second)) {
        TensorKey k2(key.begin(), key.begin() + static_cast<long>(s));
        k2.emplace_back(en.j, en.b);
        k2.emplace_back(en.k, en.c);
        k2.insert(k2.end(), key.begin() + static_cast<long>(s) + 1, key.end());
        accumulate(out, k2, coef * en.coef);
      }
    }
    return out;
  }

  const Tensor& power(int level, int a, int k) {
    auto key = std::make_tuple(level, a, k);
    auto it = pow_cache_.find(key);
    if (it != pow_cache_.end()) return it->second;
    Tensor t;
    if (k == 0) {
      t.emplace(TensorKey{{level, a}}, Poly(e_.nvars(), Rat(1)));
    } else {
      t = apply_last(power(level, a, k - 1));
    }
    return pow_cache_.emplace(key, std::move(t)).first->second;
  }

 private:
  const CoalgebraBundle& e_;
  std::vector<std::vector<std::vector<Entry>>> entries_;
  std::map<std::tuple<int, int, int>, Tensor> pow_cache_;
};

Tensor tensor_product(const Tensor& a, const Tensor& b) {
  Tensor out;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) {
      TensorKey k = ka;
      k.insert(k.end(), kb.begin(), kb.end());
      accumulate(out, k, ca * cb);
    }
  return out;
}

Tensor swap_slots(const Tensor& t, std::size_t s) {
  Tensor out;
  for (const auto& [key, coef] : t) {
    TensorKey k = key;
    std::swap(k[s], k[s + 1]);
    accumulate(out, k, koszul(key[s].first, key[s + 1].first) < 0 ? -coef : coef);
  }
  return out;
}

std::string key_str(const TensorKey& k) {
  std::ostringstream os;
  for (std::size_t i = 0; i < k.size(); ++i) os << (i ? " (x) " : "") << "E" << -k[i].first << "[" << k[i].second + 1 << "]";
  return os.str();
}

bool all_constant(const std::vector<std::map<std::size_t, Poly>>& rows) {
  for (const auto& r : rows)
    for (const auto& [c, p] : r)
      if (!p.is_constant()) return false;
  return true;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::vector<Rat>> default_points(const CoalgebraBundle& e, const std::vector<std::vector<Rat>>& pts) {
  if (!pts.empty()) return pts;
  return {std::vector<Rat>(e.nvars(), Rat(0))};
}

}  // namespace

CoalgebraBundle::CoalgebraBundle(std::vector<std::string> base, std::vector<std::size_t> ranks)
    : base_(std::move(base)), ranks_(std::move(ranks)) {
  for (int i = 1; i <= n(); ++i) mu_.emplace_back(stored_dim(i), rank(i), nvars());
}

const PolyMatrix& CoalgebraBundle::mu(int i) const { return mu_.at(static_cast<std::size_t>(i - 1)); }

void CoalgebraBundle::set_mu(int i, PolyMatrix m) {
  if (i < 2 || i > n()) throw GradmanError(ErrorKind::InvalidInput, "mu level out of range");
  if (m.rows() != stored_dim(i) || m.cols() != rank(i) || m.nvars() != nvars()) {
    std::ostringstream os;
    os << "mu -" << i << " must be " << stored_dim(i) << "x" << rank(i) << ", got " << m.rows() << "x" << m.cols();
    throw GradmanError(ErrorKind::InvalidInput, os.str());
  }
  mu_[static_cast<std::size_t>(i - 1)] = std::move(m);
}

bool CoalgebraBundle::is_constant() const {
  for (const auto& m : mu_)
    if (!m.is_constant()) return false;
  return true;
}

std::size_t CoalgebraBundle::stored_dim(int i) const {
  std::size_t d = 0;
  for (int j = 1; j <= i - j; ++j) d += rank(j) * rank(i - j);
  return d;
}

std::size_t CoalgebraBundle::stored_offset(int i, int j) const {
  std::size_t d = 0;
  for (int t = 1; t < j; ++t) d += rank(t) * rank(i - t);
  return d;
}

std::size_t CoalgebraBundle::full_dim(int i) const {
  std::size_t d = 0;
  for (int j = 1; j < i; ++j) d += rank(j) * rank(i - j);
  return d;
}

std::size_t CoalgebraBundle::full_offset(int i, int j) const {
  std::size_t d = 0;
  for (int t = 1; t < j; ++t) d += rank(t) * rank(i - t);
  return d;
}

PolyMatrix CoalgebraBundle::full_mu(int i) const {
  PolyMatrix f(full_dim(i), rank(i), nvars());
  if (i < 2) return f;
  Comult cm(*this);
  for (std::size_t a = 0; a < rank(i); ++a)
    for (const auto& en : cm.of(i, int(a))) {
      std::size_t row = full_offset(i, en.j) + std::size_t(en.b) * rank(en.k) + std::size_t(en.c);
      f.at(row, a) += en.coef;
    }
  return f;
}

CoalgebraBundle CoalgebraBundle::evaluate(const std::vector<Rat>& point) const {
  CoalgebraBundle out(base_, ranks_);
  for (int i = 2; i <= n(); ++i) out.set_mu(i, PolyMatrix::from_rat(mu(i).evaluate(point), nvars()));
  return out;
}

bool CoalgebraBundle::operator==(const CoalgebraBundle& o) const {
  return base_ == o.base_ && ranks_ == o.ranks_ && mu_ == o.mu_;
}

CoalgebraReport check_coalgebra(const CoalgebraBundle& e) {
  CoalgebraReport rep;
  for (int i = 2; i <= e.n(); ++i) {
    if (i % 2 == 0) {
      int j = i / 2;
      std::size_t off = e.stored_offset(i, j), r = e.rank(j);
      for (std::size_t a = 0; a < e.rank(i); ++a) {
        bool bad = false;
        for (std::size_t b = 0; b < r && !bad; ++b)
          for (std::size_t c = 0; c < r && !bad; ++c) {
            const Poly& p = e.mu(i).at(off + b * r + c, a);
            const Poly& q = e.mu(i).at(off + c * r + b, a);
            bad = koszul(j, j) < 0 ? p != -q : p != q;
          }
        if (bad) {
          rep.cocommutative = false;
          rep.witnesses.push_back({i, a, "mu differs from its braiding on the E" + std::to_string(-j) + " (x) E" + std::to_string(-j) + " block"});
        }
      }
    }
  }
  Comult cm(e);
  for (int i = 3; i <= e.n(); ++i) {
    for (std::size_t a = 0; a < e.rank(i); ++a) {
      Tensor base;
      base.emplace(TensorKey{{i, int(a)}}, Poly(e.nvars(), Rat(1)));
      Tensor once = cm.apply_last(base);
      Tensor left = cm.apply_at(once, 0), right = cm.apply_at(once, 1);
      if (left != right) {
        rep.coassociative = false;
        auto l = left.begin(), r = right.begin();
        while (l != left.end() && r != right.end() && *l == *r) ++l, ++r;
        const TensorKey& k = (l == left.end()) ? r->first : (r == right.end() || l->first < r->first ? l->first : r->first);
        rep.witnesses.push_back({i, a, "(mu (x) Id) mu and (Id (x) mu) mu differ at " + key_str(k)});
      }
    }
  }
  return rep;
}

std::vector<std::map<std::size_t, Poly>> k_constraints(const CoalgebraBundle& e, int level) {
  if (level < 2 || level > e.n()) throw GradmanError(ErrorKind::InvalidInput, "K level out of range");
  Comult cm(e);
  using RowKey = std::tuple<int, int, TensorKey>;
  std::map<RowKey, std::map<std::size_t, Poly>> rows;
  auto add = [&](int N, int group, const Tensor& t, std::size_t col, bool negate) {
    for (const auto& [k, c] : t) {
      auto& row = rows[RowKey{N, group, k}];
      auto it = row.find(col);
      Poly v = negate ? -c : c;
      if (it == row.end()) {
        row.emplace(col, v);
      } else {
        it->second += v;
        if (it->second.is_zero()) row.erase(it);
      }
    }
  };
  for (int j = 1; j < level; ++j) {
    int k = level - j;
    std::size_t off = e.full_offset(level, j);
    for (std::size_t b = 0; b < e.rank(j); ++b)
      for (std::size_t c = 0; c < e.rank(k); ++c) {
        std::size_t col = off + b * e.rank(k) + c;
        for (int N = 0; N + 2 <= level; ++N) {
          Tensor v0 = tensor_product(cm.power(j, int(b), 0), cm.power(k, int(c), N));
          for (int t = 0; t <= N; ++t) {
            add(N, t, swap_slots(v0, std::size_t(t)), col, false);
            add(N, t, v0, col, true);
          }
          for (int kk = 1; kk <= N; ++kk) {
            Tensor v = tensor_product(cm.power(j, int(b), kk), cm.power(k, int(c), N - kk));
            add(N, N + kk, v, col, false);
            add(N, N + kk, v0, col, true);
          }
        }
      }
  }
  std::vector<std::map<std::size_t, Poly>> out;
  for (auto& [key, row] : rows)
    if (!row.empty()) out.push_back(std::move(row));
  return out;
}

KSpace compute_K(const CoalgebraBundle& e, int level) {
  auto rows = k_constraints(e, level);
  KSpace ks;
  ks.level = level;
  const std::size_t nc = e.full_dim(level), nv = e.nvars();
  if (all_constant(rows)) {
    RatEchelon ech(nc);
    for (const auto& r : rows) {
      std::map<std::size_t, Rat> rr;
      for (const auto& [c, p] : r) rr.emplace(c, p.constant_term());
      ech.add_row(std::move(rr));
    }
    for (auto& v : ech.kernel_basis()) {
      KernelVector kv;
      for (auto& x : v) kv.v.push_back(Poly(nv, x));
      ks.basis.push_back(std::move(kv));
    }
    return ks;
  }
  PolyMatrix m(rows.size(), nc, nv);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [c, p] : rows[r]) m.at(r, c) = p;
  ks.basis = kernel_basis(m);
  return ks;
}

bool AdmissibilityReport::admissible() const {
  for (const auto& l : levels)
    if (!l.equal || !l.constant_rank) return false;
  return true;
}

AdmissibilityReport check_admissible(const CoalgebraBundle& e, const std::vector<std::vector<Rat>>& sample_points) {
  AdmissibilityReport rep;
  auto points = default_points(e, sample_points);
  std::vector<CoalgebraBundle> at_points;
  for (const auto& p : points) at_points.push_back(e.evaluate(p));
  for (int i = 2; i <= e.n(); ++i) {
    LevelAdmissibility la;
    la.level = i;
    la.im_rank = rank_generic(e.mu(i));
    la.K_rank = compute_K(e, i).rank();
    PolyMatrix fm = e.full_mu(i);
    la.contained = true;
    for (const auto& row : k_constraints(e, i)) {
      for (std::size_t a = 0; a < e.rank(i) && la.contained; ++a) {
        Poly s(e.nvars());
        for (const auto& [c, p] : row) s += p * fm.at(c, a);
        la.contained = s.is_zero();
      }
      if (!la.contained) break;
    }
    la.equal = la.contained && la.im_rank == la.K_rank;
    la.constant_rank = true;
    la.pointwise_equal = true;
    for (std::size_t p = 0; p < points.size(); ++p) {
      PointCheck pc;
      pc.point = points[p];
      pc.im_rank = rank_generic(at_points[p].mu(i));
      pc.K_rank = compute_K(at_points[p], i).rank();
      pc.equal = pc.im_rank == pc.K_rank && la.contained;
      la.constant_rank = la.constant_rank && pc.im_rank == la.im_rank && pc.K_rank == la.K_rank;
      la.pointwise_equal = la.pointwise_equal && pc.equal;
      la.points.push_back(std::move(pc));
    }
    rep.levels.push_back(std::move(la));
  }
  return rep;
}

std::vector<std::vector<int>> split_monomials(const std::vector<std::size_t>& d, int level) {
  std::vector<Generator> gens;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t s = 0; s < d[i]; ++s) gens.push_back({"d" + std::to_string(i + 1) + "_" + std::to_string(s + 1), int(i + 1)});
  GradedSignature sig({}, gens, int(d.size()));
  return monomials_of_degree(sig, level);
}

CoalgebraBundle split_coalgebra(const std::vector<std::size_t>& d, std::vector<std::string> base) {
  const int n = int(d.size());
  std::vector<Generator> gens;
  for (int i = 0; i < n; ++i)
    for (std::size_t s = 0; s < d[std::size_t(i)]; ++s) gens.push_back({"d" + std::to_string(i + 1) + "_" + std::to_string(s + 1), i + 1});
  GradedSignature sig({}, gens, n);
  std::vector<std::vector<GenList>> frames(std::size_t(n) + 1);
  std::vector<std::map<GenList, std::size_t>> index(std::size_t(n) + 1);
  std::vector<std::size_t> ranks;
  for (int i = 1; i <= n; ++i) {
    frames[std::size_t(i)] = monomials_of_degree(sig, i);
    for (std::size_t a = 0; a < frames[std::size_t(i)].size(); ++a) index[std::size_t(i)][frames[std::size_t(i)][a]] = a;
    ranks.push_back(frames[std::size_t(i)].size());
  }
  CoalgebraBundle e(std::move(base), ranks);
  const std::size_t nv = e.nvars();
  for (int i = 2; i <= n; ++i) {
    PolyMatrix m(e.stored_dim(i), e.rank(i), nv);
    for (int j = 1; j <= i - j; ++j) {
      int k = i - j;
      std::size_t off = e.stored_offset(i, j);
      const auto& fj = frames[std::size_t(j)];
      const auto& fk = frames[std::size_t(k)];
      for (std::size_t b = 0; b < fj.size(); ++b)
        for (std::size_t c = 0; c < fk.size(); ++c) {
          Normalized p = multiply_gen_lists(sig, fj[b], fk[c]);
          if (p.sign == 0) continue;
          std::size_t a = index[std::size_t(i)].at(p.gens);
          m.at(off + b * fk.size() + c, a) = Poly(nv, Rat(p.sign));
        }
    }
    e.set_mu(i, std::move(m));
  }
  return e;
}

CoalgebraBundle wedge_coalgebra(std::size_t m, int n, std::vector<std::string> base) {
  if (n < 1) throw GradmanError(ErrorKind::InvalidInput, "wedge bundle needs n >= 1");
  std::vector<std::size_t> d(std::size_t(n), 0);
  d[0] = m;
  return split_coalgebra(d, std::move(base));
}

CoalgebraBundle dvb_coalgebra(const DvbData& data, int n, std::vector<std::string> base) {
  const std::size_t ra = data.rank_a, rb = data.rank_b;
  if (n < 2) throw GradmanError(ErrorKind::InvalidInput, "dvb bundle needs n >= 2");
  if (data.phi.rows() != ra * rb || data.phi.cols() != data.rank_omega)
    throw GradmanError(ErrorKind::InvalidInput, "phi must be (rank A * rank B) x rank Omega");
  if (data.rank_omega != data.rank_c + ra * rb)
    throw GradmanError(ErrorKind::InvalidInput, "non-exact dvb data: rank Omega != rank C + rank A * rank B");
  if (rank_generic(data.phi) != ra * rb) throw GradmanError(ErrorKind::InvalidInput, "non-exact dvb data: phi is not surjective");
  const std::size_t nv = base.size();
  if (data.phi.nvars() != nv && ra * rb > 0) throw GradmanError(ErrorKind::InvalidInput, "phi variable count mismatch");

  CoalgebraBundle wa = wedge_coalgebra(ra, n, base);
  std::vector<std::size_t> ranks;
  for (int i = 1; i <= n; ++i) ranks.push_back(wa.rank(i));
  if (n == 2) {
    ranks[0] += rb;
    ranks[1] += data.rank_omega + binomial(rb, 2);
  } else {
    ranks[std::size_t(n - 2)] += rb;
    ranks[std::size_t(n - 1)] += data.rank_omega;
  }
  CoalgebraBundle e(base, ranks);

  // Copies wedge blocks of `w` whose frames are a prefix of e's frames, with
  // level-1 indices shifted by `shift` and level-i columns by `col_shift`.
  auto embed = [&](const CoalgebraBundle& w, int i, PolyMatrix& m, std::size_t shift, std::size_t col_shift) {
    for (int j = 1; j <= i - j; ++j) {
      int k = i - j;
      for (std::size_t b = 0; b < w.rank(j); ++b)
        for (std::size_t c = 0; c < w.rank(k); ++c)
          for (std::size_t a = 0; a < w.rank(i); ++a) {
            const Poly& p = w.mu(i).at(w.stored_offset(i, j) + b * w.rank(k) + c, a);
            if (p.is_zero()) continue;
            std::size_t bb = b + (j == 1 ? shift : 0), cc = c + (k == 1 ? shift : 0);
            m.at(e.stored_offset(i, j) + bb * e.rank(k) + cc, a + col_shift) = p;
          }
    }
  };

  for (int i = 2; i <= n; ++i) {
    PolyMatrix m(e.stored_dim(i), e.rank(i), nv);
    embed(wa, i, m, 0, 0);
    if (n == 2) {
      CoalgebraBundle wb = wedge_coalgebra(rb, 2, base);
      embed(wb, 2, m, ra, wa.rank(2) + data.rank_omega);
      std::size_t r1 = e.rank(1);
      for (std::size_t w = 0; w < data.rank_omega; ++w)
        for (std::size_t a = 0; a < ra; ++a)
          for (std::size_t b = 0; b < rb; ++b) {
            const Poly& p = data.phi.at(a * rb + b, w);
            if (p.is_zero()) continue;
            m.at(a * r1 + ra + b, wa.rank(2) + w) += p;
            m.at((ra + b) * r1 + a, wa.rank(2) + w) -= p;
          }
    } else if (i == n) {
      std::size_t off = e.stored_offset(n, 1), rk = e.rank(n - 1), shift_b = wa.rank(n - 1);
      for (std::size_t w = 0; w < data.rank_omega; ++w)
        for (std::size_t a = 0; a < ra; ++a)
          for (std::size_t b = 0; b < rb; ++b) {
            const Poly& p = data.phi.at(a * rb + b, w);
            if (!p.is_zero()) m.at(off + a * rk + shift_b + b, wa.rank(n) + w) += p;
          }
    }
    e.set_mu(i, std::move(m));
  }
  return e;
}

CoalgebraBundle truncate(const CoalgebraBundle& e, int k) {
  if (k < 0 || k > e.n()) throw GradmanError(ErrorKind::InvalidInput, "truncation degree out of range");
  std::vector<std::size_t> ranks(e.ranks().begin(), e.ranks().begin() + k);
  CoalgebraBundle t(e.base(), ranks);
  for (int i = 2; i <= k; ++i) t.set_mu(i, e.mu(i));
  return t;
}

CoalgebraMorphism identity_morphism(const CoalgebraBundle& e) {
  CoalgebraMorphism m;
  for (int i = 1; i <= e.n(); ++i) m.phi.push_back(PolyMatrix::identity(e.rank(i), e.nvars()));
  return m;
}

CoalgebraMorphism compose(const CoalgebraMorphism& second, const CoalgebraMorphism& first) {
  if (second.phi.size() != first.phi.size()) throw GradmanError(ErrorKind::InvalidInput, "morphism degree mismatch");
  CoalgebraMorphism m;
  for (std::size_t i = 0; i < first.phi.size(); ++i) m.phi.push_back(second.phi[i] * first.phi[i]);
  return m;
}

PolyMatrix tensor_square(const CoalgebraMorphism& phi, const CoalgebraBundle& src, const CoalgebraBundle& dst, int i) {
  PolyMatrix t(dst.stored_dim(i), src.stored_dim(i), src.nvars());
  for (int j = 1; j <= i - j; ++j) {
    int k = i - j;
    const PolyMatrix& pj = phi.at(j);
    const PolyMatrix& pk = phi.at(k);
    std::size_t so = src.stored_offset(i, j), dof = dst.stored_offset(i, j);
    for (std::size_t b2 = 0; b2 < dst.rank(j); ++b2)
      for (std::size_t b = 0; b < src.rank(j); ++b) {
        const Poly& x = pj.at(b2, b);
        if (x.is_zero()) continue;
        for (std::size_t c2 = 0; c2 < dst.rank(k); ++c2)
          for (std::size_t c = 0; c < src.rank(k); ++c) {
            const Poly& y = pk.at(c2, c);
            if (y.is_zero()) continue;
            t.at(dof + b2 * dst.rank(k) + c2, so + b * src.rank(k) + c) = x * y;
          }
      }
  }
  return t;
}

bool morphism_check(const CoalgebraMorphism& phi, const CoalgebraBundle& e, const CoalgebraBundle& f) {
  if (e.n() != f.n() || int(phi.phi.size()) != e.n()) throw GradmanError(ErrorKind::InvalidInput, "morphism degree mismatch");
  for (int i = 1; i <= e.n(); ++i)
    if (phi.at(i).rows() != f.rank(i) || phi.at(i).cols() != e.rank(i))
      throw GradmanError(ErrorKind::InvalidInput, "morphism rank mismatch at level " + std::to_string(i));
  for (int i = 2; i <= e.n(); ++i)
    if (f.mu(i) * phi.at(i) != tensor_square(phi, e, f, i) * e.mu(i)) return false;
  return true;
}

CoalgebraBundle transport(const CoalgebraBundle& e, const CoalgebraMorphism& phi) {
  CoalgebraBundle f(e.base(), e.ranks());
  for (int i = 2; i <= e.n(); ++i) {
    auto inv = inverse_polynomial(phi.at(i));
    if (!inv) throw GradmanError(ErrorKind::InvalidInput, "frame change is not invertible at level " + std::to_string(i));
    f.set_mu(i, tensor_square(phi, e, f, i) * e.mu(i) * *inv);
  }
  return f;
}

SplittingIso splitting_iso(const CoalgebraBundle& e) {
  if (!e.is_constant()) throw GradmanError(ErrorKind::Unsupported, "splitting requires mu constant in the base coordinates");
  auto adm = check_admissible(e, {});
  for (const auto& l : adm.levels)
    if (!l.equal)
      throw GradmanError(ErrorKind::NotAdmissible, "bundle is not admissible at level " + std::to_string(l.level) + " (im rank " +
                                                       std::to_string(l.im_rank) + ", K rank " + std::to_string(l.K_rank) + ")");
  const std::size_t nv = e.nvars();
  const std::vector<Rat> origin(nv, Rat(0));
  SplittingIso out;
  std::vector<std::vector<std::vector<Rat>>> kernels;
  for (int i = 1; i <= e.n(); ++i) {
    if (i == 1) {
      std::vector<std::vector<Rat>> id;
      for (std::size_t a = 0; a < e.rank(1); ++a) {
        std::vector<Rat> v(e.rank(1), Rat(0));
        v[a] = 1;
        id.push_back(std::move(v));
      }
      kernels.push_back(std::move(id));
    } else {
      kernels.push_back(kernel_basis(e.mu(i).evaluate(origin)));
    }
    out.kernel_ranks.push_back(kernels.back().size());
  }
  out.split = split_coalgebra(out.kernel_ranks, e.base());
  for (int i = 1; i <= e.n(); ++i) {
    if (out.split.rank(i) != e.rank(i))
      throw GradmanError(ErrorKind::NotAdmissible, "rank of level " + std::to_string(i) + " does not match its split model");
    auto mons = split_monomials(out.kernel_ranks, i);
    PolyMatrix psi(e.rank(i), out.split.rank(i), nv);
    std::size_t next_kernel = 0;
    PolyMatrix rhs;
    if (i >= 2) rhs = tensor_square(out.psi, out.split, e, i) * out.split.mu(i);
    for (std::size_t a = 0; a < mons.size(); ++a) {
      if (mons[a].size() == 1) {
        const auto& kv = kernels[std::size_t(i - 1)][next_kernel++];
        for (std::size_t r = 0; r < kv.size(); ++r) psi.at(r, a) = Poly(nv, kv[r]);
        continue;
      }
      SolveResult s = solve(e.mu(i), rhs.column(a));
      if (!s.consistent || !s.polynomial)
        throw GradmanError(ErrorKind::NotAdmissible, "image of the split product is outside im(mu) at level " + std::to_string(i));
      for (std::size_t r = 0; r < s.x.size(); ++r) psi.at(r, a) = s.x[r];
    }
    out.psi.phi.push_back(psi);
    auto inv = inverse(psi.evaluate(origin));
    if (!inv) throw GradmanError(ErrorKind::NotAdmissible, "splitting map is singular at level " + std::to_string(i));
    out.phi.phi.push_back(PolyMatrix::from_rat(*inv, nv));
  }
  return out;
}

}  // namespace gradman
