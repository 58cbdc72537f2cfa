#include "gradman/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <set>
#include <sstream>

namespace gradman {

using nlohmann::json;

ParseError::ParseError(Diagnostic d)
    : std::runtime_error(std::to_string(d.line) + ":" + std::to_string(d.column) + ": " + d.message), diag_(std::move(d)) {}

const CoalgebraDecl* Document::find_coalgebra(const std::string& name) const {
  for (const auto& c : coalgebras)
    if (c.name == name) return &c;
  return nullptr;
}

const FieldDecl* Document::find_field(const std::string& name) const {
  for (const auto& f : fields)
    if (f.name == name) return &f;
  return nullptr;
}

bool Document::operator==(const Document& o) const {
  if (chart != o.chart || base != o.base || coords != o.coords) return false;
  if (bool(sig) != bool(o.sig) || (sig && *sig != *o.sig)) return false;
  if (coalgebras.size() != o.coalgebras.size() || morphisms.size() != o.morphisms.size() ||
      fields.size() != o.fields.size() || dists.size() != o.dists.size() || reductions.size() != o.reductions.size())
    return false;
  for (std::size_t i = 0; i < coalgebras.size(); ++i)
    if (coalgebras[i].name != o.coalgebras[i].name || !(coalgebras[i].bundle == o.coalgebras[i].bundle)) return false;
  for (std::size_t i = 0; i < morphisms.size(); ++i) {
    const auto &a = morphisms[i], &b = o.morphisms[i];
    if (a.name != b.name || a.source != b.source || a.target != b.target || a.phi.phi != b.phi.phi) return false;
  }
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (fields[i].name != o.fields[i].name || fields[i].field.degree() != o.fields[i].field.degree() ||
        fields[i].field != o.fields[i].field)
      return false;
  for (std::size_t i = 0; i < dists.size(); ++i)
    if (dists[i].name != o.dists[i].name || dists[i].generators != o.dists[i].generators ||
        dists[i].points != o.dists[i].points)
      return false;
  for (std::size_t i = 0; i < reductions.size(); ++i)
    if (reductions[i].coalgebra != o.reductions[i].coalgebra || reductions[i].expr != o.reductions[i].expr) return false;
  return true;
}

namespace {

enum class Tok { Ident, Number, Sym, Newline, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1, col = 1;
  std::size_t begin = 0, end = 0;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Newline: return "end of line";
    case Tok::End: return "end of input";
    default: return "'" + t.text + "'";
  }
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1, depth = 0;
  std::size_t i = 0;
  auto advance = [&] {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    if (c == '\n') {
      if (depth == 0) out.push_back({Tok::Newline, "\n", line, col, i, i + 1});
      advance();
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    Token t{Tok::Sym, "", line, col, i, i};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Tok::Ident;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) advance();
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = Tok::Number;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) advance();
    } else if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      advance();
      advance();
    } else if (std::strchr("+-*/^()[]{},;:=@", c)) {
      if (c == '(' || c == '[') ++depth;
      if ((c == ')' || c == ']') && depth > 0) --depth;
      advance();
    } else {
      throw ParseError({line, col, std::string("unexpected character '") + c + "'", {}});
    }
    t.end = i;
    t.text = std::string(src.substr(t.begin, t.end - t.begin));
    out.push_back(std::move(t));
  }
  out.push_back({Tok::End, "", line, col, src.size(), src.size()});
  return out;
}

std::vector<Generator> numbered(const std::string& stem, const std::vector<std::size_t>& counts) {
  std::vector<Generator> gens;
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t s = 0; s < counts[i]; ++s)
      gens.push_back({stem + std::to_string(i + 1) + "_" + std::to_string(s + 1), int(i + 1)});
  return gens;
}

class Parser {
 public:
  Parser(std::string_view src, int max_degree) : src_(src), toks_(lex(src)), max_degree_(max_degree) {}

  Document document() {
    for (;;) {
      skip_newlines();
      if (peek().kind == Tok::End) break;
      statement();
    }
    ensure_sig();
    return std::move(doc_);
  }

  GradedFunction standalone_expression(const SigPtr& sig) {
    GradedFunction f = expr(sig);
    if (peek().kind != Tok::End) fail(peek(), "unexpected " + describe(peek()), {"operator", "end of expression"});
    return f;
  }

  std::vector<std::vector<Rat>> standalone_points() {
    auto pts = points();
    if (peek().kind != Tok::End) fail(peek(), "unexpected " + describe(peek()), {"'('"});
    return pts;
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& msg, std::vector<std::string> expected = {}) {
    throw ParseError({t.line, t.col, msg, std::move(expected)});
  }

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_sym(const char* s) const { return peek().kind == Tok::Sym && peek().text == s; }
  bool at_word(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }
  const Token& expect_sym(const char* s) {
    if (!at_sym(s)) fail(peek(), "expected '" + std::string(s) + "' but found " + describe(peek()), {std::string("'") + s + "'"});
    return next();
  }
  const Token& expect_ident(const char* what) {
    if (peek().kind != Tok::Ident) fail(peek(), std::string("expected ") + what + " but found " + describe(peek()), {what});
    return next();
  }
  void skip_newlines() {
    while (peek().kind == Tok::Newline) next();
  }
  void end_statement() {
    if (peek().kind == Tok::Newline || peek().kind == Tok::End) return;
    fail(peek(), "unexpected " + describe(peek()) + " after statement", {"end of line"});
  }
  // Separators inside a { } block.
  void skip_separators() {
    while (peek().kind == Tok::Newline || at_sym(";")) next();
  }
  void entry_end() {
    if (peek().kind == Tok::Newline || at_sym(";") || at_sym("}")) return;
    fail(peek(), "unexpected " + describe(peek()), {"';'", "end of line", "'}'"});
  }

  long integer(bool allow_negative) {
    bool neg = false;
    const Token& start = peek();
    if (allow_negative && at_sym("-")) {
      next();
      neg = true;
    }
    if (peek().kind != Tok::Number) fail(peek(), "expected an integer but found " + describe(peek()), {"integer"});
    const Token& t = next();
    if (t.text.size() > 9) fail(start, "integer literal too large");
    long v = std::stol(t.text);
    return neg ? -v : v;
  }

  int level() {
    const Token& t = peek();
    long v = integer(true);
    if (v >= 0) fail(t, "degree levels are written as negative integers", {"negative integer"});
    return int(-v);
  }

  Rat rational_literal() {
    const Token& t = next();
    Rat r(parse_rat(t.text));
    if (at_sym("/") && peek(1).kind == Tok::Number) {
      next();
      const Token& den = next();
      Rat d(parse_rat(den.text));
      if (d == 0) fail(den, "zero denominator");
      r /= d;
    }
    return r;
  }

  Rat signed_rational() {
    bool neg = false;
    if (at_sym("-")) {
      next();
      neg = true;
    } else if (at_sym("+")) {
      next();
    }
    if (peek().kind != Tok::Number) fail(peek(), "expected a rational number but found " + describe(peek()), {"number"});
    Rat r = rational_literal();
    return neg ? Rat(-r) : r;
  }

  // expr := term (('+'|'-') term)*
  GradedFunction expr(const SigPtr& sig) {
    GradedFunction f = term(sig);
    while (at_sym("+") || at_sym("-")) {
      bool minus = next().text == "-";
      GradedFunction g = term(sig);
      f = minus ? f - g : f + g;
    }
    return f;
  }

  GradedFunction term(const SigPtr& sig) {
    GradedFunction f = unary(sig);
    while (at_sym("*")) {
      next();
      f = f * unary(sig);
    }
    return f;
  }

  GradedFunction unary(const SigPtr& sig) {
    if (at_sym("-")) {
      next();
      return -unary(sig);
    }
    return power(sig);
  }

  GradedFunction power(const SigPtr& sig) {
    const Token& start = peek();
    bool odd_gen = false;
    GradedFunction a = atom(sig, odd_gen);
    if (!at_sym("^")) return a;
    next();
    if (peek().kind != Tok::Number) fail(peek(), "expected an integer exponent but found " + describe(peek()), {"integer"});
    const Token& et = next();
    if (et.text.size() > 4) fail(et, "exponent too large");
    int k = std::stoi(et.text);
    if (odd_gen && k >= 2) fail(start, "power of the odd coordinate '" + start.text + "'");
    GradedFunction r = GradedFunction::constant(sig, Rat(1));
    for (int i = 0; i < k; ++i) r = r * a;
    return r;
  }

  GradedFunction atom(const SigPtr& sig, bool& odd_gen) {
    const Token& t = peek();
    if (t.kind == Tok::Number) return GradedFunction::constant(sig, rational_literal());
    if (t.kind == Tok::Ident) {
      next();
      if (auto b = sig->find_base(t.text)) return GradedFunction::base_var(sig, *b);
      if (auto g = sig->find_gen(t.text)) {
        odd_gen = sig->odd(*g);
        return GradedFunction::generator(sig, *g);
      }
      fail(t, "unknown name '" + t.text + "'", {"coordinate"});
    }
    if (at_sym("(")) {
      next();
      GradedFunction f = expr(sig);
      expect_sym(")");
      return f;
    }
    fail(t, "expected an expression but found " + describe(t), {"number", "coordinate", "'('", "'-'"});
  }

  void ensure_sig() {
    if (!doc_.sig) doc_.sig = make_signature(doc_.base, doc_.coords, -1, max_degree_);
  }

  SigPtr base_sig() {
    if (!base_sig_) base_sig_ = make_signature(doc_.base, {}, -1, max_degree_);
    return base_sig_;
  }

  void check_fresh(const Token& t) {
    if (!names_.insert(t.text).second) fail(t, "name '" + t.text + "' is already declared");
  }

  void check_coordinate_name(const Token& t) {
    if (t.text == "d") fail(t, "'d' is reserved");
    if (std::find(doc_.base.begin(), doc_.base.end(), t.text) != doc_.base.end() ||
        std::any_of(doc_.coords.begin(), doc_.coords.end(), [&](const Generator& g) { return g.name == t.text; }))
      fail(t, "coordinate '" + t.text + "' is already declared");
  }

  void statement() {
    const Token& kw = peek();
    if (kw.kind != Tok::Ident) fail(kw, "expected a declaration but found " + describe(kw), keywords());
    if (kw.text == "chart") return chart();
    if (kw.text == "base") return base();
    if (kw.text == "coord") return coord();
    if (kw.text == "coalgebra") return coalgebra();
    if (kw.text == "morphism") return morphism();
    if (kw.text == "vf") return vf();
    if (kw.text == "dist") return dist();
    if (kw.text == "reduce") return reduce();
    fail(kw, "unknown declaration '" + kw.text + "'", keywords());
  }

  static std::vector<std::string> keywords() {
    return {"chart", "base", "coord", "coalgebra", "morphism", "vf", "dist", "reduce"};
  }

  void chart() {
    const Token& kw = next();
    if (seen_chart_) fail(kw, "only one chart per document");
    seen_chart_ = true;
    if (peek().kind == Tok::Ident) doc_.chart = next().text;
    end_statement();
  }

  void coordinates_open(const Token& kw) {
    if (doc_.sig || base_sig_) fail(kw, "coordinates must be declared before they are used");
  }

  void base() {
    const Token& kw = next();
    coordinates_open(kw);
    if (peek().kind != Tok::Ident) fail(peek(), "expected a base coordinate name", {"identifier"});
    while (peek().kind == Tok::Ident) {
      const Token& t = next();
      check_coordinate_name(t);
      doc_.base.push_back(t.text);
    }
    end_statement();
  }

  void coord() {
    const Token& kw = next();
    coordinates_open(kw);
    std::vector<const Token*> names;
    names.push_back(&expect_ident("coordinate name"));
    while (peek().kind == Tok::Ident) names.push_back(&next());
    expect_sym(":");
    const Token& dt = peek();
    long deg = integer(false);
    if (deg < 1) fail(dt, "coordinate degrees must be positive", {"positive integer"});
    for (const Token* t : names) {
      check_coordinate_name(*t);
      doc_.coords.push_back({t->text, int(deg)});
    }
    end_statement();
  }

  PolyMatrix matrix(std::size_t rows, std::size_t cols) {
    const Token& start = peek();
    const SigPtr sig = base_sig();
    const std::size_t nv = sig->m0();
    std::vector<std::vector<Poly>> data;
    expect_sym("[");
    while (!at_sym("]")) {
      expect_sym("[");
      std::vector<Poly> row;
      while (!at_sym("]")) {
        const Token& et = peek();
        GradedFunction f = expr(sig);
        if (f.max_term_degree() > 0) fail(et, "matrix entries must be polynomials in the base coordinates");
        row.push_back(f.body());
        if (!at_sym(",")) break;
        next();
      }
      expect_sym("]");
      data.push_back(std::move(row));
      if (!at_sym(",")) break;
      next();
    }
    expect_sym("]");
    bool shape = data.size() == rows;
    for (const auto& r : data) shape = shape && r.size() == cols;
    if (!shape)
      fail(start, "matrix must be " + std::to_string(rows) + " x " + std::to_string(cols));
    PolyMatrix m(rows, cols, nv);
    for (std::size_t r = 0; r < rows && r < data.size(); ++r)
      for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = data[r][c];
    return m;
  }

  std::vector<long> int_args() {
    std::vector<long> args;
    expect_sym("(");
    while (!at_sym(")")) {
      args.push_back(integer(false));
      if (!at_sym(",")) break;
      next();
    }
    expect_sym(")");
    return args;
  }

  void coalgebra() {
    next();
    const Token& name = expect_ident("coalgebra name");
    check_fresh(name);
    base_sig();
    CoalgebraBundle bundle;
    if (at_sym("=")) {
      next();
      const Token& kind = expect_ident("'split' or 'wedge'");
      std::vector<long> args = int_args();
      try {
        if (kind.text == "split") {
          if (args.empty()) fail(kind, "split needs at least one rank");
          bundle = split_coalgebra(std::vector<std::size_t>(args.begin(), args.end()), doc_.base);
        } else if (kind.text == "wedge") {
          if (args.size() != 2) fail(kind, "wedge takes (rank, n)");
          bundle = wedge_coalgebra(std::size_t(args[0]), int(args[1]), doc_.base);
        } else {
          fail(kind, "unknown coalgebra constructor '" + kind.text + "'", {"split", "wedge"});
        }
      } catch (const GradmanError& e) {
        fail(kind, e.what());
      }
      end_statement();
    } else {
      expect_sym("{");
      std::map<int, std::size_t> ranks;
      std::map<int, std::pair<Token, std::size_t>> mu_at;  // level -> token, token index
      for (;;) {
        skip_separators();
        if (at_sym("}")) break;
        const Token& key = expect_ident("'rank' or 'mu'");
        if (key.text == "rank") {
          const Token& lt = peek();
          int l = level();
          expect_sym("=");
          long r = integer(false);
          if (!ranks.emplace(l, std::size_t(r)).second) fail(lt, "rank of level -" + std::to_string(l) + " given twice");
        } else if (key.text == "mu") {
          const Token& lt = peek();
          int l = level();
          if (l < 2) fail(lt, "mu is defined for levels -2 and below");
          expect_sym("=");
          if (mu_at.count(l)) fail(lt, "mu -" + std::to_string(l) + " given twice");
          mu_at.emplace(l, std::make_pair(lt, pos_));
          skip_matrix();
        } else {
          fail(key, "unknown coalgebra entry '" + key.text + "'", {"rank", "mu"});
        }
        entry_end();
      }
      const Token& close = expect_sym("}");
      end_statement();
      int n = ranks.empty() ? 0 : ranks.rbegin()->first;
      if (n == 0) fail(close, "coalgebra needs at least one rank");
      std::vector<std::size_t> rk;
      for (int i = 1; i <= n; ++i) {
        auto it = ranks.find(i);
        if (it == ranks.end()) fail(close, "missing rank -" + std::to_string(i));
        rk.push_back(it->second);
      }
      bundle = CoalgebraBundle(doc_.base, rk);
      std::size_t resume = pos_;
      for (const auto& [l, at] : mu_at) {
        if (l > n) fail(at.first, "mu level -" + std::to_string(l) + " exceeds the declared ranks");
        pos_ = at.second;
        bundle.set_mu(l, matrix(bundle.stored_dim(l), bundle.rank(l)));
      }
      pos_ = resume;
    }
    doc_.coalgebras.push_back({name.text, std::move(bundle)});
  }

  void skip_matrix() {
    int depth = 0;
    do {
      if (peek().kind == Tok::End) fail(peek(), "unterminated matrix", {"']'"});
      const Token& t = next();
      if (t.kind == Tok::Sym && t.text == "[") ++depth;
      if (t.kind == Tok::Sym && t.text == "]") --depth;
      if (depth == 0 && !(t.kind == Tok::Sym && t.text == "]")) fail(t, "expected '['", {"'['"});
    } while (depth > 0);
  }

  void morphism() {
    next();
    const Token& name = expect_ident("morphism name");
    check_fresh(name);
    expect_sym(":");
    const Token& src = expect_ident("source coalgebra");
    expect_sym("->");
    const Token& dst = expect_ident("target coalgebra");
    const CoalgebraDecl* e = doc_.find_coalgebra(src.text);
    const CoalgebraDecl* f = doc_.find_coalgebra(dst.text);
    if (!e) fail(src, "unknown coalgebra '" + src.text + "'");
    if (!f) fail(dst, "unknown coalgebra '" + dst.text + "'");
    if (e->bundle.n() != f->bundle.n()) fail(dst, "source and target have different degrees");
    expect_sym("{");
    CoalgebraMorphism phi;
    phi.phi.resize(std::size_t(e->bundle.n()));
    std::vector<bool> seen(phi.phi.size(), false);
    for (;;) {
      skip_separators();
      if (at_sym("}")) break;
      const Token& key = expect_ident("'phi'");
      if (key.text != "phi") fail(key, "unknown morphism entry '" + key.text + "'", {"phi"});
      const Token& lt = peek();
      int l = level();
      if (l > e->bundle.n()) fail(lt, "level exceeds the coalgebra degree");
      if (seen[std::size_t(l - 1)]) fail(lt, "phi -" + std::to_string(l) + " given twice");
      seen[std::size_t(l - 1)] = true;
      expect_sym("=");
      phi.phi[std::size_t(l - 1)] = matrix(f->bundle.rank(l), e->bundle.rank(l));
      entry_end();
    }
    const Token& close = expect_sym("}");
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i]) fail(close, "missing phi -" + std::to_string(i + 1));
    end_statement();
    doc_.morphisms.push_back({name.text, src.text, dst.text, std::move(phi)});
  }

  void vf() {
    next();
    const Token& name = expect_ident("field name");
    check_fresh(name);
    expect_sym(":");
    const Token& dt = peek();
    long k = integer(true);
    ensure_sig();
    if (k > doc_.sig->max_degree() || k < -doc_.sig->n() - 1) fail(dt, "field degree out of range");
    VectorField x(doc_.sig, int(k));
    auto names = doc_.sig->coordinate_names();
    std::set<std::size_t> seen;
    expect_sym("{");
    for (;;) {
      skip_separators();
      if (at_sym("}")) break;
      const Token& dtok = peek();
      if (!(dtok.kind == Tok::Ident && dtok.text == "d")) fail(dtok, "expected 'd/d<coordinate>'", {"d/d<coordinate>"});
      next();
      expect_sym("/");
      const Token& ct = expect_ident("d<coordinate>");
      if (ct.text.size() < 2 || ct.text[0] != 'd') fail(ct, "expected 'd<coordinate>'", {"d<coordinate>"});
      std::string cname = ct.text.substr(1);
      auto it = std::find(names.begin(), names.end(), cname);
      if (it == names.end()) fail(ct, "unknown coordinate '" + cname + "'", {"coordinate"});
      std::size_t c = std::size_t(it - names.begin());
      if (!seen.insert(c).second) fail(dtok, "d/d" + cname + " given twice");
      expect_sym("=");
      const Token& et = peek();
      GradedFunction value = expr(doc_.sig);
      int want = doc_.sig->coordinate_degree(c) + int(k);
      if (!value.is_zero() && value.degree() != want) {
        std::string got = value.degree() ? std::to_string(*value.degree()) : std::string("mixed");
        fail(et, "degree mismatch: d/d" + cname + " of a degree " + std::to_string(k) + " field must have degree " +
                     std::to_string(want) + ", got " + got);
      }
      x.set_action(c, std::move(value));
      entry_end();
    }
    expect_sym("}");
    end_statement();
    doc_.fields.push_back({name.text, std::move(x)});
  }

  std::vector<std::vector<Rat>> points() {
    std::vector<std::vector<Rat>> pts;
    while (at_sym("(")) {
      next();
      std::vector<Rat> p;
      while (!at_sym(")")) {
        p.push_back(signed_rational());
        if (!at_sym(",")) break;
        next();
      }
      expect_sym(")");
      pts.push_back(std::move(p));
    }
    return pts;
  }

  void dist() {
    next();
    const Token& name = expect_ident("distribution name");
    check_fresh(name);
    expect_sym("=");
    DistDecl d{name.text, {}, {}};
    while (peek().kind == Tok::Ident) {
      const Token& g = next();
      if (!doc_.find_field(g.text)) fail(g, "unknown vector field '" + g.text + "'", {"vector field"});
      d.generators.push_back(g.text);
      if (!at_sym(",")) break;
      next();
    }
    if (at_sym("@")) {
      next();
      const Token& kw = expect_ident("'points'");
      if (kw.text != "points") fail(kw, "expected 'points'", {"points"});
      ensure_sig();
      const Token& first = peek();
      if (!at_sym("(")) fail(first, "expected a point", {"'('"});
      d.points = points();
      for (const auto& p : d.points)
        if (p.size() != doc_.sig->m0())
          fail(first, "points must have " + std::to_string(doc_.sig->m0()) + " coordinates");
    }
    end_statement();
    doc_.dists.push_back(std::move(d));
  }

  void reduce() {
    next();
    const Token& name = expect_ident("coalgebra name");
    const CoalgebraDecl* e = doc_.find_coalgebra(name.text);
    if (!e) fail(name, "unknown coalgebra '" + name.text + "'");
    expect_sym(":");
    const Token& start = peek();
    SigPtr frame = make_signature(doc_.base, numbered("th", e->bundle.ranks()), e->bundle.n(), max_degree_);
    GradedFunction f = expr(frame);
    end_statement();
    doc_.reductions.push_back({name.text, f.str(), start.line, start.col});
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int max_degree_;
  Document doc_;
  SigPtr base_sig_;
  std::set<std::string> names_;
  bool seen_chart_ = false;
};

std::string matrix_str(const PolyMatrix& m, const std::vector<std::string>& base) {
  std::string s = "[";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (r) s += ", ";
    s += "[";
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) s += ", ";
      s += m.at(r, c).str(base);
    }
    s += "]";
  }
  return s + "]";
}

std::string rat_list(const std::vector<Rat>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + p[i].get_str();
  return s + ")";
}

}  // namespace

Document parse(std::string_view source, int max_degree) { return Parser(source, max_degree).document(); }

GradedFunction parse_expression(std::string_view text, const SigPtr& sig) {
  return Parser(text, -1).standalone_expression(sig);
}

std::vector<std::vector<Rat>> parse_points(std::string_view text) { return Parser(text, -1).standalone_points(); }

std::string pretty(const Document& doc) {
  std::ostringstream out;
  bool any = false;
  if (!doc.chart.empty()) {
    out << "chart " << doc.chart << "\n";
    any = true;
  }
  if (!doc.base.empty()) {
    out << "base";
    for (const auto& b : doc.base) out << " " << b;
    out << "\n";
    any = true;
  }
  for (const auto& g : doc.coords) {
    out << "coord " << g.name << " : " << g.degree << "\n";
    any = true;
  }
  for (const auto& c : doc.coalgebras) {
    if (any) out << "\n";
    any = true;
    out << "coalgebra " << c.name << " {\n";
    for (int i = 1; i <= c.bundle.n(); ++i) out << "  rank -" << i << " = " << c.bundle.rank(i) << "\n";
    for (int i = 2; i <= c.bundle.n(); ++i)
      if (!c.bundle.mu(i).is_zero() && c.bundle.stored_dim(i) > 0)
        out << "  mu -" << i << " = " << matrix_str(c.bundle.mu(i), doc.base) << "\n";
    out << "}\n";
  }
  for (const auto& m : doc.morphisms) {
    if (any) out << "\n";
    any = true;
    out << "morphism " << m.name << " : " << m.source << " -> " << m.target << " {\n";
    for (std::size_t i = 0; i < m.phi.phi.size(); ++i)
      out << "  phi -" << i + 1 << " = " << matrix_str(m.phi.phi[i], doc.base) << "\n";
    out << "}\n";
  }
  for (const auto& f : doc.fields) {
    if (any) out << "\n";
    any = true;
    out << "vf " << f.name << " : " << f.field.degree() << " {";
    auto names = f.field.sig()->coordinate_names();
    bool first = true;
    for (std::size_t c = 0; c < names.size(); ++c) {
      const auto& a = f.field.action(c);
      if (a.is_zero()) continue;
      out << (first ? "\n" : "") << "  d/d" << names[c] << " = " << a.str() << "\n";
      first = false;
    }
    out << "}\n";
  }
  if (!doc.dists.empty() && any) out << "\n";
  for (const auto& d : doc.dists) {
    any = true;
    out << "dist " << d.name << " =";
    for (std::size_t i = 0; i < d.generators.size(); ++i) out << (i ? ", " : " ") << d.generators[i];
    if (!d.points.empty()) {
      out << " @ points";
      for (const auto& p : d.points) out << " " << rat_list(p);
    }
    out << "\n";
  }
  if (!doc.reductions.empty() && any) out << "\n";
  for (const auto& r : doc.reductions) out << "reduce " << r.coalgebra << " : " << r.expr << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Subcommands

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> list = {"check-coalgebra", "admissible", "split-iso", "geometrize",
                                                "reduce",          "bracket",    "tangent",   "qsquare",
                                                "involutive",      "frobenius",  "roundtrip"};
  return list;
}

namespace {

struct UsageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput: return UsageError;
    case ErrorKind::NotAdmissible:
    case ErrorKind::NotInvolutive:
    case ErrorKind::HypothesisFailed: return Negative;
    case ErrorKind::Unsupported:
    case ErrorKind::DegreeOverflow:
    case ErrorKind::NonConstantSymbols:
    case ErrorKind::NonPolynomialFlatFrame: return UnsupportedCase;
  }
  return UsageError;
}

// Usage errors dominate, then unsupported, then negative.
int combine(int a, int b) {
  auto rank = [](int c) { return c == UsageError ? 3 : c == UnsupportedCase ? 2 : c; };
  return rank(a) >= rank(b) ? a : b;
}

const char* verdict_name(int code) {
  switch (code) {
    case Positive: return "positive";
    case Negative: return "negative";
    case UnsupportedCase: return "unsupported";
    default: return "usage-error";
  }
}

json error_json(ErrorKind k, const std::string& msg) { return {{"kind", error_kind_name(k)}, {"message", msg}}; }

json matrix_json(const PolyMatrix& m, const std::vector<std::string>& base) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m.at(r, c).str(base));
    rows.push_back(std::move(row));
  }
  return rows;
}

json morphism_json(const CoalgebraMorphism& phi, const std::vector<std::string>& base) {
  json out = json::array();
  for (std::size_t i = 0; i < phi.phi.size(); ++i)
    out.push_back({{"level", -int(i + 1)}, {"matrix", matrix_json(phi.phi[i], base)}});
  return out;
}

json point_json(const std::vector<Rat>& p) {
  json out = json::array();
  for (const auto& r : p) out.push_back(r.get_str());
  return out;
}

json field_json(const VectorField& x) {
  json out = json::object();
  auto names = x.sig()->coordinate_names();
  for (std::size_t c = 0; c < names.size(); ++c)
    if (!x.action(c).is_zero()) out["d/d" + names[c]] = x.action(c).str();
  return out;
}

std::vector<std::vector<Rat>> points_for(const Document& doc, const RunOptions& opts,
                                         const std::vector<std::vector<Rat>>& declared) {
  auto pts = !opts.sample_points.empty() ? opts.sample_points : declared;
  if (pts.empty()) pts.push_back(std::vector<Rat>(doc.sig->m0(), Rat(0)));
  for (const auto& p : pts)
    if (p.size() != doc.sig->m0())
      throw UsageFailure("sample points must have " + std::to_string(doc.sig->m0()) + " coordinates");
  return pts;
}

std::vector<const FieldDecl*> selected_fields(const Document& doc, const RunOptions& opts) {
  std::vector<const FieldDecl*> out;
  if (opts.fields.empty()) {
    for (const auto& f : doc.fields) out.push_back(&f);
  } else {
    for (const auto& name : opts.fields) {
      const FieldDecl* f = doc.find_field(name);
      if (!f) throw UsageFailure("unknown vector field '" + name + "'");
      out.push_back(f);
    }
  }
  if (out.empty()) throw UsageFailure("document declares no vector fields");
  return out;
}

void require_coalgebras(const Document& doc) {
  if (doc.coalgebras.empty()) throw UsageFailure("document declares no coalgebras");
}

int cmd_check_coalgebra(const Document& doc, json& items) {
  require_coalgebras(doc);
  int code = Positive;
  for (const auto& c : doc.coalgebras) {
    auto rep = check_coalgebra(c.bundle);
    json w = json::array();
    for (const auto& x : rep.witnesses)
      w.push_back({{"level", -x.level}, {"frame_index", x.frame_index}, {"description", x.description}});
    items.push_back({{"kind", "coalgebra"},
                     {"name", c.name},
                     {"ranks", c.bundle.ranks()},
                     {"cocommutative", rep.cocommutative},
                     {"coassociative", rep.coassociative},
                     {"ok", rep.ok()},
                     {"witnesses", w}});
    if (!rep.ok()) code = combine(code, Negative);
  }
  for (const auto& m : doc.morphisms) {
    bool ok = morphism_check(m.phi, doc.find_coalgebra(m.source)->bundle, doc.find_coalgebra(m.target)->bundle);
    items.push_back({{"kind", "morphism"}, {"name", m.name}, {"source", m.source}, {"target", m.target}, {"ok", ok}});
    if (!ok) code = combine(code, Negative);
  }
  return code;
}

int cmd_admissible(const Document& doc, const RunOptions& opts, json& items) {
  require_coalgebras(doc);
  auto pts = points_for(doc, opts, {});
  int code = Positive;
  for (const auto& c : doc.coalgebras) {
    auto rep = check_admissible(c.bundle, pts);
    json levels = json::array();
    for (const auto& l : rep.levels) {
      json pj = json::array();
      for (const auto& p : l.points)
        pj.push_back({{"point", point_json(p.point)}, {"im_rank", p.im_rank}, {"K_rank", p.K_rank}, {"equal", p.equal}});
      levels.push_back({{"level", -l.level},
                        {"im_rank", l.im_rank},
                        {"K_rank", l.K_rank},
                        {"contained", l.contained},
                        {"equal", l.equal},
                        {"constant_rank", l.constant_rank},
                        {"pointwise_equal", l.pointwise_equal},
                        {"points", pj}});
    }
    items.push_back({{"name", c.name}, {"admissible", rep.admissible()}, {"levels", levels}});
    if (!rep.admissible()) code = combine(code, Negative);
  }
  return code;
}

bool is_identity(const CoalgebraMorphism& m) {
  for (const auto& p : m.phi)
    if (p != PolyMatrix::identity(p.rows(), p.nvars())) return false;
  return true;
}

int cmd_split_iso(const Document& doc, json& items) {
  require_coalgebras(doc);
  int code = Positive;
  for (const auto& c : doc.coalgebras) {
    try {
      auto iso = splitting_iso(c.bundle);
      bool phi_ok = morphism_check(iso.phi, c.bundle, iso.split);
      bool psi_ok = morphism_check(iso.psi, iso.split, c.bundle);
      bool inverse = is_identity(compose(iso.psi, iso.phi)) && is_identity(compose(iso.phi, iso.psi));
      bool ok = phi_ok && psi_ok && inverse;
      items.push_back({{"name", c.name},
                       {"ok", ok},
                       {"kernel_ranks", iso.kernel_ranks},
                       {"phi_is_morphism", phi_ok},
                       {"psi_is_morphism", psi_ok},
                       {"mutually_inverse", inverse},
                       {"phi", morphism_json(iso.phi, doc.base)},
                       {"psi", morphism_json(iso.psi, doc.base)}});
      if (!ok) code = combine(code, Negative);
    } catch (const GradmanError& e) {
      items.push_back({{"name", c.name}, {"ok", false}, {"error", error_json(e.kind(), e.what())}});
      code = combine(code, exit_for(e.kind()));
    }
  }
  return code;
}

std::string frame_combination(const ChartAlgebra& a, int level, const std::vector<Rat>& v) {
  const SigPtr& fs = a.frame_signature();
  GradedFunction f(fs);
  auto ids = fs->gens_of_degree(level);
  for (std::size_t i = 0; i < v.size() && i < ids.size(); ++i)
    if (v[i] != 0) f += GradedFunction::generator(fs, ids[i]) * v[i];
  return f.str();
}

int cmd_geometrize(const Document& doc, const RunOptions& opts, json& items) {
  require_coalgebras(doc);
  int code = Positive;
  for (const auto& c : doc.coalgebras) {
    try {
      ChartAlgebra a = geometrize(c.bundle, opts.max_degree);
      const auto& sig = *a.signature();
      json coords = json::array();
      for (const auto& g : sig.gens()) coords.push_back({{"name", g.name}, {"degree", g.degree}});
      json emb = json::array();
      for (int i = 1; i <= a.n(); ++i)
        for (std::size_t b = 0; b < c.bundle.rank(i); ++b)
          emb.push_back({{"frame", "th" + std::to_string(i) + "_" + std::to_string(b + 1)}, {"image", a.embedding(i, b).str()}});
      json rules = json::array();
      for (const auto& r : a.rewrite_rules())
        rules.push_back({{"level", -r.level}, {"lhs", frame_combination(a, r.level, r.lhs)}, {"rhs", r.rhs.str()}});
      auto conf = confluence_check(a);
      json quot = json::array();
      bool dims_ok = true;
      for (int l = 0; l <= a.n(); ++l) {
        std::size_t q = quotient_dimension(a, l);
        std::size_t predicted = monomials_of_degree(sig, l).size();
        dims_ok = dims_ok && q == predicted;
        quot.push_back({{"degree", l}, {"dimension", q}, {"monomial_count", predicted}});
      }
      CoalgebraBundle back = coalgebra_of(a);
      bool phi_ok = morphism_check(a.splitting().phi, c.bundle, back);
      bool psi_ok = morphism_check(a.splitting().psi, back, c.bundle);
      int n = c.bundle.n();
      std::size_t ker = c.bundle.rank(n) - (n == 1 ? 0 : rank_generic(c.bundle.mu(n)));
      std::size_t compat = top_degree_compat_dimension(c.bundle);
      bool ok = conf.ok && dims_ok && phi_ok && psi_ok && ker == compat;
      items.push_back({{"name", c.name},
                       {"ok", ok},
                       {"coordinates", coords},
                       {"embedding", emb},
                       {"rewrite_rules", rules},
                       {"confluent", conf.ok},
                       {"quotient_dimensions", quot},
                       {"round_trip", {{"phi_is_morphism", phi_ok}, {"psi_is_morphism", psi_ok}}},
                       {"top_degree", {{"compatible_derivations", compat}, {"kernel_rank", ker}}}});
      if (!ok) code = combine(code, Negative);
    } catch (const GradmanError& e) {
      items.push_back({{"name", c.name}, {"ok", false}, {"error", error_json(e.kind(), e.what())}});
      code = combine(code, exit_for(e.kind()));
    }
  }
  return code;
}

int cmd_reduce(const Document& doc, const RunOptions& opts, json& items) {
  if (doc.reductions.empty()) throw UsageFailure("document declares no reductions");
  std::map<std::string, ChartAlgebra> charts;
  int code = Positive;
  for (const auto& r : doc.reductions) {
    try {
      auto it = charts.find(r.coalgebra);
      if (it == charts.end())
        it = charts.emplace(r.coalgebra, geometrize(doc.find_coalgebra(r.coalgebra)->bundle, opts.max_degree)).first;
      GradedFunction f = parse_expression(r.expr, it->second.frame_signature());
      items.push_back({{"coalgebra", r.coalgebra}, {"input", f.str()}, {"normal_form", it->second.reduce(f).str()}});
    } catch (const GradmanError& e) {
      items.push_back({{"coalgebra", r.coalgebra}, {"input", r.expr}, {"error", error_json(e.kind(), e.what())}});
      code = combine(code, exit_for(e.kind()));
    }
  }
  return code;
}

int cmd_bracket(const Document& doc, const RunOptions& opts, json& items) {
  auto fs = selected_fields(doc, opts);
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = i; j < fs.size(); ++j) {
      VectorField b = bracket(fs[i]->field, fs[j]->field);
      items.push_back({{"first", fs[i]->name},
                       {"second", fs[j]->name},
                       {"degree", b.degree()},
                       {"bracket", b.str()},
                       {"actions", field_json(b)}});
    }
  return Positive;
}

int cmd_tangent(const Document& doc, const RunOptions& opts, json& items) {
  auto fs = selected_fields(doc, opts);
  auto pts = points_for(doc, opts, {});
  auto names = doc.sig->coordinate_names();
  std::vector<std::vector<TangentVector>> tv;
  for (const auto* f : fs) {
    json tj = json::array();
    tv.emplace_back();
    for (const auto& p : pts) {
      auto t = tangent_at(f->field, p);
      json comps = json::object();
      for (std::size_t c = 0; c < names.size(); ++c)
        if (t.components[c] != 0) comps[names[c]] = t.components[c].get_str();
      tj.push_back({{"point", point_json(p)}, {"components", comps}});
      tv.back().push_back(std::move(t));
    }
    items.push_back({{"kind", "field"}, {"name", f->name}, {"degree", f->field.degree()}, {"tangents", tj}});
  }
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = i + 1; j < fs.size(); ++j)
      items.push_back({{"kind", "pair"},
                       {"first", fs[i]->name},
                       {"second", fs[j]->name},
                       {"same_tangents", tv[i] == tv[j]},
                       {"same_field", fs[i]->field == fs[j]->field}});
  return Positive;
}

int cmd_qsquare(const Document& doc, const RunOptions& opts, json& items) {
  std::vector<const FieldDecl*> fs;
  for (const auto* f : selected_fields(doc, opts)) {
    if (f->field.degree() == 1) fs.push_back(f);
    else if (!opts.fields.empty()) throw UsageFailure("field '" + f->name + "' does not have degree 1");
  }
  if (fs.empty()) throw UsageFailure("document declares no degree 1 vector fields");
  int code = Positive;
  for (const auto* f : fs) {
    bool ok = is_homological(f->field);
    VectorField q2 = bracket(f->field, f->field) * make_rat(1, 2);
    items.push_back({{"name", f->name}, {"homological", ok}, {"q_squared", q2.str()}, {"actions", field_json(q2)}});
    if (!ok) code = combine(code, Negative);
  }
  return code;
}

Distribution build_distribution(const Document& doc, const DistDecl& d, const RunOptions& opts,
                                std::vector<std::string>& sorted_names) {
  std::vector<std::pair<std::string, VectorField>> gens;
  for (const auto& g : d.generators) gens.emplace_back(g, doc.find_field(g)->field);
  std::stable_sort(gens.begin(), gens.end(), [](const auto& a, const auto& b) { return a.second.degree() > b.second.degree(); });
  std::vector<VectorField> fields;
  for (auto& [n, f] : gens) {
    sorted_names.push_back(n);
    fields.push_back(f);
  }
  return make_distribution(doc.sig, fields, points_for(doc, opts, d.points));
}

int cmd_involutive(const Document& doc, const RunOptions& opts, json& items) {
  if (doc.dists.empty()) throw UsageFailure("document declares no distributions");
  int code = Positive;
  for (const auto& d : doc.dists) {
    try {
      std::vector<std::string> names;
      Distribution dd = build_distribution(doc, d, opts, names);
      auto rep = is_involutive(dd);
      json item = {{"name", d.name}, {"ranks", dd.rank_str()}, {"involutive", rep.involutive}};
      if (!rep.involutive) {
        auto cn = doc.sig->coordinate_names();
        json w = {{"pair", {names[rep.first], names[rep.second]}},
                  {"bracket", rep.bracket.str()},
                  {"residual", rep.certificate.residual.str()},
                  {"residual_actions", field_json(rep.certificate.residual)},
                  {"non_polynomial", rep.certificate.non_polynomial}};
        if (rep.certificate.witness_coordinate) {
          w["coordinate"] = cn[*rep.certificate.witness_coordinate];
          w["degree"] = rep.certificate.witness_degree;
        }
        item["witness"] = w;
        code = combine(code, Negative);
      }
      items.push_back(item);
    } catch (const GradmanError& e) {
      items.push_back({{"name", d.name}, {"involutive", false}, {"error", error_json(e.kind(), e.what())}});
      code = combine(code, exit_for(e.kind()));
    }
  }
  return code;
}

int cmd_frobenius(const Document& doc, const RunOptions& opts, json& items) {
  if (doc.dists.empty()) throw UsageFailure("document declares no distributions");
  int code = Positive;
  auto cn = doc.sig->coordinate_names();
  for (const auto& d : doc.dists) {
    try {
      FrobeniusChart chart;
      std::vector<std::string> names;
      if (opts.single_field) {
        if (d.generators.size() != 1) throw UsageFailure("--single-field needs a distribution with one generator");
        names = d.generators;
        chart = single_field_normal_form(doc.find_field(d.generators[0])->field, points_for(doc, opts, d.points)[0]);
      } else {
        chart = frobenius_normal_form(build_distribution(doc, d, opts, names));
      }
      json subst = json::array(), inverse = json::array();
      for (std::size_t c = 0; c < cn.size(); ++c) {
        GradedFunction id = GradedFunction::coordinate(doc.sig, c);
        if (chart.change.new_in_old[c] != id)
          subst.push_back({{"coordinate", cn[c]}, {"new_in_old", chart.change.new_in_old[c].str()}});
        if (chart.change.old_in_new[c] != id)
          inverse.push_back({{"coordinate", cn[c]}, {"old_in_new", chart.change.old_in_new[c].str()}});
      }
      json flat = json::array(), transformed = json::array();
      for (const auto& f : chart.flattened) flat.push_back(f.str());
      for (std::size_t i = 0; i < chart.transformed.size(); ++i)
        transformed.push_back({{"generator", names[i]}, {"field", chart.transformed[i].str()}});
      bool ok = chart.span_preserved && chart.invertible;
      items.push_back({{"name", d.name},
                       {"ok", ok},
                       {"substitution", subst},
                       {"inverse", inverse},
                       {"flattened", flat},
                       {"transformed", transformed},
                       {"span_preserved", chart.span_preserved},
                       {"invertible", chart.invertible},
                       {"log", chart.log}});
      if (!ok) code = combine(code, Negative);
    } catch (const GradmanError& e) {
      items.push_back({{"name", d.name}, {"ok", false}, {"error", error_json(e.kind(), e.what())}});
      code = combine(code, exit_for(e.kind()));
    }
  }
  return code;
}

int cmd_roundtrip(const Document& doc, const RunOptions& opts, json& items) {
  std::string text = pretty(doc);
  Document again = parse(text, opts.max_degree);
  std::string text2 = pretty(again);
  bool ok = again == doc && text == text2;
  items.push_back({{"stable", ok}, {"pretty", text}});
  return ok ? Positive : Negative;
}

json base_report(const std::string& sub) {
  return {{"schema", 1}, {"command", sub}, {"items", json::array()}};
}

Report finish(json j, int code) {
  j["exit_code"] = code;
  j["verdict"] = verdict_name(code);
  return {std::move(j), code};
}

}  // namespace

Report run(const std::string& subcommand, const Document& doc, const RunOptions& opts) {
  json j = base_report(subcommand);
  json& items = j["items"];
  int code = Positive;
  try {
    if (subcommand == "check-coalgebra") code = cmd_check_coalgebra(doc, items);
    else if (subcommand == "admissible") code = cmd_admissible(doc, opts, items);
    else if (subcommand == "split-iso") code = cmd_split_iso(doc, items);
    else if (subcommand == "geometrize") code = cmd_geometrize(doc, opts, items);
    else if (subcommand == "reduce") code = cmd_reduce(doc, opts, items);
    else if (subcommand == "bracket") code = cmd_bracket(doc, opts, items);
    else if (subcommand == "tangent") code = cmd_tangent(doc, opts, items);
    else if (subcommand == "qsquare") code = cmd_qsquare(doc, opts, items);
    else if (subcommand == "involutive") code = cmd_involutive(doc, opts, items);
    else if (subcommand == "frobenius") code = cmd_frobenius(doc, opts, items);
    else if (subcommand == "roundtrip") code = cmd_roundtrip(doc, opts, items);
    else throw UsageFailure("unknown subcommand '" + subcommand + "'");
  } catch (const UsageFailure& e) {
    j["error"] = {{"kind", "Usage"}, {"message", e.what()}};
    code = UsageError;
  } catch (const ParseError& e) {
    j["error"] = {{"kind", "Parse"}, {"message", e.diagnostic().message}, {"line", e.diagnostic().line},
                  {"column", e.diagnostic().column}, {"expected", e.diagnostic().expected}};
    code = UsageError;
  } catch (const GradmanError& e) {
    j["error"] = error_json(e.kind(), e.what());
    code = exit_for(e.kind());
  }
  return finish(std::move(j), code);
}

Report run(const std::string& subcommand, std::string_view source, const RunOptions& opts) {
  try {
    Document doc = parse(source, opts.max_degree);
    return run(subcommand, doc, opts);
  } catch (const ParseError& e) {
    json j = base_report(subcommand);
    j["error"] = {{"kind", "Parse"}, {"message", e.diagnostic().message}, {"line", e.diagnostic().line},
                  {"column", e.diagnostic().column}, {"expected", e.diagnostic().expected}};
    return finish(std::move(j), UsageError);
  } catch (const GradmanError& e) {
    json j = base_report(subcommand);
    j["error"] = error_json(e.kind(), e.what());
    return finish(std::move(j), exit_for(e.kind()));
  }
}

namespace {

std::string scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

bool is_flat(const json& v) {
  if (!v.is_array()) return false;
  return std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_primitive(); });
}

void render(const json& v, int indent, std::ostringstream& out) {
  std::string pad(std::size_t(indent), ' ');
  if (v.is_object()) {
    for (const auto& [k, e] : v.items()) {
      if (e.is_primitive()) {
        std::string s = scalar(e);
        if (s.find('\n') != std::string::npos) {
          out << pad << k << ":\n";
          std::istringstream lines(s);
          for (std::string line; std::getline(lines, line);) out << pad << "  | " << line << "\n";
        } else {
          out << pad << k << ": " << s << "\n";
        }
      } else if (is_flat(e)) {
        out << pad << k << ": [";
        for (std::size_t i = 0; i < e.size(); ++i) out << (i ? ", " : "") << scalar(e[i]);
        out << "]\n";
      } else if (e.empty()) {
        out << pad << k << ": " << (e.is_array() ? "[]" : "{}") << "\n";
      } else {
        out << pad << k << ":\n";
        render(e, indent + 2, out);
      }
    }
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (e.is_object()) {
        out << pad << "-\n";
        render(e, indent + 2, out);
      } else if (is_flat(e)) {
        out << pad << "- [";
        for (std::size_t i = 0; i < e.size(); ++i) out << (i ? ", " : "") << scalar(e[i]);
        out << "]\n";
      } else if (e.is_primitive()) {
        out << pad << "- " << scalar(e) << "\n";
      } else {
        out << pad << "-\n";
        render(e, indent + 2, out);
      }
    }
  }
}

}  // namespace

std::string render_text(const json& report) {
  std::ostringstream out;
  out << report.value("command", std::string()) << ": " << report.value("verdict", std::string()) << " (exit "
      << report.value("exit_code", 0) << ")\n";
  json rest = report;
  for (const char* k : {"command", "verdict", "exit_code", "schema"}) rest.erase(k);
  render(rest, 0, out);
  return out.str();
}

}  // namespace gradman
