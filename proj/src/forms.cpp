#include "conecert/forms.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace conecert {

long dim_k(int n, int d) {
  if (n < 1 || d < 1) throw std::invalid_argument("dim_k requires n >= 1 and d >= 1");
  // binom(n+d, n) - 1, exact in 64 bits for every basis this library touches
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned>(n + d), static_cast<unsigned>(n));
  b -= 1;
  if (!b.fits_slong_p()) throw std::overflow_error("dim_k overflow");
  return b.get_si();
}

int Dims::k() const { return static_cast<int>(dim_k(n, d)); }

namespace {

void emit_exponents(int vars_left, int degree_left, Exponent& partial,
                    std::vector<Exponent>& out) {
  if (vars_left == 1) {
    partial.push_back(degree_left);
    out.push_back(partial);
    partial.pop_back();
    return;
  }
  for (int e = degree_left; e >= 0; --e) {
    partial.push_back(e);
    emit_exponents(vars_left - 1, degree_left - e, partial, out);
    partial.pop_back();
  }
}

}  // namespace

std::vector<Exponent> exponent_list(int n, int d) {
  if (n < 1 || d < 1) throw std::invalid_argument("exponent_list requires n >= 1 and d >= 1");
  std::vector<Exponent> out;
  out.reserve(static_cast<size_t>(dim_k(n, d)) + 1);
  Exponent partial;
  emit_exponents(n + 1, d, partial, out);
  return out;
}

std::optional<int> exponent_index(const std::vector<Exponent>& basis, const Exponent& e) {
  auto it = std::lower_bound(basis.begin(), basis.end(), e, LexDescending{});
  if (it != basis.end() && *it == e) return static_cast<int>(it - basis.begin());
  return std::nullopt;
}

void Poly::add_term(const Exponent& e, const Rat& c) {
  if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("Poly term arity mismatch");
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  if (nvars_ != o.nvars_) throw std::invalid_argument("Poly arity mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (nvars_ != o.nvars_) throw std::invalid_argument("Poly arity mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
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
  if (nvars_ != o.nvars_) throw std::invalid_argument("Poly arity mismatch");
  Poly r(nvars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      Exponent e(nvars_);
      for (int v = 0; v < nvars_; ++v) e[v] = ea[v] + eb[v];
      r.add_term(e, ca * cb);
    }
  return r;
}

Poly Poly::operator*(const Rat& c) const {
  Poly r(nvars_);
  if (c == 0) return r;
  for (const auto& [e, coef] : terms_) r.add_term(e, coef * c);
  return r;
}

Rat Poly::evaluate(const std::vector<Rat>& point) const {
  if (static_cast<int>(point.size()) != nvars_) throw std::invalid_argument("Poly point arity mismatch");
  Rat total(0);
  for (const auto& [e, c] : terms_) {
    Rat term = c;
    for (int v = 0; v < nvars_; ++v)
      if (e[v] > 0) term *= rat_pow(point[v], static_cast<unsigned>(e[v]));
    total += term;
  }
  return total;
}

int Poly::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, exponent_degree(e));
  return d;
}

namespace {

std::string render_terms(const std::map<Exponent, Rat, LexDescending>& terms,
                         const std::string& var_prefix) {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms) {
    Rat a = rat_abs(c);
    if (first) {
      if (rat_sign(c) < 0) os << "-";
      first = false;
    } else {
      os << (rat_sign(c) < 0 ? " - " : " + ");
    }
    bool printed_coef = false;
    if (a != 1 || exponent_degree(e) == 0) {
      os << rat_to_string(a);
      printed_coef = true;
    }
    for (size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      if (printed_coef) os << "*";
      printed_coef = true;
      os << var_prefix << v;
      if (e[v] > 1) os << "^" << e[v];
    }
  }
  return os.str();
}

}  // namespace

std::string Poly::to_string(const std::string& var_prefix) const {
  return render_terms(terms_, var_prefix);
}

Form Form::from_terms(int nvars, int degree,
                      const std::vector<std::pair<Exponent, Rat>>& terms) {
  Form f(nvars, degree);
  for (const auto& [e, c] : terms) f.add_term(e, c);
  return f;
}

void Form::add_term(const Exponent& e, const Rat& c) {
  if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("Form term arity mismatch");
  for (int v : e)
    if (v < 0) throw std::invalid_argument("Form exponent entries must be nonnegative");
  if (exponent_degree(e) != degree_)
    throw std::invalid_argument("Form term breaks homogeneity: degree " +
                                std::to_string(exponent_degree(e)) + " in a degree-" +
                                std::to_string(degree_) + " form");
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Rat Form::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rat(0) : it->second;
}

Form Form::operator+(const Form& o) const {
  if (nvars_ != o.nvars_ || degree_ != o.degree_)
    throw std::invalid_argument("Form addition shape mismatch");
  Form r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

Form Form::operator-(const Form& o) const {
  if (nvars_ != o.nvars_ || degree_ != o.degree_)
    throw std::invalid_argument("Form subtraction shape mismatch");
  Form r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
  return r;
}

Form Form::operator*(const Rat& c) const {
  Form r(nvars_, degree_);
  if (c == 0) return r;
  for (const auto& [e, coef] : terms_) r.add_term(e, coef * c);
  return r;
}

std::string Form::to_string() const { return render_terms(terms_, "x"); }

Rat evaluate(const Form& f, const std::vector<Rat>& point) {
  if (static_cast<int>(point.size()) != f.nvars())
    throw std::invalid_argument("evaluate: point arity mismatch");
  Rat total(0);
  for (const auto& [e, c] : f.terms()) {
    Rat term = c;
    for (int v = 0; v < f.nvars(); ++v)
      if (e[v] > 0) term *= rat_pow(point[v], static_cast<unsigned>(e[v]));
    total += term;
  }
  return total;
}

Form permute_vars(const Form& f, const std::vector<int>& perm) {
  const int nv = f.nvars();
  if (static_cast<int>(perm.size()) != nv) throw std::invalid_argument("permute_vars: arity mismatch");
  std::vector<bool> seen(nv, false);
  for (int p : perm) {
    if (p < 0 || p >= nv || seen[p]) throw std::invalid_argument("permute_vars: not a bijection");
    seen[p] = true;
  }
  // g(X) = f(X_{perm[0]},...,X_{perm[n]}): slot j of f reads variable perm[j]
  Form g(nv, f.degree());
  for (const auto& [e, c] : f.terms()) {
    Exponent e2(nv, 0);
    for (int j = 0; j < nv; ++j) e2[perm[j]] += e[j];
    g.add_term(e2, c);
  }
  return g;
}

Form multiply(const Form& f, const Form& g) {
  if (f.nvars() != g.nvars()) throw std::invalid_argument("multiply: variable-count mismatch");
  Form r(f.nvars(), f.degree() + g.degree());
  for (const auto& [ea, ca] : f.terms())
    for (const auto& [eb, cb] : g.terms()) {
      Exponent e(f.nvars());
      for (int v = 0; v < f.nvars(); ++v) e[v] = ea[v] + eb[v];
      r.add_term(e, ca * cb);
    }
  return r;
}

Poly dehomogenize(const Form& f, int index) {
  const int nv = f.nvars();
  if (index < 0 || index >= nv) throw std::invalid_argument("dehomogenize: bad variable index");
  Poly p(nv - 1);
  for (const auto& [e, c] : f.terms()) {
    Exponent e2;
    e2.reserve(nv - 1);
    for (int v = 0; v < nv; ++v)
      if (v != index) e2.push_back(e[v]);
    p.add_term(e2, c);
  }
  return p;
}

namespace {

struct ParsedTerm {
  Rat coef;
  std::map<int, int> powers;  // variable index -> exponent
};

class TermParser {
 public:
  TermParser(const std::string& text, std::string prefix)
      : s_(text), prefix_(std::move(prefix)) {}

  std::vector<ParsedTerm> run() {
    std::vector<ParsedTerm> terms;
    skip_ws();
    bool negative = false;
    if (peek() == '+' || peek() == '-') negative = (get() == '-');
    while (true) {
      ParsedTerm t = parse_term();
      if (negative) t.coef = -t.coef;
      terms.push_back(std::move(t));
      skip_ws();
      if (pos_ >= s_.size()) break;
      char op = get();
      if (op == '+')
        negative = false;
      else if (op == '-')
        negative = true;
      else
        fail("expected '+' or '-'");
    }
    return terms;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("parse error at position " + std::to_string(pos_) + ": " + why);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  char get() { return pos_ < s_.size() ? s_[pos_++] : '\0'; }

  bool starts_with_prefix() {
    skip_ws();
    return s_.compare(pos_, prefix_.size(), prefix_) == 0 &&
           pos_ + prefix_.size() < s_.size() &&
           std::isdigit(static_cast<unsigned char>(s_[pos_ + prefix_.size()]));
  }

  long parse_integer() {
    skip_ws();
    size_t start = pos_;
    if (peek() == '-') ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start || (s_[start] == '-' && pos_ == start + 1)) fail("expected integer");
    return std::stol(s_.substr(start, pos_ - start));
  }

  Rat parse_coefficient() {
    long num = parse_integer();
    skip_ws();
    if (peek() == '/') {
      get();
      long den = parse_integer();
      if (den == 0) fail("zero denominator");
      Rat q(num, den);
      q.canonicalize();
      return q;
    }
    return Rat(num);
  }

  std::pair<int, int> parse_factor() {
    skip_ws();
    if (!starts_with_prefix()) fail("expected variable '" + prefix_ + "<idx>'");
    pos_ += prefix_.size();
    long idx = parse_integer();
    int exp = 1;
    skip_ws();
    if (peek() == '^') {
      get();
      long e = parse_integer();
      if (e < 0) fail("negative exponent");
      exp = static_cast<int>(e);
    }
    return {static_cast<int>(idx), exp};
  }

  ParsedTerm parse_term() {
    ParsedTerm t;
    t.coef = Rat(1);
    skip_ws();
    bool saw_factor = false;
    if (!starts_with_prefix()) {
      t.coef = parse_coefficient();
      skip_ws();
      if (peek() == '*') {
        get();
      } else if (!starts_with_prefix()) {
        return t;  // bare constant term
      }
    }
    while (true) {
      auto [idx, exp] = parse_factor();
      t.powers[idx] += exp;
      saw_factor = true;
      skip_ws();
      if (peek() == '*') {
        get();
        continue;
      }
      break;
    }
    if (!saw_factor && t.coef == 1) fail("empty term");
    return t;
  }

  const std::string& s_;
  std::string prefix_;
  size_t pos_ = 0;
};

}  // namespace

Form parse_form(const std::string& text, int nvars) {
  TermParser parser(text, "x");
  auto terms = parser.run();
  int max_idx = -1;
  for (const auto& t : terms)
    for (const auto& [idx, exp] : t.powers) max_idx = std::max(max_idx, idx);
  int nv = std::max(nvars, max_idx + 1);
  if (nv < 1) throw std::invalid_argument("parse_form: no variables");
  int degree = -1;
  for (const auto& t : terms) {
    int d = 0;
    for (const auto& [idx, exp] : t.powers) d += exp;
    if (degree == -1)
      degree = d;
    else if (d != degree && t.coef != 0)
      throw std::invalid_argument("parse_form: input is not homogeneous");
  }
  Form f(nv, degree < 0 ? 0 : degree);
  for (const auto& t : terms) {
    Exponent e(nv, 0);
    for (const auto& [idx, exp] : t.powers) e[idx] = exp;
    f.add_term(e, t.coef);
  }
  return f;
}

Poly parse_poly(const std::string& text, int nvars, const std::string& var_prefix) {
  TermParser parser(text, var_prefix);
  auto terms = parser.run();
  Poly p(nvars);
  for (const auto& t : terms) {
    Exponent e(nvars, 0);
    for (const auto& [idx, exp] : t.powers) {
      if (idx >= nvars) throw std::invalid_argument("parse_poly: variable index out of range");
      e[idx] = exp;
    }
    p.add_term(e, t.coef);
  }
  return p;
}

}  // namespace conecert
