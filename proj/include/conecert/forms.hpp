#ifndef CONECERT_FORMS_HPP
#define CONECERT_FORMS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conecert/rational.hpp"

namespace conecert {

// Exponent vector of a monomial; entries are nonnegative, one per variable.
using Exponent = std::vector<int>;

inline int exponent_degree(const Exponent& e) {
  int d = 0;
  for (int v : e) d += v;
  return d;
}

// Descending lexicographic order: (d,0,...,0) comes first in a degree-d basis.
struct LexDescending {
  bool operator()(const Exponent& a, const Exponent& b) const {
    return a > b;  // vector's lexicographic >
  }
};

// Basis dimensions: forms live in n+1 variables X_0..X_n, monomial basis of
// degree d has k+1 elements with k = binom(n+d, n) - 1.
struct Dims {
  int n;
  int d;

  Dims(int n_, int d_) : n(n_), d(d_) {
    if (n < 1 || d < 1) throw std::invalid_argument("Dims requires n >= 1 and d >= 1");
  }

  int k() const;
  int num_vars() const { return n + 1; }

  bool operator==(const Dims& o) const { return n == o.n && d == o.d; }
  bool operator!=(const Dims& o) const { return !(*this == o); }
};

// k(n,d) = binom(n+d, n) - 1. Rejects degenerate bases (n = 0 or d = 0).
long dim_k(int n, int d);

// All degree-d exponents over n+1 variables in strictly descending lex order.
std::vector<Exponent> exponent_list(int n, int d);

// Index of an exponent within exponent_list(n, d); nullopt if not a valid
// degree-d exponent.
std::optional<int> exponent_index(const std::vector<Exponent>& basis, const Exponent& e);

// General sparse polynomial with exact rational coefficients. Variables are
// identified by index 0..nvars-1; no homogeneity is imposed. Used for chart
// restrictions and dehomogenizations.
class Poly {
 public:
  using TermMap = std::map<Exponent, Rat, LexDescending>;

  explicit Poly(int nvars) : nvars_(nvars) {}

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Exponent& e, const Rat& c);

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(const Rat& c) const;
  bool operator==(const Poly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  Rat evaluate(const std::vector<Rat>& point) const;

  // Total degree; -1 for the zero polynomial.
  int degree() const;

  std::string to_string(const std::string& var_prefix = "z") const;

 private:
  int nvars_;
  TermMap terms_;
};

// Homogeneous form with exact rational coefficients. All stored exponents
// share the same total degree and no zero coefficients are kept.
class Form {
 public:
  using TermMap = std::map<Exponent, Rat, LexDescending>;

  Form(int nvars, int degree) : nvars_(nvars), degree_(degree) {
    if (nvars < 1 || degree < 0) throw std::invalid_argument("Form needs nvars >= 1, degree >= 0");
  }

  static Form from_terms(int nvars, int degree, const std::vector<std::pair<Exponent, Rat>>& terms);

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Exponent& e, const Rat& c);
  Rat coefficient(const Exponent& e) const;

  Form operator+(const Form& o) const;
  Form operator-(const Form& o) const;
  Form operator*(const Rat& c) const;
  bool operator==(const Form& o) const {
    return nvars_ == o.nvars_ && degree_ == o.degree_ && terms_ == o.terms_;
  }
  bool operator!=(const Form& o) const { return !(*this == o); }

  std::string to_string() const;

 private:
  int nvars_;
  int degree_;
  TermMap terms_;
};

// Exact value of f at a rational point with matching coordinate count.
Rat evaluate(const Form& f, const std::vector<Rat>& point);

// g with g(X_0,...,X_n) = f(X_{perm[0]},...,X_{perm[n]}); perm must be a
// bijection on {0..n}.
Form permute_vars(const Form& f, const std::vector<int>& perm);

// Exact product; degrees add, variable counts must match.
Form multiply(const Form& f, const Form& g);

// Substitute 1 for variable `index`; the result lives in the remaining
// variables, re-indexed in order (variable j keeps id j-1 for j > index).
Poly dehomogenize(const Form& f, int index);

// Text form of the grammar `term ((+|-) term)*` with factors `x<idx>[^<exp>]`
// and integer or p/q coefficients; whitespace-insensitive. The variable count
// is inferred from the highest index unless `nvars` forces a wider ring.
Form parse_form(const std::string& text, int nvars = -1);

// Same grammar over an arbitrary variable prefix, without the homogeneity
// requirement.
Poly parse_poly(const std::string& text, int nvars, const std::string& var_prefix = "z");

}  // namespace conecert

#endif  // CONECERT_FORMS_HPP
