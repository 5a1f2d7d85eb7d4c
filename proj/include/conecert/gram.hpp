#ifndef CONECERT_GRAM_HPP
#define CONECERT_GRAM_HPP

#include <tuple>
#include <vector>

#include "conecert/forms.hpp"

namespace conecert {

// Exact rational symmetric matrix, stored dense. Writes through set() keep
// the matrix symmetric by construction.
class SymMatrix {
 public:
  explicit SymMatrix(int size) : size_(size), a_(static_cast<size_t>(size) * size, Rat(0)) {
    if (size < 1) throw std::invalid_argument("SymMatrix size must be positive");
  }

  int size() const { return size_; }

  const Rat& get(int i, int j) const { return a_[idx(i, j)]; }

  void set(int i, int j, const Rat& v) {
    a_[idx(i, j)] = v;
    a_[idx(j, i)] = v;
  }

  void add(int i, int j, const Rat& v) {
    a_[idx(i, j)] += v;
    if (i != j) a_[idx(j, i)] += v;
  }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(const Rat& c) const;
  bool operator==(const SymMatrix& o) const { return size_ == o.size_ && a_ == o.a_; }
  bool operator!=(const SymMatrix& o) const { return !(*this == o); }

  bool is_zero() const;

  // Upper-triangle nonzeros as (i, j, value) with i <= j.
  std::vector<std::tuple<int, int, Rat>> upper_nonzeros() const;

  // Value of the quadratic form z A z^t at an exact point.
  Rat quadratic_form(const std::vector<Rat>& z) const;

 private:
  size_t idx(int i, int j) const {
    if (i < 0 || j < 0 || i >= size_ || j >= size_) throw std::out_of_range("SymMatrix index");
    return static_cast<size_t>(i) * size_ + j;
  }

  int size_;
  std::vector<Rat> a_;
};

// A pair of index pairs {(i,j),(s,t)}, i <= j, s <= t, with equal exponent
// sums in the degree-d basis; the binomial Z_iZ_j - Z_sZ_t vanishes on the
// Veronese image.
struct Relation {
  int i, j, s, t;

  bool operator==(const Relation& o) const {
    return i == o.i && j == o.j && s == o.s && t == o.t;
  }
};

// Affine coset of all Gram matrices of one form: base + span(kernel).
struct GramCoset {
  SymMatrix base;
  std::vector<SymMatrix> kernel;

  SymMatrix at(const std::vector<Rat>& lambda) const;
};

// Sum over entries: a_{ij} X^{alpha_i + alpha_j}; linear in A.
Form gram_apply(const SymMatrix& a, const Dims& dims);

// Every relation of the degree-d basis, emitted once, ordered lexicographically
// by (i, j, s, t).
std::vector<Relation> relations(const Dims& dims);

// Symmetrized elementary difference E(i,j) - E(s,t) for one relation: unit
// diagonal entries, 1/2 off diagonal, so gram_apply maps it to zero.
SymMatrix relation_matrix(const Relation& r, int size);

// Linearly independent kernel matrices spanning ker of the Gram map. The
// generating set from relations() is reduced to a basis by exact elimination
// over the vectorized upper triangle; order follows the canonical relation
// order.
std::vector<SymMatrix> kernel_basis(const Dims& dims);

// Deterministic base Gram matrix of f (the coefficient of each monomial sits
// on its most balanced representing pair) together with the kernel basis.
GramCoset generic_gram(const Form& f);

// Principal submatrix on a strictly increasing index set.
SymMatrix restrict_gram(const SymMatrix& b, const std::vector<int>& index_set);

// Zero-padded expansion: entries of `a` land on index_set x index_set.
SymMatrix expand_gram(const SymMatrix& a, const std::vector<int>& index_set, const Dims& big_dims);

// Indices of the big basis whose exponents are supported on the injected
// variables, in order; size equals the small basis size.
std::vector<int> index_set_for_substitution(const Dims& small_dims, const Dims& big_dims,
                                            const std::vector<int>& injection);

// Verifies that the first k(n,d)+1 exponents of the degree-(d+1) basis are
// exactly X_0 times the degree-d basis, in order, and returns that prefix.
std::vector<int> index_set_for_degree_raise(const Dims& dims, int delta);

}  // namespace conecert

#endif  // CONECERT_GRAM_HPP
