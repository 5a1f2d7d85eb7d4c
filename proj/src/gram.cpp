#include "conecert/gram.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace conecert {

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (size_ != o.size_) throw std::invalid_argument("SymMatrix size mismatch");
  SymMatrix r(size_);
  for (size_t p = 0; p < a_.size(); ++p) r.a_[p] = a_[p] + o.a_[p];
  return r;
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  if (size_ != o.size_) throw std::invalid_argument("SymMatrix size mismatch");
  SymMatrix r(size_);
  for (size_t p = 0; p < a_.size(); ++p) r.a_[p] = a_[p] - o.a_[p];
  return r;
}

SymMatrix SymMatrix::operator*(const Rat& c) const {
  SymMatrix r(size_);
  for (size_t p = 0; p < a_.size(); ++p) r.a_[p] = a_[p] * c;
  return r;
}

bool SymMatrix::is_zero() const {
  for (const Rat& v : a_)
    if (v != 0) return false;
  return true;
}

std::vector<std::tuple<int, int, Rat>> SymMatrix::upper_nonzeros() const {
  std::vector<std::tuple<int, int, Rat>> out;
  for (int i = 0; i < size_; ++i)
    for (int j = i; j < size_; ++j)
      if (get(i, j) != 0) out.emplace_back(i, j, get(i, j));
  return out;
}

Rat SymMatrix::quadratic_form(const std::vector<Rat>& z) const {
  if (static_cast<int>(z.size()) != size_) throw std::invalid_argument("quadratic_form arity mismatch");
  Rat total(0);
  for (int i = 0; i < size_; ++i) {
    if (z[i] == 0) continue;
    for (int j = i; j < size_; ++j) {
      const Rat& a = get(i, j);
      if (a == 0 || z[j] == 0) continue;
      Rat v = a * z[i] * z[j];
      total += (i == j) ? v : Rat(2) * v;
    }
  }
  return total;
}

SymMatrix GramCoset::at(const std::vector<Rat>& lambda) const {
  if (lambda.size() != kernel.size()) throw std::invalid_argument("GramCoset lambda arity mismatch");
  SymMatrix a = base;
  for (size_t r = 0; r < kernel.size(); ++r) {
    if (lambda[r] == 0) continue;
    for (auto& [i, j, v] : kernel[r].upper_nonzeros()) a.add(i, j, lambda[r] * v);
  }
  return a;
}

Form gram_apply(const SymMatrix& a, const Dims& dims) {
  const auto basis = exponent_list(dims.n, dims.d);
  if (a.size() != static_cast<int>(basis.size()))
    throw std::invalid_argument("gram_apply: matrix size does not match basis");
  Form f(dims.num_vars(), 2 * dims.d);
  for (auto& [i, j, v] : a.upper_nonzeros()) {
    Exponent e(dims.num_vars());
    for (int t = 0; t < dims.num_vars(); ++t) e[t] = basis[i][t] + basis[j][t];
    f.add_term(e, (i == j) ? v : Rat(2) * v);
  }
  return f;
}

std::vector<Relation> relations(const Dims& dims) {
  const auto basis = exponent_list(dims.n, dims.d);
  const int m = static_cast<int>(basis.size());
  // group index pairs by exponent sum
  std::map<Exponent, std::vector<std::pair<int, int>>> groups;
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      Exponent sum(dims.num_vars());
      for (int t = 0; t < dims.num_vars(); ++t) sum[t] = basis[i][t] + basis[j][t];
      groups[sum].emplace_back(i, j);
    }
  std::vector<Relation> out;
  for (auto& [sum, pairs] : groups) {
    for (size_t p = 0; p < pairs.size(); ++p)
      for (size_t q = p + 1; q < pairs.size(); ++q)
        out.push_back({pairs[p].first, pairs[p].second, pairs[q].first, pairs[q].second});
  }
  std::sort(out.begin(), out.end(), [](const Relation& a, const Relation& b) {
    return std::tie(a.i, a.j, a.s, a.t) < std::tie(b.i, b.j, b.s, b.t);
  });
  return out;
}

SymMatrix relation_matrix(const Relation& r, int size) {
  SymMatrix m(size);
  const Rat half(1, 2);
  if (r.i == r.j)
    m.add(r.i, r.i, Rat(1));
  else
    m.set(r.i, r.j, half);
  if (r.s == r.t)
    m.add(r.s, r.s, Rat(-1));
  else
    m.set(r.s, r.t, m.get(r.s, r.t) - half);
  return m;
}

namespace {

size_t upper_slot(int i, int j, int size) {
  // position of (i,j), i <= j, in the row-major vectorized upper triangle
  return static_cast<size_t>(i) * size - static_cast<size_t>(i) * (i - 1) / 2 + (j - i);
}

}  // namespace

namespace {

std::vector<SymMatrix> kernel_basis_uncached(const Dims& dims);

}  // namespace

std::vector<SymMatrix> kernel_basis(const Dims& dims) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<SymMatrix>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(dims.n, dims.d);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, kernel_basis_uncached(dims)).first;
  return it->second;
}

namespace {

std::vector<SymMatrix> kernel_basis_uncached(const Dims& dims) {
  const int size = dims.k() + 1;
  const size_t cols = static_cast<size_t>(size) * (size + 1) / 2;
  const auto rels = relations(dims);

  // exact elimination over the vectorized upper triangle keeps the first
  // relation of each pivot pattern; order stays canonical
  std::vector<std::vector<std::pair<size_t, Rat>>> reduced_rows;  // sparse, pivot first
  std::vector<SymMatrix> basis;
  for (const Relation& rel : rels) {
    SymMatrix m = relation_matrix(rel, size);
    std::map<size_t, Rat> row;
    for (auto& [i, j, v] : m.upper_nonzeros()) row[upper_slot(i, j, size)] = v;
    for (const auto& prev : reduced_rows) {
      if (row.empty()) break;
      auto it = row.find(prev.front().first);
      if (it == row.end()) continue;
      Rat factor = it->second / prev.front().second;
      for (const auto& [slot, v] : prev) {
        auto rit = row.find(slot);
        if (rit == row.end())
          row[slot] = -factor * v;
        else {
          rit->second -= factor * v;
          if (rit->second == 0) row.erase(rit);
        }
      }
    }
    if (row.empty()) continue;  // dependent on earlier relations
    reduced_rows.emplace_back(row.begin(), row.end());
    basis.push_back(std::move(m));
  }
  (void)cols;
  return basis;
}

}  // namespace

GramCoset generic_gram(const Form& f) {
  if (f.degree() % 2 != 0) throw std::invalid_argument("generic_gram: form degree must be even");
  const int d = f.degree() / 2;
  const int n = f.nvars() - 1;
  const Dims dims(n, d);
  const auto basis = exponent_list(n, d);
  const int size = static_cast<int>(basis.size());

  SymMatrix base(size);
  for (const auto& [beta, coef] : f.terms()) {
    // most balanced representing pair: largest i with alpha_i + alpha_j = beta
    int found_i = -1, found_j = -1;
    for (int i = size - 1; i >= 0; --i) {
      Exponent rest(f.nvars());
      bool ok = true;
      for (int t = 0; t < f.nvars(); ++t) {
        rest[t] = beta[t] - basis[i][t];
        if (rest[t] < 0) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      auto j = exponent_index(basis, rest);
      if (j && *j >= i) {
        found_i = i;
        found_j = *j;
        break;
      }
    }
    if (found_i < 0) throw std::logic_error("generic_gram: monomial admits no representing pair");
    if (found_i == found_j)
      base.add(found_i, found_i, coef);
    else
      base.add(found_i, found_j, coef / 2);
  }
  return GramCoset{std::move(base), kernel_basis(dims)};
}

SymMatrix restrict_gram(const SymMatrix& b, const std::vector<int>& index_set) {
  for (size_t p = 0; p + 1 < index_set.size(); ++p)
    if (index_set[p] >= index_set[p + 1])
      throw std::invalid_argument("restrict_gram: index set must be strictly increasing");
  if (!index_set.empty() && (index_set.front() < 0 || index_set.back() >= b.size()))
    throw std::out_of_range("restrict_gram: index out of range");
  SymMatrix a(static_cast<int>(index_set.size()));
  for (size_t i = 0; i < index_set.size(); ++i)
    for (size_t j = i; j < index_set.size(); ++j)
      a.set(static_cast<int>(i), static_cast<int>(j), b.get(index_set[i], index_set[j]));
  return a;
}

SymMatrix expand_gram(const SymMatrix& a, const std::vector<int>& index_set, const Dims& big_dims) {
  const int big_size = big_dims.k() + 1;
  if (static_cast<int>(index_set.size()) != a.size())
    throw std::invalid_argument("expand_gram: index set size must match matrix");
  for (size_t p = 0; p + 1 < index_set.size(); ++p)
    if (index_set[p] >= index_set[p + 1])
      throw std::invalid_argument("expand_gram: index set must be strictly increasing");
  if (!index_set.empty() && (index_set.front() < 0 || index_set.back() >= big_size))
    throw std::out_of_range("expand_gram: index out of range");
  SymMatrix b(big_size);
  for (int i = 0; i < a.size(); ++i)
    for (int j = i; j < a.size(); ++j)
      b.set(index_set[i], index_set[j], a.get(i, j));
  return b;
}

std::vector<int> index_set_for_substitution(const Dims& small_dims, const Dims& big_dims,
                                            const std::vector<int>& injection) {
  if (static_cast<int>(injection.size()) != small_dims.num_vars())
    throw std::invalid_argument("index_set_for_substitution: injection arity mismatch");
  for (size_t p = 0; p + 1 < injection.size(); ++p)
    if (injection[p] >= injection[p + 1])
      throw std::invalid_argument("index_set_for_substitution: injection must be strictly increasing");
  if (injection.front() < 0 || injection.back() > big_dims.n)
    throw std::invalid_argument("index_set_for_substitution: injection out of range");
  if (small_dims.d != big_dims.d)
    throw std::invalid_argument("index_set_for_substitution: degree mismatch");

  std::vector<bool> allowed(big_dims.num_vars(), false);
  for (int v : injection) allowed[v] = true;

  const auto big_basis = exponent_list(big_dims.n, big_dims.d);
  std::vector<int> index_set;
  for (int i = 0; i < static_cast<int>(big_basis.size()); ++i) {
    bool supported = true;
    for (int t = 0; t < big_dims.num_vars(); ++t)
      if (big_basis[i][t] > 0 && !allowed[t]) {
        supported = false;
        break;
      }
    if (supported) index_set.push_back(i);
  }
  if (index_set.size() != static_cast<size_t>(small_dims.k()) + 1)
    throw std::logic_error("index_set_for_substitution: unexpected index-set size");
  return index_set;
}

std::vector<int> index_set_for_degree_raise(const Dims& dims, int delta) {
  if (delta != dims.d) throw std::invalid_argument("index_set_for_degree_raise: delta must equal dims.d");
  const auto small_basis = exponent_list(dims.n, delta);
  const auto big_basis = exponent_list(dims.n, delta + 1);
  // under descending lex the X_0-divisible monomials occupy exactly the prefix
  for (size_t p = 0; p < small_basis.size(); ++p) {
    Exponent raised = small_basis[p];
    raised[0] += 1;
    if (big_basis[p] != raised)
      throw std::logic_error("index_set_for_degree_raise: prefix property violated");
  }
  std::vector<int> index_set(small_basis.size());
  for (size_t p = 0; p < small_basis.size(); ++p) index_set[p] = static_cast<int>(p);
  return index_set;
}

}  // namespace conecert
