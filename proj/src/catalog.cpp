#include "conecert/catalog.hpp"

#include <mutex>

namespace conecert {
namespace catalog {

namespace {

SymMatrix matrix_from_triples(int size, const std::vector<std::tuple<int, int, Rat>>& triples) {
  SymMatrix m(size);
  for (const auto& [i, j, v] : triples) m.set(i, j, v);
  return m;
}

// Chart points are stored as free-coordinate assignments and expanded on
// load; keeping them as data makes every reproduction run identical. The sets
// are the Farkas supports found by the default search (seed 0) and can be
// regenerated with `refute --strategy search --seed 0`.
std::vector<std::vector<Rat>> expand_points(const Dims& dims, int level,
                                            const std::vector<std::vector<int>>& free_parts,
                                            int denominator = 1) {
  const ChartMap ch = chart(dims, level);
  std::vector<std::vector<Rat>> out;
  out.reserve(free_parts.size());
  for (const auto& fp : free_parts) {
    std::vector<Rat> fv(fp.size());
    for (size_t p = 0; p < fp.size(); ++p) {
      fv[p] = Rat(fp[p], denominator);
      fv[p].canonicalize();
    }
    out.push_back(chart_point_from_free(ch, fv));
  }
  return out;
}

std::map<std::string, CatalogEntry> build_catalog() {
  std::map<std::string, CatalogEntry> entries;

  auto add = [&](CatalogEntry e) {
    if (e.gram) {
      const Dims dims(e.form.nvars() - 1, e.form.degree() / 2);
      if (gram_apply(*e.gram, dims) != e.form)
        throw std::logic_error("catalog: stored Gram matrix does not reproduce " + e.name);
    }
    entries.emplace(e.name, std::move(e));
  };

  const Rat one(1), minus_two(-2), minus_three_halves(-3, 2);

  // ternary sextics ------------------------------------------------------
  const Form motzkin = parse_form("x0^4*x1^2 + x0^2*x1^4 + x2^6 - 3*x0^2*x1^2*x2^2");
  const Form motzkin_sigma = permute_vars(motzkin, {0, 2, 1});
  const Form cl_sextic = parse_form("x0^4*x1^2 + x0^2*x2^4 + x1^4*x2^2 - 3*x0^2*x1^2*x2^2");
  const Form cl_sextic_tau = permute_vars(cl_sextic, {0, 2, 1});

  add(CatalogEntry{
      "motzkin",
      "Motzkin's ternary sextic, the first explicit PSD form with no SOS representation",
      motzkin,
      matrix_from_triples(10, {{1, 1, one}, {3, 3, one}, {9, 9, one}, {2, 7, minus_three_halves}}),
      7,
      {},
      {7, 7}});
  add(CatalogEntry{
      "motzkin_sigma",
      "Motzkin's sextic with the last two variables swapped",
      motzkin_sigma,
      matrix_from_triples(10, {{2, 2, one},
                               {4, 4, one},
                               {5, 5, one},
                               {6, 6, one},
                               {3, 3, Rat(4)},
                               {1, 6, minus_two},
                               {3, 5, minus_two}}),
      4,
      {},
      {4, 4}});
  add(CatalogEntry{
      "choi_lam_sextic",
      "Choi-Lam ternary sextic, PSD but not SOS",
      cl_sextic,
      matrix_from_triples(10, {{1, 1, one}, {5, 5, one}, {7, 7, one}, {2, 7, minus_three_halves}}),
      5,
      {},
      {5, 5}});
  add(CatalogEntry{
      "choi_lam_sextic_tau",
      "Choi-Lam ternary sextic with the last two variables swapped",
      cl_sextic_tau,
      matrix_from_triples(10, {{2, 2, one}, {3, 3, one}, {8, 8, one}, {1, 8, minus_three_halves}}),
      6,
      {},
      {6, 6}});

  // quaternary quartics ---------------------------------------------------
  const Form cl_quartic =
      parse_form("x0^2*x1^2 + x0^2*x2^2 + x1^2*x2^2 + x3^4 - 4*x0*x1*x2*x3");
  const Form cl_quartic_sigma = permute_vars(cl_quartic, {0, 3, 1, 2});
  const Form cl_quartic_tau = permute_vars(cl_quartic, {3, 1, 2, 0});

  add(CatalogEntry{
      "choi_lam_quartic",
      "Choi-Lam quaternary quartic, PSD but not SOS",
      cl_quartic,
      matrix_from_triples(10, {{1, 1, one}, {2, 2, one}, {5, 5, one}, {9, 9, one},
                               {2, 6, minus_two}}),
      6,
      {},
      {6, 6}});
  add(CatalogEntry{
      "choi_lam_quartic_sigma",
      "Choi-Lam quartic precomposed with the cycle (x1 x3 x2)",
      cl_quartic_sigma,
      matrix_from_triples(10, {{1, 1, one}, {3, 3, one}, {6, 6, one}, {7, 7, one},
                               {2, 6, minus_two}}),
      4,
      {},
      {4, 4}});
  add(CatalogEntry{
      "choi_lam_quartic_tau",
      "Choi-Lam quartic precomposed with the transposition (x0 x3)",
      cl_quartic_tau,
      matrix_from_triples(10, {{0, 0, one}, {5, 5, one}, {6, 6, one}, {8, 8, one},
                               {2, 6, minus_two}}),
      5,
      {},
      {5, 5}});

  // quaternary sextic used for the variable-count transfers ---------------
  const Form x1sq_cl_tau = multiply(parse_form("x1^2", 4), cl_quartic_tau);
  add(CatalogEntry{
      "x1sq_choi_lam_tau",
      "x1^2 times the permuted Choi-Lam quartic; separates deep in the quaternary sextic chain",
      x1sq_cl_tau,
      matrix_from_triples(20, {{1, 1, one},
                               {11, 11, one},
                               {12, 12, one},
                               {14, 14, one},
                               {4, 4, Rat(4)},
                               {4, 14, minus_two},
                               {1, 10, minus_two}}),
      11,
      {},
      {11, 11}});

  return entries;
}

std::map<std::string, CatalogEntry>& instance() {
  static std::map<std::string, CatalogEntry> entries = build_catalog();
  return entries;
}

}  // namespace

const CatalogEntry& get(const std::string& name) {
  const auto& entries = instance();
  auto it = entries.find(name);
  if (it == entries.end()) throw std::invalid_argument("unknown catalog form: " + name);
  return it->second;
}

const std::vector<std::string>& names() {
  static std::vector<std::string> out = [] {
    std::vector<std::string> v;
    for (const auto& [name, entry] : instance()) v.push_back(name);
    return v;
  }();
  return out;
}

const CatalogEntry* match(const Form& f) {
  for (const auto& [name, entry] : instance())
    if (entry.form == f) return &entry;
  return nullptr;
}

}  // namespace catalog

std::vector<ChainStep> expected_chain(int num_vars, int degree) {
  const int n = num_vars - 1;
  if (degree % 2 != 0 || n < 1) throw std::invalid_argument("expected_chain: bad case");
  const int d = degree / 2;
  const bool supported = (num_vars == 4 && degree == 4) || (num_vars == 3 && degree == 6) ||
                         (num_vars >= 5 && degree == 4) || (num_vars >= 4 && degree == 6);
  if (!supported) throw std::invalid_argument("expected_chain: unsupported case");
  const int k = static_cast<int>(dim_k(n, d));
  const int equal_until = (n <= 2) ? n + 1 : n;  // ternary chains collapse one step further
  std::vector<ChainStep> chain;
  for (int level = 0; level < k - n; ++level)
    chain.push_back(ChainStep{level, level < equal_until ? ChainLink::Equal
                                                         : ChainLink::StrictExpected});
  return chain;
}

}  // namespace conecert
