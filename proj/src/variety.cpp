#include "conecert/variety.hpp"

#include <algorithm>
#include <set>

namespace conecert {

BinomialRelation relation_at_level(const Dims& dims, int level) {
  const int k = dims.k();
  if (level < 1 || level > k - dims.n)
    throw std::invalid_argument("relation_at_level: level out of range");
  const auto basis = exponent_list(dims.n, dims.d);
  const int target = dims.n + level;
  Exponent sum(dims.num_vars());
  for (int v = 0; v < dims.num_vars(); ++v) sum[v] = basis[0][v] + basis[target][v];
  for (int s = 1; s <= k; ++s) {
    Exponent rest(dims.num_vars());
    bool ok = true;
    for (int v = 0; v < dims.num_vars(); ++v) {
      rest[v] = sum[v] - basis[s][v];
      if (rest[v] < 0) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    auto t = exponent_index(basis, rest);
    if (t && *t >= s) {
      // lex additivity forces the factor indices below the produced one
      if (*t >= target) throw std::logic_error("relation_at_level: factor index not below target");
      return BinomialRelation{level, s, *t};
    }
  }
  throw std::logic_error("relation_at_level: no splitting pair found");
}

ChartMap chart(const Dims& dims, int level) {
  const int k = dims.k();
  if (level < 0 || level > k - dims.n) throw std::invalid_argument("chart: level out of range");
  ChartMap c{dims, level, {}, {}};
  const auto basis = exponent_list(dims.n, dims.d);
  for (int j = 1; j <= level; ++j) {
    const int dep = dims.n + j;
    // the dependent monomial is the exponent of m_{n+j} with X_0 dropped;
    // equal to the recursive product z_{s_j} z_{t_j} by induction on j
    Exponent mono(basis[dep].begin() + 1, basis[dep].end());
    c.dependent.emplace(dep, std::move(mono));
  }
  for (int i = 1; i <= k; ++i)
    if (!c.dependent.count(i)) c.free.push_back(i);
  return c;
}

std::vector<Rat> chart_point_from_free(const ChartMap& chart, const std::vector<Rat>& free_values) {
  if (free_values.size() != chart.free.size())
    throw std::invalid_argument("chart_point_from_free: arity mismatch");
  const int k = chart.dims.k();
  std::vector<Rat> z(static_cast<size_t>(k) + 1, Rat(0));
  z[0] = 1;
  for (size_t p = 0; p < chart.free.size(); ++p) z[chart.free[p]] = free_values[p];
  for (const auto& [dep, mono] : chart.dependent) {
    Rat v(1);
    for (int t = 0; t < chart.dims.n; ++t)
      if (mono[t] > 0) v *= rat_pow(z[t + 1], static_cast<unsigned>(mono[t]));
    z[dep] = v;
  }
  return z;
}

bool on_chart(const Dims& dims, int level, const std::vector<Rat>& point) {
  if (static_cast<int>(point.size()) != dims.k() + 1) return false;
  if (point[0] != 1) return false;
  for (int j = 1; j <= level; ++j) {
    const BinomialRelation r = relation_at_level(dims, j);
    if (point[0] * point[dims.n + j] != point[r.s] * point[r.t]) return false;
  }
  return true;
}

Poly restrict_to_chart(const SymMatrix& a, const ChartMap& chart) {
  const int k = chart.dims.k();
  if (a.size() != k + 1) throw std::invalid_argument("restrict_to_chart: size mismatch");
  const int nv = k + 1;  // variable id j <-> coordinate z_j; id 0 unused

  // substitution monomial for each coordinate
  std::vector<Exponent> subst(static_cast<size_t>(k) + 1, Exponent(nv, 0));
  for (int idx = 1; idx <= k; ++idx) {
    auto it = chart.dependent.find(idx);
    if (it == chart.dependent.end()) {
      subst[idx][idx] = 1;  // free coordinate stays itself
    } else {
      for (int t = 0; t < chart.dims.n; ++t) subst[idx][t + 1] = it->second[t];
    }
  }
  Poly q(nv);
  for (auto& [i, j, v] : a.upper_nonzeros()) {
    Exponent e(nv, 0);
    for (int t = 0; t < nv; ++t) e[t] = subst[i][t] + subst[j][t];
    q.add_term(e, (i == j) ? v : Rat(2) * v);
  }
  return q;
}

std::vector<BoundaryStratum> boundary_strata(const Dims& dims, int level) {
  if (level < 0 || level > dims.k() - dims.n)
    throw std::invalid_argument("boundary_strata: level out of range");
  std::vector<std::pair<int, int>> pairs;
  for (int j = 1; j <= level; ++j) {
    const BinomialRelation r = relation_at_level(dims, j);
    pairs.emplace_back(r.s, r.t);
  }
  // deduplicate pairs; a hitting set needs each {s,t} touched once
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  std::set<std::vector<int>> hitting_sets;
  std::vector<int> current;
  // branch over the first unhit pair; prune supersets later
  auto first_unhit = [&](const std::set<int>& chosen) -> int {
    for (size_t p = 0; p < pairs.size(); ++p)
      if (!chosen.count(pairs[p].first) && !chosen.count(pairs[p].second))
        return static_cast<int>(p);
    return -1;
  };
  std::set<int> chosen;
  std::vector<std::set<int>> complete;
  auto recurse = [&](auto&& self) -> void {
    int p = first_unhit(chosen);
    if (p < 0) {
      complete.push_back(chosen);
      return;
    }
    for (int candidate : {pairs[p].first, pairs[p].second}) {
      if (chosen.count(candidate)) continue;
      chosen.insert(candidate);
      self(self);
      chosen.erase(candidate);
      if (pairs[p].first == pairs[p].second) break;
    }
  };
  recurse(recurse);

  // keep only minimal sets
  std::vector<BoundaryStratum> out;
  std::set<std::vector<int>> seen;
  for (const auto& s : complete) {
    bool minimal = true;
    for (const auto& other : complete) {
      if (&other == &s) continue;
      if (other.size() < s.size() && std::includes(s.begin(), s.end(), other.begin(), other.end())) {
        minimal = false;
        break;
      }
    }
    if (!minimal) continue;
    std::vector<int> zeros(s.begin(), s.end());
    if (seen.insert(zeros).second) out.push_back(BoundaryStratum{std::move(zeros)});
  }
  std::sort(out.begin(), out.end(),
            [](const BoundaryStratum& a, const BoundaryStratum& b) { return a.zeros < b.zeros; });
  return out;
}

std::vector<int> stratum_survivors(const Dims& dims, const BoundaryStratum& stratum) {
  std::set<int> dropped(stratum.zeros.begin(), stratum.zeros.end());
  dropped.insert(0);
  std::vector<int> out;
  for (int i = 0; i <= dims.k(); ++i)
    if (!dropped.count(i)) out.push_back(i);
  return out;
}

namespace {

std::vector<std::vector<Rat>> enumerate_tuples(const std::vector<Rat>& values, size_t arity,
                                               size_t cap) {
  std::vector<std::vector<Rat>> out;
  std::vector<size_t> idx(arity, 0);
  while (out.size() < cap) {
    std::vector<Rat> tuple(arity);
    for (size_t p = 0; p < arity; ++p) tuple[p] = values[idx[p]];
    out.push_back(std::move(tuple));
    size_t pos = arity;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < values.size()) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
    if (arity == 0) break;
  }
  return out;
}

}  // namespace

std::vector<std::vector<Rat>> sample_chart_points(const ChartMap& chart,
                                                  const PointStrategy& strategy,
                                                  std::uint64_t seed) {
  const size_t arity = chart.free.size();
  std::vector<std::vector<Rat>> free_parts;

  if (const auto* grid = std::get_if<GridStrategy>(&strategy)) {
    std::vector<Rat> values;
    for (int p = -grid->radius * grid->step_den; p <= grid->radius * grid->step_den; ++p) {
      Rat q(p, grid->step_den);
      q.canonicalize();
      values.push_back(q);
    }
    free_parts = enumerate_tuples(values, arity, grid->cap);
  } else if (const auto* su = std::get_if<SignedUnitsStrategy>(&strategy)) {
    free_parts = enumerate_tuples({Rat(-1), Rat(0), Rat(1)}, arity, su->cap);
  } else if (const auto* rr = std::get_if<RandomRationalStrategy>(&strategy)) {
    SplitMix64 rng(seed);
    for (size_t c = 0; c < rr->count; ++c) {
      std::vector<Rat> tuple(arity);
      for (size_t p = 0; p < arity; ++p) tuple[p] = rng.rational(rr->num_max, rr->den_max);
      free_parts.push_back(std::move(tuple));
    }
  } else if (const auto* ex = std::get_if<ExplicitStrategy>(&strategy)) {
    free_parts = ex->free_parts;
  }

  std::vector<std::vector<Rat>> points;
  points.reserve(free_parts.size());
  for (const auto& fp : free_parts) {
    auto z = chart_point_from_free(chart, fp);
    if (std::holds_alternative<ExplicitStrategy>(strategy) &&
        !on_chart(chart.dims, chart.level, z))
      throw std::invalid_argument("sample_chart_points: explicit point violates chart equations");
    points.push_back(std::move(z));
  }
  return points;
}

}  // namespace conecert
