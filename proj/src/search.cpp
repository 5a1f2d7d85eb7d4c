#include <chrono>
#include <iostream>
#include <algorithm>
#include <cmath>
#include <set>

#include "conecert/certify.hpp"

namespace conecert {

namespace {

// ---------------------------------------------------------------------------
// refutation search
// ---------------------------------------------------------------------------

// candidate base-coordinate assignments for the cut oracle, small rationals
// ordered by growing complexity
std::vector<std::vector<Rat>> base_pool(int n, int window) {
  std::vector<Rat> values{Rat(0), Rat(1), Rat(-1)};
  for (int w = 2; w <= window; ++w) {
    values.push_back(Rat(w));
    values.push_back(Rat(-w));
    values.push_back(Rat(2 * w - 3, 2));
    values.push_back(Rat(3 - 2 * w, 2));
  }
  std::vector<std::vector<Rat>> pool;
  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  while (true) {
    std::vector<Rat> x(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) x[v] = values[idx[v]];
    pool.push_back(std::move(x));
    int pos = n;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < values.size()) break;
      idx[pos] = 0;
      if (pos == 0) return pool;
    }
  }
}

// round each entry to a small denominator, keeping exactness optional
Rat round_denominator(const Rat& v, long den) {
  mpz_class scaled_num = v.get_num() * den;
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), scaled_num.get_mpz_t(), v.get_den().get_mpz_t());
  Rat out(q, den);
  out.canonicalize();
  return out;
}

// One violated chart point for the quadratic form of B on the level chart, or
// nullopt. The free tail coordinates enter q_B quadratically, so for a fixed
// base assignment the minimum over the tail is computed exactly.
std::optional<std::vector<Rat>> oracle_cut(const SymMatrix& b, const ChartMap& chart,
                                           const std::vector<Rat>& base_values,
                                           const std::set<std::vector<Rat>>& known) {
  const int n = chart.dims.n;
  const int k = chart.dims.k();
  std::vector<int> tail;
  for (int id : chart.free)
    if (id > n) tail.push_back(id);
  const size_t tn = tail.size();

  // coordinate values for everything outside the tail
  std::vector<Rat> fixed(static_cast<size_t>(k) + 1, Rat(0));
  fixed[0] = 1;
  for (int v = 1; v <= n; ++v) fixed[v] = base_values[v - 1];
  for (const auto& [dep, mono] : chart.dependent) {
    Rat val(1);
    for (int t = 0; t < n; ++t)
      if (mono[t] > 0) val *= rat_pow(fixed[t + 1], static_cast<unsigned>(mono[t]));
    fixed[dep] = val;
  }

  auto assemble = [&](const std::vector<Rat>& tail_values) {
    std::vector<Rat> z = fixed;
    for (size_t p = 0; p < tn; ++p) z[tail[p]] = tail_values[p];
    return z;
  };
  auto try_point = [&](const std::vector<Rat>& tail_values) -> std::optional<std::vector<Rat>> {
    auto z = assemble(tail_values);
    if (b.quadratic_form(z) < 0 && !known.count(z)) return z;
    return std::nullopt;
  };
  auto try_simplified = [&](const std::vector<Rat>& tail_values)
      -> std::optional<std::vector<Rat>> {
    for (long den : {4L, 16L, 64L}) {
      std::vector<Rat> rounded(tn);
      for (size_t p = 0; p < tn; ++p) rounded[p] = round_denominator(tail_values[p], den);
      if (auto z = try_point(rounded)) return z;
    }
    return try_point(tail_values);
  };

  if (tn == 0) {
    Rat value = b.quadratic_form(fixed);
    if (value < 0 && !known.count(fixed)) return fixed;
    return std::nullopt;
  }

  // q_B(z) = t^T T t + 2 g^T t + p over the tail variables
  SymMatrix t_block(static_cast<int>(tn));
  for (size_t i = 0; i < tn; ++i)
    for (size_t j = i; j < tn; ++j)
      t_block.set(static_cast<int>(i), static_cast<int>(j), b.get(tail[i], tail[j]));
  std::vector<Rat> g(tn, Rat(0));
  for (size_t i = 0; i < tn; ++i)
    for (int u = 0; u <= k; ++u) {
      bool is_tail = std::binary_search(tail.begin(), tail.end(), u);
      if (is_tail || fixed[u] == 0) continue;
      const Rat& entry = b.get(tail[i], u);
      if (entry != 0) g[i] += entry * fixed[u];
    }
  Rat p_const(0);
  {
    std::vector<Rat> z0 = fixed;  // tail already zero
    p_const = b.quadratic_form(z0);
  }

  PsdVerdict tv = psd_check(t_block);
  if (!tv.is_psd()) {
    // descend along the negative direction until the value crosses zero
    const std::vector<Rat>& w = *tv.witness;
    Rat quad(0), lin(0);
    for (size_t i = 0; i < tn; ++i) {
      if (w[i] == 0) continue;
      lin += g[i] * w[i];
      for (size_t j = 0; j < tn; ++j)
        if (w[j] != 0) quad += w[i] * t_block.get(static_cast<int>(i), static_cast<int>(j)) * w[j];
    }
    Rat s = (rat_abs(Rat(2) * lin) + rat_abs(p_const) + 1) / rat_abs(quad) + 1;
    for (int attempt = 0; attempt < 8; ++attempt) {
      std::vector<Rat> tail_values(tn);
      for (size_t i = 0; i < tn; ++i) tail_values[i] = s * w[i];
      if (auto z = try_simplified(tail_values)) return z;
      s *= 2;
    }
    return std::nullopt;
  }

  // PSD tail block: minimize exactly, T t = -g
  std::vector<std::vector<Rat>> tm(tn, std::vector<Rat>(tn));
  for (size_t i = 0; i < tn; ++i)
    for (size_t j = 0; j < tn; ++j) tm[i][j] = t_block.get(static_cast<int>(i), static_cast<int>(j));
  std::vector<Rat> neg_g(tn);
  for (size_t i = 0; i < tn; ++i) neg_g[i] = -g[i];
  auto sol = solve_linear(tm, neg_g);
  if (!sol.consistent) {
    // refutation direction lies in ker T with g-component, value is affine
    const std::vector<Rat>& c = sol.refutation;
    Rat gc(0);
    for (size_t i = 0; i < tn; ++i) gc += g[i] * c[i];
    if (gc == 0) return std::nullopt;  // cannot happen for symmetric T
    Rat s = -(p_const + 1) / (Rat(2) * gc);
    std::vector<Rat> tail_values(tn);
    for (size_t i = 0; i < tn; ++i) tail_values[i] = s * c[i];
    return try_simplified(tail_values);
  }
  Rat value = p_const;
  for (size_t i = 0; i < tn; ++i) value += g[i] * sol.particular[i];
  if (value >= 0) return std::nullopt;
  return try_simplified(sol.particular);
}

std::vector<Rat> full_free_vector(const ChartMap& chart, const std::vector<Rat>& z) {
  std::vector<Rat> out;
  out.reserve(chart.free.size());
  for (int id : chart.free) out.push_back(z[id]);
  return out;
}

// exact value of min over the tail of q_B at a fixed base assignment, or
// nullopt when the tail block is indefinite there (unbounded below)
std::optional<Rat> tail_min_value(const SymMatrix& b, const ChartMap& chart,
                                  const std::vector<Rat>& base_values) {
  const int n = chart.dims.n;
  const int k = chart.dims.k();
  std::vector<int> tail;
  for (int id : chart.free)
    if (id > n) tail.push_back(id);
  std::vector<Rat> fixed(static_cast<size_t>(k) + 1, Rat(0));
  fixed[0] = 1;
  for (int v = 1; v <= n; ++v) fixed[v] = base_values[v - 1];
  for (const auto& [dep, mono] : chart.dependent) {
    Rat val(1);
    for (int t = 0; t < n; ++t)
      if (mono[t] > 0) val *= rat_pow(fixed[t + 1], static_cast<unsigned>(mono[t]));
    fixed[dep] = val;
  }
  const size_t tn = tail.size();
  if (tn == 0) return b.quadratic_form(fixed);
  std::vector<std::vector<Rat>> tm(tn, std::vector<Rat>(tn));
  for (size_t i = 0; i < tn; ++i)
    for (size_t j = 0; j < tn; ++j) tm[i][j] = b.get(tail[i], tail[j]);
  std::vector<Rat> g(tn, Rat(0));
  for (size_t i = 0; i < tn; ++i)
    for (int u = 0; u <= k; ++u) {
      if (fixed[u] == 0 || std::binary_search(tail.begin(), tail.end(), u)) continue;
      const Rat& entry = b.get(tail[i], u);
      if (entry != 0) g[i] += entry * fixed[u];
    }
  const Rat p_const = b.quadratic_form(fixed);
  SymMatrix t_block(static_cast<int>(tn));
  for (size_t i = 0; i < tn; ++i)
    for (size_t j = i; j < tn; ++j)
      t_block.set(static_cast<int>(i), static_cast<int>(j), tm[i][j]);
  if (!psd_check(t_block).is_psd()) return std::nullopt;
  std::vector<Rat> neg_g(tn);
  for (size_t i = 0; i < tn; ++i) neg_g[i] = -g[i];
  auto sol = solve_linear(tm, neg_g);
  if (!sol.consistent) return std::nullopt;
  Rat value = p_const;
  for (size_t i = 0; i < tn; ++i) value += g[i] * sol.particular[i];
  return value;
}

// exact coordinate descent over the base variables against the tail-minimized
// value; hands the deepest violated base assignment to the cut oracle
std::optional<std::vector<Rat>> descend_base(const SymMatrix& b, const ChartMap& chart,
                                             const std::vector<Rat>& start) {
  std::vector<Rat> x = start;
  auto value_at = [&](const std::vector<Rat>& probe) { return tail_min_value(b, chart, probe); };
  auto current = value_at(x);
  if (!current) return x;  // indefinite tail: the caller's ray logic takes over
  for (int sweep = 0; sweep < 24; ++sweep) {
    bool improved = false;
    for (int v = 0; v < chart.dims.n; ++v) {
      for (int j = 0; j <= 8; ++j) {
        const Rat step(1, 1L << j);
        for (int sign : {1, -1}) {
          std::vector<Rat> probe = x;
          probe[v] += Rat(sign) * step;
          auto val = value_at(probe);
          if (val && *val < *current) {
            x = std::move(probe);
            current = val;
            improved = true;
          } else if (!val) {
            return probe;  // found an indefinite-tail base point
          }
        }
      }
    }
    if (!improved) break;
  }
  if (*current < 0) return x;
  return std::nullopt;
}

// rational approximation of sqrt(s) from below, denominator 2^10
Rat rat_sqrt_floor(const Rat& s) {
  if (s <= 0) return Rat(0);
  mpz_class scaled_num = s.get_num() << 8;
  mpz_class q = scaled_num / s.get_den();
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), q.get_mpz_t());
  Rat r(root, 1 << 4);
  r.canonicalize();
  return r;
}

// Tail deviations matched to the local slack of f: at base assignment x the
// nonnegativity constraints pin any candidate matrix inside a tube of radius
// sqrt(f(1,x)) around the Veronese lift, so deviations of exactly that size
// make the point constraints tight. Rings around the zeros of f sample where
// the tube pinches shut.
std::vector<std::vector<Rat>> tube_seed(const Form& f, const Dims& dims, int level) {
  const ChartMap ch = chart(dims, level);
  const ChartMap full = chart(dims, dims.k() - dims.n);
  const Poly fx = dehomogenize(f, 0);
  std::vector<int> tail;
  for (int id : ch.free)
    if (id > dims.n) tail.push_back(id);

  const std::vector<std::vector<Rat>> base_xs = base_pool(dims.n, 2);
  std::vector<std::vector<Rat>> xs;
  {
    std::vector<std::vector<Rat>> zeros;
    for (const auto& x : base_xs) {
      bool origin = true;
      for (const Rat& v : x)
        if (v != 0) origin = false;
      if (!origin && fx.evaluate(x) == 0) zeros.push_back(x);
    }
    // ring anchors: prefer zeros away from the coordinate planes, cap the count
    std::stable_sort(zeros.begin(), zeros.end(),
                     [](const std::vector<Rat>& a, const std::vector<Rat>& b) {
                       auto nzeros = [](const std::vector<Rat>& v) {
                         int c = 0;
                         for (const Rat& q : v)
                           if (q == 0) ++c;
                         return c;
                       };
                       return nzeros(a) < nzeros(b);
                     });
    if (zeros.size() > 8) zeros.resize(8);
    static const Rat radii[] = {Rat(1, 2), Rat(1, 4), Rat(1, 8), Rat(1, 16)};
    xs = zeros;
    for (const auto& x : zeros)
      for (const Rat& r : radii)
        for (int v = 0; v < dims.n; ++v)
          for (int sign : {1, -1}) {
            std::vector<Rat> ring = x;
            ring[v] += Rat(sign) * r;
            xs.push_back(std::move(ring));
            for (int u = v + 1; u < dims.n; ++u)
              for (int sign2 : {1, -1}) {
                std::vector<Rat> diag = x;
                diag[v] += Rat(sign) * r;
                diag[u] += Rat(sign2) * r;
                xs.push_back(std::move(diag));
              }
          }
    xs.insert(xs.end(), base_xs.begin(), base_xs.end());
  }

  std::vector<std::vector<Rat>> points;
  std::set<std::vector<Rat>> seen;
  auto add = [&](std::vector<Rat> z) {
    if (seen.insert(z).second) points.push_back(std::move(z));
  };
  for (const auto& x : xs) {
    std::vector<Rat> full_free(full.free.size(), Rat(0));
    for (int v = 0; v < dims.n; ++v) full_free[v] = x[v];
    const std::vector<Rat> lift = chart_point_from_free(full, full_free);
    const Rat slack = fx.evaluate(x);
    Rat radius = rat_sqrt_floor(slack);
    if (radius == 0) radius = Rat(1, 16);
    const std::vector<Rat> scales =
        tail.size() <= 4 ? std::vector<Rat>{Rat(1), Rat(1, 2), Rat(2)}
                         : std::vector<Rat>{Rat(1), Rat(1, 2)};
    for (const Rat& scale : scales) {
      const Rat w = radius * scale;
      // single-coordinate deviations and uniform sign patterns
      for (int t : tail)
        for (int sign : {1, -1}) {
          std::vector<Rat> z = lift;
          z[t] += Rat(sign) * w;
          add(std::move(z));
        }
      if (tail.size() > 1) {
        std::vector<unsigned> masks;
        if (tail.size() <= 4) {
          for (unsigned mask = 0; mask < (1u << tail.size()); ++mask) masks.push_back(mask);
        } else {
          masks.push_back(0);
          masks.push_back((1u << tail.size()) - 1);
          unsigned alternating = 0;
          for (size_t t = 0; t < tail.size(); t += 2) alternating |= 1u << t;
          masks.push_back(alternating);
        }
        for (unsigned mask : masks) {
          std::vector<Rat> z = lift;
          for (size_t t = 0; t < tail.size(); ++t)
            z[tail[t]] += ((mask >> t) & 1u) ? -w : w;
          add(std::move(z));
        }
      }
    }
  }
  return points;
}

// Structured seed concentrated where nonnegativity is tight: for every base
// assignment, the full Veronese lift plus (a) rescalings of its free tail and
// (b) single-coordinate perturbations of it. Pencils through the lift pin the
// coupling entries of any would-be nonnegative Gram matrix.
std::vector<std::vector<Rat>> pencil_seed(const Dims& dims, int level, int x_window) {
  const ChartMap ch = chart(dims, level);
  const ChartMap full = chart(dims, dims.k() - dims.n);
  std::vector<int> tail;
  for (int id : ch.free)
    if (id > dims.n) tail.push_back(id);

  static const Rat scale_table[] = {Rat(0), Rat(1), Rat(2), Rat(1, 2), Rat(-1), Rat(3)};
  static const Rat delta_table[] = {Rat(1),      Rat(-1),     Rat(4),
                                    Rat(-4),     Rat(1, 4),   Rat(-1, 4)};

  std::vector<std::vector<Rat>> points;
  std::set<std::vector<Rat>> seen;
  auto add = [&](std::vector<Rat> z) {
    if (seen.insert(z).second) points.push_back(std::move(z));
  };
  std::vector<std::vector<Rat>> lifts;
  for (const auto& x : base_pool(dims.n, x_window)) {
    std::vector<Rat> full_free(full.free.size(), Rat(0));
    for (int v = 0; v < dims.n; ++v) full_free[v] = x[v];
    lifts.push_back(chart_point_from_free(full, full_free));
  }
  for (const auto& lift : lifts)
    for (const Rat& s : scale_table) {
      std::vector<Rat> z = lift;
      for (int t : tail) z[t] = lift[t] * s;
      add(std::move(z));
    }
  for (const auto& lift : lifts)
    for (int t : tail)
      for (const Rat& dlt : delta_table) {
        std::vector<Rat> z = lift;
        z[t] += dlt;
        add(std::move(z));
      }
  return points;
}

}  // namespace

RefutationOutcome refute_search(const Form& f, int level, const SearchConfig& config,
                                const std::vector<std::vector<Rat>>& hint_points) {
  const Dims dims(f.nvars() - 1, f.degree() / 2);
  const ChartMap ch = chart(dims, level);

  std::vector<std::vector<Rat>> points;
  std::set<std::vector<Rat>> seen;
  auto add_point = [&](const std::vector<Rat>& z) {
    if (points.size() >= config.point_budget) return false;
    if (!seen.insert(z).second) return false;
    points.push_back(z);
    return true;
  };

  for (const auto& z : hint_points) add_point(z);

  std::vector<std::vector<Rat>> pool = tube_seed(f, dims, level);
  {
    auto pencils = pencil_seed(dims, level, 2);
    pool.insert(pool.end(), std::make_move_iterator(pencils.begin()),
                std::make_move_iterator(pencils.end()));
  }

  // nonnegativity is tight at the zeros of f, so cluster extra pencils and
  // oracle probes around every zero the base pool contains
  auto x_pool = base_pool(dims.n, config.lift_window);
  std::vector<std::vector<Rat>> descent_starts;
  {
    const Poly fx = dehomogenize(f, 0);
    std::vector<std::vector<Rat>> zero_xs;
    for (const auto& x : base_pool(dims.n, 2)) {
      bool origin = true;
      for (const Rat& v : x)
        if (v != 0) origin = false;
      if (!origin && fx.evaluate(x) == 0) zero_xs.push_back(x);
    }
    static const Rat offsets[] = {Rat(1, 2), Rat(-1, 2), Rat(1, 4), Rat(-1, 4),
                                  Rat(1, 8), Rat(-1, 8)};
    const ChartMap full = chart(dims, dims.k() - dims.n);
    descent_starts = zero_xs;
    for (const auto& x : zero_xs)
      for (int v = 0; v < dims.n; ++v)
        for (const Rat& eps : offsets) {
          std::vector<Rat> nearby = x;
          nearby[v] += eps;
          x_pool.push_back(nearby);
          descent_starts.push_back(nearby);
          std::vector<Rat> full_free(full.free.size(), Rat(0));
          for (int u = 0; u < dims.n; ++u) full_free[u] = nearby[u];
          pool.push_back(chart_point_from_free(full, full_free));
        }
    if (descent_starts.empty()) descent_starts = base_pool(dims.n, 1);
  }

  if (points.empty()) {
    const size_t first_chunk =
        std::min<size_t>({pool.size(), config.point_budget, config.initial_chunk});
    for (size_t p = 0; p < first_chunk; ++p) add_point(pool[p]);
  }
  std::optional<std::vector<Rat>> last_lambda;
  size_t signed_units_used = 0;
  size_t random_used = 0;
  SplitMix64 rng(config.seed);
  const GramCoset coset = generic_gram(f);

  for (size_t round = 0; round < config.max_rounds; ++round) {
    const auto lp_start = std::chrono::steady_clock::now();
    RefutationOutcome outcome = refute_membership(f, level, points);
    const auto lp_end = std::chrono::steady_clock::now();
    if (std::holds_alternative<RefutationCertificate>(outcome)) return outcome;
    last_lambda = std::get<Inconclusive>(outcome).lambda;

    const SymMatrix b = coset.at(*last_lambda);
    size_t added = 0;

    // deepest violations first: exact coordinate descent from the zero
    // clusters against the tail-minimized value
    for (const auto& start : descent_starts) {
      if (auto x = descend_base(b, ch, start)) {
        if (auto z = oracle_cut(b, ch, *x, seen)) {
          if (add_point(*z)) ++added;
        }
      }
    }

    // violated seed points: the pencil geometry pins coupling entries
    for (size_t p = 0; p < pool.size() && added < config.cut_batch; ++p) {
      const auto& z = pool[p];
      if (seen.count(z)) continue;
      if (b.quadratic_form(z) < 0 && add_point(z)) ++added;
    }

    // exact tail-minimization cuts against the candidate and against its
    // homogeneous part (the recession ray the solver escapes along)
    if (added == 0) {
      SymMatrix direction = b - coset.base;
      const SymMatrix* targets[] = {&b, &direction};
      for (const SymMatrix* target : targets) {
        size_t target_budget = added + (config.cut_batch + 1) / 2;
        for (const auto& x : x_pool) {
          if (added >= target_budget) break;
          if (auto z = oracle_cut(*target, ch, x, seen)) {
            if (add_point(*z)) ++added;
          }
        }
      }
    }

    if (config.trace)
      std::cerr << "refute level " << level << " round " << round << ": points="
                << points.size() - added << " lp="
                << std::chrono::duration<double>(lp_end - lp_start).count() << "s cuts=" << added
                << "\n";
    if (added > 0) continue;

    // remaining ladder rungs: signed units, then seeded random rationals
    if (signed_units_used < config.signed_units_cap) {
      auto su = sample_chart_points(ch, SignedUnitsStrategy{config.signed_units_cap}, 0);
      for (const auto& z : su) {
        if (added >= config.cut_batch) break;
        if (seen.count(z)) continue;
        if (b.quadratic_form(z) < 0 && add_point(z)) ++added;
      }
      signed_units_used = config.signed_units_cap;
      if (added > 0) continue;
    }
    while (random_used < config.random_points && added < config.cut_batch) {
      std::vector<Rat> fv(ch.free.size());
      for (size_t p = 0; p < fv.size(); ++p)
        fv[p] = rng.rational(config.random_num_max, config.random_den_max);
      ++random_used;
      auto z = chart_point_from_free(ch, fv);
      if (seen.count(z)) continue;
      if (b.quadratic_form(z) < 0 && add_point(z)) ++added;
    }
    if (added == 0) return Inconclusive{*last_lambda};
  }
  return Inconclusive{last_lambda.value_or(std::vector<Rat>{})};
}

// ---------------------------------------------------------------------------
// numeric SOS search with exact rationalization
// ---------------------------------------------------------------------------

namespace {

struct DenseSym {
  int n;
  std::vector<double> a;  // row major

  explicit DenseSym(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, 0.0) {}
  double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

// cyclic Jacobi eigendecomposition; adequate for the small matrices here
void jacobi_eigen(const DenseSym& m, std::vector<double>& eigenvalues,
                  std::vector<std::vector<double>>& vectors) {
  const int n = m.n;
  DenseSym a = m;
  vectors.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) vectors[i][i] = 1.0;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a.at(i, j) * a.at(i, j);
    if (off < 1e-26) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (std::abs(apq) < 1e-18) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = a.at(i, p), aiq = a.at(i, q);
          a.at(i, p) = c * aip - s * aiq;
          a.at(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = a.at(p, i), aqi = a.at(q, i);
          a.at(p, i) = c * api - s * aqi;
          a.at(q, i) = s * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = vectors[i][p], viq = vectors[i][q];
          vectors[i][p] = c * vip - s * viq;
          vectors[i][q] = s * vip + c * viq;
        }
      }
  }
  eigenvalues.assign(n, 0.0);
  for (int i = 0; i < n; ++i) eigenvalues[i] = a.at(i, i);
}

DenseSym psd_clip(const DenseSym& m, double floor_at) {
  std::vector<double> ev;
  std::vector<std::vector<double>> vec;
  jacobi_eigen(m, ev, vec);
  DenseSym out(m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) {
      double acc = 0.0;
      for (int t = 0; t < m.n; ++t) {
        const double lam = std::max(ev[t], floor_at);
        acc += vec[i][t] * lam * vec[j][t];
      }
      out.at(i, j) = acc;
    }
  return out;
}

// best rational approximation with denominator bound, by continued fractions
Rat rationalize(double x, long den_bound) {
  if (!std::isfinite(x)) return Rat(0);
  bool negative = x < 0;
  double v = std::abs(x);
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = v;
  for (int step = 0; step < 64; ++step) {
    double a_floor = std::floor(frac);
    if (a_floor > 1e18) break;
    long a = static_cast<long>(a_floor);
    long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > den_bound || q2 < 0 || p2 < 0) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double rem = frac - a_floor;
    if (rem < 1e-15) break;
    frac = 1.0 / rem;
  }
  if (q1 == 0) return Rat(0);
  Rat r(p1, q1);
  r.canonicalize();
  return negative ? Rat(-r) : r;
}

// exact orthogonal projection of a rationalized matrix onto the Gram coset:
// solve the normal equations over the kernel span
std::optional<SymMatrix> project_to_coset(const GramCoset& coset, const SymMatrix& x) {
  const size_t q = coset.kernel.size();
  auto inner = [](const SymMatrix& a, const SymMatrix& b) {
    Rat acc(0);
    for (int i = 0; i < a.size(); ++i)
      for (int j = 0; j < a.size(); ++j) acc += a.get(i, j) * b.get(i, j);
    return acc;
  };
  std::vector<std::vector<Rat>> gram(q, std::vector<Rat>(q));
  std::vector<Rat> rhs(q);
  const SymMatrix diff = x - coset.base;
  for (size_t r = 0; r < q; ++r) {
    for (size_t s = r; s < q; ++s) {
      gram[r][s] = inner(coset.kernel[r], coset.kernel[s]);
      gram[s][r] = gram[r][s];
    }
    rhs[r] = inner(coset.kernel[r], diff);
  }
  auto sol = solve_linear(gram, rhs);
  if (!sol.consistent) return std::nullopt;
  return coset.at(sol.particular);
}

std::optional<MembershipCertificate> certificate_from_psd_gram(const Form& f,
                                                               const SymMatrix& a) {
  PsdVerdict verdict = psd_check(a);
  if (!verdict.is_psd()) return std::nullopt;
  const PsdFactorization& fact = *verdict.factorization;
  const int n = a.size();
  // A = (P L) D (P L)^t gives the squares of the chart-0 restriction
  std::vector<Poly> squares;
  std::vector<Rat> weights;
  for (int col = 0; col < n; ++col) {
    if (fact.diag[col] == 0) continue;
    Poly h(n);  // ids 1..k; index 0 contributes the constant
    for (int row = col; row < n; ++row) {
      const Rat& coef = fact.lower[row][col];
      if (coef == 0) continue;
      const int original = fact.perm[row];
      Exponent e(static_cast<size_t>(n), 0);
      if (original > 0) e[original] = 1;
      h.add_term(e, coef);
    }
    squares.push_back(std::move(h));
    weights.push_back(fact.diag[col]);
  }
  if (squares.empty()) {
    // zero matrix: the zero form is a trivial (empty) sum; represent with one
    // zero square of weight one is invalid, so use the constant-zero square
    squares.push_back(Poly(n));
    weights.push_back(Rat(1));
  }
  try {
    return verify_membership(f, 0, a, SosHint{std::move(squares), std::move(weights)});
  } catch (const CertifyError&) {
    return std::nullopt;
  }
}

}  // namespace

std::optional<MembershipCertificate> sos_search(const Form& f, const SearchConfig& config) {
  if (f.degree() % 2 != 0) throw std::invalid_argument("sos_search: form degree must be even");
  const Dims dims(f.nvars() - 1, f.degree() / 2);
  const int n = dims.k() + 1;
  const GramCoset coset = generic_gram(f);
  const size_t q = coset.kernel.size();

  // normalize the numeric iterate by the largest coefficient magnitude
  double scale = 0.0;
  for (const auto& [e, c] : f.terms()) scale = std::max(scale, std::abs(c.get_d()));
  if (scale == 0.0) scale = 1.0;

  // orthonormalize the kernel span in doubles for the affine projection
  std::vector<std::vector<double>> basis;
  for (size_t r = 0; r < q; ++r) {
    std::vector<double> v(static_cast<size_t>(n) * n, 0.0);
    for (auto& [i, j, val] : coset.kernel[r].upper_nonzeros()) {
      v[static_cast<size_t>(i) * n + j] = val.get_d();
      v[static_cast<size_t>(j) * n + i] = val.get_d();
    }
    for (const auto& u : basis) {
      double dot = 0.0;
      for (size_t p = 0; p < v.size(); ++p) dot += v[p] * u[p];
      for (size_t p = 0; p < v.size(); ++p) v[p] -= dot * u[p];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-12) continue;
    for (double& x : v) x /= norm;
    basis.push_back(std::move(v));
  }

  DenseSym base_num(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) base_num.at(i, j) = coset.base.get(i, j).get_d();

  auto project_affine = [&](const DenseSym& x) {
    DenseSym out = base_num;
    for (const auto& u : basis) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          dot += (x.at(i, j) - base_num.at(i, j)) * u[static_cast<size_t>(i) * n + j];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.at(i, j) += dot * u[static_cast<size_t>(i) * n + j];
    }
    return out;
  };

  DenseSym x = base_num;
  bool converged = false;
  // a small positive eigenvalue floor early on steers toward interior points
  const double floors[] = {1e-2, 1e-4, 0.0};
  size_t iters_per_stage = std::max<size_t>(config.sos_max_iterations / 3, 1);
  for (double floor_at : floors) {
    for (size_t it = 0; it < iters_per_stage; ++it) {
      DenseSym psd = psd_clip(x, floor_at * scale);
      DenseSym next = project_affine(psd);
      double residual = 0.0;
      for (size_t p = 0; p < next.a.size(); ++p) {
        const double dlt = next.a[p] - psd.a[p];
        residual += dlt * dlt;
      }
      x = next;
      if (floor_at == 0.0 && std::sqrt(residual) / scale < config.sos_tolerance) {
        converged = true;
        break;
      }
    }
    if (converged) break;
  }
  if (!converged) return std::nullopt;

  // rationalize with doubling precision, exact coset projection, exact check
  for (long den : {1L << 16, 1L << 24, 1L << 31}) {
    SymMatrix cand(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) cand.set(i, j, rationalize(x.at(i, j), den));
    auto projected = project_to_coset(coset, cand);
    if (!projected) continue;
    if (auto cert = certificate_from_psd_gram(f, *projected)) return cert;
  }

  // pin the numeric kernel: rationalize near-null eigenvectors and solve for
  // the unique coset element annihilating them
  std::vector<double> ev;
  std::vector<std::vector<double>> vec;
  jacobi_eigen(x, ev, vec);
  std::vector<size_t> null_cols;
  for (int t = 0; t < n; ++t)
    if (std::abs(ev[t]) < 1e-5 * scale) null_cols.push_back(static_cast<size_t>(t));
  for (long den : {1000L, 1000000L}) {
    if (null_cols.empty()) break;
    std::vector<std::vector<Rat>> m;
    std::vector<Rat> rhs;
    for (size_t col : null_cols) {
      // normalize the eigenvector by its largest entry before rationalizing
      double big = 0.0;
      for (int i = 0; i < n; ++i) big = std::max(big, std::abs(vec[i][col]));
      if (big < 1e-12) continue;
      std::vector<Rat> v(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) v[i] = rationalize(vec[i][col] / big, den);
      // (base + sum lambda_r K_r) v = 0: one equation per coordinate
      for (int i = 0; i < n; ++i) {
        std::vector<Rat> row(q, Rat(0));
        for (size_t r = 0; r < q; ++r) {
          Rat acc(0);
          for (int j = 0; j < n; ++j)
            if (v[j] != 0) acc += coset.kernel[r].get(i, j) * v[j];
          row[r] = acc;
        }
        Rat base_acc(0);
        for (int j = 0; j < n; ++j)
          if (v[j] != 0) base_acc += coset.base.get(i, j) * v[j];
        m.push_back(std::move(row));
        rhs.push_back(-base_acc);
      }
    }
    if (m.empty()) break;
    auto sol = solve_linear(m, rhs);
    if (!sol.consistent) continue;
    if (auto cert = certificate_from_psd_gram(f, coset.at(sol.particular))) return cert;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// classification
// ---------------------------------------------------------------------------

ClassifyResult classify_level(const Form& f, const SearchConfig& config) {
  const Dims dims(f.nvars() - 1, f.degree() / 2);
  const int top = dims.k() - dims.n;
  ClassifyResult out;

  // an SOS certificate settles the interval immediately
  if (auto cert = sos_search(f, config)) {
    out.hi = 0;
    out.membership = std::move(cert);
    return out;
  }

  // refutations from the bottom up; each success moves the floor
  for (int level = 0; level <= top; ++level) {
    RefutationOutcome outcome = refute_search(f, level, config);
    if (auto* cert = std::get_if<RefutationCertificate>(&outcome)) {
      out.lo = level + 1;
      out.refutation = std::move(*cert);
      if (level == top) {
        out.refuted_at_top = true;
        return out;
      }
    } else {
      break;
    }
  }

  // membership from the candidate floor upward
  for (int level = std::max(out.lo, 1); level <= top; ++level) {
    // try every balanced Gram representative the form itself suggests, with
    // its own nonnegativity certificate as the chart proof
    try {
      GramCoset coset = generic_gram(f);
      MembershipCertificate cert = verify_membership(f, level, coset.base, IdentityHint{f, {}});
      out.hi = level;
      out.membership = std::move(cert);
      return out;
    } catch (const CertifyError&) {
      continue;
    }
  }
  out.budget_exhausted = true;
  return out;
}

// ---------------------------------------------------------------------------
// separation transfer
// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<Rat>> pad_points(const std::vector<std::vector<Rat>>& points,
                                         const std::vector<int>& index_set, int big_size) {
  std::vector<std::vector<Rat>> out;
  out.reserve(points.size());
  for (const auto& y : points) {
    std::vector<Rat> z(static_cast<size_t>(big_size), Rat(0));
    for (size_t u = 0; u < index_set.size(); ++u) z[index_set[u]] = y[u];
    out.push_back(std::move(z));
  }
  return out;
}

}  // namespace

SeparationBundle transfer_degree_raise(const SeparationBundle& source) {
  const Dims& small = source.dims;
  const Dims big(small.n, small.d + 1);
  const auto index_set = index_set_for_degree_raise(small, small.d);

  Form x0_squared(small.num_vars(), 2);
  {
    Exponent e(static_cast<size_t>(small.num_vars()), 0);
    e[0] = 2;
    x0_squared.add_term(e, Rat(1));
  }
  const Form g = multiply(x0_squared, source.form);

  const SymMatrix b = expand_gram(source.membership.gram, index_set, big);
  MembershipCertificate membership =
      verify_membership(g, source.member_level, b, IdentityHint{g, std::nullopt});

  auto padded = pad_points(source.refutation.points, index_set, big.k() + 1);
  RefutationOutcome refutation = refute_membership(g, source.refute_level, padded);
  auto* cert = std::get_if<RefutationCertificate>(&refutation);
  if (!cert)
    throw std::runtime_error("transfer_degree_raise: padded points no longer refute at level " +
                             std::to_string(source.refute_level));
  return SeparationBundle{g, big, source.member_level, source.refute_level,
                          std::move(membership), std::move(*cert)};
}

SeparationBundle transfer_var_extend(const SeparationBundle& source,
                                     const std::vector<int>& injection, int big_n,
                                     int member_level, int refute_level) {
  const Dims& small = source.dims;
  if (static_cast<int>(injection.size()) != small.num_vars())
    throw std::invalid_argument("transfer_var_extend: injection arity mismatch");
  if (injection.back() > big_n)
    throw std::invalid_argument("transfer_var_extend: injection exceeds target ring");
  const Dims big(big_n, small.d);
  const auto index_set = index_set_for_substitution(small, big, injection);

  Form g(big.num_vars(), source.form.degree());
  for (const auto& [e, c] : source.form.terms()) {
    Exponent big_e(static_cast<size_t>(big.num_vars()), 0);
    for (size_t v = 0; v < e.size(); ++v) big_e[injection[v]] = e[v];
    g.add_term(big_e, c);
  }

  const SymMatrix b = expand_gram(source.membership.gram, index_set, big);
  MembershipCertificate membership =
      verify_membership(g, member_level, b, IdentityHint{g, std::nullopt});

  auto padded = pad_points(source.refutation.points, index_set, big.k() + 1);
  RefutationOutcome refutation = refute_membership(g, refute_level, padded);
  auto* cert = std::get_if<RefutationCertificate>(&refutation);
  if (!cert)
    throw std::runtime_error("transfer_var_extend: padded points no longer refute at level " +
                             std::to_string(refute_level));
  return SeparationBundle{g, big, member_level, refute_level, std::move(membership),
                          std::move(*cert)};
}

}  // namespace conecert
