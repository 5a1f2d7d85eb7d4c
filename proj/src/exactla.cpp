#include "conecert/exactla.hpp"

#include <algorithm>

namespace conecert {

PsdVerdict psd_check(const SymMatrix& a) {
  const int n = a.size();
  // working copy, dense
  std::vector<std::vector<Rat>> s(n, std::vector<Rat>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s[i][j] = a.get(i, j);

  std::vector<int> pivots;                       // original indices in pivot order
  std::vector<bool> done(n, false);
  std::vector<std::vector<Rat>> elim(n, std::vector<Rat>(n, Rat(0)));  // elim[r][p] multiplier
  std::vector<Rat> diag_vals;

  // lift a residual-block direction w (supported on active indices) to a
  // witness v of the original matrix: solve the unit upper-triangular system
  // given by the recorded multipliers, in reverse pivot order
  auto lift_witness = [&](const std::vector<Rat>& w) {
    std::vector<Rat> v = w;
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
      const int p = *it;
      Rat acc(0);
      for (int r = 0; r < n; ++r)
        if (r != p && elim[r][p] != 0 && v[r] != 0) acc += elim[r][p] * v[r];
      v[p] = -acc;
    }
    return v;
  };

  while (true) {
    int pivot = -1;
    for (int i = 0; i < n; ++i)
      if (!done[i] && s[i][i] > 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) {
      // no positive diagonal left: PSD iff the whole residual block vanishes
      for (int i = 0; i < n; ++i) {
        if (done[i]) continue;
        if (s[i][i] < 0) {
          std::vector<Rat> w(n, Rat(0));
          w[i] = 1;
          auto v = lift_witness(w);
          return PsdVerdict{std::nullopt, std::move(v)};
        }
        for (int j = 0; j < n; ++j) {
          if (done[j] || j == i || s[i][j] == 0) continue;
          // both diagonals vanish here, so e_i -/+ e_j goes negative
          std::vector<Rat> w(n, Rat(0));
          w[i] = 1;
          w[j] = (s[i][j] > 0) ? Rat(-1) : Rat(1);
          auto v = lift_witness(w);
          return PsdVerdict{std::nullopt, std::move(v)};
        }
      }
      break;  // residual block is zero: PSD
    }
    const Rat d = s[pivot][pivot];
    diag_vals.push_back(d);
    pivots.push_back(pivot);
    done[pivot] = true;
    for (int r = 0; r < n; ++r) {
      if (done[r] || s[r][pivot] == 0) continue;
      elim[r][pivot] = s[r][pivot] / d;
    }
    for (int r = 0; r < n; ++r) {
      if (done[r] || elim[r][pivot] == 0) continue;
      for (int c = 0; c < n; ++c) {
        if (done[c]) continue;
        s[r][c] -= elim[r][pivot] * s[pivot][c];
      }
    }
    for (int r = 0; r < n; ++r)
      if (!done[r]) {
        s[r][pivot] = 0;
        s[pivot][r] = 0;
      }
  }

  // assemble the factorization in pivot order followed by untouched indices
  PsdFactorization f;
  f.perm = pivots;
  for (int i = 0; i < n; ++i)
    if (!done[i]) {
      f.perm.push_back(i);
      diag_vals.push_back(Rat(0));
    }
  const int m = n;
  f.lower.assign(m, std::vector<Rat>(m, Rat(0)));
  f.diag = diag_vals;
  std::vector<int> slot(n);
  for (int i = 0; i < m; ++i) slot[f.perm[i]] = i;
  for (int i = 0; i < m; ++i) f.lower[i][i] = 1;
  for (size_t pi = 0; pi < pivots.size(); ++pi) {
    const int p = pivots[pi];
    for (int r = 0; r < n; ++r) {
      if (r == p || elim[r][p] == 0) continue;
      if (slot[r] > slot[p]) f.lower[slot[r]][slot[p]] = elim[r][p];
    }
  }
  return PsdVerdict{std::move(f), std::nullopt};
}

bool verify_factorization(const SymMatrix& a, const PsdFactorization& f) {
  const int n = a.size();
  if (static_cast<int>(f.perm.size()) != n || static_cast<int>(f.diag.size()) != n ||
      static_cast<int>(f.lower.size()) != n)
    return false;
  std::vector<bool> seen(n, false);
  for (int p : f.perm) {
    if (p < 0 || p >= n || seen[p]) return false;
    seen[p] = true;
  }
  for (const Rat& d : f.diag)
    if (d < 0) return false;
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(f.lower[i].size()) != n) return false;
    if (f.lower[i][i] != 1) return false;
    for (int j = i + 1; j < n; ++j)
      if (f.lower[i][j] != 0) return false;
  }
  // P^t A P == L D L^t entrywise
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      Rat acc(0);
      for (int t = 0; t <= j; ++t) acc += f.lower[i][t] * f.diag[t] * f.lower[j][t];
      if (acc != a.get(f.perm[i], f.perm[j])) return false;
    }
  return true;
}

bool verify_farkas(const std::vector<std::vector<Rat>>& m, const std::vector<Rat>& b,
                   const FarkasCertificate& cert) {
  const size_t rows = m.size();
  if (cert.multipliers.size() != rows || b.size() != rows) return false;
  bool any_positive = false;
  for (const Rat& y : cert.multipliers) {
    if (y < 0) return false;
    if (y > 0) any_positive = true;
  }
  if (!any_positive) return false;
  const size_t cols = rows == 0 ? 0 : m[0].size();
  for (size_t c = 0; c < cols; ++c) {
    Rat acc(0);
    for (size_t r = 0; r < rows; ++r)
      if (cert.multipliers[r] != 0) acc += cert.multipliers[r] * m[r][c];
    if (acc != 0) return false;
  }
  Rat rhs(0);
  for (size_t r = 0; r < rows; ++r)
    if (cert.multipliers[r] != 0) rhs += cert.multipliers[r] * b[r];
  return rhs > 0;
}

namespace {

// Dense phase-1 simplex tableau for: find x >= 0 with A x = rhs, rhs >= 0.
// Columns of A are passed in; artificial columns are appended internally.
struct Phase1 {
  size_t rows, cols;                     // structural columns only
  std::vector<std::vector<Rat>> t;       // rows x (cols + rows + 1), artificial block + rhs
  std::vector<Rat> obj;                  // reduced-cost row, same width
  std::vector<size_t> basis;             // basis[r] = column id (>= cols means artificial r-cols)

  Phase1(const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& rhs) {
    rows = a.size();
    cols = rows == 0 ? 0 : a[0].size();
    const size_t width = cols + rows + 1;
    t.assign(rows, std::vector<Rat>(width, Rat(0)));
    for (size_t r = 0; r < rows; ++r) {
      for (size_t c = 0; c < cols; ++c) t[r][c] = a[r][c];
      t[r][cols + r] = 1;
      t[r][width - 1] = rhs[r];
    }
    basis.resize(rows);
    for (size_t r = 0; r < rows; ++r) basis[r] = cols + r;
    obj.assign(width, Rat(0));
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < width; ++c) obj[c] += t[r][c];
    for (size_t r = 0; r < rows; ++r) obj[cols + r] = 0;  // z_j - c_j is 0 on artificials
  }

  void pivot(size_t prow, size_t pcol) {
    const size_t width = cols + rows + 1;
    const Rat inv = Rat(1) / t[prow][pcol];
    for (size_t c = 0; c < width; ++c) t[prow][c] *= inv;
    for (size_t r = 0; r < rows; ++r) {
      if (r == prow || t[r][pcol] == 0) continue;
      const Rat f = t[r][pcol];
      for (size_t c = 0; c < width; ++c)
        if (t[prow][c] != 0) t[r][c] -= f * t[prow][c];
    }
    if (obj[pcol] != 0) {
      const Rat f = obj[pcol];
      for (size_t c = 0; c < width; ++c)
        if (t[prow][c] != 0) obj[c] -= f * t[prow][c];
    }
    basis[prow] = pcol;
  }

  // Largest-coefficient entering with a lexicographic ratio test; the
  // artificial block keeps rows lexicographically distinct, so the rule is
  // anti-cycling even on the heavily degenerate systems this solver sees.
  Rat solve() {
    const size_t width = cols + rows + 1;
    // compare (row r)/t[r][enter] against (row l)/t[l][enter]: rhs first,
    // then the full row left to right
    auto lex_less = [&](size_t r, size_t l, size_t enter) {
      const Rat& pr = t[r][enter];
      const Rat& pl = t[l][enter];
      const Rat lead = t[r][width - 1] * pl - t[l][width - 1] * pr;
      if (lead != 0) return lead < 0;
      for (size_t c = 0; c < width - 1; ++c) {
        const Rat v = t[r][c] * pl - t[l][c] * pr;
        if (v != 0) return v < 0;
      }
      return false;
    };
    while (true) {
      size_t enter = width;
      for (size_t c = 0; c < cols + rows; ++c)
        if (obj[c] > 0 && (enter == width || obj[c] > obj[enter])) enter = c;
      if (enter == width) break;
      size_t leave = rows;
      for (size_t r = 0; r < rows; ++r) {
        if (t[r][enter] <= 0) continue;
        if (leave == rows || lex_less(r, leave, enter)) leave = r;
      }
      if (leave == rows)
        throw std::logic_error("phase-1 simplex unbounded (cannot happen)");
      pivot(leave, enter);
    }
    Rat value(0);
    for (size_t r = 0; r < rows; ++r)
      if (basis[r] >= cols) value += t[r][cols + rows];
    return value;
  }
};

}  // namespace

LpResult lp_feasible(const std::vector<std::vector<Rat>>& m, const std::vector<Rat>& b) {
  const size_t rows = m.size();
  if (b.size() != rows) throw std::invalid_argument("lp_feasible: row mismatch");
  const size_t q = rows == 0 ? 0 : m[0].size();
  for (const auto& row : m)
    if (row.size() != q) throw std::invalid_argument("lp_feasible: ragged matrix");

  // trivial rows: 0 >= b_r decides immediately
  std::vector<size_t> kept;
  for (size_t r = 0; r < rows; ++r) {
    bool all_zero = true;
    for (const Rat& v : m[r])
      if (v != 0) {
        all_zero = false;
        break;
      }
    if (all_zero) {
      if (b[r] > 0) {
        FarkasCertificate cert;
        cert.multipliers.assign(rows, Rat(0));
        cert.multipliers[r] = 1;
        return LpResult{std::nullopt, std::move(cert)};
      }
      continue;
    }
    kept.push_back(r);
  }
  if (kept.empty()) {
    std::vector<Rat> x(q, Rat(0));
    return LpResult{std::move(x), std::nullopt};
  }

  // scale kept rows to integers, flip signs so rhs >= 0, split x = u - v,
  // slack s: eps * sigma * (M x - s) = eps * sigma * b
  const size_t mm = kept.size();
  std::vector<Rat> sigma(mm), eps(mm);
  std::vector<std::vector<Rat>> a(mm, std::vector<Rat>(2 * q + mm, Rat(0)));
  std::vector<Rat> rhs(mm);
  for (size_t p = 0; p < mm; ++p) {
    const size_t r = kept[p];
    mpz_class den_lcm(1), num_gcd(0);
    auto fold = [&](const Rat& v) {
      if (v == 0) return;
      mpz_class den = v.get_den(), num = v.get_num();
      mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), den.get_mpz_t());
      mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), num.get_mpz_t());
    };
    for (const Rat& v : m[r]) fold(v);
    fold(b[r]);
    Rat scale = Rat(den_lcm);
    if (num_gcd != 0) scale /= Rat(num_gcd);
    if (scale < 0) scale = -scale;
    sigma[p] = scale;
    eps[p] = (b[r] * scale >= 0) ? Rat(1) : Rat(-1);
    for (size_t c = 0; c < q; ++c) {
      Rat v = eps[p] * scale * m[r][c];
      a[p][c] = v;
      a[p][q + c] = -v;
    }
    a[p][2 * q + p] = -eps[p];
    rhs[p] = eps[p] * scale * b[r];
  }

  Phase1 tab(a, rhs);
  const Rat w = tab.solve();

  if (w > 0) {
    // dual multipliers off the final artificial block
    std::vector<Rat> yhat(mm, Rat(0));
    for (size_t r = 0; r < mm; ++r) {
      if (tab.basis[r] < tab.cols) continue;
      for (size_t c = 0; c < mm; ++c) yhat[c] += tab.t[r][tab.cols + c];
    }
    FarkasCertificate cert;
    cert.multipliers.assign(rows, Rat(0));
    for (size_t p = 0; p < mm; ++p) cert.multipliers[kept[p]] = eps[p] * sigma[p] * yhat[p];
    cert.multipliers = normalize_to_coprime_integers(cert.multipliers);
    if (!verify_farkas(m, b, cert))
      throw std::logic_error("lp_feasible: Farkas certificate failed self-check");
    return LpResult{std::nullopt, std::move(cert)};
  }

  std::vector<Rat> x(q, Rat(0));
  for (size_t r = 0; r < mm; ++r) {
    const size_t col = tab.basis[r];
    const Rat& val = tab.t[r][tab.cols + mm];
    if (col < q)
      x[col] += val;
    else if (col < 2 * q)
      x[col - q] -= val;
  }
  for (size_t r = 0; r < rows; ++r) {
    Rat acc(0);
    for (size_t c = 0; c < q; ++c)
      if (m[r][c] != 0) acc += m[r][c] * x[c];
    if (acc < b[r]) throw std::logic_error("lp_feasible: solution failed self-check");
  }
  return LpResult{std::move(x), std::nullopt};
}

EqualityNonnegResult equality_nonneg_solve(const std::vector<std::vector<Rat>>& a,
                                           const std::vector<Rat>& rhs) {
  const size_t all_rows = a.size();
  if (rhs.size() != all_rows) throw std::invalid_argument("equality_nonneg_solve: row mismatch");
  const size_t cols = all_rows == 0 ? 0 : a[0].size();

  // zero rows decide themselves; dropping them shrinks the tableau
  std::vector<size_t> live;
  for (size_t r = 0; r < all_rows; ++r) {
    if (a[r].size() != cols) throw std::invalid_argument("equality_nonneg_solve: ragged matrix");
    bool zero = true;
    for (const Rat& v : a[r])
      if (v != 0) {
        zero = false;
        break;
      }
    if (!zero) {
      live.push_back(r);
      continue;
    }
    if (rhs[r] != 0) {
      EqualityNonnegResult out;
      std::vector<Rat> d(all_rows, Rat(0));
      d[r] = rhs[r] > 0 ? Rat(1) : Rat(-1);
      out.dual = std::move(d);
      return out;
    }
  }
  if (live.size() < all_rows) {
    std::vector<std::vector<Rat>> sub;
    std::vector<Rat> sub_rhs;
    sub.reserve(live.size());
    for (size_t r : live) {
      sub.push_back(a[r]);
      sub_rhs.push_back(rhs[r]);
    }
    EqualityNonnegResult inner = equality_nonneg_solve(sub, sub_rhs);
    if (inner.dual) {
      std::vector<Rat> d(all_rows, Rat(0));
      for (size_t p = 0; p < live.size(); ++p) d[live[p]] = (*inner.dual)[p];
      inner.dual = std::move(d);
    }
    return inner;
  }
  const size_t rows = all_rows;

  // scale each row to integers and flip so the right-hand side is nonnegative
  std::vector<std::vector<Rat>> ahat(rows, std::vector<Rat>(cols, Rat(0)));
  std::vector<Rat> bhat(rows), row_scale(rows);
  for (size_t r = 0; r < rows; ++r) {
    if (a[r].size() != cols) throw std::invalid_argument("equality_nonneg_solve: ragged matrix");
    mpz_class den_lcm(1), num_gcd(0);
    auto fold = [&](const Rat& v) {
      if (v == 0) return;
      mpz_class den = v.get_den(), num = v.get_num();
      mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), den.get_mpz_t());
      mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), num.get_mpz_t());
    };
    for (const Rat& v : a[r]) fold(v);
    fold(rhs[r]);
    Rat scale = Rat(den_lcm);
    if (num_gcd != 0) scale /= Rat(num_gcd);
    if (scale < 0) scale = -scale;
    if (scale == 0) scale = 1;
    if (rhs[r] * scale < 0) scale = -scale;
    row_scale[r] = scale;
    for (size_t c = 0; c < cols; ++c) ahat[r][c] = a[r][c] * scale;
    bhat[r] = rhs[r] * scale;
  }

  Phase1 tab(ahat, bhat);
  const Rat w = tab.solve();

  EqualityNonnegResult out;
  if (w > 0) {
    std::vector<Rat> dhat(rows, Rat(0));
    for (size_t r = 0; r < rows; ++r) {
      if (tab.basis[r] < tab.cols) continue;
      for (size_t c = 0; c < rows; ++c) dhat[c] += tab.t[r][tab.cols + c];
    }
    std::vector<Rat> d(rows);
    for (size_t r = 0; r < rows; ++r) d[r] = dhat[r] * row_scale[r];
    // exact self-check: d^t A <= 0 columnwise and d^t rhs > 0
    for (size_t c = 0; c < cols; ++c) {
      Rat acc(0);
      for (size_t r = 0; r < rows; ++r)
        if (d[r] != 0) acc += d[r] * a[r][c];
      if (acc > 0) throw std::logic_error("equality_nonneg_solve: dual failed self-check");
    }
    Rat val(0);
    for (size_t r = 0; r < rows; ++r)
      if (d[r] != 0) val += d[r] * rhs[r];
    if (val <= 0) throw std::logic_error("equality_nonneg_solve: dual value not positive");
    out.dual = std::move(d);
    return out;
  }

  std::vector<Rat> y(cols, Rat(0));
  for (size_t r = 0; r < rows; ++r)
    if (tab.basis[r] < cols) y[tab.basis[r]] = tab.t[r][tab.cols + rows];
  for (size_t r = 0; r < rows; ++r) {
    Rat acc(0);
    for (size_t c = 0; c < cols; ++c)
      if (y[c] != 0) acc += a[r][c] * y[c];
    if (acc != rhs[r]) throw std::logic_error("equality_nonneg_solve: solution failed self-check");
  }
  out.solution = std::move(y);
  return out;
}

LinearSolveResult solve_linear(const std::vector<std::vector<Rat>>& m, const std::vector<Rat>& b) {
  const size_t rows = m.size();
  if (b.size() != rows) throw std::invalid_argument("solve_linear: row mismatch");
  const size_t cols = rows == 0 ? 0 : m[0].size();
  for (const auto& row : m)
    if (row.size() != cols) throw std::invalid_argument("solve_linear: ragged matrix");

  // eliminate on [M | I | b] so inconsistency hands back multipliers
  std::vector<std::vector<Rat>> w(rows, std::vector<Rat>(cols + rows + 1, Rat(0)));
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) w[r][c] = m[r][c];
    w[r][cols + r] = 1;
    w[r][cols + rows] = b[r];
  }

  std::vector<int> pivot_col_of_row(rows, -1);
  std::vector<int> pivot_row_of_col(cols, -1);
  size_t rank = 0;
  for (size_t c = 0; c < cols && rank < rows; ++c) {
    size_t pr = rank;
    while (pr < rows && w[pr][c] == 0) ++pr;
    if (pr == rows) continue;
    std::swap(w[pr], w[rank]);
    const Rat inv = Rat(1) / w[rank][c];
    for (size_t cc = 0; cc < cols + rows + 1; ++cc) w[rank][cc] *= inv;
    for (size_t r = 0; r < rows; ++r) {
      if (r == rank || w[r][c] == 0) continue;
      const Rat f = w[r][c];
      for (size_t cc = 0; cc < cols + rows + 1; ++cc)
        if (w[rank][cc] != 0) w[r][cc] -= f * w[rank][cc];
    }
    pivot_col_of_row[rank] = static_cast<int>(c);
    pivot_row_of_col[c] = static_cast<int>(rank);
    ++rank;
  }

  LinearSolveResult out;
  for (size_t r = rank; r < rows; ++r) {
    if (w[r][cols + rows] != 0) {
      out.consistent = false;
      out.refutation.assign(rows, Rat(0));
      for (size_t c = 0; c < rows; ++c) out.refutation[c] = w[r][cols + c];
      return out;
    }
  }
  out.consistent = true;
  out.particular.assign(cols, Rat(0));
  for (size_t r = 0; r < rank; ++r)
    out.particular[pivot_col_of_row[r]] = w[r][cols + rows];
  for (size_t c = 0; c < cols; ++c) {
    if (pivot_row_of_col[c] >= 0) continue;
    std::vector<Rat> null_vec(cols, Rat(0));
    null_vec[c] = 1;
    for (size_t r = 0; r < rank; ++r)
      null_vec[pivot_col_of_row[r]] = -w[r][c];
    out.nullspace.push_back(std::move(null_vec));
  }
  return out;
}

}  // namespace conecert
