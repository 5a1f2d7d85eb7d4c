#include "conecert/certify.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <set>

namespace conecert {

namespace {

bool exponent_all_even(const Exponent& e) {
  for (int v : e)
    if (v % 2 != 0) return false;
  return true;
}

}  // namespace

std::optional<AmgmCertificate> amgm_check(const Form& f) {
  std::vector<std::pair<Exponent, Rat>> positives;
  std::optional<std::pair<Exponent, Rat>> negative;
  for (const auto& [e, c] : f.terms()) {
    if (c > 0) {
      positives.emplace_back(e, c);
    } else {
      if (negative) return std::nullopt;  // more than one negative term
      negative = {e, c};
    }
  }
  if (!negative || positives.empty()) return std::nullopt;
  for (const auto& [e, c] : positives)
    if (!exponent_all_even(e)) return std::nullopt;

  const Exponent& target = negative->first;
  const Rat neg_abs = -negative->second;
  const size_t j = positives.size();
  const int nv = f.nvars();

  // weights lambda >= 0 with sum 1, sum lambda_j beta_j = target, and
  // |c_neg| lambda_j <= c_j; assembled as M lambda >= b
  std::vector<std::vector<Rat>> m;
  std::vector<Rat> b;
  auto push_eq = [&](const std::vector<Rat>& row, const Rat& value) {
    m.push_back(row);
    b.push_back(value);
    std::vector<Rat> neg(row.size());
    for (size_t c = 0; c < row.size(); ++c) neg[c] = -row[c];
    m.push_back(std::move(neg));
    b.push_back(-value);
  };
  for (int v = 0; v < nv; ++v) {
    std::vector<Rat> row(j);
    for (size_t p = 0; p < j; ++p) row[p] = positives[p].first[v];
    push_eq(row, Rat(target[v]));
  }
  push_eq(std::vector<Rat>(j, Rat(1)), Rat(1));
  for (size_t p = 0; p < j; ++p) {
    std::vector<Rat> row(j, Rat(0));
    row[p] = 1;
    m.push_back(row);
    b.push_back(Rat(0));
    std::vector<Rat> bound(j, Rat(0));
    bound[p] = -neg_abs;
    m.push_back(std::move(bound));
    b.push_back(-positives[p].second);
  }

  auto lp = lp_feasible(m, b);
  if (!lp.solution) return std::nullopt;

  AmgmCertificate cert;
  cert.target = target;
  cert.target_coeff = negative->second;
  cert.odd_target = !exponent_all_even(target);
  for (size_t p = 0; p < j; ++p) {
    cert.source_exponents.push_back(positives[p].first);
    cert.source_coeffs.push_back(positives[p].second);
    cert.weights.push_back((*lp.solution)[p]);
  }
  if (!verify_amgm(f, cert)) throw std::logic_error("amgm_check: certificate failed self-check");
  return cert;
}

bool verify_amgm(const Form& f, const AmgmCertificate& cert) {
  const int nv = f.nvars();
  if (static_cast<int>(cert.target.size()) != nv) return false;
  const size_t j = cert.source_exponents.size();
  if (cert.source_coeffs.size() != j || cert.weights.size() != j || j == 0) return false;

  // the form must consist of the certified sources (even exponents, positive)
  // plus exactly the one negative target term
  std::map<Exponent, Rat, LexDescending> remaining(f.terms().begin(), f.terms().end());
  auto target_it = remaining.find(cert.target);
  if (target_it == remaining.end()) return false;
  if (target_it->second != cert.target_coeff || cert.target_coeff >= 0) return false;
  remaining.erase(target_it);
  for (size_t p = 0; p < j; ++p) {
    auto it = remaining.find(cert.source_exponents[p]);
    if (it == remaining.end()) return false;
    if (it->second != cert.source_coeffs[p]) return false;
  }
  for (const auto& [e, c] : remaining) {
    if (c <= 0) return false;  // a second negative term breaks the bound
    if (!exponent_all_even(e)) return false;
  }
  if (cert.odd_target == exponent_all_even(cert.target)) return false;

  Rat weight_sum(0);
  const Rat neg_abs = -cert.target_coeff;
  for (size_t p = 0; p < j; ++p) {
    const Rat& w = cert.weights[p];
    if (w < 0) return false;
    weight_sum += w;
    if (neg_abs * w > cert.source_coeffs[p]) return false;
    if (!exponent_all_even(cert.source_exponents[p])) return false;
  }
  if (weight_sum != 1) return false;
  for (int v = 0; v < nv; ++v) {
    Rat mix(0);
    for (size_t p = 0; p < j; ++p) mix += cert.weights[p] * Rat(cert.source_exponents[p][v]);
    if (mix != Rat(cert.target[v])) return false;
  }
  return true;
}

namespace {

// lift a polynomial over variables x_1..x_n to the chart coordinate ring
// (ids 1..k) so it can be compared with a chart restriction
Poly embed_dehomogenized(const Poly& p, int k) {
  Poly out(k + 1);
  for (const auto& [e, c] : p.terms()) {
    Exponent big(static_cast<size_t>(k) + 1, 0);
    for (size_t v = 0; v < e.size(); ++v) big[v + 1] = e[v];
    out.add_term(big, c);
  }
  return out;
}

bool check_chart_proof(const Dims& dims, int level, const SymMatrix& a, const ChartProof& proof,
                       std::string* why) {
  const Poly chart_poly = restrict_to_chart(a, chart(dims, level));
  if (const auto* ident = std::get_if<IdentityChartProof>(&proof)) {
    if (ident->reference.nvars() != dims.num_vars() ||
        ident->reference.degree() != 2 * dims.d) {
      if (why) *why = "identity reference form has wrong shape";
      return false;
    }
    const Poly target = embed_dehomogenized(dehomogenize(ident->reference, 0), dims.k());
    if (chart_poly != target) {
      if (why) *why = "chart restriction differs from the dehomogenized reference";
      return false;
    }
    if (!verify_amgm(ident->reference, ident->reference_nonneg)) {
      if (why) *why = "reference nonnegativity certificate failed";
      return false;
    }
    return true;
  }
  const auto& sos = std::get<SosChartProof>(proof);
  if (sos.squares.size() != sos.weights.size() || sos.squares.empty()) {
    if (why) *why = "square/weight arity mismatch";
    return false;
  }
  Poly acc(dims.k() + 1);
  for (size_t p = 0; p < sos.squares.size(); ++p) {
    if (sos.weights[p] <= 0) {
      if (why) *why = "nonpositive square weight";
      return false;
    }
    if (sos.squares[p].nvars() != dims.k() + 1) {
      if (why) *why = "square over wrong coordinate ring";
      return false;
    }
    acc += (sos.squares[p] * sos.squares[p]) * sos.weights[p];
  }
  if (acc != chart_poly) {
    if (why) *why = "weighted squares do not reproduce the chart restriction";
    return false;
  }
  return true;
}

}  // namespace

MembershipCertificate verify_membership(const Form& f, int level, const SymMatrix& a,
                                        const ChartProofHint& hint) {
  if (f.degree() % 2 != 0 || f.nvars() < 2)
    throw std::invalid_argument("verify_membership: form must be even-degree in >= 2 variables");
  const Dims dims(f.nvars() - 1, f.degree() / 2);
  if (level < 0 || level > dims.k() - dims.n)
    throw std::invalid_argument("verify_membership: level out of range");

  if (gram_apply(a, dims) != f)
    throw CertifyError(MembershipFailure::GramMismatch,
                       "matrix is not a Gram matrix of the target form");

  ChartProof proof = [&]() -> ChartProof {
    if (const auto* ih = std::get_if<IdentityHint>(&hint)) {
      std::optional<AmgmCertificate> nonneg = ih->reference_nonneg;
      if (!nonneg) nonneg = amgm_check(ih->reference);
      if (!nonneg)
        throw CertifyError(MembershipFailure::ChartProofFails,
                           "no nonnegativity certificate for the reference form");
      return IdentityChartProof{ih->reference, *nonneg};
    }
    const auto& sh = std::get<SosHint>(hint);
    return SosChartProof{sh.squares, sh.weights};
  }();

  std::string why;
  if (!check_chart_proof(dims, level, a, proof, &why))
    throw CertifyError(MembershipFailure::ChartProofFails, "chart proof failed: " + why);

  std::vector<StratumProof> boundary;
  for (const BoundaryStratum& s : boundary_strata(dims, level)) {
    const SymMatrix sub = restrict_gram(a, stratum_survivors(dims, s));
    PsdVerdict verdict = psd_check(sub);
    if (!verdict.is_psd()) {
      std::string zeros;
      for (int z : s.zeros) zeros += " z" + std::to_string(z);
      throw CertifyError(MembershipFailure::BoundaryNotPsd,
                         "boundary stratum {" + zeros + " } submatrix is not PSD");
    }
    boundary.push_back(StratumProof{s, std::move(*verdict.factorization)});
  }

  return MembershipCertificate{dims, level, f, a, std::move(proof), std::move(boundary)};
}

bool check_membership_certificate(const MembershipCertificate& cert, std::string* why) {
  const Dims& dims = cert.dims;
  if (cert.form.nvars() != dims.num_vars() || cert.form.degree() != 2 * dims.d) {
    if (why) *why = "form shape does not match dims";
    return false;
  }
  if (cert.level < 0 || cert.level > dims.k() - dims.n) {
    if (why) *why = "level out of range";
    return false;
  }
  if (cert.gram.size() != dims.k() + 1) {
    if (why) *why = "gram matrix size mismatch";
    return false;
  }
  if (gram_apply(cert.gram, dims) != cert.form) {
    if (why) *why = "gram matrix does not reproduce the form";
    return false;
  }
  if (!check_chart_proof(dims, cert.level, cert.gram, cert.chart_proof, why)) return false;

  const auto strata = boundary_strata(dims, cert.level);
  if (strata.size() != cert.boundary.size()) {
    if (why) *why = "boundary proof count mismatch";
    return false;
  }
  for (size_t p = 0; p < strata.size(); ++p) {
    if (strata[p].zeros != cert.boundary[p].stratum.zeros) {
      if (why) *why = "boundary stratum mismatch";
      return false;
    }
    const SymMatrix sub = restrict_gram(cert.gram, stratum_survivors(dims, strata[p]));
    if (!verify_factorization(sub, cert.boundary[p].factorization)) {
      if (why) *why = "boundary factorization failed";
      return false;
    }
  }
  return true;
}

namespace {

// double-precision phase-1 simplex used only to guess the support of the
// exact solve; every verdict below is re-derived exactly
struct FloatPhase1 {
  size_t rows, cols;
  std::vector<double> t;  // rows x (cols + rows + 1)
  std::vector<double> obj;
  std::vector<size_t> basis;

  FloatPhase1(const std::vector<std::vector<double>>& a, const std::vector<double>& rhs) {
    rows = a.size();
    cols = rows == 0 ? 0 : a[0].size();
    const size_t width = cols + rows + 1;
    t.assign(rows * width, 0.0);
    for (size_t r = 0; r < rows; ++r) {
      for (size_t c = 0; c < cols; ++c) t[r * width + c] = a[r][c];
      t[r * width + cols + r] = 1.0;
      t[r * width + width - 1] = rhs[r];
    }
    basis.resize(rows);
    for (size_t r = 0; r < rows; ++r) basis[r] = cols + r;
    obj.assign(width, 0.0);
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < width; ++c) obj[c] += t[r * width + c];
    for (size_t r = 0; r < rows; ++r) obj[cols + r] = 0.0;
  }

  double solve(size_t max_iters = 20000) {
    const size_t width = cols + rows + 1;
    const double eps = 1e-9;
    for (size_t iter = 0; iter < max_iters; ++iter) {
      size_t enter = width;
      double best = eps;
      for (size_t c = 0; c < cols + rows; ++c)
        if (obj[c] > best) {
          best = obj[c];
          enter = c;
        }
      if (enter == width) break;
      size_t leave = rows;
      double best_ratio = 0.0, best_pivot = 0.0;
      for (size_t r = 0; r < rows; ++r) {
        const double p = t[r * width + enter];
        if (p < eps) continue;
        const double ratio = t[r * width + width - 1] / p;
        if (leave == rows || ratio < best_ratio - eps ||
            (ratio < best_ratio + eps && p > best_pivot)) {
          leave = r;
          best_ratio = ratio;
          best_pivot = p;
        }
      }
      if (leave == rows) break;
      const double inv = 1.0 / t[leave * width + enter];
      for (size_t c = 0; c < width; ++c) t[leave * width + c] *= inv;
      for (size_t r = 0; r < rows; ++r) {
        if (r == leave) continue;
        const double f = t[r * width + enter];
        if (std::abs(f) < 1e-13) continue;
        for (size_t c = 0; c < width; ++c) t[r * width + c] -= f * t[leave * width + c];
      }
      const double fo = obj[enter];
      if (std::abs(fo) > 1e-13)
        for (size_t c = 0; c < width; ++c) obj[c] -= fo * t[leave * width + c];
      basis[leave] = enter;
    }
    double w = 0.0;
    for (size_t r = 0; r < rows; ++r)
      if (basis[r] >= cols) w += t[r * (cols + rows + 1) + cols + rows];
    return w;
  }
};

struct RefutationSystem {
  GramCoset coset;
  // rows indexed by point: value of each kernel form and of the base form
  std::vector<std::vector<Rat>> kernel_values;  // [point][kernel]
  std::vector<Rat> base_values;                 // [point]
};

RefutationSystem build_refutation_system(const Form& f, int level,
                                         const std::vector<std::vector<Rat>>& points) {
  const Dims dims(f.nvars() - 1, f.degree() / 2);
  for (const auto& z : points)
    if (!on_chart(dims, level, z))
      throw std::invalid_argument("refute_membership: point violates the chart equations");
  RefutationSystem sys{generic_gram(f), {}, {}};
  sys.kernel_values.reserve(points.size());
  sys.base_values.reserve(points.size());
  std::vector<std::vector<std::tuple<int, int, Rat>>> kernel_triples;
  kernel_triples.reserve(sys.coset.kernel.size());
  for (const auto& kmat : sys.coset.kernel) kernel_triples.push_back(kmat.upper_nonzeros());
  for (const auto& z : points) {
    std::vector<Rat> row(sys.coset.kernel.size(), Rat(0));
    for (size_t r = 0; r < kernel_triples.size(); ++r) {
      Rat acc(0);
      for (const auto& [i, j, v] : kernel_triples[r]) {
        if (z[i] == 0 || z[j] == 0) continue;
        Rat term = v * z[i] * z[j];
        acc += (i == j) ? term : Rat(2) * term;
      }
      row[r] = std::move(acc);
    }
    sys.kernel_values.push_back(std::move(row));
    sys.base_values.push_back(sys.coset.base.quadratic_form(z));
  }
  return sys;
}

}  // namespace

RefutationOutcome refute_membership(const Form& f, int level,
                                    const std::vector<std::vector<Rat>>& points) {
  if (f.degree() % 2 != 0 || f.nvars() < 2)
    throw std::invalid_argument("refute_membership: form must be even-degree in >= 2 variables");
  const Dims dims(f.nvars() - 1, f.degree() / 2);
  if (level < 0 || level > dims.k() - dims.n)
    throw std::invalid_argument("refute_membership: level out of range");

  // deduplicate points, preserving order
  std::vector<std::vector<Rat>> pts;
  std::set<std::vector<Rat>> seen;
  for (const auto& z : points)
    if (seen.insert(z).second) pts.push_back(z);

  RefutationSystem sys = build_refutation_system(f, level, pts);
  const size_t q = sys.coset.kernel.size();
  const size_t m = pts.size();

  // feasibility of  q_base(z) + sum_r lambda_r q_{N_r}(z) >= 0  is decided on
  // the dual side: find y >= 0 with sum_pt y_pt kernel_values[pt] = 0 and
  // sum_pt y_pt (-base_values[pt]) = 1; a dual vector of that system hands
  // back feasible lambda directly. Large systems are solved by sifting: the
  // exact solver only ever sees a working subset of the points, candidates
  // are validated against all of them, and a Farkas vector found on a subset
  // extends by zeros to the full system.
  auto solve_on = [&](const std::vector<size_t>& working) {
    std::vector<std::vector<Rat>> a(q + 1, std::vector<Rat>(working.size(), Rat(0)));
    std::vector<Rat> rhs(q + 1, Rat(0));
    for (size_t c = 0; c < working.size(); ++c) {
      const size_t pt = working[c];
      for (size_t r = 0; r < q; ++r) a[r][c] = sys.kernel_values[pt][r];
      a[q][c] = -sys.base_values[pt];
    }
    rhs[q] = 1;
    return equality_nonneg_solve(a, rhs);
  };

  const bool trace = std::getenv("CONECERT_TRACE_LP") != nullptr;
  const size_t sift_size = std::max<size_t>(q + 24, 150);
  std::vector<size_t> working;
  std::vector<bool> in_working(m, false);
  auto include = [&](size_t pt) {
    if (!in_working[pt]) {
      in_working[pt] = true;
      working.push_back(pt);
    }
  };

  if (m > 2 * sift_size) {
    // numeric preselection of the likely Farkas support
    std::vector<std::vector<double>> fa(q + 1, std::vector<double>(m, 0.0));
    std::vector<double> frhs(q + 1, 0.0);
    for (size_t pt = 0; pt < m; ++pt) {
      double scale = 1.0;
      for (size_t r = 0; r < q; ++r)
        scale = std::max(scale, std::abs(sys.kernel_values[pt][r].get_d()));
      scale = std::max(scale, std::abs(sys.base_values[pt].get_d()));
      for (size_t r = 0; r < q; ++r) fa[r][pt] = sys.kernel_values[pt][r].get_d() / scale;
      fa[q][pt] = -sys.base_values[pt].get_d() / scale;
    }
    frhs[q] = 1.0;
    FloatPhase1 fp(fa, frhs);
    const double w = fp.solve();
    // basic structural columns mark the binding points in either outcome
    const size_t width = fp.cols + fp.rows + 1;
    for (size_t r = 0; r < fp.rows; ++r)
      if (fp.basis[r] < fp.cols) include(fp.basis[r]);
    if (trace)
      std::cerr << "  presolve: w=" << w << ", tight set " << working.size() << std::endl;
  }
  for (size_t pt = 0; pt < m && working.size() < sift_size; ++pt) include(pt);

  while (true) {
    const auto t0 = std::chrono::steady_clock::now();
    auto res = solve_on(working);
    if (trace)
      std::cerr << "  sift: " << working.size() << "/" << m << " cols, "
                << (res.solution ? "farkas" : "feasible") << ", "
                << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                << "s" << std::endl;
    if (res.solution) {
      std::vector<Rat> full(m, Rat(0));
      for (size_t c = 0; c < working.size(); ++c) full[working[c]] = (*res.solution)[c];
      FarkasCertificate cert{normalize_to_coprime_integers(full)};
      std::vector<std::vector<Rat>> support_points;
      std::vector<Rat> support_mult;
      for (size_t pt = 0; pt < m; ++pt) {
        if (cert.multipliers[pt] == 0) continue;
        support_points.push_back(pts[pt]);
        support_mult.push_back(cert.multipliers[pt]);
      }
      RefutationCertificate out{dims, level, f, std::move(support_points),
                                FarkasCertificate{std::move(support_mult)}};
      std::string why;
      if (!check_refutation_certificate(out, &why))
        throw std::logic_error("refute_membership: certificate failed self-check: " + why);
      return out;
    }

    // dual (v, s): for every working point, sum_r v_r K_r(z) - s * base(z) <= 0
    // with s > 0, so lambda = -v/s satisfies the working constraints
    const std::vector<Rat>& d = *res.dual;
    const Rat& s = d[q];
    if (s <= 0) throw std::logic_error("refute_membership: dual scale not positive");
    std::vector<Rat> lambda(q);
    for (size_t r = 0; r < q; ++r) lambda[r] = -d[r] / s;

    // validate against every point; pull the violated ones into the working set
    size_t added = 0;
    for (size_t pt = 0; pt < m && added < 64; ++pt) {
      if (in_working[pt]) continue;
      Rat acc = sys.base_values[pt];
      for (size_t r = 0; r < q; ++r)
        if (lambda[r] != 0 && sys.kernel_values[pt][r] != 0)
          acc += lambda[r] * sys.kernel_values[pt][r];
      if (acc < 0) {
        working.push_back(pt);
        in_working[pt] = true;
        ++added;
      }
    }
    if (added == 0) return Inconclusive{std::move(lambda)};
  }
}

bool check_refutation_certificate(const RefutationCertificate& cert, std::string* why) {
  const Dims& dims = cert.dims;
  if (cert.form.nvars() != dims.num_vars() || cert.form.degree() != 2 * dims.d) {
    if (why) *why = "form shape does not match dims";
    return false;
  }
  if (cert.level < 0 || cert.level > dims.k() - dims.n) {
    if (why) *why = "level out of range";
    return false;
  }
  if (cert.points.empty() || cert.farkas.multipliers.size() != cert.points.size()) {
    if (why) *why = "multiplier/point arity mismatch";
    return false;
  }
  for (const auto& z : cert.points) {
    if (static_cast<int>(z.size()) != dims.k() + 1 || !on_chart(dims, cert.level, z)) {
      if (why) *why = "point violates the chart equations";
      return false;
    }
  }
  RefutationSystem sys = build_refutation_system(cert.form, cert.level, cert.points);
  const size_t q = sys.coset.kernel.size();
  std::vector<std::vector<Rat>> m(cert.points.size(), std::vector<Rat>(q));
  std::vector<Rat> b(cert.points.size());
  for (size_t pt = 0; pt < cert.points.size(); ++pt) {
    m[pt] = sys.kernel_values[pt];
    b[pt] = -sys.base_values[pt];
  }
  if (!verify_farkas(m, b, cert.farkas)) {
    if (why) *why = "Farkas multipliers do not certify infeasibility";
    return false;
  }
  return true;
}

}  // namespace conecert
