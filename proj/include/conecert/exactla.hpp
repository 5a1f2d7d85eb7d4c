#ifndef CONECERT_EXACTLA_HPP
#define CONECERT_EXACTLA_HPP

#include <optional>
#include <vector>

#include "conecert/gram.hpp"

namespace conecert {

// P^t A P = L D L^t with L unit lower triangular and D >= 0. perm[i] is the
// original index occupying slot i after pivoting.
struct PsdFactorization {
  std::vector<int> perm;
  std::vector<std::vector<Rat>> lower;  // dense, unit diagonal
  std::vector<Rat> diag;
};

// Either a factorization (A is PSD) or a witness v with v^t A v < 0.
struct PsdVerdict {
  std::optional<PsdFactorization> factorization;
  std::optional<std::vector<Rat>> witness;

  bool is_psd() const { return factorization.has_value(); }
};

// Complete and sound: factorization iff A is PSD, exact witness otherwise.
// Pivots only on positive diagonal entries; a zero diagonal with a nonzero
// residual row yields a two-coordinate witness.
PsdVerdict psd_check(const SymMatrix& a);

// Exact reconstruction check of a claimed factorization.
bool verify_factorization(const SymMatrix& a, const PsdFactorization& f);

// Nonnegative multipliers proving {M x >= b} infeasible: y >= 0, y^t M = 0,
// y^t b > 0. Multipliers are normalized to coprime integers.
struct FarkasCertificate {
  std::vector<Rat> multipliers;
};

bool verify_farkas(const std::vector<std::vector<Rat>>& m, const std::vector<Rat>& b,
                   const FarkasCertificate& cert);

struct LpResult {
  std::optional<std::vector<Rat>> solution;   // x with M x >= b, exact
  std::optional<FarkasCertificate> farkas;
};

// Exact phase-1 simplex (Bland's rule) over the standard-form reformulation
// with free variables split into differences. Always terminates; the returned
// verdict is re-checked exactly before it is handed out.
LpResult lp_feasible(const std::vector<std::vector<Rat>>& m, const std::vector<Rat>& b);

struct EqualityNonnegResult {
  std::optional<std::vector<Rat>> solution;  // y >= 0 with A y = rhs
  std::optional<std::vector<Rat>> dual;      // d with d^t A <= 0 and d^t rhs > 0
};

// Exact phase-1 simplex for A y = rhs, y >= 0 (Bland's rule). The returned
// dual vector proves infeasibility by Farkas.
EqualityNonnegResult equality_nonneg_solve(const std::vector<std::vector<Rat>>& a,
                                           const std::vector<Rat>& rhs);

struct LinearSolveResult {
  bool consistent;
  std::vector<Rat> particular;                // one solution (free vars at 0)
  std::vector<std::vector<Rat>> nullspace;    // basis of ker M
  std::vector<Rat> refutation;                // c with c^t M = 0, c^t b != 0 when inconsistent
};

// Exact Gaussian elimination for M x = b.
LinearSolveResult solve_linear(const std::vector<std::vector<Rat>>& m, const std::vector<Rat>& b);

}  // namespace conecert

#endif  // CONECERT_EXACTLA_HPP
