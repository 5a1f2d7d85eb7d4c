#ifndef CONECERT_CERTIFY_HPP
#define CONECERT_CERTIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "conecert/exactla.hpp"
#include "conecert/variety.hpp"

namespace conecert {

// Weighted arithmetic-geometric mean data proving a form with exactly one
// negative term nonnegative: sources are positive terms with componentwise
// even exponents, weights are nonnegative, sum to one, mix to the target
// exponent, and |negative coefficient| * weight stays below each source
// coefficient.
struct AmgmCertificate {
  Exponent target;
  Rat target_coeff;  // the (negative) coefficient of the target term
  std::vector<Exponent> source_exponents;
  std::vector<Rat> source_coeffs;
  std::vector<Rat> weights;
  bool odd_target = false;  // target exponent has an odd entry; bound taken on |x^target|
};

// nullopt when the structure is absent or the weight system is infeasible.
std::optional<AmgmCertificate> amgm_check(const Form& f);
bool verify_amgm(const Form& f, const AmgmCertificate& cert);

// Chart-nonnegativity proof carried by a membership certificate: either the
// chart polynomial is literally the dehomogenization of a nonnegative
// reference form, or an explicit weighted sum of squares is supplied.
struct IdentityChartProof {
  Form reference;
  AmgmCertificate reference_nonneg;
};
struct SosChartProof {
  std::vector<Poly> squares;   // over coordinate ids 1..k
  std::vector<Rat> weights;    // positive
};
using ChartProof = std::variant<IdentityChartProof, SosChartProof>;

struct StratumProof {
  BoundaryStratum stratum;
  PsdFactorization factorization;
};

// Witnesses f in the level-i cone: a Gram matrix whose quadratic form is
// nonnegative on the whole level-i binomial slice (chart plus boundary).
struct MembershipCertificate {
  Dims dims;
  int level;
  Form form;
  SymMatrix gram;
  ChartProof chart_proof;
  std::vector<StratumProof> boundary;
};

// Witnesses f outside the level-i cone: chart points such that no Gram matrix
// of f is nonnegative on all of them, proven by exact Farkas multipliers over
// the point constraints.
struct RefutationCertificate {
  Dims dims;
  int level;
  Form form;
  std::vector<std::vector<Rat>> points;
  FarkasCertificate farkas;
};

enum class MembershipFailure { GramMismatch, ChartProofFails, BoundaryNotPsd };

struct CertifyError : std::runtime_error {
  MembershipFailure reason;
  CertifyError(MembershipFailure r, const std::string& what)
      : std::runtime_error(what), reason(r) {}
};

struct IdentityHint {
  Form reference;
  std::optional<AmgmCertificate> reference_nonneg;  // computed when absent
};
struct SosHint {
  std::vector<Poly> squares;
  std::vector<Rat> weights;
};
using ChartProofHint = std::variant<IdentityHint, SosHint>;

// Verifies the three membership components exactly and assembles the
// certificate; throws CertifyError naming the first failing component.
MembershipCertificate verify_membership(const Form& f, int level, const SymMatrix& a,
                                        const ChartProofHint& hint);

// Pure re-verification of a (possibly deserialized) certificate.
bool check_membership_certificate(const MembershipCertificate& cert, std::string* why = nullptr);

struct Inconclusive {
  std::vector<Rat> lambda;  // feasible coset point: candidate Gram matrix
};
using RefutationOutcome = std::variant<RefutationCertificate, Inconclusive>;

// Builds the constraint system  q_{base + sum lambda_r N_r}(z_m) >= 0  over
// the supplied chart points and solves it exactly. Infeasibility yields a
// refutation certificate (points pruned to the Farkas support); feasibility
// yields the feasible coset parameters.
RefutationOutcome refute_membership(const Form& f, int level,
                                    const std::vector<std::vector<Rat>>& points);

bool check_refutation_certificate(const RefutationCertificate& cert, std::string* why = nullptr);

// Knobs for the searches; all defaults are sized for desk-scale runs.
struct SearchConfig {
  std::uint64_t seed = 0;
  size_t point_budget = 30000;
  size_t initial_chunk = 2600;
  size_t cut_batch = 256;
  size_t max_rounds = 160;
  size_t signed_units_cap = 2000;
  size_t random_points = 512;
  long random_num_max = 2;
  long random_den_max = 4;
  size_t sos_max_iterations = 4000;
  double sos_tolerance = 1e-9;
  int lift_window = 2;  // x-pool radius for the refutation cut oracle
  bool trace = false;   // per-round search statistics on stderr
};

// Point-search ladder for refutations: supplied hint points first, then
// signed units on the free coordinates, then seeded random rationals; a
// feasible coset candidate from any round is attacked with an exact
// tail-minimization oracle that produces violated chart points.
RefutationOutcome refute_search(const Form& f, int level, const SearchConfig& config,
                                const std::vector<std::vector<Rat>>& hint_points = {});

// Floating alternating projection onto (PSD cone) and (Gram coset), followed
// by rationalization rounds that must pass exact verification; only exact
// successes return a certificate (level 0, explicit squares).
std::optional<MembershipCertificate> sos_search(const Form& f, const SearchConfig& config);

struct ClassifyResult {
  int lo = 0;                      // 1 + highest refuted level
  int hi = -1;                     // lowest certified level, -1 if none found
  bool refuted_at_top = false;     // form is not even PSD
  bool budget_exhausted = false;
  std::optional<MembershipCertificate> membership;
  std::optional<RefutationCertificate> refutation;  // at level lo-1
};

ClassifyResult classify_level(const Form& f, const SearchConfig& config);

// A fully verified strict-separation witness: the form lies in the level
// member_level cone and outside the level refute_level cone.
struct SeparationBundle {
  Form form;
  Dims dims;
  int member_level;
  int refute_level;
  MembershipCertificate membership;
  RefutationCertificate refutation;
};

// X_0^2 * f lives one degree higher with the same separation levels; the Gram
// matrix expands along the basis prefix and refutation points pad with zeros.
// Everything is re-verified from scratch at the larger size.
SeparationBundle transfer_degree_raise(const SeparationBundle& source);

// f(X_{i_0},...,X_{i_n}) in big_n+1 variables; target levels are dictated by
// where the injected basis indices land. Re-verified from scratch.
SeparationBundle transfer_var_extend(const SeparationBundle& source,
                                     const std::vector<int>& injection, int big_n,
                                     int member_level, int refute_level);

}  // namespace conecert

#endif  // CONECERT_CERTIFY_HPP
