#ifndef CONECERT_PIPELINE_HPP
#define CONECERT_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "conecert/catalog.hpp"
#include "conecert/jsonio.hpp"

namespace conecert {

// Run-wide knobs. Identical configs over identical inputs produce
// byte-identical certificate payloads.
struct RunConfig {
  std::uint64_t seed = 0;
  size_t point_budget = 30000;
  size_t max_rounds = 160;
  size_t sos_max_iterations = 4000;
  std::string json_out;  // certificate directory; empty = no files
  int max_k = 40;        // refuse cases with a larger basis
  int verbosity = 1;

  SearchConfig search() const {
    SearchConfig s;
    s.seed = seed;
    s.point_budget = point_budget;
    s.max_rounds = max_rounds;
    s.sos_max_iterations = sos_max_iterations;
    return s;
  }
};

// One strict inclusion between consecutive cones, fully certified.
struct PairReport {
  int level;  // separation between level and level+1
  std::string form_name;
  bool verified = false;
  bool inconclusive = false;
  std::string detail;
  std::optional<SeparationBundle> bundle;
  std::string membership_path;
  std::string refutation_path;
};

struct ReproduceReport {
  int num_vars = 0;
  int degree = 0;
  std::vector<int> equal_levels;  // inclusions asserted equal, not machine-checked
  std::vector<PairReport> pairs;
  int exit_code = 1;  // 0 ok, 2 inconclusive, 1 failure
};

// Builds, writes (when json_out is set) and re-verifies every certificate for
// the expected chain of the given case.
ReproduceReport reproduce_case(int num_vars, int degree, const RunConfig& config);

// Separation witnesses used as transfer sources.
SeparationBundle catalog_bundle(const std::string& name, const SearchConfig& config);

// All strict pairs for (n+1)-ary quartics, n >= 3.
std::vector<PairReport> plan_quartics(int n, const SearchConfig& config);

// All strict pairs for (n+1)-ary sextics, n >= 2.
std::vector<PairReport> plan_sextics(int n, const SearchConfig& config);

struct ClassifyOutcome {
  int lo = 0;
  int hi = -1;
  bool refuted_at_top = false;
  bool budget_exhausted = false;
  std::optional<MembershipCertificate> membership;
  std::optional<RefutationCertificate> refutation;
};

// Catalog-aware classification: a catalog match replays its stored interval
// (refutations re-proved at every level below, membership re-verified); other
// forms go through the generic searches.
ClassifyOutcome classify_form(const Form& f, const SearchConfig& config);

}  // namespace conecert

#endif  // CONECERT_PIPELINE_HPP
