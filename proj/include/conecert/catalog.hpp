#ifndef CONECERT_CATALOG_HPP
#define CONECERT_CATALOG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conecert/certify.hpp"

namespace conecert {

// A built-in form with everything needed to reproduce its separation: the
// level its stored Gram matrix certifies, refutation point hints per level,
// and the classification interval the library establishes for it.
struct CatalogEntry {
  std::string name;
  std::string provenance;
  Form form;
  std::optional<SymMatrix> gram;
  int gram_level = -1;
  std::map<int, std::vector<std::vector<Rat>>> points;  // level -> chart points
  std::pair<int, int> expected_interval{-1, -1};
};

namespace catalog {

// Known names: motzkin, motzkin_sigma, choi_lam_sextic, choi_lam_sextic_tau,
// choi_lam_quartic, choi_lam_quartic_sigma, choi_lam_quartic_tau,
// x1sq_choi_lam_tau. Throws on anything else. Every stored Gram matrix is
// checked against its form on first access.
const CatalogEntry& get(const std::string& name);

const std::vector<std::string>& names();

// Entry whose form equals f exactly, if any.
const CatalogEntry* match(const Form& f);

}  // namespace catalog

enum class ChainLink { Equal, StrictExpected };

struct ChainStep {
  int level;  // the inclusion between level and level+1
  ChainLink link;
};

// The expected shape of the cone chain for a supported case: equalities for
// the initial segment, strict (machine-certifiable) inclusions after it.
// Supported: (4,4), (3,6), (m,4) with m >= 5, (m,6) with m >= 4, given as
// (num_vars, degree).
std::vector<ChainStep> expected_chain(int num_vars, int degree);

}  // namespace conecert

#endif  // CONECERT_CATALOG_HPP
