#ifndef CONECERT_VARIETY_HPP
#define CONECERT_VARIETY_HPP

#include <map>
#include <variant>
#include <vector>

#include "conecert/gram.hpp"

namespace conecert {

// Level-i filtration binomial q_i = Z_0 Z_{n+i} - Z_{s} Z_{t} with
// alpha_s + alpha_t = alpha_0 + alpha_{n+i}, s minimal, and t < n+i.
struct BinomialRelation {
  int level;  // i >= 1
  int s;
  int t;
};

// Scans s = 1, 2, ... for the first index whose complement exponent is a
// valid basis element with index t >= s. Succeeds for every 1 <= i <= k-n.
BinomialRelation relation_at_level(const Dims& dims, int level);

// Affine chart of the level-i slice at z_0 = 1: coordinates n+1..n+i are
// monomials in z_1..z_n, everything else stays free.
struct ChartMap {
  Dims dims;
  int level;
  // dependent coordinate index (n+j) -> exponent over z_1..z_n (length n)
  std::map<int, Exponent> dependent;
  // remaining indices of {1..k}, ascending
  std::vector<int> free;
};

ChartMap chart(const Dims& dims, int level);

// Full point z in Q^{k+1} with z_0 = 1, dependents computed from the values
// assigned to base coordinates z_1..z_n and the non-base free coordinates.
// `free_values` follows the order of chart.free.
std::vector<Rat> chart_point_from_free(const ChartMap& chart, const std::vector<Rat>& free_values);

// Exact check that z_0 = 1 and q_j(z) = 0 for all j <= level.
bool on_chart(const Dims& dims, int level, const std::vector<Rat>& point);

// Substitutes z_0 = 1 and the dependent monomials into the quadratic form of
// A. The result lives over variable ids 1..k (only base and free ids occur);
// id 0 is unused so that variable j of the result is coordinate z_j.
Poly restrict_to_chart(const SymMatrix& a, const ChartMap& chart);

// One component of the z_0 = 0 slice: coordinates in `zeros` vanish (plus
// z_0), the complement stays free. `zeros` is a minimal hitting set of the
// pairs {s_j, t_j}, j <= level.
struct BoundaryStratum {
  std::vector<int> zeros;  // ascending
};

// All minimal hitting sets of the level pairs, canonically ordered.
std::vector<BoundaryStratum> boundary_strata(const Dims& dims, int level);

// Indices {0..k} \ ({0} u zeros): the coordinates surviving on a stratum.
std::vector<int> stratum_survivors(const Dims& dims, const BoundaryStratum& stratum);

// Point-sampling strategies for chart points.
struct GridStrategy {
  int radius = 1;       // free coordinates range over multiples of step in [-radius, radius]
  int step_den = 1;     // step = 1/step_den
  size_t cap = 2000;
};
struct SignedUnitsStrategy {
  size_t cap = 2000;    // free coordinates over {-1, 0, 1}, enumeration capped
};
struct RandomRationalStrategy {
  size_t count = 64;
  long num_max = 2;
  long den_max = 4;
};
struct ExplicitStrategy {
  std::vector<std::vector<Rat>> free_parts;  // one entry per point, chart.free order
};
using PointStrategy =
    std::variant<GridStrategy, SignedUnitsStrategy, RandomRationalStrategy, ExplicitStrategy>;

// Deterministic given (chart, strategy, seed); every emitted point satisfies
// the chart equations by construction. Explicit points are validated.
std::vector<std::vector<Rat>> sample_chart_points(const ChartMap& chart,
                                                  const PointStrategy& strategy,
                                                  std::uint64_t seed);

}  // namespace conecert

#endif  // CONECERT_VARIETY_HPP
