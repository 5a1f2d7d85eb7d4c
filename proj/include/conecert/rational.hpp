#ifndef CONECERT_RATIONAL_HPP
#define CONECERT_RATIONAL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace conecert {

// Exact rational scalar used throughout the library. No floating point
// enters any certificate-bearing computation.
using Rat = mpq_class;

inline Rat rat_from_string(const std::string& text) {
  mpq_class q;
  if (q.set_str(text, 10) != 0)
    throw std::invalid_argument("bad rational literal: '" + text + "'");
  q.canonicalize();
  return q;
}

inline std::string rat_to_string(const Rat& q) { return q.get_str(); }

inline int rat_sign(const Rat& q) { return sgn(q); }

inline Rat rat_abs(const Rat& q) { return abs(q); }

inline Rat rat_pow(const Rat& base, unsigned exp) {
  Rat r(1);
  Rat b = base;
  unsigned e = exp;
  while (e > 0) {
    if (e & 1u) r *= b;
    b *= b;
    e >>= 1u;
  }
  return r;
}

// Deterministic 64-bit PRNG (splitmix64). Used only to *choose* test points
// and search directions; results are always re-verified exactly.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, bound)
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  // rational with numerator in [-num_max, num_max] and denominator in [1, den_max]
  Rat rational(long num_max, long den_max) {
    long num = static_cast<long>(below(static_cast<std::uint64_t>(2 * num_max + 1))) - num_max;
    long den = 1 + static_cast<long>(below(static_cast<std::uint64_t>(den_max)));
    Rat q(num, den);
    q.canonicalize();
    return q;
  }
};

inline std::vector<Rat> normalize_to_coprime_integers(const std::vector<Rat>& v) {
  mpz_class den_lcm(1);
  for (const Rat& q : v) {
    mpz_class d = q.get_den();
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
  }
  std::vector<Rat> out;
  out.reserve(v.size());
  mpz_class g(0);
  for (const Rat& q : v) {
    Rat scaled = q * Rat(den_lcm);
    mpz_class n = scaled.get_num();
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    out.push_back(scaled);
  }
  if (g == 0) return out;
  for (Rat& q : out) q /= Rat(g);
  return out;
}

}  // namespace conecert

#endif  // CONECERT_RATIONAL_HPP
