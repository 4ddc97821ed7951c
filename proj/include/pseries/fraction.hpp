#pragma once

// Exact rationals for growth rates, dimensions and spectra.

#include <gmpxx.h>

#include <string>
#include <vector>

#include "pseries/error.hpp"

namespace pseries {

using Fraction = mpq_class;

inline Fraction make_fraction(long num, long den) {
  if (den == 0) throw InvalidInput("zero denominator");
  Fraction q(num, den);
  q.canonicalize();
  return q;
}

/// "n/m" in lowest terms, or "n" for integers.
inline std::string format_fraction(const Fraction& q) { return q.get_str(); }

inline Fraction parse_fraction(const std::string& text) {
  Fraction q;
  if (text.empty() || q.set_str(text, 10) != 0 || sgn(q.get_den()) == 0)
    throw InvalidInput("not a fraction: '" + text + "'");
  q.canonicalize();
  return q;
}

/// floor(i * q)
inline long floor_times(long i, const Fraction& q) {
  mpz_class num = q.get_num() * i, out;
  mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), q.get_den().get_mpz_t());
  return out.get_si();
}

inline Fraction sum_of(const std::vector<Fraction>& xs) {
  Fraction s = 0;
  for (const auto& x : xs) s += x;
  return s;
}

inline double to_double(const Fraction& q) { return q.get_d(); }

}  // namespace pseries
