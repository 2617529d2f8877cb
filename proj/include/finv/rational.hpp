#pragma once

#include <gmpxx.h>

#include <string>

#include "finv/common.hpp"

namespace finv {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
  if (den == 0) throw input_error("fraction with zero denominator");
  Rat q(num, den);
  q.canonicalize();
  return q;
}

// Accepts "p" or "p/q" with optional sign; exact, no decimals.
Rat parse_fraction(const std::string& text);

inline double to_double(const Rat& q) { return q.get_d(); }

// log of a positive rational, robust far outside double range.
double log_rat(const Rat& q);

Int lcm(const Int& a, const Int& b);
Int factorial(unsigned long n);

// q must be an integer (denominator 1).
unsigned long rat_to_ulong(const Rat& q);

std::string rat_str(const Rat& q);

}  // namespace finv
