#include "finv/rational.hpp"

#include <cmath>

namespace finv {

Rat parse_fraction(const std::string& text) {
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
      return Rat(Int(text));
    }
    const Int num(text.substr(0, slash));
    const Int den(text.substr(slash + 1));
    if (den == 0) throw input_error("zero denominator: " + text);
    Rat q(num, den);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw input_error("not a fraction: " + text);
  }
}

double log_rat(const Rat& q) {
  if (sgn(q) <= 0) throw input_error("log of nonpositive rational");
  signed long en = 0;
  signed long ed = 0;
  const double mn = mpz_get_d_2exp(&en, q.get_num().get_mpz_t());
  const double md = mpz_get_d_2exp(&ed, q.get_den().get_mpz_t());
  return std::log(mn) - std::log(md) + std::log(2.0) * static_cast<double>(en - ed);
}

Int lcm(const Int& a, const Int& b) {
  Int l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

Int factorial(unsigned long n) {
  Int f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

unsigned long rat_to_ulong(const Rat& q) {
  if (q.get_den() != 1 || sgn(q) < 0 || !q.get_num().fits_ulong_p()) {
    throw input_error("expected a small nonnegative integer, got " + rat_str(q));
  }
  return q.get_num().get_ui();
}

std::string rat_str(const Rat& q) { return q.get_str(); }

}  // namespace finv
