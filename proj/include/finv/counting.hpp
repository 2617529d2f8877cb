#pragma once

#include <functional>
#include <string>
#include <vector>

#include "finv/systems.hpp"

namespace finv {

// A homomorphism into Sym(n), stored as its generator images with 0-based
// one-line image arrays.
struct HomRep {
  unsigned long n = 1;
  std::vector<std::vector<int>> perms;  // one per generator
};

void check_hom_rep(const HomRep& sigma);

// A labeling of {1..n} by 0-based symbol indices.
struct MicroObservable {
  unsigned long n = 1;
  std::vector<int> labels;
};

// Empirical pair statistics of (sigma, psi): vertex masses count label
// frequencies, color-i edges count (psi(j), psi(sigma(s_i) j)) pairs, all
// divided by n. Always a valid weight whose q divides n.
Weight weight_of_pair(const HomRep& sigma, const MicroObservable& psi,
                      const std::vector<std::string>& alphabet);

// Expected number of labelings psi whose empirical weight equals w, over a
// uniformly random homomorphism into Sym(n):
//   n!^(1-r) * prod_a (n w(a))!^(2r-1) / prod_{i,a,b} (n w(a,b;i))!
// Requires q_of_weight(w) | n.
Rat expected_count_exact(const Weight& w, unsigned long n);

// log of the same quantity through lgamma, for n beyond exact reach.
double expected_count_log(const Weight& w, unsigned long n);

// Full enumeration of Sym(n)^r x A^n; exact and implementation-independent
// of the formula above. Returns 0 when q does not divide n.
Rat brute_force_expected_count(const Weight& w, unsigned long n, const EnumBudget& budget = {});

// Every valid weight with all edge masses in {0, 1/n, ..., 1} and
// d_*(nearby, .) <= eps, each exactly once, in deterministic order.
// Backtracking over edge tables with marginal and distance pruning.
void lattice_weights(const Weight& nearby, unsigned long n, const Rat& eps,
                     const std::function<void(const Weight&)>& yield,
                     const EnumBudget& budget = {});
std::vector<Weight> lattice_weights_vec(const Weight& nearby, unsigned long n, const Rat& eps,
                                        const EnumBudget& budget = {});

// E[#{psi : d*_sigma <= eps}] for uniformly random sigma: the exact sum of
// expected_count_exact over the lattice weights within eps of the target.
Rat expected_eps_count_exact(const Weight& target, unsigned long n, const Rat& eps,
                             const EnumBudget& budget = {});

// (1/n) log E[#{psi : d* <= eps}] along a list of n, with the weight
// functional of the system's pair statistics as the reference value.
struct RatePoint {
  unsigned long n = 0;
  double log_count = 0.0;  // -inf when the eps-ball holds no lattice weight
  double rate = 0.0;
};
struct RateCurve {
  std::vector<RatePoint> points;
  double F_target = 0.0;
  Rat epsilon;
};
RateCurve rate_curve(const System& sys, const Rat& eps, const std::vector<unsigned long>& ns,
                     const EnumBudget& budget = {});

// Columns: n, log_count, rate, F_target, epsilon_num, epsilon_den.
std::string rate_curve_csv(const RateCurve& curve);

// Rigorous two-sided bracket of log expected_count via per-factorial
// Stirling corrections around the F(w)*n main term. Requires q | n.
std::pair<double, double> stirling_sandwich(const Weight& w, unsigned long n);

}  // namespace finv
