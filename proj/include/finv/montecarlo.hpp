#pragma once

#include <optional>

#include "finv/counting.hpp"
#include "finv/rng.hpp"

namespace finv {

// One sampling experiment. An unset pattern_words means the d* distance on
// pair-statistics weights; otherwise the l1 pattern distance over that word
// set. epsilon is an exact threshold.
struct RunConfig {
  std::uint64_t seed = 0;
  long samples = 1;
  unsigned long n = 1;
  Rat epsilon;
  std::optional<std::vector<Word>> pattern_words;
};

// r independent uniform permutations by unbiased Fisher-Yates shuffles.
HomRep uniform_homomorphism(unsigned long n, int rank, CounterRng& rng);

// j -> sigma(w) j; the rightmost letter acts first, negative letters through
// the inverse permutations.
std::vector<int> word_point_map(const HomRep& sigma, const Word& w);

// l1 distance between the model joint over K and the empirical K-pattern
// distribution of psi under sigma. Exact.
Rat empirical_pattern_distance(const PatternDistribution& target, const HomRep& sigma,
                               const MicroObservable& psi);
Rat empirical_pattern_distance(const System& sys, const HomRep& sigma, const MicroObservable& psi,
                               const std::set<Word>& K, const EnumBudget& budget = {});

struct MeanStdErr {
  double mean = 0.0;
  double stderr_val = 0.0;
};

// Sample mean over cfg.samples random homomorphisms of the number of
// labelings within epsilon of the model statistics.
MeanStdErr empirical_eps_count(const System& sys, const RunConfig& cfg,
                               const EnumBudget& budget = {});

// Empirical rate slices (1/n) log mean along a list of n. level_reference is
// filled when the pattern words form a ball B(e,m). Every value is a finite-K
//, fixed-epsilon slice: an estimate bound, not the entropy itself.
struct HRatePoint {
  unsigned long n = 0;
  double mean = 0.0;
  double stderr_val = 0.0;
  double rate = 0.0;
};
struct HRateCurve {
  std::vector<HRatePoint> points;
  double F_target = 0.0;
  std::optional<double> level_reference;
};
HRateCurve estimate_h_rate(const System& sys, const std::optional<std::vector<Word>>& K,
                           const Rat& eps, const std::vector<unsigned long>& ns,
                           const RunConfig& base, const EnumBudget& budget = {});

// Columns: n, samples, mean, stderr, rate, seed.
std::string h_rate_csv(const HRateCurve& curve, long samples, std::uint64_t seed);

// Mean fraction of points where sigma(g1) and sigma(g2) agree, over random
// sigma. g1 != g2 required.
MeanStdErr freeness_fraction(unsigned long n, const GroupSpec& g, const Word& g1, const Word& g2,
                             const RunConfig& cfg);

}  // namespace finv
