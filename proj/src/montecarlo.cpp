#include "finv/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

namespace finv {

namespace {

MeanStdErr summarize(const std::vector<double>& xs) {
  MeanStdErr out;
  const double s = static_cast<double>(xs.size());
  for (double x : xs) out.mean += x;
  out.mean /= s;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stderr_val = std::sqrt(ss / (s * (s - 1.0)));
  }
  return out;
}

std::uint64_t psi_space(int alphabet, unsigned long n, const EnumBudget& budget) {
  std::uint64_t total = 1;
  for (unsigned long i = 0; i < n; ++i) {
    if (total > budget.max_psi / static_cast<std::uint64_t>(alphabet)) {
      throw budget_error("observable scan exceeds the psi budget");
    }
    total *= static_cast<std::uint64_t>(alphabet);
  }
  return total;
}

}  // namespace

HomRep uniform_homomorphism(unsigned long n, int rank, CounterRng& rng) {
  if (n < 1) throw input_error("uniform homomorphism needs n >= 1");
  if (rank < 1) throw input_error("uniform homomorphism needs rank >= 1");
  HomRep sigma;
  sigma.n = n;
  sigma.perms.reserve(rank);
  for (int c = 0; c < rank; ++c) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (unsigned long i = n - 1; i >= 1; --i) {
      const std::uint64_t j = rng.below(i + 1);
      std::swap(p[i], p[j]);
    }
    sigma.perms.push_back(std::move(p));
  }
  return sigma;
}

std::vector<int> word_point_map(const HomRep& sigma, const Word& w) {
  std::vector<int> m(sigma.n);
  std::iota(m.begin(), m.end(), 0);
  const auto& ls = w.letters();
  for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
    const int idx = std::abs(*it);
    if (idx > static_cast<int>(sigma.perms.size())) {
      throw input_error("word uses a generator beyond the homomorphism rank");
    }
    const auto& p = sigma.perms[idx - 1];
    if (*it > 0) {
      for (unsigned long x = 0; x < sigma.n; ++x) m[x] = p[m[x]];
    } else {
      std::vector<int> inv(sigma.n);
      for (unsigned long x = 0; x < sigma.n; ++x) inv[p[x]] = static_cast<int>(x);
      for (unsigned long x = 0; x < sigma.n; ++x) m[x] = inv[m[x]];
    }
  }
  return m;
}

Rat empirical_pattern_distance(const PatternDistribution& target, const HomRep& sigma,
                               const MicroObservable& psi) {
  if (psi.n != sigma.n) throw input_error("observable size does not match the homomorphism");
  std::vector<std::vector<int>> maps;
  maps.reserve(target.support_words.size());
  for (const Word& w : target.support_words) maps.push_back(word_point_map(sigma, w));

  std::map<std::vector<int>, long> counts;
  std::vector<int> key(maps.size());
  for (unsigned long j = 0; j < sigma.n; ++j) {
    for (std::size_t i = 0; i < maps.size(); ++i) key[i] = psi.labels[maps[i][j]];
    ++counts[key];
  }

  Rat d(0);
  auto it = counts.begin();
  auto jt = target.masses.begin();
  while (it != counts.end() || jt != target.masses.end()) {
    if (jt == target.masses.end() || (it != counts.end() && it->first < jt->first)) {
      d += Rat(it->second, sigma.n);
      ++it;
    } else if (it == counts.end() || jt->first < it->first) {
      d += jt->second;
      ++jt;
    } else {
      Rat emp(it->second, sigma.n);
      emp.canonicalize();
      d += abs(jt->second - emp);
      ++it;
      ++jt;
    }
  }
  Rat out = d;
  out.canonicalize();
  return out;
}

Rat empirical_pattern_distance(const System& sys, const HomRep& sigma, const MicroObservable& psi,
                               const std::set<Word>& K, const EnumBudget& budget) {
  return empirical_pattern_distance(joint_distribution(sys, K, budget), sigma, psi);
}

namespace {

// Counts labelings within eps of the target, scanning A^n in odometer order.
long count_close_psi_star(const System& sys, const Weight& mu, const HomRep& sigma,
                          std::uint64_t space, const Rat& eps) {
  const int a = sys.alphabet_size();
  MicroObservable psi{sigma.n, std::vector<int>(sigma.n, 0)};
  long close = 0;
  for (std::uint64_t tick = 0;; ++tick) {
    if (weight_distance(mu, weight_of_pair(sigma, psi, sys.alphabet())) <= eps) ++close;
    if (tick + 1 == space) break;
    for (unsigned long pos = 0;; ++pos) {
      if (++psi.labels[pos] < a) break;
      psi.labels[pos] = 0;
    }
  }
  return close;
}

long count_close_psi_pattern(const PatternDistribution& target, const HomRep& sigma,
                             std::uint64_t space, const Rat& eps, int a) {
  MicroObservable psi{sigma.n, std::vector<int>(sigma.n, 0)};
  long close = 0;
  for (std::uint64_t tick = 0;; ++tick) {
    if (empirical_pattern_distance(target, sigma, psi) <= eps) ++close;
    if (tick + 1 == space) break;
    for (unsigned long pos = 0;; ++pos) {
      if (++psi.labels[pos] < a) break;
      psi.labels[pos] = 0;
    }
  }
  return close;
}

}  // namespace

MeanStdErr empirical_eps_count(const System& sys, const RunConfig& cfg, const EnumBudget& budget) {
  if (cfg.samples < 1) throw input_error("need at least one sample");
  if (sgn(cfg.epsilon) < 0) throw input_error("negative epsilon");
  const std::uint64_t space = psi_space(sys.alphabet_size(), cfg.n, budget);

  std::optional<Weight> mu;
  std::optional<PatternDistribution> target;
  if (cfg.pattern_words) {
    const std::set<Word> K(cfg.pattern_words->begin(), cfg.pattern_words->end());
    if (K.empty()) throw input_error("pattern word set must be nonempty");
    target = joint_distribution(sys, K, budget);
  } else {
    mu = weight_from_system(sys);
  }

  std::vector<double> counts;
  counts.reserve(cfg.samples);
  for (long s = 0; s < cfg.samples; ++s) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(s));
    const HomRep sigma = uniform_homomorphism(cfg.n, sys.group().rank, rng);
    const long close = mu ? count_close_psi_star(sys, *mu, sigma, space, cfg.epsilon)
                          : count_close_psi_pattern(*target, sigma, space, cfg.epsilon,
                                                    sys.alphabet_size());
    counts.push_back(static_cast<double>(close));
  }
  return summarize(counts);
}

HRateCurve estimate_h_rate(const System& sys, const std::optional<std::vector<Word>>& K,
                           const Rat& eps, const std::vector<unsigned long>& ns,
                           const RunConfig& base, const EnumBudget& budget) {
  HRateCurve curve;
  curve.F_target = F_of_weight(weight_from_system(sys));
  if (K) {
    std::set<Word> kset(K->begin(), K->end());
    for (int m = 0; m <= 6; ++m) {
      const auto b = ball(sys.group(), m);
      if (std::set<Word>(b.begin(), b.end()) == kset) {
        curve.level_reference = F_level(sys, m, budget);
        break;
      }
      if (b.size() > kset.size()) break;
    }
  }
  for (unsigned long n : ns) {
    RunConfig cfg = base;
    cfg.n = n;
    cfg.epsilon = eps;
    cfg.pattern_words = K;
    const MeanStdErr stat = empirical_eps_count(sys, cfg, budget);
    HRatePoint p;
    p.n = n;
    p.mean = stat.mean;
    p.stderr_val = stat.stderr_val;
    p.rate = stat.mean > 0.0 ? std::log(stat.mean) / static_cast<double>(n)
                             : -std::numeric_limits<double>::infinity();
    curve.points.push_back(p);
  }
  return curve;
}

namespace {

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace

std::string h_rate_csv(const HRateCurve& curve, long samples, std::uint64_t seed) {
  std::string out = "n,samples,mean,stderr,rate,seed\n";
  for (const auto& p : curve.points) {
    out += std::to_string(p.n) + ',' + std::to_string(samples) + ',' + fmt_double(p.mean) + ',' +
           fmt_double(p.stderr_val) + ',' + fmt_double(p.rate) + ',' + std::to_string(seed) + '\n';
  }
  return out;
}

MeanStdErr freeness_fraction(unsigned long n, const GroupSpec& g, const Word& g1, const Word& g2,
                             const RunConfig& cfg) {
  check_group_spec(g);
  if (g1 == g2) throw input_error("freeness fraction needs two distinct words");
  if (cfg.samples < 1) throw input_error("need at least one sample");
  std::vector<double> fractions;
  fractions.reserve(cfg.samples);
  for (long s = 0; s < cfg.samples; ++s) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(s));
    const HomRep sigma = uniform_homomorphism(n, g.rank, rng);
    const auto m1 = word_point_map(sigma, g1);
    const auto m2 = word_point_map(sigma, g2);
    long agree = 0;
    for (unsigned long j = 0; j < n; ++j) {
      if (m1[j] == m2[j]) ++agree;
    }
    fractions.push_back(static_cast<double>(agree) / static_cast<double>(n));
  }
  return summarize(fractions);
}

}  // namespace finv
