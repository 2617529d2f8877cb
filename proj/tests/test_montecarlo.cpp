#include "doctest.h"

#include <cmath>
#include <map>

#include "finv/montecarlo.hpp"
#include "oracles.hpp"

using namespace finv;
using finv::testing::letters_alphabet;

namespace {

const GroupSpec F1{1, GroupKind::group};
const GroupSpec F2{2, GroupKind::group};

System bernoulli_sys(const GroupSpec& g, const Rat& p) {
  return System::bernoulli(g, letters_alphabet(2), {p, Rat(1) - p});
}

Weight circulant_weight() {
  auto circulant = [](const Rat& c0, const Rat& c1, const Rat& c2) {
    std::vector<Rat> t(9);
    const Rat cs[3] = {c0, c1, c2};
    for (int x = 0; x < 3; ++x) {
      for (int y = 0; y < 3; ++y) t[x * 3 + y] = cs[(y - x + 3) % 3];
    }
    return t;
  };
  std::vector<Rat> edges = circulant(make_rat(1, 6), make_rat(1, 9), make_rat(1, 18));
  const auto second = circulant(make_rat(1, 12), make_rat(1, 6), make_rat(1, 12));
  edges.insert(edges.end(), second.begin(), second.end());
  return weight_from_edges(letters_alphabet(3), 2, edges);
}

}  // namespace

TEST_CASE("uniform homomorphisms") {
  CounterRng rng(1, 0);
  const HomRep tiny = uniform_homomorphism(1, 3, rng);
  for (const auto& p : tiny.perms) CHECK(p == std::vector<int>{0});

  // determinism: the same (seed, stream) reproduces the same draw
  CounterRng a(42, 7), b(42, 7);
  const HomRep ha = uniform_homomorphism(6, 2, a);
  const HomRep hb = uniform_homomorphism(6, 2, b);
  CHECK(ha.perms == hb.perms);

  // n = 3: each of the 6 permutations appears with frequency 1/6 +- 3 SE
  std::map<std::vector<int>, long> freq;
  const long draws = 60000;
  for (long s = 0; s < draws; ++s) {
    CounterRng r(9000, static_cast<std::uint64_t>(s));
    freq[uniform_homomorphism(3, 1, r).perms[0]] += 1;
  }
  CHECK(freq.size() == 6);
  const double p = 1.0 / 6.0;
  const double se = std::sqrt(p * (1 - p) / draws);
  for (const auto& [perm, count] : freq) {
    CHECK(std::abs(static_cast<double>(count) / draws - p) <= 3 * se);
  }
}

TEST_CASE("word point maps compose like the homomorphism") {
  CounterRng rng(5, 0);
  const HomRep sigma = uniform_homomorphism(7, 2, rng);
  const Word w = parse_word("s1*s2^-1*s1", F2);
  const auto direct = word_point_map(sigma, w);
  // compose by hand: apply s1, then s2^-1, then s1 (rightmost first)
  const auto m1 = word_point_map(sigma, parse_word("s1", F2));
  const auto m2i = word_point_map(sigma, parse_word("s2^-1", F2));
  for (unsigned long j = 0; j < 7; ++j) {
    CHECK(direct[j] == m1[m2i[m1[j]]]);
  }
  const auto id = word_point_map(sigma, Word());
  for (unsigned long j = 0; j < 7; ++j) CHECK(id[j] == static_cast<int>(j));
}

TEST_CASE("pattern distance examples") {
  const System sys = bernoulli_sys(F1, make_rat(1, 2));
  CounterRng rng(12, 0);
  const HomRep sigma = uniform_homomorphism(4, 1, rng);
  // psi with the exact marginal type
  const MicroObservable balanced{4, {0, 1, 0, 1}};
  CHECK(empirical_pattern_distance(sys, sigma, balanced, {Word()}) == 0);

  const System single = System::bernoulli(F1, letters_alphabet(1), {Rat(1)});
  const MicroObservable constant{4, {0, 0, 0, 0}};
  CHECK(empirical_pattern_distance(single, sigma, constant, {Word()}) == 0);
}

TEST_CASE("pattern distance dominates the weight distance") {
  // r * d over {e, s_1, ..., s_r} bounds d* from above, exactly
  const System markov = System::markov(F2, circulant_weight());
  const System bern = bernoulli_sys(F2, make_rat(1, 4));
  std::set<Word> K{Word(), parse_word("s1", F2), parse_word("s2", F2)};

  for (const System* sys : {&markov, &bern}) {
    const Weight mu = weight_from_system(*sys);
    const auto target = joint_distribution(*sys, K);
    const int a = sys->alphabet_size();
    for (int t = 0; t < 1000; ++t) {
      CounterRng rng(777, static_cast<std::uint64_t>(t));
      const unsigned long n = 2 + rng.below(5);
      const HomRep sigma = uniform_homomorphism(n, 2, rng);
      MicroObservable psi{n, {}};
      psi.labels.resize(n);
      for (unsigned long j = 0; j < n; ++j) psi.labels[j] = static_cast<int>(rng.below(a));

      const Rat lhs = Rat(2) * empirical_pattern_distance(target, sigma, psi);
      const Rat rhs = weight_distance(mu, weight_of_pair(sigma, psi, sys->alphabet()));
      CHECK(lhs >= rhs);
    }
  }
}

TEST_CASE("empirical counts, exact corners") {
  const System sys = bernoulli_sys(F1, make_rat(1, 2));
  // epsilon >= 2r counts every labeling, every time
  RunConfig all;
  all.seed = 3;
  all.samples = 20;
  all.n = 5;
  all.epsilon = Rat(2);
  const auto full = empirical_eps_count(sys, all);
  CHECK(full.mean == doctest::Approx(32.0));
  CHECK(full.stderr_val == doctest::Approx(0.0));

  // K = {e}, eps = 0, uniform marginal: the count is the central binomial
  RunConfig type_cfg;
  type_cfg.seed = 4;
  type_cfg.samples = 20;
  type_cfg.n = 4;
  type_cfg.epsilon = Rat(0);
  type_cfg.pattern_words = std::vector<Word>{Word()};
  const auto types = empirical_eps_count(sys, type_cfg);
  CHECK(types.mean == doctest::Approx(6.0));  // C(4,2)
  CHECK(types.stderr_val == doctest::Approx(0.0));
}

TEST_CASE("empirical counts track the exact expectation") {
  const System sys = bernoulli_sys(F2, make_rat(1, 2));
  const Weight mu = weight_from_system(sys);
  for (unsigned long n : {2ul, 3ul, 4ul}) {
    const Rat eps = make_rat(1, 2);
    const double exact = to_double(expected_eps_count_exact(mu, n, eps));
    RunConfig cfg;
    cfg.seed = 100 + n;
    cfg.samples = 400;
    cfg.n = n;
    cfg.epsilon = eps;
    const auto stat = empirical_eps_count(sys, cfg);
    const double slack = 3.0 * std::max(stat.stderr_val, 1e-12);
    CHECK(std::abs(stat.mean - exact) <= slack);
  }
}

TEST_CASE("reproducibility of a full run") {
  const System sys = System::markov(F2, circulant_weight());
  RunConfig cfg;
  cfg.seed = 77;
  cfg.samples = 30;
  cfg.n = 3;
  cfg.epsilon = make_rat(1, 3);
  const auto a = empirical_eps_count(sys, cfg);
  const auto b = empirical_eps_count(sys, cfg);
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_val == b.stderr_val);
}

TEST_CASE("h-rate slices") {
  // |A| = 1: rate identically zero
  const System one = System::bernoulli(F1, letters_alphabet(1), {Rat(1)});
  RunConfig base;
  base.seed = 5;
  base.samples = 10;
  const auto flat = estimate_h_rate(one, std::vector<Word>{Word()}, make_rat(1, 10), {2, 4}, base);
  for (const auto& p : flat.points) CHECK(p.rate == doctest::Approx(0.0));

  // enlarging K can only shrink the per-draw counts on shared seeds
  const System sys = bernoulli_sys(F2, make_rat(1, 2));
  const auto b1 = ball(F2, 1);
  RunConfig shared;
  shared.seed = 2718;
  shared.samples = 50;
  const std::vector<unsigned long> ns{3, 4};
  const auto small = estimate_h_rate(sys, std::vector<Word>{Word()}, make_rat(1, 4), ns, shared);
  const auto large = estimate_h_rate(sys, std::vector<Word>(b1.begin(), b1.end()), make_rat(1, 4),
                                     ns, shared);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    CHECK(large.points[i].mean <= small.points[i].mean);
  }
  CHECK(large.level_reference.has_value());
  CHECK(*large.level_reference == doctest::Approx(std::log(2)).epsilon(1e-9));
  CHECK(small.level_reference.has_value());  // {e} is the radius-0 ball

  const std::string csv = h_rate_csv(large, shared.samples, shared.seed);
  CHECK(csv.rfind("n,samples,mean,stderr,rate,seed\n", 0) == 0);
}

TEST_CASE("freeness fractions") {
  RunConfig cfg;
  cfg.seed = 31;
  cfg.samples = 2000;

  // Sym(1) is trivial
  const auto trivial = freeness_fraction(1, F1, Word(), parse_word("s1", F1), cfg);
  CHECK(trivial.mean == doctest::Approx(1.0));

  // a uniform permutation has one fixed point in expectation
  for (unsigned long n : {10ul, 100ul}) {
    const auto stat = freeness_fraction(n, F2, Word(), parse_word("s1", F2), cfg);
    CHECK(std::abs(stat.mean * n - 1.0) <= 3.0 * stat.stderr_val * n);
  }

  // sigma(s2)^-1 sigma(s1) is again uniform
  const auto cross = freeness_fraction(50, F2, parse_word("s1", F2), parse_word("s2", F2), cfg);
  CHECK(std::abs(cross.mean * 50 - 1.0) <= 3.0 * cross.stderr_val * 50);

  CHECK_THROWS_AS(freeness_fraction(5, F2, Word(), Word(), cfg), input_error);
}
