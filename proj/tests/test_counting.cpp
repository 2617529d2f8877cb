#include "doctest.h"

#include <cmath>
#include <set>

#include "finv/counting.hpp"
#include "oracles.hpp"

using namespace finv;
using finv::testing::brute_force_eps_count;
using finv::testing::letters_alphabet;
using finv::testing::unpruned_lattice_scan;
using finv::testing::weight_fingerprint;

namespace {

Weight swap_pair_weight() {
  // vertex (1/2,1/2); color 1 carries all mass on (a,b) and (b,a)
  return weight_from_edges(letters_alphabet(2), 1,
                           {Rat(0), make_rat(1, 2), make_rat(1, 2), Rat(0)});
}

}  // namespace

TEST_CASE("weight of a pair") {
  HomRep swap{2, {{1, 0}}};
  HomRep ident{2, {{0, 1}}};
  MicroObservable ab{2, {0, 1}};
  MicroObservable constant{2, {0, 0}};

  const Weight w_swap = weight_of_pair(swap, ab, letters_alphabet(2));
  CHECK(w_swap.edge(1, 0, 1) == make_rat(1, 2));
  CHECK(w_swap.edge(1, 1, 0) == make_rat(1, 2));
  CHECK(w_swap.edge(1, 0, 0) == 0);

  const Weight w_id = weight_of_pair(ident, ab, letters_alphabet(2));
  CHECK(w_id.edge(1, 0, 0) == make_rat(1, 2));
  CHECK(w_id.edge(1, 1, 1) == make_rat(1, 2));

  const Weight w_const = weight_of_pair(swap, constant, letters_alphabet(2));
  CHECK(w_const.vertex[0] == 1);
  CHECK(w_const.edge(1, 0, 0) == 1);

  // always a valid weight with q | n
  CHECK(validate(w_swap).empty());
  CHECK(mpz_divisible_p(Int(2).get_mpz_t(), q_of_weight(w_swap).get_mpz_t()));
}

TEST_CASE("expected count formula examples") {
  for (int r : {1, 2, 3}) {
    CHECK(expected_count_exact(uniform_weight(letters_alphabet(1), r), 5) == 1);
  }
  CHECK(expected_count_exact(swap_pair_weight(), 2) == 1);
  CHECK(expected_count_exact(uniform_weight(letters_alphabet(2), 2), 4) == make_rat(8, 3));
  CHECK_THROWS_AS(expected_count_exact(uniform_weight(letters_alphabet(2), 1), 3), input_error);
}

TEST_CASE("formula equals brute force on small lattices") {
  // acceptance covers the full ranges; keep a fast slice here
  const Weight uni1 = uniform_weight(letters_alphabet(2), 1);
  for (unsigned long n : {1ul, 2ul, 3ul, 4ul}) {
    for (const Weight& w : lattice_weights_vec(uni1, n, Rat(2))) {
      CHECK(expected_count_exact(w, n) == brute_force_expected_count(w, n));
    }
  }
  const Weight uni2 = uniform_weight(letters_alphabet(2), 2);
  for (const Weight& w : lattice_weights_vec(uni2, 2, Rat(4))) {
    CHECK(expected_count_exact(w, 2) == brute_force_expected_count(w, 2));
  }
}

TEST_CASE("brute force off-lattice and budget") {
  CHECK(brute_force_expected_count(uniform_weight(letters_alphabet(2), 1), 3) == 0);
  EnumBudget tiny;
  tiny.max_brute_pairs = 10;
  CHECK_THROWS_AS(brute_force_expected_count(uniform_weight(letters_alphabet(2), 1), 4, tiny),
                  budget_error);
}

TEST_CASE("brute-force counts are conjugation invariant") {
  // relabeling the points by tau turns sigma into tau sigma tau^-1 and
  // leaves the per-homomorphism count unchanged
  const Weight target = swap_pair_weight();
  const unsigned long n = 3;
  const std::vector<int> tau{2, 0, 1};
  std::vector<int> tau_inv(n);
  for (unsigned long i = 0; i < n; ++i) tau_inv[tau[i]] = static_cast<int>(i);

  std::vector<int> p{0, 1, 2};
  do {
    const HomRep sigma{n, {p}};
    std::vector<int> conj(n);
    for (unsigned long j = 0; j < n; ++j) conj[tau[j]] = tau[p[j]];
    const HomRep sigma_conj{n, {conj}};

    long count = 0, count_conj = 0;
    MicroObservable psi{n, {0, 0, 0}};
    for (;;) {
      if (weight_distance(target, weight_of_pair(sigma, psi, target.alphabet)) == 0) ++count;
      if (weight_distance(target, weight_of_pair(sigma_conj, psi, target.alphabet)) == 0) {
        ++count_conj;
      }
      unsigned long pos = 0;
      while (pos < n && ++psi.labels[pos] == 2) psi.labels[pos++] = 0;
      if (pos == n) break;
    }
    CHECK(count == count_conj);
  } while (std::next_permutation(p.begin(), p.end()));
}

TEST_CASE("log path agrees with the exact path") {
  CHECK(std::abs(expected_count_log(uniform_weight(letters_alphabet(1), 2), 12)) < 1e-9);
  CounterRng rng(6021, 0);
  for (int t = 0; t < 40; ++t) {
    const int a = 1 + static_cast<int>(rng.below(3));
    const int r = 1 + static_cast<int>(rng.below(3));
    const Weight w = finv::testing::random_lattice_weight(rng, a, r, 12);
    const unsigned long q = rat_to_ulong(Rat(q_of_weight(w)));
    const unsigned long n = q * (1 + rng.below(60 / q + 1));
    if (n > 60) continue;
    const Rat exact = expected_count_exact(w, n);
    const double lg = expected_count_log(w, n);
    const double reference = log_rat(exact);
    const double scale = std::max(1.0, std::abs(reference));
    CHECK(std::abs(lg - reference) <= 1e-9 * scale);
  }
}

TEST_CASE("lattice enumeration at epsilon zero") {
  const Weight uni = uniform_weight(letters_alphabet(2), 2);
  const auto hits = lattice_weights_vec(uni, 4, Rat(0));
  REQUIRE(hits.size() == 1);
  CHECK(weight_distance(hits[0], uni) == 0);
  CHECK(lattice_weights_vec(uni, 3, Rat(0)).empty());  // q = 4 does not divide 3
}

TEST_CASE("lattice enumeration matches the unpruned scan") {
  const Weight uni1 = uniform_weight(letters_alphabet(2), 1);
  const Weight uni2 = uniform_weight(letters_alphabet(2), 2);
  const Weight skew = swap_pair_weight();
  struct Case {
    const Weight* target;
    unsigned long n;
    Rat eps;
  };
  const Case cases[] = {
      {&uni1, 2, Rat(2)},          {&uni1, 3, make_rat(1, 2)}, {&uni1, 4, make_rat(3, 4)},
      {&uni2, 2, Rat(4)},          {&uni2, 3, make_rat(2, 3)}, {&skew, 2, Rat(1)},
      {&skew, 3, make_rat(1, 3)},
  };
  for (const auto& c : cases) {
    const auto pruned = lattice_weights_vec(*c.target, c.n, c.eps);
    const auto oracle = unpruned_lattice_scan(*c.target, c.n, c.eps);
    std::set<std::string> lhs, rhs;
    for (const auto& w : pruned) {
      CHECK(validate(w).empty());
      lhs.insert(weight_fingerprint(w));
    }
    for (const auto& w : oracle) rhs.insert(weight_fingerprint(w));
    CHECK(lhs.size() == pruned.size());  // emitted once each
    CHECK(lhs == rhs);
  }
}

TEST_CASE("epsilon-ball expected counts") {
  // total-mass identity: every labeling realizes exactly one weight
  const Weight uni1 = uniform_weight(letters_alphabet(2), 1);
  for (unsigned long n : {1ul, 2ul, 3ul, 4ul, 5ul}) {
    Rat expected(Int(1) << n);
    CHECK(expected_eps_count_exact(uni1, n, Rat(2)) == expected);
  }
  const Weight uni2 = uniform_weight(letters_alphabet(2), 2);
  CHECK(expected_eps_count_exact(uni2, 3, Rat(4)) == Rat(8));

  // at epsilon zero the ball is the single exact weight
  CHECK(expected_eps_count_exact(uni2, 4, Rat(0)) == expected_count_exact(uni2, 4));

  // brute-force oracle over Sym(3) x A^3
  const Rat eps = make_rat(1, 2);
  CHECK(expected_eps_count_exact(uni1, 3, eps) == brute_force_eps_count(uni1, 3, eps));
}

TEST_CASE("stirling sandwich") {
  // |A| = 1: brackets zero
  const auto trivial = stirling_sandwich(uniform_weight(letters_alphabet(1), 2), 10);
  CHECK(trivial.first <= 0.0);
  CHECK(trivial.second >= 0.0);

  // brackets the exact value on a small grid
  const Weight uni2 = uniform_weight(letters_alphabet(2), 2);
  for (unsigned long n : {4ul, 8ul, 16ul, 32ul, 60ul}) {
    const double exact_log = log_rat(expected_count_exact(uni2, n));
    const auto [lo, hi] = stirling_sandwich(uni2, n);
    CHECK(lo <= exact_log);
    CHECK(exact_log <= hi);
    // spec-level width bound
    const double coeff = 1.0 + 2.0 * (2 * 2 - 1) + 2.0 * 4.0;
    CHECK(hi - lo <= coeff * (1.0 + std::log(static_cast<double>(n + 1))));
  }

  // the relative width decays to zero along n = q 2^k
  std::vector<double> rels;
  for (unsigned long n : {8ul, 16ul, 32ul, 64ul, 128ul, 256ul}) {
    const auto [lo, hi] = stirling_sandwich(uni2, n);
    rels.push_back((hi - lo) / static_cast<double>(n));
  }
  for (std::size_t i = 1; i < rels.size(); ++i) CHECK(rels[i] < rels[i - 1]);
  CHECK(rels.back() < rels.front() / 8.0);

  const auto big = stirling_sandwich(uni2, 4000);
  CHECK((big.second - big.first) / 4000.0 <= 0.05);
  const double big_log = expected_count_log(uni2, 4000);
  CHECK(big.first <= big_log);
  CHECK(big_log <= big.second);

  CHECK_THROWS_AS(stirling_sandwich(uni2, 5), input_error);
}

TEST_CASE("rate curve") {
  const GroupSpec f1{1, GroupKind::group};
  const System one = System::bernoulli(f1, letters_alphabet(1), {Rat(1)});
  const auto flat = rate_curve(one, make_rat(1, 10), {2, 4, 6});
  CHECK(flat.F_target == doctest::Approx(0.0));
  for (const auto& p : flat.points) CHECK(p.rate == doctest::Approx(0.0));

  const System bhalf =
      System::bernoulli(f1, letters_alphabet(2), {make_rat(1, 2), make_rat(1, 2)});
  const auto curve = rate_curve(bhalf, Rat(2), {4, 8, 12});
  CHECK(curve.F_target == doctest::Approx(std::log(2)).epsilon(1e-12));
  for (const auto& p : curve.points) {
    CHECK(p.rate == doctest::Approx(std::log(2)).epsilon(1e-12));
  }

  const std::string csv = rate_curve_csv(curve);
  CHECK(csv.rfind("n,log_count,rate,F_target,epsilon_num,epsilon_den\n", 0) == 0);
  CHECK(csv.find("\n4,") != std::string::npos);
}

TEST_CASE("lattice budget error") {
  EnumBudget tiny;
  tiny.max_lattice_nodes = 5;
  CHECK_THROWS_AS(lattice_weights_vec(uniform_weight(letters_alphabet(2), 2), 6, Rat(4), tiny),
                  budget_error);
}
