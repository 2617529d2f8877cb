#include "doctest.h"

#include <algorithm>
#include <set>

#include "finv/freegrp.hpp"
#include "finv/rng.hpp"

using namespace finv;

namespace {

const GroupSpec F2{2, GroupKind::group};
const GroupSpec F1{1, GroupKind::group};
const GroupSpec S2{2, GroupKind::semigroup};

// Independent ball oracle: closure under one-letter right multiplication.
std::set<Word> ball_by_closure(const GroupSpec& g, int radius) {
  std::set<Word> out{Word()};
  for (int step = 0; step < radius; ++step) {
    std::set<Word> next = out;
    for (int c = 1; c <= g.rank; ++c) {
      for (const auto& w : right_translate(out, reduce({c}, g), g)) next.insert(w);
      if (g.kind == GroupKind::group) {
        for (const auto& w : right_translate(out, reduce({-c}, g), g)) next.insert(w);
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<int> random_raw_letters(CounterRng& rng, const GroupSpec& g, int max_len) {
  std::vector<int> ls;
  const int len = static_cast<int>(rng.below(max_len + 1));
  for (int i = 0; i < len; ++i) {
    int idx = 1 + static_cast<int>(rng.below(g.rank));
    if (g.kind == GroupKind::group && rng.below(2) == 1) idx = -idx;
    ls.push_back(idx);
  }
  return ls;
}

}  // namespace

TEST_CASE("reduce examples") {
  CHECK(reduce({}, F2).empty());
  CHECK(reduce({1, -1}, F2).empty());
  CHECK(reduce({1, 2, -2, 1}, F2) == reduce({1, 1}, F2));
  CHECK_THROWS_AS(reduce({-1}, S2), input_error);
  CHECK_THROWS_AS(reduce({3}, F2), input_error);
}

TEST_CASE("reduce is idempotent and length-nonincreasing") {
  CounterRng rng(2024, 0);
  for (int t = 0; t < 500; ++t) {
    const GroupSpec g = (t % 2 == 0) ? F2 : S2;
    const auto raw = random_raw_letters(rng, g, 12);
    const Word w = reduce(raw, g);
    CHECK(w.length() <= raw.size());
    CHECK(reduce(w.letters(), g) == w);
  }
}

TEST_CASE("ball sizes and ordering") {
  CHECK(ball(F2, 0).size() == 1);
  CHECK(ball(F2, 1).size() == 5);
  CHECK(ball(F2, 2).size() == 17);

  for (int rank = 1; rank <= 3; ++rank) {
    for (auto kind : {GroupKind::group, GroupKind::semigroup}) {
      const GroupSpec g{rank, kind};
      for (int m = 0; m <= 6; ++m) {
        if (ball_size(g, m) > 30000) continue;  // r=3, m=6 group ball is 23437
        const auto b = ball(g, m);
        CHECK(b.size() == ball_size(g, m));
        CHECK(std::is_sorted(b.begin(), b.end()));
        CHECK(std::set<Word>(b.begin(), b.end()) == ball_by_closure(g, m));
      }
    }
  }
}

TEST_CASE("balls are nested") {
  for (int m = 0; m < 4; ++m) {
    const auto small = ball(F2, m);
    const auto big = ball(F2, m + 1);
    const std::set<Word> big_set(big.begin(), big.end());
    for (const Word& w : small) CHECK(big_set.count(w) == 1);
  }
}

TEST_CASE("right translate") {
  CHECK(right_translate({Word()}, parse_word("s1", F2), F2) ==
        std::set<Word>{parse_word("s1", F2)});

  const auto b1 = ball(F1, 1);
  const auto t1 = right_translate(std::set<Word>(b1.begin(), b1.end()), parse_word("s1", F1), F1);
  CHECK(t1 == std::set<Word>{Word(), parse_word("s1", F1), parse_word("s1*s1", F1)});

  const auto b2 = ball(F2, 1);
  const auto t2 = right_translate(std::set<Word>(b2.begin(), b2.end()), parse_word("s1", F2), F2);
  CHECK(t2.size() == 5);
  CHECK(t2.count(Word()) == 1);
  CHECK(t2.count(parse_word("s1*s1", F2)) == 1);
}

TEST_CASE("hull examples") {
  const auto single = hull(F2, {Word()});
  CHECK(single.vertices.size() == 1);
  CHECK(single.edges.empty());

  const auto geodesic = hull(F2, {parse_word("s1*s2", F2)});
  CHECK(geodesic.vertices.size() == 3);
  CHECK(geodesic.edges.size() == 2);

  // B(e,1) u B(e,1)s1: the translate contributes e (from s1^-1) and s1 (from
  // e), so the union has 8 words and is already prefix-closed.
  const auto b = ball(F2, 1);
  std::set<Word> S(b.begin(), b.end());
  const auto t = right_translate(S, parse_word("s1", F2), F2);
  S.insert(t.begin(), t.end());
  CHECK(S.size() == 8);
  const auto h = hull(F2, S);
  CHECK(h.vertices.size() == 8);
  CHECK(h.edges.size() == 7);
}

TEST_CASE("hull structure on random sets") {
  CounterRng rng(77, 0);
  for (int t = 0; t < 200; ++t) {
    const GroupSpec g = (t % 2 == 0) ? F2 : S2;
    std::set<Word> S;
    const int count = 1 + static_cast<int>(rng.below(5));
    for (int i = 0; i < count; ++i) S.insert(reduce(random_raw_letters(rng, g, 6), g));
    const auto h = hull(g, S);

    CHECK(h.edges.size() == h.vertices.size() - 1);
    CHECK(h.vertices.front().empty());
    const std::set<Word> verts(h.vertices.begin(), h.vertices.end());
    for (const Word& w : S) CHECK(verts.count(w) == 1);
    for (const Word& w : h.vertices) {
      std::vector<int> prefix;
      for (int l : w.letters()) {
        prefix.push_back(l);
        CHECK(verts.count(reduce(prefix, g)) == 1);
      }
    }
    for (const auto& e : h.edges) {
      CHECK(concat(h.vertices[e.tail], parse_word("s" + std::to_string(e.color), g), g) ==
            h.vertices[e.head]);
    }
  }
}

TEST_CASE("endomorphisms") {
  const std::vector<Word> id{parse_word("s1", F2), parse_word("s2", F2)};
  const std::vector<Word> swap{parse_word("s2", F2), parse_word("s1", F2)};

  for (const Word& w : ball(F2, 3)) CHECK(apply_endomorphism(w, id, F2) == w);
  CHECK(apply_endomorphism(parse_word("s1*s2", F2), swap, F2) == parse_word("s2*s1", F2));

  const std::vector<Word> invert{parse_word("s1^-1", F1)};
  CHECK(apply_endomorphism(parse_word("s1*s1", F1), invert, F1) ==
        parse_word("s1^-1*s1^-1", F1));

  CHECK(inverts_on_ball(F2, swap, swap));
  CHECK(inverts_on_ball(F1, invert, invert));
  const std::vector<Word> bad{parse_word("s1*s2", F2), parse_word("s2", F2)};
  CHECK_FALSE(inverts_on_ball(F2, bad, bad));
}

TEST_CASE("endomorphism composed with its inverse fixes the radius-3 ball") {
  // s1 -> s1*s2, s2 -> s2 inverts via s1 -> s1*s2^-1, s2 -> s2
  const std::vector<Word> images{parse_word("s1*s2", F2), parse_word("s2", F2)};
  const std::vector<Word> inverses{parse_word("s1*s2^-1", F2), parse_word("s2", F2)};
  CHECK(inverts_on_ball(F2, images, inverses));
  for (const Word& w : ball(F2, 3)) {
    CHECK(apply_endomorphism(apply_endomorphism(w, images, F2), inverses, F2) == w);
  }
}

TEST_CASE("word parse and print round trip") {
  for (const std::string s : {"e", "s1", "s2^-1", "s1*s1", "s1*s2^-1*s1"}) {
    CHECK(word_str(parse_word(s, F2)) == s);
  }
  CHECK_THROWS_AS(parse_word("x1", F2), input_error);
  CHECK_THROWS_AS(parse_word("s9", F2), input_error);
}
