#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "finv/common.hpp"

namespace finv {

enum class GroupKind { group, semigroup };

// Rank-r free group or free semigroup on generators s_1..s_r.
struct GroupSpec {
  int rank = 1;
  GroupKind kind = GroupKind::group;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

// Throws input_error unless rank >= 1.
void check_group_spec(const GroupSpec& g);

// A reduced word. Letter +i is s_i, letter -i is s_i^{-1} (1-based, i <= rank).
// Total order: shorter words first, then letterwise with s_1 < s_1^{-1} < s_2 < ...
// Instances are always reduced; build them through reduce()/concat()/parse_word().
class Word {
 public:
  Word() = default;

  const std::vector<int>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  friend bool operator==(const Word& a, const Word& b) { return a.letters_ == b.letters_; }
  friend bool operator!=(const Word& a, const Word& b) { return !(a == b); }
  friend bool operator<(const Word& a, const Word& b);
  friend bool operator>(const Word& a, const Word& b) { return b < a; }
  friend bool operator<=(const Word& a, const Word& b) { return !(b < a); }
  friend bool operator>=(const Word& a, const Word& b) { return !(a < b); }

 private:
  friend Word reduce(const std::vector<int>&, const GroupSpec&);
  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}
  std::vector<int> letters_;
};

// Cancels adjacent inverse pairs (group case). Idempotent; rejects negative
// letters in semigroup mode and letters outside 1..rank.
Word reduce(const std::vector<int>& letters, const GroupSpec& g);

Word concat(const Word& a, const Word& b, const GroupSpec& g);

// Group case only (except for the empty word).
Word inverse_word(const Word& w, const GroupSpec& g);

// Ball of the given radius in the word metric, sorted shortest-first.
std::vector<Word> ball(const GroupSpec& g, int radius);

// Closed-form ball cardinality.
unsigned long long ball_size(const GroupSpec& g, int radius);

// { reduce(v * w) : v in S }
std::set<Word> right_translate(const std::set<Word>& S, const Word& w, const GroupSpec& g);

// Prefix-closed connected subtree of the Cayley tree. vertices[0] is the
// empty word; every edge joins a vertex to its length-minus-one prefix, with
// head = tail * s_color the canonical positive orientation.
struct Subtree {
  struct Edge {
    std::size_t tail;
    std::size_t head;
    int color;  // 1-based generator index
  };
  std::vector<Word> vertices;  // sorted
  std::vector<Edge> edges;     // one per non-root vertex, ordered by child
};

// Smallest prefix-closed set containing S and the empty word. S nonempty.
Subtree hull(const GroupSpec& g, const std::set<Word>& S);

// Homomorphic extension of s_i -> images[i-1]; inverse letters map through
// inverse words (group case).
Word apply_endomorphism(const Word& w, const std::vector<Word>& images, const GroupSpec& g);

// Checks that the two generator-image lists compose to the identity, both
// ways, on the ball of the given radius.
bool inverts_on_ball(const GroupSpec& g, const std::vector<Word>& images,
                     const std::vector<Word>& inverse_images, int radius = 3);

// "e", "s1", "s2^-1", or products such as "s1*s2^-1".
Word parse_word(const std::string& text, const GroupSpec& g);
std::string word_str(const Word& w);

}  // namespace finv
