#include "finv/freegrp.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

namespace finv {

namespace {

// Letter sort key: index first, positive sign before negative.
inline std::pair<int, int> letter_key(int l) { return {std::abs(l), l < 0 ? 1 : 0}; }

void check_letter(int l, const GroupSpec& g) {
  if (l == 0 || std::abs(l) > g.rank) {
    throw input_error("letter out of range for rank " + std::to_string(g.rank));
  }
  if (l < 0 && g.kind == GroupKind::semigroup) {
    throw input_error("negative letter in semigroup word");
  }
}

}  // namespace

void check_group_spec(const GroupSpec& g) {
  if (g.rank < 1) throw input_error("group rank must be >= 1");
}

bool operator<(const Word& a, const Word& b) {
  if (a.letters_.size() != b.letters_.size()) return a.letters_.size() < b.letters_.size();
  for (std::size_t i = 0; i < a.letters_.size(); ++i) {
    const auto ka = letter_key(a.letters_[i]);
    const auto kb = letter_key(b.letters_[i]);
    if (ka != kb) return ka < kb;
  }
  return false;
}

Word reduce(const std::vector<int>& letters, const GroupSpec& g) {
  check_group_spec(g);
  std::vector<int> out;
  out.reserve(letters.size());
  for (int l : letters) {
    check_letter(l, g);
    if (g.kind == GroupKind::group && !out.empty() && out.back() == -l) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return Word(std::move(out));
}

Word concat(const Word& a, const Word& b, const GroupSpec& g) {
  std::vector<int> ls = a.letters();
  ls.insert(ls.end(), b.letters().begin(), b.letters().end());
  return reduce(ls, g);
}

Word inverse_word(const Word& w, const GroupSpec& g) {
  if (g.kind == GroupKind::semigroup && !w.empty()) {
    throw input_error("no inverses in a free semigroup");
  }
  std::vector<int> ls(w.letters().rbegin(), w.letters().rend());
  for (int& l : ls) l = -l;
  return reduce(ls, g);
}

std::vector<Word> ball(const GroupSpec& g, int radius) {
  check_group_spec(g);
  if (radius < 0) throw input_error("ball radius must be >= 0");

  std::vector<int> alphabet;  // letters in sort-key order
  for (int i = 1; i <= g.rank; ++i) {
    alphabet.push_back(i);
    if (g.kind == GroupKind::group) alphabet.push_back(-i);
  }

  std::vector<Word> out{Word()};
  std::vector<Word> level{Word()};
  for (int d = 0; d < radius; ++d) {
    std::vector<Word> next;
    for (const Word& w : level) {
      for (int l : alphabet) {
        if (g.kind == GroupKind::group && !w.empty() && w.letters().back() == -l) continue;
        std::vector<int> ls = w.letters();
        ls.push_back(l);
        next.push_back(reduce(ls, g));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return out;  // generated in length-lex order
}

unsigned long long ball_size(const GroupSpec& g, int radius) {
  check_group_spec(g);
  if (radius < 0) throw input_error("ball radius must be >= 0");
  const unsigned long long m = static_cast<unsigned long long>(radius);
  const unsigned long long r = static_cast<unsigned long long>(g.rank);
  if (g.kind == GroupKind::group) {
    if (r == 1) return 2 * m + 1;
    unsigned long long pw = 1;
    for (unsigned long long i = 0; i < m; ++i) pw *= 2 * r - 1;
    return 1 + 2 * r * (pw - 1) / (2 * r - 2);
  }
  if (r == 1) return m + 1;
  unsigned long long pw = 1;
  for (unsigned long long i = 0; i <= m; ++i) pw *= r;
  return (pw - 1) / (r - 1);
}

std::set<Word> right_translate(const std::set<Word>& S, const Word& w, const GroupSpec& g) {
  std::set<Word> out;
  for (const Word& v : S) out.insert(concat(v, w, g));
  return out;
}

Subtree hull(const GroupSpec& g, const std::set<Word>& S) {
  check_group_spec(g);
  if (S.empty()) throw input_error("hull of an empty word set");

  std::set<Word> verts;
  verts.insert(Word());
  for (const Word& w : S) {
    std::vector<int> prefix;
    verts.insert(w);
    for (int l : w.letters()) {
      prefix.push_back(l);
      verts.insert(reduce(prefix, g));
    }
  }

  Subtree tree;
  tree.vertices.assign(verts.begin(), verts.end());
  std::map<Word, std::size_t> index;
  for (std::size_t i = 0; i < tree.vertices.size(); ++i) index[tree.vertices[i]] = i;

  for (std::size_t i = 0; i < tree.vertices.size(); ++i) {
    const Word& v = tree.vertices[i];
    if (v.empty()) continue;
    std::vector<int> ls = v.letters();
    const int last = ls.back();
    ls.pop_back();
    const std::size_t parent = index.at(reduce(ls, g));
    if (last > 0) {
      tree.edges.push_back({parent, i, last});
    } else {
      tree.edges.push_back({i, parent, -last});
    }
  }
  return tree;
}

Word apply_endomorphism(const Word& w, const std::vector<Word>& images, const GroupSpec& g) {
  check_group_spec(g);
  if (static_cast<int>(images.size()) != g.rank) {
    throw input_error("endomorphism needs one image per generator");
  }
  std::vector<int> out;
  for (int l : w.letters()) {
    const Word& img = images[std::abs(l) - 1];
    if (l > 0) {
      out.insert(out.end(), img.letters().begin(), img.letters().end());
    } else {
      const Word inv = inverse_word(img, g);
      out.insert(out.end(), inv.letters().begin(), inv.letters().end());
    }
  }
  return reduce(out, g);
}

bool inverts_on_ball(const GroupSpec& g, const std::vector<Word>& images,
                     const std::vector<Word>& inverse_images, int radius) {
  for (const Word& w : ball(g, radius)) {
    if (apply_endomorphism(apply_endomorphism(w, images, g), inverse_images, g) != w) return false;
    if (apply_endomorphism(apply_endomorphism(w, inverse_images, g), images, g) != w) return false;
  }
  return true;
}

Word parse_word(const std::string& text, const GroupSpec& g) {
  if (text == "e" || text.empty()) return Word();
  std::vector<int> letters;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('*', pos);
    if (end == std::string::npos) end = text.size();
    const std::string tok = text.substr(pos, end - pos);
    pos = end + 1;

    bool inv = false;
    std::string body = tok;
    if (const auto hat = tok.find("^-1"); hat != std::string::npos) {
      if (hat + 3 != tok.size()) throw input_error("bad word token: " + tok);
      inv = true;
      body = tok.substr(0, hat);
    }
    if (body.size() < 2 || body[0] != 's') throw input_error("bad word token: " + tok);
    int idx = 0;
    try {
      idx = std::stoi(body.substr(1));
    } catch (const std::exception&) {
      throw input_error("bad word token: " + tok);
    }
    letters.push_back(inv ? -idx : idx);
  }
  return reduce(letters, g);
}

std::string word_str(const Word& w) {
  if (w.empty()) return "e";
  std::string out;
  for (int l : w.letters()) {
    if (!out.empty()) out += '*';
    out += 's' + std::to_string(std::abs(l));
    if (l < 0) out += "^-1";
  }
  return out;
}

}  // namespace finv
