#include "finv/systems.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace finv {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// base^count when it stays within cap.
std::optional<std::uint64_t> pow_capped(std::uint64_t base, std::size_t count, std::uint64_t cap) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < count; ++i) {
    if (base != 0 && v > cap / base) return std::nullopt;
    v *= base;
  }
  return v;
}

struct HullFrame {  // per non-root hull vertex
  std::size_t parent = 0;
  int color = 0;
  bool forward = true;  // edge parent -> vertex when true
};

std::vector<HullFrame> hull_frames(const Subtree& tree) {
  std::vector<HullFrame> frames(tree.vertices.size());
  for (const auto& e : tree.edges) {
    const bool head_is_child = tree.vertices[e.head].length() > tree.vertices[e.tail].length();
    const std::size_t child = head_is_child ? e.head : e.tail;
    const std::size_t parent = head_is_child ? e.tail : e.head;
    frames[child] = {parent, e.color, head_is_child};
  }
  return frames;
}

// Enumerates hull labelings with their chain masses. Vertices are sorted, so
// every parent precedes its children.
template <class Sink>
void markov_enumerate(const Weight& w, const Subtree& tree, Sink&& sink) {
  const auto frames = hull_frames(tree);
  const int a = w.size();
  std::vector<int> labels(tree.vertices.size(), 0);
  std::vector<Rat> partial(tree.vertices.size() + 1);
  partial[0] = Rat(1);

  const std::function<void(std::size_t)> walk = [&](std::size_t idx) {
    if (idx == tree.vertices.size()) {
      sink(labels, partial[idx]);
      return;
    }
    for (int l = 0; l < a; ++l) {
      Rat factor;
      if (idx == 0) {
        factor = w.vertex[l];
      } else {
        const auto& f = frames[idx];
        const int lp = labels[f.parent];
        factor = f.forward ? w.edge(f.color, lp, l) : w.edge(f.color, l, lp);
        if (sgn(factor) != 0) factor /= w.vertex[lp];
      }
      if (sgn(factor) == 0) continue;
      labels[idx] = l;
      partial[idx + 1] = partial[idx] * factor;
      walk(idx + 1);
    }
  };
  walk(0);
}

std::vector<std::size_t> support_positions(const std::vector<Word>& inside,
                                           const std::vector<Word>& outside) {
  // both sorted, inside subset of outside
  std::vector<std::size_t> pos;
  pos.reserve(inside.size());
  std::size_t j = 0;
  for (const Word& w : inside) {
    while (j < outside.size() && outside[j] < w) ++j;
    if (j == outside.size() || outside[j] != w) throw std::logic_error("subset positions");
    pos.push_back(j);
  }
  return pos;
}

std::vector<int> invert_perm(const std::vector<int>& p) {
  std::vector<int> inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<int>(i);
  return inv;
}

// j -> (action of w) j for the permutation action; rightmost letter acts first.
std::vector<int> action_point_map(const std::vector<std::vector<int>>& perms,
                                  const std::vector<std::vector<int>>& inv_perms, const Word& w,
                                  std::size_t points) {
  std::vector<int> m(points);
  std::iota(m.begin(), m.end(), 0);
  const auto& ls = w.letters();
  for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
    const auto& p = *it > 0 ? perms[*it - 1] : inv_perms[-*it - 1];
    for (std::size_t x = 0; x < points; ++x) m[x] = p[m[x]];
  }
  return m;
}

}  // namespace

System System::bernoulli(GroupSpec g, std::vector<std::string> alphabet, std::vector<Rat> kappa) {
  check_group_spec(g);
  if (alphabet.empty()) throw input_error("bernoulli system needs a nonempty alphabet");
  if (kappa.size() != alphabet.size()) throw input_error("kappa size must match the alphabet");
  Rat total(0);
  for (const Rat& p : kappa) {
    if (sgn(p) < 0 || p > 1) throw input_error("kappa entries must lie in [0,1]");
    total += p;
  }
  if (total != 1) throw input_error("kappa must sum to 1");
  System s;
  s.kind_ = SystemKind::bernoulli;
  s.group_ = g;
  s.alphabet_ = std::move(alphabet);
  s.kappa_ = std::move(kappa);
  return s;
}

System System::markov(GroupSpec g, Weight w) {
  check_group_spec(g);
  if (w.rank != g.rank) throw input_error("markov weight rank must match the group rank");
  if (!validate(w, Rat(0)).empty()) throw input_error("markov system needs an exactly valid weight");
  for (const Rat& m : w.vertex) {
    if (sgn(m) <= 0) throw input_error("markov system needs strictly positive vertex masses");
  }
  System s;
  s.kind_ = SystemKind::markov;
  s.group_ = g;
  s.alphabet_ = w.alphabet;
  s.weight_ = std::move(w);
  return s;
}

System System::finite_action(GroupSpec g, long points, std::vector<std::vector<int>> perms_one_line,
                             std::vector<std::string> alphabet, std::vector<int> labels) {
  check_group_spec(g);
  if (points < 1) throw input_error("finite action needs at least one point");
  if (alphabet.empty()) throw input_error("finite action needs a nonempty alphabet");
  if (static_cast<int>(perms_one_line.size()) != g.rank) {
    throw input_error("finite action needs one permutation per generator");
  }
  if (labels.size() != static_cast<std::size_t>(points)) {
    throw input_error("finite action needs one label per point");
  }
  for (int l : labels) {
    if (l < 0 || l >= static_cast<int>(alphabet.size())) throw input_error("label out of range");
  }
  System s;
  s.kind_ = SystemKind::finite_action;
  s.group_ = g;
  s.alphabet_ = std::move(alphabet);
  s.points_ = points;
  s.labels_ = std::move(labels);
  for (auto& p : perms_one_line) {
    if (p.size() != static_cast<std::size_t>(points)) throw input_error("permutation has wrong size");
    std::vector<bool> seen(points, false);
    std::vector<int> zero;
    zero.reserve(points);
    for (int img : p) {
      if (img < 1 || img > points || seen[img - 1]) {
        throw input_error("generator action must be a bijection");
      }
      seen[img - 1] = true;
      zero.push_back(img - 1);
    }
    s.perms_.push_back(std::move(zero));
  }
  return s;
}

System System::product(System first, System second) {
  if (!(first.group() == second.group())) {
    throw input_error("product systems need identical acting groups");
  }
  System s;
  s.kind_ = SystemKind::product;
  s.group_ = first.group();
  for (const auto& x : first.alphabet()) {
    for (const auto& y : second.alphabet()) s.alphabet_.push_back("(" + x + "," + y + ")");
  }
  s.first_ = std::make_shared<System>(std::move(first));
  s.second_ = std::make_shared<System>(std::move(second));
  return s;
}

namespace {

PatternDistribution bernoulli_joint(const System& sys, const std::vector<Word>& words,
                                    const EnumBudget& budget) {
  if (!pow_capped(sys.alphabet_size(), words.size(), budget.max_labelings)) {
    throw budget_error("bernoulli joint support exceeds the labeling budget");
  }
  PatternDistribution out;
  out.support_words = words;
  std::vector<int> key(words.size(), 0);
  const std::function<void(std::size_t, const Rat&)> walk = [&](std::size_t idx, const Rat& mass) {
    if (idx == words.size()) {
      out.masses[key] += mass;
      return;
    }
    for (int l = 0; l < sys.alphabet_size(); ++l) {
      if (sgn(sys.kappa()[l]) == 0) continue;
      key[idx] = l;
      walk(idx + 1, mass * sys.kappa()[l]);
    }
  };
  walk(0, Rat(1));
  return out;
}

PatternDistribution markov_joint(const System& sys, const std::set<Word>& S,
                                 const EnumBudget& budget) {
  const Subtree tree = hull(sys.group(), S);
  if (!pow_capped(sys.alphabet_size(), tree.vertices.size(), budget.max_labelings)) {
    throw budget_error("markov joint hull exceeds the labeling budget");
  }
  PatternDistribution out;
  out.support_words.assign(S.begin(), S.end());
  const auto pos = support_positions(out.support_words, tree.vertices);
  std::vector<int> key(pos.size());
  markov_enumerate(sys.markov_weight(), tree, [&](const std::vector<int>& labels, const Rat& mass) {
    for (std::size_t i = 0; i < pos.size(); ++i) key[i] = labels[pos[i]];
    out.masses[key] += mass;
  });
  return out;
}

PatternDistribution finite_joint(const System& sys, const std::vector<Word>& words) {
  std::vector<std::vector<int>> inv;
  inv.reserve(sys.perms().size());
  for (const auto& p : sys.perms()) inv.push_back(invert_perm(p));

  std::vector<std::vector<int>> maps;
  maps.reserve(words.size());
  for (const Word& w : words) maps.push_back(action_point_map(sys.perms(), inv, w, sys.points()));

  PatternDistribution out;
  out.support_words = words;
  const Rat unit = make_rat(1, sys.points());
  std::vector<int> key(words.size());
  for (long x = 0; x < sys.points(); ++x) {
    for (std::size_t i = 0; i < words.size(); ++i) key[i] = sys.labels()[maps[i][x]];
    out.masses[key] += unit;
  }
  return out;
}

PatternDistribution product_joint(const System& sys, const std::set<Word>& S,
                                  const EnumBudget& budget) {
  const auto d1 = joint_distribution(sys.first(), S, budget);
  const auto d2 = joint_distribution(sys.second(), S, budget);
  if (d1.masses.size() > budget.max_labelings / std::max<std::size_t>(d2.masses.size(), 1)) {
    throw budget_error("product joint support exceeds the labeling budget");
  }
  PatternDistribution out;
  out.support_words = d1.support_words;
  const int a2 = sys.second().alphabet_size();
  std::vector<int> key(out.support_words.size());
  for (const auto& [k1, m1] : d1.masses) {
    for (const auto& [k2, m2] : d2.masses) {
      for (std::size_t i = 0; i < key.size(); ++i) key[i] = k1[i] * a2 + k2[i];
      out.masses[key] += m1 * m2;
    }
  }
  return out;
}

}  // namespace

PatternDistribution joint_distribution(const System& sys, const std::set<Word>& S,
                                       const EnumBudget& budget) {
  if (S.empty()) throw input_error("joint distribution over an empty word set");
  const std::vector<Word> words(S.begin(), S.end());
  switch (sys.kind()) {
    case SystemKind::bernoulli:
      return bernoulli_joint(sys, words, budget);
    case SystemKind::markov:
      return markov_joint(sys, S, budget);
    case SystemKind::finite_action:
      return finite_joint(sys, words);
    case SystemKind::product:
      return product_joint(sys, S, budget);
  }
  throw std::logic_error("unreachable");
}

PatternDistribution marginalize(const PatternDistribution& dist, const std::vector<Word>& subset) {
  std::vector<Word> words = subset;
  std::sort(words.begin(), words.end());
  const auto pos = support_positions(words, dist.support_words);
  PatternDistribution out;
  out.support_words = words;
  std::vector<int> key(pos.size());
  for (const auto& [k, m] : dist.masses) {
    for (std::size_t i = 0; i < pos.size(); ++i) key[i] = k[pos[i]];
    out.masses[key] += m;
  }
  return out;
}

double entropy(const PatternDistribution& dist) {
  double h = 0.0;
  for (const auto& [key, mass] : dist.masses) h -= xlogx(mass.get_d());
  return h;
}

double entropy_base(const System& sys) {
  return entropy(joint_distribution(sys, {Word()}));
}

namespace {

double markov_subtree_entropy(const Weight& w, const Subtree& tree) {
  double h_vertex = 0.0;
  for (const Rat& m : w.vertex) h_vertex -= xlogx(m.get_d());
  std::vector<double> h_edge(w.rank, 0.0);
  for (int c = 1; c <= w.rank; ++c) {
    for (int x = 0; x < w.size(); ++x) {
      for (int y = 0; y < w.size(); ++y) h_edge[c - 1] -= xlogx(w.edge_f64(c, x, y));
    }
  }
  double h = h_vertex;
  for (const auto& e : tree.edges) h += h_edge[e.color - 1] - h_vertex;
  return h;
}

}  // namespace

double entropy_of_joint(const System& sys, const std::set<Word>& S, const EnumBudget& budget) {
  if (S.empty()) throw input_error("joint distribution over an empty word set");
  switch (sys.kind()) {
    case SystemKind::bernoulli:
      // distinct words carry independent coordinates
      return static_cast<double>(S.size()) * entropy_base(sys);
    case SystemKind::markov: {
      const Subtree tree = hull(sys.group(), S);
      if (tree.vertices.size() != S.size()) {
        return entropy(joint_distribution(sys, S, budget));  // proper marginal
      }
      const double closed = markov_subtree_entropy(sys.markov_weight(), tree);
      if (pow_capped(sys.alphabet_size(), tree.vertices.size(), budget.max_labelings)) {
        double enumerated = 0.0;
        markov_enumerate(sys.markov_weight(), tree,
                         [&](const std::vector<int>&, const Rat& mass) { enumerated -= xlogx(mass.get_d()); });
        if (std::abs(enumerated - closed) > 1e-9) {
          throw std::logic_error("markov entropy: closed form and enumeration disagree");
        }
      }
      return closed;
    }
    case SystemKind::finite_action:
      return entropy(joint_distribution(sys, S, budget));
    case SystemKind::product:
      return entropy_of_joint(sys.first(), S, budget) + entropy_of_joint(sys.second(), S, budget);
  }
  throw std::logic_error("unreachable");
}

namespace {

template <class EntropyFn>
double f_level_impl(const GroupSpec& g, int level, EntropyFn&& joint_entropy) {
  if (level < 0) throw input_error("level must be >= 0");
  const auto b = ball(g, level);
  const std::set<Word> base(b.begin(), b.end());
  double value = (1.0 - 2.0 * g.rank) * joint_entropy(base);
  for (int c = 1; c <= g.rank; ++c) {
    std::set<Word> joined = base;
    const auto translated = right_translate(base, reduce({c}, g), g);
    joined.insert(translated.begin(), translated.end());
    value += joint_entropy(joined);
  }
  return value;
}

template <class EntropyFn>
FEstimate f_estimate_impl(const GroupSpec& g, int max_level, EntropyFn&& joint_entropy) {
  if (max_level < 0) throw input_error("max level must be >= 0");
  FEstimate est;
  for (int m = 0; m <= max_level; ++m) {
    est.levels.push_back(f_level_impl(g, m, joint_entropy));
  }
  est.min_value = *std::min_element(est.levels.begin(), est.levels.end());
  return est;
}

}  // namespace

double F_level(const System& sys, int level, const EnumBudget& budget) {
  return f_level_impl(sys.group(), level,
                      [&](const std::set<Word>& S) { return entropy_of_joint(sys, S, budget); });
}

FEstimate f_estimate(const System& sys, int max_level, const EnumBudget& budget) {
  return f_estimate_impl(sys.group(), max_level,
                         [&](const std::set<Word>& S) { return entropy_of_joint(sys, S, budget); });
}

Weight weight_from_system(const System& sys) {
  const int r = sys.group().rank;
  const int a = sys.alphabet_size();
  std::vector<Rat> edges(static_cast<std::size_t>(r) * a * a, Rat(0));
  for (int c = 1; c <= r; ++c) {
    const std::set<Word> pair{Word(), reduce({c}, sys.group())};
    const auto dist = joint_distribution(sys, pair);
    for (const auto& [key, mass] : dist.masses) {
      edges[(static_cast<std::size_t>(c - 1) * a + key[0]) * a + key[1]] += mass;
    }
  }
  Weight w = weight_from_edges(sys.alphabet(), r, std::move(edges));
  if (!validate(w, Rat(0)).empty()) {
    throw std::logic_error("weight_from_system produced an invalid weight");
  }
  return w;
}

TransformedSystem::TransformedSystem(System base, std::vector<Word> images,
                                     std::vector<Word> inverse_images)
    : base_(std::move(base)), images_(std::move(images)) {
  if (static_cast<int>(images_.size()) != base_.group().rank ||
      inverse_images.size() != images_.size()) {
    throw input_error("transform needs one image and one inverse image per generator");
  }
  if (!inverts_on_ball(base_.group(), images_, inverse_images)) {
    throw input_error("transform images fail the radius-3 inverse check");
  }
}

Word TransformedSystem::apply(const Word& w) const {
  return apply_endomorphism(w, images_, base_.group());
}

PatternDistribution TransformedSystem::joint_distribution(const std::set<Word>& S,
                                                          const EnumBudget& budget) const {
  if (S.empty()) throw input_error("joint distribution over an empty word set");
  const std::vector<Word> words(S.begin(), S.end());
  std::vector<Word> imgs;
  imgs.reserve(words.size());
  for (const Word& w : words) imgs.push_back(apply(w));
  const std::set<Word> image_set(imgs.begin(), imgs.end());
  const auto base_dist = finv::joint_distribution(base_, image_set, budget);

  std::vector<std::size_t> pos;
  pos.reserve(imgs.size());
  for (const Word& w : imgs) {
    pos.push_back(static_cast<std::size_t>(
        std::lower_bound(base_dist.support_words.begin(), base_dist.support_words.end(), w) -
        base_dist.support_words.begin()));
  }

  PatternDistribution out;
  out.support_words = words;
  std::vector<int> key(words.size());
  for (const auto& [k, m] : base_dist.masses) {
    for (std::size_t i = 0; i < pos.size(); ++i) key[i] = k[pos[i]];
    out.masses[key] += m;
  }
  return out;
}

double TransformedSystem::entropy_of_joint(const std::set<Word>& S, const EnumBudget& budget) const {
  std::set<Word> image_set;
  for (const Word& w : S) image_set.insert(apply(w));
  if (image_set.size() == S.size()) {
    // injective relabeling of coordinates preserves entropy
    return finv::entropy_of_joint(base_, image_set, budget);
  }
  return entropy(joint_distribution(S, budget));
}

TransformedSystem transform_system(const System& sys, std::vector<Word> images,
                                   std::vector<Word> inverse_images) {
  return TransformedSystem(sys, std::move(images), std::move(inverse_images));
}

double F_level(const TransformedSystem& sys, int level, const EnumBudget& budget) {
  return f_level_impl(sys.group(), level,
                      [&](const std::set<Word>& S) { return sys.entropy_of_joint(S, budget); });
}

FEstimate f_estimate(const TransformedSystem& sys, int max_level, const EnumBudget& budget) {
  return f_estimate_impl(sys.group(), max_level,
                         [&](const std::set<Word>& S) { return sys.entropy_of_joint(S, budget); });
}

namespace {

nlohmann::json group_to_json(const GroupSpec& g) {
  return {{"rank", g.rank}, {"kind", g.kind == GroupKind::group ? "group" : "semigroup"}};
}

GroupSpec group_from_json(const nlohmann::json& j) {
  GroupSpec g;
  g.rank = j.at("rank").get<int>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "group") {
    g.kind = GroupKind::group;
  } else if (kind == "semigroup") {
    g.kind = GroupKind::semigroup;
  } else {
    throw input_error("group kind must be \"group\" or \"semigroup\"");
  }
  check_group_spec(g);
  return g;
}

}  // namespace

nlohmann::json system_to_json(const System& sys) {
  nlohmann::json j;
  j["group"] = group_to_json(sys.group());
  switch (sys.kind()) {
    case SystemKind::bernoulli: {
      j["variant"] = "bernoulli";
      j["alphabet"] = sys.alphabet();
      nlohmann::json kappa = nlohmann::json::array();
      for (const Rat& p : sys.kappa()) kappa.push_back(rat_to_json(p));
      j["kappa"] = kappa;
      break;
    }
    case SystemKind::markov:
      j["variant"] = "markov";
      j["weight"] = weight_to_json(sys.markov_weight());
      break;
    case SystemKind::finite_action: {
      j["variant"] = "finite_action";
      j["alphabet"] = sys.alphabet();
      j["points"] = sys.points();
      nlohmann::json perms = nlohmann::json::array();
      for (const auto& p : sys.perms()) {
        nlohmann::json one = nlohmann::json::array();
        for (int img : p) one.push_back(img + 1);
        perms.push_back(one);
      }
      j["perms"] = perms;
      nlohmann::json labels = nlohmann::json::array();
      for (int l : sys.labels()) labels.push_back(sys.alphabet()[l]);
      j["labels"] = labels;
      break;
    }
    case SystemKind::product:
      j["variant"] = "product";
      j["first"] = system_to_json(sys.first());
      j["second"] = system_to_json(sys.second());
      break;
  }
  return j;
}

System system_from_json(const nlohmann::json& j) try {
  if (!j.is_object() || !j.contains("variant")) throw input_error("system JSON needs a variant");
  const std::string variant = j.at("variant").get<std::string>();
  const GroupSpec g = group_from_json(j.at("group"));

  if (variant == "bernoulli") {
    std::vector<std::string> alphabet = j.at("alphabet").get<std::vector<std::string>>();
    std::vector<Rat> kappa;
    for (const auto& p : j.at("kappa")) kappa.push_back(rat_from_json(p));
    return System::bernoulli(g, std::move(alphabet), std::move(kappa));
  }
  if (variant == "markov") {
    return System::markov(g, weight_from_json(j.at("weight")));
  }
  if (variant == "finite_action") {
    std::vector<std::string> alphabet = j.at("alphabet").get<std::vector<std::string>>();
    const long points = j.at("points").get<long>();
    std::vector<std::vector<int>> perms;
    for (const auto& p : j.at("perms")) perms.push_back(p.get<std::vector<int>>());
    std::vector<int> labels;
    for (const auto& l : j.at("labels")) {
      const std::string sym = l.get<std::string>();
      const auto it = std::find(alphabet.begin(), alphabet.end(), sym);
      if (it == alphabet.end()) throw input_error("label symbol not in the alphabet: " + sym);
      labels.push_back(static_cast<int>(it - alphabet.begin()));
    }
    return System::finite_action(g, points, std::move(perms), std::move(alphabet),
                                 std::move(labels));
  }
  if (variant == "product") {
    return System::product(system_from_json(j.at("first")), system_from_json(j.at("second")));
  }
  throw input_error("unknown system variant: " + variant);
} catch (const nlohmann::json::exception& e) {
  throw input_error(std::string("system JSON: ") + e.what());
}

}  // namespace finv
