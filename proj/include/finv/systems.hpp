#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "finv/freegrp.hpp"
#include "finv/weights.hpp"

namespace finv {

enum class SystemKind { bernoulli, markov, finite_action, product };

// A finite-alphabet model of a measure-preserving action together with its
// canonical observable. Immutable after construction; constructors enforce
// the model invariants.
class System {
 public:
  // Product measure with base kappa; the observable reads the identity
  // coordinate, so distinct words carry independent kappa-distributed labels.
  static System bernoulli(GroupSpec g, std::vector<std::string> alphabet, std::vector<Rat> kappa);

  // Tree-indexed stationary Markov chain parameterized directly by a valid
  // weight with strictly positive vertex masses.
  static System markov(GroupSpec g, Weight w);

  // Uniform measure on {1..N} with each generator acting by a permutation
  // (one-line image notation, 1-based) and a labeling observable.
  static System finite_action(GroupSpec g, long points,
                              std::vector<std::vector<int>> perms_one_line,
                              std::vector<std::string> alphabet, std::vector<int> labels);

  // Coordinatewise product action on the product alphabet.
  static System product(System first, System second);

  SystemKind kind() const { return kind_; }
  const GroupSpec& group() const { return group_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  int alphabet_size() const { return static_cast<int>(alphabet_.size()); }

  const std::vector<Rat>& kappa() const { return kappa_; }
  const Weight& markov_weight() const { return *weight_; }
  long points() const { return points_; }
  const std::vector<std::vector<int>>& perms() const { return perms_; }  // 0-based images
  const std::vector<int>& labels() const { return labels_; }
  const System& first() const { return *first_; }
  const System& second() const { return *second_; }

 private:
  System() = default;
  SystemKind kind_ = SystemKind::bernoulli;
  GroupSpec group_;
  std::vector<std::string> alphabet_;
  std::vector<Rat> kappa_;
  std::optional<Weight> weight_;
  long points_ = 0;
  std::vector<std::vector<int>> perms_;
  std::vector<int> labels_;
  std::shared_ptr<const System> first_, second_;
};

// Joint law of the observable patterns over a finite word set. Keys list one
// 0-based symbol index per support word, in support order; zero masses are
// omitted and the remaining masses sum to exactly 1.
struct PatternDistribution {
  std::vector<Word> support_words;  // sorted
  std::map<std::vector<int>, Rat> masses;
};

PatternDistribution joint_distribution(const System& sys, const std::set<Word>& S,
                                       const EnumBudget& budget = {});

PatternDistribution marginalize(const PatternDistribution& dist, const std::vector<Word>& subset);

// Shannon entropy in nats, 0 log 0 = 0.
double entropy(const PatternDistribution& dist);

// Entropy of the single-site marginal H(phi).
double entropy_base(const System& sys);

// Entropy of the joint over S without materializing it when a closed form
// applies: Bernoulli |S| H(kappa), Markov subtree form on prefix-closed sets
// (cross-checked against enumeration whenever that fits the budget), product
// additivity. Falls back to joint_distribution inside the budget.
double entropy_of_joint(const System& sys, const std::set<Word>& S, const EnumBudget& budget = {});

// (1-2r) H(ball joint) + sum_i H(joint over ball and its s_i-translate).
double F_level(const System& sys, int level, const EnumBudget& budget = {});

// Levels 0..max_level and their minimum: an upper bound for the infimum
// defining the f-invariant, not the infimum itself.
struct FEstimate {
  std::vector<double> levels;
  double min_value = 0.0;
};
FEstimate f_estimate(const System& sys, int max_level, const EnumBudget& budget = {});

// The pair statistics (vertex marginal and one-step joints per generator).
Weight weight_from_system(const System& sys);

// The same action precomposed with an endomorphism given by generator
// images. Construction verifies that the supplied inverse images invert the
// images on the radius-3 ball.
class TransformedSystem {
 public:
  TransformedSystem(System base, std::vector<Word> images, std::vector<Word> inverse_images);

  const System& base() const { return base_; }
  const GroupSpec& group() const { return base_.group(); }
  int alphabet_size() const { return base_.alphabet_size(); }
  Word apply(const Word& w) const;

  PatternDistribution joint_distribution(const std::set<Word>& S, const EnumBudget& budget = {}) const;
  double entropy_of_joint(const std::set<Word>& S, const EnumBudget& budget = {}) const;

 private:
  System base_;
  std::vector<Word> images_;
};

TransformedSystem transform_system(const System& sys, std::vector<Word> images,
                                   std::vector<Word> inverse_images);
double F_level(const TransformedSystem& sys, int level, const EnumBudget& budget = {});
FEstimate f_estimate(const TransformedSystem& sys, int max_level, const EnumBudget& budget = {});

nlohmann::json system_to_json(const System& sys);

// {"variant": "bernoulli"|"markov"|"finite_action"|"product", ...}; see the
// repository README for the full schemas.
System system_from_json(const nlohmann::json& j);

}  // namespace finv
