#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "finv/rational.hpp"

namespace finv {

// Probability weight on the complete r-colored directed graph over the
// alphabet: a mass per vertex and per colored edge, with every color's row
// and column sums equal to the vertex masses and vertex masses summing to 1.
//
// Masses are exact rationals; *_f64 accessors give the explicit binary64
// view used by entropy and log computations. Instances are plain data and
// may be in an invalid state -- validate() reports violations as data.
struct Weight {
  std::vector<std::string> alphabet;
  int rank = 1;
  std::vector<Rat> vertex;  // size |A|
  std::vector<Rat> edges;   // color-major then row-major; size rank*|A|*|A|

  int size() const { return static_cast<int>(alphabet.size()); }

  // color is the 1-based generator index; a, b are 0-based symbol indices.
  const Rat& edge(int color, int a, int b) const {
    return edges[(static_cast<std::size_t>(color - 1) * alphabet.size() + a) * alphabet.size() + b];
  }
  Rat& edge(int color, int a, int b) {
    return edges[(static_cast<std::size_t>(color - 1) * alphabet.size() + a) * alphabet.size() + b];
  }

  double vertex_f64(int a) const { return vertex[a].get_d(); }
  double edge_f64(int color, int a, int b) const { return edge(color, a, b).get_d(); }
};

// Derives vertex masses as the color-1 row sums. No validation.
Weight weight_from_edges(std::vector<std::string> alphabet, int rank, std::vector<Rat> edges);

// All edges 1/|A|^2, all vertices 1/|A|.
Weight uniform_weight(std::vector<std::string> alphabet, int rank);

// Exact double->rational conversion, then row sums as vertex masses.
Weight weight_from_edge_doubles(std::vector<std::string> alphabet, int rank,
                                const std::vector<double>& edges);

struct WeightViolation {
  std::string constraint;
  Rat residual;
};

// Empty result means every constraint holds within tol (exactly, at tol 0).
std::vector<WeightViolation> validate(const Weight& w, const Rat& tol = Rat(0));

// l1 distance over the edges of one color / summed over all colors (d_*).
Rat weight_distance_color(const Weight& w1, const Weight& w2, int color);
Rat weight_distance(const Weight& w1, const Weight& w2);

// -sum edge x log x + (2r-1) sum vertex x log x, with 0 log 0 = 0.
double F_of_weight(const Weight& w);

// Least positive integer q with q * edge integral for every edge.
Int q_of_weight(const Weight& w);

// Nearest-style level-n lattice approximation: the result is a valid weight,
// q divides n, and d_*(w, result) <= rank*|A|^2/n for valid input. Anchored
// at the first alphabet symbol; when the anchored floor construction is
// valid and optimal it is returned verbatim, otherwise a minimum-cost
// integer repair with the same margins is used.
Weight round_weight(const Weight& w, unsigned long n);

// [num, den] with bare int64 parts when they fit, decimal strings otherwise.
nlohmann::json rat_to_json(const Rat& q);

// Accepts a bare integer, "p/q" string, or a [num, den] pair.
Rat rat_from_json(const nlohmann::json& j);

nlohmann::json weight_to_json(const Weight& w);

// Schema: {"alphabet": [...], "rank": r, "edges": {"1": [[num,den], ...]}}
// with each color's table row-major and vertex masses derived. Entries may
// be bare integers. Validates exactly; throws input_error on violation.
Weight weight_from_json(const nlohmann::json& j);

}  // namespace finv
