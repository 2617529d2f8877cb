#pragma once

#include <cstdint>
#include <stdexcept>

namespace finv {

// Malformed input: bad schema, bad flag, violated precondition. Exit code 2.
class input_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exhaustive path would exceed its configured budget. Exit code 3.
class budget_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Budgets for the enumeration paths. Defaults keep desk runs in seconds;
// raise them deliberately for larger experiments.
struct EnumBudget {
  std::uint64_t max_labelings = 1u << 18;        // joint-distribution support cap
  std::uint64_t max_brute_pairs = 10'000'000;    // n!^r * |A|^n cap for brute force
  std::uint64_t max_lattice_nodes = 50'000'000;  // backtracking node cap
  std::uint64_t max_psi = 1u << 20;              // per-sample observable scan cap
};

}  // namespace finv
