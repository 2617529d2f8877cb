#include "finv/counting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>

namespace finv {

namespace {

// n * mass must be an integer; returns it as ulong.
unsigned long scaled_count(const Rat& mass, unsigned long n) {
  Rat s = Rat(n) * mass;
  s.canonicalize();
  return rat_to_ulong(s);
}

void require_q_divides(const Weight& w, unsigned long n) {
  const Int q = q_of_weight(w);
  if (!mpz_divisible_p(Int(n).get_mpz_t(), q.get_mpz_t())) {
    throw input_error("q(W) = " + q.get_str() + " does not divide n = " + std::to_string(n));
  }
}

}  // namespace

void check_hom_rep(const HomRep& sigma) {
  if (sigma.n < 1) throw input_error("homomorphism needs n >= 1");
  if (sigma.perms.empty()) throw input_error("homomorphism needs at least one generator image");
  for (const auto& p : sigma.perms) {
    if (p.size() != sigma.n) throw input_error("permutation has wrong size");
    std::vector<bool> seen(sigma.n, false);
    for (int img : p) {
      if (img < 0 || static_cast<unsigned long>(img) >= sigma.n || seen[img]) {
        throw input_error("generator image is not a permutation");
      }
      seen[img] = true;
    }
  }
}

Weight weight_of_pair(const HomRep& sigma, const MicroObservable& psi,
                      const std::vector<std::string>& alphabet) {
  check_hom_rep(sigma);
  if (psi.n != sigma.n || psi.labels.size() != sigma.n) {
    throw input_error("observable size does not match the homomorphism");
  }
  const int a = static_cast<int>(alphabet.size());
  for (int l : psi.labels) {
    if (l < 0 || l >= a) throw input_error("observable label out of range");
  }
  const int r = static_cast<int>(sigma.perms.size());

  Weight w;
  w.alphabet = alphabet;
  w.rank = r;
  w.vertex.assign(a, Rat(0));
  w.edges.assign(static_cast<std::size_t>(r) * a * a, Rat(0));

  std::vector<long> vcnt(a, 0);
  for (int l : psi.labels) ++vcnt[l];
  for (int x = 0; x < a; ++x) {
    Rat m(vcnt[x], sigma.n);
    m.canonicalize();
    w.vertex[x] = m;
  }
  for (int c = 1; c <= r; ++c) {
    std::vector<long> ecnt(static_cast<std::size_t>(a) * a, 0);
    for (unsigned long j = 0; j < sigma.n; ++j) {
      ++ecnt[psi.labels[j] * a + psi.labels[sigma.perms[c - 1][j]]];
    }
    for (int x = 0; x < a; ++x) {
      for (int y = 0; y < a; ++y) {
        Rat m(ecnt[x * a + y], sigma.n);
        m.canonicalize();
        w.edge(c, x, y) = m;
      }
    }
  }
  return w;
}

Rat expected_count_exact(const Weight& w, unsigned long n) {
  if (n < 1) throw input_error("count needs n >= 1");
  require_q_divides(w, n);
  const int r = w.rank;

  Int num(1);
  for (const Rat& m : w.vertex) {
    Int f = factorial(scaled_count(m, n));
    mpz_pow_ui(f.get_mpz_t(), f.get_mpz_t(), static_cast<unsigned long>(2 * r - 1));
    num *= f;
  }
  Int den(1);
  {
    Int f = factorial(n);
    mpz_pow_ui(f.get_mpz_t(), f.get_mpz_t(), static_cast<unsigned long>(r - 1));
    den *= f;
  }
  for (const Rat& m : w.edges) den *= factorial(scaled_count(m, n));

  Rat out(num, den);
  out.canonicalize();
  return out;
}

double expected_count_log(const Weight& w, unsigned long n) {
  if (n < 1) throw input_error("count needs n >= 1");
  require_q_divides(w, n);
  const double r = w.rank;
  double v = (1.0 - r) * std::lgamma(static_cast<double>(n) + 1.0);
  for (const Rat& m : w.vertex) {
    v += (2.0 * r - 1.0) * std::lgamma(static_cast<double>(scaled_count(m, n)) + 1.0);
  }
  for (const Rat& m : w.edges) {
    v -= std::lgamma(static_cast<double>(scaled_count(m, n)) + 1.0);
  }
  return v;
}

Rat brute_force_expected_count(const Weight& w, unsigned long n, const EnumBudget& budget) {
  if (n < 1) throw input_error("count needs n >= 1");
  const int a = w.size();
  const int r = w.rank;

  double pairs = 1.0;
  for (unsigned long k = 2; k <= n; ++k) pairs *= static_cast<double>(k);
  pairs = std::pow(pairs, r) * std::pow(static_cast<double>(a), static_cast<double>(n));
  if (pairs > static_cast<double>(budget.max_brute_pairs)) {
    throw budget_error("brute-force enumeration exceeds the pair budget");
  }

  // integer targets; a fractional target is realized by no labeling at all
  std::vector<long> tv(a);
  std::vector<long> te(static_cast<std::size_t>(r) * a * a);
  {
    bool integral = true;
    auto to_count = [&](const Rat& m) -> long {
      Rat s = Rat(n) * m;
      s.canonicalize();
      if (s.get_den() != 1) {
        integral = false;
        return -1;
      }
      return s.get_num().get_si();
    };
    for (int x = 0; x < a; ++x) tv[x] = to_count(w.vertex[x]);
    for (int c = 1; c <= r; ++c) {
      for (int x = 0; x < a; ++x) {
        for (int y = 0; y < a; ++y) {
          te[(static_cast<std::size_t>(c - 1) * a + x) * a + y] = to_count(w.edge(c, x, y));
        }
      }
    }
    if (!integral) return Rat(0);
  }

  std::vector<std::vector<int>> all_perms;
  {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    do {
      all_perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }

  Int matches(0);
  std::vector<int> labels(n, 0);
  std::vector<long> vcnt(a, 0);
  std::vector<long> ecnt(static_cast<std::size_t>(a) * a, 0);

  const std::function<void(unsigned long)> scan_psi = [&](unsigned long pos) {
    if (pos == n) {
      bool type_ok = true;
      for (int x = 0; x < a; ++x) {
        if (vcnt[x] != tv[x]) {
          type_ok = false;
          break;
        }
      }
      if (!type_ok) return;

      // count sigma tuples matching every color table
      std::vector<std::size_t> idx(r, 0);
      for (;;) {
        bool ok = true;
        for (int c = 1; c <= r && ok; ++c) {
          const auto& p = all_perms[idx[c - 1]];
          std::fill(ecnt.begin(), ecnt.end(), 0);
          for (unsigned long j = 0; j < n; ++j) ++ecnt[labels[j] * a + labels[p[j]]];
          for (int x = 0; x < a && ok; ++x) {
            for (int y = 0; y < a; ++y) {
              if (ecnt[x * a + y] != te[(static_cast<std::size_t>(c - 1) * a + x) * a + y]) {
                ok = false;
                break;
              }
            }
          }
        }
        if (ok) matches += 1;
        int c = r - 1;
        while (c >= 0 && ++idx[c] == all_perms.size()) idx[c--] = 0;
        if (c < 0) break;
      }
      return;
    }
    for (int l = 0; l < a; ++l) {
      labels[pos] = l;
      ++vcnt[l];
      scan_psi(pos + 1);
      --vcnt[l];
    }
  };
  scan_psi(0);

  Int denom = factorial(n);
  mpz_pow_ui(denom.get_mpz_t(), denom.get_mpz_t(), static_cast<unsigned long>(r));
  Rat out(matches, denom);
  out.canonicalize();
  return out;
}

namespace {

// Backtracking enumeration of integer edge tables at level n: colors in
// order, rows in order, with row/column marginal bounds and an exact running
// lower bound on the scaled distance sum.
struct LatticeScan {
  const Weight& target;
  unsigned long n;
  Rat eps_scaled;  // n * eps
  const std::function<void(const Weight&)>& yield;
  std::uint64_t node_cap;
  std::uint64_t nodes = 0;

  int a;
  int r;
  std::vector<Rat> st;          // n * edge target, color-major row-major
  std::vector<Rat> st_row_tail; // sum of st over y' >= y: index ((c-1)*a + x)*(a+1) + y
  std::vector<Rat> row_target;  // n * per-color row sums: (c-1)*a + x

  std::vector<long> v;
  std::vector<Rat> row_vb;          // |v_x - row_target| for current v, (c-1)*a + x
  std::vector<Rat> row_vb_tail;     // sum over x' >= x: ((c-1)*a + x) with sentinel
  std::vector<Rat> color_vb_tail;   // sum of per-color vertex bounds over colors >= c (1-based, sentinel at r+1)
  std::vector<std::vector<long>> tables;

  LatticeScan(const Weight& t, unsigned long n_, const Rat& eps,
              const std::function<void(const Weight&)>& y, std::uint64_t cap)
      : target(t), n(n_), eps_scaled(Rat(n_) * eps), yield(y), node_cap(cap),
        a(t.size()), r(t.rank) {
    st.resize(static_cast<std::size_t>(r) * a * a);
    st_row_tail.assign(static_cast<std::size_t>(r) * a * (a + 1), Rat(0));
    row_target.assign(static_cast<std::size_t>(r) * a, Rat(0));
    for (int c = 1; c <= r; ++c) {
      for (int x = 0; x < a; ++x) {
        for (int y = a - 1; y >= 0; --y) {
          const Rat s = Rat(n) * target.edge(c, x, y);
          st[(static_cast<std::size_t>(c - 1) * a + x) * a + y] = s;
          st_row_tail[(static_cast<std::size_t>(c - 1) * a + x) * (a + 1) + y] =
              st_row_tail[(static_cast<std::size_t>(c - 1) * a + x) * (a + 1) + y + 1] + s;
          row_target[static_cast<std::size_t>(c - 1) * a + x] += s;
        }
      }
    }
    v.assign(a, 0);
    tables.assign(r, std::vector<long>(static_cast<std::size_t>(a) * a, 0));
  }

  void bump() {
    if (++nodes > node_cap) throw budget_error("lattice enumeration exceeds the node budget");
  }

  void run() {
    compose(0, static_cast<long>(n));
  }

  // choose vertex counts
  void compose(int x, long rest) {
    if (x == a - 1) {
      v[x] = rest;
      vertex_chosen();
      return;
    }
    for (long c = 0; c <= rest; ++c) {
      bump();
      v[x] = c;
      compose(x + 1, rest - c);
    }
  }

  void vertex_chosen() {
    row_vb.assign(static_cast<std::size_t>(r) * a, Rat(0));
    row_vb_tail.assign(static_cast<std::size_t>(r) * (a + 1), Rat(0));
    color_vb_tail.assign(r + 2, Rat(0));
    for (int c = r; c >= 1; --c) {
      Rat color_sum(0);
      for (int x = a - 1; x >= 0; --x) {
        const Rat b = abs(Rat(v[x]) - row_target[static_cast<std::size_t>(c - 1) * a + x]);
        row_vb[static_cast<std::size_t>(c - 1) * a + x] = b;
        row_vb_tail[static_cast<std::size_t>(c - 1) * (a + 1) + x] =
            row_vb_tail[static_cast<std::size_t>(c - 1) * (a + 1) + x + 1] + b;
        color_sum += b;
      }
      color_vb_tail[c] = color_vb_tail[c + 1] + color_sum;
    }
    if (color_vb_tail[1] > eps_scaled) return;
    color(1, Rat(0));
  }

  void color(int c, const Rat& partial) {
    if (c > r) {
      emit();
      return;
    }
    std::vector<long> col_rem(a);
    for (int y = 0; y < a; ++y) col_rem[y] = v[y];
    fill_cell(c, 0, 0, v[0], col_rem, partial);
  }

  void fill_cell(int c, int x, int y, long row_rem, std::vector<long>& col_rem, const Rat& partial) {
    if (y == a) {
      if (x + 1 == a) {
        color(c + 1, partial);
      } else {
        fill_cell(c, x + 1, 0, v[x + 1], col_rem, partial);
      }
      return;
    }

    long col_tail = 0;  // capacity of the columns after y
    for (int y2 = y + 1; y2 < a; ++y2) col_tail += col_rem[y2];
    const long lo = std::max(0L, row_rem - col_tail);
    const long hi = std::min(row_rem, col_rem[y]);

    const std::size_t row_idx = static_cast<std::size_t>(c - 1) * a + x;
    for (long cell = lo; cell <= hi; ++cell) {
      bump();
      const Rat cell_d = abs(Rat(cell) - st[row_idx * a + y]);
      // rest of this row, rows below, colors after
      const Rat row_tail_d = abs(Rat(row_rem - cell) - st_row_tail[row_idx * (a + 1) + y + 1]);
      const Rat bound = partial + cell_d + row_tail_d +
                        row_vb_tail[static_cast<std::size_t>(c - 1) * (a + 1) + x + 1] +
                        color_vb_tail[c + 1];
      if (bound > eps_scaled) continue;
      tables[c - 1][static_cast<std::size_t>(x) * a + y] = cell;
      col_rem[y] -= cell;
      fill_cell(c, x, y + 1, row_rem - cell, col_rem, partial + cell_d);
      col_rem[y] += cell;
    }
  }

  void emit() {
    Weight w;
    w.alphabet = target.alphabet;
    w.rank = r;
    w.vertex.reserve(a);
    for (int x = 0; x < a; ++x) {
      Rat m(v[x], n);
      m.canonicalize();
      w.vertex.push_back(m);
    }
    w.edges.resize(static_cast<std::size_t>(r) * a * a);
    for (int c = 1; c <= r; ++c) {
      for (int x = 0; x < a; ++x) {
        for (int y = 0; y < a; ++y) {
          Rat m(tables[c - 1][static_cast<std::size_t>(x) * a + y], n);
          m.canonicalize();
          w.edge(c, x, y) = m;
        }
      }
    }
    yield(w);
  }
};

}  // namespace

void lattice_weights(const Weight& nearby, unsigned long n, const Rat& eps,
                     const std::function<void(const Weight&)>& yield, const EnumBudget& budget) {
  if (n < 1) throw input_error("lattice level needs n >= 1");
  if (sgn(eps) < 0) throw input_error("negative epsilon");
  LatticeScan scan(nearby, n, eps, yield, budget.max_lattice_nodes);
  scan.run();
}

std::vector<Weight> lattice_weights_vec(const Weight& nearby, unsigned long n, const Rat& eps,
                                        const EnumBudget& budget) {
  std::vector<Weight> out;
  lattice_weights(nearby, n, eps, [&](const Weight& w) { out.push_back(w); }, budget);
  return out;
}

Rat expected_eps_count_exact(const Weight& target, unsigned long n, const Rat& eps,
                             const EnumBudget& budget) {
  Rat total(0);
  lattice_weights(target, n, eps,
                  [&](const Weight& w) { total += expected_count_exact(w, n); }, budget);
  return total;
}

RateCurve rate_curve(const System& sys, const Rat& eps, const std::vector<unsigned long>& ns,
                     const EnumBudget& budget) {
  const Weight mu = weight_from_system(sys);
  RateCurve curve;
  curve.F_target = F_of_weight(mu);
  curve.epsilon = eps;
  for (unsigned long n : ns) {
    const Rat count = expected_eps_count_exact(mu, n, eps, budget);
    RatePoint p;
    p.n = n;
    p.log_count = sgn(count) > 0 ? log_rat(count) : -std::numeric_limits<double>::infinity();
    p.rate = p.log_count / static_cast<double>(n);
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

std::string rate_curve_csv(const RateCurve& curve) {
  std::string out = "n,log_count,rate,F_target,epsilon_num,epsilon_den\n";
  for (const auto& p : curve.points) {
    out += std::to_string(p.n) + ',' + fmt_double(p.log_count) + ',' + fmt_double(p.rate) + ',' +
           fmt_double(curve.F_target) + ',' + curve.epsilon.get_num().get_str() + ',' +
           curve.epsilon.get_den().get_str() + '\n';
  }
  return out;
}

std::pair<double, double> stirling_sandwich(const Weight& w, unsigned long n) {
  if (n < 1) throw input_error("sandwich needs n >= 1");
  require_q_divides(w, n);

  // log m! = m log m - m + c(m); c(0) = 0, c(1) = 1, and for m >= 2
  // 0.5 log(2 pi m) <= c(m) <= 1 + 0.5 log m. The main terms telescope to
  // F(w) * n across the count formula.
  const auto c_lo = [](unsigned long m) -> double {
    if (m == 0) return 0.0;
    if (m == 1) return 1.0;
    return 0.5 * std::log(2.0 * std::numbers::pi * static_cast<double>(m));
  };
  const auto c_hi = [](unsigned long m) -> double {
    if (m == 0) return 0.0;
    if (m == 1) return 1.0;
    return 1.0 + 0.5 * std::log(static_cast<double>(m));
  };

  const double r = w.rank;
  const double main_term = F_of_weight(w) * static_cast<double>(n);
  double lo = main_term;
  double hi = main_term;

  lo += (1.0 - r) * c_hi(n);  // coefficient 1-r <= 0
  hi += (1.0 - r) * c_lo(n);
  for (const Rat& m : w.vertex) {
    const unsigned long k = scaled_count(m, n);
    lo += (2.0 * r - 1.0) * c_lo(k);
    hi += (2.0 * r - 1.0) * c_hi(k);
  }
  for (const Rat& m : w.edges) {
    const unsigned long k = scaled_count(m, n);
    lo -= c_hi(k);
    hi -= c_lo(k);
  }
  return {lo, hi};
}

}  // namespace finv
