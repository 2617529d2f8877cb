#include "finv/weights.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace finv {

namespace {

void check_shape(const Weight& w) {
  const std::size_t a = w.alphabet.size();
  if (a == 0) throw input_error("weight needs a nonempty alphabet");
  if (w.rank < 1) throw input_error("weight rank must be >= 1");
  if (w.vertex.size() != a) throw input_error("weight vertex table has wrong size");
  if (w.edges.size() != static_cast<std::size_t>(w.rank) * a * a) {
    throw input_error("weight edge table has wrong size");
  }
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

Int floor_rat(const Rat& q) {
  Int f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return f;
}

}  // namespace

Weight weight_from_edges(std::vector<std::string> alphabet, int rank, std::vector<Rat> edges) {
  Weight w;
  w.alphabet = std::move(alphabet);
  w.rank = rank;
  w.edges = std::move(edges);
  const int a = w.size();
  w.vertex.assign(a, Rat(0));
  check_shape(w);
  for (int x = 0; x < a; ++x) {
    for (int y = 0; y < a; ++y) w.vertex[x] += w.edge(1, x, y);
  }
  return w;
}

Weight uniform_weight(std::vector<std::string> alphabet, int rank) {
  const int a = static_cast<int>(alphabet.size());
  std::vector<Rat> edges(static_cast<std::size_t>(rank) * a * a, make_rat(1, static_cast<long>(a) * a));
  return weight_from_edges(std::move(alphabet), rank, std::move(edges));
}

Weight weight_from_edge_doubles(std::vector<std::string> alphabet, int rank,
                                const std::vector<double>& edges) {
  std::vector<Rat> exact;
  exact.reserve(edges.size());
  for (double x : edges) {
    if (!std::isfinite(x)) throw input_error("edge mass is not finite");
    exact.emplace_back(x);  // binary64 -> rational is exact
  }
  return weight_from_edges(std::move(alphabet), rank, std::move(exact));
}

std::vector<WeightViolation> validate(const Weight& w, const Rat& tol) {
  check_shape(w);
  if (sgn(tol) < 0) throw input_error("negative tolerance");
  const int a = w.size();
  std::vector<WeightViolation> out;

  auto range_check = [&](const Rat& mass, const std::string& name) {
    Rat res(0);
    if (mass < 0) res = -mass;
    if (mass > 1) res = mass - 1;
    if (res > tol) out.push_back({name + " outside [0,1]", res});
  };

  for (int x = 0; x < a; ++x) range_check(w.vertex[x], "vertex(" + w.alphabet[x] + ")");
  for (int c = 1; c <= w.rank; ++c) {
    for (int x = 0; x < a; ++x) {
      for (int y = 0; y < a; ++y) {
        range_check(w.edge(c, x, y), "edge(" + w.alphabet[x] + "," + w.alphabet[y] + ";" +
                                         std::to_string(c) + ")");
      }
    }
  }

  Rat total(0);
  for (int x = 0; x < a; ++x) total += w.vertex[x];
  if (abs(total - 1) > tol) out.push_back({"vertex masses sum to 1", abs(total - 1)});

  for (int c = 1; c <= w.rank; ++c) {
    for (int x = 0; x < a; ++x) {
      Rat row(0), col(0);
      for (int y = 0; y < a; ++y) {
        row += w.edge(c, x, y);
        col += w.edge(c, y, x);
      }
      if (abs(row - w.vertex[x]) > tol) {
        out.push_back({"row sum (color " + std::to_string(c) + ", " + w.alphabet[x] +
                           ") != vertex mass",
                       abs(row - w.vertex[x])});
      }
      if (abs(col - w.vertex[x]) > tol) {
        out.push_back({"column sum (color " + std::to_string(c) + ", " + w.alphabet[x] +
                           ") != vertex mass",
                       abs(col - w.vertex[x])});
      }
    }
  }
  return out;
}

Rat weight_distance_color(const Weight& w1, const Weight& w2, int color) {
  check_shape(w1);
  check_shape(w2);
  if (w1.size() != w2.size() || w1.rank != w2.rank) {
    throw input_error("weight shape mismatch");
  }
  if (color < 1 || color > w1.rank) throw input_error("color out of range");
  Rat d(0);
  for (int x = 0; x < w1.size(); ++x) {
    for (int y = 0; y < w1.size(); ++y) d += abs(w1.edge(color, x, y) - w2.edge(color, x, y));
  }
  return d;
}

Rat weight_distance(const Weight& w1, const Weight& w2) {
  Rat d(0);
  for (int c = 1; c <= w1.rank; ++c) d += weight_distance_color(w1, w2, c);
  return d;
}

double F_of_weight(const Weight& w) {
  check_shape(w);
  double edge_term = 0.0;
  for (const Rat& m : w.edges) edge_term += xlogx(m.get_d());
  double vertex_term = 0.0;
  for (const Rat& m : w.vertex) vertex_term += xlogx(m.get_d());
  return -edge_term + (2.0 * w.rank - 1.0) * vertex_term;
}

Int q_of_weight(const Weight& w) {
  check_shape(w);
  Int q(1);
  for (const Rat& m : w.edges) q = lcm(q, m.get_den());
  return q;
}

namespace {

// Minimum-cost completion of the entrywise floors up to the given integer
// margins: distributes the deficit units through successive shortest paths
// (Bellman-Ford; the cost of the k-th unit on a cell is convex).
struct TableRounder {
  int a;
  unsigned long n;
  const std::vector<Rat>& targets;  // n * W(x,y), row-major
  std::vector<Int> floors;
  std::vector<Int> extra;
  std::vector<Int> row_need, col_need;

  TableRounder(int a_, unsigned long n_, const std::vector<Rat>& t, const std::vector<Int>& margins)
      : a(a_), n(n_), targets(t), extra(static_cast<std::size_t>(a_) * a_, Int(0)) {
    floors.reserve(targets.size());
    for (const Rat& t_xy : targets) {
      Rat clamped = t_xy;
      if (clamped < 0) clamped = 0;
      floors.push_back(floor_rat(clamped));
    }
    row_need.assign(a, Int(0));
    col_need.assign(a, Int(0));
    for (int x = 0; x < a; ++x) {
      Int rs(0), cs(0);
      for (int y = 0; y < a; ++y) {
        rs += floors[x * a + y];
        cs += floors[y * a + x];
      }
      row_need[x] = margins[x] - rs;
      col_need[x] = margins[x] - cs;
      if (row_need[x] < 0 || col_need[x] < 0) {
        throw input_error("round_weight needs a weight with near-consistent marginals");
      }
    }
  }

  Rat add_cost(int x, int y) const {
    const Int cur = floors[x * a + y] + extra[x * a + y];
    return abs(Rat(cur + 1) - targets[x * a + y]) - abs(Rat(cur) - targets[x * a + y]);
  }
  Rat remove_cost(int x, int y) const {
    const Int cur = floors[x * a + y] + extra[x * a + y];
    return abs(Rat(cur - 1) - targets[x * a + y]) - abs(Rat(cur) - targets[x * a + y]);
  }

  // Moves one unit from some needy row to some needy column.
  void push_unit() {
    const int nodes = 2 * a;  // rows, then columns
    std::vector<std::optional<Rat>> dist(nodes);
    std::vector<int> pred(nodes, -1);  // predecessor node
    for (int x = 0; x < a; ++x) {
      if (row_need[x] > 0) dist[x] = Rat(0);
    }
    for (int round = 0; round < nodes; ++round) {
      bool changed = false;
      for (int x = 0; x < a; ++x) {
        for (int y = 0; y < a; ++y) {
          if (dist[x]) {  // row x -> col y: add a unit at (x,y)
            const Rat cand = *dist[x] + add_cost(x, y);
            if (!dist[a + y] || cand < *dist[a + y]) {
              dist[a + y] = cand;
              pred[a + y] = x;
              changed = true;
            }
          }
          if (dist[a + y] && extra[x * a + y] > 0) {  // col y -> row x: take a unit back
            const Rat cand = *dist[a + y] + remove_cost(x, y);
            if (!dist[x] || cand < *dist[x]) {
              dist[x] = cand;
              pred[x] = a + y;
              changed = true;
            }
          }
        }
      }
      if (!changed) break;
    }

    int sink = -1;
    for (int y = 0; y < a; ++y) {
      if (col_need[y] > 0 && dist[a + y] && (sink < 0 || *dist[a + y] < *dist[a + sink])) sink = y;
    }
    if (sink < 0) throw input_error("round_weight: infeasible margins");

    int node = a + sink;
    int steps = 0;
    while (pred[node] != -1) {
      if (++steps > 4 * nodes * nodes) throw std::logic_error("round_weight: augmenting path cycle");
      const int prev = pred[node];
      if (node >= a) {
        extra[prev * a + (node - a)] += 1;  // arrived via add
      } else {
        extra[node * a + (prev - a)] -= 1;  // arrived via remove
      }
      node = prev;
    }
    if (node >= a || row_need[node] <= 0) throw std::logic_error("round_weight: bad path endpoint");
    row_need[node] -= 1;
    col_need[sink] -= 1;
  }

  std::vector<Int> solve() {
    Int total(0);
    for (int x = 0; x < a; ++x) total += row_need[x];
    // A near-valid input leaves at most one unit per cell of slack.
    if (total > Int(4) * a * a) {
      throw input_error("round_weight needs a weight with near-consistent marginals");
    }
    while (total > 0) {
      push_unit();
      total -= 1;
    }
    std::vector<Int> out(floors);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += extra[i];
    return out;
  }
};

Rat table_cost(const std::vector<Int>& table, const std::vector<Rat>& targets) {
  Rat c(0);
  for (std::size_t i = 0; i < table.size(); ++i) c += abs(Rat(table[i]) - targets[i]);
  return c;
}

}  // namespace

Weight round_weight(const Weight& w, unsigned long n) {
  check_shape(w);
  if (n == 0) throw input_error("round_weight needs n >= 1");
  const int a = w.size();

  // Anchored vertex rounding: floors everywhere except the first symbol,
  // which absorbs the remainder.
  std::vector<Int> vtx(a);
  Int rest(static_cast<unsigned long>(n));
  for (int x = 1; x < a; ++x) {
    vtx[x] = floor_rat(Rat(static_cast<unsigned long>(n)) * w.vertex[x]);
    if (vtx[x] < 0) vtx[x] = 0;
    rest -= vtx[x];
  }
  vtx[0] = rest;
  if (vtx[0] < 0) throw input_error("round_weight: vertex masses sum above 1");

  Weight out;
  out.alphabet = w.alphabet;
  out.rank = w.rank;
  out.vertex.reserve(a);
  for (int x = 0; x < a; ++x) {
    Rat m(vtx[x], static_cast<unsigned long>(n));
    m.canonicalize();
    out.vertex.push_back(m);
  }
  out.edges.assign(static_cast<std::size_t>(w.rank) * a * a, Rat(0));

  for (int c = 1; c <= w.rank; ++c) {
    std::vector<Rat> targets(static_cast<std::size_t>(a) * a);
    for (int x = 0; x < a; ++x) {
      for (int y = 0; y < a; ++y) {
        targets[x * a + y] = Rat(static_cast<unsigned long>(n)) * w.edge(c, x, y);
      }
    }

    // The anchored construction: floor every non-anchor entry, then solve the
    // anchor row and column from the margins. May go negative.
    std::vector<Int> anchored(static_cast<std::size_t>(a) * a, Int(0));
    bool anchored_ok = true;
    for (int x = 1; x < a; ++x) {
      for (int y = 1; y < a; ++y) anchored[x * a + y] = floor_rat(targets[x * a + y]);
    }
    for (int y = 1; y < a; ++y) {
      Int s(0);
      for (int x = 1; x < a; ++x) s += anchored[x * a + y];
      anchored[y] = vtx[y] - s;  // anchor row
    }
    for (int x = 1; x < a; ++x) {
      Int s(0);
      for (int y = 1; y < a; ++y) s += anchored[x * a + y];
      anchored[x * a] = vtx[x] - s;  // anchor column
    }
    {
      Int s(0);
      for (int y = 1; y < a; ++y) s += anchored[y];
      anchored[0] = vtx[0] - s;
    }
    Int col0(0);
    for (int x = 0; x < a; ++x) {
      col0 += anchored[x * a];
      for (int y = 0; y < a; ++y) {
        if (anchored[x * a + y] < 0) anchored_ok = false;
      }
    }
    if (col0 != vtx[0]) anchored_ok = false;  // input marginals were inconsistent

    TableRounder rounder(a, n, targets, vtx);
    std::vector<Int> best = rounder.solve();
    if (anchored_ok && table_cost(anchored, targets) <= table_cost(best, targets)) {
      best = std::move(anchored);
    }

    for (int x = 0; x < a; ++x) {
      for (int y = 0; y < a; ++y) {
        Rat m(best[x * a + y], static_cast<unsigned long>(n));
        m.canonicalize();
        out.edge(c, x, y) = m;
      }
    }
  }
  return out;
}

nlohmann::json rat_to_json(const Rat& q) {
  nlohmann::json pair = nlohmann::json::array();
  if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p()) {
    pair.push_back(q.get_num().get_si());
    pair.push_back(q.get_den().get_si());
  } else {
    pair.push_back(q.get_num().get_str());
    pair.push_back(q.get_den().get_str());
  }
  return pair;
}

Rat rat_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Rat(static_cast<long>(j.get<long long>()));
  if (j.is_string()) return parse_fraction(j.get<std::string>());
  if (j.is_array() && j.size() == 2) {
    auto part = [](const nlohmann::json& p) -> Int {
      if (p.is_number_integer()) return Int(static_cast<long>(p.get<long long>()));
      if (p.is_string()) return Int(p.get<std::string>());
      throw input_error("bad rational entry in JSON");
    };
    const Int num = part(j[0]);
    const Int den = part(j[1]);
    if (den == 0) throw input_error("zero denominator in JSON rational");
    Rat q(num, den);
    q.canonicalize();
    return q;
  }
  throw input_error("bad rational entry in JSON");
}

nlohmann::json weight_to_json(const Weight& w) {
  check_shape(w);
  nlohmann::json edges = nlohmann::json::object();
  for (int c = 1; c <= w.rank; ++c) {
    nlohmann::json table = nlohmann::json::array();
    for (int x = 0; x < w.size(); ++x) {
      for (int y = 0; y < w.size(); ++y) table.push_back(rat_to_json(w.edge(c, x, y)));
    }
    edges[std::to_string(c)] = table;
  }
  return nlohmann::json{{"alphabet", w.alphabet}, {"rank", w.rank}, {"edges", edges}};
}

Weight weight_from_json(const nlohmann::json& j) try {
  if (!j.is_object() || !j.contains("alphabet") || !j.contains("rank") || !j.contains("edges")) {
    throw input_error("weight JSON needs alphabet, rank and edges");
  }
  std::vector<std::string> alphabet = j.at("alphabet").get<std::vector<std::string>>();
  const int rank = j.at("rank").get<int>();
  if (rank < 1) throw input_error("weight rank must be >= 1");
  const std::size_t a = alphabet.size();
  if (a == 0) throw input_error("weight needs a nonempty alphabet");

  std::vector<Rat> edges(static_cast<std::size_t>(rank) * a * a, Rat(0));
  for (int c = 1; c <= rank; ++c) {
    const std::string key = std::to_string(c);
    if (!j.at("edges").contains(key)) throw input_error("missing edge table for color " + key);
    const auto& table = j.at("edges").at(key);
    if (!table.is_array() || table.size() != a * a) {
      throw input_error("edge table for color " + key + " must have |A|^2 entries");
    }
    for (std::size_t i = 0; i < a * a; ++i) {
      edges[(static_cast<std::size_t>(c - 1)) * a * a + i] = rat_from_json(table[i]);
    }
  }
  Weight w = weight_from_edges(std::move(alphabet), rank, std::move(edges));
  const auto violations = validate(w, Rat(0));
  if (!violations.empty()) {
    throw input_error("weight JSON violates constraints: " + violations.front().constraint);
  }
  return w;
} catch (const nlohmann::json::exception& e) {
  throw input_error(std::string("weight JSON: ") + e.what());
}

}  // namespace finv
