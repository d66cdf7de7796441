#include "gensor/markov.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "gensor/error.hpp"

namespace gensor {

int ChainModel::num_levels() const {
  int max_level = 0;
  for (int l : level_of) max_level = std::max(max_level, l);
  return max_level;
}

namespace {

struct StateKey {
  size_t operator()(const ETIRState& s) const { return s.hash(); }
};

int64_t space_size_bound(const TensorOpSpec& op, const HardwareSpec& hw, const ChainCaps& caps) {
  int levels = hw.num_schedulable_levels();
  int64_t bound = levels + 1;
  for (const Axis& a : op.axes()) {
    int choices = 1;
    for (int64_t t = a.padded; t > 1; t /= 2) ++choices;
    for (int l = 0; l < levels; ++l) bound *= choices;
    if (a.kind == AxisKind::Spatial) bound *= static_cast<int64_t>(caps.vthread_options.size());
    if (bound > (int64_t{1} << 40)) return bound;  // good enough to reject
  }
  return bound;
}

}  // namespace

ChainModel enumerate_space(const TensorOpSpec& op, const HardwareSpec& hw, const ChainCaps& caps) {
  ChainModel model;
  ActionSpace space{caps.vthread_options, caps.max_tile_factor, caps.enable_inv_tile};
  AnnealPoint at{1.0, caps.fixed_iteration};

  std::unordered_map<ETIRState, int, StateKey> index;
  std::deque<int> queue;

  auto intern = [&](const ETIRState& s) {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(model.states.size());
    if (id >= caps.max_states)
      throw Error(ErrorCode::SpaceTooLarge,
                  "more than " + std::to_string(caps.max_states) + " states (bound estimate " +
                      std::to_string(space_size_bound(op, hw, caps)) + ")");
    index.emplace(s, id);
    model.states.push_back(s);
    model.rows.emplace_back();
    model.level_of.push_back(s.cur_mem_level());
    model.complete.push_back(s.complete() ? 1 : 0);
    model.absorbing.push_back(0);
    queue.push_back(id);
    return id;
  };

  intern(ETIRState::initial(op, hw));
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    ETIRState state = model.states[static_cast<size_t>(id)];
    std::vector<ActionCandidate> candidates;
    try {
      candidates = enumerate_candidates(state, hw, space, at);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoLegalAction) throw;
      model.absorbing[static_cast<size_t>(id)] = 1;
      model.rows[static_cast<size_t>(id)].push_back({id, 1.0, Action{}, true});
      continue;
    }
    for (const ActionCandidate& c : candidates) {
      if (c.probability <= 0.0) continue;
      int to = intern(state.apply(c.action));
      model.rows[static_cast<size_t>(id)].push_back({to, c.probability, c.action, false});
    }
  }

  // Terminal payoff: inverse analytical cost, scaled so the best is 1.
  model.terminal_value.assign(model.states.size(), 0.0);
  double best = 0.0;
  for (size_t i = 0; i < model.states.size(); ++i) {
    if (!model.complete[i]) continue;
    model.terminal_value[i] = 1.0 / estimate_cost(model.states[i], hw).est_seconds;
    best = std::max(best, model.terminal_value[i]);
  }
  if (best > 0.0)
    for (double& v : model.terminal_value) v /= best;
  return model;
}

namespace {

// Union-find for weak components of the within-level subgraph.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

struct LevelGraph {
  std::vector<int> nodes;                              // state ids at this level
  std::vector<std::vector<std::pair<int, bool>>> adj;  // local ids, artificial flag
};

LevelGraph level_subgraph(const ChainModel& model, int level) {
  LevelGraph g;
  std::vector<int> local(static_cast<size_t>(model.num_states()), -1);
  for (int i = 0; i < model.num_states(); ++i) {
    if (model.level_of[static_cast<size_t>(i)] != level) continue;
    local[static_cast<size_t>(i)] = static_cast<int>(g.nodes.size());
    g.nodes.push_back(i);
  }
  g.adj.resize(g.nodes.size());
  for (size_t li = 0; li < g.nodes.size(); ++li) {
    for (const ChainEdge& e : model.rows[static_cast<size_t>(g.nodes[li])]) {
      int lt = local[static_cast<size_t>(e.to)];
      if (lt >= 0) g.adj[li].emplace_back(lt, e.artificial);
    }
  }
  return g;
}

// Tarjan-style SCC ids via iterative Kosaraju.
std::vector<int> scc_ids(const LevelGraph& g) {
  int n = static_cast<int>(g.nodes.size());
  std::vector<std::vector<int>> fwd(static_cast<size_t>(n)), rev(static_cast<size_t>(n));
  for (int u = 0; u < n; ++u)
    for (auto [v, art] : g.adj[static_cast<size_t>(u)]) {
      fwd[static_cast<size_t>(u)].push_back(v);
      rev[static_cast<size_t>(v)].push_back(u);
    }
  std::vector<int> order;
  std::vector<char> seen(static_cast<size_t>(n), 0);
  for (int s = 0; s < n; ++s) {
    if (seen[static_cast<size_t>(s)]) continue;
    std::vector<std::pair<int, size_t>> stack{{s, 0}};
    seen[static_cast<size_t>(s)] = 1;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < fwd[static_cast<size_t>(u)].size()) {
        int v = fwd[static_cast<size_t>(u)][next++];
        if (!seen[static_cast<size_t>(v)]) {
          seen[static_cast<size_t>(v)] = 1;
          stack.emplace_back(v, 0);
        }
      } else {
        order.push_back(u);
        stack.pop_back();
      }
    }
  }
  std::vector<int> comp(static_cast<size_t>(n), -1);
  int ncomp = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[static_cast<size_t>(*it)] >= 0) continue;
    std::vector<int> stack{*it};
    comp[static_cast<size_t>(*it)] = ncomp;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : rev[static_cast<size_t>(u)]) {
        if (comp[static_cast<size_t>(v)] < 0) {
          comp[static_cast<size_t>(v)] = ncomp;
          stack.push_back(v);
        }
      }
    }
    ++ncomp;
  }
  return comp;
}

}  // namespace

std::vector<bool> check_irreducible_per_level(const ChainModel& model) {
  std::vector<bool> result(static_cast<size_t>(model.num_levels()) + 1, true);
  for (int level = 0; level <= model.num_levels(); ++level) {
    LevelGraph g = level_subgraph(model, level);
    if (g.nodes.empty()) continue;
    int n = static_cast<int>(g.nodes.size());
    UnionFind uf(n);
    for (int u = 0; u < n; ++u)
      for (auto [v, art] : g.adj[static_cast<size_t>(u)])
        if (!art) uf.unite(u, v);
    std::vector<int> comp = scc_ids(g);
    // Irreducible: every weakly connected piece is a single SCC.
    std::unordered_map<int, int> piece_comp;
    for (int u = 0; u < n; ++u) {
      int piece = uf.find(u);
      auto [it, inserted] = piece_comp.emplace(piece, comp[static_cast<size_t>(u)]);
      if (!inserted && it->second != comp[static_cast<size_t>(u)]) {
        result[static_cast<size_t>(level)] = false;
        break;
      }
    }
  }
  return result;
}

bool check_aperiodic(const ChainModel& model) {
  for (int level = 0; level <= model.num_levels(); ++level) {
    LevelGraph g = level_subgraph(model, level);
    int n = static_cast<int>(g.nodes.size());
    UnionFind uf(n);
    for (int u = 0; u < n; ++u)
      for (auto [v, art] : g.adj[static_cast<size_t>(u)]) uf.unite(u, v);

    std::vector<int> depth(static_cast<size_t>(n), -1);
    std::vector<int64_t> period_of_piece(static_cast<size_t>(n), 0);
    for (int root = 0; root < n; ++root) {
      if (depth[static_cast<size_t>(root)] >= 0) continue;
      // BFS layering; every edge contributes depth(u) + 1 - depth(v) to the
      // gcd of cycle lengths within the (strongly connected) piece.
      std::deque<int> queue{root};
      depth[static_cast<size_t>(root)] = 0;
      while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (auto [v, art] : g.adj[static_cast<size_t>(u)]) {
          if (depth[static_cast<size_t>(v)] < 0) {
            depth[static_cast<size_t>(v)] = depth[static_cast<size_t>(u)] + 1;
            queue.push_back(v);
          }
        }
      }
    }
    std::vector<char> piece_has_edge(static_cast<size_t>(n), 0);
    for (int u = 0; u < n; ++u) {
      int piece = uf.find(u);
      for (auto [v, art] : g.adj[static_cast<size_t>(u)]) {
        int64_t delta = std::abs(int64_t{depth[static_cast<size_t>(u)]} + 1 - depth[static_cast<size_t>(v)]);
        period_of_piece[static_cast<size_t>(piece)] =
            std::gcd(period_of_piece[static_cast<size_t>(piece)], delta);
        piece_has_edge[static_cast<size_t>(piece)] = 1;
      }
    }
    // Edgeless singletons are vacuously aperiodic; everything else must have
    // cycle-length gcd exactly 1.
    for (int r = 0; r < n; ++r)
      if (uf.find(r) == r && piece_has_edge[static_cast<size_t>(r)] &&
          period_of_piece[static_cast<size_t>(r)] != 1)
        return false;
  }
  return true;
}

std::vector<double> stationary_distribution(const ChainModel& model, int level) {
  LevelGraph g = level_subgraph(model, level);
  int n = static_cast<int>(g.nodes.size());
  if (n == 0) throw Error(ErrorCode::NotErgodic, "no states at level " + std::to_string(level));

  std::vector<int> comp = scc_ids(g);
  for (int u = 0; u < n; ++u) {
    if (comp[static_cast<size_t>(u)] != comp[0])
      throw Error(ErrorCode::NotErgodic, "level subchain is not irreducible");
    if (g.adj[static_cast<size_t>(u)].empty())
      throw Error(ErrorCode::NotErgodic, "state without within-level transitions");
  }

  // Row-renormalized restriction of P to this level.
  std::vector<std::vector<std::pair<int, double>>> p(static_cast<size_t>(n));
  std::vector<int> local(static_cast<size_t>(model.num_states()), -1);
  for (int u = 0; u < n; ++u) local[static_cast<size_t>(g.nodes[static_cast<size_t>(u)])] = u;
  for (int u = 0; u < n; ++u) {
    double total = 0.0;
    for (const ChainEdge& e : model.rows[static_cast<size_t>(g.nodes[static_cast<size_t>(u)])])
      if (local[static_cast<size_t>(e.to)] >= 0) total += e.prob;
    for (const ChainEdge& e : model.rows[static_cast<size_t>(g.nodes[static_cast<size_t>(u)])]) {
      int v = local[static_cast<size_t>(e.to)];
      if (v >= 0) p[static_cast<size_t>(u)].emplace_back(v, e.prob / total);
    }
  }

  std::vector<double> pi(static_cast<size_t>(n), 1.0 / n);
  std::vector<double> next(static_cast<size_t>(n), 0.0);
  for (int sweep = 0; sweep < 1000000; ++sweep) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int u = 0; u < n; ++u)
      for (auto [v, w] : p[static_cast<size_t>(u)])
        next[static_cast<size_t>(v)] += pi[static_cast<size_t>(u)] * w;
    double residual = 0.0;
    for (int u = 0; u < n; ++u) residual += std::abs(next[static_cast<size_t>(u)] - pi[static_cast<size_t>(u)]);
    pi.swap(next);
    if (residual < 1e-12) break;
    if (sweep == 999999)
      throw Error(ErrorCode::NotErgodic, "power iteration did not converge");
  }

  std::vector<double> full(static_cast<size_t>(model.num_states()), 0.0);
  for (int u = 0; u < n; ++u)
    full[static_cast<size_t>(g.nodes[static_cast<size_t>(u)])] = pi[static_cast<size_t>(u)];
  return full;
}

ValueTable value_iteration(const ChainModel& model, const ValueObserver& observer) {
  int n = model.num_states();
  ValueTable table;
  table.policy.assign(static_cast<size_t>(n), std::nullopt);
  table.value.assign(static_cast<size_t>(n), 1.0);
  for (int i = 0; i < n; ++i)
    if (model.complete[static_cast<size_t>(i)])
      table.value[static_cast<size_t>(i)] = model.terminal_value[static_cast<size_t>(i)];

  int cap = 10 * std::max(n, 1);
  std::vector<double> next(static_cast<size_t>(n), 0.0);
  for (int sweep = 0;; ++sweep) {
    if (sweep >= cap)
      throw Error(ErrorCode::NoConvergence,
                  "value iteration exceeded " + std::to_string(cap) + " sweeps");
    double delta = 0.0;
    for (int i = 0; i < n; ++i) {
      auto ui = static_cast<size_t>(i);
      if (model.complete[ui]) {
        next[ui] = table.value[ui];
        continue;
      }
      double best = 0.0;
      for (const ChainEdge& e : model.rows[ui]) {
        if (e.artificial) continue;
        double v = e.prob * table.value[static_cast<size_t>(e.to)];
        if (v > best) best = v;
      }
      next[ui] = best;
      delta = std::max(delta, std::abs(best - table.value[ui]));
    }
    table.value.swap(next);
    table.iterations = sweep + 1;
    if (observer) observer(table.value);
    if (delta < 1e-12) break;
  }

  for (int i = 0; i < n; ++i) {
    auto ui = static_cast<size_t>(i);
    if (model.complete[ui]) continue;
    double best = 0.0;
    for (const ChainEdge& e : model.rows[ui]) {
      if (e.artificial) continue;
      double v = e.prob * table.value[static_cast<size_t>(e.to)];
      if (v > best) {
        best = v;
        table.policy[ui] = e.action;
      }
    }
  }
  return table;
}

}  // namespace gensor
