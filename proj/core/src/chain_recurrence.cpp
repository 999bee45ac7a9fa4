#include <algorithm>
#include <deque>

#include <nlohmann/json.hpp>

#include "phmp/chain_recurrence.hpp"
#include "phmp/error.hpp"

namespace phmp {

namespace {

// iterative Tarjan; components come out in reverse topological order
std::vector<int> tarjan(const BoxGraph& g, int& count) {
  const int n = static_cast<int>(g.node_count());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<std::uint8_t> on_stack(n, 0);
  std::vector<std::pair<int, std::size_t>> call;
  int next = 0;
  count = 0;
  for (int s = 0; s < n; ++s) {
    if (index[s] >= 0) continue;
    call.push_back({s, g.offsets[s]});
    index[s] = low[s] = next++;
    stack.push_back(s);
    on_stack[s] = 1;
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      if (pos < g.offsets[v + 1]) {
        int w = g.targets[pos++];
        if (index[w] < 0) {
          index[w] = low[w] = next++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, g.offsets[w]});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = count;
        } while (w != v);
        ++count;
      }
      int done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  return comp;
}

std::vector<std::uint8_t> forward_closure(const BoxGraph& g, const std::vector<int>& start, bool& exits) {
  std::vector<std::uint8_t> seen(g.node_count(), 0);
  std::deque<int> q;
  exits = false;
  for (int s : start)
    if (!seen[s]) {
      seen[s] = 1;
      q.push_back(s);
    }
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    if (g.exits[v]) exits = true;
    auto [b, e] = g.out(v);
    for (auto it = b; it != e; ++it)
      if (!seen[*it]) {
        seen[*it] = 1;
        q.push_back(*it);
      }
  }
  return seen;
}

std::vector<int> nodes_of(const BoxGraph& g, const BoxSet& s) {
  std::vector<int> out;
  for (int b : s.boxes)
    if (b < static_cast<int>(g.node_of.size()) && g.node_of[b] >= 0) out.push_back(g.node_of[b]);
  return out;
}

BoxSet set_of(const BoxGraph& g, const std::vector<std::uint8_t>& mark) {
  BoxSet s{g.grid, {}};
  for (std::size_t n = 0; n < mark.size(); ++n)
    if (mark[n]) s.boxes.push_back(g.nodes[n]);
  return s;
}

}  // namespace

MorseDecomposition morse_decomposition(const BoxGraph& g) {
  int count = 0;
  std::vector<int> comp = tarjan(g, count);
  const int n = static_cast<int>(g.node_count());
  // Tarjan numbers sinks first; flip to get sources first
  for (int& c : comp) c = count - 1 - c;

  std::vector<int> size(count, 0);
  std::vector<std::uint8_t> loop(count, 0);
  for (int v = 0; v < n; ++v) {
    ++size[comp[v]];
    if (g.has_edge(v, v)) loop[comp[v]] = 1;
  }
  std::vector<int> class_of_comp(count, -1);
  MorseDecomposition md;
  md.scc_count = static_cast<std::size_t>(count);
  for (int c = 0; c < count; ++c)
    if (size[c] > 1 || loop[c]) {
      class_of_comp[c] = static_cast<int>(md.classes.size());
      md.classes.emplace_back();
    }
  md.class_of_node.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    int k = class_of_comp[comp[v]];
    md.class_of_node[v] = k;
    if (k >= 0) md.classes[k].push_back(g.nodes[v]);
  }
  for (auto& c : md.classes) std::sort(c.begin(), c.end());

  // reachability between classes: propagate class bitsets backwards over the condensation
  const std::size_t k = md.classes.size();
  const std::size_t words = (k + 63) / 64;
  std::vector<std::vector<int>> members(count);
  for (int v = 0; v < n; ++v) members[comp[v]].push_back(v);
  std::vector<std::uint64_t> bits(static_cast<std::size_t>(count) * words, 0);
  for (int c = count - 1; c >= 0; --c) {
    std::uint64_t* mine = bits.data() + static_cast<std::size_t>(c) * words;
    for (int v : members[c]) {
      auto [b, e] = g.out(v);
      for (auto it = b; it != e; ++it) {
        int d = comp[*it];
        if (d == c) continue;
        const std::uint64_t* theirs = bits.data() + static_cast<std::size_t>(d) * words;
        for (std::size_t w = 0; w < words; ++w) mine[w] |= theirs[w];
        int kd = class_of_comp[d];
        if (kd >= 0) mine[kd / 64] |= std::uint64_t{1} << (kd % 64);
      }
    }
  }
  md.reaches.assign(k, std::vector<std::uint8_t>(k, 0));
  for (int c = 0; c < count; ++c) {
    int a = class_of_comp[c];
    if (a < 0) continue;
    const std::uint64_t* mine = bits.data() + static_cast<std::size_t>(c) * words;
    for (std::size_t b = 0; b < k; ++b) md.reaches[a][b] = (mine[b / 64] >> (b % 64)) & 1;
  }
  return md;
}

BoxSet chain_recurrent_set(const BoxGraph& g, const MorseDecomposition& md) {
  BoxSet s{g.grid, {}};
  for (const auto& c : md.classes) s.boxes.insert(s.boxes.end(), c.begin(), c.end());
  std::sort(s.boxes.begin(), s.boxes.end());
  return s;
}

BoxSet class_set(const BoxGraph& g, const MorseDecomposition& md, int c) {
  return BoxSet{g.grid, md.classes.at(c)};
}

AttractingRegion attracting_region_boxes(const BoxGraph& g, const BoxSet& seed) {
  auto start = nodes_of(g, seed);
  if (start.empty()) throw Error(ErrorKind::invalid_parameters, "attracting region seed is empty");
  AttractingRegion r;
  bool exits = false;
  r.boxes = set_of(g, forward_closure(g, start, exits));
  r.attracting = !exits;
  if (!r.attracting) return r;

  bool exits1 = false;
  auto closure1 = forward_closure(g, nodes_of(g, dilate(r.boxes, 1)), exits1);
  BoxSet two = dilate(r.boxes, 2);
  bool inside = !exits1;
  for (std::size_t v = 0; v < closure1.size() && inside; ++v)
    if (closure1[v] && !two.contains(g.nodes[v])) inside = false;
  r.strict = inside;
  return r;
}

std::vector<int> quasi_attractor_candidates(const BoxGraph& g, const MorseDecomposition& md) {
  std::vector<int> out;
  for (std::size_t c = 0; c < md.classes.size(); ++c) {
    bool minimal = true;
    for (std::size_t d = 0; d < md.classes.size() && minimal; ++d)
      if (d != c && md.reaches[c][d]) minimal = false;
    if (!minimal) continue;
    // the one-cell neighbourhood must not lead into another class either
    bool exits = false;
    auto closure = forward_closure(g, nodes_of(g, dilate(class_set(g, md, static_cast<int>(c)), 1)), exits);
    bool clean = true;
    for (std::size_t v = 0; v < closure.size() && clean; ++v) {
      int k = md.class_of_node[v];
      if (closure[v] && k >= 0 && k != static_cast<int>(c)) clean = false;
    }
    if (clean) out.push_back(static_cast<int>(c));
  }
  return out;
}

double basin_coverage(const BoxGraph& g, const BoxSet& target) {
  if (g.node_count() == 0) return 0;
  std::vector<std::vector<int>> rev(g.node_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    auto [b, e] = g.out(static_cast<int>(v));
    for (auto it = b; it != e; ++it) rev[*it].push_back(static_cast<int>(v));
  }
  std::vector<std::uint8_t> seen(g.node_count(), 0);
  std::deque<int> q;
  for (int s : nodes_of(g, target))
    if (!seen[s]) {
      seen[s] = 1;
      q.push_back(s);
    }
  std::size_t hit = q.size();
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int u : rev[v])
      if (!seen[u]) {
        seen[u] = 1;
        ++hit;
        q.push_back(u);
      }
  }
  return static_cast<double>(hit) / static_cast<double>(g.node_count());
}

nlohmann::json summary_json(const BoxGraph& g, const MorseDecomposition& md) {
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t c = 0; c < md.classes.size(); ++c) {
    BoxSet s{g.grid, md.classes[c]};
    Box3 h = set_hull(s);
    std::vector<int> after;
    for (std::size_t d = 0; d < md.classes.size(); ++d)
      if (md.precedes(static_cast<int>(c), static_cast<int>(d))) after.push_back(static_cast<int>(d));
    classes.push_back({{"id", c},
                       {"boxes", s.size()},
                       {"hull", {{h.lo.x, h.lo.y, h.lo.z}, {h.hi.x, h.hi.y, h.hi.z}}},
                       {"diameter", set_diameter(s)},
                       {"precedes", after},
                       {"set", to_json(s)}});
  }
  return {{"resolution", {g.grid.n[0], g.grid.n[1], g.grid.n[2]}},
          {"epsilon", g.epsilon},
          {"nodes", g.node_count()},
          {"edges", g.edge_count()},
          {"scc_count", md.scc_count},
          {"classes", classes}};
}

}  // namespace phmp
