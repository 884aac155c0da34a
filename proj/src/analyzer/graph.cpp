#include <algorithm>

#include "errml/analyzer.hpp"

namespace errml::analyze {

namespace {

std::vector<std::vector<std::size_t>> successors(const Ctmc& ctmc) {
  std::vector<std::vector<std::size_t>> out(ctmc.num_states);
  for (const auto& t : ctmc.transitions) out[t.source].push_back(t.destination);
  return out;
}

}  // namespace

// Iterative Tarjan.
std::vector<std::vector<std::size_t>> strongly_connected_components(const Ctmc& ctmc) {
  const std::size_t n = ctmc.num_states;
  const std::size_t none = static_cast<std::size_t>(-1);
  auto succ = successors(ctmc);
  std::vector<std::size_t> index(n, none), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> sccs;
  std::size_t counter = 0;

  struct Frame {
    std::size_t node;
    std::size_t edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != none) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < succ[f.node].size()) {
        std::size_t w = succ[f.node][f.edge++];
        if (index[w] == none) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      std::size_t v = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> scc;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          scc.push_back(w);
        } while (w != v);
        std::sort(scc.begin(), scc.end());
        sccs.push_back(std::move(scc));
      }
    }
  }
  return sccs;
}

std::vector<std::vector<std::size_t>> bottom_components(const Ctmc& ctmc) {
  auto sccs = strongly_connected_components(ctmc);
  std::vector<std::size_t> owner(ctmc.num_states);
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    for (auto s : sccs[c]) owner[s] = c;
  }
  std::vector<bool> leaves(sccs.size(), false);
  for (const auto& t : ctmc.transitions) {
    if (owner[t.source] != owner[t.destination]) leaves[owner[t.source]] = true;
  }
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    if (!leaves[c]) out.push_back(sccs[c]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<bool> reachable_from(const Ctmc& ctmc, std::size_t start) {
  auto succ = successors(ctmc);
  std::vector<bool> seen(ctmc.num_states, false);
  if (start >= ctmc.num_states) return seen;
  std::vector<std::size_t> todo{start};
  seen[start] = true;
  while (!todo.empty()) {
    auto v = todo.back();
    todo.pop_back();
    for (auto w : succ[v]) {
      if (!seen[w]) {
        seen[w] = true;
        todo.push_back(w);
      }
    }
  }
  return seen;
}

std::vector<bool> can_reach(const Ctmc& ctmc, const std::vector<bool>& targets) {
  std::vector<std::vector<std::size_t>> pred(ctmc.num_states);
  for (const auto& t : ctmc.transitions) pred[t.destination].push_back(t.source);
  std::vector<bool> seen(targets);
  seen.resize(ctmc.num_states, false);
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < ctmc.num_states; ++i) {
    if (seen[i]) todo.push_back(i);
  }
  while (!todo.empty()) {
    auto v = todo.back();
    todo.pop_back();
    for (auto w : pred[v]) {
      if (!seen[w]) {
        seen[w] = true;
        todo.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace errml::analyze
