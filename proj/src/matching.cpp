#include "treeweave/matching.hpp"

#include <algorithm>
#include <deque>

namespace tw {

namespace {

// Dinic on the unit-capacity-right / demand-capacity-left network.
struct FlowNet {
  struct Arc {
    int to, rev, cap;
  };
  std::vector<std::vector<Arc>> g;
  std::vector<int> level, iter;

  explicit FlowNet(int n) : g(n), level(n), iter(n) {}

  void add(int a, int b, int cap) {
    g[a].push_back({b, static_cast<int>(g[b].size()), cap});
    g[b].push_back({a, static_cast<int>(g[a].size()) - 1, 0});
  }

  bool bfs(int s, int t) {
    std::fill(level.begin(), level.end(), -1);
    std::deque<int> q{s};
    level[s] = 0;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (const Arc& a : g[v]) {
        if (a.cap > 0 && level[a.to] < 0) {
          level[a.to] = level[v] + 1;
          q.push_back(a.to);
        }
      }
    }
    return level[t] >= 0;
  }

  int dfs(int v, int t, int f) {
    if (v == t) return f;
    for (int& i = iter[v]; i < static_cast<int>(g[v].size()); ++i) {
      Arc& a = g[v][i];
      if (a.cap > 0 && level[v] < level[a.to]) {
        int d = dfs(a.to, t, std::min(f, a.cap));
        if (d > 0) {
          a.cap -= d;
          g[a.to][a.rev].cap += d;
          return d;
        }
      }
    }
    return 0;
  }

  int max_flow(int s, int t) {
    int flow = 0;
    while (bfs(s, t)) {
      std::fill(iter.begin(), iter.end(), 0);
      int f;
      while ((f = dfs(s, t, 1 << 30)) > 0) flow += f;
    }
    return flow;
  }
};

}  // namespace

GenMatchResult generalized_matching(int n_right,
                                    const std::vector<std::vector<int>>& candidates,
                                    const std::vector<int>& demand) {
  int n_left = static_cast<int>(candidates.size());
  long long want = 0;
  for (int d : demand) want += d;

  int s = 0;
  int left0 = 1;
  int right0 = left0 + n_left;
  int t = right0 + n_right;
  FlowNet net(t + 1);
  for (int i = 0; i < n_left; ++i) net.add(s, left0 + i, demand[i]);
  for (int i = 0; i < n_left; ++i) {
    for (int r : candidates[i]) net.add(left0 + i, right0 + r, 1);
  }
  for (int r = 0; r < n_right; ++r) net.add(right0 + r, t, 1);

  long long got = net.max_flow(s, t);
  GenMatchResult res;
  if (got == want) {
    res.ok = true;
    res.assignment.assign(n_left, {});
    for (int i = 0; i < n_left; ++i) {
      for (const auto& a : net.g[left0 + i]) {
        if (a.to >= right0 && a.to < t && a.cap == 0) {
          res.assignment[i].push_back(a.to - right0);
        }
      }
    }
    return res;
  }
  // Min-cut side reachable from s gives a Hall violator among the lefts.
  net.bfs(s, t);
  for (int i = 0; i < n_left; ++i) {
    if (net.level[left0 + i] >= 0) res.deficient.push_back(i);
  }
  return res;
}

}  // namespace tw
