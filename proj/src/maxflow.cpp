#include "mst/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <string>

#include "mst/errors.hpp"

namespace mst {
namespace {

void check_capacity(double cap, const char* what) {
  if (!std::isfinite(cap) || cap < 0.0) {
    throw ArgumentError(std::string("flow network: ") + what + " capacity must be finite and >= 0, got " +
                        std::to_string(cap));
  }
}

std::size_t augmentation_bound(const FlowNetwork& net) {
  return std::max<std::size_t>(1, net.node_count()) * std::max<std::size_t>(1, net.edge_count()) * 64;
}

// Boykov-Kolmogorov augmenting paths: source and sink search trees are
// grown, reused after each augmentation, and repaired by orphan adoption.
class BkSolver {
 public:
  explicit BkSolver(const FlowNetwork& net) : nodes_(net.node_count()), limit_(augmentation_bound(net)) {
    arcs_.reserve(2 * net.edge_count());
    for (std::size_t i = 0; i < net.node_count(); ++i) {
      nodes_[i].tr_cap = net.cap_source(i) - net.cap_sink(i);
      flow_ += std::min(net.cap_source(i), net.cap_sink(i));
    }
    for (const auto& e : net.edges()) {
      if (e.u == e.v) continue;
      add_arc(static_cast<int>(e.u), static_cast<int>(e.v), e.cap_uv);
      add_arc(static_cast<int>(e.v), static_cast<int>(e.u), e.cap_vu);
    }
  }

  double run() {
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.tr_cap != 0.0) {
        n.is_sink = n.tr_cap < 0.0;
        n.parent = kTerminal;
        n.dist = 1;
        set_active(i);
      }
    }

    int current = kNone;
    while (true) {
      int i = kNone;
      if (current != kNone) {
        node(current).queued = false;
        if (node(current).parent != kNone) i = current;
      }
      if (i == kNone) {
        i = next_active();
        if (i == kNone) break;
      }

      const int middle = grow(i);
      ++time_;
      if (middle == kNone) {
        current = kNone;
        continue;
      }
      // Keep i marked active so it is resumed before the queue.
      node(i).queued = true;
      current = i;
      if (++augmentations_ > limit_) throw Error("max-flow: augmentation safety bound exceeded");
      augment(middle);
      adopt();
    }
    return flow_;
  }

  // Residual BFS from the source.
  std::vector<Side> source_reachable() const {
    std::vector<Side> side(nodes_.size(), Side::kSink);
    std::queue<int> q;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].tr_cap > 0.0) {
        side[i] = Side::kSource;
        q.push(static_cast<int>(i));
      }
    }
    while (!q.empty()) {
      const int i = q.front();
      q.pop();
      for (int a = nodes_[static_cast<std::size_t>(i)].first; a != kNone; a = arcs_[static_cast<std::size_t>(a)].next) {
        const Arc& arc = arcs_[static_cast<std::size_t>(a)];
        if (arc.r_cap > 0.0 && side[static_cast<std::size_t>(arc.head)] == Side::kSink) {
          side[static_cast<std::size_t>(arc.head)] = Side::kSource;
          q.push(arc.head);
        }
      }
    }
    return side;
  }

 private:
  static constexpr int kNone = -1;
  static constexpr int kTerminal = -2;
  static constexpr int kOrphan = -3;
  static constexpr int kInfiniteDist = std::numeric_limits<int>::max();

  struct Node {
    int first = kNone;   // first outgoing arc
    int parent = kNone;  // arc towards the parent, or kTerminal / kOrphan
    bool is_sink = false;
    bool queued = false;
    long long ts = 0;
    int dist = 0;
    double tr_cap = 0.0;  // > 0: residual from source, < 0: residual to sink
  };

  struct Arc {
    int head;
    int next;
    double r_cap;
  };

  Node& node(int i) { return nodes_[static_cast<std::size_t>(i)]; }
  Arc& arc(int a) { return arcs_[static_cast<std::size_t>(a)]; }
  static int sister(int a) { return a ^ 1; }

  void add_arc(int from, int to, double cap) {
    const int idx = static_cast<int>(arcs_.size());
    arcs_.push_back({to, node(from).first, cap});
    node(from).first = idx;
  }

  void set_active(int i) {
    if (!node(i).queued) {
      node(i).queued = true;
      active_.push_back(i);
    }
  }

  int next_active() {
    while (!active_.empty()) {
      const int i = active_.front();
      active_.pop_front();
      node(i).queued = false;
      if (node(i).parent != kNone) return i;
    }
    return kNone;
  }

  // Expands i's tree by one layer. Returns an arc from the source tree into
  // the sink tree if the trees touch.
  int grow(int i) {
    Node& ni = node(i);
    for (int a = ni.first; a != kNone; a = arc(a).next) {
      const double cap = ni.is_sink ? arc(sister(a)).r_cap : arc(a).r_cap;
      if (cap <= 0.0) continue;
      const int j = arc(a).head;
      Node& nj = node(j);
      if (nj.parent == kNone) {
        nj.is_sink = ni.is_sink;
        nj.parent = sister(a);
        nj.ts = ni.ts;
        nj.dist = ni.dist + 1;
        set_active(j);
      } else if (nj.is_sink != ni.is_sink) {
        return ni.is_sink ? sister(a) : a;
      } else if (nj.ts <= ni.ts && nj.dist > ni.dist) {
        nj.parent = sister(a);
        nj.ts = ni.ts;
        nj.dist = ni.dist + 1;
      }
    }
    return kNone;
  }

  void make_orphan_front(int i) {
    node(i).parent = kOrphan;
    orphans_.push_front(i);
  }
  void make_orphan_back(int i) {
    node(i).parent = kOrphan;
    orphans_.push_back(i);
  }

  void augment(int middle) {
    double bottleneck = arc(middle).r_cap;
    int i = arc(sister(middle)).head;
    for (int a; (a = node(i).parent) != kTerminal; i = arc(a).head) {
      bottleneck = std::min(bottleneck, arc(sister(a)).r_cap);
    }
    bottleneck = std::min(bottleneck, node(i).tr_cap);
    i = arc(middle).head;
    for (int a; (a = node(i).parent) != kTerminal; i = arc(a).head) {
      bottleneck = std::min(bottleneck, arc(a).r_cap);
    }
    bottleneck = std::min(bottleneck, -node(i).tr_cap);

    arc(sister(middle)).r_cap += bottleneck;
    arc(middle).r_cap -= bottleneck;

    i = arc(sister(middle)).head;
    for (int a; (a = node(i).parent) != kTerminal;) {
      arc(a).r_cap += bottleneck;
      arc(sister(a)).r_cap -= bottleneck;
      const int next = arc(a).head;
      if (arc(sister(a)).r_cap <= 0.0) make_orphan_front(i);
      i = next;
    }
    node(i).tr_cap -= bottleneck;
    if (node(i).tr_cap <= 0.0) make_orphan_front(i);

    i = arc(middle).head;
    for (int a; (a = node(i).parent) != kTerminal;) {
      arc(sister(a)).r_cap += bottleneck;
      arc(a).r_cap -= bottleneck;
      const int next = arc(a).head;
      if (arc(a).r_cap <= 0.0) make_orphan_back(i);
      i = next;
    }
    node(i).tr_cap += bottleneck;
    if (node(i).tr_cap >= 0.0) make_orphan_back(i);

    flow_ += bottleneck;
  }

  void adopt() {
    while (!orphans_.empty()) {
      const int i = orphans_.front();
      orphans_.pop_front();
      process_orphan(i);
    }
  }

  // Distance from j to its tree's terminal, or kInfiniteDist if the path
  // runs into an orphan. Marks visited path nodes with the current time.
  int origin_distance(int j) {
    int d = 0;
    int walk = j;
    while (true) {
      Node& nw = node(walk);
      if (nw.ts == time_) {
        d += nw.dist;
        break;
      }
      const int a = nw.parent;
      ++d;
      if (a == kTerminal) {
        nw.ts = time_;
        nw.dist = 1;
        break;
      }
      if (a == kOrphan) return kInfiniteDist;
      walk = arc(a).head;
    }
    int dd = d;
    for (walk = j; node(walk).ts != time_; walk = arc(node(walk).parent).head) {
      node(walk).ts = time_;
      node(walk).dist = dd--;
    }
    return d;
  }

  void process_orphan(int i) {
    const bool sink_tree = node(i).is_sink;
    int best_arc = kNone;
    int best_dist = kInfiniteDist;

    for (int a0 = node(i).first; a0 != kNone; a0 = arc(a0).next) {
      // Residual capacity from the candidate parent towards i (source tree)
      // or from i towards the candidate parent (sink tree).
      const double cap = sink_tree ? arc(a0).r_cap : arc(sister(a0)).r_cap;
      if (cap <= 0.0) continue;
      const int j = arc(a0).head;
      if (node(j).is_sink != sink_tree || node(j).parent == kNone) continue;
      const int d = origin_distance(j);
      if (d < best_dist) {
        best_dist = d;
        best_arc = a0;
      }
    }

    if (best_arc != kNone) {
      node(i).parent = best_arc;
      node(i).ts = time_;
      node(i).dist = best_dist + 1;
      return;
    }

    node(i).parent = kNone;
    for (int a0 = node(i).first; a0 != kNone; a0 = arc(a0).next) {
      const int j = arc(a0).head;
      Node& nj = node(j);
      if (nj.is_sink != sink_tree || nj.parent == kNone) continue;
      const double cap = sink_tree ? arc(a0).r_cap : arc(sister(a0)).r_cap;
      if (cap > 0.0) set_active(j);
      if (nj.parent != kTerminal && nj.parent != kOrphan && arc(nj.parent).head == i) make_orphan_back(j);
    }
  }

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::deque<int> active_;
  std::deque<int> orphans_;
  long long time_ = 0;
  double flow_ = 0.0;
  std::size_t augmentations_ = 0;
  std::size_t limit_;
};

// Shortest augmenting paths on an explicit graph with terminal nodes.
CutResult edmonds_karp(const FlowNetwork& net) {
  const std::size_t n = net.node_count();
  const std::size_t s = n;
  const std::size_t t = n + 1;
  struct Arc {
    std::size_t head;
    double r_cap;
  };
  std::vector<Arc> arcs;
  std::vector<std::vector<std::size_t>> adj(n + 2);
  auto add = [&](std::size_t u, std::size_t v, double cuv, double cvu) {
    adj[u].push_back(arcs.size());
    arcs.push_back({v, cuv});
    adj[v].push_back(arcs.size());
    arcs.push_back({u, cvu});
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (net.cap_source(i) > 0.0) add(s, i, net.cap_source(i), 0.0);
    if (net.cap_sink(i) > 0.0) add(i, t, net.cap_sink(i), 0.0);
  }
  for (const auto& e : net.edges()) {
    if (e.u != e.v) add(e.u, e.v, e.cap_uv, e.cap_vu);
  }

  constexpr std::size_t kUnseen = std::numeric_limits<std::size_t>::max();
  const std::size_t limit = augmentation_bound(net);
  double flow = 0.0;
  std::vector<std::size_t> via(n + 2);
  for (std::size_t round = 0;; ++round) {
    if (round > limit) throw Error("max-flow: augmentation safety bound exceeded");
    std::fill(via.begin(), via.end(), kUnseen);
    via[s] = kUnseen - 1;
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty() && via[t] == kUnseen) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t a : adj[u]) {
        if (arcs[a].r_cap > 0.0 && via[arcs[a].head] == kUnseen) {
          via[arcs[a].head] = a;
          q.push(arcs[a].head);
        }
      }
    }
    if (via[t] == kUnseen) break;
    double push = std::numeric_limits<double>::infinity();
    for (std::size_t v = t; v != s; v = arcs[via[v] ^ 1].head) push = std::min(push, arcs[via[v]].r_cap);
    for (std::size_t v = t; v != s; v = arcs[via[v] ^ 1].head) {
      arcs[via[v]].r_cap -= push;
      arcs[via[v] ^ 1].r_cap += push;
    }
    flow += push;
  }

  CutResult result;
  result.max_flow = flow;
  result.side.assign(n, Side::kSink);
  for (std::size_t i = 0; i < n; ++i) {
    if (via[i] != kUnseen) result.side[i] = Side::kSource;
  }
  return result;
}

}  // namespace

FlowNetwork::FlowNetwork(std::size_t node_count) : cap_source_(node_count, 0.0), cap_sink_(node_count, 0.0) {}

std::size_t FlowNetwork::add_nodes(std::size_t count) {
  const std::size_t first = cap_source_.size();
  cap_source_.resize(first + count, 0.0);
  cap_sink_.resize(first + count, 0.0);
  return first;
}

void FlowNetwork::add_terminal(std::size_t node, double cap_source, double cap_sink) {
  if (node >= node_count()) throw ArgumentError("flow network: node " + std::to_string(node) + " out of range");
  check_capacity(cap_source, "source");
  check_capacity(cap_sink, "sink");
  cap_source_[node] += cap_source;
  cap_sink_[node] += cap_sink;
}

void FlowNetwork::add_edge(std::size_t u, std::size_t v, double cap_uv, double cap_vu) {
  if (u >= node_count() || v >= node_count()) {
    throw ArgumentError("flow network: edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
  }
  check_capacity(cap_uv, "edge");
  check_capacity(cap_vu, "edge");
  edges_.push_back({u, v, cap_uv, cap_vu});
}

CutResult solve_maxflow(const FlowNetwork& net, MaxFlowAlgorithm algorithm) {
  if (algorithm == MaxFlowAlgorithm::kEdmondsKarp) return edmonds_karp(net);
  BkSolver solver(net);
  CutResult result;
  result.max_flow = solver.run();
  result.side = solver.source_reachable();
  return result;
}

double cut_capacity(const FlowNetwork& net, const std::vector<Side>& side) {
  double total = 0.0;
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    total += side[i] == Side::kSource ? net.cap_sink(i) : net.cap_source(i);
  }
  for (const auto& e : net.edges()) {
    if (side[e.u] == Side::kSource && side[e.v] == Side::kSink) total += e.cap_uv;
    if (side[e.v] == Side::kSource && side[e.u] == Side::kSink) total += e.cap_vu;
  }
  return total;
}

}  // namespace mst
