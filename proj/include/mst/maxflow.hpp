#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mst {

/// Two-terminal capacitated network. Nodes carry a source and a sink
/// capacity; edges are stored in pairs (u->v, v->u).
class FlowNetwork {
 public:
  struct Edge {
    std::size_t u;
    std::size_t v;
    double cap_uv;
    double cap_vu;
  };

  explicit FlowNetwork(std::size_t node_count = 0);

  /// Appends `count` nodes and returns the index of the first one.
  std::size_t add_nodes(std::size_t count);

  /// Adds to the node's terminal capacities. Throws ArgumentError on a
  /// negative or non-finite capacity or an out-of-range node.
  void add_terminal(std::size_t node, double cap_source, double cap_sink);

  void add_edge(std::size_t u, std::size_t v, double cap_uv, double cap_vu);

  std::size_t node_count() const { return cap_source_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  double cap_source(std::size_t node) const { return cap_source_[node]; }
  double cap_sink(std::size_t node) const { return cap_sink_[node]; }
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  std::vector<double> cap_source_;
  std::vector<double> cap_sink_;
  std::vector<Edge> edges_;
};

enum class Side : std::uint8_t { kSource, kSink };

struct CutResult {
  double max_flow = 0.0;
  std::vector<Side> side;
};

enum class MaxFlowAlgorithm {
  kBoykovKolmogorov,
  kEdmondsKarp,  // reference implementation, used as an oracle
};

/// Maximum flow and the minimum cut induced by source reachability in the
/// final residual graph (unreached nodes are on the sink side).
CutResult solve_maxflow(const FlowNetwork& net, MaxFlowAlgorithm algorithm = MaxFlowAlgorithm::kBoykovKolmogorov);

/// Total capacity of edges from source-side to sink-side nodes, including
/// terminal links, for an arbitrary side assignment.
double cut_capacity(const FlowNetwork& net, const std::vector<Side>& side);

/// DIMACS max-flow text ("p max N M", "n id s|t", "a u v cap").
/// Terminals are written as nodes N+1 (s) and N+2 (t).
void write_dimacs(const FlowNetwork& net, std::ostream& out);

/// Reads a DIMACS max-flow problem. Arcs into the source or out of the sink
/// cannot carry flow and are dropped; a direct s->t arc becomes an extra
/// node linked to both terminals. Throws FormatError.
FlowNetwork read_dimacs(std::istream& in);

}  // namespace mst
