#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "mst/errors.hpp"
#include "mst/maxflow.hpp"

namespace mst {

void write_dimacs(const FlowNetwork& net, std::ostream& out) {
  const std::size_t n = net.node_count();
  const std::size_t s = n + 1;
  const std::size_t t = n + 2;
  std::size_t arcs = 0;
  for (std::size_t i = 0; i < n; ++i) arcs += (net.cap_source(i) > 0.0) + (net.cap_sink(i) > 0.0);
  for (const auto& e : net.edges()) arcs += (e.cap_uv > 0.0) + (e.cap_vu > 0.0);

  out.precision(17);
  out << "p max " << n + 2 << ' ' << arcs << '\n';
  out << "n " << s << " s\n";
  out << "n " << t << " t\n";
  for (std::size_t i = 0; i < n; ++i) {
    if (net.cap_source(i) > 0.0) out << "a " << s << ' ' << i + 1 << ' ' << net.cap_source(i) << '\n';
    if (net.cap_sink(i) > 0.0) out << "a " << i + 1 << ' ' << t << ' ' << net.cap_sink(i) << '\n';
  }
  for (const auto& e : net.edges()) {
    if (e.cap_uv > 0.0) out << "a " << e.u + 1 << ' ' << e.v + 1 << ' ' << e.cap_uv << '\n';
    if (e.cap_vu > 0.0) out << "a " << e.v + 1 << ' ' << e.u + 1 << ' ' << e.cap_vu << '\n';
  }
}

FlowNetwork read_dimacs(std::istream& in) {
  std::size_t total = 0;
  std::size_t source = 0;
  std::size_t sink = 0;
  bool have_problem = false;
  struct RawArc {
    std::size_t u, v;
    double cap;
  };
  std::vector<RawArc> raw;

  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) -> FormatError {
    return FormatError("DIMACS line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    char tag = 0;
    ls >> tag;
    if (tag == 'p') {
      std::string kind;
      std::size_t arcs = 0;
      if (!(ls >> kind >> total >> arcs) || kind != "max") throw fail("expected 'p max N M'");
      have_problem = true;
    } else if (tag == 'n') {
      std::size_t id = 0;
      std::string role;
      if (!(ls >> id >> role)) throw fail("expected 'n id s|t'");
      if (role == "s") {
        source = id;
      } else if (role == "t") {
        sink = id;
      } else {
        throw fail("node role must be s or t");
      }
    } else if (tag == 'a') {
      RawArc a{};
      if (!(ls >> a.u >> a.v >> a.cap)) throw fail("expected 'a u v cap'");
      raw.push_back(a);
    } else {
      throw fail("unknown line type");
    }
  }
  if (!have_problem) throw FormatError("DIMACS: missing problem line");
  if (source == 0 || sink == 0 || source == sink) throw FormatError("DIMACS: need distinct s and t nodes");
  if (source > total || sink > total) throw FormatError("DIMACS: terminal id out of range");

  // Map the non-terminal DIMACS ids 1..N onto 0..N-3 in order.
  std::map<std::size_t, std::size_t> index;
  for (std::size_t id = 1; id <= total; ++id) {
    if (id != source && id != sink) index.emplace(id, index.size());
  }
  FlowNetwork net(index.size());
  for (const auto& a : raw) {
    if (a.u == 0 || a.v == 0 || a.u > total || a.v > total) throw FormatError("DIMACS: arc endpoint out of range");
    if (a.v == source || a.u == sink || a.u == a.v) continue;
    if (a.u == source && a.v == sink) {
      const std::size_t extra = net.add_nodes(1);
      net.add_terminal(extra, a.cap, a.cap);
    } else if (a.u == source) {
      net.add_terminal(index.at(a.v), a.cap, 0.0);
    } else if (a.v == sink) {
      net.add_terminal(index.at(a.u), 0.0, a.cap);
    } else {
      net.add_edge(index.at(a.u), index.at(a.v), a.cap, 0.0);
    }
  }
  return net;
}

}  // namespace mst
