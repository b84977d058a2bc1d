#ifndef CHIPLETPLACE_ROUTER_HPP
#define CHIPLETPLACE_ROUTER_HPP

// Wirelength estimation by routing every net over the microbump grid.
// Each net is routed as a min-cost flow of `wires` units between its
// chiplet terminals via successive shortest paths with potentials; nets
// are processed in descending wire count (name tiebreak) and consume
// shared edge capacity. Terminal attachment arcs carry the Manhattan
// distance from the chiplet center to the bump site, so an uncongested
// two-pin net routes at exactly center-to-center Manhattan length and the
// HPWL proxy is a true lower bound.

#include "chipletplace/model.hpp"

#include <map>
#include <string>
#include <vector>

namespace chiplet {

struct RoutingGraph {
  struct Edge {
    int a = 0, b = 0;
    double length = 0.0; // mm
    int capacity = 0;    // wires
  };

  double pitch = 0.0;
  int sites_x = 0, sites_y = 0; // bump sites per axis; terminals follow
  std::vector<std::pair<double, double>> node_pos; // mm
  std::vector<Edge> edges;
  std::map<std::string, int, std::less<>> terminals; // chiplet -> node

  int num_nodes() const { return static_cast<int>(node_pos.size()); }
  int site_node(int ix, int iy) const { return iy * sites_x + ix; }
  int add_node(double x, double y) {
    node_pos.emplace_back(x, y);
    return num_nodes() - 1;
  }
  void add_edge(int a, int b, double length, int capacity) {
    edges.push_back({a, b, length, capacity});
  }
};

// Effectively unlimited capacity for terminal attachment arcs.
inline constexpr int kUnlimitedCapacity = 1 << 28;

// Builds the bump-site grid over the interposer and attaches a virtual
// terminal per chiplet to every site under its footprint. Throws
// ValidationError when a footprint covers no site.
RoutingGraph build_routing_graph(const ArchitectureSpec& spec, const Placement& p,
                                 double pitch, int capacity);

struct RouteSegment {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0; // mm, directed
  int wires = 0;
};

struct NetRoute {
  std::string src, dst;
  int wires = 0;
  int wires_routed = 0;
  double length = 0.0; // mm, sum of flow * edge length
  std::vector<RouteSegment> segments;
};

struct RouteResult {
  std::vector<NetRoute> nets;
  double total_wirelength = 0.0; // mm
  bool feasible = true;
};

// Deterministic sequential min-cost-flow routing of all nets. Nets that
// cannot be fully routed set feasible = false and report partial lengths.
RouteResult route_nets(const RoutingGraph& g, const std::vector<Net>& nets);

// Lower-bound proxy used during inner annealing iterations:
// sum over nets of wires * Manhattan center distance.
double hpwl_estimate(const Placement& p, const std::vector<Net>& nets);

} // namespace chiplet

#endif
