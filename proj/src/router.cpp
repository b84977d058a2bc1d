#include "chipletplace/router.hpp"

#include "chipletplace/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace chiplet {

RoutingGraph build_routing_graph(const ArchitectureSpec& spec, const Placement& p,
                                 double pitch, int capacity) {
  if (!(pitch > 0.0)) throw ValidationError("routing pitch must be > 0");
  if (capacity < 1) throw ValidationError("routing capacity must be >= 1");
  FeasibilityVerdict verdict = validate_placement(p, spec);
  if (!verdict.ok())
    throw ValidationError("routing requires a feasible placement: " +
                          verdict.violations.front().message);

  RoutingGraph g;
  g.pitch = pitch;
  const double W = spec.package.interposer_width;
  const double H = spec.package.interposer_height;
  const double eps = 1e-9;
  g.sites_x = static_cast<int>(std::floor(W / pitch + eps)) + 1;
  g.sites_y = static_cast<int>(std::floor(H / pitch + eps)) + 1;

  for (int iy = 0; iy < g.sites_y; ++iy)
    for (int ix = 0; ix < g.sites_x; ++ix) g.add_node(ix * pitch, iy * pitch);

  for (int iy = 0; iy < g.sites_y; ++iy) {
    for (int ix = 0; ix < g.sites_x; ++ix) {
      if (ix + 1 < g.sites_x)
        g.add_edge(g.site_node(ix, iy), g.site_node(ix + 1, iy), pitch, capacity);
      if (iy + 1 < g.sites_y)
        g.add_edge(g.site_node(ix, iy), g.site_node(ix, iy + 1), pitch, capacity);
    }
  }

  for (const ChipletSpec& c : spec.chiplets) {
    const PlacedChiplet& pc = p.entries.at(c.name);
    Rect fp = footprint(c, pc);
    int node = g.add_node(pc.x, pc.y);
    g.terminals.emplace(c.name, node);
    int attached = 0;
    int ix_lo = std::max(0, static_cast<int>(std::ceil(fp.x0 / pitch - eps)));
    int ix_hi = std::min(g.sites_x - 1, static_cast<int>(std::floor(fp.x1 / pitch + eps)));
    int iy_lo = std::max(0, static_cast<int>(std::ceil(fp.y0 / pitch - eps)));
    int iy_hi = std::min(g.sites_y - 1, static_cast<int>(std::floor(fp.y1 / pitch + eps)));
    for (int iy = iy_lo; iy <= iy_hi; ++iy) {
      for (int ix = ix_lo; ix <= ix_hi; ++ix) {
        double sx = ix * pitch, sy = iy * pitch;
        double len = std::abs(pc.x - sx) + std::abs(pc.y - sy);
        g.add_edge(node, g.site_node(ix, iy), len, kUnlimitedCapacity);
        ++attached;
      }
    }
    if (attached == 0)
      throw ValidationError("chiplet '" + c.name +
                            "' footprint covers no bump site (pitch too coarse)");
  }
  return g;
}

namespace {

// Residual arc of the min-cost-flow network. Each undirected graph edge
// becomes two forward arcs (one per direction) plus their reverse arcs.
struct Arc {
  int to = 0;
  int rev = 0; // index of the reverse arc in arcs[to]
  int cap = 0;
  double cost = 0.0;
  int edge = -1; // originating RoutingGraph edge
  int dir = 0;   // +1 a->b, -1 b->a, 0 reverse bookkeeping arc
};

class MinCostFlow {
public:
  explicit MinCostFlow(int nodes) : arcs_(nodes), potential_(nodes, 0.0) {}

  void add_directed(int from, int to, int cap, double cost, int edge, int dir) {
    arcs_[from].push_back({to, static_cast<int>(arcs_[to].size()), cap, cost, edge, dir});
    arcs_[to].push_back({from, static_cast<int>(arcs_[from].size()) - 1, 0, -cost, edge, 0});
  }

  // Pushes up to `amount` units src -> dst, returns units actually pushed
  // and accumulates per-edge directed flows into flow_ab/flow_ba.
  int run(int src, int dst, int amount, std::vector<int>& flow_ab, std::vector<int>& flow_ba) {
    int pushed = 0;
    std::fill(potential_.begin(), potential_.end(), 0.0);
    while (pushed < amount) {
      if (!dijkstra(src, dst)) break;
      for (std::size_t i = 0; i < potential_.size(); ++i)
        if (dist_[i] < kInf) potential_[i] += dist_[i];

      int bottleneck = amount - pushed;
      for (int v = dst; v != src;) {
        const auto [node, arc] = parent_[v];
        bottleneck = std::min(bottleneck, arcs_[node][arc].cap);
        v = node;
      }
      for (int v = dst; v != src;) {
        const auto [node, arc] = parent_[v];
        Arc& a = arcs_[node][arc];
        a.cap -= bottleneck;
        arcs_[a.to][a.rev].cap += bottleneck;
        if (a.edge >= 0) {
          // cancellation shows up as flow on the reverse bookkeeping arc
          if (a.dir == +1) flow_ab[a.edge] += bottleneck;
          else if (a.dir == -1) flow_ba[a.edge] += bottleneck;
          else {
            const Arc& fwd = arcs_[a.to][a.rev];
            if (fwd.dir == +1) flow_ab[a.edge] -= bottleneck;
            else if (fwd.dir == -1) flow_ba[a.edge] -= bottleneck;
          }
        }
        v = node;
      }
      pushed += bottleneck;
    }
    return pushed;
  }

private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  bool dijkstra(int src, int dst) {
    const int n = static_cast<int>(arcs_.size());
    dist_.assign(n, kInf);
    parent_.assign(n, {-1, -1});
    dist_[src] = 0.0;
    // (reduced distance, node): node index breaks ties deterministically
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, src});
    std::vector<char> done(n, 0);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (done[u]) continue;
      done[u] = 1;
      for (std::size_t i = 0; i < arcs_[u].size(); ++i) {
        const Arc& a = arcs_[u][i];
        if (a.cap <= 0) continue;
        double nd = d + a.cost + potential_[u] - potential_[a.to];
        if (nd < dist_[a.to] - 1e-15) {
          dist_[a.to] = nd;
          parent_[a.to] = {u, static_cast<int>(i)};
          heap.push({nd, a.to});
        }
      }
    }
    return dist_[dst] < kInf;
  }

  std::vector<std::vector<Arc>> arcs_;
  std::vector<double> potential_;
  std::vector<double> dist_;
  std::vector<std::pair<int, int>> parent_;
};

} // namespace

RouteResult route_nets(const RoutingGraph& g, const std::vector<Net>& nets) {
  RouteResult result;
  result.feasible = true;

  std::vector<const Net*> order;
  for (const Net& n : nets) order.push_back(&n);
  std::stable_sort(order.begin(), order.end(), [](const Net* a, const Net* b) {
    if (a->wires != b->wires) return a->wires > b->wires;
    if (a->src != b->src) return a->src < b->src;
    return a->dst < b->dst;
  });

  std::vector<int> used(g.edges.size(), 0);

  // tie-breaking bias, far below any real length difference: prefer paths
  // that stay off the grid boundary and away from attachment sites of nets
  // still waiting to route, so earlier nets do not strand later terminals
  const double eps = g.pitch > 0.0 ? g.pitch * 1e-7 : 1e-7;
  std::vector<char> on_boundary(g.num_nodes(), 0);
  for (int iy = 0; iy < g.sites_y; ++iy)
    for (int ix = 0; ix < g.sites_x; ++ix)
      if (ix == 0 || iy == 0 || ix == g.sites_x - 1 || iy == g.sites_y - 1)
        on_boundary[g.site_node(ix, iy)] = 1;
  std::vector<std::vector<char>> attach_sites(order.size(),
                                              std::vector<char>(g.num_nodes(), 0));
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto mark = [&](const std::string& name) {
      auto it = g.terminals.find(name);
      if (it == g.terminals.end()) return;
      for (const RoutingGraph::Edge& e : g.edges) {
        if (e.a == it->second) attach_sites[k][e.b] = 1;
        if (e.b == it->second) attach_sites[k][e.a] = 1;
      }
    };
    mark(order[k]->src);
    mark(order[k]->dst);
  }

  for (std::size_t net_idx = 0; net_idx < order.size(); ++net_idx) {
    const Net* net = order[net_idx];
    auto src_it = g.terminals.find(net->src);
    auto dst_it = g.terminals.find(net->dst);
    if (src_it == g.terminals.end() || dst_it == g.terminals.end())
      throw ValidationError("net endpoint not attached to the routing graph: " + net->src +
                            " -> " + net->dst);

    std::vector<char> guard(g.num_nodes(), 0);
    for (std::size_t k = net_idx + 1; k < order.size(); ++k)
      for (int v = 0; v < g.num_nodes(); ++v)
        if (attach_sites[k][v]) guard[v] = 1;

    MinCostFlow mcf(g.num_nodes());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const RoutingGraph::Edge& edge = g.edges[e];
      int avail = edge.capacity >= kUnlimitedCapacity
                      ? edge.capacity
                      : std::max(0, edge.capacity - used[e]);
      double bias = 0.0;
      if (edge.capacity < kUnlimitedCapacity) {
        if (on_boundary[edge.a] && on_boundary[edge.b]) bias += eps;
        if (guard[edge.a]) bias += eps;
        if (guard[edge.b]) bias += eps;
      }
      mcf.add_directed(edge.a, edge.b, avail, edge.length + bias, static_cast<int>(e), +1);
      mcf.add_directed(edge.b, edge.a, avail, edge.length + bias, static_cast<int>(e), -1);
    }

    std::vector<int> flow_ab(g.edges.size(), 0), flow_ba(g.edges.size(), 0);
    int pushed = mcf.run(src_it->second, dst_it->second, net->wires, flow_ab, flow_ba);

    NetRoute nr;
    nr.src = net->src;
    nr.dst = net->dst;
    nr.wires = net->wires;
    nr.wires_routed = pushed;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      int flow = flow_ab[e] - flow_ba[e];
      if (flow == 0) continue;
      const RoutingGraph::Edge& edge = g.edges[e];
      int a = edge.a, b = edge.b, w = flow;
      if (flow < 0) {
        std::swap(a, b);
        w = -flow;
      }
      nr.length += w * edge.length;
      nr.segments.push_back({g.node_pos[a].first, g.node_pos[a].second, g.node_pos[b].first,
                             g.node_pos[b].second, w});
      if (edge.capacity < kUnlimitedCapacity) used[e] += w;
    }
    if (pushed < net->wires) result.feasible = false;
    result.total_wirelength += nr.length;
    result.nets.push_back(std::move(nr));
  }
  return result;
}

double hpwl_estimate(const Placement& p, const std::vector<Net>& nets) {
  double total = 0.0;
  for (const Net& n : nets) {
    auto src = p.entries.find(n.src);
    auto dst = p.entries.find(n.dst);
    if (src == p.entries.end() || dst == p.entries.end())
      throw ValidationError("hpwl: net endpoint missing from placement: " + n.src + " -> " +
                            n.dst);
    total += n.wires * (std::abs(src->second.x - dst->second.x) +
                        std::abs(src->second.y - dst->second.y));
  }
  return total;
}

} // namespace chiplet
