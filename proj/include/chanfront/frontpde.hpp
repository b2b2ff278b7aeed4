#pragma once

#include <functional>
#include <string>
#include <vector>

#include "chanfront/graph.hpp"
#include "chanfront/parallel.hpp"

namespace chanfront {

// Finite-volume grid on the metric graph: one shared node per vertex plus
// uniform interior nodes per edge. Fluxes are conservative in the speed
// measure (node mass = integral of 2 l dx over the control volume), which
// makes the width-weighted vertex gluing a plain flux balance and conserves
// total mass exactly for the pure diffusion.
struct GraphGrid {
    struct Node {
        int edge = -1;        // -1 for vertex nodes
        double x_local = 0.0; // edge-local position (interior nodes)
        double gx = 0.0;      // projected global x
        double mass = 0.0;    // control-volume speed measure
        bool on_spine = false;
    };
    std::vector<Node> nodes;
    struct Neighbor {
        int node;
        double cond; // face conductance l_face / dx_edge
    };
    std::vector<std::vector<Neighbor>> adj;
    std::vector<int> spine_sorted; // spine-node indices ordered by gx
    double dx = 0.0;
    double max_rate = 0.0; // max over nodes of sum(cond)/mass

    int vertex_node(int vertex_id) const { return vertex_node_[vertex_id]; }
    std::vector<int> vertex_node_;

    // Linear interpolation of a state along an edge.
    double interp(const std::vector<double>& u, int edge, double x_local) const;
    std::vector<std::vector<int>> edge_nodes; // node chain along each edge (incl. vertex nodes)
};

GraphGrid build_grid(const MetricGraph& graph, double dx, int min_interior = 8);

struct PdeSolution {
    const MetricGraph* graph = nullptr;
    GraphGrid grid;
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    double dt = 0.0;
};

// Explicit conservative solve of u_t = (1/2l)(l u_x)_x + f(u) on the graph,
// zero-flux at exterior vertices, initial data g(x) of the projected
// coordinate. Snapshots every snap_every time units (plus the final time).
PdeSolution solve(const MetricGraph& graph, const std::function<double(double)>& g,
                  const std::function<double(double)>& f, double T, double dx,
                  double snap_every, double cfl = 0.5, par::Exec exec = par::Exec::parallel);

struct FrontTrace {
    std::vector<double> t, x_right, x_left;
    double speed_right = 0.0, speed_left = 0.0;
    double r2_right = 0.0, r2_left = 0.0;
    bool monotone = true; // over the fit window
};

// Level-crossing front positions on the spine and least-squares speeds over
// the trailing fit window [fit_start_frac * T, T].
FrontTrace track(const PdeSolution& sol, double level = 0.5, double fit_start_frac = 0.5,
                 double boundary_margin = 5.0);

// Value of a solved state at a spine coordinate.
double spine_value(const PdeSolution& sol, const std::vector<double>& state, double x);

void write_snapshots_csv(const PdeSolution& sol, const std::string& path);
void write_trace_csv(const FrontTrace& tr, const std::string& path);

} // namespace chanfront
