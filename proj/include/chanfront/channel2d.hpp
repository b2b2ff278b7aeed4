#pragma once

#include <functional>
#include <string>
#include <vector>

#include "chanfront/frontpde.hpp"
#include "chanfront/graph.hpp"

namespace chanfront {

// Cell-centered masked grid over the union of axis-aligned rectangles of a
// rectangular-mode shape: spine bands [0, w(x)] plus wing bands stacked on
// the narrower side of each junction, separated from the spine by an
// internal zero-flux wall. Widths and lengths must sit on the rect_quantum
// lattice; dz must divide that quantum so walls land on faces.
struct RectDomain {
    double dx = 0.0, dz = 0.0;
    int nx = 0, nz = 0;
    double x0 = 0.0; // left face of column 0; z = 0 is the bottom face
    std::vector<std::uint8_t> inside;  // nx*nz cell mask
    std::vector<int> edge_id;          // graph edge per cell (-1 outside)
    std::vector<std::uint8_t> wall_up; // zero-flux face between (i,k) and (i,k+1)

    int idx(int i, int k) const { return k * nx + i; }
    double xc(int i) const { return x0 + (i + 0.5) * dx; }
    double zc(int k) const { return (k + 0.5) * dz; }
    int n_inside = 0;
};

RectDomain build_rect_domain(const MetricGraph& graph, const ChannelShape& shape,
                             double window_lo, double window_hi, double dx, double dz);

struct EpsSolution {
    RectDomain dom;
    double eps = 1.0;
    std::vector<double> times;
    std::vector<std::vector<double>> states; // per time, nx*nz (garbage outside mask)
    double dt = 0.0;
};

// Explicit solve of u_t = 1/2 u_xx + 1/(2 eps^2) u_zz + V u_x + f(u) with
// reflecting boundaries on all faces. V may be empty (zero velocity field).
EpsSolution solve_2d(const MetricGraph& graph, const ChannelShape& shape, double eps,
                     const std::function<double(double, double)>& V,
                     const std::function<double(double)>& g,
                     const std::function<double(double)>& f, double T, double window_lo,
                     double window_hi, double dx, double dz, double snap_every,
                     par::Exec exec = par::Exec::parallel);

struct GraphComparison {
    std::vector<double> times;
    std::vector<double> sup_err; // per snapshot
    double overall = 0.0;
};

// Sup over cells and times of |u_eps - u_graph(identified point)|; the two
// solutions must share snapshot times.
GraphComparison compare_graph(const EpsSolution& eps_sol, const PdeSolution& graph_sol);

// Largest within-cross-section spread max_z1,z2 |u(x,z1) - u(x,z2)| over a
// snapshot (per connected component of the cross-section).
double cross_section_oscillation(const EpsSolution& sol, std::size_t snap_index);

// Max over snapshots and x of the discrete d/dx of the cross-section average.
double mean_profile_gradient(const EpsSolution& sol);

void write_eps_snapshots_csv(const EpsSolution& sol, const std::string& path);
void write_mean_profile_csv(const EpsSolution& sol, const std::string& path);
void write_comparison_csv(const std::vector<double>& eps, const std::vector<GraphComparison>& cmp,
                          const std::string& path);

} // namespace chanfront
