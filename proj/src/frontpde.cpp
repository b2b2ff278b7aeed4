#include "chanfront/frontpde.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>

#include "chanfront/errors.hpp"

namespace chanfront {

double GraphGrid::interp(const std::vector<double>& u, int edge, double x_local) const {
    // Chain nodes sit at local positions 0, h, 2h, ..., R.
    const auto& chain = edge_nodes[edge];
    int n = static_cast<int>(chain.size());
    double h = nodes[chain[1]].x_local; // first interior node
    double t = std::clamp(x_local / h, 0.0, double(n - 1));
    int i = std::min(static_cast<int>(t), n - 2);
    double w = t - i;
    return (1.0 - w) * u[chain[i]] + w * u[chain[i + 1]];
}

GraphGrid build_grid(const MetricGraph& graph, double dx, int min_interior) {
    if (!(dx > 0)) throw domain_error("build_grid: dx must be positive");
    GraphGrid grid;
    grid.dx = dx;
    grid.vertex_node_.resize(graph.vertices.size());
    for (const auto& v : graph.vertices) {
        GraphGrid::Node n;
        n.edge = -1;
        n.gx = v.x;
        n.on_spine = v.kind != GraphVertex::Kind::tip;
        grid.vertex_node_[v.id] = static_cast<int>(grid.nodes.size());
        grid.nodes.push_back(n);
    }
    grid.adj.resize(grid.nodes.size());
    grid.edge_nodes.resize(graph.edges.size());

    for (const auto& e : graph.edges) {
        double R = e.length();
        int cells = std::max(min_interior + 1, static_cast<int>(std::ceil(R / dx)));
        double h = R / cells;
        std::vector<int> chain;
        chain.push_back(grid.vertex_node(e.v0));
        for (int i = 1; i < cells; ++i) {
            GraphGrid::Node n;
            n.edge = e.id;
            n.x_local = h * i;
            n.gx = e.global_x(n.x_local);
            n.mass = e.profile.speed_m(std::min(R, h * i + 0.5 * h)) -
                     e.profile.speed_m(std::max(0.0, h * i - 0.5 * h));
            n.on_spine = !e.is_wing;
            chain.push_back(static_cast<int>(grid.nodes.size()));
            grid.nodes.push_back(n);
            grid.adj.emplace_back();
        }
        chain.push_back(grid.vertex_node(e.v1));
        grid.edge_nodes[e.id] = chain;
        // Vertex half cells.
        grid.nodes[grid.vertex_node(e.v0)].mass += e.profile.speed_m(0.5 * h);
        grid.nodes[grid.vertex_node(e.v1)].mass +=
            e.profile.speed_m(R) - e.profile.speed_m(R - 0.5 * h);
        // Faces.
        for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
            double xm = h * (static_cast<double>(i) + 0.5);
            double cond = e.profile.width(xm) / h;
            grid.adj[chain[i]].push_back({chain[i + 1], cond});
            grid.adj[chain[i + 1]].push_back({chain[i], cond});
        }
    }
    grid.max_rate = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        double s = 0.0;
        for (const auto& nb : grid.adj[i]) s += nb.cond;
        if (grid.nodes[i].mass <= 0) throw consistency_error("build_grid: empty control volume");
        grid.max_rate = std::max(grid.max_rate, s / grid.nodes[i].mass);
    }
    for (std::size_t i = 0; i < grid.nodes.size(); ++i)
        if (grid.nodes[i].on_spine) grid.spine_sorted.push_back(static_cast<int>(i));
    std::sort(grid.spine_sorted.begin(), grid.spine_sorted.end(),
              [&](int a, int b) { return grid.nodes[a].gx < grid.nodes[b].gx; });
    return grid;
}

PdeSolution solve(const MetricGraph& graph, const std::function<double(double)>& g,
                  const std::function<double(double)>& f, double T, double dx,
                  double snap_every, double cfl, par::Exec exec) {
    PdeSolution sol;
    sol.graph = &graph;
    sol.grid = build_grid(graph, dx);
    const GraphGrid& grid = sol.grid;
    const int N = static_cast<int>(grid.nodes.size());

    double fp_scale = std::max(1.0, std::abs(f(0.5)) * 6.0); // crude reaction rate bound
    double dt = cfl / (grid.max_rate + fp_scale);
    // Snapshots must land exactly on multiples of snap_every so solutions
    // from different solvers can be compared time-slice by time-slice.
    long snap_stride = std::max<long>(1, std::lround(std::ceil(snap_every / dt)));
    dt = snap_every / snap_stride;
    long steps = snap_stride * std::max<long>(1, std::lround(std::ceil(T / snap_every - 1e-9)));
    sol.dt = dt;

    std::vector<double> u(N), un(N);
    for (int i = 0; i < N; ++i) u[i] = g(grid.nodes[i].gx);

    std::atomic<bool> out_of_range{false};
    auto record = [&](double t) {
        sol.times.push_back(t);
        sol.states.push_back(u);
    };
    record(0.0);
    auto node_update = [&](std::int64_t i) {
        double flux = 0.0;
        for (const auto& nb : grid.adj[i]) flux += nb.cond * (u[nb.node] - u[i]);
        double v = u[i] + dt * (flux / grid.nodes[i].mass + f(u[i]));
        un[i] = v;
        if (v < -1e-12 || v > 1.0 + 1e-12) out_of_range.store(true, std::memory_order_relaxed);
    };
    auto post_step = [&](long s) {
        u.swap(un);
        if (s % snap_stride == 0) record(s / snap_stride * snap_every);
        return !out_of_range.load(std::memory_order_relaxed);
    };
    bool ok = true;
    // Lockstep-per-step parallelism only pays off once the stencil work per
    // step dwarfs the team synchronization; below that, run serially.
    if (N < 16384) exec = par::Exec::serial;
#ifdef _OPENMP
    if (exec == par::Exec::parallel) {
        // One persistent team; a fork per time step costs more than the step.
#pragma omp parallel num_threads(par::max_threads())
        {
            for (long s = 1; s <= steps; ++s) {
#pragma omp for schedule(static)
                for (std::int64_t i = 0; i < N; ++i) node_update(i);
#pragma omp single
                ok = post_step(s);
                if (!ok) break; // same decision on every thread after the single barrier
            }
        }
    } else
#endif
    {
        (void)exec;
        for (long s = 1; s <= steps && ok; ++s) {
            for (std::int64_t i = 0; i < N; ++i) node_update(i);
            ok = post_step(s);
        }
    }
    if (!ok) throw stability_error("solve: solution left [0,1]; reduce dt (CFL violation)");
    return sol;
}

namespace {

struct Crossing {
    bool found = false;
    double x = 0.0;
};

Crossing rightmost_crossing(const GraphGrid& grid, const std::vector<double>& u, double level) {
    const auto& ord = grid.spine_sorted;
    for (int i = static_cast<int>(ord.size()) - 1; i > 0; --i) {
        double ua = u[ord[i - 1]], ub = u[ord[i]];
        if (ua >= level && ub < level) {
            double xa = grid.nodes[ord[i - 1]].gx, xb = grid.nodes[ord[i]].gx;
            double w = (level - ua) / (ub - ua);
            return {true, xa + w * (xb - xa)};
        }
    }
    return {};
}

Crossing leftmost_crossing(const GraphGrid& grid, const std::vector<double>& u, double level) {
    const auto& ord = grid.spine_sorted;
    for (std::size_t i = 0; i + 1 < ord.size(); ++i) {
        double ua = u[ord[i]], ub = u[ord[i + 1]];
        if (ua < level && ub >= level) {
            double xa = grid.nodes[ord[i]].gx, xb = grid.nodes[ord[i + 1]].gx;
            double w = (level - ua) / (ub - ua);
            return {true, xa + w * (xb - xa)};
        }
    }
    return {};
}

struct Fit {
    double slope = 0.0, r2 = 0.0;
};

Fit least_squares(const std::vector<double>& t, const std::vector<double>& x) {
    int n = static_cast<int>(t.size());
    double mt = 0, mx = 0;
    for (int i = 0; i < n; ++i) {
        mt += t[i];
        mx += x[i];
    }
    mt /= n;
    mx /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (t[i] - mt) * (t[i] - mt);
        sxy += (t[i] - mt) * (x[i] - mx);
        syy += (x[i] - mx) * (x[i] - mx);
    }
    Fit f;
    f.slope = sxy / sxx;
    f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

} // namespace

FrontTrace track(const PdeSolution& sol, double level, double fit_start_frac,
                 double boundary_margin) {
    FrontTrace tr;
    double T = sol.times.back();
    double fit_start = fit_start_frac * T;
    const auto& grid = sol.grid;
    double x_lo = grid.nodes[grid.spine_sorted.front()].gx;
    double x_hi = grid.nodes[grid.spine_sorted.back()].gx;
    int in_window = 0;
    for (std::size_t s = 0; s < sol.times.size(); ++s) {
        Crossing r = rightmost_crossing(grid, sol.states[s], level);
        Crossing l = leftmost_crossing(grid, sol.states[s], level);
        if (!r.found || !l.found) {
            if (sol.times[s] >= fit_start)
                throw domain_exhausted_error("track: no level crossing (front left the domain); "
                                             "use a longer channel");
            continue;
        }
        if (sol.times[s] >= fit_start &&
            (r.x > x_hi - boundary_margin || l.x < x_lo + boundary_margin))
            throw domain_exhausted_error("track: front within the boundary margin; "
                                         "use a longer channel");
        tr.t.push_back(sol.times[s]);
        tr.x_right.push_back(r.x);
        tr.x_left.push_back(l.x);
        if (sol.times[s] >= fit_start) ++in_window;
    }
    if (in_window < 10)
        throw domain_error("track: need at least 10 snapshots in the fit window");
    std::vector<double> tw, xr, xl;
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        if (tr.t[i] < fit_start) continue;
        tw.push_back(tr.t[i]);
        xr.push_back(tr.x_right[i]);
        xl.push_back(tr.x_left[i]);
    }
    for (std::size_t i = 1; i < xr.size(); ++i) {
        if (xr[i] < xr[i - 1] - 2.0 * sol.grid.dx) tr.monotone = false;
        if (xl[i] > xl[i - 1] + 2.0 * sol.grid.dx) tr.monotone = false;
    }
    Fit fr = least_squares(tw, xr), fl = least_squares(tw, xl);
    tr.speed_right = fr.slope;
    tr.r2_right = fr.r2;
    tr.speed_left = fl.slope;
    tr.r2_left = fl.r2;
    return tr;
}

double spine_value(const PdeSolution& sol, const std::vector<double>& state, double x) {
    const auto& ord = sol.grid.spine_sorted;
    if (x <= sol.grid.nodes[ord.front()].gx) return state[ord.front()];
    if (x >= sol.grid.nodes[ord.back()].gx) return state[ord.back()];
    int lo = 0, hi = static_cast<int>(ord.size()) - 1;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        (sol.grid.nodes[ord[mid]].gx <= x ? lo : hi) = mid;
    }
    double xa = sol.grid.nodes[ord[lo]].gx, xb = sol.grid.nodes[ord[hi]].gx;
    double w = xb > xa ? (x - xa) / (xb - xa) : 0.0;
    return (1.0 - w) * state[ord[lo]] + w * state[ord[hi]];
}

void write_snapshots_csv(const PdeSolution& sol, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw domain_error("write_snapshots_csv: cannot open " + path);
    f.precision(17);
    f << "t,edge,x,u\n";
    for (std::size_t s = 0; s < sol.times.size(); ++s)
        for (std::size_t i = 0; i < sol.grid.nodes.size(); ++i) {
            const auto& n = sol.grid.nodes[i];
            f << sol.times[s] << "," << n.edge << "," << n.gx << "," << sol.states[s][i] << "\n";
        }
}

void write_trace_csv(const FrontTrace& tr, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw domain_error("write_trace_csv: cannot open " + path);
    f.precision(17);
    f << "t,x_right,x_left\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i)
        f << tr.t[i] << "," << tr.x_right[i] << "," << tr.x_left[i] << "\n";
}

} // namespace chanfront
