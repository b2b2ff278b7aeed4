#include "chanfront/channel2d.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "chanfront/errors.hpp"

namespace chanfront {

namespace {

bool on_lattice(double v, double q) { return std::abs(v / q - std::lround(v / q)) < 1e-9; }

} // namespace

RectDomain build_rect_domain(const MetricGraph& graph, const ChannelShape& shape,
                             double window_lo, double window_hi, double dx, double dz) {
    if (!shape.params.rectangular)
        throw domain_error("build_rect_domain: shape must be rectangular-mode");
    if (!(window_lo < window_hi)) throw domain_error("build_rect_domain: empty window");
    double q = shape.params.rect_quantum;
    if (!on_lattice(q, dz)) throw domain_error("build_rect_domain: dz must divide rect_quantum");
    if (!on_lattice(q, dx)) throw domain_error("build_rect_domain: dx must divide rect_quantum");
    if (!on_lattice(window_lo, dx) || !on_lattice(window_hi, dx))
        throw domain_error("build_rect_domain: window bounds must sit on the dx lattice");
    window_lo = std::max(window_lo, graph.x_min);
    window_hi = std::min(window_hi, graph.x_max);

    RectDomain d;
    d.dx = dx;
    d.dz = dz;
    d.x0 = window_lo;
    d.nx = static_cast<int>(std::lround((window_hi - window_lo) / dx));
    double zmax = shape.params.width_max + shape.params.wing_max;
    d.nz = static_cast<int>(std::ceil(zmax / dz)) + 1;
    d.inside.assign(static_cast<std::size_t>(d.nx) * d.nz, 0);
    d.edge_id.assign(static_cast<std::size_t>(d.nx) * d.nz, -1);
    d.wall_up.assign(static_cast<std::size_t>(d.nx) * d.nz, 0);

    for (int i = 0; i < d.nx; ++i) {
        double x = d.xc(i);
        int spine = graph.spine_edge_at(x);
        double w = graph.spine_width(x);
        int kw = static_cast<int>(std::lround(w / dz));
        for (int k = 0; k < kw; ++k) {
            d.inside[d.idx(i, k)] = 1;
            d.edge_id[d.idx(i, k)] = spine;
        }
    }
    for (const auto& e : graph.edges) {
        if (!e.is_wing) continue;
        double xa = e.global_x(0.0), xb = e.global_x(e.length());
        double lo = std::min(xa, xb), hi = std::max(xa, xb);
        if (hi <= window_lo || lo >= window_hi) continue;
        double gamma = e.profile.width(0.0); // constant-width wing
        int kg = static_cast<int>(std::lround(gamma / dz));
        for (int i = 0; i < d.nx; ++i) {
            double x = d.xc(i);
            if (x < lo || x > hi) continue;
            double w = graph.spine_width(x);
            int kw = static_cast<int>(std::lround(w / dz));
            for (int k = kw; k < kw + kg && k < d.nz; ++k) {
                d.inside[d.idx(i, k)] = 1;
                d.edge_id[d.idx(i, k)] = e.id;
            }
            if (kw > 0 && kg > 0) d.wall_up[d.idx(i, kw - 1)] = 1; // spine|wing separator
        }
    }
    for (std::size_t i = 0; i < d.inside.size(); ++i)
        if (d.inside[i]) ++d.n_inside;
    return d;
}

EpsSolution solve_2d(const MetricGraph& graph, const ChannelShape& shape, double eps,
                     const std::function<double(double, double)>& V,
                     const std::function<double(double)>& g,
                     const std::function<double(double)>& f, double T, double window_lo,
                     double window_hi, double dx, double dz, double snap_every, par::Exec exec) {
    if (!(eps > 0 && eps <= 1)) throw domain_error("solve_2d: eps must lie in (0,1]");
    EpsSolution sol;
    sol.dom = build_rect_domain(graph, shape, window_lo, window_hi, dx, dz);
    sol.eps = eps;
    const RectDomain& d = sol.dom;
    const int nx = d.nx, nz = d.nz;

    double vmax = 0.0;
    if (V)
        for (int i = 0; i < nx; i += std::max(1, nx / 64))
            for (int k = 0; k < nz; ++k)
                if (d.inside[d.idx(i, k)]) vmax = std::max(vmax, std::abs(V(d.xc(i), d.zc(k))));
    double rate = 1.0 / (dx * dx) + 1.0 / (eps * eps * dz * dz) + vmax / dx + 1.5;
    double dt = 0.4 / rate;
    // Snapshots land exactly on multiples of snap_every (see frontpde).
    long snap_stride = std::max<long>(1, std::lround(std::ceil(snap_every / dt)));
    dt = snap_every / snap_stride;
    long steps = snap_stride * std::max<long>(1, std::lround(std::ceil(T / snap_every - 1e-9)));
    sol.dt = dt;

    std::vector<double> u(d.inside.size(), 0.0), un(d.inside.size(), 0.0);
    for (int k = 0; k < nz; ++k)
        for (int i = 0; i < nx; ++i)
            if (d.inside[d.idx(i, k)]) u[d.idx(i, k)] = g(d.xc(i));

    const double cx = 0.5 / (dx * dx), cz = 0.5 / (eps * eps * dz * dz);
    std::atomic<bool> out_of_range{false};
    auto record = [&](double t) {
        sol.times.push_back(t);
        sol.states.push_back(u);
    };
    record(0.0);
    auto row_update = [&](std::int64_t k) {
        for (int i = 0; i < nx; ++i) {
            int id = d.idx(i, static_cast<int>(k));
            if (!d.inside[id]) continue;
            double uc = u[id];
            // Neumann: closed faces mirror the center value.
            double uw = (i > 0 && d.inside[d.idx(i - 1, k)]) ? u[d.idx(i - 1, k)] : uc;
            double ue = (i + 1 < nx && d.inside[d.idx(i + 1, k)]) ? u[d.idx(i + 1, k)] : uc;
            bool open_dn = k > 0 && d.inside[d.idx(i, k - 1)] && !d.wall_up[d.idx(i, k - 1)];
            bool open_up = k + 1 < nz && d.inside[d.idx(i, k + 1)] && !d.wall_up[id];
            double ud = open_dn ? u[d.idx(i, k - 1)] : uc;
            double uu = open_up ? u[d.idx(i, k + 1)] : uc;
            double adv = 0.0;
            if (V) adv = V(d.xc(i), d.zc(static_cast<int>(k))) * (ue - uw) / (2.0 * dx);
            double v = uc + dt * (cx * (ue - 2.0 * uc + uw) + cz * (uu - 2.0 * uc + ud) + adv +
                                  f(uc));
            un[id] = v;
            if (v < -1e-12 || v > 1.0 + 1e-12) out_of_range.store(true, std::memory_order_relaxed);
        }
    };
    auto post_step = [&](long s) {
        u.swap(un);
        if (s % snap_stride == 0) record(s / snap_stride * snap_every);
        return !out_of_range.load(std::memory_order_relaxed);
    };
    bool ok = true;
    if (d.n_inside < 32768) exec = par::Exec::serial; // sync cost vs row work
#ifdef _OPENMP
    if (exec == par::Exec::parallel) {
#pragma omp parallel num_threads(par::max_threads())
        {
            for (long s = 1; s <= steps; ++s) {
#pragma omp for schedule(static)
                for (std::int64_t k = 0; k < nz; ++k) row_update(k);
#pragma omp single
                ok = post_step(s);
                if (!ok) break;
            }
        }
    } else
#endif
    {
        (void)exec;
        for (long s = 1; s <= steps && ok; ++s) {
            for (std::int64_t k = 0; k < nz; ++k) row_update(k);
            ok = post_step(s);
        }
    }
    if (!ok) throw stability_error("solve_2d: solution left [0,1]; reduce dt (CFL violation)");
    return sol;
}

GraphComparison compare_graph(const EpsSolution& eps_sol, const PdeSolution& graph_sol) {
    GraphComparison cmp;
    const RectDomain& d = eps_sol.dom;
    if (eps_sol.times.size() != graph_sol.times.size())
        throw domain_error("compare_graph: snapshot counts differ");
    for (std::size_t s = 0; s < eps_sol.times.size(); ++s) {
        if (std::abs(eps_sol.times[s] - graph_sol.times[s]) > 1e-6)
            throw domain_error("compare_graph: snapshot times differ");
        if (eps_sol.times[s] == 0.0) continue; // identical initial data, only sampled differently
        double sup = 0.0;
        for (int k = 0; k < d.nz; ++k)
            for (int i = 0; i < d.nx; ++i) {
                int id = d.idx(i, k);
                if (!d.inside[id]) continue;
                const GraphEdge& e = graph_sol.graph->edges[d.edge_id[id]];
                double local = e.is_wing ? std::abs(d.xc(i) - e.global_x(0.0))
                                         : d.xc(i) - e.global_x0;
                local = std::clamp(local, 0.0, e.length());
                double ug = graph_sol.grid.interp(graph_sol.states[s], e.id, local);
                sup = std::max(sup, std::abs(eps_sol.states[s][id] - ug));
            }
        cmp.times.push_back(eps_sol.times[s]);
        cmp.sup_err.push_back(sup);
        cmp.overall = std::max(cmp.overall, sup);
    }
    return cmp;
}

double cross_section_oscillation(const EpsSolution& sol, std::size_t snap_index) {
    const RectDomain& d = sol.dom;
    const auto& u = sol.states.at(snap_index);
    double worst = 0.0;
    for (int i = 0; i < d.nx; ++i) {
        // Components of the column are contiguous runs of inside cells with
        // the same edge id (walls separate spine from wing).
        int k = 0;
        while (k < d.nz) {
            if (!d.inside[d.idx(i, k)]) {
                ++k;
                continue;
            }
            int id0 = d.edge_id[d.idx(i, k)];
            double lo = u[d.idx(i, k)], hi = lo;
            while (k < d.nz && d.inside[d.idx(i, k)] && d.edge_id[d.idx(i, k)] == id0) {
                lo = std::min(lo, u[d.idx(i, k)]);
                hi = std::max(hi, u[d.idx(i, k)]);
                ++k;
            }
            worst = std::max(worst, hi - lo);
        }
    }
    return worst;
}

double mean_profile_gradient(const EpsSolution& sol) {
    const RectDomain& d = sol.dom;
    double worst = 0.0;
    for (const auto& u : sol.states) {
        double prev = std::numeric_limits<double>::quiet_NaN();
        for (int i = 0; i < d.nx; ++i) {
            double sum = 0.0;
            int cnt = 0;
            for (int k = 0; k < d.nz; ++k)
                if (d.inside[d.idx(i, k)]) {
                    sum += u[d.idx(i, k)];
                    ++cnt;
                }
            if (cnt == 0) continue;
            double mean = sum / cnt;
            if (!std::isnan(prev)) worst = std::max(worst, std::abs(mean - prev) / d.dx);
            prev = mean;
        }
    }
    return worst;
}

void write_eps_snapshots_csv(const EpsSolution& sol, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw domain_error("write_eps_snapshots_csv: cannot open " + path);
    f.precision(17);
    f << "t,x,z,u\n";
    const RectDomain& d = sol.dom;
    for (std::size_t s = 0; s < sol.times.size(); ++s)
        for (int k = 0; k < d.nz; ++k)
            for (int i = 0; i < d.nx; ++i)
                if (d.inside[d.idx(i, k)])
                    f << sol.times[s] << "," << d.xc(i) << "," << d.zc(k) << ","
                      << sol.states[s][d.idx(i, k)] << "\n";
}

void write_mean_profile_csv(const EpsSolution& sol, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw domain_error("write_mean_profile_csv: cannot open " + path);
    f.precision(17);
    f << "t,edge,x,u\n";
    const RectDomain& d = sol.dom;
    for (std::size_t s = 0; s < sol.times.size(); ++s)
        for (int i = 0; i < d.nx; ++i) {
            std::map<int, std::pair<double, int>> comp;
            for (int k = 0; k < d.nz; ++k)
                if (d.inside[d.idx(i, k)]) {
                    auto& c = comp[d.edge_id[d.idx(i, k)]];
                    c.first += sol.states[s][d.idx(i, k)];
                    c.second += 1;
                }
            for (const auto& [eid, acc] : comp)
                f << sol.times[s] << "," << eid << "," << d.xc(i) << ","
                  << acc.first / acc.second << "\n";
        }
}

void write_comparison_csv(const std::vector<double>& eps, const std::vector<GraphComparison>& cmp,
                          const std::string& path) {
    std::ofstream f(path);
    if (!f) throw domain_error("write_comparison_csv: cannot open " + path);
    f.precision(17);
    f << "eps,t,sup_err\n";
    for (std::size_t j = 0; j < eps.size(); ++j)
        for (std::size_t s = 0; s < cmp[j].times.size(); ++s)
            f << eps[j] << "," << cmp[j].times[s] << "," << cmp[j].sup_err[s] << "\n";
}

} // namespace chanfront
