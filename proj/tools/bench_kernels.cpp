// Benchmark of the OpenMP kernels against their serial reference loops.
// Results must agree bitwise; the table reports times and speedup.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "chanfront/channel2d.hpp"
#include "chanfront/frontpde.hpp"
#include "chanfront/graph.hpp"
#include "chanfront/ldp.hpp"
#include "chanfront/walker.hpp"

using namespace chanfront;

namespace {

double bump(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    double c = std::cos(1.5707963267948966 * x);
    return c * c;
}
double kpp(double u) { return u * (1.0 - u); }

template <class F>
double timed(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const std::string& name, double ts, double tp, bool identical) {
    std::printf("%-28s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  identical %s\n",
                name.c_str(), ts, tp, ts / tp, identical ? "yes" : "NO");
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) par::set_max_threads(std::atoi(argv[1]));
    std::printf("threads: %d\n", par::max_threads());

    // Transfer-matrix batch (per-cell edge solves dominate).
    {
        ChannelShape shape = sample_channel(GeneratorParams{}, 3, 1200);
        DepthPolicy pol;
        pol.report = 1100;
        TransformResult rs, rp;
        double ts = timed([&] {
            rs = hitting_transform(shape, -0.8, Direction::plus, pol, SolveMethod::ode,
                                   par::Exec::serial);
        });
        double tp = timed([&] {
            rp = hitting_transform(shape, -0.8, Direction::plus, pol, SolveMethod::ode,
                                   par::Exec::parallel);
        });
        row("transfer cells", ts, tp, rs.log_sum == rp.log_sum && rs.rho == rp.rho);
    }

    // Monte Carlo hitting paths.
    {
        ChannelShape shape = sample_channel(GeneratorParams{}, 3, 40);
        MetricGraph g = build_graph(shape);
        WalkerConfig wc;
        wc.dt = 0.005;
        wc.seed = 99;
        QEstimate qs, qp;
        double ts = timed(
            [&] { qs = estimate_q(g, 0.5, 8.5, -0.5, wc, 4000, par::Exec::serial); });
        double tp = timed(
            [&] { qp = estimate_q(g, 0.5, 8.5, -0.5, wc, 4000, par::Exec::parallel); });
        row("walker paths", ts, tp, qs.value == qp.value && qs.se == qp.se);
    }

    // Graph reaction-diffusion stepping.
    {
        ChannelShape shape = flat_channel(80);
        MetricGraph g = build_graph(shape);
        PdeSolution ss, sp;
        double ts = timed(
            [&] { ss = solve(g, bump, kpp, 0.05, 0.005, 0.05, 0.5, par::Exec::serial); });
        double tp = timed(
            [&] { sp = solve(g, bump, kpp, 0.05, 0.005, 0.05, 0.5, par::Exec::parallel); });
        row("graph pde steps", ts, tp, ss.states.back() == sp.states.back());
    }

    // 2D epsilon-channel stepping.
    {
        GeneratorParams p;
        p.rectangular = true;
        p.amplitude = 0.0;
        p.width_min = 0.8;
        p.width_max = 1.2;
        p.wing_max = 0.4;
        ChannelShape shape = sample_channel(p, 41, 8);
        MetricGraph g = build_graph(shape);
        EpsSolution es, ep;
        double ts = timed([&] {
            es = solve_2d(g, shape, 0.2, nullptr, bump, kpp, 0.01, -6.0, 6.0, 0.0125, 0.0125,
                          0.01, par::Exec::serial);
        });
        double tp = timed([&] {
            ep = solve_2d(g, shape, 0.2, nullptr, bump, kpp, 0.01, -6.0, 6.0, 0.0125, 0.0125,
                          0.01, par::Exec::parallel);
        });
        row("2d channel steps", ts, tp, es.states.back() == ep.states.back());
    }
    return 0;
}
