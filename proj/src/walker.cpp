#include "chanfront/walker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "chanfront/errors.hpp"

namespace chanfront {

namespace {

constexpr std::uint64_t TAG_HIT = 0x686974;
constexpr std::uint64_t TAG_AB = 0x616221;

double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

// Acklam's rational approximation of the inverse normal CDF (|rel err| ~ 1e-9).
double norm_inv(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > phigh) {
        q = std::sqrt(-2 * std::log(1 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

// First-passage time of a level within one Euler step, conditioned on the
// endpoint distances a (start side) and w (far side, crossing or reflected
// touch), as a fraction of the step. The bridge first-passage density maps
// to a GIG(1/2) under r = (1-u)/u, i.e. Y ~ InverseGaussian(a/w, a^2/dt)
// with T/dt = Y/(1+Y). Only valid where the walk stops at the hit; a move
// that continues afterwards must not condition on its endpoint.
double bridge_hit_fraction(double a, double w, double dt, RngStream& rng) {
    if (!(a > 0)) return 0.0;
    if (!(w > 0)) return 1.0;
    double mu = a / w, lam = a * a / dt;
    double nu = rng.normal(), y = nu * nu;
    double x = mu + mu * mu * y / (2.0 * lam) -
               mu / (2.0 * lam) * std::sqrt(4.0 * mu * lam * y + mu * mu * y * y);
    if (!(x > 0)) x = mu * 1e-14;
    double val = rng.u01() < mu / (mu + x) ? x : mu * mu / x;
    return std::clamp(val / (1.0 + val), 0.0, 1.0);
}

// Shell radius at a vertex: the step length scale capped so the hop target
// stays inside every incident edge.
double vertex_shell(const MetricGraph& g, int vid, const WalkerConfig& cfg) {
    double h = cfg.shell_factor * std::sqrt(cfg.dt);
    for (const auto& leg : g.vertices[vid].legs)
        h = std::min(h, 0.45 * g.edges[leg.edge].length());
    return h;
}

void place_on_leg(GraphState& st, const MetricGraph& g, const GraphVertex::Leg& leg, double h) {
    // Nudge past the shell boundary so rounding of R - h can never drop the
    // walker straight back into the shell it just left (which would re-roll
    // the exit direction and bias the junction passage).
    const GraphEdge& e = g.edges[leg.edge];
    double margin = h * (1.0 + 1e-9);
    st.edge = leg.edge;
    st.x = leg.end == 0 ? margin : e.length() - margin;
}

} // namespace

int choose_leg(const GraphVertex& v, RngStream& rng) {
    double total = 0.0;
    for (const auto& leg : v.legs) total += leg.weight;
    if (total <= 0) return 0;
    double u = rng.u01() * total;
    for (std::size_t j = 0; j < v.legs.size(); ++j) {
        u -= v.legs[j].weight;
        if (u <= 0) return static_cast<int>(j);
    }
    return static_cast<int>(v.legs.size()) - 1;
}

double shell_exit_time(const GraphVertex& v, const MetricGraph& graph, double h) {
    if (v.kind == GraphVertex::Kind::tip) {
        const auto& leg = v.legs[0];
        const GraphEdge& e = graph.edges[leg.edge];
        // Vanishing width l ~ s^beta near the tip behaves like a Bessel
        // process of index 1+beta; mean time to reach h is h^2/(1+beta).
        double beta = (e.profile.kind() == WidthProfile::Kind::tip_power && leg.end == 1)
                          ? e.profile.tip_beta()
                          : 0.0;
        return h * h / (1.0 + beta);
    }
    return h * h;
}

StepInfo step(GraphState& st, const MetricGraph& g, const WalkerConfig& cfg, RngStream& rng) {
    const GraphEdge& e = g.edges[st.edge];
    double R = e.length();
    double h0 = vertex_shell(g, e.v0, cfg);
    double h1 = vertex_shell(g, e.v1, cfg);
    if (st.x < h0 || (R - st.x) < h1) {
        int end = st.x < h0 ? 0 : 1;
        int vid = end == 0 ? e.v0 : e.v1;
        double h = end == 0 ? h0 : h1;
        double delta = end == 0 ? st.x : R - st.x; // distance to the vertex
        const GraphVertex& v = g.vertices[vid];
        if (v.kind == GraphVertex::Kind::tip) {
            // Reflecting tip: mean time to reach radius h from offset delta
            // under the local l ~ s^beta model.
            const auto& leg = v.legs[0];
            const GraphEdge& we = g.edges[leg.edge];
            double beta = (we.profile.kind() == WidthProfile::Kind::tip_power && leg.end == 1)
                              ? we.profile.tip_beta()
                              : 0.0;
            double tau = (h * h - delta * delta) / (1.0 + beta);
            st.t += tau;
            place_on_leg(st, g, leg, h);
            return {true, tau};
        }
        // Two-stage shell: first decide whether the walker escapes the shell
        // on its own edge without touching the vertex (probability delta/h),
        // with the conditional mean times of the Brownian exit; only vertex
        // touches redistribute across legs by the width weights. Both stages
        // keep E[dx^2] = E[dt].
        if (delta > 0 && rng.u01() < delta / h) {
            double tau = (h * h - delta * delta) / 3.0;
            st.t += tau;
            double margin = h * (1.0 + 1e-9);
            st.x = end == 0 ? margin : R - margin;
            return {true, tau};
        }
        double tau = delta * (2.0 * h - delta) / 3.0 + h * h;
        st.t += tau;
        place_on_leg(st, g, v.legs[choose_leg(v, rng)], h);
        return {true, tau};
    }
    double dt = cfg.dt;
    if (e.is_wing) dt = std::min(dt, 0.0625 * R * R); // resolve short wings
    double sdt = std::sqrt(dt);

    // Within Gaussian reach of a vertex the move must not condition on a
    // drawn endpoint (that would bias the post-touch law). Decide hit vs
    // no-hit first with the one-sided reflection probability; on a hit the
    // same uniform inverts the conditional first-passage CDF, otherwise the
    // endpoint comes from the no-touch (reflection-rejection) law.
    double margin = 6.5 * sdt;
    double d0 = st.x, d1 = R - st.x;
    bool tip0 = g.vertices[e.v0].kind == GraphVertex::Kind::tip;
    bool tip1 = g.vertices[e.v1].kind == GraphVertex::Kind::tip;
    bool near0 = d0 < margin && !tip0, near1 = d1 < margin && !tip1;
    if (near0 || near1) {
        int end = (!near1 || (near0 && d0 <= d1)) ? 0 : 1;
        double a = end == 0 ? d0 : d1;
        double u = rng.u01();
        double p_hit = 2.0 * norm_cdf(-a / sdt);
        if (u < p_hit) {
            double z = norm_inv(0.5 * u); // negative
            double s = a * a / (z * z);
            st.t += s;
            st.x = end == 0 ? 0.0 : R;
            return {false, s}; // at the vertex; the shell resolves it next step
        }
        for (int it = 0; it < 256; ++it) {
            double y = a + sdt * rng.normal();
            if (y <= 0.0) continue;
            if (rng.u01() >= 1.0 - std::exp(-2.0 * a * y / dt)) continue;
            double x_new = end == 0 ? y : R - y;
            // A simultaneous interaction with the far vertex is exceedingly
            // rare on resolved edges; clamping there is harmless.
            st.x = std::clamp(x_new, 0.0, R);
            st.t += dt;
            return {false, dt};
        }
        st.t += dt;
        return {false, dt};
    }

    double l = e.profile.width(st.x);
    double drift = l > 0 ? e.profile.dwidth(st.x) / (2.0 * l) : 0.0;
    double x_new = st.x + drift * dt + sdt * rng.normal();
    if (x_new < 0.0 || x_new > R) {
        // Tips reflect (mirror move, exact for a reflecting boundary);
        // junction overshoots from this far out are negligible-probability
        // flukes and just stop at the vertex.
        if (x_new < 0.0 && tip0)
            x_new = -x_new;
        else if (x_new > R && tip1)
            x_new = 2.0 * R - x_new;
        x_new = std::clamp(x_new, 0.0, R);
    }
    st.x = x_new;
    st.t += dt;
    return {false, dt};
}

double suggested_horizon(double distance, double lambda_q, double bracket_tol) {
    if (lambda_q < -1e-6)
        return (std::log(1.0 / bracket_tol) + 3.0 * distance * std::sqrt(-2.0 * lambda_q)) /
               (-lambda_q);
    return 50.0 * distance * distance;
}

HitStats sample_hit(const MetricGraph& graph, double start_x, double target_x,
                    const WalkerConfig& cfg, int n_paths, par::Exec exec) {
    if (n_paths < 1) throw domain_error("sample_hit: n_paths must be >= 1");
    bool down = target_x < start_x;
    double dist = std::abs(start_x - target_x);
    double horizon = cfg.horizon > 0 ? cfg.horizon : 50.0 * dist * dist;
    HitStats out;
    out.samples.resize(n_paths);
    const GraphEdge& e0 = graph.edges[graph.spine_edge_at(start_x)];
    double x0 = std::clamp(start_x - e0.global_x0, 0.0, e0.length());
    par::for_each_dynamic(exec, n_paths, [&](std::int64_t p) {
        RngStream rng = substream(cfg.seed, TAG_HIT, p);
        GraphState st{e0.id, x0, 0.0};
        HitSample smp;
        smp.censored = true;
        smp.t = horizon;
        while (st.t < horizon) {
            int pre_edge = st.edge;
            bool pre_spine = !graph.edges[pre_edge].is_wing;
            double a = pre_spine ? graph.edges[pre_edge].global_x(st.x) : 0.0;
            double t_before = st.t;
            StepInfo si = step(st, graph, cfg, rng);
            const GraphEdge& e = graph.edges[st.edge];
            if (e.is_wing) continue;
            double b = e.global_x(st.x);
            bool beyond = down ? b <= target_x : b >= target_x;
            if (!si.shell_hop && pre_spine && st.edge == pre_edge) {
                // In-edge diffusion move: resolve the crossing time within
                // the step, exactly conditioned on the endpoints; excursions
                // that return within the step are caught by the bridge test.
                double da = down ? a - target_x : target_x - a;
                double db = down ? b - target_x : target_x - b;
                if (beyond) {
                    double theta = bridge_hit_fraction(std::max(da, 0.0), std::max(-db, 0.0),
                                                       si.dt_used, rng);
                    smp = {t_before + theta * si.dt_used, false};
                    break;
                }
                if (da > 0 && db > 0 && 2.0 * da * db < 28.0 * si.dt_used) {
                    double pcross = std::exp(-2.0 * da * db / si.dt_used);
                    if (rng.u01() < pcross) {
                        double theta = bridge_hit_fraction(da, db, si.dt_used, rng);
                        smp = {t_before + theta * si.dt_used, false};
                        break;
                    }
                }
            } else if (beyond) {
                smp = {st.t, false};
                break;
            }
        }
        out.samples[p] = smp;
    });
    int censored = 0;
    double sum = 0.0;
    int hits = 0;
    for (const auto& s : out.samples) {
        if (s.censored)
            ++censored;
        else {
            sum += s.t;
            ++hits;
        }
    }
    out.censor_rate = static_cast<double>(censored) / n_paths;
    out.mean_t = hits > 0 ? sum / hits : 0.0;
    return out;
}

double hit_before_frequency(const MetricGraph& graph, double start_x, double a, double b,
                            const WalkerConfig& cfg, int n_paths, par::Exec exec) {
    if (!(a < start_x && start_x < b)) throw domain_error("hit_before_frequency: need a < start < b");
    double horizon = cfg.horizon > 0 ? cfg.horizon : 50.0 * (b - a) * (b - a);
    const GraphEdge& e0 = graph.edges[graph.spine_edge_at(start_x)];
    double x0 = std::clamp(start_x - e0.global_x0, 0.0, e0.length());
    std::vector<double> hit_b(n_paths, 0.0);
    int censored = 0;
    par::for_each_dynamic(exec, n_paths, [&](std::int64_t p) {
        RngStream rng = substream(cfg.seed, TAG_AB, p);
        GraphState st{e0.id, x0, 0.0};
        while (st.t < horizon) {
            int pre_edge = st.edge;
            bool pre_spine = !graph.edges[pre_edge].is_wing;
            double xa = pre_spine ? graph.edges[pre_edge].global_x(st.x) : 0.0;
            StepInfo si = step(st, graph, cfg, rng);
            const GraphEdge& e = graph.edges[st.edge];
            if (e.is_wing) continue;
            double xb = e.global_x(st.x);
            if (xb >= b) {
                hit_b[p] = 1.0;
                return;
            }
            if (xb <= a) return;
            if (!si.shell_hop && pre_spine && st.edge == pre_edge) {
                // Bridge tests for undetected excursions to either boundary.
                double da = b - xa, db = b - xb;
                if (da > 0 && db > 0 && 2.0 * da * db < 28.0 * si.dt_used &&
                    rng.u01() < std::exp(-2.0 * da * db / si.dt_used)) {
                    hit_b[p] = 1.0;
                    return;
                }
                da = xa - a;
                db = xb - a;
                if (da > 0 && db > 0 && 2.0 * da * db < 28.0 * si.dt_used &&
                    rng.u01() < std::exp(-2.0 * da * db / si.dt_used))
                    return;
            }
        }
        hit_b[p] = -1.0; // censored marker
    });
    double wins = 0;
    for (double v : hit_b) {
        if (v < 0)
            ++censored;
        else
            wins += v;
    }
    if (static_cast<double>(censored) / n_paths > cfg.max_censoring)
        throw censoring_error("hit_before_frequency: horizon too small");
    return wins / (n_paths - censored);
}

QEstimate estimate_q(const MetricGraph& graph, double r, double s, double lambda_q,
                     const WalkerConfig& cfg, int n_paths, par::Exec exec) {
    if (lambda_q > 0) throw domain_error("estimate_q: lambda must be <= 0");
    WalkerConfig c = cfg;
    if (c.horizon <= 0) c.horizon = suggested_horizon(std::abs(s - r), lambda_q);
    HitStats h = sample_hit(graph, s, r, c, n_paths, exec);
    if (h.censor_rate > cfg.max_censoring)
        throw censoring_error("estimate_q: censoring rate above the configured maximum");
    QEstimate q;
    q.n_paths = n_paths;
    q.censor_rate = h.censor_rate;
    double sum = 0.0, sum2 = 0.0;
    for (const auto& smp : h.samples) {
        double w = smp.censored ? 0.0 : std::exp(lambda_q * smp.t);
        sum += w;
        sum2 += w * w;
    }
    q.value = sum / n_paths;
    double var = std::max(0.0, sum2 / n_paths - q.value * q.value);
    q.se = std::sqrt(var / n_paths);
    q.bracket_lo = q.value;
    q.bracket_hi = q.value + h.censor_rate * std::exp(lambda_q * c.horizon);
    return q;
}

QEstimate estimate_q_chain(const MetricGraph& graph, double r, double s, double lambda_q,
                           const WalkerConfig& cfg, int n_paths_per_segment, par::Exec exec) {
    if (lambda_q > 0) throw domain_error("estimate_q_chain: lambda must be <= 0");
    double lo = std::min(r, s), hi = std::max(r, s);
    bool down = s > r; // walking from s toward r
    // Split at mid-cell points: crossings there happen through plain
    // diffusion steps, where the in-step crossing time is resolved exactly
    // to O(dt); junction shells never straddle a segment boundary.
    std::vector<double> junctions;
    for (const auto& v : graph.vertices)
        if (v.kind == GraphVertex::Kind::junction && v.x > lo + 1e-12 && v.x < hi - 1e-12)
            junctions.push_back(v.x);
    std::sort(junctions.begin(), junctions.end());
    std::vector<double> bounds{lo};
    for (std::size_t i = 0; i + 1 < junctions.size(); ++i) {
        double mid = 0.5 * (junctions[i] + junctions[i + 1]);
        if (mid > lo + 0.2 && mid < hi - 0.2) bounds.push_back(mid);
    }
    bounds.push_back(hi);
    std::sort(bounds.begin(), bounds.end());
    QEstimate total;
    total.value = 1.0;
    total.bracket_lo = 1.0;
    total.bracket_hi = 1.0;
    total.n_paths = n_paths_per_segment;
    double rel_var = 0.0;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        double a = bounds[i], b = bounds[i + 1];
        WalkerConfig c = cfg;
        c.seed = mix64(cfg.seed ^ mix64(i + 1));
        c.horizon = suggested_horizon(b - a, lambda_q);
        QEstimate seg = down ? estimate_q(graph, a, b, lambda_q, c, n_paths_per_segment, exec)
                             : estimate_q(graph, b, a, lambda_q, c, n_paths_per_segment, exec);
        total.value *= seg.value;
        total.bracket_lo *= seg.bracket_lo;
        total.bracket_hi *= seg.bracket_hi;
        total.censor_rate = std::max(total.censor_rate, seg.censor_rate);
        if (seg.value > 0) rel_var += (seg.se / seg.value) * (seg.se / seg.value);
    }
    total.se = total.value * std::sqrt(rel_var);
    return total;
}

// ---------------------------------------------------------------------------
// Feynman-Kac by windowed Picard iteration.

namespace {

struct FkGrid {
    // Per edge: uniform node spacing and the index of its first node.
    struct EdgeNodes {
        int first = 0, count = 0;
        double h = 1.0;
    };
    std::vector<EdgeNodes> per_edge;
    std::vector<int> node_edge;
    std::vector<double> node_x;  // edge-local
    std::vector<double> node_gx; // projected global x

    int size() const { return static_cast<int>(node_edge.size()); }

    // Cubic where the stencil fits (linear interpolation of the sharply
    // curved front/tail regions inflates convex profiles a little every
    // window, which compounds across the composition), linear at chain ends.
    double interp(const std::vector<double>& u, int edge, double x) const {
        const EdgeNodes& en = per_edge[edge];
        double t = std::clamp(x / en.h, 0.0, double(en.count - 1));
        int i = std::min(static_cast<int>(t), en.count - 2);
        double w = t - i;
        const double* v = &u[en.first];
        if (i < 1 || i + 2 >= en.count)
            return (1.0 - w) * v[i] + w * v[i + 1];
        double vm = v[i - 1], v0 = v[i], v1 = v[i + 1], v2 = v[i + 2];
        double val = v0 + 0.5 * w * (v1 - vm + w * (2.0 * vm - 5.0 * v0 + 4.0 * v1 - v2 +
                                                    w * (3.0 * (v0 - v1) + v2 - vm)));
        return std::max(val, 0.0);
    }
};

FkGrid make_fk_grid(const MetricGraph& g, double dx) {
    FkGrid grid;
    grid.per_edge.resize(g.edges.size());
    for (const auto& e : g.edges) {
        int n = std::max(2, static_cast<int>(std::lround(e.length() / dx)) + 1);
        FkGrid::EdgeNodes en;
        en.first = grid.size();
        en.count = n;
        en.h = e.length() / (n - 1);
        grid.per_edge[e.id] = en;
        for (int i = 0; i < n; ++i) {
            double x = en.h * i;
            grid.node_edge.push_back(e.id);
            grid.node_x.push_back(x);
            grid.node_gx.push_back(e.global_x(x));
        }
    }
    return grid;
}

} // namespace

FkResult feynman_kac(const MetricGraph& graph, const std::function<double(double)>& g,
                     const std::function<double(double)>& f, double fprime0, double t,
                     const std::vector<double>& eval_x, const FkConfig& cfg, par::Exec exec) {
    if (!(t > 0)) throw domain_error("feynman_kac: t must be positive");
    auto c_of = [&](double u) { return u <= 1e-12 ? fprime0 : f(u) / u; };

    FkGrid grid = make_fk_grid(graph, cfg.grid_dx);
    const int NN = grid.size();
    std::vector<double> prev(NN), cur(NN);
    bool g_unit_range = true;
    for (int i = 0; i < NN; ++i) {
        prev[i] = g(grid.node_gx[i]);
        if (prev[i] < -1e-12 || prev[i] > 1 + 1e-12) g_unit_range = false;
    }

    double window = cfg.window;
    int restarts = 0;
    FkResult res;
    while (true) {
        int M = std::max(1, static_cast<int>(std::ceil(t / window - 1e-9)));
        double W = t / M;
        int K = std::max(1, static_cast<int>(std::lround(W / cfg.dt)));
        double dt = W / K;
        WalkerConfig wc;
        wc.dt = dt;
        wc.seed = cfg.seed;

        res.max_delta.clear();
        res.max_overshoot = 0.0;
        res.windows = M;
        bool blew_up = false;

        std::vector<double> u0 = prev;
        std::vector<double> next(NN);
        for (int m = 0; m < M && !blew_up; ++m) {
            cur = prev; // initial Picard iterate: continuation
            double last_delta = std::numeric_limits<double>::infinity();
            for (int it = 0; it < cfg.max_picard; ++it) {
                par::for_each(exec, NN, [&](std::int64_t i) {
                    double acc = 0.0;
                    for (int p = 0; p < cfg.n_paths; ++p) {
                        RngStream rng = substream(cfg.seed,
                                                  (static_cast<std::uint64_t>(m) << 32) | 0xFEEDu,
                                                  (static_cast<std::uint64_t>(i) << 20) | p);
                        GraphState st{grid.node_edge[i], grid.node_x[i], 0.0};
                        // c at s = 0 uses the current iterate at the start node.
                        double integral = 0.0;
                        double c_prev_step = c_of(cur[i]);
                        for (int q = 1; q <= K; ++q) {
                            double s_target = q * dt;
                            while (st.t < s_target - 1e-12) step(st, graph, wc, rng);
                            double theta = 1.0 - double(q) / K;
                            double uc = grid.interp(cur, st.edge, st.x);
                            double up = grid.interp(prev, st.edge, st.x);
                            double c_here = c_of(theta * uc + (1.0 - theta) * up);
                            integral += 0.5 * dt * (c_prev_step + c_here);
                            c_prev_step = c_here;
                        }
                        double terminal = grid.interp(prev, st.edge, st.x);
                        acc += std::exp(integral) * terminal;
                    }
                    next[i] = acc / cfg.n_paths;
                });
                double delta = 0.0;
                for (int i = 0; i < NN; ++i) delta = std::max(delta, std::abs(next[i] - cur[i]));
                cur = next;
                if (delta < cfg.picard_tol) {
                    last_delta = delta;
                    break;
                }
                if (it >= 2 && delta > 1.05 * last_delta) {
                    blew_up = true; // not contracting at this window length
                    break;
                }
                last_delta = delta;
            }
            res.max_delta.push_back(last_delta);
            if (g_unit_range) {
                for (int i = 0; i < NN; ++i) {
                    double over = std::max(-cur[i], cur[i] - 1.0);
                    res.max_overshoot = std::max(res.max_overshoot, over);
                }
                if (res.max_overshoot > 0.05)
                    throw consistency_error("feynman_kac: iterate left [0,1] by more than 0.05");
            }
            prev = cur;
        }
        if (!blew_up) break;
        if (++restarts > 3)
            throw truncation_error("feynman_kac: Picard not contracting even at the smallest window");
        window *= 0.5;
        prev = u0;
    }

    res.eval_x = eval_x;
    res.u.resize(eval_x.size());
    for (std::size_t j = 0; j < eval_x.size(); ++j) {
        const GraphEdge& e = graph.edges[graph.spine_edge_at(eval_x[j])];
        res.u[j] = grid.interp(prev, e.id, std::clamp(eval_x[j] - e.global_x0, 0.0, e.length()));
    }
    return res;
}

void write_hit_samples_csv(const HitStats& h, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw domain_error("write_hit_samples_csv: cannot open " + path);
    f.precision(17);
    f << "t,censored\n";
    for (const auto& s : h.samples) f << s.t << "," << (s.censored ? 1 : 0) << "\n";
}

} // namespace chanfront
