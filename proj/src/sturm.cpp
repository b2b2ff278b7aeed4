#include "chanfront/sturm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "chanfront/errors.hpp"
#include "chanfront/quad.hpp"

namespace chanfront {

namespace {
constexpr double U_FLOOR = 1e-300;
}

double FundamentalSolution::width_at_xi(double xi) const {
    double R = profile_.length();
    if (!p_mesh_) {
        double x = reverse_ ? R - xi : xi;
        return profile_.width(std::clamp(x, 0.0, R));
    }
    double P = profile_.scale_p(R);
    double p = reverse_ ? P - xi : xi;
    double x = profile_.x_of_p(std::clamp(p, 0.0, P));
    return profile_.width(x);
}

FundamentalSolution::FundamentalSolution(const WidthProfile& profile, double lambda,
                                         SolveMethod method, bool reverse)
    : profile_(profile), lambda_(lambda), method_(method), reverse_(reverse) {
    p_mesh_ = profile.kind() == WidthProfile::Kind::tip_power;
    xi_end_ = p_mesh_ ? profile.scale_p(profile.length()) : profile.length();
    if (lambda_ == 0.0) {
        xi_ = {0.0, xi_end_};
        u_ = {1.0, 1.0};
        w_ = {0.0, 0.0};
        u_end_ = 1.0;
        w_end_ = 0.0;
        S_ = profile.scale_p(profile.length());
        return;
    }
    if (method == SolveMethod::ode)
        solve_ode();
    else
        solve_series();
}

// RHS of the first-order system in the integration coordinate.
// x mesh: u' = w / l, w' = 2 lambda l u, S' = u^-2 / l.
// p mesh: u' = w,     w' = 2 lambda l^2 u, S' = u^-2.
namespace {
struct State {
    double u, w, s;
};
} // namespace

void FundamentalSolution::solve_ode() {
    const double rtol = 1e-10, atol = 1e-13;
    auto rhs = [&](double xi, const State& y) -> State {
        double l = width_at_xi(xi);
        double u2 = std::max(y.u * y.u, U_FLOOR);
        if (p_mesh_) return {y.w, 2.0 * lambda_ * l * l * y.u, 1.0 / u2};
        return {y.w / l, 2.0 * lambda_ * l * y.u, 1.0 / (u2 * l)};
    };
    // Cash-Karp embedded RK45.
    static const double a2 = 1. / 5, a3 = 3. / 10, a4 = 3. / 5, a5 = 1., a6 = 7. / 8;
    static const double b21 = 1. / 5;
    static const double b31 = 3. / 40, b32 = 9. / 40;
    static const double b41 = 3. / 10, b42 = -9. / 10, b43 = 6. / 5;
    static const double b51 = -11. / 54, b52 = 5. / 2, b53 = -70. / 27, b54 = 35. / 27;
    static const double b61 = 1631. / 55296, b62 = 175. / 512, b63 = 575. / 13824,
                        b64 = 44275. / 110592, b65 = 253. / 4096;
    static const double c1 = 37. / 378, c3 = 250. / 621, c4 = 125. / 594, c6 = 512. / 1771;
    static const double d1 = c1 - 2825. / 27648, d3 = c3 - 18575. / 48384,
                        d4 = c4 - 13525. / 55296, d5 = -277. / 14336, d6 = c6 - 1. / 4;

    State y{1.0, 0.0, 0.0};
    double xi = 0.0;
    double scale = std::sqrt(2.0 * std::abs(lambda_));
    // Cap the step so the cubic dense output keeps ~1e-11 interior accuracy.
    const double hmax = xi_end_ / 128.0;
    double h = xi_end_ / std::max(128.0, 4.0 * scale * xi_end_);
    xi_.clear();
    u_.clear();
    w_.clear();
    auto push = [&](double x, const State& s) {
        xi_.push_back(x);
        u_.push_back(s.u);
        w_.push_back(s.w);
    };
    push(xi, y);
    int guard = 0;
    while (xi < xi_end_ && ++guard < 2000000) {
        if (xi + h > xi_end_) h = xi_end_ - xi;
        State k1 = rhs(xi, y);
        auto step = [&](double du, double dw, double ds) {
            return State{y.u + h * du, y.w + h * dw, y.s + h * ds};
        };
        State y2 = step(b21 * k1.u, b21 * k1.w, b21 * k1.s);
        State k2 = rhs(xi + a2 * h, y2);
        State y3 = step(b31 * k1.u + b32 * k2.u, b31 * k1.w + b32 * k2.w, b31 * k1.s + b32 * k2.s);
        State k3 = rhs(xi + a3 * h, y3);
        State y4 = step(b41 * k1.u + b42 * k2.u + b43 * k3.u, b41 * k1.w + b42 * k2.w + b43 * k3.w,
                        b41 * k1.s + b42 * k2.s + b43 * k3.s);
        State k4 = rhs(xi + a4 * h, y4);
        State y5 = step(b51 * k1.u + b52 * k2.u + b53 * k3.u + b54 * k4.u,
                        b51 * k1.w + b52 * k2.w + b53 * k3.w + b54 * k4.w,
                        b51 * k1.s + b52 * k2.s + b53 * k3.s + b54 * k4.s);
        State k5 = rhs(xi + a5 * h, y5);
        State y6 = step(b61 * k1.u + b62 * k2.u + b63 * k3.u + b64 * k4.u + b65 * k5.u,
                        b61 * k1.w + b62 * k2.w + b63 * k3.w + b64 * k4.w + b65 * k5.w,
                        b61 * k1.s + b62 * k2.s + b63 * k3.s + b64 * k4.s + b65 * k5.s);
        State k6 = rhs(xi + a6 * h, y6);
        State ynew{y.u + h * (c1 * k1.u + c3 * k3.u + c4 * k4.u + c6 * k6.u),
                   y.w + h * (c1 * k1.w + c3 * k3.w + c4 * k4.w + c6 * k6.w),
                   y.s + h * (c1 * k1.s + c3 * k3.s + c4 * k4.s + c6 * k6.s)};
        double eu = h * (d1 * k1.u + d3 * k3.u + d4 * k4.u + d5 * k5.u + d6 * k6.u);
        double ew = h * (d1 * k1.w + d3 * k3.w + d4 * k4.w + d5 * k5.w + d6 * k6.w);
        double su = atol + rtol * std::max(std::abs(y.u), std::abs(ynew.u));
        double sw = atol + rtol * std::max({std::abs(y.w), std::abs(ynew.w), std::abs(y.u)});
        double err = std::max(std::abs(eu) / su, std::abs(ew) / sw);
        if (err <= 1.0) {
            xi += h;
            y = ynew;
            push(xi, y);
            h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-12), -0.2));
            h = std::min(h, hmax);
        } else {
            h *= std::max(0.1, 0.9 * std::pow(err, -0.25));
        }
    }
    u_end_ = y.u;
    w_end_ = y.w;
    S_ = y.s;
    // Keep per-node S for partial integrals via the stored trajectory.
    // (S is reconstructed on demand in scale-integral queries; endpoint only.)
}

void FundamentalSolution::solve_series() {
    const int N = 4096; // uniform mesh panels
    std::vector<double> wm(N + 1), wp(N + 1);
    double h = xi_end_ / N;
    for (int i = 0; i <= N; ++i) {
        double l = width_at_xi(i * h);
        if (p_mesh_) {
            wm[i] = 2.0 * l * l;
            wp[i] = 1.0;
        } else {
            wm[i] = 2.0 * l;
            wp[i] = 1.0 / l;
        }
    }
    std::vector<double> term(N + 1, 1.0), sum_u(N + 1, 1.0), sum_w(N + 1, 0.0), tmp(N + 1);
    double peak_term = 1.0;
    bool converged = false;
    for (int n = 0; n < 400; ++n) {
        for (int i = 0; i <= N; ++i) tmp[i] = term[i] * wm[i];
        std::vector<double> G = cumulative_quad(tmp, h);
        for (int i = 0; i <= N; ++i) sum_w[i] += lambda_ * G[i];
        for (int i = 0; i <= N; ++i) tmp[i] = G[i] * wp[i];
        std::vector<double> next = cumulative_quad(tmp, h);
        double sup = 0.0;
        for (int i = 0; i <= N; ++i) {
            term[i] = lambda_ * next[i];
            sum_u[i] += term[i];
            sup = std::max(sup, std::abs(term[i]));
        }
        peak_term = std::max(peak_term, sup);
        double sup_sum = 0.0;
        for (double v : sum_u) sup_sum = std::max(sup_sum, std::abs(v));
        if (sup > 1e60 || !std::isfinite(sup))
            throw method_error("series terms diverging; fall back to the ode method");
        if (sup < 1e-14 * std::max(1.0, sup_sum)) {
            // Catastrophic cancellation leaves no trustworthy digits even
            // when the sum formally converges.
            if (peak_term > 1e10 * std::max(1.0, sup_sum))
                throw method_error("series cancellation too severe; use the ode method");
            converged = true;
            break;
        }
    }
    if (!converged) throw method_error("series did not converge in 400 terms; use the ode method");
    xi_.resize(N + 1);
    for (int i = 0; i <= N; ++i) xi_[i] = i * h;
    u_ = std::move(sum_u);
    w_ = std::move(sum_w);
    u_end_ = u_.back();
    w_end_ = w_.back();
    for (int i = 0; i <= N; ++i) tmp[i] = wp[i] / std::max(u_[i] * u_[i], U_FLOOR);
    S_ = cumulative_quad(tmp, h).back();
}

std::pair<double, double> FundamentalSolution::eval_xi(double xi) const {
    xi = std::clamp(xi, 0.0, xi_end_);
    auto it = std::upper_bound(xi_.begin(), xi_.end(), xi);
    std::size_t i = std::min(std::max<std::size_t>(1, it - xi_.begin()), xi_.size() - 1) - 1;
    double x0 = xi_[i], x1 = xi_[i + 1], hh = x1 - x0;
    if (hh <= 0) return {u_[i], w_[i]};
    auto slope = [&](std::size_t j) {
        double l = width_at_xi(xi_[j]);
        double du = p_mesh_ ? w_[j] : w_[j] / l;
        double dw = p_mesh_ ? 2.0 * lambda_ * l * l * u_[j] : 2.0 * lambda_ * l * u_[j];
        return std::pair<double, double>(du, dw);
    };
    auto [du0, dw0] = slope(i);
    auto [du1, dw1] = slope(i + 1);
    double t = (xi - x0) / hh;
    auto hermite = [&](double y0, double y1, double m0, double m1) {
        double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * hh * m0 +
               (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * hh * m1;
    };
    return {hermite(u_[i], u_[i + 1], du0, du1), hermite(w_[i], w_[i + 1], dw0, dw1)};
}

double FundamentalSolution::value(double x) const {
    double R = profile_.length();
    if (x < -1e-12 || x > R * (1 + 1e-12)) throw domain_error("fundamental: x outside edge");
    x = std::clamp(x, 0.0, R);
    double xi;
    if (!p_mesh_)
        xi = reverse_ ? R - x : x;
    else {
        double p = profile_.scale_p(x);
        xi = reverse_ ? profile_.scale_p(R) - p : p;
    }
    return eval_xi(xi).first;
}

double FundamentalSolution::dp(double x) const {
    double R = profile_.length();
    if (x < -1e-12 || x > R * (1 + 1e-12)) throw domain_error("fundamental: x outside edge");
    x = std::clamp(x, 0.0, R);
    double xi;
    if (!p_mesh_)
        xi = reverse_ ? R - x : x;
    else {
        double p = profile_.scale_p(x);
        xi = reverse_ ? profile_.scale_p(R) - p : p;
    }
    double w = eval_xi(xi).second;
    return reverse_ ? -w : w;
}

double FundamentalSolution::deriv(double x) const {
    double l = profile_.width(std::clamp(x, 0.0, profile_.length()));
    if (l <= 0) throw domain_error("fundamental: derivative at vanishing width");
    return dp(x) / l;
}

double FundamentalSolution::base_width() const {
    return profile_.width(reverse_ ? profile_.length() : 0.0);
}
double FundamentalSolution::end_width() const {
    return profile_.width(reverse_ ? 0.0 : profile_.length());
}

BasicPair basic_pair(const FundamentalSolution& f) {
    if (f.reverse()) throw domain_error("basic_pair: needs a forward fundamental solution");
    BasicPair b;
    b.lambda = f.lambda();
    double A = f.end_value(), W = f.end_dp(), S = f.scale_integral();
    b.u_end = A;
    b.S = S;
    b.l0 = f.base_width();
    b.lR = f.end_width();
    b.du_plus_0 = 1.0 / (b.l0 * A * S);
    b.du_plus_R = (W * S + 1.0 / A) / (b.lR * A * S);
    b.du_minus_0 = -1.0 / (b.l0 * S);
    b.du_minus_R = -1.0 / (b.lR * A * S);
    b.dp_plus_0 = 1.0 / (A * S);
    b.dp_plus_R = (W * S + 1.0 / A) / (A * S);
    b.dp_minus_0 = -1.0 / S;
    b.dp_minus_R = -1.0 / (A * S);
    return b;
}

namespace {

// Partial scale integral int_0^x u^-2 dp for a forward solution, via
// quadrature on the stored trajectory.
double partial_scale(const FundamentalSolution& f, double x) {
    return adaptive_quad(
        [&](double y) {
            double u = f.value(y);
            return 1.0 / (std::max(u * u, U_FLOOR) * f.profile().width(y));
        },
        0.0, x, 1e-10, 1e-14);
}

} // namespace

double BasicPair::value_plus(const FundamentalSolution& f, double x) const {
    return f.value(x) * partial_scale(f, x) / (u_end * S);
}
double BasicPair::value_minus(const FundamentalSolution& f, double x) const {
    return f.value(x) * (S - partial_scale(f, x)) / S;
}

EdgeData solve_edge(const WidthProfile& profile, double lambda, SolveMethod method, bool reverse) {
    FundamentalSolution f(profile, lambda, method, reverse);
    EdgeData d;
    d.u_end = f.end_value();
    d.w_end = f.end_dp();
    d.S = f.scale_integral();
    d.l_base = f.base_width();
    d.l_end = f.end_width();
    d.reverse = reverse;
    return d;
}

TransferCell cell_matrix(const Cell& cell, const EdgeData& spine, const EdgeData& next_spine,
                         const EdgeData* wing, double lambda_q, double check_tol) {
    if (lambda_q > 0) throw domain_error("cell_matrix: lambda must be <= 0");
    if (cell.has_wing() && !wing) throw domain_error("cell_matrix: wing data missing");
    const double alpha = cell.alpha, beta = cell.beta, gamma = cell.gamma;
    const double A = spine.u_end, W = spine.w_end, S = spine.S;
    const double A2 = next_spine.u_end, S2 = next_spine.S;

    TransferCell t;
    t.lambda_q = lambda_q;
    t.spine_length = cell.spine_length;
    t.S_spine = S;
    t.S_next = S2;
    t.S_wing = wing ? wing->S : 0.0;

    // S-integral route.
    double wing_term = 0.0;
    if (cell.has_wing()) {
        if (cell.wing_r > 0) {
            double J = wing->u_end * wing->w_end * wing->S;
            wing_term = A * (S / wing->S) * (J / (1.0 + J));
        } else {
            wing_term = A * S * (wing->w_end / wing->u_end);
        }
    }
    t.x_k = -(A * S) / (A2 * S2);
    t.y_k = 1.0 / A + W * S + wing_term + A * S / S2;

    // Basic-pair route.
    double duM_R = -1.0 / (alpha * A * S);
    double duP_R = (W * S + 1.0 / A) / (alpha * A * S);
    double duP0_next = 1.0 / (beta * A2 * S2);
    double duM0_next = -1.0 / (beta * S2);
    t.x_k_alt = (beta / alpha) * duP0_next / duM_R;
    double y_alt = -duP_R / duM_R + (beta / alpha) * duM0_next / duM_R;
    if (cell.has_wing()) {
        const double Aw = wing->u_end, Ww = wing->w_end, Sw = wing->S;
        if (cell.wing_r > 0) {
            double dpP_tip = (Ww * Sw + 1.0 / Aw) / (Aw * Sw);
            double dpM_tip = -1.0 / (Aw * Sw);
            double duP0_w = 1.0 / (gamma * Aw * Sw);
            double duM0_w = -1.0 / (gamma * Sw);
            double wb = -(dpM_tip / dpP_tip) * duP0_w + duM0_w;
            y_alt += (gamma / alpha) * wb / duM_R;
        } else {
            double duP0_w = (Ww * Sw / gamma + 1.0 / (Aw * gamma)) / (Aw * Sw);
            double duM0_w = -1.0 / (gamma * Aw * Sw);
            double dpP_tip = 1.0 / (Aw * Sw);
            double dpM_tip = -1.0 / Sw;
            double wb = duP0_w - (dpP_tip / dpM_tip) * duM0_w;
            y_alt -= (gamma / alpha) * wb / duM_R;
        }
    }
    t.y_k_alt = y_alt;

    auto rel = [](double a, double b) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
    };
    if (!std::isfinite(t.x_k) || !std::isfinite(t.y_k) || !std::isfinite(t.x_k_alt) ||
        !std::isfinite(t.y_k_alt))
        throw consistency_error("cell_matrix: non-finite transfer entries");
    if (rel(t.x_k, t.x_k_alt) > check_tol || rel(t.y_k, t.y_k_alt) > check_tol) {
        std::ostringstream os;
        os << "cell_matrix: route disagreement x " << t.x_k << " vs " << t.x_k_alt << ", y "
           << t.y_k << " vs " << t.y_k_alt;
        throw consistency_error(os.str());
    }
    if (!(t.x_k < 0.0))
        throw consistency_error("cell_matrix: x_k must be negative");
    if (!(t.y_k >= 1.0 - 1e-12))
        throw consistency_error("cell_matrix: y_k must be >= 1");
    return t;
}

TransferCell cell_matrix(const Cell& cell, const Cell& next_cell, double lambda_q,
                         SolveMethod method, double check_tol) {
    double sigma = -lambda_q;
    EdgeData sp = solve_edge(cell.spine, sigma, method, false);
    EdgeData nx = solve_edge(next_cell.spine, sigma, method, false);
    EdgeData wd;
    const EdgeData* wing = nullptr;
    if (cell.has_wing()) {
        wd = solve_edge(cell.wing_profile(), sigma, method, cell.wing_r < 0);
        wing = &wd;
    }
    return cell_matrix(cell, sp, nx, wing, lambda_q, check_tol);
}

namespace {

std::string edge_key(const WidthProfile& p, bool reverse) {
    std::vector<double> c = p.coeffs();
    c.push_back(p.length());
    c.push_back(p.kind() == WidthProfile::Kind::tip_power ? p.tip_beta() : -1.0);
    std::string key(reinterpret_cast<const char*>(c.data()), c.size() * sizeof(double));
    key.push_back(reverse ? 'r' : 'f');
    return key;
}

} // namespace

TransformResult hitting_transform(const ChannelShape& shape, double lambda_q, Direction dir,
                                  DepthPolicy policy, SolveMethod method, par::Exec exec) {
    if (lambda_q > 0)
        throw domain_error("hitting_transform: lambda must be <= 0 (the transform is infinite "
                           "for positive exponents)");
    const auto& cells = dir == Direction::plus ? shape.pos : shape.neg;
    if (cells.size() < 2) throw domain_error("hitting_transform: need at least 2 cells per side");
    const int avail = static_cast<int>(cells.size()) - 1;
    const int D = policy.report > 0 ? policy.report : avail;
    if (D > avail) throw domain_error("hitting_transform: shape too short for requested depth");

    TransformResult res;
    res.lambda_q = lambda_q;
    res.dir = dir;
    res.spine_lengths.resize(D);
    for (int k = 0; k < D; ++k) res.spine_lengths[k] = cells[k].spine_length;
    res.spine_length_sum = par::fixed_order_sum(res.spine_lengths);

    if (lambda_q == 0.0) {
        // Hitting is certain; every ratio is exactly 1.
        res.rho.assign(D, 1.0);
        res.log_sum = 0.0;
        res.depth_used = D;
        return res;
    }

    const double sigma = -lambda_q;
    std::unordered_map<std::string, EdgeData> cache;
    std::vector<const EdgeData*> spine_data(cells.size(), nullptr);
    std::vector<const EdgeData*> wing_data(cells.size(), nullptr);

    auto ensure_depth = [&](int N) {
        struct Job {
            std::string key;
            WidthProfile profile;
            bool reverse;
        };
        std::vector<Job> jobs;
        std::unordered_map<std::string, bool> pending;
        auto want = [&](const WidthProfile& p, bool rev) {
            std::string key = edge_key(p, rev);
            if (!cache.count(key) && !pending.count(key)) {
                pending.emplace(key, true);
                jobs.push_back({key, p, rev});
            }
        };
        for (int k = 0; k <= N && k < static_cast<int>(cells.size()); ++k)
            want(cells[k].spine, false);
        for (int k = 0; k < N && k < static_cast<int>(cells.size()); ++k)
            if (cells[k].has_wing()) want(cells[k].wing_profile(), cells[k].wing_r < 0);
        std::vector<EdgeData> solved(jobs.size());
        par::for_each(exec, static_cast<std::int64_t>(jobs.size()), [&](std::int64_t i) {
            solved[i] = solve_edge(jobs[i].profile, sigma, method, jobs[i].reverse);
        });
        for (std::size_t i = 0; i < jobs.size(); ++i) cache.emplace(jobs[i].key, solved[i]);
        for (int k = 0; k <= N && k < static_cast<int>(cells.size()); ++k)
            if (!spine_data[k]) spine_data[k] = &cache.at(edge_key(cells[k].spine, false));
        for (int k = 0; k < N && k < static_cast<int>(cells.size()); ++k)
            if (!wing_data[k] && cells[k].has_wing())
                wing_data[k] = &cache.at(edge_key(cells[k].wing_profile(), cells[k].wing_r < 0));
    };

    std::vector<TransferCell> tcells;
    auto ratios_at_depth = [&](int N) {
        ensure_depth(N);
        while (static_cast<int>(tcells.size()) < N) {
            int k = static_cast<int>(tcells.size());
            tcells.push_back(cell_matrix(cells[k], *spine_data[k], *spine_data[k + 1],
                                         wing_data[k], lambda_q));
        }
        std::vector<double> rho(D);
        double r = 0.0; // truncation: u vanishes past depth N
        for (int k = N - 1; k >= 0; --k) {
            r = 1.0 / (tcells[k].x_k * r + tcells[k].y_k);
            if (k < D) rho[k] = r;
        }
        return rho;
    };

    auto rel_diff = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double d = 0.0;
        for (int k = 0; k < D; ++k)
            d = std::max(d, std::abs(a[k] - b[k]) / std::max(b[k], 1e-300));
        return d;
    };
    int N = std::min(avail, std::max(D + policy.min_depth, 64));
    std::vector<double> rho = ratios_at_depth(N);
    bool converged = false;
    while (!converged && N < avail) {
        int N2 = std::min(avail, 2 * N);
        std::vector<double> rho2 = ratios_at_depth(N2);
        double diff = rel_diff(rho2, rho);
        rho = std::move(rho2);
        N = N2;
        converged = diff < policy.tol;
    }
    if (!converged) {
        // Out of cells before the doubling settled. The truncation error
        // decays geometrically in depth, so extrapolate it from two nested
        // tail comparisons.
        int tail = avail - D;
        if (tail < 8)
            throw truncation_error("hitting_transform: no tail room beyond the reported cells; "
                                   "generate a longer shape");
        int n1 = D + tail / 4, n2 = D + tail / 2;
        std::vector<double> r1 = ratios_at_depth(n1);
        std::vector<double> r2 = ratios_at_depth(n2);
        double d1 = rel_diff(r1, rho), d2 = rel_diff(r2, rho);
        double kappa = d1 > 1e-300 ? d2 / d1 : 0.0; // contraction over tail/4 cells
        double err_est = d2 * std::pow(std::min(kappa, 1.0), 2.0);
        if (!(err_est < policy.tol) && !(d2 < policy.tol))
            throw truncation_error("hitting_transform: ratios not converged at the available "
                                   "depth; generate a longer shape");
    }

    res.rho = rho;
    res.depth_used = N;
    res.x_k.resize(D);
    res.y_k.resize(D);
    for (int k = 0; k < D; ++k) {
        res.x_k[k] = tcells[k].x_k;
        res.y_k[k] = tcells[k].y_k;
    }
    std::vector<double> logs(D);
    for (int k = 0; k < D; ++k) {
        if (!(rho[k] > 0.0 && rho[k] <= 1.0 + 1e-12))
            throw consistency_error("hitting_transform: ratio outside (0,1]");
        logs[k] = std::log(rho[k]);
    }
    res.log_sum = par::fixed_order_sum(logs);
    return res;
}

namespace {

// Spine-level prefix data on the positive side.
struct SpinePrefix {
    std::vector<double> x;    // junction positions, x[0] = 0
    std::vector<double> p;    // scale integral up to x[k]
    std::vector<double> half_m; // int l dy up to x[k]
    const std::vector<Cell>* cells;
};

SpinePrefix spine_prefix(const ChannelShape& shape) {
    SpinePrefix sp;
    sp.cells = &shape.pos;
    sp.x.push_back(0.0);
    sp.p.push_back(0.0);
    sp.half_m.push_back(0.0);
    for (const auto& c : shape.pos) {
        sp.x.push_back(sp.x.back() + c.spine_length);
        sp.p.push_back(sp.p.back() + c.spine.scale_p(c.spine_length));
        sp.half_m.push_back(sp.half_m.back() + 0.5 * c.spine.speed_m(c.spine_length));
    }
    return sp;
}

double prefix_scale(const SpinePrefix& sp, double x) {
    auto it = std::upper_bound(sp.x.begin(), sp.x.end(), x);
    std::size_t k = std::min<std::size_t>(std::max<std::ptrdiff_t>(1, it - sp.x.begin()),
                                          sp.x.size() - 1) - 1;
    return sp.p[k] + (*sp.cells)[k].spine.scale_p(x - sp.x[k]);
}

} // namespace

double hit_probability(const ChannelShape& shape, double x, double A) {
    SpinePrefix sp = spine_prefix(shape);
    if (!(0 < x && x < A)) throw domain_error("hit_probability: need 0 < x < A");
    if (A > sp.x.back() + 1e-12) throw domain_error("hit_probability: A beyond the sampled shape");
    return prefix_scale(sp, x) / prefix_scale(sp, A);
}

double expected_exit_time(const ChannelShape& shape, double x, double A) {
    SpinePrefix sp = spine_prefix(shape);
    if (!(0 < x && x < A)) throw domain_error("expected_exit_time: need 0 < x < A");
    if (A > sp.x.back() + 1e-12)
        throw domain_error("expected_exit_time: A beyond the sampled shape");
    // K(y) = int_0^y (1/l(s)) M(s) ds with M(s) = int_0^s l.
    auto K = [&](double y) {
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < sp.x.size(); ++k) {
            if (sp.x[k] >= y) break;
            double hi = std::min(y, sp.x[k + 1]);
            const Cell& c = (*sp.cells)[k];
            double m0 = sp.half_m[k];
            acc += adaptive_quad(
                [&](double s) {
                    double t = s - sp.x[k];
                    return (m0 + 0.5 * c.spine.speed_m(t)) / c.spine.width(t);
                },
                sp.x[k], hi, 1e-11, 1e-14);
        }
        return acc;
    };
    double PA = prefix_scale(sp, A), Px = prefix_scale(sp, x);
    return -2.0 * K(x) + 2.0 * K(A) / PA * Px;
}

void write_cell_table_csv(const TransformResult& r, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw domain_error("write_cell_table_csv: cannot open " + path);
    f.precision(17);
    f << "k,x_k,y_k,rho,ln_rho,spine_length\n";
    for (std::size_t k = 0; k < r.rho.size(); ++k) {
        double xk = k < r.x_k.size() ? r.x_k[k] : 0.0;
        double yk = k < r.y_k.size() ? r.y_k[k] : 1.0;
        f << k << "," << xk << "," << yk << "," << r.rho[k] << "," << std::log(r.rho[k]) << ","
          << r.spine_lengths[k] << "\n";
    }
}

void write_transform_curve_csv(const std::vector<double>& lambda,
                               const std::vector<double>& log_sum, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw domain_error("write_transform_curve_csv: cannot open " + path);
    f.precision(17);
    f << "lambda,log_transform\n";
    for (std::size_t i = 0; i < lambda.size(); ++i) f << lambda[i] << "," << log_sum[i] << "\n";
}

} // namespace chanfront
