#include "chanfront/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "chanfront/errors.hpp"
#include "chanfront/quad.hpp"

namespace chanfront {

std::vector<double> default_lambda_grid(int points, double lambda_min, double lambda_max_neg) {
    if (!(lambda_min < lambda_max_neg && lambda_max_neg < 0))
        throw domain_error("lambda grid: need lambda_min < lambda_max_neg < 0");
    std::vector<double> g(points + 1);
    for (int i = 0; i < points; ++i)
        g[i] = lambda_min * std::pow(lambda_max_neg / lambda_min, double(i) / (points - 1));
    g[points] = 0.0;
    return g;
}

SpectralCurve mu_curve(const ChannelShape& shape, const std::vector<double>& lambda_grid,
                       Direction dir, int n_cells, SolveMethod method, par::Exec exec) {
    if (lambda_grid.empty()) throw domain_error("mu_curve: empty lambda grid");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (lambda_grid[i] > 0) throw domain_error("mu_curve: lambda must be <= 0");
        if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1]))
            throw domain_error("mu_curve: lambda grid must be strictly increasing");
    }
    SpectralCurve c;
    c.dir = dir;
    c.lambda = lambda_grid;
    c.mu.resize(lambda_grid.size());
    c.se.resize(lambda_grid.size());
    c.n_cells = n_cells;
    DepthPolicy policy;
    policy.report = n_cells;
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        TransformResult t = hitting_transform(shape, lambda_grid[i], dir, policy, method, exec);
        c.mu[i] = t.log_sum / t.spine_length_sum;
        // Batch means over contiguous blocks of cells.
        int B = std::max(2, std::min(16, n_cells / 16));
        if (lambda_grid[i] == 0.0 || n_cells < 2 * B) {
            c.se[i] = 0.0;
        } else {
            std::vector<double> bm;
            int per = n_cells / B;
            for (int b = 0; b < B; ++b) {
                double ls = 0, len = 0;
                for (int k = b * per; k < (b + 1) * per; ++k) {
                    ls += std::log(t.rho[k]);
                    len += t.spine_lengths[k];
                }
                bm.push_back(ls / len);
            }
            double mean = 0;
            for (double v : bm) mean += v;
            mean /= B;
            double var = 0;
            for (double v : bm) var += (v - mean) * (v - mean);
            var /= (B - 1);
            c.se[i] = std::sqrt(var / B);
        }
        c.mean_cell_length = t.spine_length_sum / n_cells;
    }
    return c;
}

RateResult rate(const SpectralCurve& curve, double a) {
    if (!(a > 0)) throw domain_error("rate: a must be positive");
    const auto& L = curve.lambda;
    const auto& M = curve.mu;
    if (L.size() < 3) throw domain_error("rate: curve too short");
    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < L.size(); ++i) {
        double v = a * L[i] - M[i];
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    RateResult r;
    r.value = best_v;
    r.lambda_star = L[best];
    if (best == 0) {
        r.grid_limited = true; // supremum at the most negative grid end
        return r;
    }
    // Local quadratic refinement through the three bracketing samples.
    std::size_t i0 = std::min(best, L.size() - 2);
    if (best == L.size() - 1) i0 = L.size() - 2;
    double x0 = L[i0 - 1], x1 = L[i0], x2 = L[i0 + 1];
    auto phi = [&](std::size_t i) { return a * L[i] - M[i]; };
    double f0 = phi(i0 - 1), f1 = phi(i0), f2 = phi(i0 + 1);
    double d01 = (f1 - f0) / (x1 - x0), d12 = (f2 - f1) / (x2 - x1);
    double c2 = (d12 - d01) / (x2 - x0); // half the second derivative
    if (c2 < 0) {
        // Vertex of the interpolating parabola in Newton form.
        double vx = 0.5 * (x0 + x1) - d01 / (2.0 * c2);
        if (vx > x0 && vx < x2 && vx <= 0.0) {
            double vv = f0 + d01 * (vx - x0) + c2 * (vx - x0) * (vx - x1);
            if (vv >= best_v) {
                r.value = vv;
                r.lambda_star = vx;
            }
        }
    }
    return r;
}

FrontSpeeds speeds(const SpectralCurve& plus, const SpectralCurve& minus, double fprime0) {
    if (!(fprime0 > 0)) throw domain_error("speeds: f'(0) must be positive");
    auto solve_side = [&](const SpectralCurve& curve, double& c_out, double& resid_out) {
        auto F = [&](double c) { return c * rate(curve, 1.0 / c).value - fprime0; };
        double lo = 0.05, hi = 1.0;
        int guard = 0;
        while (F(hi) < 0) {
            hi *= 2.0;
            if (++guard > 60) throw bracket_error("speeds: no upper bracket for c*");
        }
        guard = 0;
        while (F(lo) > 0) {
            lo *= 0.5;
            if (++guard > 60) throw bracket_error("speeds: no lower bracket for c*");
        }
        // c * I(1/c) must be increasing on the bracket.
        double prev = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 4; ++i) {
            double c = lo * std::pow(hi / lo, i / 4.0);
            double v = F(c);
            if (v < prev - 1e-9 * (std::abs(v) + 1))
                throw consistency_error("speeds: c * I(1/c) is not increasing");
            prev = v;
        }
        double c = brent_root(F, lo, hi, 1e-12);
        c_out = c;
        resid_out = std::abs(F(c)) / fprime0;
        if (rate(curve, 1.0 / c).grid_limited)
            throw grid_error("speeds: maximizer off the sampled lambda grid; extend the grid");
    };
    FrontSpeeds s;
    s.fprime0 = fprime0;
    double cp = 0, rp = 0, cm = 0, rm = 0;
    solve_side(plus, cp, rp);
    solve_side(minus, cm, rm);
    s.c_plus = cp;
    s.residual_plus = rp;
    s.c_minus = -cm;
    s.residual_minus = rm;
    return s;
}

void write_mu_csv(const SpectralCurve& curve, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw domain_error("write_mu_csv: cannot open " + path);
    f.precision(17);
    f << "lambda,mu,se\n";
    for (std::size_t i = 0; i < curve.lambda.size(); ++i)
        f << curve.lambda[i] << "," << curve.mu[i] << "," << curve.se[i] << "\n";
}

void write_rate_csv(const SpectralCurve& curve, const std::vector<double>& a_grid,
                    const std::string& path) {
    std::ofstream f(path);
    if (!f) throw domain_error("write_rate_csv: cannot open " + path);
    f.precision(17);
    f << "a,I,lambda_star,grid_limited\n";
    for (double a : a_grid) {
        RateResult r = rate(curve, a);
        f << a << "," << r.value << "," << r.lambda_star << "," << (r.grid_limited ? 1 : 0) << "\n";
    }
}

void write_speeds_csv(const FrontSpeeds& s, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw domain_error("write_speeds_csv: cannot open " + path);
    f.precision(17);
    f << "c_plus,c_minus,residual_plus,residual_minus,fprime0\n";
    f << s.c_plus << "," << s.c_minus << "," << s.residual_plus << "," << s.residual_minus << ","
      << s.fprime0 << "\n";
}

} // namespace chanfront
