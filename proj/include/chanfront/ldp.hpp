#pragma once

#include <string>
#include <vector>

#include "chanfront/channel.hpp"
#include "chanfront/sturm.hpp"

namespace chanfront {

// Sampled Lyapunov exponent mu(lambda) of the hitting transform, per unit
// spine length, on an increasing lambda grid (all <= 0). mu(0) = 0 exactly,
// mu < 0 for lambda < 0, and mu is convex.
struct SpectralCurve {
    Direction dir = Direction::plus;
    std::vector<double> lambda;
    std::vector<double> mu;
    std::vector<double> se;       // batch-means standard error of each mu value
    double mean_cell_length = 0.0;
    int n_cells = 0;
};

// Geometric grid from lambda_min up to lambda_max_neg (both < 0), densified
// toward 0 in log spacing, with 0 appended.
std::vector<double> default_lambda_grid(int points = 60, double lambda_min = -10.0,
                                        double lambda_max_neg = -1e-4);

SpectralCurve mu_curve(const ChannelShape& shape, const std::vector<double>& lambda_grid,
                       Direction dir, int n_cells, SolveMethod method = SolveMethod::ode,
                       par::Exec exec = par::Exec::parallel);

// Legendre transform I(a) = sup_{lambda<=0} (a*lambda - mu(lambda)) with the
// maximizing lambda; grid_limited marks a supremum attained at the most
// negative grid point (grid too short for this a).
struct RateResult {
    double value = 0.0;
    double lambda_star = 0.0;
    bool grid_limited = false;
};
RateResult rate(const SpectralCurve& curve, double a);

// Front speeds: the unique roots of c * I(1/c) = f'(0) on each side.
struct FrontSpeeds {
    double c_plus = 0.0, c_minus = 0.0;
    double residual_plus = 0.0, residual_minus = 0.0;
    double fprime0 = 0.0;
};
FrontSpeeds speeds(const SpectralCurve& plus, const SpectralCurve& minus, double fprime0);

void write_mu_csv(const SpectralCurve& curve, const std::string& path);
void write_rate_csv(const SpectralCurve& curve, const std::vector<double>& a_grid,
                    const std::string& path);
void write_speeds_csv(const FrontSpeeds& s, const std::string& path);

} // namespace chanfront
