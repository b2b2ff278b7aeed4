#pragma once

#include <memory>
#include <string>
#include <vector>

#include "chanfront/channel.hpp"
#include "chanfront/parallel.hpp"
#include "chanfront/profile.hpp"

namespace chanfront {

enum class SolveMethod { series, ode };
enum class Direction { plus, minus };

// Fundamental solution of the edge equation D_m D_p u = lambda * u with
// u = 1 and D_p u = 0 at the base endpoint. lambda is the Sturm-Liouville
// eigenparameter: hitting transforms at exponent lq <= 0 solve with
// lambda = -lq >= 0, where u is increasing and >= 1 away from the base.
//
// reverse = false: base at local 0. reverse = true: base at local length
// (used for wings whose no-flux tip is the far end). Tip-vanishing profiles
// are integrated in the scale variable, which absorbs the 1/l endpoint
// singularity; other profiles integrate in x.
class FundamentalSolution {
public:
    FundamentalSolution(const WidthProfile& profile, double lambda, SolveMethod method,
                        bool reverse = false);

    double lambda() const { return lambda_; }
    SolveMethod method() const { return method_; }
    bool reverse() const { return reverse_; }
    const WidthProfile& profile() const { return profile_; }

    // Values in the profile's own local coordinate.
    double value(double x) const;
    double dp(double x) const;    // D_p u, signed in the local orientation
    double deriv(double x) const; // du/dx

    // Values at the endpoint opposite the base, in integration orientation
    // (D_p taken along the direction pointing away from the base).
    double end_value() const { return u_end_; }
    double end_dp() const { return w_end_; }

    // S = integral of u^-2 dp over the edge (positive for either base).
    double scale_integral() const { return S_; }

    double base_width() const;
    double end_width() const;

private:
    WidthProfile profile_;
    double lambda_;
    SolveMethod method_;
    bool reverse_;
    bool p_mesh_ = false;
    double xi_end_ = 0.0; // mesh extent (edge length or total scale length)
    std::vector<double> xi_, u_, w_; // integration-orientation samples
    double u_end_ = 1.0, w_end_ = 0.0, S_ = 0.0;

    double width_at_xi(double xi) const;
    void solve_ode();
    void solve_series();
    std::pair<double, double> eval_xi(double xi) const; // (u, w) at mesh coordinate
};

// Normalized basic pair on an edge: u_plus(0) = u_minus(R) = 0,
// u_plus(R) = u_minus(0) = 1, together with the endpoint derivatives the
// junction algebra needs. Built from a forward fundamental solution.
struct BasicPair {
    double lambda;
    double u_end, S; // fundamental at the far end, scale integral
    double l0, lR;   // widths at the two endpoints
    double du_plus_0, du_plus_R, du_minus_0, du_minus_R; // d/dx
    double dp_plus_0, dp_plus_R, dp_minus_0, dp_minus_R; // D_p

    double value_plus(const FundamentalSolution& f, double x) const;
    double value_minus(const FundamentalSolution& f, double x) const;
};
BasicPair basic_pair(const FundamentalSolution& forward);

// Everything the junction algebra needs from one edge at one lambda.
struct EdgeData {
    double u_end = 1.0; // fundamental solution at the far end of integration
    double w_end = 0.0; // D_p u there, integration orientation
    double S = 0.0;     // scale integral of u^-2
    double l_base = 0.0, l_end = 0.0;
    bool reverse = false;
};
EdgeData solve_edge(const WidthProfile& profile, double lambda, SolveMethod method,
                    bool reverse = false);

// One cell of the junction transfer recursion at exponent lambda_q <= 0:
// coefficients across the junction satisfy
//   c_prev = M c_next,  M = [[0, 1], [x_k, y_k]].
// x_k and y_k are computed along two algebraically independent routes
// (basic-pair endpoint derivatives vs the S-integral forms) and must agree.
struct TransferCell {
    int index = 0;
    double lambda_q = 0.0;
    double x_k = 0.0, y_k = 0.0;         // S-form (production values)
    double x_k_alt = 0.0, y_k_alt = 0.0; // basic-pair form
    double S_spine = 0.0, S_next = 0.0, S_wing = 0.0;
    double spine_length = 0.0;
};

TransferCell cell_matrix(const Cell& cell, const EdgeData& spine, const EdgeData& next_spine,
                         const EdgeData* wing, double lambda_q, double check_tol = 1e-9);

// Convenience: solves the three edges itself.
TransferCell cell_matrix(const Cell& cell, const Cell& next_cell, double lambda_q,
                         SolveMethod method = SolveMethod::ode, double check_tol = 1e-9);

struct DepthPolicy {
    int report = 0;      // number of leading cells to report (0: all available)
    double tol = 1e-12;  // fixed-point tolerance on the reported ratios
    int min_depth = 32;  // first truncation depth beyond the reported cells
};

// Laplace transform of spine hitting times: per-cell ratios rho_k in (0,1]
// with  E[e^{lq * T(0 <- L_j)}] = prod_{i<j} rho_i, lq <= 0. The far-end
// boundary condition is realized by truncating at depth N with rho_N = 0 and
// doubling N until the reported ratios are stable.
struct TransformResult {
    double lambda_q = 0.0;
    Direction dir = Direction::plus;
    std::vector<double> rho;
    std::vector<double> x_k, y_k; // transfer entries of the reported cells
    std::vector<double> spine_lengths;
    double log_sum = 0.0;          // sum of ln rho over reported cells
    double spine_length_sum = 0.0; // total spine length of reported cells
    int depth_used = 0;
};

TransformResult hitting_transform(const ChannelShape& shape, double lambda_q, Direction dir,
                                  DepthPolicy policy = {}, SolveMethod method = SolveMethod::ode,
                                  par::Exec exec = par::Exec::parallel);

// Probability that the spine diffusion started at x reaches A before 0
// (scale-function ratio; the complementary probability 1 - p(x)/p(A) is the
// hit-0-first probability).
double hit_probability(const ChannelShape& shape, double x, double A);

// Expected exit time of the spine-only (main-channel proper time) process
// from (0, A) started at x; grows without bound as A increases.
double expected_exit_time(const ChannelShape& shape, double x, double A);

// CSV emitters.
void write_cell_table_csv(const TransformResult& r, const std::string& path);
void write_transform_curve_csv(const std::vector<double>& lambda,
                               const std::vector<double>& log_sum, const std::string& path);

} // namespace chanfront
