#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chanfront/graph.hpp"
#include "chanfront/parallel.hpp"
#include "chanfront/rng.hpp"

namespace chanfront {

// Euler-Maruyama walker on the metric graph. Interior steps follow
// dX = (l'/2l) dt + dW on the current edge; within a shell of radius h
// around a vertex the walker jumps to distance h along an incident edge
// chosen with probability proportional to the width weights, and time
// advances by the mean shell-exit time (h^2 at a junction, h^2/(1+beta) at
// a vanishing tip). Wing edges shorter than a few step lengths use a
// locally reduced dt so the shell construction stays valid.
struct WalkerConfig {
    double dt = 0.01;
    double shell_factor = 1.0; // h = shell_factor * sqrt(dt), capped by edge lengths
    double horizon = 0.0;      // 0: choose from the travel distance
    double max_censoring = 0.95;
    std::uint64_t seed = 12345;
};

struct GraphState {
    int edge = 0;
    double x = 0.0; // edge-local coordinate
    double t = 0.0;
};

struct HitSample {
    double t = 0.0;
    bool censored = false;
};

struct StepInfo {
    bool shell_hop = false;
    double dt_used = 0.0; // time charged by this step
};

// One step; advances state.t by the local time increment.
StepInfo step(GraphState& state, const MetricGraph& graph, const WalkerConfig& cfg,
              RngStream& rng);

// Index into vertex.legs, chosen with probability weight/sum(weights).
int choose_leg(const GraphVertex& v, RngStream& rng);

// Mean exit time of a one-sided shell of radius h at a vertex.
double shell_exit_time(const GraphVertex& v, const MetricGraph& graph, double h);

struct HitStats {
    std::vector<HitSample> samples;
    double censor_rate = 0.0;
    double mean_t = 0.0; // over finite samples
};

// First time the spine coordinate passes target_x (from above if
// target_x < start_x, from below otherwise) while the walker is on the
// spine. n_paths independent counter-keyed streams.
HitStats sample_hit(const MetricGraph& graph, double start_x, double target_x,
                    const WalkerConfig& cfg, int n_paths, par::Exec exec = par::Exec::parallel);

// Probability of reaching b before a from start (a < start < b), by
// simulation; used against the scale-function formula.
double hit_before_frequency(const MetricGraph& graph, double start_x, double a, double b,
                            const WalkerConfig& cfg, int n_paths,
                            par::Exec exec = par::Exec::parallel);

// Monte Carlo estimate of q(r,s,lambda) = E[e^{lambda T_r^s} 1{T < infinity}],
// lambda <= 0. Censored paths contribute the bracket [0, e^{lambda*horizon}].
struct QEstimate {
    double value = 0.0; // lower (censored-to-zero) estimate
    double se = 0.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    double censor_rate = 0.0;
    int n_paths = 0;
};
QEstimate estimate_q(const MetricGraph& graph, double r, double s, double lambda_q,
                     const WalkerConfig& cfg, int n_paths, par::Exec exec = par::Exec::parallel);

// Same transform over a long stretch via the strong-Markov factorization
// over junction-to-junction passages: the product of per-segment estimates
// stays unbiased while keeping the per-segment variance bounded. Direct
// estimation over many cells has exponentially growing relative variance.
QEstimate estimate_q_chain(const MetricGraph& graph, double r, double s, double lambda_q,
                           const WalkerConfig& cfg, int n_paths_per_segment,
                           par::Exec exec = par::Exec::parallel);

// Horizon making the censoring bracket negligible next to e^{-dist*sqrt(-2 lambda)}.
double suggested_horizon(double distance, double lambda_q, double bracket_tol = 1e-8);

// Feynman-Kac solution of u = E[exp(int c(u)) g] on the graph, by windowed
// Picard iteration over frozen (counter-keyed, replayable) paths.
struct FkConfig {
    double dt = 0.005;
    double grid_dx = 0.25;
    double window = 0.1;   // Picard window length
    int max_picard = 8;
    double picard_tol = 5e-4;
    int n_paths = 400;
    std::uint64_t seed = 777;
};

struct FkResult {
    std::vector<double> eval_x;
    std::vector<double> u;             // at the requested spine points, final time
    std::vector<double> max_delta;     // Picard deltas per window (last iteration)
    double max_overshoot = 0.0;        // worst excursion of u outside [0,1]
    int windows = 0;
};

FkResult feynman_kac(const MetricGraph& graph, const std::function<double(double)>& g,
                     const std::function<double(double)>& f, double fprime0, double t,
                     const std::vector<double>& eval_x, const FkConfig& cfg,
                     par::Exec exec = par::Exec::parallel);

void write_hit_samples_csv(const HitStats& h, const std::string& path);

} // namespace chanfront
