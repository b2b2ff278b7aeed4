#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chanfront/profile.hpp"

namespace chanfront {

struct GeneratorParams {
    double spine_len_lo = 1.0;  // L bounds for one cell of the main channel
    double spine_len_hi = 1.5;
    double width_base = 1.0;    // pinned width at the inflow end of every spine piece
    double width_min = 0.7;
    double width_max = 1.3;
    double amplitude = 0.25;    // cap on the total trig deviation 2*sum|a_j|
    int trig_degree = 2;
    double wing_max = 0.5;      // A1: bound on |wing_r| and on wing widths
    double wing_r_min_frac = 0.05;
    double tip_beta = 0.5;
    bool rectangular = false;   // piecewise-constant widths for the 2D solver
    double rect_quantum = 0.1;  // width/length lattice in rectangular mode

    void check() const; // throws domain_error naming the violated constraint
};

// One cell: a spine piece plus the junction at its outward end, where a wing
// may attach. alpha is the spine width just before the junction, beta just
// after, gamma the wing width at the attachment; cross-section conservation
// alpha - beta = sign(wing_r) * gamma holds exactly. gamma == 0 marks the
// degenerate wingless junction (continuous spine width).
struct Cell {
    double spine_length = 1.0;
    WidthProfile spine = WidthProfile::constant(1.0, 1.0);
    double wing_r = 0.0;    // signed projection of the wing onto the x axis
    double wing_scale = 0.0; // width at the attachment; equals gamma
    double tip_beta = 0.5;  // 0 => constant-width (rectangular) wing
    double alpha = 1.0, beta = 1.0, gamma = 0.0;

    bool has_wing() const { return gamma > 0.0; }
    // Wing width profile in attachment-based coordinates [0, |wing_r|]
    // (the tip is always the far end).
    WidthProfile wing_profile() const;
};

// Cells for x >= 0 and, in the reflected frame, for x <= 0. Each side is
// stored marching away from the origin, so mirroring the geometry is a swap
// of the two lists.
struct ChannelShape {
    std::vector<Cell> pos, neg;
    std::uint64_t seed = 0;
    GeneratorParams params;

    std::size_t n_cells() const { return pos.size(); }
};

ChannelShape sample_channel(const GeneratorParams& params, std::uint64_t seed, int n_cells);

// x -> -x reflection. Involutive.
ChannelShape mirror(const ChannelShape& shape);

// The same cell expressed in the reflected frame: spine traversed the other
// way, wing projection negated, junction widths swapped.
Cell mirrored_cell(const Cell& c);

// Invariant check; empty result means the shape is valid. Violations name
// the side, cell index and constraint.
std::vector<std::string> validate(const ChannelShape& shape, int grid_points = 129);

// Channel file, format "channel/1" (JSON; numbers round-trip exactly).
std::string to_json(const ChannelShape& shape);
ChannelShape shape_from_json(const std::string& text);
void save_channel(const ChannelShape& shape, const std::string& path);
ChannelShape load_channel(const std::string& path);

// Constant-width channel with exactly conserving tiny wings (gamma = tiny);
// indistinguishable from a wingless flat channel up to O(tiny) but exercising
// the full junction machinery.
ChannelShape flat_channel(int n_cells, double width = 1.0, double cell_len = 1.0,
                          double tiny = 1e-9, std::uint64_t seed = 1);

} // namespace chanfront
