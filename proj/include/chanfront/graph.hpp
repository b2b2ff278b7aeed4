#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chanfront/channel.hpp"

namespace chanfront {

struct GraphEdge {
    int id = -1;
    bool is_wing = false;
    int side = +1; // +1 for x >= 0, -1 for x <= 0
    int cell = 0;  // cell index on that side
    WidthProfile profile = WidthProfile::constant(1.0, 1.0);
    // Spine edges: local coordinate increases with global x, global_x0 at the
    // left end. Wing edges: local coordinate measured from the attachment
    // (tip at local length), global x = global_x0 + x_sign * local.
    double global_x0 = 0.0;
    int x_sign = +1;
    int v0 = -1, v1 = -1; // vertices at local 0 and local length

    double length() const { return profile.length(); }
    double global_x(double local) const { return global_x0 + x_sign * local; }
};

struct GraphVertex {
    enum class Kind { seam, junction, tip };
    int id = -1;
    Kind kind = Kind::junction;
    double x = 0.0; // global x
    struct Leg {
        int edge;
        int end;       // 0: vertex sits at edge local 0, 1: at local length
        double weight; // one-sided width limit along that edge
    };
    std::vector<Leg> legs;
};

// The metric graph of a channel shape: the spine pieces chained along the
// x axis plus one dead-end wing edge per junction. The point x = 0 is a
// seam node (the two sides of the shape abut there), not a junction.
struct MetricGraph {
    std::vector<GraphEdge> edges;
    std::vector<GraphVertex> vertices;
    std::vector<int> spine_pos, spine_neg; // spine edge ids marching away from 0
    int seam_vertex = -1;
    double x_min = 0.0, x_max = 0.0;

    struct Measures {
        double p, m, dp_dx, dm_dx;
    };
    // Scale/speed values at an edge-local coordinate.
    Measures measures(int edge_id, double local_x) const;

    int spine_edge_at(double x) const; // spine edge id containing global x

    // Width of the main channel at global x.
    double spine_width(double x) const;

    // Signed spine-level scale and speed integrals from 0 to x.
    double spine_scale(double x) const;
    double spine_speed(double x) const;

    std::string dump() const;
};

MetricGraph build_graph(const ChannelShape& shape);

// Identification map for rectangular-mode shapes: the graph point whose tube
// contains the 2D point (x, z). A point exactly on a branch cross-section
// maps to the spine. Throws domain_error outside the domain.
std::pair<double, int> identify(const MetricGraph& graph, const ChannelShape& shape,
                                double x, double z);

// CSV with (edge, x_local, x_global, l, p, m) sampled along every edge.
void write_edge_csv(const MetricGraph& graph, const std::string& path, int samples_per_edge = 33);

} // namespace chanfront
