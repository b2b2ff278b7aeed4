#include "chanfront/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "chanfront/errors.hpp"

namespace chanfront {

MetricGraph build_graph(const ChannelShape& shape) {
    auto violations = validate(shape);
    if (!violations.empty()) {
        std::ostringstream os;
        os << "build_graph: invalid shape: " << violations.front();
        if (violations.size() > 1) os << " (+" << violations.size() - 1 << " more)";
        throw domain_error(os.str());
    }

    MetricGraph g;
    auto add_vertex = [&](GraphVertex::Kind kind, double x) {
        GraphVertex v;
        v.id = static_cast<int>(g.vertices.size());
        v.kind = kind;
        v.x = x;
        g.vertices.push_back(v);
        return v.id;
    };
    auto add_leg = [&](int vid, int edge, int end, double weight) {
        g.vertices[vid].legs.push_back({edge, end, weight});
    };

    g.seam_vertex = add_vertex(GraphVertex::Kind::seam, 0.0);

    for (int side : {+1, -1}) {
        const auto& cells = side > 0 ? shape.pos : shape.neg;
        auto& spine_ids = side > 0 ? g.spine_pos : g.spine_neg;
        int prev_vertex = g.seam_vertex;
        double dist = 0.0; // distance of the inner end from the origin
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const Cell& c = cells[k];
            double R = c.spine_length;
            int vj = add_vertex(GraphVertex::Kind::junction, side * (dist + R));

            GraphEdge e;
            e.id = static_cast<int>(g.edges.size());
            e.is_wing = false;
            e.side = side;
            e.cell = static_cast<int>(k);
            if (side > 0) {
                e.profile = c.spine;
                e.global_x0 = dist;
                e.x_sign = +1;
                e.v0 = prev_vertex;
                e.v1 = vj;
                add_leg(prev_vertex, e.id, 0, c.spine.width(0.0));
                add_leg(vj, e.id, 1, c.alpha);
            } else {
                e.profile = c.spine.reversed();
                e.global_x0 = -(dist + R);
                e.x_sign = +1;
                e.v0 = vj;
                e.v1 = prev_vertex;
                add_leg(vj, e.id, 0, c.alpha);
                add_leg(prev_vertex, e.id, 1, c.spine.width(0.0));
            }
            g.edges.push_back(e);
            spine_ids.push_back(e.id);

            if (c.has_wing()) {
                GraphEdge w;
                w.id = static_cast<int>(g.edges.size());
                w.is_wing = true;
                w.side = side;
                w.cell = static_cast<int>(k);
                w.profile = c.wing_profile();
                w.global_x0 = side * (dist + R);
                // Mirrored frame flips the projection direction.
                w.x_sign = (c.wing_r >= 0 ? +1 : -1) * side;
                w.v0 = vj;
                int vt = add_vertex(GraphVertex::Kind::tip,
                                    w.global_x0 + w.x_sign * w.profile.length());
                w.v1 = vt;
                add_leg(vj, w.id, 0, c.gamma);
                add_leg(vt, w.id, 1, w.profile.width(w.profile.length()));
                g.edges.push_back(w);
            }

            prev_vertex = vj;
            dist += R;
        }
        if (side > 0)
            g.x_max = dist;
        else
            g.x_min = -dist;
    }
    return g;
}

MetricGraph::Measures MetricGraph::measures(int edge_id, double local_x) const {
    if (edge_id < 0 || edge_id >= static_cast<int>(edges.size()))
        throw domain_error("measures: no such edge");
    const GraphEdge& e = edges[edge_id];
    if (local_x < -1e-12 || local_x > e.length() * (1 + 1e-12))
        throw domain_error("measures: x outside edge interval");
    local_x = std::clamp(local_x, 0.0, e.length());
    double l = e.profile.width(local_x);
    return {e.profile.scale_p(local_x), e.profile.speed_m(local_x),
            l > 0 ? 1.0 / l : std::numeric_limits<double>::infinity(), 2.0 * l};
}

int MetricGraph::spine_edge_at(double x) const {
    if (x < x_min - 1e-12 || x > x_max + 1e-12) throw domain_error("spine_edge_at: x outside shape");
    const auto& ids = x >= 0 ? spine_pos : spine_neg;
    double d = std::abs(x);
    for (int id : ids) {
        const GraphEdge& e = edges[id];
        double lo = std::min(std::abs(e.global_x(0.0)), std::abs(e.global_x(e.length())));
        double hi = std::max(std::abs(e.global_x(0.0)), std::abs(e.global_x(e.length())));
        if (d <= hi + 1e-12 && d >= lo - 1e-12) return id;
    }
    return ids.back();
}

double MetricGraph::spine_width(double x) const {
    const GraphEdge& e = edges[spine_edge_at(x)];
    return e.profile.width(std::clamp(x - e.global_x0, 0.0, e.length()));
}

namespace {

double spine_integral(const MetricGraph& g, double x, bool scale) {
    if (x == 0.0) return 0.0;
    const auto& ids = x > 0 ? g.spine_pos : g.spine_neg;
    double d = std::abs(x), acc = 0.0, covered = 0.0;
    for (int id : ids) {
        const auto& e = g.edges[id];
        double R = e.length();
        // Local coordinate of the inner (origin-facing) end.
        bool inner_at_0 = x > 0;
        if (covered + R >= d - 1e-12) {
            double t = std::min(d - covered, R);
            double part;
            if (inner_at_0)
                part = scale ? e.profile.scale_p(t) : e.profile.speed_m(t);
            else
                part = scale ? e.profile.scale_p(R) - e.profile.scale_p(R - t)
                             : e.profile.speed_m(R) - e.profile.speed_m(R - t);
            acc += part;
            return (x > 0 ? acc : -acc);
        }
        acc += scale ? e.profile.scale_p(R) : e.profile.speed_m(R);
        covered += R;
    }
    throw domain_error("spine integral: x outside shape");
}

} // namespace

double MetricGraph::spine_scale(double x) const { return spine_integral(*this, x, true); }
double MetricGraph::spine_speed(double x) const { return spine_integral(*this, x, false); }

std::string MetricGraph::dump() const {
    std::ostringstream os;
    os << "edges " << edges.size() << " vertices " << vertices.size() << "\n";
    for (const auto& e : edges) {
        os << "edge " << e.id << (e.is_wing ? " wing" : " spine") << " side " << e.side
           << " cell " << e.cell << " len " << e.length() << " x0 " << e.global_x0
           << " sign " << e.x_sign << " v " << e.v0 << "-" << e.v1 << "\n";
    }
    for (const auto& v : vertices) {
        os << "vertex " << v.id << " "
           << (v.kind == GraphVertex::Kind::seam
                   ? "seam"
                   : v.kind == GraphVertex::Kind::junction ? "junction" : "tip")
           << " x " << v.x << " legs";
        for (const auto& l : v.legs) os << " (" << l.edge << "," << l.end << "," << l.weight << ")";
        os << "\n";
    }
    return os.str();
}

std::pair<double, int> identify(const MetricGraph& graph, const ChannelShape& shape,
                                double x, double z) {
    if (!shape.params.rectangular)
        throw domain_error("identify: only rectangular-mode shapes have a 2D embedding");
    if (x < graph.x_min - 1e-12 || x > graph.x_max + 1e-12)
        throw domain_error("identify: x outside domain");
    int spine_id = graph.spine_edge_at(x);
    double w = graph.spine_width(x);
    if (z >= -1e-12 && z <= w + 1e-12) return {x, spine_id};
    // Wing tubes sit above the narrower spine band on the overlap side.
    for (const auto& e : graph.edges) {
        if (!e.is_wing) continue;
        double xa = e.global_x(0.0), xb = e.global_x(e.length());
        double lo = std::min(xa, xb), hi = std::max(xa, xb);
        if (x < lo - 1e-12 || x > hi + 1e-12) continue;
        if (std::abs(x - xa) < 1e-12) return {x, spine_id}; // branch cross-section: spine wins
        const Cell& c = (e.side > 0 ? shape.pos : shape.neg)[e.cell];
        double local = std::abs(x - xa);
        double zw_lo = w, zw_hi = w + c.gamma;
        double wing_w = e.profile.width(local);
        zw_hi = zw_lo + wing_w;
        if (z >= zw_lo - 1e-12 && z <= zw_hi + 1e-12) return {x, e.id};
    }
    throw domain_error("identify: point outside domain");
}

void write_edge_csv(const MetricGraph& graph, const std::string& path, int samples_per_edge) {
    std::ofstream f(path);
    if (!f) throw domain_error("write_edge_csv: cannot open " + path);
    f << "edge,is_wing,x_local,x_global,l,p,m\n";
    f.precision(17);
    for (const auto& e : graph.edges) {
        for (int i = 0; i < samples_per_edge; ++i) {
            double t = e.length() * i / (samples_per_edge - 1);
            auto mm = graph.measures(e.id, t);
            f << e.id << "," << (e.is_wing ? 1 : 0) << "," << t << "," << e.global_x(t) << ","
              << e.profile.width(t) << "," << mm.p << "," << mm.m << "\n";
        }
    }
}

} // namespace chanfront
