#include "chanfront/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chanfront/errors.hpp"
#include "chanfront/rng.hpp"

namespace chanfront {

void GeneratorParams::check() const {
    if (!(spine_len_lo > 0)) throw domain_error("params: spine_len_lo must be > 0");
    if (!(spine_len_hi >= spine_len_lo)) throw domain_error("params: spine_len_hi must be >= spine_len_lo");
    if (!(width_min > 0)) throw domain_error("params: width_min must be > 0");
    if (!(width_max >= width_min)) throw domain_error("params: width_max must be >= width_min");
    if (!(width_base >= width_min && width_base <= width_max))
        throw domain_error("params: width_base must lie in [width_min, width_max]");
    if (amplitude < 0) throw domain_error("params: amplitude must be >= 0");
    if (amplitude > 0 && !(width_base - amplitude >= width_min && width_base + amplitude <= width_max))
        throw domain_error("params: amplitude too large to keep widths in [width_min, width_max]");
    if (trig_degree < 1) throw domain_error("params: trig_degree must be >= 1");
    if (!(wing_max > 0)) throw domain_error("params: wing_max must be > 0");
    if (!rectangular && amplitude > wing_max)
        throw domain_error("params: amplitude must not exceed wing_max (wing widths are bounded by A1)");
    if (rectangular && width_max - width_min > wing_max)
        throw domain_error("params: rectangular width span must not exceed wing_max");
    if (!(wing_r_min_frac > 0 && wing_r_min_frac < 1))
        throw domain_error("params: wing_r_min_frac must lie in (0,1)");
    if (!rectangular && !(tip_beta > 0 && tip_beta < 1))
        throw domain_error("params: tip_beta must lie in (0,1)");
    if (rectangular && !(rect_quantum > 0 && rect_quantum <= spine_len_lo && rect_quantum <= wing_max))
        throw domain_error("params: rect_quantum must be positive and below spine_len_lo and wing_max");
}

WidthProfile Cell::wing_profile() const {
    if (!has_wing()) throw domain_error("wing_profile: cell has no wing");
    double len = std::abs(wing_r);
    if (tip_beta == 0.0) return WidthProfile::constant(gamma, len);
    return WidthProfile::tip_power(gamma, tip_beta, len);
}

namespace {

// Substream tags (arbitrary fixed constants).
constexpr std::uint64_t TAG_POS = 0x706f73, TAG_NEG = 0x6e6567, TAG_SEAM = 0x7365616d;

double quantize(double v, double q) { return std::max(q, q * std::round(v / q)); }

struct SpineDraw {
    WidthProfile profile;
    double length;
};

SpineDraw draw_spine(const GeneratorParams& p, std::uint64_t seed, std::uint64_t tag,
                     std::uint64_t k, double rect_seam_width) {
    RngStream g = substream(seed, tag, 2 * k);
    if (p.rectangular) {
        double len = quantize(g.uniform(p.spine_len_lo, p.spine_len_hi), p.rect_quantum);
        len = std::min(std::max(len, p.spine_len_lo), p.spine_len_hi);
        double w = (k == 0 && rect_seam_width > 0)
                       ? rect_seam_width
                       : quantize(g.uniform(p.width_min, p.width_max), p.rect_quantum);
        w = std::min(std::max(w, p.width_min), p.width_max);
        return {WidthProfile::constant(w, len), len};
    }
    double len = g.uniform(p.spine_len_lo, p.spine_len_hi);
    if (p.amplitude == 0.0) return {WidthProfile::constant(p.width_base, len), len};
    std::vector<TrigTerm> terms(p.trig_degree);
    double raw_total = 0;
    std::vector<double> raw(p.trig_degree);
    for (int j = 0; j < p.trig_degree; ++j) {
        raw[j] = g.uniform(0.3, 1.0);
        raw_total += raw[j];
        terms[j].freq = g.uniform(2.0, 6.0);
        terms[j].phase = g.uniform(0.0, 6.283185307179586);
    }
    double total_amp = 0.5 * p.amplitude * g.uniform(0.3, 1.0);
    double c0 = p.width_base;
    for (int j = 0; j < p.trig_degree; ++j) {
        terms[j].amp = raw[j] / raw_total * total_amp;
        c0 -= terms[j].amp * std::cos(terms[j].phase); // pins l(0) = width_base
    }
    return {WidthProfile::trig(c0, std::move(terms), len), len};
}

Cell make_cell(const GeneratorParams& p, std::uint64_t seed, std::uint64_t tag, std::uint64_t k,
               double rect_seam_width) {
    SpineDraw sp = draw_spine(p, seed, tag, k, k == 0 ? rect_seam_width : 0.0);
    Cell c;
    c.spine_length = sp.length;
    c.spine = sp.profile;
    c.alpha = sp.profile.width(sp.length);
    if (p.rectangular) {
        SpineDraw next = draw_spine(p, seed, tag, k + 1, 0.0);
        c.beta = next.profile.width(0.0);
    } else {
        c.beta = p.width_base;
    }
    double diff = c.alpha - c.beta;
    c.gamma = std::abs(diff);
    RngStream g = substream(seed, tag, 2 * k + 1);
    double rmag = g.uniform(p.wing_r_min_frac * p.wing_max, p.wing_max);
    if (p.rectangular) rmag = std::min(quantize(rmag, p.rect_quantum), p.wing_max);
    double sign = diff >= 0 ? 1.0 : -1.0;
    c.wing_r = sign * rmag;
    c.wing_scale = c.gamma;
    c.tip_beta = p.rectangular ? 0.0 : p.tip_beta;
    return c;
}

} // namespace

ChannelShape sample_channel(const GeneratorParams& params, std::uint64_t seed, int n_cells) {
    params.check();
    if (n_cells < 1) throw domain_error("sample_channel: n_cells must be >= 1");
    ChannelShape s;
    s.seed = seed;
    s.params = params;
    double seam_w = 0.0;
    if (params.rectangular) {
        RngStream g = substream(seed, TAG_SEAM, 0);
        seam_w = quantize(g.uniform(params.width_min, params.width_max), params.rect_quantum);
        seam_w = std::min(std::max(seam_w, params.width_min), params.width_max);
    }
    s.pos.reserve(n_cells);
    s.neg.reserve(n_cells);
    for (int k = 0; k < n_cells; ++k) {
        s.pos.push_back(make_cell(params, seed, TAG_POS, k, seam_w));
        s.neg.push_back(make_cell(params, seed, TAG_NEG, k, seam_w));
    }
    return s;
}

ChannelShape mirror(const ChannelShape& shape) {
    ChannelShape m = shape;
    std::swap(m.pos, m.neg);
    return m;
}

Cell mirrored_cell(const Cell& c) {
    Cell m = c;
    m.spine = c.spine.reversed();
    m.wing_r = -c.wing_r;
    m.alpha = c.beta;
    m.beta = c.alpha;
    return m;
}

namespace {

void validate_side(const ChannelShape& s, const std::vector<Cell>& cells, const char* side,
                   int grid_points, std::vector<std::string>& out) {
    const auto& p = s.params;
    auto bad = [&](std::size_t k, const std::string& what) {
        std::ostringstream os;
        os << side << "[" << k << "]: " << what;
        out.push_back(os.str());
    };
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const Cell& c = cells[k];
        if (c.spine_length < p.spine_len_lo - 1e-12 || c.spine_length > p.spine_len_hi + 1e-12)
            bad(k, "spine length outside [L_lo, L_hi]");
        if (std::abs(c.spine.length() - c.spine_length) > 1e-12)
            bad(k, "spine profile length disagrees with spine_length");
        for (int i = 0; i < grid_points; ++i) {
            double x = c.spine_length * i / (grid_points - 1);
            double w = c.spine.width(x);
            if (w < p.width_min - 1e-12 || w > p.width_max + 1e-12) {
                bad(k, "spine width outside [width_min, width_max]");
                break;
            }
        }
        // Cross-section conservation at the junction.
        double sign = c.wing_r >= 0 ? 1.0 : -1.0;
        if (std::abs(c.alpha - c.beta - sign * c.gamma) > 1e-14 * (1.0 + c.alpha))
            bad(k, "junction conservation alpha - beta = sign(r) gamma violated");
        if (std::abs(c.alpha - c.spine.width(c.spine_length)) > 1e-12)
            bad(k, "alpha disagrees with spine end width");
        if (k + 1 < cells.size() && std::abs(c.beta - cells[k + 1].spine.width(0.0)) > 1e-12)
            bad(k, "beta disagrees with next spine start width");
        if (c.gamma < 0) bad(k, "gamma negative");
        if (c.has_wing()) {
            if (c.wing_r == 0) bad(k, "wing with zero projection");
            if (std::abs(c.wing_r) > p.wing_max + 1e-12) bad(k, "|wing_r| exceeds A1");
            if (c.gamma > p.wing_max + 1e-12) bad(k, "wing width exceeds A1");
            if (std::abs(c.wing_scale - c.gamma) > 1e-14 * (1.0 + c.gamma))
                bad(k, "wing_scale disagrees with gamma");
            if (c.tip_beta != 0.0) {
                if (!(c.tip_beta < 1.0)) bad(k, "tip exponent >= 1: scale integral diverges at the tip");
                // Doubling quadrature toward the tip; increments must shrink.
                double len = std::abs(c.wing_r);
                auto seg = [&](double a, double b) {
                    double sum = 0;
                    int n = 64;
                    for (int i = 0; i < n; ++i) {
                        double x0 = a + (b - a) * i / n, x1 = a + (b - a) * (i + 1) / n;
                        double w0 = c.gamma * std::pow(1.0 - x0 / len, c.tip_beta);
                        double w1 = c.gamma * std::pow(1.0 - x1 / len, c.tip_beta);
                        sum += 0.5 * (1.0 / w0 + 1.0 / w1) * (x1 - x0);
                    }
                    return sum;
                };
                double prev = seg(0.0, len * 0.5);
                bool diverging = false;
                double a = len * 0.5;
                for (int d = 1; d <= 24; ++d) {
                    double b = len * (1.0 - std::pow(0.5, d + 1));
                    double inc = seg(a, b);
                    if (d > 4 && inc > prev) diverging = true;
                    prev = inc;
                    a = b;
                }
                if (diverging) bad(k, "scale integral dx/l diverges near the wing tip");
            }
        }
    }
}

} // namespace

std::vector<std::string> validate(const ChannelShape& shape, int grid_points) {
    std::vector<std::string> out;
    try {
        shape.params.check();
    } catch (const domain_error& e) {
        out.push_back(std::string("params: ") + e.what());
    }
    if (shape.pos.empty() || shape.neg.empty()) out.push_back("shape: both sides need at least one cell");
    validate_side(shape, shape.pos, "pos", grid_points, out);
    validate_side(shape, shape.neg, "neg", grid_points, out);
    if (!shape.pos.empty() && !shape.neg.empty()) {
        double wp = shape.pos[0].spine.width(0.0), wn = shape.neg[0].spine.width(0.0);
        if (std::abs(wp - wn) > 1e-12) out.push_back("seam: widths of the two sides disagree at x = 0");
    }
    return out;
}

namespace {

using nlohmann::json;

json cell_to_json(const Cell& c) {
    json j;
    j["spine_length"] = c.spine_length;
    j["spine_coeffs"] = c.spine.coeffs();
    j["wing_r"] = c.wing_r;
    j["wing_scale"] = c.wing_scale;
    j["tip_beta"] = c.tip_beta;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["gamma"] = c.gamma;
    return j;
}

Cell cell_from_json(const json& j) {
    Cell c;
    c.spine_length = j.at("spine_length").get<double>();
    c.spine = WidthProfile::from_coeffs(j.at("spine_coeffs").get<std::vector<double>>(), c.spine_length);
    c.wing_r = j.at("wing_r").get<double>();
    c.wing_scale = j.at("wing_scale").get<double>();
    c.tip_beta = j.at("tip_beta").get<double>();
    c.alpha = j.at("alpha").get<double>();
    c.beta = j.at("beta").get<double>();
    c.gamma = j.at("gamma").get<double>();
    return c;
}

json params_to_json(const GeneratorParams& p) {
    json j;
    j["spine_len_lo"] = p.spine_len_lo;
    j["spine_len_hi"] = p.spine_len_hi;
    j["width_base"] = p.width_base;
    j["width_min"] = p.width_min;
    j["width_max"] = p.width_max;
    j["amplitude"] = p.amplitude;
    j["trig_degree"] = p.trig_degree;
    j["wing_max"] = p.wing_max;
    j["wing_r_min_frac"] = p.wing_r_min_frac;
    j["tip_beta"] = p.tip_beta;
    j["rectangular"] = p.rectangular;
    j["rect_quantum"] = p.rect_quantum;
    return j;
}

GeneratorParams params_from_json(const json& j) {
    GeneratorParams p;
    p.spine_len_lo = j.at("spine_len_lo").get<double>();
    p.spine_len_hi = j.at("spine_len_hi").get<double>();
    p.width_base = j.at("width_base").get<double>();
    p.width_min = j.at("width_min").get<double>();
    p.width_max = j.at("width_max").get<double>();
    p.amplitude = j.at("amplitude").get<double>();
    p.trig_degree = j.at("trig_degree").get<int>();
    p.wing_max = j.at("wing_max").get<double>();
    p.wing_r_min_frac = j.at("wing_r_min_frac").get<double>();
    p.tip_beta = j.at("tip_beta").get<double>();
    p.rectangular = j.at("rectangular").get<bool>();
    p.rect_quantum = j.at("rect_quantum").get<double>();
    return p;
}

} // namespace

std::string to_json(const ChannelShape& shape) {
    json j;
    j["format"] = "channel/1";
    j["seed"] = shape.seed;
    j["params"] = params_to_json(shape.params);
    json pos = json::array(), neg = json::array();
    for (const auto& c : shape.pos) pos.push_back(cell_to_json(c));
    for (const auto& c : shape.neg) neg.push_back(cell_to_json(c));
    j["cells_pos"] = std::move(pos);
    j["cells_neg"] = std::move(neg);
    return j.dump(2);
}

ChannelShape shape_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("format", "") != std::string("channel/1"))
        throw domain_error("channel file: unknown format (expected channel/1)");
    ChannelShape s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.params = params_from_json(j.at("params"));
    for (const auto& c : j.at("cells_pos")) s.pos.push_back(cell_from_json(c));
    for (const auto& c : j.at("cells_neg")) s.neg.push_back(cell_from_json(c));
    return s;
}

void save_channel(const ChannelShape& shape, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw domain_error("save_channel: cannot open " + path);
    f << to_json(shape) << "\n";
}

ChannelShape load_channel(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw domain_error("load_channel: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return shape_from_json(ss.str());
}

ChannelShape flat_channel(int n_cells, double width, double cell_len, double tiny, std::uint64_t seed) {
    if (n_cells < 1 || !(width > 0) || !(cell_len > 0) || !(tiny >= 0))
        throw domain_error("flat_channel: bad arguments");
    ChannelShape s;
    s.seed = seed;
    s.params.spine_len_lo = cell_len;
    s.params.spine_len_hi = cell_len;
    s.params.width_base = width;
    s.params.width_min = width * (1.0 - 1e-6);
    s.params.width_max = width * (1.0 + 1e-6);
    s.params.amplitude = std::max(tiny * 2.0, 0.0);
    s.params.tip_beta = 0.5;
    Cell c;
    c.spine_length = cell_len;
    double wing_r = 0.3 * std::min(cell_len, 1.0);
    if (tiny > 0) {
        // l(0) = width, l(len) = width + tiny, monotone half cosine in between.
        double om = 3.141592653589793 / cell_len;
        c.spine = WidthProfile::trig(width + 0.5 * tiny, {{-0.5 * tiny, om, 0.0}}, cell_len);
        c.alpha = width + tiny;
        c.beta = width;
        c.gamma = c.alpha - c.beta; // exact by construction
        c.wing_r = wing_r;
        c.wing_scale = c.gamma;
        c.tip_beta = 0.5;
    } else {
        c.spine = WidthProfile::constant(width, cell_len);
        c.alpha = c.beta = width;
        c.gamma = 0.0;
        c.wing_r = wing_r;
        c.wing_scale = 0.0;
        c.tip_beta = 0.5;
    }
    s.pos.assign(n_cells, c);
    s.neg.assign(n_cells, c);
    return s;
}

} // namespace chanfront
