#pragma once

#include <vector>

namespace chanfront {

struct TrigTerm {
    double amp, freq, phase;
    bool operator==(const TrigTerm&) const = default;
};

// Cross-section width l(x) of one channel piece on the local interval
// [0, length]. Four kinds:
//   constant:  l = c0
//   trig:      l(x) = c0 + sum_j a_j cos(w_j x + phi_j), bounded away from 0
//   tip_power: l(x) = scale * (1 - x/length)^beta, vanishing at the far tip
//              with exponent beta in (0,1) so that scale integral dx/l stays
//              finite at the tip.
//   exp:       l(x) = c0 e^{g x} (monotone test geometry with closed forms)
// Provides the scale function p(x) = int_0^x dy/l and the speed measure
// m(x) = 2 int_0^x l dy (closed form except for trig, which uses adaptive
// quadrature).
class WidthProfile {
public:
    enum class Kind { constant, trig, tip_power, exp };

    static WidthProfile constant(double width, double length);
    static WidthProfile trig(double c0, std::vector<TrigTerm> terms, double length);
    static WidthProfile tip_power(double scale, double beta, double length);
    static WidthProfile exp_width(double c0, double rate, double length);

    Kind kind() const { return kind_; }
    double length() const { return length_; }
    double tip_beta() const { return beta_; }
    double tip_scale() const { return c0_; }

    double width(double x) const;  // l(x)
    double dwidth(double x) const; // l'(x)

    double scale_p(double x) const; // int_0^x dy/l
    double speed_m(double x) const; // 2 int_0^x l dy
    double x_of_p(double p) const;  // inverse of scale_p

    // Same geometry traversed from the other end; defined for constant and
    // trig kinds (tip profiles are always stored attachment-first).
    WidthProfile reversed() const;

    // The restriction to [from, length], re-anchored at 0 (constant/trig).
    WidthProfile tail(double from) const;

    double min_width(int samples = 2049) const;
    double max_width(int samples = 2049) const;

    // Flat coefficient vector used by the channel file format:
    // constant [c0], trig [c0, a1,w1,phi1, ...].
    std::vector<double> coeffs() const;
    static WidthProfile from_coeffs(const std::vector<double>& c, double length);

    bool operator==(const WidthProfile&) const = default;

private:
    Kind kind_ = Kind::constant;
    double length_ = 1.0;
    double c0_ = 1.0;   // constant width, trig offset, or tip scale
    double beta_ = 0.0; // tip exponent
    std::vector<TrigTerm> terms_;
};

} // namespace chanfront
