#include "chanfront/profile.hpp"

#include <algorithm>
#include <cmath>

#include "chanfront/errors.hpp"
#include "chanfront/quad.hpp"

namespace chanfront {

WidthProfile WidthProfile::constant(double width, double length) {
    if (!(width > 0) || !(length > 0)) throw domain_error("constant profile needs width > 0, length > 0");
    WidthProfile p;
    p.kind_ = Kind::constant;
    p.c0_ = width;
    p.length_ = length;
    return p;
}

WidthProfile WidthProfile::trig(double c0, std::vector<TrigTerm> terms, double length) {
    if (!(length > 0)) throw domain_error("trig profile needs length > 0");
    WidthProfile p;
    p.kind_ = Kind::trig;
    p.c0_ = c0;
    p.terms_ = std::move(terms);
    p.length_ = length;
    if (!(p.min_width() > 0)) throw domain_error("trig profile not positive on its interval");
    return p;
}

WidthProfile WidthProfile::tip_power(double scale, double beta, double length) {
    if (!(scale > 0) || !(length > 0)) throw domain_error("tip profile needs scale > 0, length > 0");
    if (!(beta > 0) || !(beta < 1)) throw domain_error("tip exponent must lie in (0,1)");
    WidthProfile p;
    p.kind_ = Kind::tip_power;
    p.c0_ = scale;
    p.beta_ = beta;
    p.length_ = length;
    return p;
}

WidthProfile WidthProfile::exp_width(double c0, double rate, double length) {
    if (!(c0 > 0) || !(length > 0)) throw domain_error("exp profile needs c0 > 0, length > 0");
    if (rate == 0.0) return constant(c0, length);
    WidthProfile p;
    p.kind_ = Kind::exp;
    p.c0_ = c0;
    p.beta_ = rate; // reuse the exponent slot for the growth rate
    p.length_ = length;
    return p;
}

double WidthProfile::width(double x) const {
    switch (kind_) {
    case Kind::constant:
        return c0_;
    case Kind::trig: {
        double l = c0_;
        for (const auto& t : terms_) l += t.amp * std::cos(t.freq * x + t.phase);
        return l;
    }
    case Kind::tip_power: {
        double s = 1.0 - x / length_;
        return s <= 0 ? 0.0 : c0_ * std::pow(s, beta_);
    }
    case Kind::exp:
        return c0_ * std::exp(beta_ * x);
    }
    return 0.0;
}

double WidthProfile::dwidth(double x) const {
    switch (kind_) {
    case Kind::constant:
        return 0.0;
    case Kind::trig: {
        double d = 0.0;
        for (const auto& t : terms_) d -= t.amp * t.freq * std::sin(t.freq * x + t.phase);
        return d;
    }
    case Kind::tip_power: {
        double s = 1.0 - x / length_;
        if (s <= 0) return 0.0;
        return -c0_ * beta_ / length_ * std::pow(s, beta_ - 1.0);
    }
    case Kind::exp:
        return c0_ * beta_ * std::exp(beta_ * x);
    }
    return 0.0;
}

double WidthProfile::scale_p(double x) const {
    if (x < -1e-12 || x > length_ * (1 + 1e-12)) throw domain_error("scale_p: x outside profile interval");
    x = std::clamp(x, 0.0, length_);
    switch (kind_) {
    case Kind::constant:
        return x / c0_;
    case Kind::trig:
        return adaptive_quad([this](double y) { return 1.0 / width(y); }, 0.0, x, 1e-11, 1e-15);
    case Kind::tip_power: {
        double s = 1.0 - x / length_;
        return length_ / (c0_ * (1.0 - beta_)) * (1.0 - std::pow(s, 1.0 - beta_));
    }
    case Kind::exp:
        return (1.0 - std::exp(-beta_ * x)) / (c0_ * beta_);
    }
    return 0.0;
}

double WidthProfile::speed_m(double x) const {
    if (x < -1e-12 || x > length_ * (1 + 1e-12)) throw domain_error("speed_m: x outside profile interval");
    x = std::clamp(x, 0.0, length_);
    switch (kind_) {
    case Kind::constant:
        return 2.0 * c0_ * x;
    case Kind::trig: {
        double m = 2.0 * c0_ * x;
        for (const auto& t : terms_)
            m += 2.0 * t.amp / t.freq * (std::sin(t.freq * x + t.phase) - std::sin(t.phase));
        return m;
    }
    case Kind::tip_power: {
        double s = 1.0 - x / length_;
        return 2.0 * c0_ * length_ / (1.0 + beta_) * (1.0 - std::pow(s, 1.0 + beta_));
    }
    case Kind::exp:
        return 2.0 * c0_ * (std::exp(beta_ * x) - 1.0) / beta_;
    }
    return 0.0;
}

double WidthProfile::x_of_p(double p) const {
    double total = scale_p(length_);
    if (p < -1e-12 || p > total * (1 + 1e-12)) throw domain_error("x_of_p: p outside range");
    p = std::clamp(p, 0.0, total);
    switch (kind_) {
    case Kind::constant:
        return p * c0_;
    case Kind::tip_power: {
        double t = 1.0 - p * c0_ * (1.0 - beta_) / length_;
        t = std::max(t, 0.0);
        return length_ * (1.0 - std::pow(t, 1.0 / (1.0 - beta_)));
    }
    case Kind::exp:
        return -std::log(1.0 - p * c0_ * beta_) / beta_;
    case Kind::trig: {
        // Newton with bisection safeguard; p is strictly increasing.
        double lo = 0.0, hi = length_, x = p / scale_p(length_) * length_;
        for (int it = 0; it < 80; ++it) {
            double fx = scale_p(x) - p;
            if (std::abs(fx) < 1e-14 * (1.0 + total)) return x;
            (fx > 0 ? hi : lo) = x;
            double step = fx * width(x);
            double xn = x - step;
            x = (xn > lo && xn < hi) ? xn : 0.5 * (lo + hi);
        }
        return x;
    }
    }
    return 0.0;
}

WidthProfile WidthProfile::reversed() const {
    switch (kind_) {
    case Kind::constant:
        return *this;
    case Kind::trig: {
        std::vector<TrigTerm> rt;
        rt.reserve(terms_.size());
        for (const auto& t : terms_)
            rt.push_back({t.amp, t.freq, -(t.freq * length_ + t.phase)});
        WidthProfile p;
        p.kind_ = Kind::trig;
        p.c0_ = c0_;
        p.terms_ = std::move(rt);
        p.length_ = length_;
        return p;
    }
    case Kind::exp:
        return exp_width(c0_ * std::exp(beta_ * length_), -beta_, length_);
    case Kind::tip_power:
        throw domain_error("tip profiles are stored attachment-first and are not reversible");
    }
    return *this;
}

WidthProfile WidthProfile::tail(double from) const {
    if (from < 0 || from >= length_) throw domain_error("tail: from outside [0, length)");
    switch (kind_) {
    case Kind::constant:
        return constant(c0_, length_ - from);
    case Kind::trig: {
        std::vector<TrigTerm> tt;
        tt.reserve(terms_.size());
        for (const auto& t : terms_) tt.push_back({t.amp, t.freq, t.phase + t.freq * from});
        WidthProfile p;
        p.kind_ = Kind::trig;
        p.c0_ = c0_;
        p.terms_ = std::move(tt);
        p.length_ = length_ - from;
        return p;
    }
    case Kind::exp:
        return exp_width(c0_ * std::exp(beta_ * from), beta_, length_ - from);
    case Kind::tip_power:
        throw domain_error("tail: tip profiles are not sliceable");
    }
    return *this;
}

double WidthProfile::min_width(int samples) const {
    if (kind_ == Kind::constant) return c0_;
    if (kind_ == Kind::tip_power) return 0.0;
    if (kind_ == Kind::exp) return std::min(width(0.0), width(length_));
    double m = width(0.0);
    for (int i = 1; i < samples; ++i) m = std::min(m, width(length_ * i / (samples - 1)));
    return m;
}

double WidthProfile::max_width(int samples) const {
    if (kind_ == Kind::constant) return c0_;
    if (kind_ == Kind::tip_power) return c0_;
    if (kind_ == Kind::exp) return std::max(width(0.0), width(length_));
    double m = width(0.0);
    for (int i = 1; i < samples; ++i) m = std::max(m, width(length_ * i / (samples - 1)));
    return m;
}

std::vector<double> WidthProfile::coeffs() const {
    if (kind_ == Kind::exp) return {c0_, beta_};
    std::vector<double> c{c0_};
    for (const auto& t : terms_) {
        c.push_back(t.amp);
        c.push_back(t.freq);
        c.push_back(t.phase);
    }
    return c;
}

WidthProfile WidthProfile::from_coeffs(const std::vector<double>& c, double length) {
    if (c.size() == 2) return exp_width(c[0], c[1], length);
    if (c.empty() || (c.size() - 1) % 3 != 0) throw domain_error("profile coeffs: need 1 + 3k values");
    if (c.size() == 1) return constant(c[0], length);
    std::vector<TrigTerm> terms;
    for (std::size_t i = 1; i + 2 < c.size() + 1; i += 3) terms.push_back({c[i], c[i + 1], c[i + 2]});
    return trig(c[0], std::move(terms), length);
}

} // namespace chanfront
