#include "chanfront/quad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chanfront {

namespace {

// K15 nodes on [0,1] (positive half) and weights; G7 weights on shared nodes.
const double kx[8] = {
    0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
const double kw[8] = {
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
const double gw[4] = {
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct GK {
    double integral, error;
};

GK gk15(const std::function<double(double)>& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double resk = kw[0] * fc;
    double resg = gw[0] * fc;
    for (int j = 1; j < 8; ++j) {
        double fv = f(c - h * kx[j]) + f(c + h * kx[j]);
        resk += kw[j] * fv;
        if (j % 2 == 0) resg += gw[j / 2] * fv;
    }
    double err = std::abs((resk - resg) * h);
    return {resk * h, err};
}

void adapt(const std::function<double(double)>& f, double a, double b, const GK& whole,
           double rel_tol, double abs_tol, int depth, double& acc) {
    if (depth <= 0) {
        acc += whole.integral;
        return;
    }
    double m = 0.5 * (a + b);
    GK left = gk15(f, a, m), right = gk15(f, m, b);
    double sum = left.integral + right.integral;
    double tol = std::max(abs_tol, rel_tol * std::abs(sum));
    if (left.error + right.error < tol || std::abs(sum - whole.integral) < tol) {
        acc += sum;
        return;
    }
    adapt(f, a, m, left, rel_tol, abs_tol, depth - 1, acc);
    adapt(f, m, b, right, rel_tol, abs_tol, depth - 1, acc);
}

} // namespace

double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    double acc = 0.0;
    adapt(f, a, b, gk15(f, a, b), rel_tol, abs_tol, max_depth, acc);
    return sign * acc;
}

std::vector<double> cumulative_quad(const std::vector<double>& f, double h) {
    std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    if (n == 2) {
        out[1] = 0.5 * h * (f[0] + f[1]);
        return out;
    }
    // Half-panel increments from local quadratics, full panels from Simpson.
    for (std::size_t i = 0; i + 2 < n; i += 2) {
        double s_full = h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
        double s_half = h / 12.0 * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]);
        out[i + 1] = out[i] + s_half;
        out[i + 2] = out[i] + s_full;
    }
    if (n % 2 == 0) {
        // Trailing half panel: quadratic through the last three samples.
        std::size_t i = n - 3;
        out[n - 1] = out[n - 2] + h / 12.0 * (-f[i] + 8.0 * f[i + 1] + 5.0 * f[i + 2]);
    }
    return out;
}

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double tol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw std::invalid_argument("brent_root: no sign change");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if ((fb > 0) == (fc > 0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 2.0 * 2.220446049250313e-16 * std::abs(b) + 0.5 * tol;
        double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

} // namespace chanfront
