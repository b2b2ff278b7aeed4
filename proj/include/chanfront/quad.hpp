#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace chanfront {

// Adaptive Gauss-Kronrod (G7,K15) quadrature with interval bisection.
double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-11, double abs_tol = 1e-14, int max_depth = 40);

// Cumulative integral of samples f[0..n-1] on a uniform mesh of spacing h.
// Fourth order: Simpson on even pairs, a quadratic rule for the half panels.
// out[0] = 0, out[i] = integral from x0 to x0 + i*h.
std::vector<double> cumulative_quad(const std::vector<double>& f, double h);

// Brent root bracketing solve on [a, b]; f(a), f(b) must have opposite signs.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double tol = 1e-13, int max_iter = 200);

} // namespace chanfront
