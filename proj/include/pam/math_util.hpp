#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pam {

// Adaptive Simpson quadrature on [a,b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 50);

// Bisection for a continuous function with f(lo) and f(hi) of opposite sign.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol = 0.0, double rtol = 1e-13, int max_iter = 200);

// Golden-section minimization of a unimodal function on [a,b].
double golden_section_min(const std::function<double(double)>& f, double a, double b,
                          double rtol = 1e-10, int max_iter = 300);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Richardson extrapolation for an O(h^2) sequence sampled at h, h/2.
inline double richardson2(double coarse, double fine) {
    return fine + (fine - coarse) / 3.0;
}

}  // namespace pam
