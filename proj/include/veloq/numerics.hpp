#pragma once

#include <functional>
#include <vector>

namespace veloq::numerics {

// Golden-section minimum of a unimodal function on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol = 1e-10, int max_iter = 200);

inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-10, int max_iter = 200) {
    return golden_min([&](double x) { return -f(x); }, lo, hi, tol, max_iter);
}

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
};

// Classic Nelder-Mead simplex descent. Deterministic given the start point.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, double step = 0.3, double ftol = 1e-12,
                             int max_iter = 4000);

struct DecayFit {
    double amplitude = 0.0;  // A
    double offset = 0.0;     // B
    double base = 0.0;       // p
    double base_stderr = 0.0;
    double residual = 0.0;   // ||y - fit||
};

// Least-squares fit of y = A p^x + B: golden search over p with the linear
// subproblem solved exactly. Throws std::runtime_error on degenerate input.
DecayFit fit_geometric_decay(const std::vector<double>& xs, const std::vector<double>& ys,
                             double p_lo = 0.3, double p_hi = 0.999999);

}  // namespace veloq::numerics
