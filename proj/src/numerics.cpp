#include "veloq/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace veloq::numerics {

double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol,
                  int max_iter) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < max_iter && (hi - lo) > tol * (1.0 + std::abs(lo) + std::abs(hi));
         ++it) {
        if (f1 > f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        }
    }
    return 0.5 * (lo + hi);
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, double step, double ftol, int max_iter) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) {
        simplex[i + 1][i] += step;
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

    int it = 0;
    for (; it < max_iter; ++it) {
        // order: best first
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return fv[a] < fv[b];
        });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            s2[i] = simplex[idx[i]];
            f2[i] = fv[idx[i]];
        }
        simplex.swap(s2);
        fv.swap(f2);

        if (std::abs(fv[n] - fv[0]) < ftol * (std::abs(fv[0]) + ftol)) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double alpha) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j) {
                x[j] = centroid[j] + alpha * (simplex[n][j] - centroid[j]);
            }
            return x;
        };

        std::vector<double> xr = blend(-1.0);
        double fr = f(xr);
        if (fr < fv[0]) {
            std::vector<double> xe = blend(-2.0);
            double fe = f(xe);
            if (fe < fr) {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            std::vector<double> xc = blend(fr < fv[n] ? -0.5 : 0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fv[n])) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                // shrink toward best
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    }
                    fv[i] = f(simplex[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (fv[i] < fv[best]) best = i;
    }
    return {simplex[best], fv[best], it};
}

namespace {

// linear subproblem of the decay fit: best (A, B) for fixed p, returns SSE
double decay_sse(const std::vector<double>& xs, const std::vector<double>& ys, double p,
                 double* amplitude, double* offset) {
    const std::size_t n = xs.size();
    double s_gg = 0.0, s_g = 0.0, s_gy = 0.0, s_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double g = std::pow(p, xs[i]);
        s_gg += g * g;
        s_g += g;
        s_gy += g * ys[i];
        s_y += ys[i];
    }
    double det = s_gg * static_cast<double>(n) - s_g * s_g;
    if (std::abs(det) < 1e-14 * (s_gg + 1.0)) {
        return std::numeric_limits<double>::infinity();
    }
    double a = (s_gy * static_cast<double>(n) - s_g * s_y) / det;
    double b = (s_gg * s_y - s_g * s_gy) / det;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = ys[i] - (a * std::pow(p, xs[i]) + b);
        sse += r * r;
    }
    if (amplitude) *amplitude = a;
    if (offset) *offset = b;
    return sse;
}

}  // namespace

DecayFit fit_geometric_decay(const std::vector<double>& xs, const std::vector<double>& ys,
                             double p_lo, double p_hi) {
    if (xs.size() != ys.size() || xs.size() < 3) {
        throw std::runtime_error("fit_geometric_decay: need at least 3 points");
    }
    double p = golden_min([&](double q) { return decay_sse(xs, ys, q, nullptr, nullptr); }, p_lo,
                          p_hi, 1e-12);
    DecayFit fit;
    fit.base = p;
    double sse = decay_sse(xs, ys, p, &fit.amplitude, &fit.offset);
    if (!std::isfinite(sse)) {
        throw std::runtime_error("fit_geometric_decay: singular system");
    }
    fit.residual = std::sqrt(sse);

    // linearized covariance for the p standard error
    const std::size_t n = xs.size();
    Eigen::MatrixXd J(static_cast<Eigen::Index>(n), 3);
    for (std::size_t i = 0; i < n; ++i) {
        double g = std::pow(p, xs[i]);
        J(static_cast<Eigen::Index>(i), 0) = g;
        J(static_cast<Eigen::Index>(i), 1) = 1.0;
        J(static_cast<Eigen::Index>(i), 2) =
            fit.amplitude * xs[i] * (xs[i] >= 1.0 ? std::pow(p, xs[i] - 1.0) : g / p);
    }
    double dof = std::max(1.0, static_cast<double>(n) - 3.0);
    Eigen::Matrix3d jtj = J.transpose() * J;
    Eigen::Matrix3d cov = jtj.ldlt().solve(Eigen::Matrix3d::Identity()) * (sse / dof);
    fit.base_stderr = std::sqrt(std::max(0.0, cov(2, 2)));
    return fit;
}

}  // namespace veloq::numerics
