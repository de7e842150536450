#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hhw {

/**
 * Thrown when adaptive refinement reaches the interval cap before meeting the
 * requested tolerance.  Carries the best estimate available at that point so
 * callers can decide whether to use it anyway.
 */
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& msg, double best, double err)
        : std::runtime_error(msg), best_estimate(best), error_estimate(err) {}

    double best_estimate;   // integral estimate when subdivision stopped
    double error_estimate;  // accumulated error bound at that point
};

struct QuadOptions {
    double tol_rel = 1e-11;    // relative tolerance target
    double tol_abs = 1e-13;    // absolute tolerance floor
    int max_intervals = 10000; // subdivision cap before QuadratureError
};

struct QuadResult {
    double value;     // integral estimate
    double error;     // error bound actually achieved
    int intervals;    // number of subintervals used
};

/** Adaptive 15-point Gauss-Kronrod integral of f over [a, b], a <= b. */
double quad(const std::function<double(double)>& f, double a, double b,
            const QuadOptions& opt = {});

/** Same as quad() but also reports the achieved error bound and interval count. */
QuadResult quad_full(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

/**
 * Iterated integral over the ordered simplex 0 <= t1 <= t2 <= ... <= T:
 *
 *   nested_quad({f1,...,fn}, T)
 *     = int_0^T f1(t1) int_{t1}^T f2(t2) ... int_{t_{n-1}}^T fn(tn) dtn ... dt1
 *
 * Depth n must be 1..4.  Inner levels are evaluated by iterated application
 * of quad() with tolerances tightened 10x per level; tail integrals of inner
 * levels are cached on a fixed knot grid so deep nests stay affordable.
 */
double nested_quad(const std::vector<std::function<double(double)>>& levels,
                   double T, const QuadOptions& opt = {});

} // namespace hhw
