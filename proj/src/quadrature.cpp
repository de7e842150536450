#include "hhw/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>

namespace hhw {
namespace {

// 15-point Kronrod / 7-point Gauss pair (QUADPACK dqk15 constants).
constexpr double xgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};

struct PanelResult {
    double value;   // Kronrod estimate
    double error;   // scaled error bound
    double resabs;  // integral of |f|
};

// Error rescaling as in QUADPACK: sharpen the raw |K15-G7| difference using
// the integrand's deviation from its mean, with a roundoff floor.
double rescale_error(double err, double resabs, double resasc) {
    err = std::fabs(err);
    if (resasc != 0.0 && err != 0.0) {
        double scaled = std::pow(200.0 * err / resasc, 1.5);
        err = (scaled < 1.0) ? resasc * scaled : resasc;
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double dmin = std::numeric_limits<double>::min();
    if (resabs > dmin / (50.0 * eps))
        err = std::max(err, 50.0 * eps * resabs);
    return err;
}

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    double fv[15];
    fv[7] = f(c);
    for (int i = 0; i < 7; ++i) {
        const double dx = h * xgk[i];
        fv[i] = f(c - dx);
        fv[14 - i] = f(c + dx);
    }

    double result_kronrod = wgk[7] * fv[7];
    double result_gauss = wg[3] * fv[7];
    double resabs = wgk[7] * std::fabs(fv[7]);
    for (int i = 0; i < 7; ++i) {
        const double sum = fv[i] + fv[14 - i];
        result_kronrod += wgk[i] * sum;
        resabs += wgk[i] * (std::fabs(fv[i]) + std::fabs(fv[14 - i]));
        if (i % 2 == 1)
            result_gauss += wg[i / 2] * sum;
    }

    const double mean = 0.5 * result_kronrod;
    double resasc = wgk[7] * std::fabs(fv[7] - mean);
    for (int i = 0; i < 7; ++i)
        resasc += wgk[i] * (std::fabs(fv[i] - mean) + std::fabs(fv[14 - i] - mean));

    PanelResult r;
    r.value = result_kronrod * h;
    r.resabs = resabs * std::fabs(h);
    r.error = rescale_error((result_kronrod - result_gauss) * h,
                            r.resabs, resasc * std::fabs(h));
    return r;
}

struct Segment {
    double a, b, value, error, resabs;
    bool operator<(const Segment& o) const { return error < o.error; }
};

} // namespace

QuadResult quad_full(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt) {
    if (!(a <= b))
        throw std::invalid_argument("quad: lower limit exceeds upper limit");
    if (a == b)
        return {0.0, 0.0, 0};

    constexpr double eps = std::numeric_limits<double>::epsilon();

    std::priority_queue<Segment> heap;
    PanelResult first = gk15(f, a, b);
    heap.push({a, b, first.value, first.error, first.resabs});
    double total_value = first.value;
    double total_error = first.error;
    double total_resabs = first.resabs;
    int n_intervals = 1;

    auto tolerance = [&] {
        return std::max({opt.tol_abs, opt.tol_rel * std::fabs(total_value),
                         100.0 * eps * total_resabs});
    };

    while (total_error > tolerance()) {
        if (n_intervals >= opt.max_intervals)
            throw QuadratureError("quad: subdivision limit reached before tolerance",
                                  total_value, total_error);
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval no longer splittable in double precision; accept as-is.
            heap.push(worst);
            break;
        }
        PanelResult left = gk15(f, worst.a, mid);
        PanelResult right = gk15(f, mid, worst.b);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        total_resabs += left.resabs + right.resabs - worst.resabs;
        heap.push({worst.a, mid, left.value, left.error, left.resabs});
        heap.push({mid, worst.b, right.value, right.error, right.resabs});
        ++n_intervals;
    }

    return {total_value, total_error, n_intervals};
}

double quad(const std::function<double(double)>& f, double a, double b,
            const QuadOptions& opt) {
    return quad_full(f, a, b, opt).value;
}

namespace {

/**
 * Cached tail integral F(t) = int_t^T g(u) du.
 *
 * Segment integrals of g over a fixed uniform grid are precomputed once;
 * an evaluation then costs one partial-segment quad plus a cached suffix sum.
 * This keeps iterated (nested) quadrature polynomial instead of exponential
 * in depth while every piece remains an adaptive Gauss-Kronrod integral.
 */
class TailIntegral {
public:
    TailIntegral(std::function<double(double)> g, double T, const QuadOptions& opt)
        : g_(std::move(g)), T_(T), opt_(opt) {
        width_ = T_ / kSegments;
        suffix_.resize(kSegments + 1);
        suffix_[kSegments] = 0.0;
        for (int i = kSegments - 1; i >= 0; --i) {
            const double lo = T_ * i / kSegments;
            const double hi = T_ * (i + 1) / kSegments;
            suffix_[i] = suffix_[i + 1] + quad(g_, lo, hi, opt_);
        }
    }

    double operator()(double t) const {
        if (t >= T_)
            return 0.0;
        if (t <= 0.0)
            return suffix_[0];
        int i = static_cast<int>(t / width_);
        i = std::min(i, kSegments - 1);
        const double hi = T_ * (i + 1) / kSegments;
        return quad(g_, t, hi, opt_) + suffix_[i + 1];
    }

private:
    static constexpr int kSegments = 64;
    std::function<double(double)> g_;
    double T_;
    QuadOptions opt_;
    double width_;
    std::vector<double> suffix_;
};

} // namespace

double nested_quad(const std::vector<std::function<double(double)>>& levels,
                   double T, const QuadOptions& opt) {
    if (levels.empty() || levels.size() > 4)
        throw std::invalid_argument("nested_quad: depth must be between 1 and 4");
    if (T < 0.0)
        throw std::invalid_argument("nested_quad: negative upper limit");
    if (T == 0.0)
        return 0.0;

    const int depth = static_cast<int>(levels.size());

    // Tolerances tighten 10x per inner level.
    std::vector<QuadOptions> level_opt(depth, opt);
    for (int k = 1; k < depth; ++k) {
        level_opt[k].tol_rel = level_opt[k - 1].tol_rel * 0.1;
        level_opt[k].tol_abs = level_opt[k - 1].tol_abs * 0.1;
    }

    // Build cached tails from the innermost level outward:
    //   tail_k(t) = int_t^T levels[k](u) * tail_{k+1}(u) du,  tail_depth == 1.
    std::vector<std::shared_ptr<TailIntegral>> tails(depth);
    for (int k = depth - 1; k >= 1; --k) {
        std::function<double(double)> integrand;
        if (k == depth - 1) {
            integrand = levels[k];
        } else {
            auto inner = tails[k + 1];
            auto lev = levels[k];
            integrand = [lev, inner](double u) { return lev(u) * (*inner)(u); };
        }
        tails[k] = std::make_shared<TailIntegral>(std::move(integrand), T, level_opt[k]);
    }

    if (depth == 1)
        return quad(levels[0], 0.0, T, level_opt[0]);
    auto tail1 = tails[1];
    auto lev0 = levels[0];
    return quad([lev0, tail1](double t) { return lev0(t) * (*tail1)(t); },
                0.0, T, level_opt[0]);
}

} // namespace hhw
