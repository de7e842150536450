#include "hhw/integrals.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hhw/quadrature.hpp"

namespace hhw {

double ExpCoeffs::operator()(double t) const {
    return c0 + cd * std::exp(kd * t) + cf * std::exp(kf * t);
}

ExpCoeffs make_exp_coeffs(const FxModel& m, double T,
                          double c0, double cd, double cf) {
    ExpCoeffs c;
    c.c0 = c0;
    c.cd = cd;
    c.cf = cf;
    c.kd = m.dom.k;
    c.kf = m.fgn.k;
    c.kv = m.heston.k_v;
    c.T = T;
    return c;
}

RateAdjustment alpha_coeffs(const FxModel& m, double T) {
    if (!(T > 0.0))
        throw std::invalid_argument("alpha_coeffs: maturity must be positive");
    const double sv0 = std::sqrt(m.heston.v0);
    const double kd = m.dom.k, kf = m.fgn.k;
    const double ad = m.corr.sd * m.dom.eta / (kd * sv0);
    const double af = m.corr.sf * m.fgn.eta / (kf * sv0);
    ExpCoeffs a;
    a.c0 = ad - af;
    a.cd = -ad * std::exp(-kd * T);
    a.cf = af * std::exp(-kf * T);
    a.kd = kd;
    a.kf = kf;
    a.kv = m.heston.k_v;
    a.T = T;
    ExpCoeffs one = a;
    one.c0 += 1.0;
    return {a, one};
}

namespace {

using std::exp;
using std::expm1;
using std::fabs;

// Below these gap*T thresholds a closed form loses too many digits to
// cancellation and we integrate numerically instead.
constexpr double kNarrowBand = 1e-6;
constexpr double kI3Band = 1e-3;   // the symmetric I3 form cancels harder
constexpr double kPairBand = 1e-2; // the general product form, harder still

// f2(w) = (1 - w) e^w - 1.  Cancels to O(w^2) near zero.
double f2(double w) {
    if (fabs(w) < 1e-3)
        return -w * w *
               (0.5 + w * (1.0 / 3.0 +
                           w * (0.125 + w * (1.0 / 30.0 +
                                             w * (1.0 / 144.0 + w / 840.0)))));
    return (1.0 - w) * exp(w) - 1.0;
}

// Efun(q) = int_0^T e^{q t} dt = expm1(q T)/q.
double Efun(double q, double T) {
    const double x = q * T;
    if (fabs(x) < 1e-8)
        return T * (1.0 + x * (0.5 + x / 6.0));
    return expm1(x) / q;
}

// Gfun(m, p) = int_0^T e^{p t} (e^{m T} - e^{m t})/m dt.
double Gfun(double m, double p, double T) {
    return (exp(m * T) * Efun(p, T) - Efun(p + m, T)) / m;
}

// J3(ka, kb) = int_0^T e^{2 kv t} E(ka - kv; t) E(kb - kv; t) dt with
// E(m; t) = int_t^T e^{m u} du.  Valid away from ma = 0 and mb = 0.
double J3(double ka, double kb, double kv, double T) {
    const double ma = ka - kv, mb = kb - kv;
    return (exp(mb * T) * Gfun(ma, 2.0 * kv, T) -
            Gfun(ma, 2.0 * kv + mb, T)) /
           mb;
}

double i1_closed(const ExpCoeffs& c, double kvv) {
    const double T = c.T;
    double r = c.c0 * T / kvv + c.c0 * expm1(-kvv * T) / (kvv * kvv);
    const double cc[2] = {c.cd, c.cf};
    const double kk[2] = {c.kd, c.kf};
    for (int i = 0; i < 2; ++i) {
        if (cc[i] == 0.0)
            continue;
        r += cc[i] * expm1(kk[i] * T) / (kvv * kk[i]) -
             cc[i] * expm1((kk[i] - kvv) * T) / (kvv * (kk[i] - kvv));
    }
    return r;
}

bool i1_needs_quad(const ExpCoeffs& c, double kvv) {
    const double T = c.T;
    if (kvv * T < kNarrowBand)
        return true;
    if (c.cd != 0.0 &&
        (c.kd * T < kNarrowBand || fabs(c.kd - kvv) * T < kNarrowBand))
        return true;
    if (c.cf != 0.0 &&
        (c.kf * T < kNarrowBand || fabs(c.kf - kvv) * T < kNarrowBand))
        return true;
    return false;
}

double i2_closed(const ExpCoeffs& c) {
    const double T = c.T, kv = c.kv;
    const double kv2 = kv * kv, kv3 = kv2 * kv;
    double r = c.c0 * (T / kv2 + expm1(-kv * T) / kv3 + f2(-kv * T) / kv3);
    const double cc[2] = {c.cd, c.cf};
    const double kk[2] = {c.kd, c.kf};
    for (int i = 0; i < 2; ++i) {
        if (cc[i] == 0.0)
            continue;
        const double dk = kk[i] - kv, w = dk * T;
        r += cc[i] * (expm1(kk[i] * T) / (kv2 * kk[i]) -
                      expm1(w) / (kv2 * dk) + f2(w) / (kv * dk * dk));
    }
    return r;
}

bool i2_needs_quad(const ExpCoeffs& c) {
    const double T = c.T, kv = c.kv;
    if (kv * T < kNarrowBand)
        return true;
    if (c.cd != 0.0 &&
        (c.kd * T < kNarrowBand || fabs(c.kd - kv) * T < kNarrowBand))
        return true;
    if (c.cf != 0.0 &&
        (c.kf * T < kNarrowBand || fabs(c.kf - kv) * T < kNarrowBand))
        return true;
    return false;
}

double i3_closed(const ExpCoeffs& c) {
    const double T = c.T, kv = c.kv;
    const double kv2 = kv * kv, kv3 = kv2 * kv;
    const double xv = exp(kv * T);
    const double base = T / (2.0 * kv2) + 1.0 / (kv3 * xv) -
                        1.0 / (4.0 * kv3 * xv * xv) - 3.0 / (4.0 * kv3);
    double r = c.c0 * c.c0 * base;
    const double cc[2] = {c.cd, c.cf};
    const double kk[2] = {c.kd, c.kf};
    for (int i = 0; i < 2; ++i) {
        if (cc[i] == 0.0)
            continue;
        const double k = kk[i], dk = k - kv;
        r += cc[i] * cc[i] *
             (expm1(dk * T) / ((k + kv) * dk * dk) +
              expm1(2.0 * k * T) / (4.0 * k * kv * (k + kv)) -
              expm1(2.0 * dk * T) / (4.0 * kv * dk * dk));
        if (c.c0 != 0.0)
            r += c.c0 * cc[i] *
                 ((k + 2.0 * kv) * expm1(k * T) / (2.0 * kv2 * (k + kv) * k) +
                  expm1((k - 2.0 * kv) * T) / (2.0 * kv2 * dk) -
                  expm1(-kv * T) / (kv * (k + kv) * dk) -
                  expm1(dk * T) / (kv2 * dk));
    }
    if (c.cd != 0.0 && c.cf != 0.0) {
        const double kd = c.kd, kf = c.kf;
        r += c.cd * c.cf *
             (expm1((kd - kv) * T) / ((kd - kv) * (kf * kf - kv2)) +
              expm1((kf - kv) * T) / ((kf - kv) * (kd * kd - kv2)) -
              expm1((kd + kf - 2.0 * kv) * T) /
                  (2.0 * kv * (kd - kv) * (kf - kv)) +
              (1.0 / (kd + kv) + 1.0 / (kf + kv)) * expm1((kd + kf) * T) /
                  (2.0 * kv * (kd + kf)));
    }
    // r integrates over the ordered region u < s only; the full square is
    // twice that by symmetry of the two inner factors.
    return 2.0 * r;
}

bool i3_needs_quad(const ExpCoeffs& c) {
    const double T = c.T, kv = c.kv;
    if (kv * T < kNarrowBand)
        return true;
    if (c.cd != 0.0 &&
        (c.kd * T < kNarrowBand || fabs(c.kd - kv) * T < kI3Band))
        return true;
    if (c.cf != 0.0 &&
        (c.kf * T < kNarrowBand || fabs(c.kf - kv) * T < kI3Band))
        return true;
    if (c.cd != 0.0 && c.cf != 0.0 &&
        fabs(c.kd + c.kf - 2.0 * kv) * T < kNarrowBand)
        return true;
    return false;
}

double i4_closed(const ExpCoeffs& c) {
    const double T = c.T, kv = c.kv;
    const double kv2 = kv * kv, kv3 = kv2 * kv;
    const double xv = exp(kv * T);
    double r = c.c0 * (T / (2.0 * kv2) + 1.0 / (kv3 * xv) -
                       1.0 / (4.0 * kv3 * xv * xv) - 3.0 / (4.0 * kv3));
    const double cc[2] = {c.cd, c.cf};
    const double kk[2] = {c.kd, c.kf};
    for (int i = 0; i < 2; ++i) {
        if (cc[i] == 0.0)
            continue;
        const double k = kk[i];
        r += cc[i] * (expm1(k * T) / (2.0 * kv2 * k) -
                      expm1((k - kv) * T) / (kv2 * (k - kv)) +
                      expm1((k - 2.0 * kv) * T) / (2.0 * kv2 * (k - 2.0 * kv)));
    }
    return r;
}

bool i4_needs_quad(const ExpCoeffs& c) {
    const double T = c.T, kv = c.kv;
    if (kv * T < kNarrowBand)
        return true;
    if (c.cd != 0.0 &&
        (c.kd * T < kNarrowBand || fabs(c.kd - kv) * T < kNarrowBand ||
         fabs(c.kd - 2.0 * kv) * T < kNarrowBand))
        return true;
    if (c.cf != 0.0 &&
        (c.kf * T < kNarrowBand || fabs(c.kf - kv) * T < kNarrowBand ||
         fabs(c.kf - 2.0 * kv) * T < kNarrowBand))
        return true;
    return false;
}

std::function<double(double)> exp_rate(double rate) {
    return [rate](double t) { return std::exp(rate * t); };
}

std::function<double(double)> decay_times_c(const ExpCoeffs& c, double rate) {
    return [c, rate](double u) { return std::exp(-rate * u) * c(u); };
}

bool same_coeffs(const ExpCoeffs& a, const ExpCoeffs& b) {
    return a.c0 == b.c0 && a.cd == b.cd && a.cf == b.cf && a.kd == b.kd &&
           a.kf == b.kf && a.kv == b.kv && a.T == b.T;
}

} // namespace

double I1_quad(const ExpCoeffs& c) {
    return nested_quad({exp_rate(c.kv), decay_times_c(c, c.kv)}, c.T);
}

double I1_2k_quad(const ExpCoeffs& c) {
    return nested_quad({exp_rate(2.0 * c.kv), decay_times_c(c, 2.0 * c.kv)},
                       c.T);
}

double I2_quad(const ExpCoeffs& c) {
    return nested_quad(
        {exp_rate(c.kv), [](double) { return 1.0; }, decay_times_c(c, c.kv)},
        c.T);
}

double I3_quad(const ExpCoeffs& c1, const ExpCoeffs& c2) {
    if (c1.kv != c2.kv || c1.T != c2.T)
        throw std::invalid_argument(
            "I3_quad: coefficient functions must share kv and T");
    const auto f = exp_rate(2.0 * c1.kv);
    const auto g1 = decay_times_c(c1, c1.kv);
    const auto g2 = decay_times_c(c2, c1.kv);
    // The square [t,T]^2 splits into the two orderings of (u, s).
    return nested_quad({f, g1, g2}, c1.T) + nested_quad({f, g2, g1}, c1.T);
}

double I4_quad(const ExpCoeffs& c) {
    return nested_quad(
        {exp_rate(c.kv), exp_rate(c.kv), decay_times_c(c, 2.0 * c.kv)}, c.T);
}

double I1(const ExpCoeffs& c) {
    if (i1_needs_quad(c, c.kv))
        return I1_quad(c);
    return i1_closed(c, c.kv);
}

double I1_2k(const ExpCoeffs& c) {
    if (i1_needs_quad(c, 2.0 * c.kv))
        return I1_2k_quad(c);
    return i1_closed(c, 2.0 * c.kv);
}

double I2(const ExpCoeffs& c) {
    if (i2_needs_quad(c))
        return I2_quad(c);
    return i2_closed(c);
}

double I3(const ExpCoeffs& c) {
    if (i3_needs_quad(c))
        return I3_quad(c, c);
    return i3_closed(c);
}

double I3(const ExpCoeffs& c1, const ExpCoeffs& c2) {
    if (same_coeffs(c1, c2))
        return I3(c1);
    if (c1.kv != c2.kv || c1.T != c2.T)
        throw std::invalid_argument(
            "I3: coefficient functions must share kv and T");
    const double kv = c1.kv, T = c1.T;
    const double w1[3] = {c1.c0, c1.cd, c1.cf};
    const double k1[3] = {0.0, c1.kd, c1.kf};
    const double w2[3] = {c2.c0, c2.cd, c2.cf};
    const double k2[3] = {0.0, c2.kd, c2.kf};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            if (w1[a] == 0.0 || w2[b] == 0.0)
                continue;
            if (fabs(k1[a] - kv) * T < kPairBand ||
                fabs(k2[b] - kv) * T < kPairBand ||
                fabs(k1[a] + k2[b] - 2.0 * kv) * T < kPairBand)
                return I3_quad(c1, c2);
        }
    double r = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            if (w1[a] == 0.0 || w2[b] == 0.0)
                continue;
            r += w1[a] * w2[b] * J3(k1[a], k2[b], kv, T);
        }
    return r;
}

double I4(const ExpCoeffs& c) {
    if (i4_needs_quad(c))
        return I4_quad(c);
    return i4_closed(c);
}

namespace {

// int_0^T B_k(t)^2 dt with B_k(t) = expm1(-k (T - t))/k.
double g_int(double k, double T) {
    const double u = k * T;
    if (u < 0.02) {
        const double s =
            1.0 / 3.0 -
            u * (0.25 - u * (7.0 / 60.0 -
                             u * (1.0 / 24.0 -
                                  u * (31.0 / 2520.0 - u / 320.0))));
        return T * T * T * s;
    }
    const double h = u + 2.0 * expm1(-u) - 0.5 * expm1(-2.0 * u);
    return h / (k * k * k);
}

// psi(x) = (expm1(-x) + x)/x^2; psi(0) = 1/2.
double psi(double x) {
    if (fabs(x) < 1e-3)
        return 0.5 -
               x * (1.0 / 6.0 -
                    x * (1.0 / 24.0 - x * (1.0 / 120.0 - x / 720.0)));
    return (expm1(-x) + x) / (x * x);
}

// int_0^T B_k(t) dt = -T^2 psi(k T)  (always <= 0).
double m_int(double k, double T) { return -T * T * psi(k * T); }

// q(a) = -(expm1(-a T) + a T)/a.
double q_fun(double a, double T) { return -a * T * T * psi(a * T); }

} // namespace

double y0_hhw(const FxModel& m, double T) {
    if (T < 0.0)
        throw std::invalid_argument("y0_hhw: negative maturity");
    const double sv0 = std::sqrt(m.heston.v0);
    const double ed = m.dom.eta, ef = m.fgn.eta;
    const double kd = m.dom.k, kf = m.fgn.k;
    double y = m.heston.v0 * T;
    y += ed * ed * g_int(kd, T);
    y += ef * ef * g_int(kf, T);
    y -= 2.0 * sv0 * m.corr.sd * ed * m_int(kd, T);
    y += 2.0 * sv0 * m.corr.sf * ef * m_int(kf, T);
    if (ed != 0.0 && ef != 0.0) {
        const double gdf =
            (q_fun(kd + kf, T) - q_fun(kd, T) - q_fun(kf, T)) / (kd * kf);
        y -= 2.0 * m.corr.df * ed * ef * gdf;
    }
    return y;
}

double y0_quad(const FxModel& m, double T) {
    if (T < 0.0)
        throw std::invalid_argument("y0_quad: negative maturity");
    if (T == 0.0)
        return 0.0;
    const double v0 = m.heston.v0, sv0 = std::sqrt(v0);
    const double ed = m.dom.eta, ef = m.fgn.eta;
    const double kd = m.dom.k, kf = m.fgn.k;
    const double rsd = m.corr.sd, rsf = m.corr.sf, rdf = m.corr.df;
    auto sigma2 = [&](double t) {
        const double Bd = expm1(-kd * (T - t)) / kd;
        const double Bf = expm1(-kf * (T - t)) / kf;
        return v0 + ed * ed * Bd * Bd + ef * ef * Bf * Bf -
               2.0 * sv0 * rsd * ed * Bd + 2.0 * sv0 * rsf * ef * Bf -
               2.0 * rdf * ed * ef * Bd * Bf;
    };
    return quad(sigma2, 0.0, T);
}

} // namespace hhw
