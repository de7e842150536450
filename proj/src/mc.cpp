#include "hhw/mc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "hhw/philox.hpp"

namespace hhw {

namespace {

constexpr double kPsiSwitch = 1.5;      // quadratic/exponential boundary
constexpr double kGammaDegenerate = 1e-12;

struct StepPlan {
    int n_steps = 0;
    double dt = 0.0;
    double sqrt_dt = 0.0;

    // variance stepping
    bool degenerate = false; // gamma ~ 0: conditional-mean variance path
    double ekv = 0.0;        // e^{-k_v dt}
    double s2_c1 = 0.0;      // conditional variance of v' = v * s2_c1 + s2_c2
    double s2_c2 = 0.0;
    double K1 = 0.0, K2 = 0.0, K3 = 0.0, K4 = 0.0;
    double Acoef = 0.0;      // K2 + K4/2, argument of the martingale moment

    // rate stepping
    double ekd = 0.0, ekf = 0.0; // OU decay factors over one step
    double kerf = 0.0;           // (1 - e^{-k_f dt})/k_f, quanto kernel
    double l00 = 0.0, l10 = 0.0, l11 = 0.0, l20 = 0.0, l21 = 0.0, l22 = 0.0;

    std::vector<double> phi_d, phi_f; // deterministic short-rate shifts
};

StepPlan make_plan(const FxModel& m, double maturity, const McConfig& cfg) {
    if (!(cfg.dt > 0.0))
        throw std::invalid_argument("mc: dt must be positive");
    const double ratio = maturity / cfg.dt;
    const double rounded = std::round(ratio);
    const double tol =
        8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, ratio);
    if (rounded < 0.5 || std::fabs(ratio - rounded) > tol)
        throw std::invalid_argument(
            "mc: maturity must be a whole number of dt steps");

    StepPlan sp;
    sp.n_steps = int(rounded);
    sp.dt = maturity / sp.n_steps;
    sp.sqrt_dt = std::sqrt(sp.dt);

    const double kv = m.heston.k_v, theta = m.heston.theta_v,
                 gamma = m.heston.gamma, rho = m.corr.sv;
    sp.ekv = std::exp(-kv * sp.dt);
    sp.degenerate = gamma < kGammaDegenerate;
    if (!sp.degenerate) {
        sp.s2_c1 = gamma * gamma * sp.ekv * (1.0 - sp.ekv) / kv;
        sp.s2_c2 = theta * gamma * gamma * (1.0 - sp.ekv) * (1.0 - sp.ekv) /
                   (2.0 * kv);
        const double shared = 0.5 * sp.dt * (kv * rho / gamma - 0.5);
        sp.K1 = shared - rho / gamma;
        sp.K2 = shared + rho / gamma;
        sp.K3 = 0.5 * sp.dt * (1.0 - rho * rho);
        sp.K4 = sp.K3;
        sp.Acoef = sp.K2 + 0.5 * sp.K4;
    }

    const double red2 = 1.0 - rho * rho;
    if (red2 < 1e-8)
        throw std::invalid_argument(
            "mc: |rho_sv| too close to 1 for the orthogonal decomposition");
    const double kd = m.dom.k, kf = m.fgn.k;
    sp.ekd = std::exp(-kd * sp.dt);
    sp.ekf = std::exp(-kf * sp.dt);
    sp.kerf = -std::expm1(-kf * sp.dt) / kf;

    // Covariance of (orthogonal spot shock, domestic OU shock, foreign OU
    // shock) over one step, lower Cholesky factor computed once.
    const double var_a = sp.dt;
    const double var_b = -std::expm1(-2.0 * kd * sp.dt) / (2.0 * kd);
    const double var_c = -std::expm1(-2.0 * kf * sp.dt) / (2.0 * kf);
    const double red = std::sqrt(red2);
    const double c_ab = (m.corr.sd / red) * (-std::expm1(-kd * sp.dt)) / kd;
    const double c_ac = (m.corr.sf / red) * (-std::expm1(-kf * sp.dt)) / kf;
    const double c_bc =
        m.corr.df * (-std::expm1(-(kd + kf) * sp.dt)) / (kd + kf);
    sp.l00 = std::sqrt(var_a);
    sp.l10 = c_ab / sp.l00;
    sp.l20 = c_ac / sp.l00;
    const double d11 = var_b - sp.l10 * sp.l10;
    if (d11 < -1e-12)
        throw std::invalid_argument("mc: step covariance not positive semidefinite");
    sp.l11 = std::sqrt(std::max(d11, 0.0));
    sp.l21 = sp.l11 > 0.0 ? (c_bc - sp.l10 * sp.l20) / sp.l11 : 0.0;
    const double d22 = var_c - sp.l20 * sp.l20 - sp.l21 * sp.l21;
    if (d22 < -1e-12)
        throw std::invalid_argument("mc: step covariance not positive semidefinite");
    sp.l22 = std::sqrt(std::max(d22, 0.0));

    sp.phi_d.resize(sp.n_steps + 1);
    sp.phi_f.resize(sp.n_steps + 1);
    const double ed = m.dom.eta, ef = m.fgn.eta;
    for (int i = 0; i <= sp.n_steps; ++i) {
        const double t = sp.dt * i;
        const double bd = -std::expm1(-kd * t) / kd;
        const double bf = -std::expm1(-kf * t) / kf;
        sp.phi_d[i] = m.dom.curve.forward_rate(t) + 0.5 * ed * ed * bd * bd;
        sp.phi_f[i] = m.fgn.curve.forward_rate(t) + 0.5 * ef * ef * bf * bf;
    }
    return sp;
}

struct BlockAccum {
    std::vector<double> sum;  // per-strike payoff (or pair-mean) sums
    std::vector<double> sum2; // squares of the same
    std::vector<double> stat_v, stat_rd, stat_rf;
    bool want_stats = false;
};

// One path; returns terminal log spot and the integral of the domestic short
// rate.  Consumes exactly 4 uniforms per step in every branch.
void run_path(const FxModel& m, const StepPlan& sp, PathRng& rng, bool mirror,
              double& log_spot_out, double& int_rd_out, BlockAccum* acc) {
    const double theta = m.heston.theta_v, rho = m.corr.sv;
    const double ed = m.dom.eta, ef = m.fgn.eta, rsf = m.corr.sf;
    double v = m.heston.v0;
    double x = std::log(m.spot);
    double xd = 0.0, xf = 0.0;
    double int_rd = 0.0;

    if (acc && acc->want_stats) {
        acc->stat_v[0] += v;
        acc->stat_rd[0] += xd + sp.phi_d[0];
        acc->stat_rf[0] += xf + sp.phi_f[0];
    }

    for (int i = 0; i < sp.n_steps; ++i) {
        const double rd0 = xd + sp.phi_d[i];
        const double rf0 = xf + sp.phi_f[i];

        double uv = rng.uniform();
        double z1 = rng.normal();
        double z2 = rng.normal();
        double z3 = rng.normal();
        if (mirror) {
            uv = 1.0 - uv;
            z1 = -z1;
            z2 = -z2;
            z3 = -z3;
        }
        const double ga = sp.l00 * z1;
        const double gb = sp.l10 * z1 + sp.l11 * z2;
        const double gc = sp.l20 * z1 + sp.l21 * z2 + sp.l22 * z3;

        double vp, dx_vol;
        if (sp.degenerate) {
            vp = theta + (v - theta) * sp.ekv;
            const double vbar = 0.5 * (v + vp);
            const double zv = norm_cdf_inv(uv);
            dx_vol = -0.5 * vbar * sp.dt +
                     std::sqrt(vbar) *
                         (rho * sp.sqrt_dt * zv +
                          std::sqrt(1.0 - rho * rho) * ga);
        } else {
            const double mean = theta + (v - theta) * sp.ekv;
            const double s2 = v * sp.s2_c1 + sp.s2_c2;
            const double psi = s2 / (mean * mean);
            double log_m; // log of the martingale moment E[e^{A v'}]
            if (psi <= kPsiSwitch) {
                const double twops = 2.0 / psi;
                const double b2 =
                    twops - 1.0 +
                    std::sqrt(twops) * std::sqrt(std::max(twops - 1.0, 0.0));
                const double a = mean / (1.0 + b2);
                const double zv = norm_cdf_inv(uv);
                const double sb = std::sqrt(b2) + zv;
                vp = a * sb * sb;
                const double denom = 1.0 - 2.0 * sp.Acoef * a;
                if (!(denom > 0.0))
                    throw std::runtime_error(
                        "mc: martingale correction unstable; reduce dt");
                log_m = sp.Acoef * b2 * a / denom - 0.5 * std::log(denom);
            } else {
                const double p = (psi - 1.0) / (psi + 1.0);
                const double beta = (1.0 - p) / mean;
                vp = (uv <= p) ? 0.0 : std::log((1.0 - p) / (1.0 - uv)) / beta;
                if (!(beta > sp.Acoef))
                    throw std::runtime_error(
                        "mc: martingale correction unstable; reduce dt");
                log_m = std::log(p + beta * (1.0 - p) / (beta - sp.Acoef));
            }
            const double k0_star = -log_m - (sp.K1 + 0.5 * sp.K3) * v;
            dx_vol = k0_star + sp.K1 * v + sp.K2 * vp +
                     std::sqrt(sp.K3 * v + sp.K4 * vp) * (ga / sp.sqrt_dt);
        }

        if (!(vp >= 0.0))
            throw std::runtime_error("mc: variance state went negative");

        const double sqv_avg = 0.5 * (std::sqrt(v) + std::sqrt(vp));
        const double xd1 = xd * sp.ekd + ed * gb;
        const double xf1 = xf * sp.ekf + ef * gc - ef * rsf * sqv_avg * sp.kerf;
        const double rd1 = xd1 + sp.phi_d[i + 1];
        const double rf1 = xf1 + sp.phi_f[i + 1];

        x += 0.5 * ((rd0 - rf0) + (rd1 - rf1)) * sp.dt + dx_vol;
        int_rd += 0.5 * (rd0 + rd1) * sp.dt;

        v = vp;
        xd = xd1;
        xf = xf1;

        if (acc && acc->want_stats) {
            acc->stat_v[i + 1] += v;
            acc->stat_rd[i + 1] += rd1;
            acc->stat_rf[i + 1] += rf1;
        }
    }
    log_spot_out = x;
    int_rd_out = int_rd;
}

double payoff(OptionKind kind, double strike, double spot) {
    return kind == OptionKind::put ? std::max(strike - spot, 0.0)
                                   : std::max(spot - strike, 0.0);
}

void run_block(const FxModel& m, const StepPlan& sp, OptionKind kind,
               const std::vector<double>& strikes, const McConfig& cfg,
               std::size_t first_unit, std::size_t n_units, BlockAccum& out) {
    const std::size_t n_strikes = strikes.size();
    std::vector<double> pay(n_strikes);
    for (std::size_t u = first_unit; u < first_unit + n_units; ++u) {
        if (cfg.antithetic) {
            double ls0, ird0, ls1, ird1;
            {
                PathRng rng(cfg.seed, u);
                run_path(m, sp, rng, false, ls0, ird0, &out);
            }
            {
                PathRng rng(cfg.seed, u);
                run_path(m, sp, rng, true, ls1, ird1, &out);
            }
            const double d0 = std::exp(-ird0), d1 = std::exp(-ird1);
            const double s0 = std::exp(ls0), s1 = std::exp(ls1);
            for (std::size_t j = 0; j < n_strikes; ++j)
                pay[j] = 0.5 * (d0 * payoff(kind, strikes[j], s0) +
                                d1 * payoff(kind, strikes[j], s1));
        } else {
            double ls, ird;
            PathRng rng(cfg.seed, u);
            run_path(m, sp, rng, false, ls, ird, &out);
            const double d = std::exp(-ird);
            const double s = std::exp(ls);
            for (std::size_t j = 0; j < n_strikes; ++j)
                pay[j] = d * payoff(kind, strikes[j], s);
        }
        for (std::size_t j = 0; j < n_strikes; ++j) {
            out.sum[j] += pay[j];
            out.sum2[j] += pay[j] * pay[j];
        }
    }
}

} // namespace

std::vector<McEstimate> simulate_hhw_strikes(const FxModel& m, double maturity,
                                             OptionKind kind,
                                             const std::vector<double>& strikes,
                                             const McConfig& cfg,
                                             PathStats* stats) {
    validate_model(m);
    if (m.corr.vd != 0.0 || m.corr.vf != 0.0)
        throw std::invalid_argument(
            "mc: nonzero variance-rate correlations are not supported");
    if (!(maturity > 0.0))
        throw std::invalid_argument("mc: maturity must be positive");
    if (strikes.empty())
        throw std::invalid_argument("mc: no strikes given");
    for (double k : strikes)
        if (!(k > 0.0))
            throw std::invalid_argument("mc: strikes must be positive");
    if (cfg.n_paths < 2)
        throw std::invalid_argument("mc: need at least 2 paths");
    if (cfg.antithetic && cfg.n_paths % 2 != 0)
        throw std::invalid_argument("mc: antithetic runs need an even path count");
    if (cfg.n_batches < 1 || cfg.n_batches > 256)
        throw std::invalid_argument("mc: n_batches must be in [1, 256]");

    const StepPlan sp = make_plan(m, maturity, cfg);
    const std::size_t n_units =
        cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
    const std::size_t n_batches =
        std::min<std::size_t>(cfg.n_batches, n_units);

    const auto t_start = std::chrono::steady_clock::now();

    std::vector<BlockAccum> acc(n_batches);
    for (auto& a : acc) {
        a.sum.assign(strikes.size(), 0.0);
        a.sum2.assign(strikes.size(), 0.0);
        a.want_stats = stats != nullptr;
        if (a.want_stats) {
            a.stat_v.assign(sp.n_steps + 1, 0.0);
            a.stat_rd.assign(sp.n_steps + 1, 0.0);
            a.stat_rf.assign(sp.n_steps + 1, 0.0);
        }
    }

    const std::size_t base = n_units / n_batches;
    const std::size_t rem = n_units % n_batches;
    std::vector<std::exception_ptr> errors(n_batches);
    auto worker = [&](std::size_t b, std::size_t first, std::size_t count) {
        try {
            run_block(m, sp, kind, strikes, cfg, first, count, acc[b]);
        } catch (...) {
            errors[b] = std::current_exception();
        }
    };

    if (n_batches == 1) {
        worker(0, 0, n_units);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_batches);
        std::size_t first = 0;
        for (std::size_t b = 0; b < n_batches; ++b) {
            const std::size_t count = base + (b < rem ? 1 : 0);
            threads.emplace_back(worker, b, first, count);
            first += count;
        }
        for (auto& t : threads)
            t.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    const auto t_end = std::chrono::steady_clock::now();
    const double elapsed =
        std::chrono::duration<double>(t_end - t_start).count();

    std::vector<McEstimate> result(strikes.size());
    for (std::size_t j = 0; j < strikes.size(); ++j) {
        double sum = 0.0, sum2 = 0.0;
        for (const auto& a : acc) {
            sum += a.sum[j];
            sum2 += a.sum2[j];
        }
        const double n = double(n_units);
        const double mean = sum / n;
        const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
        McEstimate e;
        e.price = mean;
        e.se = std::sqrt(var / n);
        e.n_paths = cfg.n_paths;
        e.seed = cfg.seed;
        e.elapsed = elapsed;
        result[j] = e;
    }

    if (stats) {
        stats->time.resize(sp.n_steps + 1);
        stats->mean_v.assign(sp.n_steps + 1, 0.0);
        stats->mean_rd.assign(sp.n_steps + 1, 0.0);
        stats->mean_rf.assign(sp.n_steps + 1, 0.0);
        const double n_tot = double(cfg.n_paths);
        for (int i = 0; i <= sp.n_steps; ++i) {
            stats->time[i] = sp.dt * i;
            for (const auto& a : acc) {
                stats->mean_v[i] += a.stat_v[i];
                stats->mean_rd[i] += a.stat_rd[i];
                stats->mean_rf[i] += a.stat_rf[i];
            }
            stats->mean_v[i] /= n_tot;
            stats->mean_rd[i] /= n_tot;
            stats->mean_rf[i] /= n_tot;
        }
    }
    return result;
}

McEstimate simulate_hhw(const FxModel& m, const OptionSpec& opt,
                        const McConfig& cfg, PathStats* stats) {
    return simulate_hhw_strikes(m, opt.maturity, opt.kind, {opt.strike}, cfg,
                                stats)[0];
}

McEstimate simulate_heston(const FxModel& m, const OptionSpec& opt,
                           const McConfig& cfg) {
    FxModel reduced = m;
    reduced.dom.eta = 0.0;
    reduced.fgn.eta = 0.0;
    return simulate_hhw(reduced, opt, cfg);
}

} // namespace hhw
