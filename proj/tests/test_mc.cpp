#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hhw/black_scholes.hpp"
#include "hhw/expansion.hpp"
#include "hhw/experiment.hpp"
#include "hhw/heston_chf.hpp"
#include "hhw/mc.hpp"
#include "hhw/philox.hpp"

using namespace hhw;

namespace {

McConfig quick_cfg(std::uint64_t seed = 11, std::size_t paths = 20000) {
    McConfig cfg;
    cfg.n_paths = paths;
    cfg.dt = 0.05;
    cfg.seed = seed;
    cfg.n_batches = 1;
    return cfg;
}

} // namespace

TEST_CASE("counter-based generator reproduces the reference block") {
    const auto words = philox::block({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(words[0] == 0x6627e8d5u);
    CHECK(words[1] == 0xe169c58du);
    CHECK(words[2] == 0xbc57ac4cu);
    CHECK(words[3] == 0x9b00dbd8u);
}

TEST_CASE("path streams are deterministic, open-interval, and independent") {
    PathRng a(42, 7), b(42, 7), c(42, 8);
    double mean = 0.0;
    bool any_diff = false;
    for (int i = 0; i < 10000; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform()); // bitwise reproducible
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        any_diff = any_diff || (u != c.uniform());
        mean += u;
    }
    mean /= 10000.0;
    CHECK(any_diff);                      // different path, different stream
    CHECK(std::abs(mean - 0.5) <= 0.01);  // ~3.5 sigma for U(0,1)
}

TEST_CASE("estimates are bit-identical across reruns") {
    const FxModel m = benchmark_model();
    const std::vector<double> strikes{90.0, 100.0, 110.0};
    const auto r1 = simulate_hhw_strikes(m, 1.0, OptionKind::put, strikes, quick_cfg());
    const auto r2 = simulate_hhw_strikes(m, 1.0, OptionKind::put, strikes, quick_cfg());
    REQUIRE(r1.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r1[i].price == r2[i].price); // exact, not approximate
        CHECK(r1[i].se == r2[i].se);
        CHECK(r1[i].n_paths == 20000);
        CHECK(r1[i].seed == 11);
        CHECK(r1[i].se > 0.0);
    }
    const McEstimate single =
        simulate_hhw(m, OptionSpec{OptionKind::put, 100.0, 1.0}, quick_cfg());
    CHECK(single.price == r1[1].price);
    CHECK(single.se == r1[1].se);
}

TEST_CASE("batch partitioning only reorders the reduction") {
    const FxModel m = benchmark_model();
    McConfig four = quick_cfg();
    four.n_batches = 4;
    const auto one = simulate_hhw(m, OptionSpec{OptionKind::put, 100.0, 1.0}, quick_cfg());
    const auto split = simulate_hhw(m, OptionSpec{OptionKind::put, 100.0, 1.0}, four);
    // Same path set, so the estimates agree to reduction roundoff.
    CHECK(std::abs(one.price - split.price) <= 5.0 * one.se);
    CHECK(std::abs(one.price - split.price) <= 1e-9);
}

TEST_CASE("antithetic pairing is deterministic and variance-reducing at the money") {
    const FxModel m = benchmark_model();
    McConfig anti = quick_cfg();
    anti.antithetic = true;
    const OptionSpec atm{OptionKind::put, 100.0, 1.0};
    const auto a1 = simulate_hhw(m, atm, anti);
    const auto a2 = simulate_hhw(m, atm, anti);
    CHECK(a1.price == a2.price);
    const auto plain = simulate_hhw(m, atm, quick_cfg());
    CHECK(a1.se < plain.se); // mirrored tails cancel most of the payoff spread
}

TEST_CASE("quadrupling the path count halves the standard error") {
    const FxModel m = benchmark_model();
    double ratio_sum = 0.0;
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const auto small = simulate_hhw(m, OptionSpec{OptionKind::put, 100.0, 1.0},
                                        quick_cfg(seed, 4000));
        const auto big = simulate_hhw(m, OptionSpec{OptionKind::put, 100.0, 1.0},
                                      quick_cfg(seed, 16000));
        ratio_sum += small.se / big.se;
    }
    const double mean_ratio = ratio_sum / 5.0;
    CHECK(mean_ratio > 1.6);
    CHECK(mean_ratio < 2.4);
}

TEST_CASE("degenerate model converges to Black-Scholes and keeps variance frozen") {
    FxModel m = benchmark_model();
    m.heston.gamma = 0.0;
    m.dom.eta = 0.0;
    m.fgn.eta = 0.0;
    PathStats stats;
    const auto est = simulate_hhw_strikes(m, 1.0, OptionKind::put, {100.0},
                                          quick_cfg(3), &stats)[0];
    const double bs = bs_put(BsPoint{std::log(100.0), 0.05, 100.0, 1.0});
    CHECK(std::abs(est.price - bs) <= 3.0 * est.se);
    REQUIRE(stats.time.size() == 21); // T/dt + 1 grid points
    CHECK(stats.time.front() == 0.0);
    CHECK(stats.time.back() == doctest::Approx(1.0).epsilon(1e-12));
    // Each path's variance stays exactly at v0; the cross-path mean only picks
    // up summation rounding, which is bounded by n*eps ~ 1e-12 relative.
    for (double v : stats.mean_v)
        CHECK(v == doctest::Approx(0.05).epsilon(1e-12));
    for (double r : stats.mean_rd)
        CHECK(std::isfinite(r));
}

TEST_CASE("rate-free run matches the Fourier price within noise") {
    const FxModel m = benchmark_model();
    const OptionSpec atm{OptionKind::put, 100.0, 1.0};
    const auto est = simulate_heston(m, atm, quick_cfg(5));
    ChfParams cp;
    cp.k_v = m.heston.k_v;
    cp.theta_v = m.heston.theta_v;
    cp.gamma = m.heston.gamma;
    cp.rho_sv = m.corr.sv;
    cp.v0 = m.heston.v0;
    cp.F0 = 100.0;
    cp.T = 1.0;
    cp.Dd = 1.0;
    CHECK(std::abs(est.price - price_put_chf(cp, 100.0)) <= 3.0 * est.se);
    // simulate_heston is exactly the main engine with eta forced to zero.
    FxModel zeroed = m;
    zeroed.dom.eta = 0.0;
    zeroed.fgn.eta = 0.0;
    const auto manual = simulate_hhw(zeroed, atm, quick_cfg(5));
    CHECK(est.price == manual.price);
    CHECK(est.se == manual.se);
}

TEST_CASE("stochastic-rate premium shows up as a paired path difference") {
    const FxModel m = benchmark_model();
    const OptionSpec atm{OptionKind::put, 100.0, 1.0};
    const auto hhw = simulate_hhw(m, atm, quick_cfg(9));
    const auto hes = simulate_heston(m, atm, quick_cfg(9));
    const double dp = delta_stochastic_rates(m, atm);
    const double combined = std::hypot(hhw.se, hes.se);
    CHECK(std::abs((hhw.price - hes.price) - dp) <= 3.0 * combined);
}

TEST_CASE("grid misalignment and parameter misuse are rejected") {
    const FxModel m = benchmark_model();
    const std::vector<double> k{100.0};
    McConfig cfg = quick_cfg();
    cfg.dt = 0.7; // 1.0 / 0.7 is not an integer
    CHECK_THROWS_AS(simulate_hhw_strikes(m, 1.0, OptionKind::put, k, cfg),
                    std::invalid_argument);
    CHECK_NOTHROW(simulate_hhw_strikes(m, 7.0, OptionKind::put, k,
                                       [] {
                                           McConfig c;
                                           c.n_paths = 100;
                                           c.dt = 0.7; // 7.0 / 0.7 == 10 steps
                                           return c;
                                       }()));

    FxModel degenerate_rho = m;
    degenerate_rho.corr.sv = -1.0;
    CHECK_THROWS_AS(simulate_hhw_strikes(degenerate_rho, 1.0, OptionKind::put, k, quick_cfg()),
                    std::invalid_argument);

    FxModel coupled = m;
    coupled.corr.vd = 0.3;
    CHECK_THROWS_AS(simulate_hhw_strikes(coupled, 1.0, OptionKind::put, k, quick_cfg()),
                    std::invalid_argument);

    CHECK_THROWS_AS(simulate_hhw_strikes(m, -1.0, OptionKind::put, k, quick_cfg()),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_hhw_strikes(m, 1.0, OptionKind::put, {}, quick_cfg()),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_hhw_strikes(m, 1.0, OptionKind::put, {-5.0}, quick_cfg()),
                    std::invalid_argument);

    McConfig tiny = quick_cfg();
    tiny.n_paths = 1;
    CHECK_THROWS_AS(simulate_hhw_strikes(m, 1.0, OptionKind::put, k, tiny),
                    std::invalid_argument);
    McConfig odd = quick_cfg();
    odd.n_paths = 999;
    odd.antithetic = true;
    CHECK_THROWS_AS(simulate_hhw_strikes(m, 1.0, OptionKind::put, k, odd),
                    std::invalid_argument);
    McConfig batches = quick_cfg();
    batches.n_batches = 0;
    CHECK_THROWS_AS(simulate_hhw_strikes(m, 1.0, OptionKind::put, k, batches),
                    std::invalid_argument);
}

TEST_CASE("call payoffs price consistently with the expansion") {
    const FxModel m = benchmark_model();
    const OptionSpec call{OptionKind::call, 110.0, 1.0};
    const auto est = simulate_hhw(m, call, quick_cfg(13));
    CHECK(std::abs(est.price - price_hhw_exp(m, call).price) <= 3.0 * est.se);
}
