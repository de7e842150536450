#include "hhw/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hhw/black_scholes.hpp"
#include "hhw/expansion.hpp"
#include "hhw/heston_chf.hpp"

namespace hhw {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_or_empty(double v) {
    return std::isnan(v) ? std::string() : fmt17(v);
}

std::string sanitize_note(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r')
            c = ';';
    return s;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

double row_implied_vol(double price, OptionKind kind, double F0, double K,
                       double T, double Dd) {
    const double put_price =
        kind == OptionKind::put ? price : price - Dd * (F0 - K);
    return implied_vol_put(put_price, F0, K, T, Dd);
}

double price_analytic(Method method, const FxModel& m, const OptionSpec& opt,
                      double F0, double Dd) {
    switch (method) {
    case Method::exp:
        return price_hhw_exp(m, opt).price;
    case Method::expchf:
        return price_hybrid_expchf(m, opt).price;
    case Method::chf: {
        ChfParams cp;
        cp.k_v = m.heston.k_v;
        cp.theta_v = m.heston.theta_v;
        cp.gamma = m.heston.gamma;
        cp.rho_sv = m.corr.sv;
        cp.v0 = m.heston.v0;
        cp.F0 = F0;
        cp.T = opt.maturity;
        cp.Dd = Dd;
        return opt.kind == OptionKind::put ? price_put_chf(cp, opt.strike)
                                           : price_call_chf(cp, opt.strike);
    }
    case Method::mc:
        break;
    }
    throw std::logic_error("price_analytic: not an analytic method");
}

} // namespace

std::string method_name(Method m) {
    switch (m) {
    case Method::exp:
        return "Exp";
    case Method::expchf:
        return "ExpChF";
    case Method::chf:
        return "ChF";
    case Method::mc:
        return "MC";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    std::string s;
    for (char c : name)
        s += char(std::tolower(static_cast<unsigned char>(c)));
    if (s == "exp")
        return Method::exp;
    if (s == "expchf")
        return Method::expchf;
    if (s == "chf")
        return Method::chf;
    if (s == "mc")
        return Method::mc;
    throw std::invalid_argument("unknown method '" + name +
                                "' (expected exp, expchf, chf or mc)");
}

std::string sweep_name(SweepVar v) {
    switch (v) {
    case SweepVar::none:
        return "none";
    case SweepVar::gamma:
        return "gamma";
    case SweepVar::eta_d:
        return "eta_d";
    case SweepVar::eta_f:
        return "eta_f";
    }
    return "?";
}

SweepVar sweep_from_name(const std::string& name) {
    if (name == "none" || name.empty())
        return SweepVar::none;
    if (name == "gamma")
        return SweepVar::gamma;
    if (name == "eta_d")
        return SweepVar::eta_d;
    if (name == "eta_f")
        return SweepVar::eta_f;
    throw std::invalid_argument("unknown sweep variable '" + name +
                                "' (expected gamma, eta_d or eta_f)");
}

std::vector<double> strike_grid(double F0, double T,
                                const std::vector<double>& deltas) {
    if (!(F0 > 0.0) || !(T > 0.0))
        throw std::invalid_argument("strike_grid: needs F0 > 0 and T > 0");
    std::vector<double> ks;
    ks.reserve(deltas.size());
    const double sq = std::sqrt(T);
    for (double d : deltas)
        ks.push_back(F0 * std::exp(0.1 * d * sq));
    return ks;
}

FxModel benchmark_model() {
    FxModel m;
    m.heston = {0.05, 0.05, 3.0, 0.3};
    m.dom = {0.01, 0.007, ZeroCurve::flat(0.0)};
    m.fgn = {0.05, 0.012, ZeroCurve::flat(0.0)};
    m.corr = {-0.4, -0.15, -0.15, 0.0, 0.0, 0.25};
    m.spot = 100.0;
    return m;
}

ExperimentResult run_experiment(const FxModel& base,
                                const ExperimentSpec& spec) {
    if (spec.maturities.empty())
        throw std::invalid_argument("experiment: no maturities");
    for (double T : spec.maturities)
        if (!(T > 0.0))
            throw std::invalid_argument("experiment: maturities must be positive");
    if (spec.deltas.empty())
        throw std::invalid_argument("experiment: no strike deltas");
    if (spec.methods.empty())
        throw std::invalid_argument("experiment: no methods");
    if (spec.sweep != SweepVar::none && spec.sweep_values.empty())
        throw std::invalid_argument("experiment: sweep requested without values");

    const bool has_mc =
        std::find(spec.methods.begin(), spec.methods.end(), Method::mc) !=
        spec.methods.end();
    const bool want_stats = has_mc && !spec.path_stats_out.empty();

    ExperimentResult out;
    std::ostringstream stats_csv;
    if (want_stats)
        stats_csv << "sweep_value,maturity,step,time,mean_v,mean_rd,mean_rf\n";

    std::vector<double> sweep_vals = spec.sweep == SweepVar::none
                                         ? std::vector<double>{kNaN}
                                         : spec.sweep_values;

    for (double sv : sweep_vals) {
        FxModel m = base;
        if (spec.sweep == SweepVar::gamma)
            m.heston.gamma = sv;
        else if (spec.sweep == SweepVar::eta_d)
            m.dom.eta = sv;
        else if (spec.sweep == SweepVar::eta_f)
            m.fgn.eta = sv;

        for (double T : spec.maturities) {
            const double F0 =
                forward_rate_fx(m.spot, m.dom.curve, m.fgn.curve, T);
            const double Dd = m.dom.curve.discount(T);
            const std::vector<double> strikes = strike_grid(F0, T, spec.deltas);
            const std::size_t n = strikes.size();

            std::vector<double> mc_iv(n, kNaN);
            std::vector<CellResult> mc_rows(n);
            if (has_mc) {
                for (std::size_t j = 0; j < n; ++j) {
                    mc_rows[j].sweep_value = sv;
                    mc_rows[j].maturity = T;
                    mc_rows[j].strike = strikes[j];
                    mc_rows[j].method = Method::mc;
                    mc_rows[j].price = kNaN;
                    mc_rows[j].implied_vol = kNaN;
                    mc_rows[j].iv_diff_vs_mc_bp = kNaN;
                    mc_rows[j].mc_se = kNaN;
                }
                PathStats ps;
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    const auto est = simulate_hhw_strikes(
                        m, T, spec.kind, strikes, spec.mc,
                        want_stats ? &ps : nullptr);
                    for (std::size_t j = 0; j < n; ++j) {
                        mc_rows[j].price = est[j].price;
                        mc_rows[j].mc_se = est[j].se;
                        try {
                            mc_iv[j] = row_implied_vol(est[j].price, spec.kind,
                                                       F0, strikes[j], T, Dd);
                            mc_rows[j].implied_vol = mc_iv[j];
                        } catch (const std::exception& e) {
                            mc_rows[j].note = sanitize_note(
                                std::string("implied vol failed: ") + e.what());
                            mc_rows[j].failed = true;
                        }
                    }
                    if (want_stats) {
                        for (std::size_t i = 0; i < ps.time.size(); ++i) {
                            stats_csv << fmt_or_empty(sv) << ',' << fmt17(T)
                                      << ',' << i << ',' << fmt17(ps.time[i])
                                      << ',' << fmt17(ps.mean_v[i]) << ','
                                      << fmt17(ps.mean_rd[i]) << ','
                                      << fmt17(ps.mean_rf[i]) << '\n';
                        }
                    }
                } catch (const std::exception& e) {
                    for (std::size_t j = 0; j < n; ++j) {
                        mc_rows[j].note =
                            sanitize_note(std::string("error: ") + e.what());
                        mc_rows[j].failed = true;
                    }
                }
                out.method_ms[int(Method::mc)] += elapsed_ms(t0);
                out.method_cells[int(Method::mc)] += int(n);
            }

            for (std::size_t j = 0; j < n; ++j) {
                OptionSpec opt;
                opt.kind = spec.kind;
                opt.strike = strikes[j];
                opt.maturity = T;
                for (Method method : spec.methods) {
                    if (method == Method::mc) {
                        out.rows.push_back(mc_rows[j]);
                        continue;
                    }
                    CellResult row;
                    row.sweep_value = sv;
                    row.maturity = T;
                    row.strike = strikes[j];
                    row.method = method;
                    row.price = kNaN;
                    row.implied_vol = kNaN;
                    row.iv_diff_vs_mc_bp = kNaN;
                    row.mc_se = kNaN;
                    const auto t0 = std::chrono::steady_clock::now();
                    try {
                        row.price = price_analytic(method, m, opt, F0, Dd);
                        row.implied_vol = row_implied_vol(
                            row.price, spec.kind, F0, strikes[j], T, Dd);
                        if (!std::isnan(mc_iv[j]))
                            row.iv_diff_vs_mc_bp =
                                (row.implied_vol - mc_iv[j]) * 1e4;
                    } catch (const std::exception& e) {
                        row.note =
                            sanitize_note(std::string("error: ") + e.what());
                        row.failed = true;
                    }
                    out.method_ms[int(method)] += elapsed_ms(t0);
                    out.method_cells[int(method)] += 1;
                    out.rows.push_back(std::move(row));
                }
            }
        }
    }

    for (const auto& row : out.rows)
        if (row.failed)
            ++out.failures;
    if (want_stats)
        out.path_stats_csv = stats_csv.str();
    return out;
}

std::string timing_path_for(const std::string& out_path) {
    const std::size_t dot = out_path.find_last_of('.');
    const std::size_t slash = out_path.find_last_of("/\\");
    if (dot == std::string::npos ||
        (slash != std::string::npos && dot < slash))
        return out_path + "_timing.csv";
    return out_path.substr(0, dot) + "_timing" + out_path.substr(dot);
}

void write_csv(const ExperimentResult& result, const ExperimentSpec& spec) {
    std::ofstream out(spec.out_path);
    if (!out)
        throw std::runtime_error("write_csv: cannot open " + spec.out_path);
    out << "sweep_var,sweep_value,maturity,strike,method,price,implied_vol,"
           "iv_diff_vs_mc_bp,mc_se,note\n";
    for (const CellResult& row : result.rows) {
        out << sweep_name(spec.sweep) << ',' << fmt_or_empty(row.sweep_value)
            << ',' << fmt17(row.maturity) << ',' << fmt17(row.strike) << ','
            << method_name(row.method) << ',' << fmt_or_empty(row.price) << ','
            << fmt_or_empty(row.implied_vol) << ','
            << fmt_or_empty(row.iv_diff_vs_mc_bp) << ','
            << fmt_or_empty(row.mc_se) << ',' << row.note << '\n';
    }
    out.close();

    std::ofstream ts(timing_path_for(spec.out_path));
    if (!ts)
        throw std::runtime_error("write_csv: cannot open timing sidecar");
    ts << "method,cells,total_ms,ms_per_option\n";
    for (int i = 0; i < kMethodCount; ++i) {
        if (result.method_cells[i] == 0)
            continue;
        ts << method_name(Method(i)) << ',' << result.method_cells[i] << ','
           << fmt17(result.method_ms[i]) << ','
           << fmt17(result.method_ms[i] / result.method_cells[i]) << '\n';
    }
    ts.close();

    if (!spec.path_stats_out.empty() && !result.path_stats_csv.empty()) {
        std::ofstream ps(spec.path_stats_out);
        if (!ps)
            throw std::runtime_error("write_csv: cannot open " +
                                     spec.path_stats_out);
        ps << result.path_stats_csv;
    }
}

ExperimentSpec experiment_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(
            std::string("experiment JSON: parse error: ") + e.what());
    }
    ExperimentSpec spec;
    if (j.contains("maturities"))
        spec.maturities = j["maturities"].get<std::vector<double>>();
    if (j.contains("deltas"))
        spec.deltas = j["deltas"].get<std::vector<double>>();
    if (j.contains("methods")) {
        spec.methods.clear();
        for (const auto& name : j["methods"])
            spec.methods.push_back(method_from_name(name.get<std::string>()));
    }
    if (j.contains("kind")) {
        const std::string k = j["kind"].get<std::string>();
        if (k == "put")
            spec.kind = OptionKind::put;
        else if (k == "call")
            spec.kind = OptionKind::call;
        else
            throw std::invalid_argument("experiment JSON: kind must be put or call");
    }
    if (j.contains("sweep"))
        spec.sweep = sweep_from_name(j["sweep"].get<std::string>());
    if (j.contains("sweep_values"))
        spec.sweep_values = j["sweep_values"].get<std::vector<double>>();
    if (j.contains("mc")) {
        const auto& mj = j["mc"];
        if (mj.contains("n_paths"))
            spec.mc.n_paths = mj["n_paths"].get<std::size_t>();
        if (mj.contains("dt"))
            spec.mc.dt = mj["dt"].get<double>();
        if (mj.contains("seed"))
            spec.mc.seed = mj["seed"].get<std::uint64_t>();
        if (mj.contains("n_batches"))
            spec.mc.n_batches = mj["n_batches"].get<int>();
        if (mj.contains("antithetic"))
            spec.mc.antithetic = mj["antithetic"].get<bool>();
    }
    if (j.contains("out"))
        spec.out_path = j["out"].get<std::string>();
    if (j.contains("path_stats_out"))
        spec.path_stats_out = j["path_stats_out"].get<std::string>();
    return spec;
}

ExperimentSpec load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_experiment: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return experiment_from_json_text(buf.str());
}

} // namespace hhw
