#include "hhw/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hhw {

ZeroCurve::ZeroCurve(std::vector<std::pair<double, double>> knots)
    : knots_(std::move(knots)) {
    double prev_t = 0.0, prev_rt = 0.0;
    fwd_.reserve(knots_.size());
    cum_.reserve(knots_.size());
    for (const auto& [t, r] : knots_) {
        if (!(t > prev_t))
            throw std::invalid_argument("ZeroCurve: tenors must be positive and strictly increasing");
        if (!std::isfinite(r))
            throw std::invalid_argument("ZeroCurve: non-finite zero rate");
        const double rt = r * t;
        fwd_.push_back((rt - prev_rt) / (t - prev_t));
        cum_.push_back(rt);
        prev_t = t;
        prev_rt = rt;
    }
}

ZeroCurve ZeroCurve::flat(double rate) {
    return ZeroCurve({{1.0, rate}});
}

double ZeroCurve::forward_rate(double t) const {
    if (knots_.empty())
        return 0.0;
    for (std::size_t i = 0; i < knots_.size(); ++i)
        if (t <= knots_[i].first)
            return fwd_[i];
    return fwd_.back();  // flat extrapolation past the last knot
}

double ZeroCurve::rate_integral(double t) const {
    if (t < 0.0)
        throw std::invalid_argument("ZeroCurve: negative time");
    if (knots_.empty() || t == 0.0)
        return 0.0;
    double prev_t = 0.0, prev_cum = 0.0;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (t <= knots_[i].first)
            return prev_cum + fwd_[i] * (t - prev_t);
        prev_t = knots_[i].first;
        prev_cum = cum_[i];
    }
    return prev_cum + fwd_.back() * (t - prev_t);
}

double ZeroCurve::discount(double t) const {
    return std::exp(-rate_integral(t));
}

double ZeroCurve::zero_rate(double t) const {
    if (!(t > 0.0))
        throw std::invalid_argument("ZeroCurve: zero_rate needs t > 0");
    return rate_integral(t) / t;
}

std::array<std::array<double, 4>, 4> corr_matrix(const Correlations& c) {
    return {{{1.0, c.sv, c.sd, c.sf},
             {c.sv, 1.0, c.vd, c.vf},
             {c.sd, c.vd, 1.0, c.df},
             {c.sf, c.vf, c.df, 1.0}}};
}

std::array<std::array<double, 4>, 4>
cholesky4(const std::array<std::array<double, 4>, 4>& a) {
    constexpr double pivot_tol = 1e-12;
    std::array<std::array<double, 4>, 4> L{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k)
                s -= L[i][k] * L[j][k];
            if (i == j) {
                if (s < -pivot_tol)
                    throw std::invalid_argument(
                        "cholesky4: matrix is not positive semidefinite");
                L[i][i] = std::sqrt(std::max(s, 0.0));
            } else if (L[j][j] > 0.0) {
                L[i][j] = s / L[j][j];
            } else {
                if (std::fabs(s) > 1e-9)
                    throw std::invalid_argument(
                        "cholesky4: matrix is not positive semidefinite");
                L[i][j] = 0.0;
            }
        }
    }
    return L;
}

bool feller_satisfied(const HestonParams& h) {
    return 2.0 * h.k_v * h.theta_v >= h.gamma * h.gamma;
}

namespace {

void check_corr_entry(double rho, const char* name) {
    if (!(rho >= -1.0 && rho <= 1.0))
        throw std::invalid_argument(std::string("validate_model: correlation ") +
                                    name + " outside [-1, 1]");
}

} // namespace

std::vector<std::string> validate_model(const FxModel& m) {
    if (!(m.heston.v0 > 0.0))
        throw std::invalid_argument("validate_model: v0 must be positive");
    if (!(m.heston.theta_v > 0.0))
        throw std::invalid_argument("validate_model: theta_v must be positive");
    if (!(m.heston.k_v > 0.0))
        throw std::invalid_argument("validate_model: k_v must be positive");
    if (!(m.heston.gamma >= 0.0))
        throw std::invalid_argument("validate_model: gamma must be nonnegative");
    if (!(m.dom.k > 0.0))
        throw std::invalid_argument("validate_model: domestic mean reversion k must be positive");
    if (!(m.fgn.k > 0.0))
        throw std::invalid_argument("validate_model: foreign mean reversion k must be positive");
    if (!(m.dom.eta >= 0.0))
        throw std::invalid_argument("validate_model: domestic eta must be nonnegative");
    if (!(m.fgn.eta >= 0.0))
        throw std::invalid_argument("validate_model: foreign eta must be nonnegative");
    if (!(m.spot > 0.0))
        throw std::invalid_argument("validate_model: spot must be positive");

    check_corr_entry(m.corr.sv, "sv");
    check_corr_entry(m.corr.sd, "sd");
    check_corr_entry(m.corr.sf, "sf");
    check_corr_entry(m.corr.vd, "vd");
    check_corr_entry(m.corr.vf, "vf");
    check_corr_entry(m.corr.df, "df");
    cholesky4(corr_matrix(m.corr));  // throws when not PSD

    std::vector<std::string> warnings;
    if (!feller_satisfied(m.heston))
        warnings.push_back("Feller condition violated: 2 k_v theta_v < gamma^2 "
                           "(variance paths can touch zero)");
    return warnings;
}

void require_expansion_ready(const FxModel& m) {
    const double scale = std::max(std::fabs(m.heston.v0), std::fabs(m.heston.theta_v));
    if (std::fabs(m.heston.v0 - m.heston.theta_v) > 1e-12 * scale)
        throw std::invalid_argument(
            "require_expansion_ready: expansion pricers need v0 == theta_v");
    if (m.corr.vd != 0.0 || m.corr.vf != 0.0)
        throw std::invalid_argument(
            "require_expansion_ready: variance-rate correlations must be zero");
}

double forward_rate_fx(double S0, const ZeroCurve& dom, const ZeroCurve& fgn, double T) {
    if (T < 0.0)
        throw std::invalid_argument("forward_rate_fx: negative maturity");
    return S0 * fgn.discount(T) / dom.discount(T);
}

namespace {

ZeroCurve curve_from_json(const nlohmann::json& j) {
    std::vector<std::pair<double, double>> knots;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2)
            throw std::invalid_argument("model JSON: curve entries must be [tenor, rate] pairs");
        knots.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    return ZeroCurve(std::move(knots));
}

HullWhiteParams hw_from_json(const nlohmann::json& j) {
    HullWhiteParams p;
    p.k = j.at("k").get<double>();
    p.eta = j.at("eta").get<double>();
    p.curve = curve_from_json(j.at("curve"));
    return p;
}

} // namespace

FxModel model_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("model JSON: parse error: ") + e.what());
    }
    FxModel m;
    try {
        const auto& h = j.at("heston");
        m.heston.v0 = h.at("v0").get<double>();
        m.heston.theta_v = h.at("theta_v").get<double>();
        m.heston.k_v = h.at("k_v").get<double>();
        m.heston.gamma = h.at("gamma").get<double>();
        m.dom = hw_from_json(j.at("hw_dom"));
        m.fgn = hw_from_json(j.at("hw_for"));
        const auto& c = j.at("corr");
        m.corr.sv = c.at("sv").get<double>();
        m.corr.sd = c.at("sd").get<double>();
        m.corr.sf = c.at("sf").get<double>();
        m.corr.vd = c.at("vd").get<double>();
        m.corr.vf = c.at("vf").get<double>();
        m.corr.df = c.at("df").get<double>();
        m.spot = j.at("spot").get<double>();
    } catch (const nlohmann::json::exception& e) {
        // Missing keys and type mismatches are caller errors, same as bad syntax.
        throw std::invalid_argument(std::string("model JSON: ") + e.what());
    }
    validate_model(m);
    return m;
}

FxModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_model: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json_text(buf.str());
}

} // namespace hhw
