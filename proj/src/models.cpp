#include "evt/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>

#include "evt/errors.hpp"
#include "evt/rng.hpp"
#include "evt/special.hpp"

namespace evt {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require_nondecreasing(const std::function<double(double)>& f, double lo, double hi,
                           const char* what) {
    const int n = 1024;
    const double lmin = std::log(lo), lmax = std::log(hi);
    double prev = f(lo);
    for (int i = 1; i < n; ++i) {
        const double t = std::exp(lmin + (lmax - lmin) * i / (n - 1));
        const double cur = f(t);
        if (!(std::isfinite(cur)) || cur + 1e-12 * (std::fabs(cur) + 1.0) < prev)
            throw domain_error(std::string(what) +
                               " is not nondecreasing (violation near t=" + fmt(t) + ")");
        prev = cur;
    }
}

// Geometric bisection of an increasing function over positive arguments.
double invert_increasing(const std::function<double(double)>& f, double x, double lo, double hi) {
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = std::sqrt(lo) * std::sqrt(hi);
        if (f(mid) < x)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TailModel TailModel::unit_pareto() {
    TailModel m;
    m.family_ = Family::UnitPareto;
    m.gamma_ = 1.0;
    m.rebuild_tag();
    return m;
}

TailModel TailModel::pareto(double alpha) {
    if (!(alpha > 0.0)) throw domain_error("pareto: alpha must be > 0");
    TailModel m;
    m.family_ = Family::Pareto;
    m.alpha_ = alpha;
    m.gamma_ = 1.0 / alpha;
    m.rebuild_tag();
    return m;
}

TailModel TailModel::gpd(double gamma, double sigma) {
    if (!(sigma > 0.0)) throw domain_error("gpd: sigma must be > 0");
    if (!std::isfinite(gamma)) throw domain_error("gpd: gamma must be finite");
    TailModel m;
    m.family_ = Family::Gpd;
    m.gamma_ = gamma;
    m.sigma_ = sigma;
    m.rebuild_tag();
    return m;
}

TailModel TailModel::gev(double gamma) {
    if (!std::isfinite(gamma)) throw domain_error("gev: gamma must be finite");
    TailModel m;
    m.family_ = Family::Gev;
    m.gamma_ = gamma;
    m.rebuild_tag();
    return m;
}

TailModel TailModel::burr(double gamma, double rho) {
    if (!(gamma > 0.0)) throw domain_error("burr: gamma must be > 0");
    if (!(rho < 0.0)) throw domain_error("burr: rho must be < 0");
    TailModel m;
    m.family_ = Family::Burr;
    m.gamma_ = gamma;
    m.rho_ = rho;
    m.rebuild_tag();
    return m;
}

TailModel TailModel::hall(double C, double gamma, double rho, double d) {
    if (!(C > 0.0)) throw domain_error("hall: C must be > 0");
    if (!(gamma > 0.0)) throw domain_error("hall: gamma must be > 0");
    if (!(rho < 0.0)) throw domain_error("hall: rho must be < 0");
    if (!std::isfinite(d)) throw domain_error("hall: d must be finite");
    TailModel m;
    m.family_ = Family::Hall;
    m.gamma_ = gamma;
    m.rho_ = rho;
    m.C_ = C;
    m.d_ = d;
    require_nondecreasing(
        [&m](double t) { return m.tail_quantile_unshifted(t); }, 1.0, 1e8, "hall: U(t)");
    m.rebuild_tag();
    return m;
}

TailModel TailModel::v_model(double gamma, double rho, double A0) {
    if (!(rho < 0.0)) throw domain_error("vmodel: rho must be < 0");
    if (!std::isfinite(gamma) || !std::isfinite(A0))
        throw domain_error("vmodel: gamma and A0 must be finite");
    TailModel m;
    m.family_ = Family::VModel;
    m.gamma_ = gamma;
    m.rho_ = rho;
    m.A0_ = A0;
    require_nondecreasing(
        [&m](double t) { return m.bm_quantile_unshifted(t); }, 1e-8, 1e8, "vmodel: V(t)");
    m.rebuild_tag();
    return m;
}

TailModel TailModel::point_shift(const TailModel& base, double shift) {
    if (!std::isfinite(shift)) throw domain_error("point_shift: shift must be finite");
    TailModel m = base;
    m.shift_ += shift;
    m.rebuild_tag();
    return m;
}

void TailModel::rebuild_tag() {
    switch (family_) {
        case Family::UnitPareto: tag_ = "unitpareto"; break;
        case Family::Pareto: tag_ = "pareto:alpha=" + fmt(alpha_); break;
        case Family::Gpd: tag_ = "gpd:gamma=" + fmt(gamma_) + ",sigma=" + fmt(sigma_); break;
        case Family::Gev: tag_ = "gev:gamma=" + fmt(gamma_); break;
        case Family::Burr: tag_ = "burr:gamma=" + fmt(gamma_) + ",rho=" + fmt(*rho_); break;
        case Family::Hall:
            tag_ = "hall:C=" + fmt(C_) + ",gamma=" + fmt(gamma_) + ",rho=" + fmt(*rho_) +
                   ",d=" + fmt(d_);
            break;
        case Family::VModel:
            tag_ = "vmodel:gamma=" + fmt(gamma_) + ",rho=" + fmt(*rho_) + ",A0=" + fmt(A0_);
            break;
    }
    if (shift_ != 0.0) {
        tag_ += (family_ == Family::UnitPareto) ? ":shift=" : ",shift=";
        tag_ += fmt(shift_);
    }
}

// Quantile expressed through q1m = 1 - u; keeps the deep tail accurate when
// the caller knows 1-u directly (tail_quantile, bm_quantile).
double TailModel::quantile_unshifted(double q1m) const {
    switch (family_) {
        case Family::UnitPareto:
            return 1.0 / q1m;
        case Family::Pareto:
            return std::pow(q1m, -1.0 / alpha_);
        case Family::Gpd:
            return sigma_ * powm1_over(gamma_, 1.0 / q1m);
        case Family::Gev: {
            const double L = -std::log1p(-q1m); // -log(u)
            return -powm1_over(-gamma_, L);
        }
        case Family::Burr:
            // ((1-u)^rho - 1)^(-gamma/rho)
            return std::pow(std::expm1(*rho_ * std::log(q1m)), -gamma_ / *rho_);
        case Family::Hall:
            return tail_quantile_unshifted(1.0 / q1m);
        case Family::VModel: {
            const double L = -std::log1p(-q1m);
            return bm_quantile_unshifted(1.0 / L);
        }
    }
    return 0.0; // unreachable
}

double TailModel::tail_quantile_unshifted(double t) const {
    switch (family_) {
        case Family::UnitPareto:
            return t;
        case Family::Pareto:
            return std::pow(t, gamma_);
        case Family::Gpd:
            return sigma_ * powm1_over(gamma_, t);
        case Family::Burr:
            return std::pow(std::expm1(-*rho_ * std::log(t)), -gamma_ / *rho_);
        case Family::Hall:
            return C_ * std::pow(t, gamma_) * (1.0 + d_ * std::pow(t, *rho_));
        case Family::Gev:
        case Family::VModel:
            return quantile_unshifted(1.0 / t);
    }
    return 0.0;
}

double TailModel::bm_quantile_unshifted(double t) const {
    switch (family_) {
        case Family::Gev:
            return powm1_over(gamma_, t);
        case Family::VModel:
            return powm1_over(gamma_, t) + A0_ * powm1_over(gamma_ + *rho_, t);
        default:
            // 1 - e^{-1/t}, kept accurate for large t
            return quantile_unshifted(-std::expm1(-1.0 / t));
    }
}

double TailModel::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw domain_error("quantile: u must be in (0,1)");
    return quantile_unshifted(1.0 - u) + shift_;
}

double TailModel::tail_quantile(double t) const {
    if (!(t > 1.0)) throw domain_error("tail_quantile: t must be > 1");
    return tail_quantile_unshifted(t) + shift_;
}

double TailModel::bm_quantile(double t) const {
    if (!(t > 0.0)) throw domain_error("bm_quantile: t must be > 0");
    const double v = bm_quantile_unshifted(t) + shift_;
    if (!std::isfinite(v)) throw domain_error("bm_quantile: quantile undefined at e^{-1/t}");
    return v;
}

double TailModel::log_tail_quantile(double t) const {
    if (shift_ == 0.0) {
        switch (family_) {
            case Family::UnitPareto:
                return std::log(t);
            case Family::Pareto:
                return gamma_ * std::log(t);
            case Family::Hall:
                return std::log(C_) + gamma_ * std::log(t) + std::log1p(d_ * std::pow(t, *rho_));
            case Family::Burr:
                return (-gamma_ / *rho_) * (std::log(std::expm1(-*rho_ * std::log(t))));
            default:
                break;
        }
    }
    return std::log(tail_quantile(t));
}

double TailModel::cdf(double x) const {
    x -= shift_;
    switch (family_) {
        case Family::UnitPareto:
            return x <= 1.0 ? 0.0 : 1.0 - 1.0 / x;
        case Family::Pareto:
            return x <= 1.0 ? 0.0 : 1.0 - std::pow(x, -alpha_);
        case Family::Gpd: {
            if (x <= 0.0) return 0.0;
            if (gamma_ == 0.0) return -std::expm1(-x / sigma_);
            const double w = 1.0 + gamma_ * x / sigma_;
            if (w <= 0.0) return 1.0; // past the finite endpoint (gamma < 0)
            return 1.0 - std::pow(w, -1.0 / gamma_);
        }
        case Family::Gev: {
            if (gamma_ == 0.0) return std::exp(-std::exp(-x));
            const double w = 1.0 + gamma_ * x;
            if (w <= 0.0) return gamma_ > 0.0 ? 0.0 : 1.0;
            return std::exp(-std::pow(w, -1.0 / gamma_));
        }
        case Family::Burr: {
            if (x <= 0.0) return 0.0;
            const double tau = -*rho_ / gamma_;
            const double lambda = -1.0 / *rho_;
            return 1.0 - std::pow(1.0 + std::pow(x, tau), -lambda);
        }
        case Family::Hall: {
            const double lo = 1.0 + 1e-14;
            if (x <= tail_quantile_unshifted(lo)) return 0.0;
            double hi = 2.0;
            while (tail_quantile_unshifted(hi) < x && hi < 1e300) hi *= hi;
            const double t = invert_increasing(
                [this](double s) { return tail_quantile_unshifted(s); }, x, lo, hi);
            return 1.0 - 1.0 / t;
        }
        case Family::VModel: {
            double lo = 1e-300, hi = 1e300;
            if (bm_quantile_unshifted(hi) <= x) return 1.0;
            if (bm_quantile_unshifted(lo) >= x) return 0.0;
            const double t = invert_increasing(
                [this](double s) { return bm_quantile_unshifted(s); }, x, lo, hi);
            return std::exp(-1.0 / t);
        }
    }
    return 0.0;
}

double TailModel::second_order_A(double t) const {
    if (!(t > 1.0)) throw domain_error("second_order_A: t must be > 1");
    if (shift_ != 0.0)
        throw capability_error("second_order_A: shifted models have no registered A(t)");
    switch (family_) {
        case Family::Hall: {
            const double s = d_ * std::pow(t, *rho_);
            return *rho_ * s / (1.0 + s);
        }
        case Family::Burr: {
            const double s = std::pow(t, *rho_);
            return gamma_ * s / (1.0 - s);
        }
        default:
            throw capability_error("second_order_A: no closed-form A(t) registered for '" +
                                   tag_ + "'");
    }
}

bool TailModel::has_gp_pair() const {
    switch (family_) {
        case Family::UnitPareto:
        case Family::Pareto:
        case Family::Gpd:
        case Family::Hall:
            return true;
        default:
            return false;
    }
}

double TailModel::gp_scale(double t) const {
    if (!(t > 0.0)) throw domain_error("gp_scale: t must be > 0");
    switch (family_) {
        case Family::UnitPareto:
        case Family::Pareto:
            return gamma_ * std::pow(t, gamma_);
        case Family::Gpd:
            return sigma_ * std::pow(t, gamma_);
        case Family::Hall: {
            const double a =
                C_ * std::pow(t, gamma_) * (gamma_ + (gamma_ + *rho_) * d_ * std::pow(t, *rho_));
            if (!(a > 0.0))
                throw domain_error("gp_scale: a(t) not positive at t=" + fmt(t) + " for '" +
                                   tag_ + "'");
            return a;
        }
        default:
            if (gamma_ > 0.0) return gamma_ * tail_quantile(t); // a(t) = gamma U(t)
            throw capability_error("gp_scale: no scale function registered for '" + tag_ +
                                   "' and gamma <= 0");
    }
}

double TailModel::gp_A(double t) const {
    switch (family_) {
        case Family::UnitPareto:
        case Family::Pareto:
        case Family::Gpd:
            return 0.0;
        case Family::Hall: {
            const double s = (gamma_ + *rho_) * d_ * std::pow(t, *rho_);
            return *rho_ * s / (gamma_ + s);
        }
        default:
            throw capability_error("gp_A: no GP-form rate registered for '" + tag_ + "'");
    }
}

bool TailModel::has_bm_pair() const {
    return family_ == Family::Gev || family_ == Family::VModel;
}

double TailModel::bm_scale(double t) const {
    if (!(t > 0.0)) throw domain_error("bm_scale: t must be > 0");
    switch (family_) {
        case Family::Gev:
            return std::pow(t, gamma_);
        case Family::VModel:
            return std::pow(t, gamma_) * (1.0 + A0_ * std::pow(t, *rho_));
        default:
            throw capability_error("bm_scale: no BM scale registered for '" + tag_ + "'");
    }
}

double TailModel::bm_A(double t) const {
    switch (family_) {
        case Family::Gev:
            return 0.0;
        case Family::VModel: {
            const double s = A0_ * std::pow(t, *rho_);
            return *rho_ * s / (1.0 + s);
        }
        default:
            throw capability_error("bm_A: no BM-form rate registered for '" + tag_ + "'");
    }
}

bool TailModel::has_finite_left_endpoint() const {
    switch (family_) {
        case Family::UnitPareto:
        case Family::Pareto:
        case Family::Gpd:
        case Family::Burr:
        case Family::Hall:
            return true;
        case Family::Gev:
            return gamma_ > 0.0;
        case Family::VModel:
            return gamma_ > 0.0 && (A0_ == 0.0 || gamma_ + *rho_ > 0.0);
    }
    return false;
}

double TailModel::left_endpoint() const {
    if (!has_finite_left_endpoint())
        throw capability_error("left_endpoint: '" + tag_ + "' has no finite left endpoint");
    double v = 0.0;
    switch (family_) {
        case Family::UnitPareto:
        case Family::Pareto: v = 1.0; break;
        case Family::Gpd:
        case Family::Burr: v = 0.0; break;
        case Family::Hall: v = C_ * (1.0 + d_); break;
        case Family::Gev: v = -1.0 / gamma_; break;
        case Family::VModel: v = -1.0 / gamma_ - (A0_ == 0.0 ? 0.0 : A0_ / (gamma_ + *rho_)); break;
    }
    return v + shift_;
}

Sample TailModel::sample(std::size_t n, std::uint64_t seed, std::uint64_t stream_index) const {
    if (n == 0) throw domain_error("sample: n must be >= 1");
    Rng rng = Rng::stream(seed, stream_index);
    std::vector<double> u(n);
    for (double& v : u) v = rng.uniform_open();
    std::sort(u.begin(), u.end());
    Sample s;
    s.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.values[i] = quantile(u[i]);
    s.seed = seed;
    s.model_tag = tag_;
    return s;
}

std::pair<Sample, Sample> TailModel::coupled_sample(const TailModel& m1, const TailModel& m2,
                                                    std::size_t n, std::uint64_t seed,
                                                    std::uint64_t stream_index) {
    if (n == 0) throw domain_error("coupled_sample: n must be >= 1");
    Rng rng = Rng::stream(seed, stream_index);
    std::vector<double> u(n);
    for (double& v : u) v = rng.uniform_open();
    std::sort(u.begin(), u.end());
    Sample a, b;
    a.values.resize(n);
    b.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        a.values[i] = m1.quantile(u[i]);
        b.values[i] = m2.quantile(u[i]);
    }
    a.seed = b.seed = seed;
    a.model_tag = m1.tag_;
    b.model_tag = m2.tag_;
    return {std::move(a), std::move(b)};
}

namespace {

struct KvBag {
    std::string family;
    std::map<std::string, double> kv;

    double take(const char* key) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw domain_error("model spec: missing key '" + std::string(key) + "' for family '" +
                               family + "'");
        const double v = it->second;
        kv.erase(it);
        return v;
    }
    double take_or(const char* key, double dflt) {
        auto it = kv.find(key);
        if (it == kv.end()) return dflt;
        const double v = it->second;
        kv.erase(it);
        return v;
    }
    void finish() {
        if (!kv.empty())
            throw domain_error("model spec: unknown key '" + kv.begin()->first +
                               "' for family '" + family + "'");
    }
};

} // namespace

TailModel parse_model_spec(const std::string& spec) {
    KvBag bag;
    const auto colon = spec.find(':');
    bag.family = spec.substr(0, colon);
    if (bag.family.empty()) throw domain_error("model spec: empty family name");
    if (colon != std::string::npos) {
        std::string rest = spec.substr(colon + 1);
        std::size_t pos = 0;
        while (pos < rest.size()) {
            auto comma = rest.find(',', pos);
            if (comma == std::string::npos) comma = rest.size();
            const std::string item = rest.substr(pos, comma - pos);
            pos = comma + 1;
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw domain_error("model spec: expected key=value, got '" + item + "'");
            const std::string key = item.substr(0, eq);
            const std::string valstr = item.substr(eq + 1);
            try {
                std::size_t used = 0;
                const double val = std::stod(valstr, &used);
                if (used != valstr.size()) throw std::invalid_argument("trailing");
                if (!bag.kv.emplace(key, val).second)
                    throw domain_error("model spec: duplicate key '" + key + "'");
            } catch (const std::invalid_argument&) {
                throw domain_error("model spec: cannot parse value for key '" + key + "'");
            } catch (const std::out_of_range&) {
                throw domain_error("model spec: value out of range for key '" + key + "'");
            }
        }
    }

    const double shift = bag.take_or("shift", 0.0);
    TailModel m = [&]() {
        if (bag.family == "unitpareto") return TailModel::unit_pareto();
        if (bag.family == "pareto") return TailModel::pareto(bag.take("alpha"));
        if (bag.family == "gpd") {
            const double g = bag.take("gamma");
            return TailModel::gpd(g, bag.take_or("sigma", 1.0));
        }
        if (bag.family == "gev") return TailModel::gev(bag.take("gamma"));
        if (bag.family == "burr") {
            const double g = bag.take("gamma");
            return TailModel::burr(g, bag.take("rho"));
        }
        if (bag.family == "hall") {
            const double C = bag.take_or("C", 1.0);
            const double g = bag.take("gamma");
            const double r = bag.take("rho");
            return TailModel::hall(C, g, r, bag.take_or("d", 1.0));
        }
        if (bag.family == "vmodel") {
            const double g = bag.take("gamma");
            const double r = bag.take("rho");
            return TailModel::v_model(g, r, bag.take("A0"));
        }
        throw domain_error("model spec: unknown family '" + bag.family + "'");
    }();
    bag.finish();
    return shift == 0.0 ? m : TailModel::point_shift(m, shift);
}

} // namespace evt
