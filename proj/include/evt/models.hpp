#ifndef EVT_MODELS_HPP
#define EVT_MODELS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace evt {

/// An i.i.d. sample, sorted ascending, together with its provenance.
struct Sample {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::string model_tag;

    std::size_t size() const { return values.size(); }
};

enum class Family { UnitPareto, Pareto, Gpd, Gev, Burr, Hall, VModel };

/// A parametric univariate tail model with exact quantile-level structure.
///
/// Families:
///   unitpareto            F(x) = 1 - 1/x, U(t) = t
///   pareto:alpha=a        F(x) = 1 - x^-a, U(t) = t^(1/a)
///   gpd:gamma=g,sigma=s   generalized Pareto, U(t) = s (t^g - 1)/g
///   gev:gamma=g           generalized extreme value, V(t) = (t^g - 1)/g
///   burr:gamma=g,rho=r    1 - F(x) = (1 + x^tau)^-lambda, tau = -r/g,
///                         lambda = -1/r, so U(t) = (t^-r - 1)^(-g/r);
///                         extreme value index g, second-order parameter r
///   hall:C=,gamma=,rho=,d=   U(t) = C t^gamma (1 + d t^rho); the relative
///                         second-order condition is exact at every t with
///                         A(t) = rho d t^rho / (1 + d t^rho)
///   vmodel:gamma=,rho=,A0=   V(t) = (t^g - 1)/g + A0 (t^(g+r) - 1)/(g+r);
///                         the BM second-order condition is exact at every t
///                         with a(t) = t^g (1 + A0 t^r) and
///                         A(t) = r A0 t^r / (1 + A0 t^r)
///
/// Any family accepts an optional additive `shift=` (a positive shift makes
/// the support bounded away from zero where an operation requires it).
class TailModel {
public:
    static TailModel unit_pareto();
    static TailModel pareto(double alpha);
    static TailModel gpd(double gamma, double sigma = 1.0);
    static TailModel gev(double gamma);
    static TailModel burr(double gamma, double rho);
    static TailModel hall(double C, double gamma, double rho, double d);
    static TailModel v_model(double gamma, double rho, double A0);
    static TailModel point_shift(const TailModel& base, double shift);

    Family family() const { return family_; }
    double gamma() const { return gamma_; }
    std::optional<double> rho() const { return rho_; }
    double shift() const { return shift_; }
    const std::string& tag() const { return tag_; }

    double cdf(double x) const;
    double quantile(double u) const;      // F^-(u), u in (0,1)
    double tail_quantile(double t) const; // U(t), t > 1
    double bm_quantile(double t) const;   // V(t), t > 0
    double log_tail_quantile(double t) const;

    /// A(t) of the relative second-order condition (families with a
    /// registered closed form only: Hall, Burr, unshifted).
    double second_order_A(double t) const;

    /// Scale a(t) of the GP-form second-order condition. Registered exactly
    /// for Pareto/GPD (A == 0) and Hall; defaults to gamma*U(t) for other
    /// gamma > 0 families.
    double gp_scale(double t) const;
    double gp_A(double t) const;
    bool has_gp_pair() const;

    /// Scale a(t) and rate A(t) of the BM-form (V-based) condition.
    /// Registered for GEV (A == 0) and the V model.
    double bm_scale(double t) const;
    double bm_A(double t) const;
    bool has_bm_pair() const;

    bool has_finite_left_endpoint() const;
    double left_endpoint() const;

    /// n i.i.d. draws X_i = F^-(U_i), U_i uniform on the open interval
    /// (0,1), from stream(seed, stream_index); output sorted. Deterministic
    /// given (seed, stream_index).
    Sample sample(std::size_t n, std::uint64_t seed, std::uint64_t stream_index = 0) const;

    /// Comonotone coupling: both coordinates use the same uniforms, so
    /// X_i < X_j iff X_i* < X_j*. Index i pairs the two outputs.
    static std::pair<Sample, Sample> coupled_sample(const TailModel& m1, const TailModel& m2,
                                                    std::size_t n, std::uint64_t seed,
                                                    std::uint64_t stream_index = 0);

private:
    TailModel() = default;

    Family family_ = Family::UnitPareto;
    double gamma_ = 1.0;
    std::optional<double> rho_;
    double alpha_ = 1.0; // Pareto
    double sigma_ = 1.0; // GPD
    double C_ = 1.0;     // Hall
    double d_ = 1.0;     // Hall
    double A0_ = 0.0;    // VModel
    double shift_ = 0.0;
    std::string tag_;

    double quantile_unshifted(double u) const;
    double tail_quantile_unshifted(double t) const;
    double bm_quantile_unshifted(double t) const;
    void rebuild_tag();
};

/// Parses the model grammar `family:key=value,key=value`, e.g.
/// `hall:C=1,gamma=0.5,rho=-1,d=1`. Errors name the offending key.
TailModel parse_model_spec(const std::string& spec);

} // namespace evt

#endif
