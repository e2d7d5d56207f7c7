#include "lreg/integrands.hpp"

#include <cmath>
#include <stdexcept>

namespace lreg {

namespace {

void check_arguments(double y, double sigma)
{
    if (!(y > 0.0) || !std::isfinite(y)) {
        throw std::domain_error("cross product: argument must be positive and finite");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma) || sigma == 1.0) {
        throw std::domain_error("cross product: sigma must be positive and different from 1");
    }
}

[[noreturn]] void root_error(const char* which, double nu, double y, double sigma)
{
    throw ImaginaryAxisRootError(std::string(which) + " cross product is not of fixed sign at nu=" +
                                 std::to_string(nu) + " y=" + std::to_string(y) +
                                 " sigma=" + std::to_string(sigma));
}

// P = I(y)K(sy) - I(sy)K(y) = e^{(1-s)y} Ihat(y)Khat(sy) (1 - R), 0 < s < 1.
CrossProductValue te_reduced(double nu, double y, double sigma)
{
    const double sy = sigma * y;
    if (y < kSmallArgument) {
        const double a = -std::log(sigma);
        const double p0 = nu > 0.0 ? std::sinh(nu * a) / nu : a;
        const double ef = (1.0 - sigma) * y;
        return {std::log(p0) - ef, ef, 0.0, 1};
    }
    const BesselOrder order(nu);
    const auto a = modified_bessel_log(order, y);
    const auto b = modified_bessel_log(order, sy);
    const double ln_r = b.log_i_scaled - a.log_i_scaled + a.log_k_scaled - b.log_k_scaled -
                        2.0 * (1.0 - sigma) * y;
    if (!(ln_r < 0.0)) {
        root_error("TE", nu, y, sigma);
    }
    const double r = std::exp(ln_r);
    const double one_minus_r = -std::expm1(ln_r);
    const double rp = r * (sigma * b.di - a.di + a.dk - sigma * b.dk);
    CrossProductValue v{};
    v.exp_factor = (1.0 - sigma) * y;
    v.log_value = a.log_i_scaled + b.log_k_scaled + std::log(one_minus_r);
    v.dlog = a.di + sigma * b.dk - rp / one_minus_r;
    v.sign = 1;
    return v;
}

// K~/K = 1 + x dk and (K~)'/K. Near mu = 1 both cancel when formed from dk, so
// they are rebuilt from r = K_{mu-1}/K_mu using x K' = -mu K - x K_{mu-1}.
struct TildeK {
    double ratio;
    double deriv;
};

TildeK tilde_k(double mu, double nu, double x, const ModifiedBesselLog& b)
{
    const double naive = 1.0 + x * b.dk;
    if (std::abs(naive) >= 0.25) {
        return {naive, x + mu * mu / x + b.dk};
    }
    const double lower = modified_bessel_log(BesselOrder(mu - 1.0 > 0.0 ? nu * nu / (1.0 + mu) : 0.0), x)
                             .log_k_scaled;
    const double r = std::exp(lower - b.log_k_scaled);
    const double one_minus_mu = -nu * nu / (1.0 + mu);
    return {one_minus_mu - x * r, x - mu * one_minus_mu / x - r};
}

// Q = It(y)Kt(sy) - It(sy)Kt(y) with It = I(1 + x di), Kt = K(1 + x dk).
CrossProductValue tm_reduced(double nu, double y, double sigma)
{
    const double mu = std::sqrt(nu * nu + 1.0);
    if (y < kSmallArgument && nu >= 1.0e-3) {
        const double a = -std::log(sigma);
        const double q0 = nu * nu * std::sinh(mu * a) / mu;
        const double ef = (1.0 - sigma) * y;
        return {std::log(q0) - ef, ef, 0.0, -1};
    }
    const double x1 = y;
    const double x2 = sigma * y;
    const BesselOrder order(mu);
    const auto a = modified_bessel_log(order, x1);
    const auto b = modified_bessel_log(order, x2);
    const double ti1 = 1.0 + x1 * a.di;
    const double ti2 = 1.0 + x2 * b.di;
    const TildeK k1 = tilde_k(mu, nu, x1, a);
    const TildeK k2 = tilde_k(mu, nu, x2, b);
    const double tk1 = k1.ratio;
    const double tk2 = k2.ratio;
    if (!(tk1 < 0.0) || !(tk2 < 0.0) || !(ti1 > 0.0) || !(ti2 > 0.0)) {
        root_error("TM", nu, y, sigma);
    }
    const double ln_r = b.log_i_scaled - a.log_i_scaled + a.log_k_scaled - b.log_k_scaled -
                        2.0 * (1.0 - sigma) * y + std::log(ti2) - std::log(ti1) +
                        std::log(-tk1) - std::log(-tk2);
    if (!(ln_r < 0.0)) {
        root_error("TM", nu, y, sigma);
    }
    const double mu2 = mu * mu;
    const auto di_tilde = [mu2](double x, double d) { return (x + mu2 / x + d) / (1.0 + x * d); };
    const double di1 = di_tilde(x1, a.di);
    const double di2 = di_tilde(x2, b.di);
    const double dk1 = k1.deriv / tk1;
    const double dk2 = k2.deriv / tk2;
    const double r = std::exp(ln_r);
    const double one_minus_r = -std::expm1(ln_r);
    const double rp = r * (sigma * di2 - di1 + dk1 - sigma * dk2);
    CrossProductValue v{};
    v.exp_factor = (1.0 - sigma) * y;
    v.log_value = a.log_i_scaled + std::log(ti1) + b.log_k_scaled + std::log(-tk2) +
                  std::log(one_minus_r);
    v.dlog = di1 + sigma * dk2 - rp / one_minus_r;
    v.sign = -1;
    return v;
}

// P(y, s) = -P(s y, 1/s) for s > 1; the same holds for Q.
template <class Reduced>
CrossProductValue mapped(Reduced reduced, double nu, double y, double sigma)
{
    check_arguments(y, sigma);
    if (sigma < 1.0) {
        return reduced(nu, y, sigma);
    }
    CrossProductValue v = reduced(nu, sigma * y, 1.0 / sigma);
    v.sign = -v.sign;
    v.dlog *= sigma;
    return v;
}

}  // namespace

std::string to_string(ModeKind kind)
{
    switch (kind) {
    case ModeKind::Vacuum: return "vacuum";
    case ModeKind::TE: return "TE";
    case ModeKind::TM: return "TM";
    }
    return "unknown";
}

SpectrumGenerator SpectrumGenerator::vacuum() { return {ModeKind::Vacuum, 1.0}; }

SpectrumGenerator SpectrumGenerator::dielectric(ModeKind kind, double sigma)
{
    if (kind == ModeKind::Vacuum) {
        throw std::invalid_argument("dielectric generator needs TE or TM");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma) || sigma == 1.0) {
        throw std::invalid_argument("sigma must be positive and different from 1");
    }
    return {kind, sigma};
}

double SpectrumGenerator::dlog(double nu, double y) const
{
    switch (kind_) {
    case ModeKind::TE: return dlog_cross_te(BesselOrder(nu), y, sigma_);
    case ModeKind::TM: return dlog_cross_tm(BesselOrder(nu), y, sigma_);
    case ModeKind::Vacuum: break;
    }
    throw std::logic_error("the vacuum generator has no transverse order");
}

double CrossProductValue::value() const { return sign * std::exp(exp_factor + log_value); }

double vacuum_integrand(double r, double s)
{
    if (!(r > 0.0)) {
        return 0.0;
    }
    const double r2 = r * r;
    const double r3coth = r < 1.0e-4 ? r2 * (1.0 + r2 / 3.0) : r2 * r / std::tanh(r);
    return r3coth * std::exp(-s * r) / 3.0;
}

CrossProductValue cross_te(BesselOrder nu, double y, double sigma)
{
    return mapped(te_reduced, nu.value(), y, sigma);
}

double dlog_cross_te(BesselOrder nu, double y, double sigma) { return cross_te(nu, y, sigma).dlog; }

CrossProductValue cross_tm(BesselOrder nu, double y, double sigma)
{
    return mapped(tm_reduced, nu.value(), y, sigma);
}

double dlog_cross_tm(BesselOrder nu, double y, double sigma) { return cross_tm(nu, y, sigma).dlog; }

}  // namespace lreg
