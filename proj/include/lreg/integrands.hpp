#pragma once

#include "lreg/specfun.hpp"

#include <stdexcept>
#include <string>

namespace lreg {

enum class ModeKind { Vacuum, TE, TM };

std::string to_string(ModeKind kind);

/// Raised when a cross product vanishes or changes sign on the imaginary
/// axis, which would put a root of the spectrum generator there.
class ImaginaryAxisRootError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A spectrum-generating function. `sigma` is e^{alpha/2}; it is ignored for
/// the vacuum generator and must differ from 1 for TE/TM.
class SpectrumGenerator {
public:
    static SpectrumGenerator vacuum();
    static SpectrumGenerator dielectric(ModeKind kind, double sigma);

    ModeKind kind() const noexcept { return kind_; }
    double sigma() const noexcept { return sigma_; }

    /// Mode-sum weight f(z) = z/2 in units of hbar.
    static constexpr double mode_weight(double z) noexcept { return 0.5 * z; }

    /// d/dy ln|F(iy)| at transverse order nu; TE and TM only.
    double dlog(double nu, double y) const;

private:
    SpectrumGenerator(ModeKind kind, double sigma) : kind_(kind), sigma_(sigma) {}
    ModeKind kind_;
    double sigma_;
};

/// A modified-Bessel cross product in exponent-extracted form:
/// value = sign * exp(exp_factor + log_value), dlog = d/dy ln|value|.
struct CrossProductValue {
    double log_value;
    double exp_factor;
    double dlog;
    int sign;

    double value() const;
};

/// (1/3) r^3 e^{-s r} coth(r).
double vacuum_integrand(double r, double s);

/// P_nu(y, sigma) = I_nu(y) K_nu(sigma y) - I_nu(sigma y) K_nu(y).
CrossProductValue cross_te(BesselOrder nu, double y, double sigma);
double dlog_cross_te(BesselOrder nu, double y, double sigma);

/// Q_mu(y, sigma) = I~_mu(y) K~_mu(sigma y) - I~_mu(sigma y) K~_mu(y) with
/// mu = sqrt(nu^2 + 1) and f~(x) = x f'(x) + f(x).
CrossProductValue cross_tm(BesselOrder nu, double y, double sigma);
double dlog_cross_tm(BesselOrder nu, double y, double sigma);

/// Arguments below this use the small-argument limits of P and Q.
inline constexpr double kSmallArgument = 1.0e-4;

}  // namespace lreg
