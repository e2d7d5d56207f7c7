#pragma once

#include <utility>

namespace lreg {

/// Order of a real-order Bessel function. Finite and non-negative.
class BesselOrder {
public:
    explicit BesselOrder(double nu);
    double value() const noexcept { return nu_; }

private:
    double nu_;
};

/// Ordinary Bessel functions of real order at a positive argument, with
/// first derivatives.
struct BesselJY {
    double j;
    double y;
    double jp;
    double yp;
};

/// Modified Bessel functions I_nu, K_nu in log-scaled form.
///
/// `log_i_scaled` is ln(e^{-x} I_nu(x)) and `log_k_scaled` is ln(e^{x} K_nu(x)).
/// Both stay finite where the unscaled values under- or overflow (large order
/// at small argument). `di` and `dk` are the logarithmic derivatives
/// I_nu'/I_nu and K_nu'/K_nu.
struct ModifiedBesselLog {
    double log_i_scaled;
    double log_k_scaled;
    double di;
    double dk;
};

/// e^{-y} I_nu(y) and e^{+y} K_nu(y) at a common argument.
struct ScaledBesselPair {
    double i_scaled;
    double k_scaled;
    double y;
};

BesselJY bessel_jy(BesselOrder nu, double x);
double bessel_j(BesselOrder nu, double x);
double bessel_y(BesselOrder nu, double x);

ModifiedBesselLog modified_bessel_log(BesselOrder nu, double x);
ScaledBesselPair scaled_pair(BesselOrder nu, double y);
double bessel_i_scaled(BesselOrder nu, double y);
double bessel_k_scaled(BesselOrder nu, double y);

/// (e^{-y} I_nu'(y), e^{+y} K_nu'(y)), i.e. the derivatives in the same
/// scaling as `scaled_pair`.
std::pair<double, double> bessel_derivatives(BesselOrder nu, double y);

/// y f'(y) + f(y).
constexpr double tilde(double f_value, double f_deriv, double y) noexcept
{
    return y * f_deriv + f_value;
}

/// Psi(3, x) = d^4 ln Gamma(x) / dx^4 for x > 0.
double polygamma3(double x);

namespace detail {
// Switch-over radius sqrt(nu^2 + x^2) between the Temme/Steed evaluation and
// the uniform (Debye) expansion. Exposed for the seam test.
inline constexpr double kDebyeRadius = 20.0;
ModifiedBesselLog modified_bessel_log_temme(double nu, double x);
ModifiedBesselLog modified_bessel_log_debye(double nu, double x);
}  // namespace detail

}  // namespace lreg
