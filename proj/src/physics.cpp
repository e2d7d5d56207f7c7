#include "lreg/physics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lreg {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;
}  // namespace

void PlateGeometry::validate() const
{
    if (!(Lx > 0.0) || !(Ly > 0.0) || !(Lz > 0.0) || !std::isfinite(Lx * Ly * Lz)) {
        throw std::invalid_argument("plate dimensions must be positive and finite");
    }
}

DielectricSpec DielectricSpec::from_alpha(double alpha, double eps0_relative)
{
    if (!std::isfinite(alpha) || alpha == 0.0) {
        throw std::invalid_argument("alpha must be finite and nonzero");
    }
    if (!(eps0_relative > 0.0)) {
        throw std::invalid_argument("eps0 must be positive");
    }
    return {alpha, std::exp(0.5 * alpha), eps0_relative};
}

DielectricSpec DielectricSpec::from_sigma(double sigma, double eps0_relative)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma) || sigma == 1.0) {
        throw std::invalid_argument("sigma must be positive and different from 1");
    }
    if (!(eps0_relative > 0.0)) {
        throw std::invalid_argument("eps0 must be positive");
    }
    return {2.0 * std::log(sigma), sigma, eps0_relative};
}

double casimir_energy_te(double c0, const PlateGeometry& geom)
{
    geom.validate();
    const double lz3 = geom.Lz * geom.Lz * geom.Lz;
    return -geom.Lx * geom.Ly * constants::hbar_c * c0 / (4.0 * kPi2 * lz3);
}

double vacuum_force_per_area(double Lz)
{
    if (!(Lz > 0.0)) {
        throw std::invalid_argument("Lz must be positive");
    }
    const double lz2 = Lz * Lz;
    return kPi2 * constants::hbar_c / (240.0 * lz2 * lz2);
}

double f0_prefactor(const DielectricSpec& spec, const PlateGeometry& geom)
{
    geom.validate();
    const double a2 = spec.alpha() * spec.alpha();
    const double lz2 = geom.Lz * geom.Lz;
    return constants::hbar_c * a2 * a2 * geom.Lx * geom.Ly / (64.0 * kPi2 * lz2 * lz2);
}

double force_ratio(double c0, double alpha)
{
    const double a2 = alpha * alpha;
    return c0 * 15.0 * a2 * a2 / (4.0 * kPi2 * kPi2);
}

ForceReport force_report(double c0_te, double c0_tm, const DielectricSpec& spec,
                         const PlateGeometry& geom)
{
    if (!std::isfinite(c0_te) || !std::isfinite(c0_tm)) {
        throw std::invalid_argument("Casimir coefficients must be finite");
    }
    ForceReport r;
    r.c0_te = c0_te;
    r.c0_tm = c0_tm;
    r.F0 = f0_prefactor(spec, geom);
    r.force_te = r.F0 * c0_te;
    r.force_tm = r.F0 * c0_tm;
    r.delta_force = r.F0 * (c0_te + c0_tm);
    r.vacuum_force = geom.Lx * geom.Ly * vacuum_force_per_area(geom.Lz);
    r.ratio_te = r.force_te / r.vacuum_force;
    r.ratio_tm = r.force_tm / r.vacuum_force;
    r.scaled_F0 = f0_prefactor(spec, PlateGeometry{});
    r.scaled_force_te = r.scaled_F0 * c0_te;
    r.scaled_force_tm = r.scaled_F0 * c0_tm;
    return r;
}

}  // namespace lreg
