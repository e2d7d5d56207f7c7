#pragma once

namespace lreg {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;  // J s, CODATA 2018 (exact in SI 2019)
inline constexpr double c = 2.99792458e8;        // m/s, exact
inline constexpr double hbar_c = hbar * c;       // J m
}  // namespace constants

struct PlateGeometry {
    double Lx = 1.0;
    double Ly = 1.0;
    double Lz = 1.0;

    void validate() const;
    /// Parallel-plate limit Lx, Ly >> Lz.
    bool plate_limit() const noexcept { return Lx / Lz >= 100.0 && Ly / Lz >= 100.0; }
};

/// Permittivity eps0 * exp(alpha z / Lz), sigma = exp(alpha / 2).
class DielectricSpec {
public:
    static DielectricSpec from_alpha(double alpha, double eps0_relative = 1.0);
    static DielectricSpec from_sigma(double sigma, double eps0_relative = 1.0);

    double alpha() const noexcept { return alpha_; }
    double sigma() const noexcept { return sigma_; }
    double eps0_relative() const noexcept { return eps0_; }

private:
    DielectricSpec(double alpha, double sigma, double eps0) : alpha_(alpha), sigma_(sigma), eps0_(eps0) {}
    double alpha_;
    double sigma_;
    double eps0_;
};

struct ForceReport {
    double c0_te = 0.0;
    double c0_tm = 0.0;
    double F0 = 0.0;            // N
    double force_te = 0.0;      // N, F0 c0_te
    double force_tm = 0.0;      // N, F0 c0_tm
    double delta_force = 0.0;   // N, F0 (c0_te + c0_tm)
    double vacuum_force = 0.0;  // N, total vacuum attraction on one plate
    double ratio_te = 0.0;
    double ratio_tm = 0.0;
    /// Coefficients of Lx Ly / Lz^4 (SI), independent of the geometry.
    double scaled_F0 = 0.0;
    double scaled_force_te = 0.0;
    double scaled_force_tm = 0.0;
};

double casimir_energy_te(double c0, const PlateGeometry& geom);
double vacuum_force_per_area(double Lz);
double f0_prefactor(const DielectricSpec& spec, const PlateGeometry& geom);
ForceReport force_report(double c0_te, double c0_tm, const DielectricSpec& spec,
                         const PlateGeometry& geom);

/// c0 * 15 alpha^4 / (4 pi^4).
double force_ratio(double c0, double alpha);

}  // namespace lreg
