#pragma once

#include "lreg/grid.hpp"
#include "lreg/integrands.hpp"

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace lreg {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by sample_curve; carries the grid index of the failing point.
class SampleError : public QuadratureError {
public:
    SampleError(std::size_t index, const std::string& what);
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

struct QuadratureConfig {
    double rel_tol = 1.0e-9;
    double abs_tol = 1.0e-14;
    double tail_tol = 1.0e-13;
    int max_panels = 4096;

    static QuadratureConfig vacuum_defaults();
    static QuadratureConfig dielectric_defaults();
    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double est_error = 0.0;
    double cutoff = 0.0;
    int panels = 0;
};

struct IntegralSample {
    double s = 0.0;
    double value = 0.0;
    double est_error = 0.0;
    ModeKind kind = ModeKind::Vacuum;
    double sigma = 1.0;
};

/// Extra factor on the inner (y) integrand of the dielectric double integral.
/// `Plain` is the documented integrand; `Frequency` multiplies it by y.
enum class InnerWeight { Plain, Frequency };

/// Adaptive 21-point Gauss-Kronrod on a finite interval.
QuadratureResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureConfig& cfg);

/// Integral of f(x) e^{-s x} over [0, inf).
QuadratureResult integrate_decaying(const std::function<double(double)>& f, double s,
                                    const QuadratureConfig& cfg);

/// Truncation point (-ln tail_tol + 20) / s.
double truncation_point(double s, const QuadratureConfig& cfg);

IntegralSample eval_I_vacuum(double s, const QuadratureConfig& cfg);

/// Closed form (1/24) Psi(3, s/2) - 2/s^4.
double vacuum_closed_form(double s);

IntegralSample eval_I_dielectric(ModeKind kind, double s, double sigma, const QuadratureConfig& cfg,
                                 InnerWeight weight = InnerWeight::Plain);

IntegralSample eval_sample(ModeKind kind, double s, double sigma, const QuadratureConfig& cfg,
                           InnerWeight weight = InnerWeight::Plain);

/// One sample per grid point, in grid order. Grid points are evaluated
/// concurrently with OpenMP; each integral is sequential, so the result is
/// bit-identical to sample_curve_serial.
std::vector<IntegralSample> sample_curve(ModeKind kind, double sigma, const SGrid& grid,
                                         const QuadratureConfig& cfg,
                                         InnerWeight weight = InnerWeight::Plain);
std::vector<IntegralSample> sample_curve_serial(ModeKind kind, double sigma, const SGrid& grid,
                                                const QuadratureConfig& cfg,
                                                InnerWeight weight = InnerWeight::Plain);

}  // namespace lreg
