#include "lreg/laurent.hpp"
#include "lreg/quadrature.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

namespace {

double seconds(const std::function<void()>& f)
{
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same(const std::vector<lreg::IntegralSample>& a, const std::vector<lreg::IntegralSample>& b)
{
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].value != b[i].value || a[i].est_error != b[i].est_error) {
            return false;
        }
    }
    return true;
}

void compare(const char* label, lreg::ModeKind kind, double sigma, const lreg::SGrid& grid,
             const lreg::QuadratureConfig& cfg)
{
    std::vector<lreg::IntegralSample> serial;
    std::vector<lreg::IntegralSample> parallel;
    const double ts = seconds([&] { serial = lreg::sample_curve_serial(kind, sigma, grid, cfg); });
    const double tp = seconds([&] { parallel = lreg::sample_curve(kind, sigma, grid, cfg); });
    std::printf("%-22s points=%4zu serial=%8.3fs openmp=%8.3fs speedup=%5.2f identical=%s\n", label,
                grid.points.size(), ts, tp, ts / tp, same(serial, parallel) ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv)
{
    const int dielectric_points = argc > 1 ? std::atoi(argv[1]) : 16;
    std::printf("threads=%d\n", omp_get_max_threads());

    const auto vac_grid = lreg::make_grid(0.05, 1.0, 200);
    compare("vacuum sample_curve", lreg::ModeKind::Vacuum, 1.0, vac_grid,
            lreg::QuadratureConfig::vacuum_defaults());

    const auto die_grid = lreg::make_grid(0.05, 1.0, dielectric_points);
    compare("TE sample_curve", lreg::ModeKind::TE, 8.0 / 27.0, die_grid,
            lreg::QuadratureConfig::dielectric_defaults());
    compare("TM sample_curve", lreg::ModeKind::TM, 8.0 / 27.0, die_grid,
            lreg::QuadratureConfig::dielectric_defaults());

    const auto samples = lreg::sample_curve(lreg::ModeKind::Vacuum, 1.0, vac_grid,
                                            lreg::QuadratureConfig::vacuum_defaults());
    const auto data = lreg::SampledFunction::from_samples(samples);
    lreg::FitMatrix a;
    lreg::FitMatrix b;
    const double ts = seconds([&] { a = lreg::build_matrix_serial(data, -7, 9); });
    const double tp = seconds([&] { b = lreg::build_matrix(data, -7, 9); });
    bool identical = a.entries.size() == b.entries.size();
    for (std::size_t i = 0; identical && i < a.entries.size(); ++i) {
        identical = a.entries[i].coeffs == b.entries[i].coeffs;
    }
    std::printf("%-22s windows=%3zu serial=%8.4fs openmp=%8.4fs speedup=%5.2f identical=%s\n",
                "build_matrix", a.entries.size(), ts, tp, ts / tp, identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
