#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lreg/laurent.hpp"
#include "oracles.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

using namespace lreg;

namespace {

SampledFunction tabulate(const std::function<double(double)>& f, int J = 200)
{
    SampledFunction d;
    for (double s : make_grid(0.05, 1.0, J).points) {
        d.s.push_back(s);
        d.values.push_back(f(s));
    }
    return d;
}

const SampledFunction& vacuum_data()
{
    static const SampledFunction d = SampledFunction::from_samples(sample_curve(
        ModeKind::Vacuum, 1.0, make_grid(0.05, 1.0, 200), QuadratureConfig::vacuum_defaults()));
    return d;
}

constexpr double kVacuumC0 = std::numbers::pi * std::numbers::pi * std::numbers::pi *
                             std::numbers::pi / 360.0;

}  // namespace

TEST_CASE("grid")
{
    const auto g = make_grid(0.05, 1.0, 200);
    REQUIRE(g.points.size() == 200);
    CHECK(g.points.front() == 0.05);
    CHECK(g.points.back() == 1.0);
    CHECK(g.points[1] - g.points[0] == doctest::Approx(0.95 / 199.0).epsilon(1e-12));
    const auto l = make_grid(0.05, 1.0, 3, Spacing::Log);
    CHECK(l.points[1] == doctest::Approx(std::sqrt(0.05)).epsilon(1e-14));
    CHECK(make_grid(0.3, 1.0, 1).points == std::vector<double>{0.3});
    CHECK_THROWS_AS(make_grid(0.0, 1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1.0, 0.5, 10), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(0.1, 1.0, 0), std::invalid_argument);
    CHECK(parse_spacing("log") == Spacing::Log);
    CHECK_THROWS_AS(parse_spacing("cubic"), std::invalid_argument);
}

TEST_CASE("fit examples")
{
    const auto d = tabulate([](double s) { return 2.0 / std::pow(s, 4) + 0.27; });
    const auto f = fit_window(d, -4, 1);
    CHECK(f.coeff(-4) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(f.coeff(0) == doctest::Approx(0.27).epsilon(1e-10));
    CHECK(std::abs(f.coeff(1)) < 1e-9);
    CHECK(f.rms_residual < 1e-10);  // data reach 3.2e5
    CHECK_THROWS_AS(f.coeff(2), std::out_of_range);

    const auto c = fit_window(tabulate([](double) { return 0.27; }), -2, 2);
    CHECK(c.coeff(0) == doctest::Approx(0.27).epsilon(1e-10));
    for (int n : {-2, -1, 1, 2}) {
        CHECK(std::abs(c.coeff(n)) < 1e-10);
    }

    const std::vector<double> ones(d.size(), 1.0);
    const auto w = fit_window(d, -4, 1, ones);
    CHECK(w.coeff(0) == doctest::Approx(f.coeff(0)).epsilon(1e-14));
}

TEST_CASE("fit with noise")
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 1e-6);
    for (int trial = 0; trial < 20; ++trial) {
        auto d = tabulate([](double s) { return 2.0 / std::pow(s, 4) + 0.27; });
        for (auto& v : d.values) {
            v += noise(rng);
        }
        CHECK(std::abs(fit_window(d, -4, 1).coeff(0) - 0.27) <= 1e-4);
    }
}

TEST_CASE("fit failures")
{
    SampledFunction same;
    same.s.assign(50, 0.5);
    same.values.assign(50, 1.0);
    CHECK_THROWS_AS(fit_window(same, -2, 2), RegularizationError);
    const auto tiny = tabulate([](double s) { return s; }, 4);
    CHECK_THROWS_AS(fit_window(tiny, -3, 3), RegularizationError);
    CHECK_THROWS_AS(fit_window(tiny, 1, 1), RegularizationError);
}

TEST_CASE("fit matrix")
{
    const auto d = tabulate([](double s) { return 1.0 / (s * s) + 1.0; });
    const auto m = build_matrix(d, -3, 3);
    CHECK(m.entries.size() == 4);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 2);
    CHECK_THROWS_AS(m.at(-3, 1), std::out_of_range);
    CHECK_THROWS_AS(build_matrix(d, -1, 3), RegularizationError);

    const auto v = build_matrix(vacuum_data(), -5, 8);
    for (int n2 = 1; n2 <= 7; ++n2) {
        CHECK(v.at(-4, n2).coeff(-4) == doctest::Approx(2.0).epsilon(0.01));
    }
    const auto p = build_matrix(vacuum_data(), -7, 9);
    const auto q = build_matrix_serial(vacuum_data(), -7, 9);
    for (std::size_t i = 0; i < p.entries.size(); ++i) {
        CHECK(p.entries[i].coeffs == q.entries[i].coeffs);
    }
}

TEST_CASE("pruning on vacuum data")
{
    const auto m = build_matrix(vacuum_data(), -7, 9);
    const auto r = prune(m, 1e-3);
    for (int n1 = -6; n1 <= -4; ++n1) {
        for (int n2 = 1; n2 <= 8; ++n2) {
            CAPTURE(n1);
            CAPTURE(n2);
            CHECK(r.kept(-4, n1, n2));
            CHECK(r.window_order(n1, n2) == -4);
            // Narrow windows alias the truncated s^k tail into c_{-3}..c_{-1};
            // from n2 = 7 on those are noise-level.
            for (int n = n1; n <= -1 && n2 >= 7; ++n) {
                if (n != -4) {
                    CHECK_FALSE(r.kept(n, n1, n2));
                }
            }
        }
    }
    const auto all = prune(m, 0.0);
    for (const auto& e : all.entries) {
        CHECK(e.kept);
    }
    CHECK_THROWS_AS(prune(m, 1.0), RegularizationError);
    CHECK_THROWS_AS(prune(m, -0.1), RegularizationError);
}

TEST_CASE("pruning and detection on a double pole")
{
    const auto d = tabulate([](double s) { return 1.0 / (s * s) + 1.0; });
    const auto m = build_matrix(d, -7, 9);
    for (AverageRule rule : {AverageRule::PrincipalPart, AverageRule::CrossWindow}) {
        const auto r = prune(m, 1e-3, rule);
        for (int n1 = -6; n1 <= -2; ++n1) {
            for (int n2 = 1; n2 <= 8; ++n2) {
                CHECK(r.kept(-2, n1, n2));
                CHECK_FALSE(r.kept(-1, n1, n2));
            }
        }
        if (rule == AverageRule::PrincipalPart) {
            CHECK(detect_pole_order(r).order == -2);
        }
    }
    // Under the cross-window mean the leading coefficient of every window is
    // its own average, so it is never dropped and rows cannot agree.
    const auto cross = prune(m, 1e-3, AverageRule::CrossWindow);
    for (int n1 = -6; n1 <= -1; ++n1) {
        CHECK(cross.entry(n1, n1, 4).average == cross.entry(n1, n1, 4).coeff);
        CHECK(cross.window_order(n1, 4) == n1);
    }
    CHECK_THROWS_AS(detect_pole_order(cross), RegularizationError);
    CHECK(parse_average_rule("literal") == AverageRule::LiteralDivisor);
    CHECK(to_string(AverageRule::CrossWindow) == "cross");
    CHECK_THROWS_AS(parse_average_rule("median"), std::invalid_argument);
}

TEST_CASE("detection on vacuum data")
{
    const auto r = prune(build_matrix(vacuum_data(), -7, 9), 1e-3);
    const auto p = detect_pole_order(r);
    CHECK(p.order == -4);
    CHECK(p.rows() >= 2);
    CHECK(p.cols() >= 2);
}

TEST_CASE("detection fails without agreement")
{
    auto r = prune(build_matrix(vacuum_data(), -7, 9), 1e-3);
    for (auto& e : r.entries) {
        e.kept = false;
    }
    try {
        detect_pole_order(r);
        FAIL("expected RegularizationError");
    } catch (const RegularizationError& e) {
        CHECK(e.stage() == Stage::Detect);
    }
}

TEST_CASE("refit curves of an exact curve are flat")
{
    const auto d = tabulate([](double s) { return 2.0 / std::pow(s, 4) + 0.27 + 0.5 * s; });
    LaurentParams params;
    const auto r = regularize(d, params);
    CHECK(r.pole_order == -4);
    REQUIRE(r.curves.size() == 8);
    for (const auto& c : r.curves) {
        REQUIRE(c.c0hat.size() == 8);
        for (double v : c.c0hat) {
            CHECK(std::abs(v - 0.27) < 1e-6);
        }
    }
    for (RefitBasis basis : {RefitBasis::Exclusive, RefitBasis::Inclusive}) {
        for (LeadingSource lead : {LeadingSource::Window, LeadingSource::SubMatrixMean}) {
            const auto curves = subtract_and_refit(d, r.detection, r.matrix, 8, {lead, basis});
            for (const auto& c : curves) {
                CHECK(std::abs(c.c_minus - 2.0) < 1e-8);
                CHECK(std::abs(c.c0hat.back() - 0.27) < 1e-6);
            }
        }
    }
}

TEST_CASE("subtraction removes the leading term")
{
    const auto& d = vacuum_data();
    const auto r = regularize(d, LaurentParams{});
    for (const auto& curve : r.curves) {
        SampledFunction sub = d;
        for (std::size_t j = 0; j < sub.size(); ++j) {
            sub.values[j] -= curve.c_minus * std::pow(sub.s[j], -4);
        }
        const auto refit = fit_window(sub, -4, curve.n2);
        const auto& e = r.pruning.entry(-4, -4, curve.n2);
        CHECK(std::abs(refit.coeff(-4)) <= r.pruning.eps_c * std::abs(e.average));
    }
}

TEST_CASE("turning points")
{
    const std::vector<double> dip{0.30, 0.28, 0.27, 0.275, 0.29};
    CHECK(turning_point(dip) == 0.27);
    CHECK(turning_point(dip, TurningRule::MinimalVariation) == 0.27);
    const std::vector<double> flat(5, 0.27);
    CHECK(turning_point(flat) == 0.27);
    CHECK(turning_point(flat, TurningRule::MinimalVariation) == 0.27);
    const std::vector<double> mono{0.3, 0.29, 0.285, 0.284};
    CHECK(turning_point(mono) == 0.284);
    CHECK(turning_point(mono, TurningRule::MinimalVariation) == 0.285);
    const std::vector<double> two{0.1, 0.2};
    CHECK_THROWS_AS(turning_point(two), RegularizationError);
    CHECK(parse_turning_rule("sign-change") == TurningRule::SignChange);
    CHECK_THROWS_AS(parse_turning_rule("steepest"), std::invalid_argument);
}

TEST_CASE("vacuum regularization")
{
    const auto r = regularize(vacuum_data(), LaurentParams{});
    CHECK(r.pole_order == -4);
    CHECK(std::abs(r.c0 - 0.27281) <= 0.005);
    CHECK(std::abs(r.c0 - kVacuumC0) / kVacuumC0 <= 0.012);
    double sum = 0.0;
    for (double t : r.turning_values) {
        sum += t;
    }
    CHECK(r.c0 == sum / static_cast<double>(r.turning_values.size()));
    const auto [lo, hi] = std::minmax_element(r.turning_values.begin(), r.turning_values.end());
    CHECK(*hi - *lo < 0.005);
    CHECK(r.spread == *hi - *lo);
    CHECK_FALSE(r.ill_conditioned);

    LaurentParams sign;
    sign.turning = TurningRule::SignChange;
    const auto s = regularize(vacuum_data(), sign);
    CHECK(s.pole_order == -4);
    CHECK(std::abs(s.c0 - 0.27281) <= 0.005);
}

TEST_CASE("scale covariance")
{
    // A power of two commutes with every floating-point operation involved.
    SampledFunction quad = vacuum_data();
    for (auto& v : quad.values) {
        v *= 4.0;
    }
    const auto q0 = regularize(vacuum_data(), LaurentParams{});
    const auto q1 = regularize(quad, LaurentParams{});
    CHECK(q1.c0 == 4.0 * q0.c0);
    CHECK(q1.curves[3].c0hat[5] == 4.0 * q0.curves[3].c0hat[5]);

    const double lambda = 3.7;
    SampledFunction scaled = vacuum_data();
    for (auto& v : scaled.values) {
        v *= lambda;
    }
    const LaurentParams params;
    const auto a = regularize(vacuum_data(), params);
    const auto b = regularize(scaled, params);
    CHECK(a.pole_order == b.pole_order);
    CHECK(b.c0 == doctest::Approx(lambda * a.c0).epsilon(1e-6));
    for (std::size_t i = 0; i < a.pruning.entries.size(); ++i) {
        CHECK(a.pruning.entries[i].kept == b.pruning.entries[i].kept);
    }
    const auto& fa = a.matrix.at(-4, 3);
    const auto& fb = b.matrix.at(-4, 3);
    for (int n = -4; n <= 3; ++n) {
        CHECK(std::abs(fb.coeff(n) - lambda * fa.coeff(n)) <= 1e-9 * lambda * std::abs(fa.coeff(-4)));
    }
}

TEST_CASE("exact recovery of each pole order")
{
    for (int order = -1; order >= -5; --order) {
        oracle::Synthetic p;
        p.order = order;
        p.degree = 2;
        for (int n = order; n <= 2; ++n) {
            p.coeffs.push_back(1.0 + 0.37 * (n - order));
        }
        const auto r = regularize(tabulate(std::cref(p)), LaurentParams{});
        CAPTURE(order);
        CHECK(r.pole_order == order);
        CHECK(std::abs(r.c0 - p.coeff(0)) <= 1e-6);
    }
}

TEST_CASE("parameter validation")
{
    LaurentParams p;
    p.N2 = 3;
    CHECK_THROWS_AS(p.validate(200), RegularizationError);
    p = {};
    CHECK_THROWS_AS(p.validate(10), RegularizationError);
    p.eps_c = 1.5;
    CHECK_THROWS_AS(p.validate(200), RegularizationError);
}
