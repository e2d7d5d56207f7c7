#include "lreg/quadrature.hpp"

#include "lreg/specfun.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace lreg {

namespace {

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

struct ByError {
    bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

Panel kronrod21(const std::function<double(double)>& f, double a, double b)
{
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using Gauss = boost::math::quadrature::gauss<double, 10>;
    static const auto& xk = Kronrod::abscissa();
    static const auto& wk = Kronrod::weights();
    static const auto& wg = Gauss::weights();

    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const auto eval = [&](double x) {
        const double v = f(x);
        if (!std::isfinite(v)) {
            throw QuadratureError("non-finite integrand at x=" + std::to_string(x));
        }
        return v;
    };
    const double fc = eval(c);
    double kron = wk[0] * fc;
    double gauss = 0.0;
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const double pair = eval(c - h * xk[i]) + eval(c + h * xk[i]);
        kron += wk[i] * pair;
        if (i % 2 == 1) {
            gauss += wg[(i - 1) / 2] * pair;
        }
    }
    return {a, b, h * kron, std::abs(h * (kron - gauss))};
}

QuadratureResult adapt(const std::function<double(double)>& f, const std::vector<double>& breaks,
                       const QuadratureConfig& cfg)
{
    std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
    double total = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const Panel p = kronrod21(f, breaks[i], breaks[i + 1]);
        total += p.value;
        error += p.error;
        heap.push(p);
    }
    int panels = static_cast<int>(heap.size());
    while (error > std::max(cfg.rel_tol * std::abs(total), cfg.abs_tol)) {
        if (panels >= cfg.max_panels) {
            throw QuadratureError("no convergence within " + std::to_string(cfg.max_panels) +
                                  " panels (estimate " + std::to_string(error) + ")");
        }
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureError("panel width underflow at x=" + std::to_string(worst.a));
        }
        const Panel left = kronrod21(f, worst.a, mid);
        const Panel right = kronrod21(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }

    // Re-sum in left-to-right order so the result does not depend on the
    // running update history.
    std::vector<Panel> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    QuadratureResult r;
    double comp = 0.0;
    for (const Panel& p : all) {
        const double t = r.value + p.value;
        comp += std::abs(r.value) >= std::abs(p.value) ? (r.value - t) + p.value
                                                       : (p.value - t) + r.value;
        r.value = t;
        r.est_error += p.error;
    }
    r.value += comp;
    r.panels = panels;
    r.cutoff = breaks.back();
    return r;
}

// 0 and X 2^{-k}, k = 12..0: geometric refinement towards the origin.
std::vector<double> initial_breaks(double a, double b)
{
    std::vector<double> br{a};
    const double w = b - a;
    for (int k = 12; k >= 0; --k) {
        br.push_back(a + std::ldexp(w, -k));
    }
    return br;
}

void require_positive_s(double s)
{
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw std::domain_error("damping parameter s must be positive");
    }
}

}  // namespace

SampleError::SampleError(std::size_t index, const std::string& what)
    : QuadratureError("sample " + std::to_string(index) + ": " + what), index_(index)
{
}

QuadratureConfig QuadratureConfig::vacuum_defaults() { return {}; }

QuadratureConfig QuadratureConfig::dielectric_defaults()
{
    QuadratureConfig c;
    c.rel_tol = 1.0e-7;
    return c;
}

void QuadratureConfig::validate() const
{
    const auto in_unit = [](double t) { return t > 0.0 && t < 1.0; };
    if (!in_unit(rel_tol) || !in_unit(abs_tol) || !in_unit(tail_tol)) {
        throw std::invalid_argument("quadrature tolerances must lie in (0, 1)");
    }
    if (max_panels < 8) {
        throw std::invalid_argument("max_panels must be at least 8");
    }
}

double truncation_point(double s, const QuadratureConfig& cfg)
{
    return (-std::log(cfg.tail_tol) + 20.0) / s;
}

QuadratureResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureConfig& cfg)
{
    cfg.validate();
    if (!(b > a)) {
        throw std::domain_error("integrate_interval: empty interval");
    }
    return adapt(f, initial_breaks(a, b), cfg);
}

QuadratureResult integrate_decaying(const std::function<double(double)>& f, double s,
                                    const QuadratureConfig& cfg)
{
    cfg.validate();
    require_positive_s(s);
    const auto damped = [&](double x) { return f(x) * std::exp(-s * x); };
    double x_max = truncation_point(s, cfg);
    QuadratureResult r = adapt(damped, initial_breaks(0.0, x_max), cfg);
    // Extend the range while the integrand bound beyond X is not negligible.
    for (int ext = 0; ext < 8; ++ext) {
        const double tail = std::abs(damped(x_max)) / s;
        if (tail <= cfg.tail_tol * std::max(std::abs(r.value), cfg.abs_tol)) {
            break;
        }
        const QuadratureResult more = adapt(damped, {x_max, 1.5 * x_max, 2.0 * x_max}, cfg);
        r.value += more.value;
        r.est_error += more.est_error;
        r.panels += more.panels;
        x_max *= 2.0;
    }
    r.cutoff = x_max;
    return r;
}

double vacuum_closed_form(double s)
{
    require_positive_s(s);
    const double s2 = s * s;
    return polygamma3(0.5 * s) / 24.0 - 2.0 / (s2 * s2);
}

IntegralSample eval_I_vacuum(double s, const QuadratureConfig& cfg)
{
    const auto r = integrate_decaying([](double x) { return vacuum_integrand(x, 0.0); }, s, cfg);
    return {s, r.value, r.est_error, ModeKind::Vacuum, 1.0};
}

IntegralSample eval_I_dielectric(ModeKind kind, double s, double sigma, const QuadratureConfig& cfg,
                                 InnerWeight weight)
{
    const SpectrumGenerator gen = SpectrumGenerator::dielectric(kind, sigma);
    QuadratureConfig inner = cfg;
    inner.rel_tol = cfg.rel_tol * 0.1;
    const bool by_frequency = weight == InnerWeight::Frequency;
    const auto outer = [&](double nu) {
        const auto in = integrate_decaying(
            [&](double y) { return by_frequency ? y * gen.dlog(nu, y) : gen.dlog(nu, y); }, s,
            inner);
        return nu * in.value;
    };
    // The outer estimate does not see inner errors; split the budget.
    QuadratureConfig outer_cfg = cfg;
    outer_cfg.rel_tol = cfg.rel_tol * 0.9;
    const auto r = integrate_decaying(outer, s, outer_cfg);
    return {s, r.value, r.est_error + inner.rel_tol * std::abs(r.value), kind, sigma};
}

IntegralSample eval_sample(ModeKind kind, double s, double sigma, const QuadratureConfig& cfg,
                           InnerWeight weight)
{
    if (kind == ModeKind::Vacuum) {
        return eval_I_vacuum(s, cfg);
    }
    return eval_I_dielectric(kind, s, sigma, cfg, weight);
}

std::vector<IntegralSample> sample_curve_serial(ModeKind kind, double sigma, const SGrid& grid,
                                                const QuadratureConfig& cfg, InnerWeight weight)
{
    std::vector<IntegralSample> out(grid.points.size());
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        try {
            out[i] = eval_sample(kind, grid.points[i], sigma, cfg, weight);
        } catch (const std::exception& e) {
            throw SampleError(i, e.what());
        }
    }
    return out;
}

std::vector<IntegralSample> sample_curve(ModeKind kind, double sigma, const SGrid& grid,
                                         const QuadratureConfig& cfg, InnerWeight weight)
{
    const auto n = static_cast<long>(grid.points.size());
    std::vector<IntegralSample> out(grid.points.size());
    long failed = n;
    std::string message;
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = eval_sample(kind, grid.points[i], sigma, cfg, weight);
        } catch (const std::exception& e) {
#pragma omp critical(lreg_sample_failure)
            if (i < failed) {
                failed = i;
                message = e.what();
            }
        }
    }
    if (failed < n) {
        throw SampleError(static_cast<std::size_t>(failed), message);
    }
    return out;
}

}  // namespace lreg
