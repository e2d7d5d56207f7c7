#include "lreg/laurent.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lreg {

namespace {

using Real = long double;
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// Beyond this the equilibrated basis is numerically rank deficient even in
// extended precision.
constexpr double kRankLimit = 1.0e17;

void require(bool ok, Stage stage, const std::string& what)
{
    if (!ok) {
        throw RegularizationError(stage, what);
    }
}

std::string window_name(int n1, int n2)
{
    return "[" + std::to_string(n1) + ", " + std::to_string(n2) + "]";
}

TruncatedLaurentFit fit_impl(const SampledFunction& data, int n1, int n2, int skip,
                             std::span<const double> weights)
{
    const auto rows = static_cast<Eigen::Index>(data.size());
    require(n1 < n2, Stage::Fit, "empty window " + window_name(n1, n2));
    std::vector<int> powers;
    for (int n = n1; n <= n2; ++n) {
        if (n != skip) {
            powers.push_back(n);
        }
    }
    const auto cols = static_cast<Eigen::Index>(powers.size());
    require(rows > cols, Stage::Fit,
            "window " + window_name(n1, n2) + " needs more than " + std::to_string(cols) +
                " samples");
    require(weights.empty() || weights.size() == data.size(), Stage::Fit,
            "weight count does not match sample count");

    MatrixR a(rows, cols);
    VectorR b(rows);
    for (Eigen::Index j = 0; j < rows; ++j) {
        const Real s = data.s[j];
        require(s > 0, Stage::Fit, "sample abscissae must be positive");
        const Real w = weights.empty() ? Real(1) : std::sqrt(static_cast<Real>(weights[j]));
        for (Eigen::Index k = 0; k < cols; ++k) {
            a(j, k) = w * std::pow(s, static_cast<Real>(powers[k]));
        }
        b(j) = w * static_cast<Real>(data.values[j]);
    }
    VectorR scale(cols);
    for (Eigen::Index k = 0; k < cols; ++k) {
        scale(k) = a.col(k).norm();
        a.col(k) /= scale(k);
    }
    const Eigen::HouseholderQR<MatrixR> qr(a);
    const MatrixR r = qr.matrixQR().topRows(cols).template triangularView<Eigen::Upper>();
    const Eigen::JacobiSVD<MatrixR> svd(r);
    const auto& sv = svd.singularValues();
    const double cond = sv(cols - 1) > 0 ? static_cast<double>(sv(0) / sv(cols - 1))
                                         : std::numeric_limits<double>::infinity();
    require(cond < kRankLimit, Stage::Fit,
            "rank-deficient basis for window " + window_name(n1, n2));
    const VectorR x = qr.solve(b);

    TruncatedLaurentFit fit;
    fit.n1 = n1;
    fit.n2 = n2;
    fit.condition = cond;
    fit.coeffs.assign(static_cast<std::size_t>(n2 - n1 + 1), 0.0);
    for (Eigen::Index k = 0; k < cols; ++k) {
        fit.coeffs[static_cast<std::size_t>(powers[k] - n1)] = static_cast<double>(x(k) / scale(k));
    }
    Real ss = 0;
    for (Eigen::Index j = 0; j < rows; ++j) {
        Real model = 0;
        const Real s = data.s[j];
        for (Eigen::Index k = 0; k < cols; ++k) {
            model += x(k) / scale(k) * std::pow(s, static_cast<Real>(powers[k]));
        }
        const Real res = static_cast<Real>(data.values[j]) - model;
        ss += res * res;
    }
    fit.rms_residual = static_cast<double>(std::sqrt(ss / static_cast<Real>(rows)));
    return fit;
}

int matrix_index(const FitMatrix& m, int n1, int n2)
{
    return (n1 - m.n1_min()) * m.cols() + (n2 - 1);
}

void check_matrix_bounds(int N1, int N2)
{
    require(N1 <= -2 && N2 >= 2, Stage::Fit,
            "matrix bounds need N1 <= -2 and N2 >= 2 (got " + std::to_string(N1) + ", " +
                std::to_string(N2) + ")");
}

}  // namespace

std::string to_string(Spacing spacing) { return spacing == Spacing::Linear ? "linear" : "log"; }

Spacing parse_spacing(const std::string& text)
{
    if (text == "linear" || text == "LINEAR") {
        return Spacing::Linear;
    }
    if (text == "log" || text == "LOG") {
        return Spacing::Log;
    }
    throw std::invalid_argument("unknown spacing '" + text + "'");
}

SGrid make_grid(double eps_s, double s_R, int J, Spacing spacing)
{
    if (!(eps_s > 0.0) || !(s_R > eps_s) || !std::isfinite(s_R)) {
        throw std::invalid_argument("grid needs 0 < eps_s < s_R");
    }
    if (J < 1) {
        throw std::invalid_argument("grid needs at least one point");
    }
    SGrid g{eps_s, s_R, J, spacing, {}};
    g.points.resize(static_cast<std::size_t>(J));
    if (J == 1) {
        g.points[0] = eps_s;
        return g;
    }
    const double last = J - 1;
    for (int j = 0; j < J; ++j) {
        const double t = j / last;
        g.points[j] = spacing == Spacing::Linear
                          ? eps_s + (s_R - eps_s) * t
                          : eps_s * std::exp(std::log(s_R / eps_s) * t);
    }
    g.points.back() = s_R;
    return g;
}

SampledFunction SampledFunction::from_samples(const std::vector<IntegralSample>& samples)
{
    SampledFunction f;
    f.s.reserve(samples.size());
    f.values.reserve(samples.size());
    for (const auto& x : samples) {
        f.s.push_back(x.s);
        f.values.push_back(x.value);
    }
    return f;
}

double TruncatedLaurentFit::coeff(int n) const
{
    if (n < n1 || n > n2) {
        throw std::out_of_range("exponent " + std::to_string(n) + " outside window " +
                                window_name(n1, n2));
    }
    return coeffs[static_cast<std::size_t>(n - n1)];
}

TruncatedLaurentFit fit_window(const SampledFunction& data, int n1, int n2,
                               std::span<const double> weights)
{
    return fit_impl(data, n1, n2, n1 - 1, weights);
}

TruncatedLaurentFit fit_window_skipping(const SampledFunction& data, int n1, int n2, int skip)
{
    return fit_impl(data, n1, n2, skip, {});
}

const TruncatedLaurentFit& FitMatrix::at(int n1, int n2) const
{
    if (n1 < n1_min() || n1 > -1 || n2 < 1 || n2 > n2_max()) {
        throw std::out_of_range("window " + window_name(n1, n2) + " outside the fit matrix");
    }
    return entries[static_cast<std::size_t>(matrix_index(*this, n1, n2))];
}

double FitMatrix::max_condition() const
{
    double c = 1.0;
    for (const auto& e : entries) {
        c = std::max(c, e.condition);
    }
    return c;
}

FitMatrix build_matrix_serial(const SampledFunction& data, int N1, int N2)
{
    check_matrix_bounds(N1, N2);
    FitMatrix m{N1, N2, {}};
    m.entries.resize(static_cast<std::size_t>(m.rows() * m.cols()));
    for (int n1 = m.n1_min(); n1 <= -1; ++n1) {
        for (int n2 = 1; n2 <= m.n2_max(); ++n2) {
            m.entries[matrix_index(m, n1, n2)] = fit_window(data, n1, n2);
        }
    }
    return m;
}

FitMatrix build_matrix(const SampledFunction& data, int N1, int N2)
{
    check_matrix_bounds(N1, N2);
    FitMatrix m{N1, N2, {}};
    const int total = m.rows() * m.cols();
    m.entries.resize(static_cast<std::size_t>(total));
    int failed = total;
    std::string message;
#pragma omp parallel for schedule(dynamic, 1)
    for (int idx = 0; idx < total; ++idx) {
        const int n1 = m.n1_min() + idx / m.cols();
        const int n2 = 1 + idx % m.cols();
        try {
            m.entries[idx] = fit_window(data, n1, n2);
        } catch (const std::exception& e) {
#pragma omp critical(lreg_matrix_failure)
            if (idx < failed) {
                failed = idx;
                message = e.what();
            }
        }
    }
    require(failed == total, Stage::Fit, message);
    return m;
}

std::string to_string(AverageRule rule)
{
    switch (rule) {
    case AverageRule::PrincipalPart: return "principal";
    case AverageRule::CrossWindow: return "cross";
    case AverageRule::LiteralDivisor: return "literal";
    }
    return "unknown";
}

AverageRule parse_average_rule(const std::string& text)
{
    if (text == "principal") {
        return AverageRule::PrincipalPart;
    }
    if (text == "cross") {
        return AverageRule::CrossWindow;
    }
    if (text == "literal") {
        return AverageRule::LiteralDivisor;
    }
    throw std::invalid_argument("unknown average rule '" + text + "'");
}

const PruneEntry& PruneReport::entry(int n, int n1, int n2) const
{
    const auto it = std::find_if(entries.begin(), entries.end(), [&](const PruneEntry& e) {
        return e.n == n && e.n1 == n1 && e.n2 == n2;
    });
    if (it == entries.end()) {
        throw std::out_of_range("no coefficient " + std::to_string(n) + " in window " +
                                window_name(n1, n2));
    }
    return *it;
}

int PruneReport::window_order(int n1, int n2) const
{
    for (int n = n1; n <= -1; ++n) {
        if (kept(n, n1, n2)) {
            return n;
        }
    }
    return 0;
}

PruneReport prune(const FitMatrix& matrix, double eps_c, AverageRule rule)
{
    require(eps_c >= 0.0 && eps_c < 1.0, Stage::Prune, "eps_c must lie in [0, 1)");
    PruneReport report{eps_c, rule, matrix.N1, matrix.N2, {}};
    for (int n1 = matrix.n1_min(); n1 <= -1; ++n1) {
        for (int n2 = 1; n2 <= matrix.n2_max(); ++n2) {
            const auto& fit = matrix.at(n1, n2);
            double own = 0.0;
            for (int j = n1; j <= -1; ++j) {
                own += std::abs(fit.coeff(j));
            }
            own /= -n1;
            for (int n = n1; n <= -1; ++n) {
                double avg = own;
                if (rule != AverageRule::PrincipalPart) {
                    double sum = 0.0;
                    double abs_sum = 0.0;
                    for (int j = n1; j <= n; ++j) {
                        const double c = matrix.at(j, n2).coeff(n);
                        sum += c;
                        abs_sum += std::abs(c);
                    }
                    const double count = n - n1 + 1;
                    const double divisor = rule == AverageRule::LiteralDivisor ? -n : count;
                    avg = sum / divisor;
                    if (std::abs(sum / count) < 1.0e-3 * abs_sum / count) {
                        avg = abs_sum / divisor;
                    }
                }
                const double c = fit.coeff(n);
                const bool kept = avg != 0.0 && !(std::abs(c) / std::abs(avg) < eps_c);
                report.entries.push_back({n, n1, n2, c, avg, kept});
            }
        }
    }
    return report;
}

PoleDetection detect_pole_order(const PruneReport& report)
{
    const int r0 = report.N1 + 1;
    const int rows = -report.N1 - 1;
    const int cols = report.N2 - 1;
    std::vector<int> order(static_cast<std::size_t>(rows * cols));
    for (int i = 0; i < rows; ++i) {
        for (int k = 0; k < cols; ++k) {
            order[i * cols + k] = report.window_order(r0 + i, k + 1);
        }
    }
    PoleDetection best;
    int best_area = 0;
    for (int i0 = 0; i0 < rows; ++i0) {
        for (int k0 = 0; k0 < cols; ++k0) {
            const int v = order[i0 * cols + k0];
            if (v == 0) {
                continue;
            }
            for (int i1 = i0 + 1; i1 < rows; ++i1) {
                for (int k1 = k0 + 1; k1 < cols; ++k1) {
                    bool uniform = true;
                    for (int i = i0; i <= i1 && uniform; ++i) {
                        for (int k = k0; k <= k1; ++k) {
                            if (order[i * cols + k] != v) {
                                uniform = false;
                                break;
                            }
                        }
                    }
                    if (!uniform) {
                        break;
                    }
                    const int area = (i1 - i0 + 1) * (k1 - k0 + 1);
                    if (area > best_area || (area == best_area && v < best.order)) {
                        best_area = area;
                        best = {v, r0 + i0, r0 + i1, k0 + 1, k1 + 1};
                    }
                }
            }
        }
    }
    require(best_area > 0, Stage::Detect,
            "no sub-matrix of at least 2x2 windows agrees on a pole order");
    return best;
}

std::vector<RefitCurve> subtract_and_refit(const SampledFunction& data, const PoleDetection& pole,
                                           const FitMatrix& matrix, int n2_max,
                                           const RefitOptions& options)
{
    const int N = pole.order;
    require(N < 0 && N >= matrix.n1_min(), Stage::Refit, "pole order outside the fit matrix");
    require(n2_max >= 1 && n2_max <= matrix.n2_max(), Stage::Refit, "refit range outside matrix");

    double pooled = 0.0;
    if (options.leading == LeadingSource::SubMatrixMean) {
        int count = 0;
        for (int n1 = pole.n1_lo; n1 <= pole.n1_hi; ++n1) {
            for (int n2 = pole.n2_lo; n2 <= pole.n2_hi; ++n2) {
                pooled += matrix.at(n1, n2).coeff(N);
                ++count;
            }
        }
        pooled /= count;
    }
    std::vector<RefitCurve> curves(static_cast<std::size_t>(n2_max));
    std::string message;
    bool failed = false;
#pragma omp parallel for schedule(dynamic, 1)
    for (int n2 = 1; n2 <= n2_max; ++n2) {
        try {
            RefitCurve curve;
            curve.n2 = n2;
            curve.c_minus = options.leading == LeadingSource::Window ? matrix.at(N, n2).coeff(N)
                                                                     : pooled;
            SampledFunction sub = data;
            for (std::size_t j = 0; j < sub.size(); ++j) {
                sub.values[j] -= curve.c_minus * std::pow(sub.s[j], N);
            }
            const int skip = options.basis == RefitBasis::Exclusive ? N : N - 1;
            for (int nhat2 = 1; nhat2 <= n2_max; ++nhat2) {
                const auto fit = fit_window_skipping(sub, N, nhat2, skip);
                curve.c0hat.push_back(fit.coeff(0));
                curve.max_condition = std::max(curve.max_condition, fit.condition);
            }
            curves[static_cast<std::size_t>(n2 - 1)] = std::move(curve);
        } catch (const std::exception& e) {
#pragma omp critical(lreg_refit_failure)
            {
                failed = true;
                message = e.what();
            }
        }
    }
    require(!failed, Stage::Refit, message);
    return curves;
}

std::string to_string(TurningRule rule)
{
    return rule == TurningRule::SignChange ? "sign-change" : "min-variation";
}

TurningRule parse_turning_rule(const std::string& text)
{
    if (text == "sign-change") {
        return TurningRule::SignChange;
    }
    if (text == "min-variation") {
        return TurningRule::MinimalVariation;
    }
    throw std::invalid_argument("unknown turning rule '" + text + "'");
}

double turning_point(std::span<const double> curve, TurningRule rule)
{
    require(curve.size() >= 3, Stage::Turning, "turning point needs at least 3 points");
    const std::size_t n = curve.size();
    if (rule == TurningRule::SignChange) {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double before = curve[i] - curve[i - 1];
            const double after = curve[i + 1] - curve[i];
            if (before * after < 0.0) {
                return curve[i];
            }
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (std::abs(curve[i + 1] - curve[i]) < std::abs(curve[best + 1] - curve[best])) {
                best = i;
            }
        }
        return curve[best + 1];
    }
    std::size_t best = 1;
    double best_step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double step =
            std::max(std::abs(curve[i] - curve[i - 1]), std::abs(curve[i + 1] - curve[i]));
        if (step < best_step) {
            best_step = step;
            best = i;
        }
    }
    return curve[best];
}

void LaurentParams::validate(std::size_t sample_count) const
{
    require(N1 <= -2 && N2 >= 2, Stage::Fit, "need N1 <= -2 and N2 >= 2");
    require(N2 - 1 >= 3, Stage::Fit, "need N2 >= 4 for turning points on 3 or more orders");
    require(eps_c >= 0.0 && eps_c < 1.0, Stage::Prune, "eps_c must lie in [0, 1)");
    const auto widest = static_cast<std::size_t>((N2 - 1) - (N1 + 1) + 1);
    require(sample_count >= widest + 8, Stage::Fit,
            "grid has " + std::to_string(sample_count) + " points; the widest window needs " +
                std::to_string(widest + 8));
}

std::string to_string(Stage stage)
{
    switch (stage) {
    case Stage::Fit: return "fit";
    case Stage::Prune: return "prune";
    case Stage::Detect: return "detect";
    case Stage::Refit: return "refit";
    case Stage::Turning: return "turning";
    }
    return "unknown";
}

RegularizationError::RegularizationError(Stage stage, const std::string& what)
    : std::runtime_error(to_string(stage) + ": " + what), stage_(stage)
{
}

RegularizationResult regularize(const SampledFunction& data, const LaurentParams& params)
{
    params.validate(data.size());
    RegularizationResult r;
    r.matrix = build_matrix(data, params.N1, params.N2);
    r.pruning = prune(r.matrix, params.eps_c, params.average);
    r.detection = detect_pole_order(r.pruning);
    r.pole_order = r.detection.order;
    r.curves = subtract_and_refit(data, r.detection, r.matrix, r.matrix.n2_max(), params.refit);
    r.max_condition = r.matrix.max_condition();
    for (const auto& curve : r.curves) {
        r.turning_values.push_back(turning_point(curve.c0hat, params.turning));
        r.max_condition = std::max(r.max_condition, curve.max_condition);
    }
    r.ill_conditioned = r.max_condition > kConditionFlag;
    const double sum = std::accumulate(r.turning_values.begin(), r.turning_values.end(), 0.0);
    r.c0 = sum / static_cast<double>(r.turning_values.size());
    const auto [lo, hi] = std::minmax_element(r.turning_values.begin(), r.turning_values.end());
    r.spread = *hi - *lo;
    return r;
}

}  // namespace lreg
