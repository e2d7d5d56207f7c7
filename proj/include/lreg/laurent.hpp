#pragma once

#include "lreg/grid.hpp"
#include "lreg/quadrature.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lreg {

/// The data sets {s_j} and {I_j} every fit acts on.
struct SampledFunction {
    std::vector<double> s;
    std::vector<double> values;

    static SampledFunction from_samples(const std::vector<IntegralSample>& samples);
    std::size_t size() const noexcept { return s.size(); }
};

/// Least-squares fit of sum_{n=n1}^{n2} c_n s^n. When `skip` lies in [n1, n2]
/// that exponent is left out of the basis and its coefficient reads as 0.
struct TruncatedLaurentFit {
    int n1 = 0;
    int n2 = 0;
    std::vector<double> coeffs;  // coeffs[n - n1]
    double rms_residual = 0.0;
    double condition = 1.0;      // of the equilibrated basis

    double coeff(int n) const;
};

inline constexpr double kConditionFlag = 1.0e12;

TruncatedLaurentFit fit_window(const SampledFunction& data, int n1, int n2,
                               std::span<const double> weights = {});
TruncatedLaurentFit fit_window_skipping(const SampledFunction& data, int n1, int n2, int skip);

/// Fits for every window N1 < n1 <= -1, 1 <= n2 < N2.
struct FitMatrix {
    int N1 = -7;
    int N2 = 9;
    std::vector<TruncatedLaurentFit> entries;  // row-major over n1 ascending, n2 ascending

    int n1_min() const noexcept { return N1 + 1; }
    int n2_max() const noexcept { return N2 - 1; }
    int rows() const noexcept { return -N1 - 1; }
    int cols() const noexcept { return N2 - 1; }
    const TruncatedLaurentFit& at(int n1, int n2) const;
    double max_condition() const;
};

FitMatrix build_matrix(const SampledFunction& data, int N1, int N2);
FitMatrix build_matrix_serial(const SampledFunction& data, int N1, int N2);

/// How the reference magnitude M_n(n1, n2) of the ratio test is formed.
///  PrincipalPart: mean of |c_j(n1, n2)| over j = n1..-1 (the window's own
///                 principal part).
///  CrossWindow:   mean of c_n(j, n2) over j = n1..n, i.e. over the windows
///                 where the coefficient exists.
///  LiteralDivisor: the CrossWindow sum divided by |n|.
enum class AverageRule { PrincipalPart, CrossWindow, LiteralDivisor };

std::string to_string(AverageRule rule);
AverageRule parse_average_rule(const std::string& text);

struct PruneEntry {
    int n;
    int n1;
    int n2;
    double coeff;
    double average;
    bool kept;
};

struct PruneReport {
    double eps_c = 1.0e-3;
    AverageRule rule = AverageRule::PrincipalPart;
    int N1 = -7;
    int N2 = 9;
    std::vector<PruneEntry> entries;

    const PruneEntry& entry(int n, int n1, int n2) const;
    bool kept(int n, int n1, int n2) const { return entry(n, n1, n2).kept; }
    /// Most singular kept exponent of a window, or 0 when none is kept.
    int window_order(int n1, int n2) const;
};

PruneReport prune(const FitMatrix& matrix, double eps_c,
                  AverageRule rule = AverageRule::PrincipalPart);

struct PoleDetection {
    int order = 0;
    int n1_lo = 0;
    int n1_hi = 0;
    int n2_lo = 0;
    int n2_hi = 0;

    int rows() const noexcept { return n1_hi - n1_lo + 1; }
    int cols() const noexcept { return n2_hi - n2_lo + 1; }
    bool contains(int n1, int n2) const noexcept
    {
        return n1 >= n1_lo && n1 <= n1_hi && n2 >= n2_lo && n2 <= n2_hi;
    }
};

PoleDetection detect_pole_order(const PruneReport& report);

/// Where C_N, the subtracted leading coefficient, is read from.
enum class LeadingSource { Window, SubMatrixMean };
/// Whether the refit after subtraction still carries the s^N column.
enum class RefitBasis { Exclusive, Inclusive };

struct RefitCurve {
    int n2 = 0;
    double c_minus = 0.0;
    std::vector<double> c0hat;  // c0hat[nhat2 - 1], nhat2 = 1..n2_max
    double max_condition = 1.0;
};

struct RefitOptions {
    LeadingSource leading = LeadingSource::Window;
    RefitBasis basis = RefitBasis::Inclusive;
};

std::vector<RefitCurve> subtract_and_refit(const SampledFunction& data, const PoleDetection& pole,
                                           const FitMatrix& matrix, int n2_max,
                                           const RefitOptions& options = {});

///  SignChange:       first interior sign change of the first differences,
///                    else the point after the smallest step.
///  MinimalVariation: the interior point whose larger adjacent step is
///                    smallest.
enum class TurningRule { SignChange, MinimalVariation };

std::string to_string(TurningRule rule);
TurningRule parse_turning_rule(const std::string& text);

double turning_point(std::span<const double> curve, TurningRule rule = TurningRule::SignChange);

struct LaurentParams {
    int N1 = -7;
    int N2 = 9;
    double eps_c = 1.0e-3;
    AverageRule average = AverageRule::PrincipalPart;
    TurningRule turning = TurningRule::MinimalVariation;
    RefitOptions refit;

    void validate(std::size_t sample_count) const;
};

enum class Stage { Fit, Prune, Detect, Refit, Turning };
std::string to_string(Stage stage);

class RegularizationError : public std::runtime_error {
public:
    RegularizationError(Stage stage, const std::string& what);
    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

struct RegularizationResult {
    int pole_order = 0;
    PoleDetection detection;
    std::vector<RefitCurve> curves;
    std::vector<double> turning_values;
    double c0 = 0.0;
    double spread = 0.0;
    double max_condition = 1.0;
    bool ill_conditioned = false;
    FitMatrix matrix;
    PruneReport pruning;
};

RegularizationResult regularize(const SampledFunction& data, const LaurentParams& params);

}  // namespace lreg
