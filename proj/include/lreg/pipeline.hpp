#pragma once

#include "lreg/laurent.hpp"
#include "lreg/physics.hpp"
#include "lreg/quadrature.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lreg {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitQuadrature = 3,
    kExitRegularization = 4,
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RunMode { Vacuum, Dielectric };

/// sigma as given: a decimal, or a fraction p/q kept exactly.
struct SigmaValue {
    double value = 0.0;
    std::string text;
    std::optional<std::pair<long long, long long>> fraction;
};

SigmaValue parse_sigma(const std::string& text);

struct RunConfig {
    RunMode mode = RunMode::Vacuum;
    std::optional<SigmaValue> sigma;
    double eps_s = 0.05;
    double s_max = 1.0;
    int grid_points = 200;
    Spacing spacing = Spacing::Linear;
    LaurentParams laurent;
    std::optional<double> rel_tol;  // unset: per-mode default
    double abs_tol = 1.0e-14;
    double tail_tol = 1.0e-13;
    int max_panels = 4096;
    InnerWeight inner_weight = InnerWeight::Plain;
    PlateGeometry geometry;
    double eps0 = 1.0;
    bool parallel = true;
    std::filesystem::path out_dir = ".";

    SGrid grid() const;
    QuadratureConfig quadrature() const;
    void validate() const;
};

/// Keys accepted in config files; the command-line flag for key `a_b` is
/// `--a-b`. Aliases: s_R = s_max, J = grid_points, N1 = n1, N2 = n2.
const std::vector<std::string>& config_keys();
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);

struct CurveRun {
    ModeKind kind = ModeKind::Vacuum;
    std::vector<IntegralSample> samples;
    RegularizationResult result;
};

std::vector<IntegralSample> sample(const RunConfig& cfg, ModeKind kind);
CurveRun run_curve(const RunConfig& cfg, ModeKind kind);

/// Maps an exception from a pipeline stage to its exit code.
int exit_code_for(const std::exception& e);

int run_vacuum(const RunConfig& cfg, std::ostream& log);
int run_dielectric(const RunConfig& cfg, std::ostream& log);
int dump_sensitivity(const RunConfig& cfg, const std::string& vary,
                     const std::vector<std::string>& values, std::ostream& log);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// %.17g; round-trips every double.
std::string format_real(double x);

}  // namespace lreg
