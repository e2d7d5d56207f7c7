#include "lreg/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <system_error>
#include <unistd.h>

namespace lreg {

namespace {

using nlohmann::ordered_json;

constexpr double kExactVacuumC0 = std::numbers::pi * std::numbers::pi * std::numbers::pi *
                                  std::numbers::pi / 360.0;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v)) {
        throw ConfigError("'" + key + "' expects a finite number, got '" + text + "'");
    }
    return v;
}

int parse_int(const std::string& key, const std::string& text)
{
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects an integer, got '" + text + "'");
    }
    if (used != text.size() || v < -1000000 || v > 1000000) {
        throw ConfigError("'" + key + "' expects an integer, got '" + text + "'");
    }
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text)
{
    if (text == "true" || text == "1" || text == "yes" || text == "on") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no" || text == "off") {
        return false;
    }
    throw ConfigError("'" + key + "' expects true or false, got '" + text + "'");
}

std::string canonical_key(std::string key)
{
    std::replace(key.begin(), key.end(), '-', '_');
    static const std::map<std::string, std::string> aliases = {
        {"s_R", "s_max"}, {"s_r", "s_max"}, {"J", "grid_points"}, {"N1", "n1"}, {"N2", "n2"}};
    const auto it = aliases.find(key);
    return it == aliases.end() ? key : it->second;
}

template <class F>
auto translate(const std::string& key, F&& f)
{
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("'" + key + "': " + e.what());
    }
}

std::string csv_samples(const std::vector<IntegralSample>& samples)
{
    std::string out = "s,I,err\n";
    for (const auto& x : samples) {
        out += format_real(x.s) + "," + format_real(x.value) + "," + format_real(x.est_error) + "\n";
    }
    return out;
}

std::string csv_curves(const RegularizationResult& r)
{
    std::string out = "n2,nhat2,c0hat\n";
    for (const auto& curve : r.curves) {
        for (std::size_t k = 0; k < curve.c0hat.size(); ++k) {
            out += std::to_string(curve.n2) + "," + std::to_string(k + 1) + "," +
                   format_real(curve.c0hat[k]) + "\n";
        }
    }
    return out;
}

ordered_json matrix_json(const RegularizationResult& r)
{
    ordered_json windows = ordered_json::array();
    for (const auto& fit : r.matrix.entries) {
        ordered_json coeffs = ordered_json::object();
        for (int n = fit.n1; n <= fit.n2; ++n) {
            coeffs[std::to_string(n)] = fit.coeff(n);
        }
        ordered_json pruned = ordered_json::object();
        for (int n = fit.n1; n <= -1; ++n) {
            const auto& e = r.pruning.entry(n, fit.n1, fit.n2);
            pruned[std::to_string(n)] = {{"average", e.average}, {"kept", e.kept}};
        }
        windows.push_back({{"n1", fit.n1},
                           {"n2", fit.n2},
                           {"coeffs", coeffs},
                           {"rms_residual", fit.rms_residual},
                           {"condition", fit.condition},
                           {"window_order", r.pruning.window_order(fit.n1, fit.n2)},
                           {"principal_part", pruned}});
    }
    return {{"N1", r.matrix.N1},
            {"N2", r.matrix.N2},
            {"eps_c", r.pruning.eps_c},
            {"average", to_string(r.pruning.rule)},
            {"windows", windows}};
}

ordered_json result_json(const RegularizationResult& r)
{
    ordered_json c_minus = ordered_json::array();
    for (const auto& curve : r.curves) {
        c_minus.push_back(curve.c_minus);
    }
    return {{"pole_order", r.pole_order},
            {"c0", r.c0},
            {"spread", r.spread},
            {"turning_values", r.turning_values},
            {"c_minus", c_minus},
            {"submatrix",
             {{"n1", {r.detection.n1_lo, r.detection.n1_hi}},
              {"n2", {r.detection.n2_lo, r.detection.n2_hi}}}},
            {"max_condition", r.max_condition},
            {"ill_conditioned", r.ill_conditioned}};
}

ordered_json config_json(const RunConfig& cfg)
{
    const auto q = cfg.quadrature();
    ordered_json j = {{"mode", cfg.mode == RunMode::Vacuum ? "vacuum" : "dielectric"},
                      {"eps_s", cfg.eps_s},
                      {"s_max", cfg.s_max},
                      {"grid_points", cfg.grid_points},
                      {"spacing", to_string(cfg.spacing)},
                      {"n1", cfg.laurent.N1},
                      {"n2", cfg.laurent.N2},
                      {"eps_c", cfg.laurent.eps_c},
                      {"average", to_string(cfg.laurent.average)},
                      {"turning", to_string(cfg.laurent.turning)},
                      {"refit_basis",
                       cfg.laurent.refit.basis == RefitBasis::Inclusive ? "inclusive" : "exclusive"},
                      {"leading",
                       cfg.laurent.refit.leading == LeadingSource::Window ? "window" : "submatrix"},
                      {"rel_tol", q.rel_tol},
                      {"abs_tol", q.abs_tol},
                      {"tail_tol", q.tail_tol},
                      {"max_panels", q.max_panels}};
    if (cfg.mode == RunMode::Dielectric) {
        j["inner_weight"] = cfg.inner_weight == InnerWeight::Plain ? "plain" : "frequency";
        if (cfg.sigma) {
            j["sigma"] = cfg.sigma->text;
            j["sigma_value"] = cfg.sigma->value;
        }
    }
    j["geometry"] = {{"lx", cfg.geometry.Lx}, {"ly", cfg.geometry.Ly}, {"lz", cfg.geometry.Lz}};
    return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

void prepare_out_dir(const RunConfig& cfg)
{
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory '" + cfg.out_dir.string() +
                          "': " + ec.message());
    }
}

void warn_geometry(const RunConfig& cfg, std::ostream& log)
{
    const auto& g = cfg.geometry;
    const bool scaled_form = g.Lx == 1.0 && g.Ly == 1.0 && g.Lz == 1.0;
    if (!scaled_form && !g.plate_limit()) {
        log << "warning: Lx/Lz or Ly/Lz below 100; the parallel-plate formulas assume Lx, Ly >> Lz\n";
    }
}

template <class F>
int guarded(std::ostream& log, F&& body)
{
    try {
        return body();
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        const char* tag = code == kExitConfig          ? "config"
                          : code == kExitQuadrature    ? "quadrature"
                          : code == kExitRegularization ? "regularization"
                                                        : "error";
        log << tag << " error: " << e.what() << "\n";
        return code;
    }
}

}  // namespace

std::string format_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename onto '" + path.string() + "': " + ec.message());
    }
}

SigmaValue parse_sigma(const std::string& raw)
{
    const std::string text = trim(raw);
    SigmaValue s;
    s.text = text;
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const std::string num = trim(text.substr(0, slash));
        const std::string den = trim(text.substr(slash + 1));
        const auto all_digits = [](const std::string& t) {
            return !t.empty() && t.size() <= 15 &&
                   std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); });
        };
        if (!all_digits(num) || !all_digits(den)) {
            throw ConfigError("sigma fraction must be p/q with positive integers, got '" + text + "'");
        }
        long long p = std::stoll(num);
        long long q = std::stoll(den);
        if (p == 0 || q == 0) {
            throw ConfigError("sigma must be positive, got '" + text + "'");
        }
        const long long g = std::gcd(p, q);
        p /= g;
        q /= g;
        s.fraction = std::make_pair(p, q);
        s.value = static_cast<double>(p) / static_cast<double>(q);
    } else {
        s.value = parse_real("sigma", text);
    }
    if (!(s.value > 0.0)) {
        throw ConfigError("sigma must be positive, got '" + text + "'");
    }
    if (s.value == 1.0) {
        throw ConfigError("sigma = 1 is the homogeneous case; the cross products vanish identically");
    }
    return s;
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = {
        "mode",      "sigma",       "eps_s",   "s_max",      "grid_points",
        "spacing",   "eps_c",       "n1",      "n2",         "average",
        "paper_literal_average",    "turning", "refit_basis", "leading",
        "rel_tol",   "abs_tol",     "tail_tol", "max_panels", "inner_weight",
        "lx",        "ly",          "lz",      "eps0",       "parallel",
        "out_dir"};
    return keys;
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& raw_value)
{
    const std::string key = canonical_key(trim(raw_key));
    const std::string value = trim(raw_value);
    if (key == "mode") {
        if (value == "vacuum") {
            cfg.mode = RunMode::Vacuum;
        } else if (value == "dielectric") {
            cfg.mode = RunMode::Dielectric;
        } else {
            throw ConfigError("mode must be vacuum or dielectric, got '" + value + "'");
        }
    } else if (key == "sigma") {
        cfg.sigma = parse_sigma(value);
    } else if (key == "eps_s") {
        cfg.eps_s = parse_real(key, value);
    } else if (key == "s_max") {
        cfg.s_max = parse_real(key, value);
    } else if (key == "grid_points") {
        cfg.grid_points = parse_int(key, value);
    } else if (key == "spacing") {
        cfg.spacing = translate(key, [&] { return parse_spacing(value); });
    } else if (key == "eps_c") {
        cfg.laurent.eps_c = parse_real(key, value);
    } else if (key == "n1") {
        cfg.laurent.N1 = parse_int(key, value);
    } else if (key == "n2") {
        cfg.laurent.N2 = parse_int(key, value);
    } else if (key == "average") {
        cfg.laurent.average = translate(key, [&] { return parse_average_rule(value); });
    } else if (key == "paper_literal_average") {
        if (parse_bool(key, value)) {
            cfg.laurent.average = AverageRule::LiteralDivisor;
        } else if (cfg.laurent.average == AverageRule::LiteralDivisor) {
            cfg.laurent.average = AverageRule::CrossWindow;
        }
    } else if (key == "turning") {
        cfg.laurent.turning = translate(key, [&] { return parse_turning_rule(value); });
    } else if (key == "refit_basis") {
        if (value == "inclusive") {
            cfg.laurent.refit.basis = RefitBasis::Inclusive;
        } else if (value == "exclusive") {
            cfg.laurent.refit.basis = RefitBasis::Exclusive;
        } else {
            throw ConfigError("refit_basis must be inclusive or exclusive, got '" + value + "'");
        }
    } else if (key == "leading") {
        if (value == "window") {
            cfg.laurent.refit.leading = LeadingSource::Window;
        } else if (value == "submatrix") {
            cfg.laurent.refit.leading = LeadingSource::SubMatrixMean;
        } else {
            throw ConfigError("leading must be window or submatrix, got '" + value + "'");
        }
    } else if (key == "rel_tol") {
        cfg.rel_tol = parse_real(key, value);
    } else if (key == "abs_tol") {
        cfg.abs_tol = parse_real(key, value);
    } else if (key == "tail_tol") {
        cfg.tail_tol = parse_real(key, value);
    } else if (key == "max_panels") {
        cfg.max_panels = parse_int(key, value);
    } else if (key == "inner_weight") {
        if (value == "plain") {
            cfg.inner_weight = InnerWeight::Plain;
        } else if (value == "frequency") {
            cfg.inner_weight = InnerWeight::Frequency;
        } else {
            throw ConfigError("inner_weight must be plain or frequency, got '" + value + "'");
        }
    } else if (key == "lx") {
        cfg.geometry.Lx = parse_real(key, value);
    } else if (key == "ly") {
        cfg.geometry.Ly = parse_real(key, value);
    } else if (key == "lz") {
        cfg.geometry.Lz = parse_real(key, value);
    } else if (key == "eps0") {
        cfg.eps0 = parse_real(key, value);
    } else if (key == "parallel") {
        cfg.parallel = parse_bool(key, value);
    } else if (key == "out_dir") {
        if (value.empty()) {
            throw ConfigError("out_dir must not be empty");
        }
        cfg.out_dir = value;
    } else {
        throw ConfigError("unknown setting '" + raw_key + "'");
    }
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path.string() + "'");
    }
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected key = value");
        }
        try {
            apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
    }
}

SGrid RunConfig::grid() const
{
    return translate("grid", [&] { return make_grid(eps_s, s_max, grid_points, spacing); });
}

QuadratureConfig RunConfig::quadrature() const
{
    QuadratureConfig q = mode == RunMode::Vacuum ? QuadratureConfig::vacuum_defaults()
                                                 : QuadratureConfig::dielectric_defaults();
    if (rel_tol) {
        q.rel_tol = *rel_tol;
    }
    q.abs_tol = abs_tol;
    q.tail_tol = tail_tol;
    q.max_panels = max_panels;
    return q;
}

void RunConfig::validate() const
{
    const SGrid g = grid();
    if (grid_points < 16) {
        throw ConfigError("grid_points must be at least 16");
    }
    translate("quadrature", [&] {
        quadrature().validate();
        return 0;
    });
    try {
        laurent.validate(g.points.size());
    } catch (const RegularizationError& e) {
        throw ConfigError(e.what());
    }
    translate("geometry", [&] {
        geometry.validate();
        return 0;
    });
    if (!(eps0 > 0.0)) {
        throw ConfigError("eps0 must be positive");
    }
    if (mode == RunMode::Dielectric && !sigma) {
        throw ConfigError("dielectric runs need sigma");
    }
}

std::vector<IntegralSample> sample(const RunConfig& cfg, ModeKind kind)
{
    const double sigma = kind == ModeKind::Vacuum ? 1.0 : cfg.sigma.value().value;
    const SGrid g = cfg.grid();
    const QuadratureConfig q = cfg.quadrature();
    return cfg.parallel ? sample_curve(kind, sigma, g, q, cfg.inner_weight)
                        : sample_curve_serial(kind, sigma, g, q, cfg.inner_weight);
}

CurveRun run_curve(const RunConfig& cfg, ModeKind kind)
{
    CurveRun run;
    run.kind = kind;
    run.samples = sample(cfg, kind);
    run.result = regularize(SampledFunction::from_samples(run.samples), cfg.laurent);
    return run;
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e) != nullptr) {
        return kExitConfig;
    }
    if (dynamic_cast<const RegularizationError*>(&e) != nullptr) {
        return kExitRegularization;
    }
    if (dynamic_cast<const QuadratureError*>(&e) != nullptr ||
        dynamic_cast<const ImaginaryAxisRootError*>(&e) != nullptr) {
        return kExitQuadrature;
    }
    return kExitFailure;
}

int run_vacuum(const RunConfig& input, std::ostream& log)
{
    return guarded(log, [&] {
        RunConfig cfg = input;
        cfg.mode = RunMode::Vacuum;
        cfg.validate();
        prepare_out_dir(cfg);
        warn_geometry(cfg, log);
        const CurveRun run = run_curve(cfg, ModeKind::Vacuum);
        const auto& r = run.result;

        ordered_json report = {{"mode", "vacuum"}};
        report.update(result_json(r));
        report["exact_c0"] = kExactVacuumC0;
        report["relative_deviation"] = (r.c0 - kExactVacuumC0) / kExactVacuumC0;
        report["energy_te"] = casimir_energy_te(r.c0, cfg.geometry);
        report["exact_energy_te"] = casimir_energy_te(kExactVacuumC0, cfg.geometry);
        report["vacuum_force_per_area"] = vacuum_force_per_area(cfg.geometry.Lz);
        report["config"] = config_json(cfg);

        write_atomic(cfg.out_dir / "samples.csv", csv_samples(run.samples));
        write_atomic(cfg.out_dir / "matrix.json", dump(matrix_json(r)));
        write_atomic(cfg.out_dir / "curves.csv", csv_curves(r));
        write_atomic(cfg.out_dir / "report.json", dump(report));
        log << "vacuum: pole order " << r.pole_order << ", c0 = " << format_real(r.c0)
            << " (exact " << format_real(kExactVacuumC0) << ")\n";
        return static_cast<int>(kExitOk);
    });
}

int run_dielectric(const RunConfig& input, std::ostream& log)
{
    return guarded(log, [&] {
        RunConfig cfg = input;
        cfg.mode = RunMode::Dielectric;
        cfg.validate();
        prepare_out_dir(cfg);
        warn_geometry(cfg, log);
        const DielectricSpec spec = DielectricSpec::from_sigma(cfg.sigma->value, cfg.eps0);

        ordered_json report = {{"mode", "dielectric"},
                               {"sigma", cfg.sigma->text},
                               {"sigma_value", spec.sigma()},
                               {"alpha", spec.alpha()}};
        double c0[2] = {0.0, 0.0};
        const ModeKind kinds[2] = {ModeKind::TE, ModeKind::TM};
        for (int i = 0; i < 2; ++i) {
            const CurveRun run = run_curve(cfg, kinds[i]);
            std::string tag = to_string(kinds[i]);
            std::transform(tag.begin(), tag.end(), tag.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            write_atomic(cfg.out_dir / ("samples_" + tag + ".csv"), csv_samples(run.samples));
            write_atomic(cfg.out_dir / ("matrix_" + tag + ".json"), dump(matrix_json(run.result)));
            write_atomic(cfg.out_dir / ("curves_" + tag + ".csv"), csv_curves(run.result));
            report[tag] = result_json(run.result);
            c0[i] = run.result.c0;
            log << tag << ": pole order " << run.result.pole_order << ", c0 = "
                << format_real(run.result.c0) << "\n";
        }
        const ForceReport f = force_report(c0[0], c0[1], spec, cfg.geometry);
        report["forces"] = {{"F0", f.F0},
                            {"force_te", f.force_te},
                            {"force_tm", f.force_tm},
                            {"delta_force", f.delta_force},
                            {"vacuum_force", f.vacuum_force},
                            {"ratio_te", f.ratio_te},
                            {"ratio_tm", f.ratio_tm},
                            {"scaled_F0", f.scaled_F0},
                            {"scaled_force_te", f.scaled_force_te},
                            {"scaled_force_tm", f.scaled_force_tm}};
        report["config"] = config_json(cfg);
        write_atomic(cfg.out_dir / "report.json", dump(report));
        log << "delta force " << format_real(f.delta_force) << " N\n";
        return static_cast<int>(kExitOk);
    });
}

int dump_sensitivity(const RunConfig& input, const std::string& vary,
                     const std::vector<std::string>& values, std::ostream& log)
{
    return guarded(log, [&] {
        static const std::map<std::string, std::string> params = {
            {"eps_s", "eps_s"},   {"s_R", "s_max"},     {"s_max", "s_max"}, {"J", "grid_points"},
            {"grid_points", "grid_points"}, {"eps_c", "eps_c"}, {"N2", "n2"}, {"n2", "n2"},
            {"rel_tol", "rel_tol"}};
        auto found = params.find(vary);
        if (found == params.end()) {
            found = params.find(canonical_key(vary));
        }
        if (found == params.end()) {
            throw ConfigError("cannot vary '" + vary +
                              "'; expected one of eps_s, s_R, J, eps_c, N2, rel_tol");
        }
        if (values.empty()) {
            throw ConfigError("sensitivity needs at least one value");
        }
        const std::string key = found->second;
        const bool fit_only = key == "eps_c" || key == "n2";

        std::vector<RunConfig> configs;
        for (const auto& v : values) {
            RunConfig c = input;
            apply_setting(c, key, v);
            c.validate();
            configs.push_back(c);
        }
        RunConfig base = input;
        base.validate();
        prepare_out_dir(base);

        std::vector<ModeKind> kinds;
        if (base.mode == RunMode::Vacuum) {
            kinds = {ModeKind::Vacuum};
        } else {
            kinds = {ModeKind::TE, ModeKind::TM};
        }
        std::string csv = "kind,value,pole_order,c0,spread,status\n";
        ordered_json rows = ordered_json::array();
        for (const ModeKind kind : kinds) {
            std::vector<IntegralSample> shared;
            if (fit_only) {
                shared = sample(base, kind);
            }
            for (std::size_t i = 0; i < configs.size(); ++i) {
                std::string status = "ok";
                RegularizationResult r;
                try {
                    const auto samples = fit_only ? shared : sample(configs[i], kind);
                    r = regularize(SampledFunction::from_samples(samples), configs[i].laurent);
                } catch (const std::exception& e) {
                    if (exit_code_for(e) == kExitFailure) {
                        throw;
                    }
                    status = e.what();
                    std::replace(status.begin(), status.end(), ',', ';');
                }
                const bool ok = status == "ok";
                csv += to_string(kind) + "," + values[i] + "," +
                       (ok ? std::to_string(r.pole_order) : "") + "," +
                       (ok ? format_real(r.c0) : "") + "," + (ok ? format_real(r.spread) : "") +
                       "," + status + "\n";
                ordered_json row = {{"kind", to_string(kind)}, {"value", values[i]}, {"status", status}};
                if (ok) {
                    row["pole_order"] = r.pole_order;
                    row["c0"] = r.c0;
                    row["spread"] = r.spread;
                }
                rows.push_back(row);
                log << to_string(kind) << " " << vary << "=" << values[i] << ": "
                    << (ok ? "pole order " + std::to_string(r.pole_order) + ", c0 = " + format_real(r.c0)
                           : status)
                    << "\n";
            }
        }
        write_atomic(base.out_dir / "sensitivity.csv", csv);
        write_atomic(base.out_dir / "sensitivity.json",
                     dump({{"vary", vary}, {"rows", rows}, {"config", config_json(base)}}));
        return static_cast<int>(kExitOk);
    });
}

}  // namespace lreg
