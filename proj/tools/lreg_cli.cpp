#include "lreg/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

struct FlagHelp {
    const char* key;
    const char* help;
};

// One flag per config key; `--a-b` sets key `a_b`.
constexpr FlagHelp kFlags[] = {
    {"eps_s", "lower end of the s grid"},
    {"s_max", "upper end of the s grid"},
    {"grid_points", "number of s samples"},
    {"spacing", "linear or log"},
    {"eps_c", "pruning tolerance"},
    {"n1", "most negative exponent probed is n1 + 1"},
    {"n2", "largest positive exponent probed is n2 - 1"},
    {"rel_tol", "quadrature relative tolerance"},
    {"abs_tol", "quadrature absolute tolerance"},
    {"tail_tol", "truncation tolerance of the semi-infinite ranges"},
    {"max_panels", "panel limit per adaptive integral"},
    {"average", "principal, cross or literal"},
    {"paper_literal_average", "true selects the literal divisor"},
    {"turning", "min-variation or sign-change"},
    {"refit_basis", "inclusive or exclusive"},
    {"leading", "window or submatrix"},
    {"inner_weight", "plain or frequency"},
    {"lx", "plate length in x (m)"},
    {"ly", "plate length in y (m)"},
    {"lz", "plate separation (m)"},
    {"eps0", "relative permittivity prefactor"},
    {"parallel", "evaluate grid points concurrently"},
    {"out_dir", "output directory"},
};

std::string flag_name(std::string key)
{
    for (auto& c : key) {
        if (c == '_') {
            c = '-';
        }
    }
    return "--" + key;
}

struct Common {
    std::string config;
    std::map<std::string, std::string> values;
};

void add_common(CLI::App* app, Common& common)
{
    app->add_option("--config", common.config, "key = value file; flags override it");
    for (const auto& f : kFlags) {
        app->add_option_function<std::string>(
            flag_name(f.key), [&common, key = std::string(f.key)](const std::string& v) {
                common.values[key] = v;
            },
            f.help);
    }
}

lreg::RunConfig build(const Common& common, lreg::RunMode mode,
                      const std::map<std::string, std::string>& extra)
{
    lreg::RunConfig cfg;
    cfg.mode = mode;
    if (!common.config.empty()) {
        lreg::load_config_file(cfg, common.config);
    }
    for (const auto& [k, v] : extra) {
        lreg::apply_setting(cfg, k, v);
    }
    for (const auto& [k, v] : common.values) {
        lreg::apply_setting(cfg, k, v);
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Laurent-regression regularization of damped mode integrals"};
    app.require_subcommand(1);

    Common vac_opts;
    auto* vacuum = app.add_subcommand("vacuum", "parallel plates in vacuum");
    add_common(vacuum, vac_opts);

    Common die_opts;
    std::string sigma;
    auto* dielectric = app.add_subcommand("dielectric", "plates bounding a graded dielectric");
    add_common(dielectric, die_opts);
    dielectric->add_option("--sigma", sigma, "inhomogeneity parameter, decimal or p/q");

    Common sen_opts;
    std::string vary;
    std::string values;
    std::string mode;
    std::string sen_sigma;
    auto* sensitivity = app.add_subcommand("sensitivity", "c0 against one parameter");
    add_common(sensitivity, sen_opts);
    sensitivity->add_option("--vary", vary, "eps_s, s_R, J, eps_c, N2 or rel_tol")->required();
    sensitivity->add_option("--values", values, "comma-separated values")->required();
    sensitivity->add_option("--mode", mode, "vacuum or dielectric");
    sensitivity->add_option("--sigma", sen_sigma, "inhomogeneity parameter, decimal or p/q");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : lreg::kExitConfig;
    }

    try {
        if (vacuum->parsed()) {
            return lreg::run_vacuum(build(vac_opts, lreg::RunMode::Vacuum, {}), std::cerr);
        }
        if (dielectric->parsed()) {
            std::map<std::string, std::string> extra;
            if (!sigma.empty()) {
                extra["sigma"] = sigma;
            }
            return lreg::run_dielectric(build(die_opts, lreg::RunMode::Dielectric, extra), std::cerr);
        }
        std::map<std::string, std::string> extra;
        if (!mode.empty()) {
            extra["mode"] = mode;
        }
        if (!sen_sigma.empty()) {
            extra["sigma"] = sen_sigma;
        }
        lreg::RunConfig cfg = build(sen_opts, lreg::RunMode::Vacuum, extra);
        std::vector<std::string> list;
        std::string item;
        for (char c : values + ",") {
            if (c == ',') {
                if (!item.empty()) {
                    list.push_back(item);
                }
                item.clear();
            } else if (c != ' ') {
                item += c;
            }
        }
        return lreg::dump_sensitivity(cfg, vary, list, std::cerr);
    } catch (const lreg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return lreg::kExitConfig;
    }
}
