#pragma once

#include <string>
#include <vector>

namespace lreg {

enum class Spacing { Linear, Log };

std::string to_string(Spacing spacing);
Spacing parse_spacing(const std::string& text);

/// The damping-parameter sample points s_j on [eps_s, s_R].
struct SGrid {
    double eps_s = 0.05;
    double s_R = 1.0;
    int J = 200;
    Spacing spacing = Spacing::Linear;
    std::vector<double> points;
};

SGrid make_grid(double eps_s, double s_R, int J, Spacing spacing = Spacing::Linear);

}  // namespace lreg
