#pragma once

#include <vector>

namespace chemobl {

/// State of the non-diffusive (eps = 0) limit system: the fields plus the
/// wall history integrals that feed the closed-form boundary values.
struct LimitState {
    std::vector<double> w0_field;
    std::vector<double> c0_field;
    double t = 0.0;
    double int_w_a = 0.0, int_w_b = 0.0;    // \int_0^t w0(wall) dtau
    double int_wc_a = 0.0, int_wc_b = 0.0;  // \int_0^t (w0 c0)(wall) dtau
    double c0_wall_a = 0.0, c0_wall_b = 0.0;  // initial oxygen at the walls
};

enum class Endpoint { Inner, Outer };

}  // namespace chemobl
