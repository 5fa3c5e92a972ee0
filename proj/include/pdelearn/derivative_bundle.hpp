#pragma once

#include <string>

#include "pdelearn/errors.hpp"
#include "pdelearn/grid.hpp"

namespace pdelearn {

enum class DenoiseMethod { FD, Spline, ANN, Analytic };

inline std::string denoise_method_name(DenoiseMethod m) {
    switch (m) {
        case DenoiseMethod::FD: return "fd";
        case DenoiseMethod::Spline: return "spline";
        case DenoiseMethod::ANN: return "ann";
        case DenoiseMethod::Analytic: return "analytic";
    }
    return "unknown";
}

inline DenoiseMethod parse_denoise_method(const std::string& s) {
    if (s == "fd") return DenoiseMethod::FD;
    if (s == "spline") return DenoiseMethod::Spline;
    if (s == "ann") return DenoiseMethod::ANN;
    if (s == "analytic") return DenoiseMethod::Analytic;
    throw ConfigError("unknown denoise method: " + s);
}

/// u and its partial derivatives on one shared grid, as produced by a
/// denoising method.
struct DerivativeBundle {
    Field u;
    Field u_t;
    Field u_x;
    Field u_xx;
    DenoiseMethod method;

    const Grid& grid() const { return u.grid; }

    bool all_finite() const {
        return u.all_finite() && u_t.all_finite() && u_x.all_finite() && u_xx.all_finite();
    }
};

}  // namespace pdelearn
