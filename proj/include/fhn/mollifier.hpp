#pragma once

// Coupling mollifiers: φ_rc marks the reflection region, φ_sc the
// synchronous one, with φ_sc² + φ_rc² = 1 pointwise.

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fhn {

struct MollifierPair {
    double sc = 1.0;
    double rc = 0.0;
};

// φ_rc: 0 on [0, ξ/2], linear up to 1 on [ξ/2, ξ], 1 on [ξ, R], linear down
// to 0 on [R, R+ξ], 0 beyond. φ_sc = √(1 - φ_rc²).
inline MollifierPair mollifiers(double u, double xi, double R) {
    if (!(xi > 0.0) || !(R > xi)) throw std::invalid_argument("mollifiers: need 0 < xi < R");
    double rc;
    if (u <= 0.5 * xi || u >= R + xi) {
        rc = 0.0;
    } else if (u < xi) {
        rc = (u - 0.5 * xi) / (0.5 * xi);
    } else if (u <= R) {
        rc = 1.0;
    } else {
        rc = (R + xi - u) / xi;
    }
    return {std::sqrt(std::max(0.0, 1.0 - rc * rc)), rc};
}

} // namespace fhn
