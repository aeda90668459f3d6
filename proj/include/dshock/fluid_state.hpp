#pragma once

#include <vector>

namespace dshock {

// Samples of (rho, u, phi) at a physical time. Positions are strictly
// increasing but not necessarily uniform: Lagrangian runs sample at particle
// positions, which cluster at the forming singularity.
struct FluidState {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> rho;
    std::vector<double> u;
    std::vector<double> phi;  // empty until a field solve has run

    std::size_t size() const { return x.size(); }
    bool has_phi() const { return phi.size() == x.size() && !x.empty(); }
};

}  // namespace dshock
