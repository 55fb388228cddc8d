#pragma once

#include "flagmirror/toda.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>

namespace flagmirror {

// One property-based identity, evaluated on random samples.
struct IdentityCheck {
    std::string name;
    double max_defect = 0.0;  // relative unless the name says otherwise
    double tolerance = 0.0;
    int samples = 0;
    bool pass = false;
};

struct IdentityOptions {
    int samples = 20;
    std::uint64_t seed = 1;
    int jacobian_samples = 3;  // the finite-difference Jacobian checks are costly
};

// Product identity for y_i(s) moving past U+, pullback factors of omega and
// omega_GKLO, the translation action on F, e^F = psi+ psi- rho-minor,
// Whittaker vector residuals and the Whittaker condition of W_0.
std::vector<IdentityCheck> run_identity_suite(const ChevalleyGroup& G, const IdentityOptions& opts = {});

nlohmann::json to_json(const IdentityCheck& c);

}  // namespace flagmirror
