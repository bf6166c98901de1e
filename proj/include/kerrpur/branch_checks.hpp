#pragma once

#include <span>
#include <string>
#include <vector>

#include "kerrpur/phase.hpp"

namespace kerrpur {

/// Outcome of comparing one detector's output on a fixed input class against the
/// hand-written expected superposition (probe phases included).
struct BranchCheckResult {
    std::string id;
    std::string description;
    bool passed = false;
    std::string first_difference;  // empty on success
    std::size_t expected_terms = 0;
};

/// Every check id, in run order.
std::vector<std::string> branch_check_ids();

/// Run all checks, or only those named in `only`. θ and θ′ configure QND1 and QND3; θ also
/// configures QND4. QND2 always uses π.
/// Throws ConfigError for an unusable phase pair or an unknown id.
std::vector<BranchCheckResult> run_branch_checks(const PhaseTag& theta, const PhaseTag& theta_prime,
                                                 std::span<const std::string> only = {});

}  // namespace kerrpur
