#include <gtest/gtest.h>

#include "kerrpur/branch_checks.hpp"
#include "kerrpur/qnd.hpp"

using namespace kerrpur;

TEST(BranchChecks, AllPassAtDefaultPhases) {
    const auto results = run_branch_checks(PhaseTag(1, 4), PhaseTag(3, 4));
    ASSERT_EQ(results.size(), branch_check_ids().size());
    EXPECT_EQ(results.size(), 14u);
    for (const auto& r : results) {
        EXPECT_TRUE(r.passed) << r.id << ": " << r.first_difference;
        EXPECT_GT(r.expected_terms, 0u) << r.id;
    }
}

TEST(BranchChecks, AllPassAtOtherPhases) {
    for (const auto& r : run_branch_checks(PhaseTag(1, 8), PhaseTag(3, 8))) {
        EXPECT_TRUE(r.passed) << r.id << ": " << r.first_difference;
    }
}

TEST(BranchChecks, FilterAndErrors) {
    const std::vector<std::string> only{"qnd2-psi-psi", "qnd4-parity"};
    const auto results = run_branch_checks(PhaseTag(1, 4), PhaseTag(3, 4), only);
    ASSERT_EQ(results.size(), 2u);
    EXPECT_EQ(results[0].id, "qnd2-psi-psi");
    EXPECT_EQ(results[1].id, "qnd4-parity");
    const std::vector<std::string> bad{"qnd9-nothing"};
    EXPECT_THROW(run_branch_checks(PhaseTag(1, 4), PhaseTag(3, 4), bad), ConfigError);
    EXPECT_THROW(run_branch_checks(PhaseTag(1, 4), PhaseTag(1, 4)), ConfigError);
}
