#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "kerrpur/optics.hpp"
#include "kerrpur/protocol.hpp"

using namespace kerrpur;

namespace {

// Independent oracles: single pairs always pass, a double emission reaches the four-mode
// outcome with probability ½ and is correct only if neither pair flipped.
double oracle_stage1_fidelity(double p1, double p2, double f0) {
    const double both_clean = f0 * f0, both_flipped = (1 - f0) * (1 - f0);
    return (p1 + 0.5 * p2 * both_clean) / (p1 + 0.5 * p2 * (both_clean + both_flipped));
}

double oracle_stage2_fidelity(double f) {
    const double same = f * f, err = (1 - f) * (1 - f);
    return same / (same + err);
}

double total_weight(const OutcomeTree& t) {
    return std::accumulate(t.leaves().begin(), t.leaves().end(), 0.0,
                           [](double acc, const OutcomeRecord& r) { return acc + r.weight; });
}

Stage1Params stage1(double p1, double p2, double f0, QndConfig cfg = QndConfig::qnd1()) {
    return {{p1, p2}, {f0}, cfg};
}

}  // namespace

TEST(Stage1, ExactFidelityMatchesOracleOnGrid) {
    for (double p1 : {0.02, 0.1, 0.3}) {
        for (double scale : {0.5, 1.0, 2.0}) {
            const double p2 = scale * p1 * p1;
            for (double f0 : {0.55, 0.8, 1.0}) {
                const auto r = stage1_run({p1, p2}, {f0}, QndConfig::qnd1(), RunMode::exact());
                EXPECT_NEAR(r.fidelity, oracle_stage1_fidelity(p1, p2, f0), 1e-12) << p1 << " " << p2 << " " << f0;
                EXPECT_NEAR(r.fidelity, stage1_fidelity_closed_form(p1, p2, f0), 1e-12);
                EXPECT_NEAR(r.yield, stage1_yield_closed_form(p1, p2, f0), 1e-12);
            }
        }
    }
}

TEST(Stage1, ReferenceNumbers) {
    const auto r = stage1_run({0.1, 0.01}, {0.8}, QndConfig::qnd1(), RunMode::exact());
    EXPECT_NEAR(r.fidelity, 0.998065764023, 1e-11);
    EXPECT_NEAR(r.yield, 0.94, 1e-12);
    // Both read 2θ or both 2θ′: only clean double emissions, half of the time.
    EXPECT_NEAR(r.tally.same_mode_double, (0.01 / 0.11) * 0.64 * 0.5, 1e-12);
}

TEST(Stage1, LimitingCases) {
    EXPECT_NEAR(stage1_run({0.1, 0.0}, {0.6}, QndConfig::qnd1(), RunMode::exact()).fidelity, 1.0, 1e-12);
    EXPECT_NEAR(stage1_run({0.1, 0.05}, {1.0}, QndConfig::qnd1(), RunMode::exact()).fidelity, 1.0, 1e-12);
    // Without single pairs the map reduces to the stage-2 map at F = f0.
    for (double f0 : {0.6, 0.75, 0.9}) {
        const auto r = stage1_run({0.0, 0.01}, {f0}, QndConfig::qnd1(), RunMode::exact());
        EXPECT_NEAR(r.fidelity, oracle_stage2_fidelity(f0), 1e-12);
    }
    EXPECT_THROW(build_stage1_tree(stage1(0.0, 0.0, 0.8)), std::invalid_argument);
}

TEST(Stage1, DoubleEmissionKeptWithProbabilityHalfWhenClean) {
    const auto r = stage1_run({0.0, 0.01}, {1.0}, QndConfig::qnd1(), RunMode::exact());
    EXPECT_NEAR(r.yield, 0.5, 1e-12);
    EXPECT_NEAR(r.pair_fidelity, 1.0, 1e-12);
    EXPECT_NEAR(r.tally.kept_pairs, 1.0, 1e-12);  // two pairs per kept event
}

TEST(Stage1, TreeWeightsSumToOne) {
    for (const auto& cfg : {QndConfig::qnd1(), QndConfig::qnd3(), QndConfig::qnd1(PhaseTag(1, 8), PhaseTag(3, 8))}) {
        const auto t = build_stage1_tree(stage1(0.2, 0.04, 0.7, cfg));
        EXPECT_NEAR(total_weight(t), 1.0, 1e-12);
        // Children of every node form a distribution.
        for (const auto& n : t.nodes()) {
            if (n.child_count == 0) continue;
            double s = 0.0;
            for (std::uint32_t k = 0; k < n.child_count; ++k) s += t.nodes()[n.first_child + k].probability;
            EXPECT_NEAR(s, 1.0, 1e-12) << n.label;
        }
    }
}

TEST(Stage1, Qnd3AgreesWithQnd1) {
    for (double f0 : {0.55, 0.8, 1.0}) {
        const auto a = stage1_run({0.1, 0.02}, {f0}, QndConfig::qnd1(), RunMode::exact());
        const auto b = stage1_run({0.1, 0.02}, {f0}, QndConfig::qnd3(), RunMode::exact());
        EXPECT_NEAR(a.fidelity, b.fidelity, 1e-12);
        EXPECT_NEAR(a.yield, b.yield, 1e-12);
        EXPECT_NEAR(a.pair_fidelity, b.pair_fidelity, 1e-12);
        EXPECT_NEAR(a.tally.same_mode_double, b.tally.same_mode_double, 1e-12);
    }
}

TEST(Stage1, KeptSinglePairsAreExactlyPhiPlus) {
    const auto t = build_stage1_tree(stage1(0.1, 0.0, 0.7));
    const auto phi = bell_pair(BellState::PhiPlus, Spatial::Merged, Spatial::Merged);
    int kept = 0;
    for (const auto& leaf : enumerate_exact(t)) {
        ASSERT_EQ(leaf.verdict, Verdict::KeptCorrect);
        EXPECT_TRUE(approx_equal(without_probes(leaf.final_state), phi)) << first_difference(leaf.final_state, phi);
        ++kept;
    }
    EXPECT_EQ(kept, 4);  // two noise branches, each with two correlated readouts
}

TEST(Stage1, RejectsParityDetectors) {
    EXPECT_THROW(build_stage1_tree(stage1(0.1, 0.01, 0.8, QndConfig::qnd2())), ConfigError);
    EXPECT_THROW(build_stage1_tree(stage1(0.1, 0.01, 0.8, QndConfig::qnd4())), ConfigError);
    EXPECT_THROW(build_stage1_tree(stage1(0.1, 0.01, 1.1)), std::invalid_argument);
    EXPECT_THROW(build_stage1_tree(stage1(-0.1, 0.01, 0.8)), std::invalid_argument);
}

TEST(Stage2, ExactMatchesOracleOnGrid) {
    for (double f : {0.51, 0.6, 0.7, 0.8, 0.9, 0.99, 1.0}) {
        const auto r = stage2_run(f, RunMode::exact());
        EXPECT_NEAR(r.fidelity, oracle_stage2_fidelity(f), 1e-12) << f;
        EXPECT_NEAR(r.yield, f * f + (1 - f) * (1 - f), 1e-12) << f;
        EXPECT_NEAR(total_weight(build_stage2_tree(f)), 1.0, 1e-12);
    }
    EXPECT_NEAR(stage2_run(0.8, RunMode::exact()).fidelity, 16.0 / 17.0, 1e-12);
    EXPECT_NEAR(stage2_fidelity_closed_form(0.5), 0.5, 1e-15);
}

TEST(Stage2, KeptLeavesCarryExactStates) {
    const auto phi = bell_pair(BellState::PhiPlus, Spatial::Upper, Spatial::Upper);
    for (const auto& leaf : enumerate_exact(build_stage2_tree(0.7))) {
        if (leaf.verdict == Verdict::Discarded) continue;
        const bool from_psi_psi = !leaf.path.empty() && leaf.path[0] == "pairs=psi,psi";
        const bool from_phi_phi = !leaf.path.empty() && leaf.path[0] == "pairs=phi,phi";
        ASSERT_TRUE(from_phi_phi || from_psi_psi) << leaf.path[0];
        EXPECT_EQ(leaf.verdict, from_phi_phi ? Verdict::KeptCorrect : Verdict::KeptErroneous);
        const auto target = from_phi_phi ? phi : bell_pair(BellState::PsiPlus, Spatial::Upper, Spatial::Upper);
        EXPECT_NEAR(bell_fidelity(leaf.final_state, Spatial::Upper, Spatial::Upper,
                                  from_phi_phi ? BellState::PhiPlus : BellState::PsiPlus),
                    1.0, 1e-12);
        EXPECT_NEAR(std::abs(inner_product(without_probes(leaf.final_state), target)), 1.0, 1e-12);
    }
}

TEST(Stage2, RejectsUnpurifiableInput) {
    EXPECT_THROW(stage2_run(0.5, RunMode::exact()), std::invalid_argument);
    EXPECT_THROW(stage2_run(1.01, RunMode::exact()), std::invalid_argument);
    EXPECT_THROW(pbs_baseline(0.3, RunMode::exact()), std::invalid_argument);
    EXPECT_NO_THROW(stage2_run(1.0, RunMode::exact()));
}

TEST(PbsBaseline, HalfTheYieldSameFidelity) {
    for (double f : {0.55, 0.7, 0.8, 0.95, 1.0}) {
        const auto q = stage2_run(f, RunMode::exact());
        const auto p = pbs_baseline(f, RunMode::exact());
        EXPECT_NEAR(q.yield / p.yield, 2.0, 1e-12) << f;
        EXPECT_NEAR(q.fidelity, p.fidelity, 1e-12) << f;
        EXPECT_NEAR(total_weight(build_pbs_baseline_tree(f)), 1.0, 1e-12);
    }
    EXPECT_NEAR(pbs_baseline(1.0, RunMode::exact()).yield, 0.5, 1e-12);
}

TEST(Iteration, ConvergesMonotonically) {
    const auto rows = stage2_iterate(0.8, 3);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_NEAR(rows[0].fidelity, 16.0 / 17.0, 1e-12);
    EXPECT_NEAR(rows[1].fidelity, 256.0 / 257.0, 1e-12);
    EXPECT_NEAR(rows[2].fidelity, 65536.0 / 65537.0, 1e-12);
    double prev = 0.8, cumulative = 1.0;
    for (const auto& r : rows) {
        EXPECT_EQ(r.input_fidelity, prev);
        EXPECT_GT(r.fidelity, prev);
        cumulative *= 0.5 * (prev * prev + (1 - prev) * (1 - prev));
        EXPECT_NEAR(r.cumulative_yield, cumulative, 1e-12);
        prev = r.fidelity;
    }
    EXPECT_THROW(stage2_iterate(0.8, 0), std::invalid_argument);
}

TEST(MonteCarlo, AgreesWithExactWithinThreeSigma) {
    const double f0 = 0.8;
    const auto exact = stage2_run(f0, RunMode::exact());
    const auto mc = stage2_run(f0, RunMode::monte_carlo(100000, 42));
    ASSERT_TRUE(mc.fidelity_se && mc.yield_se);
    // Null standard errors from the exact values.
    const double n_kept = mc.tally.kept();
    const double se_f = std::sqrt(exact.fidelity * (1 - exact.fidelity) / n_kept);
    const double se_y = std::sqrt(exact.yield * (1 - exact.yield) / 100000.0);
    EXPECT_LT(std::abs(mc.fidelity - exact.fidelity), 3 * se_f);
    EXPECT_LT(std::abs(mc.yield - exact.yield), 3 * se_y);
    EXPECT_DOUBLE_EQ(mc.tally.total, 100000.0);
}

TEST(MonteCarlo, StandardErrorsNeedTwoSamples) {
    const auto one = stage2_run(0.9, RunMode::monte_carlo(1, 3));
    EXPECT_FALSE(one.yield_se.has_value());
    EXPECT_FALSE(one.fidelity_se.has_value());
    EXPECT_THROW(stage2_run(0.9, RunMode::monte_carlo(0, 3)), std::invalid_argument);
    const auto exact = stage2_run(0.9, RunMode::exact());
    EXPECT_FALSE(exact.yield_se.has_value());
}

TEST(Summarize, NothingKeptGivesNan) {
    const auto t = build_stage2_tree(0.8);
    std::vector<double> mass(t.leaves().size(), 0.0);
    for (std::size_t i = 0; i < mass.size(); ++i) {
        if (t.leaves()[i].verdict == Verdict::Discarded) mass[i] = 1.0;
    }
    const auto r = summarize(t, mass, RunMode::exact());
    EXPECT_TRUE(std::isnan(r.fidelity));
    EXPECT_EQ(r.yield, 0.0);
    EXPECT_THROW(summarize(t, std::vector<double>(1, 1.0), RunMode::exact()), std::invalid_argument);
    EXPECT_EQ(to_string(Verdict::KeptErroneous), "kept-erroneous");
}
