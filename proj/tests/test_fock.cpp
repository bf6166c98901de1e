#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kerrpur/fock.hpp"
#include "support.hpp"

using namespace kerrpur;

namespace {

const auto aH = mode(Party::Alice, Spatial::Upper, Polarization::H);
const auto aV = mode(Party::Alice, Spatial::Upper, Polarization::V);
const auto bH = mode(Party::Bob, Spatial::Upper, Polarization::H);
const auto bV = mode(Party::Bob, Spatial::Upper, Polarization::V);

}  // namespace

TEST(ModeLabel, IndexRoundTripsForEveryMode) {
    for (std::size_t i = 0; i < kModeCount; ++i) {
        EXPECT_EQ(ModeLabel::from_index(i).index(), i);
    }
    EXPECT_EQ(mode(Party::Alice, Spatial::Upper, Polarization::H).to_string(), "a1H");
    EXPECT_EQ(mode(Party::Bob, Spatial::Lower, Polarization::V).to_string(), "b2V");
    EXPECT_EQ(mode(Party::Alice, Spatial::Merged, Polarization::H).to_string(), "aH");
    EXPECT_EQ(mode(Party::Alice, Spatial::Upper, Polarization::H, 1).to_string(), "a1H'");
}

TEST(PureState, CanonicalFormMergesAndPrunes) {
    BranchState x;
    x.photons(aH) = 1;
    x.amplitude = 0.5;
    BranchState y = x;
    y.amplitude = 0.25;
    BranchState z;
    z.photons(aV) = 1;
    z.amplitude = 1e-14;
    const PureState s({x, z, y});
    ASSERT_EQ(s.size(), 1u);
    EXPECT_DOUBLE_EQ(s.branches()[0].amplitude.real(), 0.75);

    BranchState cancel = x;
    cancel.amplitude = -0.5;
    EXPECT_TRUE(PureState({x, cancel}).empty());
}

TEST(PureState, DifferentProbePhasesAreDifferentBranches) {
    BranchState x;
    x.photons(aH) = 1;
    BranchState y = x;
    y.probe_phase(Party::Alice) = PhaseTag::pi();
    EXPECT_EQ(PureState({x, y}).size(), 2u);
}

TEST(CreatePhoton, AppliesBosonicFactor) {
    auto s = create_photon(PureState::vacuum(), aH);
    s = create_photon(s, aH);
    s = create_photon(s, aH);
    Occupation three{};
    three[aH.index()] = 3;
    EXPECT_NEAR(std::abs(s.amplitude_of(three)), std::sqrt(6.0), 1e-12);
}

// Pair operator squared versus the polynomial-expansion oracle.
TEST(CreatePhoton, SquaredPairOperatorMatchesPolynomialOracle) {
    const std::vector<std::pair<ModeLabel, ModeLabel>> pairs{
        {aH, bH}, {aV, bV}, {mode(Party::Alice, Spatial::Lower, Polarization::H), mode(Party::Bob, Spatial::Lower, Polarization::H)},
        {mode(Party::Alice, Spatial::Lower, Polarization::V), mode(Party::Bob, Spatial::Lower, Polarization::V)}};
    PureState s = PureState::vacuum();
    std::vector<testkit::PolyTerm> factor;
    for (const auto& [x, y] : pairs) factor.push_back({{x, y}, 1.0});
    for (int rep = 0; rep < 2; ++rep) {
        PureState next;
        for (const auto& [x, y] : pairs) next = next + create_photon(create_photon(s, x), y);
        s = next;
    }
    const auto oracle = testkit::expand_on_vacuum({factor, factor});
    ASSERT_EQ(s.size(), oracle.size());
    for (const auto& [occ, amp] : oracle) {
        EXPECT_NEAR(std::abs(s.amplitude_of(occ) - amp), 0.0, 1e-12);
    }
}

TEST(Normalize, RejectsZeroNorm) {
    EXPECT_THROW(normalize(PureState{}), ZeroNorm);
    const auto s = normalize(create_photon(create_photon(PureState::vacuum(), aH), aH));
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-15);
}

TEST(ProjectProbe, SelectsAndResetsTheProbe) {
    BranchState x;
    x.photons(aH) = 1;
    x.amplitude = std::sqrt(0.25);
    x.probe_phase(Party::Alice) = PhaseTag(1, 4);
    BranchState y;
    y.photons(aV) = 1;
    y.amplitude = std::sqrt(0.75);
    y.probe_phase(Party::Alice) = PhaseTag(3, 4);
    const PureState s({x, y});

    const auto p = project_probe(s, Party::Alice, PhaseTag(3, 4));
    EXPECT_NEAR(p.probability, 0.75, 1e-12);
    ASSERT_EQ(p.state.size(), 1u);
    EXPECT_TRUE(p.state.branches()[0].probe_phase(Party::Alice).is_zero());
    EXPECT_THROW(project_probe(s, Party::Alice, PhaseTag::pi()), ZeroNorm);

    const auto dist = probe_distribution(s, Party::Alice);
    ASSERT_EQ(dist.size(), 2u);
    EXPECT_EQ(dist[0].first, PhaseTag(1, 4));
    EXPECT_NEAR(dist[0].second + dist[1].second, 1.0, 1e-12);
}

TEST(Postselect, ReturnsNulloptWhenNothingSurvives) {
    const auto s = bell_pair(BellState::PhiPlus, Spatial::Upper, Spatial::Upper);
    EXPECT_FALSE(postselect(s, [](const BranchState&) { return false; }).has_value());
    const auto half = postselect(s, [](const BranchState& b) { return b.photons(aH) == 1; });
    ASSERT_TRUE(half.has_value());
    EXPECT_NEAR(half->probability, 0.5, 1e-12);
}

TEST(TensorProduct, RequiresDisjointModes) {
    const auto up = bell_pair(BellState::PhiPlus, Spatial::Upper, Spatial::Upper);
    const auto lo = bell_pair(BellState::PsiPlus, Spatial::Lower, Spatial::Lower);
    const auto both = tensor_product(up, lo);
    EXPECT_EQ(both.size(), 4u);
    EXPECT_NEAR(both.norm_squared(), 1.0, 1e-12);
    EXPECT_THROW(tensor_product(up, up), PreconditionViolation);
}

TEST(InnerProduct, BellStatesAreOrthonormal) {
    const std::array all{BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus};
    for (auto x : all) {
        for (auto y : all) {
            const auto ip = inner_product(bell_pair(x, Spatial::Upper, Spatial::Upper),
                                          bell_pair(y, Spatial::Upper, Spatial::Upper));
            EXPECT_NEAR(std::abs(ip), x == y ? 1.0 : 0.0, 1e-12);
        }
    }
}

TEST(BellFidelity, TracesOutSpectatorsAndProbes) {
    const auto phi = bell_pair(BellState::PhiPlus, Spatial::Upper, Spatial::Upper);
    EXPECT_NEAR(bell_fidelity(phi, Spatial::Upper, Spatial::Upper), 1.0, 1e-12);
    EXPECT_NEAR(bell_fidelity(phi, Spatial::Upper, Spatial::Upper, BellState::PsiPlus), 0.0, 1e-12);

    // Φ⁺ entangled with which-path information on a spectator: fidelity drops to ½.
    BranchState hh;
    hh.photons(aH) = 1;
    hh.photons(bH) = 1;
    hh.probe_phase(Party::Alice) = PhaseTag(1, 4);
    BranchState vv;
    vv.photons(aV) = 1;
    vv.photons(bV) = 1;
    vv.probe_phase(Party::Alice) = PhaseTag(3, 4);
    const auto marked = normalize(PureState({hh, vv}));
    EXPECT_NEAR(bell_fidelity(marked, Spatial::Upper, Spatial::Upper), 0.5, 1e-12);

    // A product with an unrelated pair leaves the fidelity untouched.
    const auto two = tensor_product(phi, bell_pair(BellState::PsiPlus, Spatial::Lower, Spatial::Lower));
    EXPECT_NEAR(bell_fidelity(two, Spatial::Upper, Spatial::Upper), 1.0, 1e-12);
    EXPECT_NEAR(bell_fidelity(two, Spatial::Lower, Spatial::Lower, BellState::PsiPlus), 1.0, 1e-12);

    EXPECT_THROW(bell_fidelity(phi, Spatial::Lower, Spatial::Upper), PreconditionViolation);
}

TEST(EnsembleState, OverlapAndPurity) {
    const auto phi = bell_pair(BellState::PhiPlus, Spatial::Upper, Spatial::Upper);
    const auto psi = bell_pair(BellState::PsiPlus, Spatial::Upper, Spatial::Upper);
    const EnsembleState rho({{0.8, phi}, {0.2, psi}});
    EXPECT_NEAR(rho.total_weight(), 1.0, 1e-15);
    EXPECT_NEAR(rho.overlap(phi), 0.8, 1e-12);
    EXPECT_NEAR(rho.purity(), 0.64 + 0.04, 1e-12);
    EXPECT_NEAR(EnsembleState::pure(phi).purity(), 1.0, 1e-12);
    EXPECT_EQ(EnsembleState({{0.0, phi}, {1.0, psi}}).size(), 1u);
    EXPECT_THROW(EnsembleState({{-0.1, phi}}), std::invalid_argument);
}

TEST(ApproxEqual, ReportsFirstDifference) {
    const auto phi = bell_pair(BellState::PhiPlus, Spatial::Upper, Spatial::Upper);
    const auto phim = bell_pair(BellState::PhiMinus, Spatial::Upper, Spatial::Upper);
    EXPECT_TRUE(approx_equal(phi, phi));
    EXPECT_FALSE(approx_equal(phi, phim));
    EXPECT_FALSE(first_difference(phi, phim).empty());
    EXPECT_TRUE(first_difference(phi, phi).empty());
    EXPECT_TRUE(approx_equal(without_probes(phi), phi));
}

TEST(PureStateProperty, NormalizeAndScaleOverRandomStates) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const auto s = testkit::random_state(rng);
        EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
        EXPECT_NEAR(s.scaled({0.0, 2.0}).norm_squared(), 4.0, 1e-11);
        EXPECT_NEAR(std::abs(inner_product(s, s)), 1.0, 1e-12);
        EXPECT_TRUE(approx_equal(normalize(s + s), s));
    }
}
