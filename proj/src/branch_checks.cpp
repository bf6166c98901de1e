#include "kerrpur/branch_checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>

#include "kerrpur/fock.hpp"
#include "kerrpur/qnd.hpp"
#include "kerrpur/sources.hpp"

namespace kerrpur {

namespace {

// Expected states are written the way the detector outputs are usually displayed: sums of
// creation-operator pairs acting on vacuum, with index 1 the upper and 2 the lower mode.

constexpr auto H = Polarization::H;
constexpr auto V = Polarization::V;

ModeLabel a(int k, Polarization p) { return mode(Party::Alice, k == 1 ? Spatial::Upper : Spatial::Lower, p); }
ModeLabel b(int k, Polarization p) { return mode(Party::Bob, k == 1 ? Spatial::Upper : Spatial::Lower, p); }

using PairSum = std::vector<std::pair<ModeLabel, ModeLabel>>;

/// (Σ a† b†) applied to `state`.
PureState apply_sum(const PairSum& sum, const PureState& state) {
    PureState out;
    for (const auto& [x, y] : sum) out = out + create_photon(create_photon(state, x), y);
    return out;
}

/// Product of pair sums acting on vacuum, then tagged with both probe phases.
PureState term(std::initializer_list<PairSum> factors, const PhaseTag& alice, const PhaseTag& bob,
               double coefficient = 1.0) {
    PureState s = PureState::vacuum();
    for (const auto& f : factors) s = apply_sum(f, s);
    return s.transform([&](const BranchState& br, std::vector<BranchState>& out) {
        BranchState t = br;
        t.amplitude *= coefficient;
        t.probe_phase(Party::Alice) = alice;
        t.probe_phase(Party::Bob) = bob;
        out.push_back(t);
    });
}

/// |p_a1⟩|p_b1⟩|p_a2⟩|p_b2⟩ with probe phases.
PureState ket(Polarization pa1, Polarization pb1, Polarization pa2, Polarization pb2, const PhaseTag& alice,
              const PhaseTag& bob) {
    return term({{{a(1, pa1), b(1, pb1)}}, {{a(2, pa2), b(2, pb2)}}}, alice, bob);
}

PureState pairs_input(std::initializer_list<PairSum> factors) { return term(factors, {}, {}); }

const PairSum kClean{{a(1, H), b(1, H)}, {a(1, V), b(1, V)}, {a(2, H), b(2, H)}, {a(2, V), b(2, V)}};
const PairSum kFlipped{{a(1, V), b(1, H)}, {a(1, H), b(1, V)}, {a(2, V), b(2, H)}, {a(2, H), b(2, V)}};

struct Case {
    std::string id;
    std::string description;
    std::function<std::pair<PureState, PureState>(const QndConfig& c1, const QndConfig& c3, const QndConfig& c4)> run;
};

std::pair<PureState, PureState> qnd2_case(BellState first, BellState second, PureState expected) {
    const auto input = tensor_product(bell_pair(first, Spatial::Upper, Spatial::Upper),
                                      bell_pair(second, Spatial::Lower, Spatial::Lower));
    return {qnd2(input, QndConfig::qnd2()), std::move(expected)};
}

std::vector<Case> all_cases() {
    const PhaseTag zero = PhaseTag::zero();
    const PhaseTag pi = PhaseTag::pi();
    std::vector<Case> cases;

    // QND1 on one pair and on two pairs.
    cases.push_back({"qnd1-clean-pair", "QND1, one uncorrupted pair: equal readouts θ or θ′",
                     [](const QndConfig& c, const QndConfig&, const QndConfig&) {
                         const auto& t = c.theta;
                         const auto& tp = c.theta_prime;
                         auto expected = term({{{a(1, H), b(1, H)}, {a(2, V), b(2, V)}}}, t, t) +
                                         term({{{a(1, V), b(1, V)}, {a(2, H), b(2, H)}}}, tp, tp);
                         return std::pair{qnd1(pairs_input({kClean}), c), expected};
                     }});
    cases.push_back({"qnd1-flipped-pair", "QND1, one bit-flipped pair: readouts differ",
                     [](const QndConfig& c, const QndConfig&, const QndConfig&) {
                         const auto& t = c.theta;
                         const auto& tp = c.theta_prime;
                         auto expected = term({{{a(1, V), b(1, H)}, {a(2, H), b(2, V)}}}, tp, t) +
                                         term({{{a(1, H), b(1, V)}, {a(2, V), b(2, H)}}}, t, tp);
                         return std::pair{qnd1(pairs_input({kFlipped}), c), expected};
                     }});
    cases.push_back({"qnd1-clean-double", "QND1, two uncorrupted pairs: 2θ, 2θ′ or θ+θ′ on both sides",
                     [](const QndConfig& c, const QndConfig&, const QndConfig&) {
                         const auto& t = c.theta;
                         const auto& tp = c.theta_prime;
                         const PairSum A{{a(1, H), b(1, H)}, {a(2, V), b(2, V)}};
                         const PairSum B{{a(1, V), b(1, V)}, {a(2, H), b(2, H)}};
                         auto expected = term({A, A}, t * 2, t * 2) + term({B, B}, tp * 2, tp * 2) +
                                         term({A, B}, t + tp, t + tp, 2.0);
                         return std::pair{qnd1(pairs_input({kClean, kClean}), c), expected};
                     }});
    cases.push_back({"qnd1-one-error-double", "QND1, two pairs with one flipped: readouts never agree",
                     [](const QndConfig& c, const QndConfig&, const QndConfig&) {
                         const auto& t = c.theta;
                         const auto& tp = c.theta_prime;
                         const PairSum A{{a(1, H), b(1, H)}, {a(2, V), b(2, V)}};
                         const PairSum B{{a(1, V), b(1, V)}, {a(2, H), b(2, H)}};
                         const PairSum C{{a(1, V), b(1, H)}, {a(2, H), b(2, V)}};
                         const PairSum D{{a(1, H), b(1, V)}, {a(2, V), b(2, H)}};
                         auto expected = term({A, C}, t + tp, t * 2) + term({A, D}, t * 2, t + tp) +
                                         term({B, C}, tp * 2, t + tp) + term({B, D}, t + tp, tp * 2);
                         return std::pair{qnd1(pairs_input({kClean, kFlipped}), c), expected};
                     }});
    cases.push_back({"qnd1-two-error-double", "QND1, both pairs flipped: the θ+θ′ branch looks clean",
                     [](const QndConfig& c, const QndConfig&, const QndConfig&) {
                         const auto& t = c.theta;
                         const auto& tp = c.theta_prime;
                         const PairSum C{{a(1, V), b(1, H)}, {a(2, H), b(2, V)}};
                         const PairSum D{{a(1, H), b(1, V)}, {a(2, V), b(2, H)}};
                         auto expected = term({D, D}, t * 2, tp * 2) + term({C, C}, tp * 2, t * 2) +
                                         term({C, D}, t + tp, t + tp, 2.0);
                         return std::pair{qnd1(pairs_input({kFlipped, kFlipped}), c), expected};
                     }});

    // QND2 on the four two-pair Bell combinations.
    cases.push_back({"qnd2-phi-phi", "QND2, Φ⁺Φ⁺: equal readouts π or 0",
                     [=](const QndConfig&, const QndConfig&, const QndConfig&) {
                         auto e = ket(H, H, H, H, pi, pi) + ket(V, V, V, V, pi, pi) + ket(H, H, V, V, zero, zero) +
                                  ket(V, V, H, H, zero, zero);
                         return qnd2_case(BellState::PhiPlus, BellState::PhiPlus, e);
                     }});
    cases.push_back({"qnd2-phi-psi", "QND2, Φ⁺Ψ⁺: readouts differ",
                     [=](const QndConfig&, const QndConfig&, const QndConfig&) {
                         auto e = ket(H, H, V, H, zero, pi) + ket(V, V, H, V, zero, pi) + ket(H, H, H, V, pi, zero) +
                                  ket(V, V, V, H, pi, zero);
                         return qnd2_case(BellState::PhiPlus, BellState::PsiPlus, e);
                     }});
    cases.push_back({"qnd2-psi-phi", "QND2, Ψ⁺Φ⁺: readouts differ",
                     [=](const QndConfig&, const QndConfig&, const QndConfig&) {
                         auto e = ket(V, H, H, H, zero, pi) + ket(H, V, V, V, zero, pi) + ket(V, H, V, V, pi, zero) +
                                  ket(H, V, H, H, pi, zero);
                         return qnd2_case(BellState::PsiPlus, BellState::PhiPlus, e);
                     }});
    cases.push_back({"qnd2-psi-psi", "QND2, Ψ⁺Ψ⁺: equal readouts, indistinguishable from Φ⁺Φ⁺",
                     [=](const QndConfig&, const QndConfig&, const QndConfig&) {
                         auto e = ket(V, H, V, H, pi, pi) + ket(H, V, H, V, pi, pi) + ket(V, H, H, V, zero, zero) +
                                  ket(H, V, V, H, zero, zero);
                         return qnd2_case(BellState::PsiPlus, BellState::PsiPlus, e);
                     }});

    // QND3: labels on the expected side are the ports after its PBS.
    cases.push_back({"qnd3-clean-pair", "QND3, one uncorrupted pair: the readout also names the port",
                     [](const QndConfig&, const QndConfig& c, const QndConfig&) {
                         const auto& t = c.theta;
                         const auto& tp = c.theta_prime;
                         auto expected = term({{{a(1, H), b(1, H)}, {a(1, V), b(1, V)}}}, t, t) +
                                         term({{{a(2, V), b(2, V)}, {a(2, H), b(2, H)}}}, tp, tp);
                         return std::pair{qnd3(pairs_input({kClean}), c), expected};
                     }});
    cases.push_back({"qnd3-flipped-pair", "QND3, one bit-flipped pair: readouts differ, photons cross ports",
                     [](const QndConfig&, const QndConfig& c, const QndConfig&) {
                         const auto& t = c.theta;
                         const auto& tp = c.theta_prime;
                         auto expected = term({{{a(1, V), b(2, H)}, {a(1, H), b(2, V)}}}, t, tp) +
                                         term({{{a(2, V), b(1, H)}, {a(2, H), b(1, V)}}}, tp, t);
                         return std::pair{qnd3(pairs_input({kFlipped}), c), expected};
                     }});
    cases.push_back({"qnd3-clean-double", "QND3, two uncorrupted pairs: θ+θ′ marks the four-mode events",
                     [](const QndConfig&, const QndConfig& c, const QndConfig&) {
                         const auto& t = c.theta;
                         const auto& tp = c.theta_prime;
                         const PairSum U{{a(1, V), b(1, V)}, {a(1, H), b(1, H)}};
                         const PairSum L{{a(2, H), b(2, H)}, {a(2, V), b(2, V)}};
                         auto expected = term({U, U}, t * 2, t * 2) + term({L, L}, tp * 2, tp * 2) +
                                         term({U, L}, t + tp, t + tp, 2.0);
                         return std::pair{qnd3(pairs_input({kClean, kClean}), c), expected};
                     }});
    cases.push_back({"qnd3-two-error-double", "QND3, both pairs flipped: the θ+θ′ branch looks clean",
                     [](const QndConfig&, const QndConfig& c, const QndConfig&) {
                         const auto& t = c.theta;
                         const auto& tp = c.theta_prime;
                         const PairSum X{{a(2, H), b(1, V)}, {a(2, V), b(1, H)}};
                         const PairSum Y{{a(1, V), b(2, H)}, {a(1, H), b(2, V)}};
                         auto expected = term({X, X}, tp * 2, t * 2) + term({Y, Y}, t * 2, tp * 2) +
                                         term({Y, X}, t + tp, t + tp, 2.0);
                         return std::pair{qnd3(pairs_input({kFlipped, kFlipped}), c), expected};
                     }});

    cases.push_back({"qnd4-parity", "QND4, two-pair superposition: probes 0, 0, +θ, −θ",
                     [=](const QndConfig&, const QndConfig&, const QndConfig& c) {
                         const auto& t = c.theta;
                         const auto input = ket(H, H, H, H, zero, zero) + ket(V, V, V, V, zero, zero) +
                                            ket(H, H, V, V, zero, zero) + ket(V, V, H, H, zero, zero);
                         auto expected = ket(H, H, H, H, zero, zero) + ket(V, V, V, V, zero, zero) +
                                         ket(H, H, V, V, t, t) + ket(V, V, H, H, -t, -t);
                         return std::pair{qnd4(normalize(input), c), expected};
                     }});
    return cases;
}

}  // namespace

std::vector<std::string> branch_check_ids() {
    std::vector<std::string> ids;
    for (const auto& c : all_cases()) ids.push_back(c.id);
    return ids;
}

std::vector<BranchCheckResult> run_branch_checks(const PhaseTag& theta, const PhaseTag& theta_prime,
                                                 std::span<const std::string> only) {
    const QndConfig c1{QndVariant::Qnd1, theta, theta_prime};
    const QndConfig c3{QndVariant::Qnd3, theta, theta_prime};
    const auto c4 = QndConfig::qnd4(theta);
    c1.validate();
    c3.validate();
    c4.validate();

    const auto cases = all_cases();
    for (const auto& id : only) {
        const bool known = std::any_of(cases.begin(), cases.end(), [&](const Case& c) { return c.id == id; });
        if (!known) throw ConfigError("unknown branch check '" + id + "'");
    }

    std::vector<BranchCheckResult> results;
    for (const auto& c : cases) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        auto [actual, expected] = c.run(c1, c3, c4);
        const auto want = normalize(expected);
        const auto got = normalize(actual);
        BranchCheckResult r{c.id, c.description, approx_equal(got, want), {}, want.size()};
        if (!r.passed) r.first_difference = first_difference(got, want);
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace kerrpur
