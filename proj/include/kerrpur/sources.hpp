#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kerrpur/fock.hpp"

namespace kerrpur {

/// Relative weights of one-pair and two-pair emissions; the rest of the pulse is vacuum.
struct PdcSourceParams {
    double p1 = 0.1;
    double p2 = 0.01;

    void validate() const;
};

/// Probability that a pair crosses the channel without a bit flip.
struct NoiseParams {
    double f0 = 1.0;

    void validate() const;
};

/// One term c · a† b† of a pair-creation operator.
struct PairTerm {
    ModeLabel alice;
    ModeLabel bob;
    Amplitude coefficient{1.0, 0.0};
};
using PairOperator = std::vector<PairTerm>;

/// a1H†b1H† + a1V†b1V† + a2H†b2H† + a2V†b2V† in the given emission slot.
PairOperator pdc_pair_operator(std::uint8_t slot = 0);

/// The same operator after a bit flip on Bob's photon.
PairOperator flipped_pair_operator(std::uint8_t slot = 0);

/// Apply a pair-creation operator to a state (bosonic factors included, not renormalized).
PureState apply_pair_operator(const PureState& state, const PairOperator& op);

/// order 1: normalized single-pair state, four branches of amplitude 1/2.
/// order 2: two independently emitted pairs in emission slots 0 and 1, normalized.
PureState pdc_emit(const PdcSourceParams& params, int order);

/// {(f0, state), (1−f0, σx on Bob's photons of `slot`)}, zero-weight parts dropped.
EnsembleState apply_bitflip_noise(const PureState& state, const NoiseParams& params, std::uint8_t slot);
EnsembleState apply_bitflip_noise(const EnsembleState& ensemble, const NoiseParams& params, std::uint8_t slot);

/// n_pairs copies of F|Φ⁺⟩⟨Φ⁺| + (1−F)|Ψ⁺⟩⟨Ψ⁺|; pair k sits on the Upper (k=0) / Lower (k=1) modes.
EnsembleState ideal_mixed_pairs(double fidelity, int n_pairs);

}  // namespace kerrpur
