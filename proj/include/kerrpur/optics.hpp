#pragma once

#include <array>
#include <optional>

#include "kerrpur/fock.hpp"

namespace kerrpur {

/// Which photons a local operation touches: one party, optionally one spatial mode and slot.
struct PhotonSelector {
    Party party = Party::Alice;
    std::optional<Spatial> spatial;
    std::optional<std::uint8_t> slot;

    bool matches(const ModeLabel& m) const {
        return m.party == party && (!spatial || *spatial == m.spatial) && (!slot || *slot == m.slot);
    }
};

struct AmbiguousRouting : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OccupancyViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Polarizing beam splitter between `party`'s Upper and Lower modes. H is transmitted, V is
/// reflected: (Upper,H)→Upper, (Upper,V)→Lower, (Lower,H)→Lower, (Lower,V)→Upper.
PureState pbs(const PureState& state, Party party);

/// Merge `party`'s Upper and Lower modes into Merged, keeping polarization and slot.
/// Throws AmbiguousRouting when one branch has the same polarization in both inputs.
PureState coupler(const PureState& state, Party party);

PureState sigma_x(const PureState& state, const PhotonSelector& who);
PureState sigma_z(const PureState& state, const PhotonSelector& who);

/// 2x2 polarization unitary on every selected (spatial, slot) location, acting on creation
/// operators as a_H† → u[0][0] a_H† + u[1][0] a_V†, a_V† → u[0][1] a_H† + u[1][1] a_V†.
/// Multi-photon occupations are expanded with full bosonic factors.
using PolarizationMatrix = std::array<std::array<Amplitude, 2>, 2>;
PureState apply_polarization_unitary(const PureState& state, const PhotonSelector& who,
                                     const PolarizationMatrix& u);

/// |H⟩→(|H⟩+|V⟩)/√2, |V⟩→(|H⟩−|V⟩)/√2 on every photon of both parties.
PureState bilateral_rotation(const PureState& state);

enum class DiagonalOutcome { Plus, Minus };

struct DiagonalResult {
    DiagonalOutcome outcome;
    double probability = 0.0;
    PureState state;  // renormalized; empty when probability is zero
};

/// Measure the single photon of `party` at `at` in the |±⟩ = (|H⟩±|V⟩)/√2 basis and absorb it.
/// Throws OccupancyViolation unless every branch holds exactly one photon there.
/// Returns both outcomes, Plus first.
std::array<DiagonalResult, 2> measure_diagonal(const PureState& state, Party party, Spatial at);

/// Single-outcome form; throws ZeroNorm when that outcome cannot occur.
DiagonalResult measure_diagonal(const PureState& state, Party party, Spatial at, DiagonalOutcome outcome);

}  // namespace kerrpur
