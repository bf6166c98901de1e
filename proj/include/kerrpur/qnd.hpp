#pragma once

#include <vector>

#include "kerrpur/fock.hpp"

namespace kerrpur {

/// Cross-Kerr coupling between one signal mode and one party's probe beam. Each photon in the
/// signal mode advances the probe by `phase_per_photon`; the signal is left alone.
struct KerrMedium {
    Spatial spatial = Spatial::Upper;
    Polarization pol = Polarization::H;
    PhaseTag phase_per_photon;
    Party probe_party = Party::Alice;
};

/// Applies to every emission slot of the coupled (party, spatial, pol) location: the medium
/// cannot tell temporal modes apart.
PureState apply_kerr(const PureState& state, const KerrMedium& medium);

enum class QndVariant { Qnd1, Qnd2, Qnd3, Qnd4 };

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct QndConfig {
    QndVariant variant = QndVariant::Qnd1;
    PhaseTag theta = PhaseTag::fraction_of_pi(1, 4);
    PhaseTag theta_prime = PhaseTag::fraction_of_pi(3, 4);

    static QndConfig qnd1(PhaseTag theta = PhaseTag::fraction_of_pi(1, 4),
                          PhaseTag theta_prime = PhaseTag::fraction_of_pi(3, 4)) {
        return {QndVariant::Qnd1, theta, theta_prime};
    }
    static QndConfig qnd2() { return {QndVariant::Qnd2, PhaseTag::pi(), PhaseTag::pi()}; }
    static QndConfig qnd3(PhaseTag theta = PhaseTag::fraction_of_pi(1, 4),
                          PhaseTag theta_prime = PhaseTag::fraction_of_pi(3, 4)) {
        return {QndVariant::Qnd3, theta, theta_prime};
    }
    static QndConfig qnd4(PhaseTag theta = PhaseTag::fraction_of_pi(1, 4)) {
        return {QndVariant::Qnd4, theta, theta};
    }

    /// Throws ConfigError when the phase choice cannot separate the outcome classes.
    void validate() const;
};

std::string to_string(QndVariant v);
QndVariant parse_variant(std::string_view text);

/// The Kerr couplings (per party) realizing each gadget. Exposed for inspection and tests.
std::vector<KerrMedium> qnd1_media(const QndConfig& cfg, Party party);
std::vector<KerrMedium> qnd3_media(const QndConfig& cfg, Party party);

/// Four Kerr media per party: (Upper,H),(Lower,V) couple θ; (Upper,V),(Lower,H) couple θ′.
PureState qnd1(const PureState& state, const QndConfig& cfg);

/// Per party: PBS, π Kerr on both polarizations of the upper port, PBS back. Net phase is
/// π × (photons in (Upper,H) and (Lower,V)), i.e. it reads the polarization parity of the pair.
/// Precondition: at most one photon per party in each of Upper and Lower, none in Merged.
PureState qnd2(const PureState& state, const QndConfig& cfg);

/// Per party: PBS, then θ on the Upper port and θ′ on the Lower port.
PureState qnd3(const PureState& state, const QndConfig& cfg);

/// Parity check with +θ on (Upper,H) and −θ on (Lower,H). Same precondition as qnd2.
PureState qnd4(const PureState& state, const QndConfig& cfg);

/// Dispatch on cfg.variant.
PureState apply_qnd(const PureState& state, const QndConfig& cfg);

enum class HomodyneModel {
    Ideal,          // resolves the full phase
    MagnitudeOnly,  // X quadrature: +φ and −φ are one outcome
};

struct HomodyneResult {
    PhaseTag outcome;  // folded into [0, π] for MagnitudeOnly
    double probability = 0.0;
    EnsembleState state;
};

/// Every outcome of `party`'s probe readout with its probability and post-measurement state.
/// MagnitudeOnly merges ±φ into one outcome whose post-measurement state is a mixture over
/// the sign (the sign is left in the probe, not in the photons). The measured probe is reset.
std::vector<HomodyneResult> homodyne_outcomes(const PureState& state, Party party, HomodyneModel model);

/// Single-outcome readout; throws ZeroNorm when the outcome cannot occur.
HomodyneResult homodyne_x(const PureState& state, Party party, HomodyneModel model, const PhaseTag& outcome);

/// Apply a readout to every component of a mixture, conditioning on one outcome.
HomodyneResult homodyne_x(const EnsembleState& state, Party party, HomodyneModel model, const PhaseTag& outcome);

}  // namespace kerrpur
