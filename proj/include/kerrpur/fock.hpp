#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kerrpur/phase.hpp"

namespace kerrpur {

using Amplitude = std::complex<double>;

enum class Party : std::uint8_t { Alice = 0, Bob = 1 };
enum class Spatial : std::uint8_t { Upper = 0, Lower = 1, Merged = 2 };
enum class Polarization : std::uint8_t { H = 0, V = 1 };

inline constexpr std::array<Party, 2> kParties{Party::Alice, Party::Bob};
inline constexpr std::array<Polarization, 2> kPolarizations{Polarization::H, Polarization::V};

/// Emission slots: photons of a double PDC emission live in orthogonal temporal modes.
inline constexpr std::size_t kSlots = 2;
inline constexpr std::size_t kModesPerSlot = 12;  // 2 parties x 3 spatial x 2 polarizations
inline constexpr std::size_t kModeCount = kSlots * kModesPerSlot;

/// Branch amplitudes below this magnitude are treated as exact zeros.
inline constexpr double kPruneThreshold = 1e-12;

struct ModeLabel {
    Party party = Party::Alice;
    Spatial spatial = Spatial::Upper;
    Polarization pol = Polarization::H;
    std::uint8_t slot = 0;

    constexpr std::size_t index() const {
        return ((static_cast<std::size_t>(slot) * 2 + static_cast<std::size_t>(party)) * 3 +
                static_cast<std::size_t>(spatial)) *
                   2 +
               static_cast<std::size_t>(pol);
    }
    static constexpr ModeLabel from_index(std::size_t i) {
        ModeLabel m;
        m.pol = static_cast<Polarization>(i % 2);
        i /= 2;
        m.spatial = static_cast<Spatial>(i % 3);
        i /= 3;
        m.party = static_cast<Party>(i % 2);
        m.slot = static_cast<std::uint8_t>(i / 2);
        return m;
    }

    ModeLabel with_pol(Polarization p) const { return {party, spatial, p, slot}; }
    ModeLabel with_spatial(Spatial s) const { return {party, s, pol, slot}; }

    friend constexpr bool operator==(const ModeLabel&, const ModeLabel&) = default;
    friend constexpr auto operator<=>(const ModeLabel&, const ModeLabel&) = default;

    /// a1H, b2V, aH (merged), a1H' (slot 1).
    std::string to_string() const;
};

constexpr Polarization flip(Polarization p) {
    return p == Polarization::H ? Polarization::V : Polarization::H;
}

/// Shorthand used throughout tests and protocol wiring.
constexpr ModeLabel mode(Party party, Spatial spatial, Polarization pol, std::uint8_t slot = 0) {
    return {party, spatial, pol, slot};
}

using Occupation = std::array<std::uint8_t, kModeCount>;
using ProbeRegister = std::array<PhaseTag, 2>;

struct ZeroNorm : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// One coherent term: photon occupations, amplitude, and each party's accumulated probe phase.
struct BranchState {
    Occupation occupation{};
    Amplitude amplitude{1.0, 0.0};
    ProbeRegister probe{};

    std::uint8_t photons(const ModeLabel& m) const { return occupation[m.index()]; }
    std::uint8_t& photons(const ModeLabel& m) { return occupation[m.index()]; }
    int total_photons() const;
    PhaseTag probe_phase(Party p) const { return probe[static_cast<std::size_t>(p)]; }
    PhaseTag& probe_phase(Party p) { return probe[static_cast<std::size_t>(p)]; }

    /// Ordering/identity key, amplitude excluded.
    bool same_key(const BranchState& other) const {
        return occupation == other.occupation && probe == other.probe;
    }
    bool key_less(const BranchState& other) const {
        if (occupation != other.occupation) return occupation < other.occupation;
        return probe < other.probe;
    }

    std::string to_string() const;
};

/// Superposition of branches kept in canonical form: sorted by key, equal keys merged,
/// near-zero amplitudes pruned. Values are immutable once built.
class PureState {
public:
    PureState() = default;
    explicit PureState(std::vector<BranchState> branches);

    static PureState vacuum();

    std::span<const BranchState> branches() const { return branches_; }
    std::size_t size() const { return branches_.size(); }
    bool empty() const { return branches_.empty(); }

    double norm_squared() const;

    PureState scaled(Amplitude factor) const;
    PureState operator+(const PureState& rhs) const;

    /// Build a new state by mapping each branch to zero or more output branches.
    template <typename F>
    PureState transform(F&& fn) const {
        std::vector<BranchState> out;
        out.reserve(branches_.size());
        for (const auto& b : branches_) {
            fn(b, out);
        }
        return PureState(std::move(out));
    }

    /// Amplitude of the branch with the given key, or 0.
    Amplitude amplitude_of(const Occupation& occ, const ProbeRegister& probe = {}) const;

    std::string to_string() const;

private:
    std::vector<BranchState> branches_;
};

/// Exact canonical equality up to `tol` on amplitudes.
bool approx_equal(const PureState& a, const PureState& b, double tol = 1e-10);

/// First differing term between two canonical states, as printable text; empty if equal.
std::string first_difference(const PureState& a, const PureState& b, double tol = 1e-10);

/// a† on `m` for every branch, with the bosonic √(n+1) factor. Not renormalized.
PureState create_photon(const PureState& state, const ModeLabel& m);

/// Throws ZeroNorm if nothing survives merging/pruning.
PureState normalize(const PureState& state);

struct Projection {
    double probability = 0.0;
    PureState state;
};

/// Keep branches whose `party` probe equals `outcome`; renormalize; reset that probe to 0.
Projection project_probe(const PureState& state, Party party, const PhaseTag& outcome);

/// Distinct probe phases of `party` with their Born probabilities, ascending by phase.
std::vector<std::pair<PhaseTag, double>> probe_distribution(const PureState& state, Party party);

/// Keep branches satisfying `keep`; returns the kept probability and the renormalized state,
/// or nullopt when nothing is kept.
std::optional<Projection> postselect(const PureState& state,
                                     const std::function<bool(const BranchState&)>& keep);

/// ⟨a|b⟩ over matching (occupation, probe) keys.
Amplitude inner_product(const PureState& a, const PureState& b);

/// |a⟩⊗|b⟩ for states on disjoint modes: occupations add, probe phases add.
PureState tensor_product(const PureState& a, const PureState& b);

/// Same state with every probe register cleared (for comparisons on photons alone).
PureState without_probes(const PureState& state);

struct WeightedState {
    double weight = 0.0;
    PureState state;
};

/// Classical mixture of pure states. Weights are non-negative and sum to 1.
class EnsembleState {
public:
    EnsembleState() = default;
    explicit EnsembleState(std::vector<WeightedState> components);
    static EnsembleState pure(PureState state) { return EnsembleState({{1.0, std::move(state)}}); }

    std::span<const WeightedState> components() const { return components_; }
    std::size_t size() const { return components_.size(); }

    double total_weight() const;
    /// ⟨t|ρ|t⟩.
    double overlap(const PureState& target) const;
    /// Tr ρ².
    double purity() const;

private:
    std::vector<WeightedState> components_;
};

enum class BellState { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

/// Two-photon Bell state on the given Alice/Bob modes, slot 0.
PureState bell_pair(BellState which, Spatial alice_at, Spatial bob_at);

/// ⟨B|ρ_pair|B⟩ for the pair formed by Alice's photon at `alice_at` and Bob's photon at
/// `bob_at`, tracing out everything else (other photons, emission slots, probes).
/// Precondition: every branch holds exactly one Alice photon at `alice_at` and one Bob photon
/// at `bob_at`.
double bell_fidelity(const PureState& state, Spatial alice_at, Spatial bob_at,
                     BellState target = BellState::PhiPlus);

}  // namespace kerrpur
