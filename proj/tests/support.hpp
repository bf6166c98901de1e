#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "kerrpur/fock.hpp"

namespace kerrpur::testkit {

/// Random normalized state: up to `max_branches` branches, each with at most `max_photons`
/// photons spread over Upper/Lower modes of both parties and both slots, random complex
/// amplitudes and probe phases in multiples of π/8.
inline PureState random_state(std::mt19937_64& rng, int max_branches = 6, int max_photons = 4) {
    std::uniform_int_distribution<int> n_branches(1, max_branches);
    std::uniform_int_distribution<int> n_photons(0, max_photons);
    std::uniform_int_distribution<int> party(0, 1), spatial(0, 1), pol(0, 1), slot(0, 1), eighth(0, 15);
    std::normal_distribution<double> gauss;
    std::vector<BranchState> branches;
    const int nb = n_branches(rng);
    for (int i = 0; i < nb; ++i) {
        BranchState b;
        const int np = n_photons(rng);
        for (int k = 0; k < np; ++k) {
            const auto m = mode(static_cast<Party>(party(rng)), static_cast<Spatial>(spatial(rng)),
                                static_cast<Polarization>(pol(rng)), static_cast<std::uint8_t>(slot(rng)));
            ++b.photons(m);
        }
        b.amplitude = {gauss(rng), gauss(rng)};
        b.probe_phase(Party::Alice) = PhaseTag::fraction_of_pi(eighth(rng), 8);
        b.probe_phase(Party::Bob) = PhaseTag::fraction_of_pi(eighth(rng), 8);
        branches.push_back(b);
    }
    return normalize(PureState(std::move(branches)));
}

/// Random state with exactly one photon per party in Upper and in Lower (slot 0) per branch,
/// the input class accepted by the parity detectors.
inline PureState random_two_pair_state(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> bit(0, 1);
    std::normal_distribution<double> gauss;
    std::vector<BranchState> branches;
    for (int code = 0; code < 16; ++code) {
        if (bit(rng) == 0 && code != 0) continue;
        BranchState b;
        int k = 0;
        for (auto p : kParties) {
            for (auto s : {Spatial::Upper, Spatial::Lower}) {
                ++b.photons(mode(p, s, static_cast<Polarization>((code >> k++) & 1)));
            }
        }
        b.amplitude = {gauss(rng), gauss(rng)};
        branches.push_back(b);
    }
    return normalize(PureState(std::move(branches)));
}

/// Photon count per party, summed over branches weighted by probability (a conserved mean).
inline std::array<double, 2> mean_photons_per_party(const PureState& s) {
    std::array<double, 2> out{};
    for (const auto& b : s.branches()) {
        const double w = std::norm(b.amplitude);
        for (std::size_t i = 0; i < kModeCount; ++i) {
            out[static_cast<std::size_t>(ModeLabel::from_index(i).party)] += w * b.occupation[i];
        }
    }
    return out;
}

/// Every branch carries the same photon count per party as `n`; used for number conservation.
inline bool fixed_photons_per_party(const PureState& s, std::array<int, 2>& n) {
    bool first = true;
    for (const auto& b : s.branches()) {
        std::array<int, 2> here{};
        for (std::size_t i = 0; i < kModeCount; ++i) {
            here[static_cast<std::size_t>(ModeLabel::from_index(i).party)] += b.occupation[i];
        }
        if (first) {
            n = here;
            first = false;
        } else if (here != n) {
            return false;
        }
    }
    return true;
}

/// Independent bosonic oracle: expand a product of creation-operator sums acting on vacuum as a
/// polynomial in commuting symbols, then attach √(Π nᵢ!) per monomial.
struct PolyTerm {
    std::vector<ModeLabel> ops;
    Amplitude coefficient;
};

inline std::map<Occupation, Amplitude> expand_on_vacuum(const std::vector<std::vector<PolyTerm>>& factors) {
    std::map<Occupation, Amplitude> monomials{{Occupation{}, Amplitude{1.0, 0.0}}};
    for (const auto& factor : factors) {
        std::map<Occupation, Amplitude> next;
        for (const auto& [occ, c] : monomials) {
            for (const auto& t : factor) {
                Occupation o = occ;
                for (const auto& m : t.ops) ++o[m.index()];
                next[o] += c * t.coefficient;
            }
        }
        monomials = std::move(next);
    }
    std::map<Occupation, Amplitude> amplitudes;
    for (const auto& [occ, c] : monomials) {
        double f = 1.0;
        for (auto n : occ) f *= std::tgamma(n + 1.0);
        if (std::abs(c) > 0.0) amplitudes[occ] = c * std::sqrt(f);
    }
    return amplitudes;
}

}  // namespace kerrpur::testkit
