#include "kerrpur/optics.hpp"

#include <cmath>
#include <numbers>

namespace kerrpur {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

Amplitude ipow(Amplitude base, int exp) {
    Amplitude r{1.0, 0.0};
    for (int k = 0; k < exp; ++k) r *= base;
    return r;
}

}  // namespace

PureState pbs(const PureState& state, Party party) {
    return state.transform([&](const BranchState& b, std::vector<BranchState>& out) {
        auto c = b;
        for (std::uint8_t slot = 0; slot < kSlots; ++slot) {
            // Only the V components swap ports.
            auto& upper_v = c.photons(mode(party, Spatial::Upper, Polarization::V, slot));
            auto& lower_v = c.photons(mode(party, Spatial::Lower, Polarization::V, slot));
            std::swap(upper_v, lower_v);
        }
        out.push_back(c);
    });
}

PureState coupler(const PureState& state, Party party) {
    return state.transform([&](const BranchState& b, std::vector<BranchState>& out) {
        auto c = b;
        for (std::uint8_t slot = 0; slot < kSlots; ++slot) {
            for (auto pol : kPolarizations) {
                auto& up = c.photons(mode(party, Spatial::Upper, pol, slot));
                auto& lo = c.photons(mode(party, Spatial::Lower, pol, slot));
                if (up > 0 && lo > 0) {
                    throw AmbiguousRouting("coupler: branch has " + mode(party, Spatial::Upper, pol, slot).to_string() +
                                           " and " + mode(party, Spatial::Lower, pol, slot).to_string() +
                                           " both occupied");
                }
                c.photons(mode(party, Spatial::Merged, pol, slot)) += static_cast<std::uint8_t>(up + lo);
                up = 0;
                lo = 0;
            }
        }
        out.push_back(c);
    });
}

PureState sigma_x(const PureState& state, const PhotonSelector& who) {
    return state.transform([&](const BranchState& b, std::vector<BranchState>& out) {
        auto c = b;
        for (std::size_t i = 0; i < kModeCount; ++i) {
            const auto m = ModeLabel::from_index(i);
            if (m.pol != Polarization::H || !who.matches(m)) continue;
            std::swap(c.photons(m), c.photons(m.with_pol(Polarization::V)));
        }
        out.push_back(c);
    });
}

PureState sigma_z(const PureState& state, const PhotonSelector& who) {
    return state.transform([&](const BranchState& b, std::vector<BranchState>& out) {
        auto c = b;
        int vcount = 0;
        for (std::size_t i = 0; i < kModeCount; ++i) {
            const auto m = ModeLabel::from_index(i);
            if (m.pol == Polarization::V && who.matches(m)) vcount += b.occupation[i];
        }
        if (vcount % 2 == 1) c.amplitude = -c.amplitude;
        out.push_back(c);
    });
}

PureState apply_polarization_unitary(const PureState& state, const PhotonSelector& who,
                                     const PolarizationMatrix& u) {
    PureState current = state;
    for (std::uint8_t slot = 0; slot < kSlots; ++slot) {
        for (auto spatial : {Spatial::Upper, Spatial::Lower, Spatial::Merged}) {
            const auto mh = mode(who.party, spatial, Polarization::H, slot);
            if (!who.matches(mh)) continue;
            const auto mv = mh.with_pol(Polarization::V);
            current = current.transform([&](const BranchState& b, std::vector<BranchState>& out) {
                const int nh = b.photons(mh);
                const int nv = b.photons(mv);
                if (nh + nv == 0) {
                    out.push_back(b);
                    return;
                }
                // (a_H†)^nh (a_V†)^nv / √(nh! nv!) with each operator substituted, then
                // (a†)^k|0⟩ = √k! |k⟩ on the way out.
                const double in_norm = std::sqrt(factorial(nh) * factorial(nv));
                for (int i = 0; i <= nh; ++i) {
                    for (int j = 0; j <= nv; ++j) {
                        const int kh = i + j;
                        const int kv = nh + nv - kh;
                        const Amplitude coeff = binomial(nh, i) * binomial(nv, j) *
                                                ipow(u[0][0], i) * ipow(u[1][0], nh - i) * ipow(u[0][1], j) *
                                                ipow(u[1][1], nv - j);
                        if (std::abs(coeff) < kPruneThreshold) continue;
                        auto c = b;
                        c.photons(mh) = static_cast<std::uint8_t>(kh);
                        c.photons(mv) = static_cast<std::uint8_t>(kv);
                        c.amplitude *= coeff * std::sqrt(factorial(kh) * factorial(kv)) / in_norm;
                        out.push_back(c);
                    }
                }
            });
        }
    }
    return current;
}

PureState bilateral_rotation(const PureState& state) {
    const double r = std::numbers::sqrt2 / 2.0;
    const PolarizationMatrix hadamard{{{r, r}, {r, -r}}};
    auto out = apply_polarization_unitary(state, {Party::Alice, {}, {}}, hadamard);
    return apply_polarization_unitary(out, {Party::Bob, {}, {}}, hadamard);
}

std::array<DiagonalResult, 2> measure_diagonal(const PureState& state, Party party, Spatial at) {
    for (const auto& b : state.branches()) {
        int n = 0;
        for (std::uint8_t slot = 0; slot < kSlots; ++slot) {
            for (auto pol : kPolarizations) n += b.photons(mode(party, at, pol, slot));
        }
        if (n != 1) {
            throw OccupancyViolation("measure_diagonal: " + mode(party, at, Polarization::H).to_string() +
                                     "/V holds " + std::to_string(n) + " photons in a branch");
        }
    }

    const double total = state.norm_squared();
    const double r = std::numbers::sqrt2 / 2.0;
    std::array<DiagonalResult, 2> results{DiagonalResult{DiagonalOutcome::Plus, 0.0, {}},
                                          DiagonalResult{DiagonalOutcome::Minus, 0.0, {}}};
    for (auto& res : results) {
        const double sign = res.outcome == DiagonalOutcome::Plus ? 1.0 : -1.0;
        auto projected = state.transform([&](const BranchState& b, std::vector<BranchState>& out) {
            auto c = b;
            for (std::uint8_t slot = 0; slot < kSlots; ++slot) {
                for (auto pol : kPolarizations) {
                    auto& n = c.photons(mode(party, at, pol, slot));
                    if (n == 0) continue;
                    n = 0;
                    // ⟨±|H⟩ = 1/√2, ⟨±|V⟩ = ±1/√2
                    c.amplitude *= pol == Polarization::H ? r : sign * r;
                }
            }
            out.push_back(c);
        });
        res.probability = projected.norm_squared() / total;
        if (!projected.empty() && res.probability > 0.0) res.state = normalize(projected);
    }
    return results;
}

DiagonalResult measure_diagonal(const PureState& state, Party party, Spatial at, DiagonalOutcome outcome) {
    auto both = measure_diagonal(state, party, at);
    auto& res = both[outcome == DiagonalOutcome::Plus ? 0 : 1];
    if (res.state.empty()) {
        throw ZeroNorm("diagonal outcome has probability zero");
    }
    return std::move(res);
}

}  // namespace kerrpur
