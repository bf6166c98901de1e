#include "kerrpur/sources.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kerrpur/optics.hpp"

namespace kerrpur {

void PdcSourceParams::validate() const {
    if (!(p1 >= 0.0) || !(p2 >= 0.0) || p1 + p2 > 1.0 + 1e-15) {
        throw std::invalid_argument("PDC probabilities need p1, p2 >= 0 and p1 + p2 <= 1 (got p1=" +
                                    std::to_string(p1) + ", p2=" + std::to_string(p2) + ")");
    }
}

void NoiseParams::validate() const {
    if (!(f0 >= 0.0 && f0 <= 1.0)) {
        throw std::invalid_argument("f0 must lie in [0, 1], got " + std::to_string(f0));
    }
}

PairOperator pdc_pair_operator(std::uint8_t slot) {
    PairOperator op;
    for (auto spatial : {Spatial::Upper, Spatial::Lower}) {
        for (auto pol : kPolarizations) {
            op.push_back({mode(Party::Alice, spatial, pol, slot), mode(Party::Bob, spatial, pol, slot)});
        }
    }
    return op;
}

PairOperator flipped_pair_operator(std::uint8_t slot) {
    auto op = pdc_pair_operator(slot);
    for (auto& t : op) t.bob = t.bob.with_pol(flip(t.bob.pol));
    return op;
}

PureState apply_pair_operator(const PureState& state, const PairOperator& op) {
    PureState sum;
    for (const auto& term : op) {
        sum = sum + create_photon(create_photon(state, term.alice), term.bob).scaled(term.coefficient);
    }
    return sum;
}

PureState pdc_emit(const PdcSourceParams& params, int order) {
    params.validate();
    switch (order) {
        case 1: return normalize(apply_pair_operator(PureState::vacuum(), pdc_pair_operator(0)));
        case 2: {
            auto first = apply_pair_operator(PureState::vacuum(), pdc_pair_operator(0));
            return normalize(apply_pair_operator(first, pdc_pair_operator(1)));
        }
        default: throw std::invalid_argument("pdc_emit: order must be 1 or 2, got " + std::to_string(order));
    }
}

EnsembleState apply_bitflip_noise(const PureState& state, const NoiseParams& params, std::uint8_t slot) {
    params.validate();
    return EnsembleState({
        {params.f0, state},
        {1.0 - params.f0, sigma_x(state, PhotonSelector{Party::Bob, {}, slot})},
    });
}

EnsembleState apply_bitflip_noise(const EnsembleState& ensemble, const NoiseParams& params, std::uint8_t slot) {
    std::vector<WeightedState> out;
    for (const auto& c : ensemble.components()) {
        const auto noisy = apply_bitflip_noise(c.state, params, slot);
        for (const auto& n : noisy.components()) {
            out.push_back({c.weight * n.weight, n.state});
        }
    }
    return EnsembleState(std::move(out));
}

EnsembleState ideal_mixed_pairs(double fidelity, int n_pairs) {
    if (!(fidelity > 0.0 && fidelity <= 1.0)) {
        throw std::invalid_argument("ideal_mixed_pairs: F must lie in (0, 1], got " + std::to_string(fidelity));
    }
    if (n_pairs != 1 && n_pairs != 2) {
        throw std::invalid_argument("ideal_mixed_pairs: n_pairs must be 1 or 2");
    }
    std::vector<WeightedState> comps{{1.0, PureState::vacuum()}};
    for (int k = 0; k < n_pairs; ++k) {
        const auto where = k == 0 ? Spatial::Upper : Spatial::Lower;
        const auto phi = bell_pair(BellState::PhiPlus, where, where);
        const auto psi = bell_pair(BellState::PsiPlus, where, where);
        std::vector<WeightedState> next;
        for (const auto& c : comps) {
            for (const auto& [w, pair] : {std::pair{fidelity, phi}, std::pair{1.0 - fidelity, psi}}) {
                next.push_back({c.weight * w, tensor_product(c.state, pair)});
            }
        }
        comps = std::move(next);
    }
    return EnsembleState(std::move(comps));
}

}  // namespace kerrpur
