#include "kerrpur/qnd.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "kerrpur/optics.hpp"

namespace kerrpur {

PureState apply_kerr(const PureState& state, const KerrMedium& medium) {
    return state.transform([&](const BranchState& b, std::vector<BranchState>& out) {
        auto c = b;
        int n = 0;
        for (std::uint8_t slot = 0; slot < kSlots; ++slot) {
            n += b.photons(mode(medium.probe_party, medium.spatial, medium.pol, slot));
        }
        c.probe_phase(medium.probe_party) += medium.phase_per_photon * n;
        out.push_back(c);
    });
}

void QndConfig::validate() const {
    switch (variant) {
        case QndVariant::Qnd1:
        case QndVariant::Qnd3: {
            if (theta == theta_prime) {
                throw ConfigError("theta and theta' must differ mod 2pi (got " + theta.to_string(true) + ")");
            }
            const std::array<PhaseTag, 6> classes{PhaseTag::zero(), theta,          theta_prime,
                                                  theta * 2,        theta_prime * 2, theta + theta_prime};
            for (std::size_t i = 0; i < classes.size(); ++i) {
                for (std::size_t j = i + 1; j < classes.size(); ++j) {
                    if (classes[i] == classes[j]) {
                        throw ConfigError("phase classes {0, θ, θ′, 2θ, 2θ′, θ+θ′} collide at " +
                                          classes[i].to_string(true) + " for theta=" + theta.to_string(true) +
                                          ", theta'=" + theta_prime.to_string(true));
                    }
                }
            }
            break;
        }
        case QndVariant::Qnd2:
            if (theta != PhaseTag::pi()) {
                throw ConfigError("QND2 requires theta = pi, got " + theta.to_string(true));
            }
            break;
        case QndVariant::Qnd4:
            if (theta.is_zero()) {
                throw ConfigError("QND4 requires a non-zero theta");
            }
            break;
    }
}

std::string to_string(QndVariant v) {
    switch (v) {
        case QndVariant::Qnd1: return "qnd1";
        case QndVariant::Qnd2: return "qnd2";
        case QndVariant::Qnd3: return "qnd3";
        case QndVariant::Qnd4: return "qnd4";
    }
    return "?";
}

QndVariant parse_variant(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "qnd1") return QndVariant::Qnd1;
    if (lower == "qnd2") return QndVariant::Qnd2;
    if (lower == "qnd3") return QndVariant::Qnd3;
    if (lower == "qnd4") return QndVariant::Qnd4;
    throw ConfigError("unknown QND variant '" + std::string(text) + "'");
}

std::vector<KerrMedium> qnd1_media(const QndConfig& cfg, Party party) {
    using P = Polarization;
    using S = Spatial;
    return {
        {S::Upper, P::H, cfg.theta, party},
        {S::Lower, P::V, cfg.theta, party},
        {S::Upper, P::V, cfg.theta_prime, party},
        {S::Lower, P::H, cfg.theta_prime, party},
    };
}

std::vector<KerrMedium> qnd3_media(const QndConfig& cfg, Party party) {
    using P = Polarization;
    using S = Spatial;
    // Both polarizations of a port see the same medium.
    return {
        {S::Upper, P::H, cfg.theta, party},
        {S::Upper, P::V, cfg.theta, party},
        {S::Lower, P::H, cfg.theta_prime, party},
        {S::Lower, P::V, cfg.theta_prime, party},
    };
}

namespace {

void require_parity_input(const PureState& state, const char* who) {
    for (const auto& b : state.branches()) {
        for (auto party : kParties) {
            for (auto spatial : {Spatial::Upper, Spatial::Lower, Spatial::Merged}) {
                int n = 0;
                for (std::uint8_t slot = 0; slot < kSlots; ++slot) {
                    for (auto pol : kPolarizations) n += b.photons(mode(party, spatial, pol, slot));
                }
                const int limit = spatial == Spatial::Merged ? 0 : 1;
                if (n > limit) {
                    throw PreconditionViolation(std::string(who) + ": needs at most one photon per party in each of " +
                                                "the two input modes, branch " + b.to_string());
                }
            }
        }
    }
}

PureState apply_all(PureState state, const std::vector<KerrMedium>& media) {
    for (const auto& m : media) state = apply_kerr(state, m);
    return state;
}

}  // namespace

PureState qnd1(const PureState& state, const QndConfig& cfg) {
    PureState out = state;
    for (auto party : kParties) out = apply_all(out, qnd1_media(cfg, party));
    return out;
}

PureState qnd2(const PureState& state, const QndConfig& cfg) {
    require_parity_input(state, "qnd2");
    PureState out = state;
    for (auto party : kParties) {
        out = pbs(out, party);
        out = apply_kerr(out, {Spatial::Upper, Polarization::H, cfg.theta, party});
        out = apply_kerr(out, {Spatial::Upper, Polarization::V, cfg.theta, party});
        out = pbs(out, party);
    }
    return out;
}

PureState qnd3(const PureState& state, const QndConfig& cfg) {
    PureState out = state;
    for (auto party : kParties) {
        out = pbs(out, party);
        out = apply_all(out, qnd3_media(cfg, party));
    }
    return out;
}

PureState qnd4(const PureState& state, const QndConfig& cfg) {
    require_parity_input(state, "qnd4");
    PureState out = state;
    for (auto party : kParties) {
        out = apply_kerr(out, {Spatial::Upper, Polarization::H, cfg.theta, party});
        out = apply_kerr(out, {Spatial::Lower, Polarization::H, -cfg.theta, party});
    }
    return out;
}

PureState apply_qnd(const PureState& state, const QndConfig& cfg) {
    switch (cfg.variant) {
        case QndVariant::Qnd1: return qnd1(state, cfg);
        case QndVariant::Qnd2: return qnd2(state, cfg);
        case QndVariant::Qnd3: return qnd3(state, cfg);
        case QndVariant::Qnd4: return qnd4(state, cfg);
    }
    return state;
}

std::vector<HomodyneResult> homodyne_outcomes(const PureState& state, Party party, HomodyneModel model) {
    const auto dist = probe_distribution(state, party);
    // Group exact phases by what the detector can report.
    std::map<PhaseTag, std::vector<std::pair<PhaseTag, double>>> groups;
    for (const auto& [phase, p] : dist) {
        const PhaseTag reported = model == HomodyneModel::Ideal ? phase : phase.folded();
        groups[reported].emplace_back(phase, p);
    }
    std::vector<HomodyneResult> results;
    results.reserve(groups.size());
    for (const auto& [reported, members] : groups) {
        double total = 0.0;
        for (const auto& m : members) total += m.second;
        std::vector<WeightedState> comps;
        for (const auto& [phase, p] : members) {
            comps.push_back({p / total, project_probe(state, party, phase).state});
        }
        results.push_back({reported, total, EnsembleState(std::move(comps))});
    }
    return results;
}

HomodyneResult homodyne_x(const PureState& state, Party party, HomodyneModel model, const PhaseTag& outcome) {
    for (auto& r : homodyne_outcomes(state, party, model)) {
        if (r.outcome == outcome) return std::move(r);
    }
    throw ZeroNorm("homodyne outcome " + outcome.to_string() + " has probability zero");
}

HomodyneResult homodyne_x(const EnsembleState& state, Party party, HomodyneModel model, const PhaseTag& outcome) {
    double total = 0.0;
    std::vector<WeightedState> comps;
    for (const auto& c : state.components()) {
        for (const auto& r : homodyne_outcomes(c.state, party, model)) {
            if (r.outcome != outcome) continue;
            total += c.weight * r.probability;
            for (const auto& inner : r.state.components()) {
                comps.push_back({c.weight * r.probability * inner.weight, inner.state});
            }
        }
    }
    if (total <= 0.0) {
        throw ZeroNorm("homodyne outcome " + outcome.to_string() + " has probability zero");
    }
    for (auto& c : comps) c.weight /= total;
    return {outcome, total, EnsembleState(std::move(comps))};
}

}  // namespace kerrpur
