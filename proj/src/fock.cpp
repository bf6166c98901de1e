#include "kerrpur/fock.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace kerrpur {

namespace {

std::string format_amplitude(Amplitude a) {
    std::ostringstream os;
    os.precision(6);
    if (std::abs(a.imag()) < 1e-12) {
        os << std::showpos << a.real();
    } else {
        os << "(" << a.real() << std::showpos << a.imag() << "i)";
    }
    return os.str();
}

}  // namespace

std::string ModeLabel::to_string() const {
    std::string out(1, party == Party::Alice ? 'a' : 'b');
    if (spatial == Spatial::Upper) out += '1';
    if (spatial == Spatial::Lower) out += '2';
    out += pol == Polarization::H ? 'H' : 'V';
    if (slot != 0) out += std::string(slot, '\'');
    return out;
}

int BranchState::total_photons() const {
    int n = 0;
    for (auto c : occupation) n += c;
    return n;
}

std::string BranchState::to_string() const {
    std::ostringstream os;
    os << format_amplitude(amplitude) << " ";
    bool any = false;
    for (std::size_t i = 0; i < kModeCount; ++i) {
        if (occupation[i] == 0) continue;
        os << ModeLabel::from_index(i).to_string();
        if (occupation[i] > 1) os << "^" << int(occupation[i]);
        os << " ";
        any = true;
    }
    if (!any) os << "vac ";
    os << "|A:" << probe[0] << " B:" << probe[1] << ">";
    return os.str();
}

PureState::PureState(std::vector<BranchState> branches) : branches_(std::move(branches)) {
    std::sort(branches_.begin(), branches_.end(),
              [](const BranchState& a, const BranchState& b) { return a.key_less(b); });
    std::vector<BranchState> merged;
    merged.reserve(branches_.size());
    for (auto& b : branches_) {
        if (!merged.empty() && merged.back().same_key(b)) {
            merged.back().amplitude += b.amplitude;
        } else {
            merged.push_back(b);
        }
    }
    std::erase_if(merged, [](const BranchState& b) { return std::abs(b.amplitude) < kPruneThreshold; });
    branches_ = std::move(merged);
}

PureState PureState::vacuum() { return PureState({BranchState{}}); }

double PureState::norm_squared() const {
    double n = 0.0;
    for (const auto& b : branches_) n += std::norm(b.amplitude);
    return n;
}

PureState PureState::scaled(Amplitude factor) const {
    return transform([&](const BranchState& b, std::vector<BranchState>& out) {
        auto c = b;
        c.amplitude *= factor;
        out.push_back(c);
    });
}

PureState PureState::operator+(const PureState& rhs) const {
    std::vector<BranchState> all(branches_.begin(), branches_.end());
    all.insert(all.end(), rhs.branches_.begin(), rhs.branches_.end());
    return PureState(std::move(all));
}

Amplitude PureState::amplitude_of(const Occupation& occ, const ProbeRegister& probe) const {
    BranchState key;
    key.occupation = occ;
    key.probe = probe;
    auto it = std::lower_bound(branches_.begin(), branches_.end(), key,
                               [](const BranchState& a, const BranchState& b) { return a.key_less(b); });
    if (it != branches_.end() && it->same_key(key)) return it->amplitude;
    return {0.0, 0.0};
}

std::string PureState::to_string() const {
    if (branches_.empty()) return "0";
    std::string out;
    for (const auto& b : branches_) {
        if (!out.empty()) out += "\n";
        out += b.to_string();
    }
    return out;
}

std::string first_difference(const PureState& a, const PureState& b, double tol) {
    auto ia = a.branches().begin();
    auto ib = b.branches().begin();
    const auto ea = a.branches().end();
    const auto eb = b.branches().end();
    while (ia != ea || ib != eb) {
        if (ib == eb || (ia != ea && ia->key_less(*ib))) {
            return "only in first: " + ia->to_string();
        }
        if (ia == ea || ib->key_less(*ia)) {
            return "only in second: " + ib->to_string();
        }
        if (std::abs(ia->amplitude - ib->amplitude) > tol) {
            return "amplitude differs: " + ia->to_string() + " vs " + ib->to_string();
        }
        ++ia;
        ++ib;
    }
    return {};
}

bool approx_equal(const PureState& a, const PureState& b, double tol) {
    return first_difference(a, b, tol).empty();
}

PureState create_photon(const PureState& state, const ModeLabel& m) {
    return state.transform([&](const BranchState& b, std::vector<BranchState>& out) {
        auto c = b;
        const auto n = c.photons(m);
        c.photons(m) = static_cast<std::uint8_t>(n + 1);
        c.amplitude *= std::sqrt(static_cast<double>(n) + 1.0);
        out.push_back(c);
    });
}

PureState normalize(const PureState& state) {
    const double n2 = state.norm_squared();
    if (state.empty() || n2 <= 0.0) {
        throw ZeroNorm("cannot normalize a state with zero norm");
    }
    return state.scaled(1.0 / std::sqrt(n2));
}

Projection project_probe(const PureState& state, Party party, const PhaseTag& outcome) {
    const double total = state.norm_squared();
    double kept = 0.0;
    auto projected = state.transform([&](const BranchState& b, std::vector<BranchState>& out) {
        if (b.probe_phase(party) != outcome) return;
        kept += std::norm(b.amplitude);
        auto c = b;
        c.probe_phase(party) = PhaseTag::zero();
        out.push_back(c);
    });
    if (projected.empty() || kept <= 0.0) {
        throw ZeroNorm("probe outcome " + outcome.to_string() + " has probability zero");
    }
    return {kept / total, normalize(projected)};
}

std::vector<std::pair<PhaseTag, double>> probe_distribution(const PureState& state, Party party) {
    std::map<PhaseTag, double> acc;
    const double total = state.norm_squared();
    for (const auto& b : state.branches()) {
        acc[b.probe_phase(party)] += std::norm(b.amplitude) / total;
    }
    return {acc.begin(), acc.end()};
}

std::optional<Projection> postselect(const PureState& state,
                                     const std::function<bool(const BranchState&)>& keep) {
    const double total = state.norm_squared();
    double kept = 0.0;
    auto selected = state.transform([&](const BranchState& b, std::vector<BranchState>& out) {
        if (!keep(b)) return;
        kept += std::norm(b.amplitude);
        out.push_back(b);
    });
    if (selected.empty()) return std::nullopt;
    return Projection{kept / total, normalize(selected)};
}

Amplitude inner_product(const PureState& a, const PureState& b) {
    Amplitude acc{0.0, 0.0};
    auto ia = a.branches().begin();
    auto ib = b.branches().begin();
    while (ia != a.branches().end() && ib != b.branches().end()) {
        if (ia->key_less(*ib)) {
            ++ia;
        } else if (ib->key_less(*ia)) {
            ++ib;
        } else {
            acc += std::conj(ia->amplitude) * ib->amplitude;
            ++ia;
            ++ib;
        }
    }
    return acc;
}

PureState tensor_product(const PureState& a, const PureState& b) {
    std::vector<BranchState> out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a.branches()) {
        for (const auto& y : b.branches()) {
            BranchState z = x;
            for (std::size_t i = 0; i < kModeCount; ++i) {
                if (x.occupation[i] != 0 && y.occupation[i] != 0) {
                    throw PreconditionViolation("tensor_product: mode " + ModeLabel::from_index(i).to_string() +
                                                " occupied on both sides");
                }
                z.occupation[i] = static_cast<std::uint8_t>(x.occupation[i] + y.occupation[i]);
            }
            z.amplitude *= y.amplitude;
            z.probe[0] += y.probe[0];
            z.probe[1] += y.probe[1];
            out.push_back(z);
        }
    }
    return PureState(std::move(out));
}

PureState without_probes(const PureState& state) {
    return state.transform([](const BranchState& b, std::vector<BranchState>& out) {
        auto c = b;
        c.probe = {};
        out.push_back(c);
    });
}

EnsembleState::EnsembleState(std::vector<WeightedState> components) {
    for (auto& c : components) {
        if (c.weight < 0.0) {
            throw std::invalid_argument("ensemble weight must be non-negative");
        }
        if (c.weight > 0.0) components_.push_back(std::move(c));
    }
}

double EnsembleState::total_weight() const {
    double w = 0.0;
    for (const auto& c : components_) w += c.weight;
    return w;
}

double EnsembleState::overlap(const PureState& target) const {
    double f = 0.0;
    for (const auto& c : components_) f += c.weight * std::norm(inner_product(target, c.state));
    return f;
}

double EnsembleState::purity() const {
    double p = 0.0;
    for (const auto& ci : components_) {
        for (const auto& cj : components_) {
            p += ci.weight * cj.weight * std::norm(inner_product(ci.state, cj.state));
        }
    }
    return p;
}

PureState bell_pair(BellState which, Spatial alice_at, Spatial bob_at) {
    using P = Polarization;
    const double r = std::numbers::sqrt2 / 2.0;
    auto term = [&](P pa, P pb, double c) {
        auto s = create_photon(PureState::vacuum(), mode(Party::Alice, alice_at, pa));
        return create_photon(s, mode(Party::Bob, bob_at, pb)).scaled(c);
    };
    switch (which) {
        case BellState::PhiPlus: return term(P::H, P::H, r) + term(P::V, P::V, r);
        case BellState::PhiMinus: return term(P::H, P::H, r) + term(P::V, P::V, -r);
        case BellState::PsiPlus: return term(P::H, P::V, r) + term(P::V, P::H, r);
        case BellState::PsiMinus: return term(P::H, P::V, r) + term(P::V, P::H, -r);
    }
    return {};
}

namespace {

struct PairPhoton {
    Polarization pol;
    std::uint8_t slot;
};

PairPhoton take_single_photon(Occupation& occ, Party party, Spatial at) {
    std::optional<PairPhoton> found;
    int count = 0;
    for (std::uint8_t slot = 0; slot < kSlots; ++slot) {
        for (auto pol : kPolarizations) {
            auto& n = occ[mode(party, at, pol, slot).index()];
            if (n == 0) continue;
            count += n;
            found = PairPhoton{pol, slot};
            n = 0;
        }
    }
    if (count != 1) {
        throw PreconditionViolation("bell_fidelity: expected exactly one photon at " +
                                    mode(party, at, Polarization::H).to_string() + "/V, found " +
                                    std::to_string(count));
    }
    return *found;
}

}  // namespace

double bell_fidelity(const PureState& state, Spatial alice_at, Spatial bob_at, BellState target) {
    struct EnvKey {
        Occupation rest;
        ProbeRegister probe;
        std::uint8_t slot_a;
        std::uint8_t slot_b;
        auto operator<=>(const EnvKey&) const = default;
    };
    // Pair amplitudes per environment configuration, indexed by 2·pol_a + pol_b.
    std::map<EnvKey, std::array<Amplitude, 4>> grouped;
    const double total = state.norm_squared();
    for (const auto& b : state.branches()) {
        Occupation rest = b.occupation;
        const auto pa = take_single_photon(rest, Party::Alice, alice_at);
        const auto pb = take_single_photon(rest, Party::Bob, bob_at);
        auto& slotvec = grouped[EnvKey{rest, b.probe, pa.slot, pb.slot}];
        slotvec[2 * static_cast<std::size_t>(pa.pol) + static_cast<std::size_t>(pb.pol)] += b.amplitude;
    }
    const double r = std::numbers::sqrt2 / 2.0;
    std::array<double, 4> bell{};
    switch (target) {
        case BellState::PhiPlus: bell = {r, 0, 0, r}; break;
        case BellState::PhiMinus: bell = {r, 0, 0, -r}; break;
        case BellState::PsiPlus: bell = {0, r, r, 0}; break;
        case BellState::PsiMinus: bell = {0, r, -r, 0}; break;
    }
    double f = 0.0;
    for (const auto& [key, amps] : grouped) {
        Amplitude proj{0.0, 0.0};
        for (std::size_t k = 0; k < 4; ++k) proj += bell[k] * amps[k];
        f += std::norm(proj);
    }
    return f / total;
}

}  // namespace kerrpur
