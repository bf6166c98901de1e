#include "kerrpur/protocol.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "kerrpur/optics.hpp"
#include "kerrpur/sampler.hpp"

namespace kerrpur {

namespace {

/// Children below this conditional probability are rounding residue and are not emitted.
constexpr double kNegligibleBranch = 1e-14;
constexpr double kExactFidelityTol = 1e-10;

struct BuildNode {
    std::string label;
    double probability = 1.0;
    std::vector<BuildNode> children;
    std::optional<OutcomeRecord> leaf;

    BuildNode& add(std::string child_label, double p) {
        children.push_back({std::move(child_label), p, {}, {}});
        return children.back();
    }
};

bool is_correct(double fidelity) { return fidelity >= 1.0 - kExactFidelityTol; }

std::string phase_label(const PhaseTag& p) { return p.to_string(true); }

}  // namespace

class OutcomeTree::Builder {
public:
    static OutcomeTree flatten(const BuildNode& root) {
        OutcomeTree tree;
        tree.nodes_.push_back({root.label, root.probability, 0, 0, -1});
        std::vector<std::pair<const BuildNode*, std::vector<std::string>>> queue{{&root, {}}};
        // Breadth-first so that each node's children occupy a contiguous index range.
        for (std::size_t i = 0; i < queue.size(); ++i) {
            const auto* src = queue[i].first;
            auto path = queue[i].second;
            auto& node = tree.nodes_[i];
            if (src->children.empty()) {
                if (!src->leaf) throw std::logic_error("outcome tree: terminal node without a record");
                OutcomeRecord rec = *src->leaf;
                rec.path = path;
                node.leaf = static_cast<std::int32_t>(tree.leaves_.size());
                tree.leaves_.push_back(std::move(rec));
                continue;
            }
            node.first_child = static_cast<std::uint32_t>(tree.nodes_.size());
            node.child_count = static_cast<std::uint32_t>(src->children.size());
            for (const auto& c : src->children) {
                tree.nodes_.push_back({c.label, c.probability, 0, 0, -1});
                auto child_path = path;
                child_path.push_back(c.label);
                queue.emplace_back(&c, std::move(child_path));
            }
        }
        fill_weights(tree, 0, 1.0);
        return tree;
    }

private:
    static void fill_weights(OutcomeTree& tree, std::uint32_t at, double mass) {
        const auto& n = tree.nodes_[at];
        const double here = mass * (at == 0 ? 1.0 : n.probability);
        if (n.child_count == 0) {
            tree.leaves_[static_cast<std::size_t>(n.leaf)].weight = here;
            return;
        }
        for (std::uint32_t k = 0; k < n.child_count; ++k) fill_weights(tree, n.first_child + k, here);
    }
};

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::KeptCorrect: return "kept-correct";
        case Verdict::KeptErroneous: return "kept-erroneous";
        case Verdict::Discarded: return "discarded";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Stage 1

namespace {

OutcomeRecord stage1_leaf(const PureState& state, const PhaseTag& alice, const PhaseTag& bob, const QndConfig& cfg) {
    OutcomeRecord rec;
    rec.alice_phase = alice;
    rec.bob_phase = bob;
    rec.final_state = state;

    const auto single = [&](const PhaseTag& p) { return p == cfg.theta || p == cfg.theta_prime; };
    const auto four_mode = cfg.theta + cfg.theta_prime;

    if (single(alice) && single(bob)) {
        PureState s = state;
        if (alice != bob) s = sigma_x(s, PhotonSelector{Party::Alice, {}, {}});
        s = coupler(coupler(s, Party::Alice), Party::Bob);
        const bool ok = is_correct(bell_fidelity(s, Spatial::Merged, Spatial::Merged));
        rec.final_state = s;
        rec.kept_pairs = 1;
        rec.correct_pairs = ok ? 1 : 0;
        rec.verdict = ok ? Verdict::KeptCorrect : Verdict::KeptErroneous;
        return rec;
    }
    if (alice == four_mode && bob == four_mode) {
        PureState s = state;
        if (cfg.variant == QndVariant::Qnd1) s = pbs(pbs(s, Party::Alice), Party::Bob);
        const bool upper = is_correct(bell_fidelity(s, Spatial::Upper, Spatial::Upper));
        const bool lower = is_correct(bell_fidelity(s, Spatial::Lower, Spatial::Lower));
        rec.final_state = s;
        rec.kept_pairs = 2;
        rec.correct_pairs = (upper ? 1 : 0) + (lower ? 1 : 0);
        rec.verdict = upper && lower ? Verdict::KeptCorrect : Verdict::KeptErroneous;
        return rec;
    }
    rec.verdict = Verdict::Discarded;
    rec.same_mode_double = alice == bob && (alice == cfg.theta * 2 || alice == cfg.theta_prime * 2);
    return rec;
}

std::string noise_label(unsigned mask, int order) {
    if (mask == 0) return "noise=clean";
    std::string s = "noise=flip(";
    bool first = true;
    for (int slot = 0; slot < order; ++slot) {
        if (mask & (1u << slot)) {
            if (!first) s += ",";
            s += std::to_string(slot);
            first = false;
        }
    }
    return s + ")";
}

/// Alice's then Bob's ideal probe readout, each outcome a child; `leaf_fn` closes the branch.
template <typename LeafFn>
void add_readouts(BuildNode& parent, const PureState& state, LeafFn&& leaf_fn) {
    for (const auto& a : homodyne_outcomes(state, Party::Alice, HomodyneModel::Ideal)) {
        if (a.probability <= kNegligibleBranch) continue;
        auto& an = parent.add("alice=" + phase_label(a.outcome), a.probability);
        const auto& after_a = a.state.components().front().state;
        for (const auto& b : homodyne_outcomes(after_a, Party::Bob, HomodyneModel::Ideal)) {
            if (b.probability <= kNegligibleBranch) continue;
            auto& bn = an.add("bob=" + phase_label(b.outcome), b.probability);
            leaf_fn(bn, b.state.components().front().state, a.outcome, b.outcome);
        }
    }
}

}  // namespace

OutcomeTree build_stage1_tree(const Stage1Params& params) {
    params.source.validate();
    params.noise.validate();
    params.qnd.validate();
    if (params.qnd.variant != QndVariant::Qnd1 && params.qnd.variant != QndVariant::Qnd3) {
        throw ConfigError("stage 1 runs with the qnd1 or qnd3 detector, not " + to_string(params.qnd.variant));
    }
    const double events = params.source.p1 + params.source.p2;
    if (!(events > 0.0)) throw std::invalid_argument("stage 1 needs p1 + p2 > 0");

    BuildNode root{"stage1", 1.0, {}, {}};
    for (int order = 1; order <= 2; ++order) {
        const double p = (order == 1 ? params.source.p1 : params.source.p2) / events;
        if (p <= 0.0) continue;
        auto& on = root.add("order=" + std::to_string(order), p);
        const auto emitted = pdc_emit(params.source, order);

        for (unsigned mask = 0; mask < (1u << order); ++mask) {
            double w = 1.0;
            PureState s = emitted;
            for (int slot = 0; slot < order; ++slot) {
                if (mask & (1u << slot)) {
                    w *= 1.0 - params.noise.f0;
                    s = sigma_x(s, PhotonSelector{Party::Bob, {}, static_cast<std::uint8_t>(slot)});
                } else {
                    w *= params.noise.f0;
                }
            }
            if (w <= 0.0) continue;
            auto& nn = on.add(noise_label(mask, order), w);
            add_readouts(nn, apply_qnd(s, params.qnd),
                         [&](BuildNode& leaf, const PureState& st, const PhaseTag& a, const PhaseTag& b) {
                             leaf.leaf = stage1_leaf(st, a, b, params.qnd);
                         });
        }
    }
    return OutcomeTree::Builder::flatten(root);
}

// ---------------------------------------------------------------------------
// Stage 2 and the linear-optics baseline

namespace {

struct PairComponent {
    std::string label;
    double weight;
    PureState state;
};

std::vector<PairComponent> two_pair_components(double f) {
    const auto make = [](BellState first, BellState second) {
        return tensor_product(bell_pair(first, Spatial::Upper, Spatial::Upper),
                              bell_pair(second, Spatial::Lower, Spatial::Lower));
    };
    std::vector<PairComponent> out{
        {"pairs=phi,phi", f * f, make(BellState::PhiPlus, BellState::PhiPlus)},
        {"pairs=phi,psi", f * (1.0 - f), make(BellState::PhiPlus, BellState::PsiPlus)},
        {"pairs=psi,phi", (1.0 - f) * f, make(BellState::PsiPlus, BellState::PhiPlus)},
        {"pairs=psi,psi", (1.0 - f) * (1.0 - f), make(BellState::PsiPlus, BellState::PsiPlus)},
    };
    std::erase_if(out, [](const PairComponent& c) { return c.weight <= 0.0; });
    return out;
}

std::string diagonal_label(const char* who, DiagonalOutcome o) {
    return std::string(who) + (o == DiagonalOutcome::Plus ? "=+" : "=-");
}

/// Read out both Lower photons in the diagonal basis, fix the sign on Alice's Upper photon,
/// and score the remaining Upper pair.
void add_diagonal_readout(BuildNode& parent, const PureState& state) {
    for (const auto& da : measure_diagonal(state, Party::Alice, Spatial::Lower)) {
        if (da.probability <= kNegligibleBranch) continue;
        auto& an = parent.add(diagonal_label("alice-diag", da.outcome), da.probability);
        for (const auto& db : measure_diagonal(da.state, Party::Bob, Spatial::Lower)) {
            if (db.probability <= kNegligibleBranch) continue;
            auto& bn = an.add(diagonal_label("bob-diag", db.outcome), db.probability);
            PureState t = db.state;
            if (da.outcome != db.outcome) t = sigma_z(t, PhotonSelector{Party::Alice, Spatial::Upper, {}});
            const bool ok = is_correct(bell_fidelity(t, Spatial::Upper, Spatial::Upper));
            OutcomeRecord rec;
            rec.final_state = t;
            rec.kept_pairs = 1;
            rec.correct_pairs = ok ? 1 : 0;
            rec.verdict = ok ? Verdict::KeptCorrect : Verdict::KeptErroneous;
            bn.leaf = std::move(rec);
        }
    }
}

OutcomeRecord discarded(const PureState& state) {
    OutcomeRecord rec;
    rec.final_state = state;
    rec.verdict = Verdict::Discarded;
    return rec;
}

}  // namespace

void require_purifiable(double fidelity) {
    if (!(fidelity > 0.5 && fidelity <= 1.0)) {
        throw std::invalid_argument("input fidelity must satisfy 1/2 < F <= 1, got " + std::to_string(fidelity));
    }
}

OutcomeTree build_stage2_tree(double fidelity) {
    require_purifiable(fidelity);
    const auto cfg = QndConfig::qnd2();
    BuildNode root{"stage2", 1.0, {}, {}};
    for (const auto& comp : two_pair_components(fidelity)) {
        auto& cn = root.add(comp.label, comp.weight);
        add_readouts(cn, qnd2(comp.state, cfg),
                     [&](BuildNode& leaf, const PureState& st, const PhaseTag& a, const PhaseTag& b) {
                         if (a != b) {
                             leaf.leaf = discarded(st);
                             leaf.leaf->alice_phase = a;
                             leaf.leaf->bob_phase = b;
                             return;
                         }
                         PureState s = st;
                         if (a.is_zero()) {
                             s = sigma_x(s, PhotonSelector{Party::Alice, Spatial::Upper, {}});
                             s = sigma_x(s, PhotonSelector{Party::Bob, Spatial::Upper, {}});
                         }
                         add_diagonal_readout(leaf, s);
                         for (auto& c : leaf.children) {
                             for (auto& g : c.children) {
                                 g.leaf->alice_phase = a;
                                 g.leaf->bob_phase = b;
                             }
                         }
                     });
    }
    return OutcomeTree::Builder::flatten(root);
}

OutcomeTree build_pbs_baseline_tree(double fidelity) {
    require_purifiable(fidelity);
    BuildNode root{"pbs-baseline", 1.0, {}, {}};
    const auto coincidence = [](const BranchState& b) {
        for (auto party : kParties) {
            for (auto spatial : {Spatial::Upper, Spatial::Lower}) {
                int n = 0;
                for (std::uint8_t slot = 0; slot < kSlots; ++slot) {
                    for (auto pol : kPolarizations) n += b.photons(mode(party, spatial, pol, slot));
                }
                if (n != 1) return false;
            }
        }
        return true;
    };
    for (const auto& comp : two_pair_components(fidelity)) {
        auto& cn = root.add(comp.label, comp.weight);
        const auto s = pbs(pbs(comp.state, Party::Alice), Party::Bob);
        const auto kept = postselect(s, coincidence);
        const double p_keep = kept ? kept->probability : 0.0;
        if (p_keep > kNegligibleBranch) add_diagonal_readout(cn.add("coincidence", p_keep), kept->state);
        if (1.0 - p_keep > kNegligibleBranch) cn.add("no-coincidence", 1.0 - p_keep).leaf = discarded(s);
    }
    return OutcomeTree::Builder::flatten(root);
}

// ---------------------------------------------------------------------------
// Running

std::vector<OutcomeRecord> enumerate_exact(const OutcomeTree& tree) {
    return {tree.leaves().begin(), tree.leaves().end()};
}

RunReport summarize(const OutcomeTree& tree, std::span<const double> leaf_mass, const RunMode& mode) {
    const auto leaves = tree.leaves();
    if (leaf_mass.size() != leaves.size()) throw std::invalid_argument("summarize: one mass per leaf expected");

    RunReport r;
    r.mode = mode;
    auto& t = r.tally;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const double m = leaf_mass[i];
        const auto& leaf = leaves[i];
        t.total += m;
        switch (leaf.verdict) {
            case Verdict::KeptCorrect: t.kept_correct += m; break;
            case Verdict::KeptErroneous: t.kept_erroneous += m; break;
            case Verdict::Discarded: t.discarded += m; break;
        }
        if (leaf.same_mode_double) t.same_mode_double += m;
        t.kept_pairs += m * leaf.kept_pairs;
        t.correct_pairs += m * leaf.correct_pairs;
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double kept = t.kept();
    r.fidelity = kept > 0.0 ? t.kept_correct / kept : nan;
    r.yield = t.total > 0.0 ? kept / t.total : nan;
    r.pair_fidelity = t.kept_pairs > 0.0 ? t.correct_pairs / t.kept_pairs : nan;

    if (!mode.is_exact()) {
        if (t.total >= 2.0) r.yield_se = std::sqrt(r.yield * (1.0 - r.yield) / t.total);
        if (kept >= 2.0) r.fidelity_se = std::sqrt(r.fidelity * (1.0 - r.fidelity) / kept);
    }
    return r;
}

RunReport run_tree(const OutcomeTree& tree, const RunMode& mode) {
    std::vector<double> mass;
    mass.reserve(tree.leaves().size());
    if (mode.is_exact()) {
        for (const auto& leaf : tree.leaves()) mass.push_back(leaf.weight);
    } else {
        if (mode.trials == 0) throw std::invalid_argument("Monte Carlo mode needs at least one trial");
        for (auto c : sample_leaf_counts(tree, mode.trials, mode.seed, mode.execution)) {
            mass.push_back(static_cast<double>(c));
        }
    }
    return summarize(tree, mass, mode);
}

RunReport stage1_run(const PdcSourceParams& source, const NoiseParams& noise, const QndConfig& qnd,
                     const RunMode& mode) {
    return run_tree(build_stage1_tree({source, noise, qnd}), mode);
}

RunReport stage2_run(double fidelity, const RunMode& mode) { return run_tree(build_stage2_tree(fidelity), mode); }

RunReport pbs_baseline(double fidelity, const RunMode& mode) {
    return run_tree(build_pbs_baseline_tree(fidelity), mode);
}

// ---------------------------------------------------------------------------
// Closed forms

double stage1_fidelity_closed_form(double p1, double p2, double f0) {
    const double good = p1 + 0.5 * p2 * f0 * f0;
    return good / (p1 + 0.5 * p2 * (f0 * f0 + (1.0 - f0) * (1.0 - f0)));
}

double stage1_yield_closed_form(double p1, double p2, double f0) {
    return (p1 + 0.5 * p2 * (f0 * f0 + (1.0 - f0) * (1.0 - f0))) / (p1 + p2);
}

double stage2_fidelity_closed_form(double f) { return f * f / (f * f + (1.0 - f) * (1.0 - f)); }

double stage2_yield_closed_form(double f) { return f * f + (1.0 - f) * (1.0 - f); }

std::vector<IterationRow> stage2_iterate(double initial_fidelity, int rounds) {
    require_purifiable(initial_fidelity);
    if (rounds < 1) throw std::invalid_argument("stage2_iterate: rounds must be at least 1");
    std::vector<IterationRow> rows;
    double f = initial_fidelity;
    double cumulative = 1.0;
    for (int k = 1; k <= rounds; ++k) {
        const auto rep = stage2_run(f, RunMode::exact());
        // Two input pairs are consumed per attempt.
        cumulative *= 0.5 * rep.yield;
        rows.push_back({k, f, rep.fidelity, rep.yield, cumulative});
        f = rep.fidelity;
    }
    return rows;
}

}  // namespace kerrpur
