#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kerrpur/fock.hpp"
#include "kerrpur/qnd.hpp"
#include "kerrpur/sources.hpp"

namespace kerrpur {

enum class Verdict { KeptCorrect, KeptErroneous, Discarded };

std::string to_string(Verdict v);

/// One fully resolved run of a pipeline: every random choice along the way is fixed.
struct OutcomeRecord {
    std::vector<std::string> path;  // e.g. {"order=2", "noise=flip(0,1)", "alice=π", "bob=π"}
    std::optional<PhaseTag> alice_phase;
    std::optional<PhaseTag> bob_phase;
    Verdict verdict = Verdict::Discarded;
    PureState final_state;
    double weight = 0.0;
    int kept_pairs = 0;       // pairs handed on
    int correct_pairs = 0;    // of those, how many are exactly |Φ⁺⟩
    bool same_mode_double = false;  // both read 2θ or both 2θ′: two pairs bunched in one port
};

/// Branching structure of a pipeline. Node 0 is the root; children are contiguous.
/// Each node carries its probability conditional on the parent.
class OutcomeTree {
public:
    struct Node {
        std::string label;
        double probability = 1.0;
        std::uint32_t first_child = 0;
        std::uint32_t child_count = 0;
        std::int32_t leaf = -1;  // index into leaves() when terminal
    };

    std::span<const Node> nodes() const { return nodes_; }
    /// Leaf records; `weight` holds the full path probability.
    std::span<const OutcomeRecord> leaves() const { return leaves_; }

    class Builder;

private:
    std::vector<Node> nodes_;
    std::vector<OutcomeRecord> leaves_;
};

/// Stage 1: PDC sources, channel bit flips, QND1 or QND3, classical comparison.
struct Stage1Params {
    PdcSourceParams source;
    NoiseParams noise;
    QndConfig qnd = QndConfig::qnd1();
};

OutcomeTree build_stage1_tree(const Stage1Params& params);
/// Stage 2: two pairs of F|Φ⁺⟩⟨Φ⁺| + (1−F)|Ψ⁺⟩⟨Ψ⁺|, QND2, diagonal-basis readout of the second pair.
OutcomeTree build_stage2_tree(double fidelity);
/// Linear-optics parity check with four-mode coincidence postselection.
OutcomeTree build_pbs_baseline_tree(double fidelity);

std::vector<OutcomeRecord> enumerate_exact(const OutcomeTree& tree);

enum class Execution { Serial, Parallel };

struct RunMode {
    enum class Kind { Exact, MonteCarlo };
    Kind kind = Kind::Exact;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    Execution execution = Execution::Parallel;

    static RunMode exact() { return {}; }
    static RunMode monte_carlo(std::uint64_t trials, std::uint64_t seed, Execution ex = Execution::Parallel) {
        return {Kind::MonteCarlo, trials, seed, ex};
    }
    bool is_exact() const { return kind == Kind::Exact; }
};

/// Probability mass (exact mode) or trial counts (Monte Carlo) per verdict.
struct Tally {
    double total = 0.0;
    double kept_correct = 0.0;
    double kept_erroneous = 0.0;
    double discarded = 0.0;
    double same_mode_double = 0.0;
    double kept_pairs = 0.0;
    double correct_pairs = 0.0;

    double kept() const { return kept_correct + kept_erroneous; }
};

struct RunReport {
    RunMode mode;
    Tally tally;
    double fidelity = 0.0;       // kept-correct / kept (per kept event)
    double yield = 0.0;          // kept / total
    double pair_fidelity = 0.0;  // correct pairs / kept pairs
    std::optional<double> fidelity_se;  // Monte Carlo only; empty when undefined
    std::optional<double> yield_se;
};

/// Aggregate per-leaf masses (weights or counts) into a report.
RunReport summarize(const OutcomeTree& tree, std::span<const double> leaf_mass, const RunMode& mode);

/// Exact or sampled report for a tree, per `mode`.
RunReport run_tree(const OutcomeTree& tree, const RunMode& mode);

RunReport stage1_run(const PdcSourceParams& source, const NoiseParams& noise, const QndConfig& qnd,
                     const RunMode& mode);
RunReport stage2_run(double fidelity, const RunMode& mode);
RunReport pbs_baseline(double fidelity, const RunMode& mode);

/// (p1 + ½p2·f0²) / (p1 + ½p2·(f0² + (1−f0)²)).
double stage1_fidelity_closed_form(double p1, double p2, double f0);
/// Kept events per non-vacuum emission.
double stage1_yield_closed_form(double p1, double p2, double f0);
/// F² / (F² + (1−F)²).
double stage2_fidelity_closed_form(double fidelity);
/// F² + (1−F)².
double stage2_yield_closed_form(double fidelity);

struct IterationRow {
    int round = 0;
    double input_fidelity = 0.0;
    double fidelity = 0.0;
    double yield = 0.0;             // kept fraction of two-pair attempts this round
    double cumulative_yield = 0.0;  // output pairs per original pair
};

/// Feed each round's output fidelity into the next, using the exact stage-2 engine.
std::vector<IterationRow> stage2_iterate(double initial_fidelity, int rounds);

/// Throws std::invalid_argument unless ½ < F ≤ 1.
void require_purifiable(double fidelity);

}  // namespace kerrpur
