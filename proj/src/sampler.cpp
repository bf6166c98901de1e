#include "kerrpur/sampler.hpp"

#include <algorithm>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kerrpur {

namespace {

/// Per-node cumulative child probabilities, normalized so the last entry is exactly 1.
struct SamplingTable {
    std::vector<double> cumulative;  // indexed like nodes; entry for a child node
    const OutcomeTree* tree;

    explicit SamplingTable(const OutcomeTree& t) : cumulative(t.nodes().size(), 0.0), tree(&t) {
        const auto nodes = t.nodes();
        for (const auto& n : nodes) {
            if (n.child_count == 0) continue;
            double sum = 0.0;
            for (std::uint32_t k = 0; k < n.child_count; ++k) sum += nodes[n.first_child + k].probability;
            double acc = 0.0;
            for (std::uint32_t k = 0; k < n.child_count; ++k) {
                acc += nodes[n.first_child + k].probability / sum;
                cumulative[n.first_child + k] = acc;
            }
            cumulative[n.first_child + n.child_count - 1] = 1.0;
        }
    }

    template <typename Gen>
    std::int32_t draw_leaf(Gen& gen, std::uniform_real_distribution<double>& unit) const {
        const auto nodes = tree->nodes();
        std::uint32_t at = 0;
        while (nodes[at].child_count != 0) {
            const double u = unit(gen);
            const auto first = nodes[at].first_child;
            const auto last = first + nodes[at].child_count;
            auto it = std::upper_bound(cumulative.begin() + first, cumulative.begin() + last, u);
            at = static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(), last - 1));
        }
        return nodes[at].leaf;
    }
};

std::mt19937_64 block_generator(std::uint64_t seed, std::uint64_t block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    return std::mt19937_64(seq);
}

void run_block(const SamplingTable& table, std::uint64_t block, std::uint64_t trials, std::uint64_t seed,
               std::vector<std::uint64_t>& counts) {
    auto gen = block_generator(seed, block);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::uint64_t begin = block * kTrialsPerBlock;
    const std::uint64_t end = std::min(trials, begin + kTrialsPerBlock);
    for (std::uint64_t t = begin; t < end; ++t) {
        ++counts[static_cast<std::size_t>(table.draw_leaf(gen, unit))];
    }
}

std::uint64_t block_count(std::uint64_t trials) { return (trials + kTrialsPerBlock - 1) / kTrialsPerBlock; }

}  // namespace

std::vector<std::uint64_t> sample_leaf_counts_serial(const OutcomeTree& tree, std::uint64_t trials,
                                                     std::uint64_t seed) {
    const SamplingTable table(tree);
    std::vector<std::uint64_t> counts(tree.leaves().size(), 0);
    for (std::uint64_t b = 0; b < block_count(trials); ++b) run_block(table, b, trials, seed, counts);
    return counts;
}

std::vector<std::uint64_t> sample_leaf_counts_parallel(const OutcomeTree& tree, std::uint64_t trials,
                                                       std::uint64_t seed) {
    const SamplingTable table(tree);
    const auto n_leaves = tree.leaves().size();
    std::vector<std::uint64_t> counts(n_leaves, 0);
    const auto blocks = static_cast<std::int64_t>(block_count(trials));

#pragma omp parallel
    {
        std::vector<std::uint64_t> local(n_leaves, 0);
#pragma omp for schedule(dynamic, 4)
        for (std::int64_t b = 0; b < blocks; ++b) {
            run_block(table, static_cast<std::uint64_t>(b), trials, seed, local);
        }
#pragma omp critical(kerrpur_sampler_merge)
        for (std::size_t i = 0; i < n_leaves; ++i) counts[i] += local[i];
    }
    return counts;
}

std::vector<std::uint64_t> sample_leaf_counts(const OutcomeTree& tree, std::uint64_t trials, std::uint64_t seed,
                                              Execution execution) {
    return execution == Execution::Serial ? sample_leaf_counts_serial(tree, trials, seed)
                                          : sample_leaf_counts_parallel(tree, trials, seed);
}

int sampler_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace kerrpur
