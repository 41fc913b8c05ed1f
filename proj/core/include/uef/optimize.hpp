#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "uef/model.hpp"
#include "uef/objectives.hpp"
#include "uef/rng.hpp"

namespace uef {

// Search space: decision threshold, log10 of l2 and learning rate, epoch
// count (real-coded, rounded on decode), dropout rate.
struct Genome {
    static constexpr std::size_t kGenes = 5;
    static constexpr std::array<double, kGenes> kLower{0.05, -6.0, -4.0, 10.0, 0.0};
    static constexpr std::array<double, kGenes> kUpper{0.95, -1.0, -1.0, 200.0, 0.6};

    std::array<double, kGenes> genes{0.5, -3.0, -2.0, 50.0, 0.0};

    [[nodiscard]] HyperParams to_hyperparams() const;
    void clamp();
    [[nodiscard]] rng::Seed hash() const;  // stable content hash, used for seeds and ids

    bool operator==(const Genome&) const = default;
};

struct SearchConfig {
    int population = 24;        // even, >= 4
    int generations = 15;       // >= 1
    double crossover_prob = 0.9;
    double eta_crossover = 15.0;
    double mutation_prob = 0.2;  // per gene; spec default 1/kGenes
    double eta_mutation = 20.0;
    bool theoretical_ideal = false;  // scale Chebyshev against (-1,0,0) instead of front ideal

    void validate() const;
};

// Deb's fast non-dominated sort; fronts of indices, best first, each front
// in ascending index order.
std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<ObjectiveVector>& objs);

// Crowding distance within one front (indices into `objs`); boundary points
// get +infinity, zero-range objectives contribute nothing.
std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& objs,
                                      const std::vector<std::size_t>& front);

struct ArchiveEntry {
    int generation = 0;      // 0 = initial population
    std::size_t index = 0;   // position within the generation
    Genome genome;
    ObjectiveVector objectives;
};

struct FrontMember {
    Genome genome;
    ObjectiveVector objectives;
    double crowding = 0.0;
};

struct EvolveResult {
    std::vector<FrontMember> front;                       // final non-dominated set
    std::vector<ArchiveEntry> archive;                    // every evaluation, in order
    std::vector<std::vector<ObjectiveVector>> gen_fronts; // rank-0 snapshot after each generation
};

// Objective evaluation hook; the engine derives one seed per genome so the
// result cannot depend on evaluation order or worker count.
using EvalFn = std::function<ObjectiveVector(const Genome&, rng::Seed)>;

// Elitist (mu+lambda) multi-objective search: binary tournament on
// (rank, crowding), simulated binary crossover, polynomial mutation,
// non-dominated truncation. Deterministic for fixed (cfg, seed).
EvolveResult evolve(const EvalFn& eval, const SearchConfig& cfg, rng::Seed seed, int workers);

struct ScalarizedPick {
    std::array<double, 3> ideal{0.0, 0.0, 0.0};
    std::array<double, 3> scale{0.0, 0.0, 0.0};
    std::size_t index = 0;  // into the front
    double score = 0.0;
};

// Weighted Chebyshev selection over a front: per-objective ideal point,
// inverse-range scaling (zero range drops the objective) unless explicit
// scales are supplied, argmin of the max scaled deviation. Ties resolve by
// objective lexicographic order, then genome hash.
ScalarizedPick chebyshev_select(const std::vector<FrontMember>& front,
                                const std::optional<std::array<double, 3>>& scales = {},
                                const std::optional<std::array<double, 3>>& ideal_override = {});

}  // namespace uef
