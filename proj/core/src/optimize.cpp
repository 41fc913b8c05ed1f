#include "uef/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>

#include "uef/parallel.hpp"

namespace uef {
namespace {

constexpr double kEps = 1e-14;

double clamp_gene(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Deb's bounded simulated binary crossover on one gene; one u drives both
// children so the pair stays antisymmetric around the parents' midpoint.
std::pair<double, double> sbx_gene(double p1, double p2, double lo, double hi, double eta,
                                   double u, double swap_u) {
    if (std::abs(p1 - p2) <= kEps) return {p1, p2};
    const double y1 = std::min(p1, p2);
    const double y2 = std::max(p1, p2);
    const double exo = 1.0 / (eta + 1.0);
    auto betaq_for = [&](double beta) {
        const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
        if (u <= 1.0 / alpha) return std::pow(u * alpha, exo);
        return std::pow(1.0 / (2.0 - u * alpha), exo);
    };
    double c1 = 0.5 * ((y1 + y2) - betaq_for(1.0 + 2.0 * (y1 - lo) / (y2 - y1)) * (y2 - y1));
    double c2 = 0.5 * ((y1 + y2) + betaq_for(1.0 + 2.0 * (hi - y2) / (y2 - y1)) * (y2 - y1));
    c1 = clamp_gene(c1, lo, hi);
    c2 = clamp_gene(c2, lo, hi);
    if (swap_u <= 0.5) std::swap(c1, c2);
    return {c1, c2};
}

double polynomial_mutate_gene(double y, double lo, double hi, double eta, double u) {
    const double range = hi - lo;
    const double d1 = (y - lo) / range;
    const double d2 = (hi - y) / range;
    const double pow_exp = 1.0 / (eta + 1.0);
    double deltaq;
    if (u < 0.5) {
        const double xy = 1.0 - d1;
        const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(xy, eta + 1.0);
        deltaq = std::pow(val, pow_exp) - 1.0;
    } else {
        const double xy = 1.0 - d2;
        const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(xy, eta + 1.0);
        deltaq = 1.0 - std::pow(val, pow_exp);
    }
    return clamp_gene(y + deltaq * range, lo, hi);
}

struct Ranked {
    std::vector<std::size_t> rank;
    std::vector<double> crowding;
};

Ranked rank_population(const std::vector<ObjectiveVector>& objs) {
    Ranked r;
    r.rank.assign(objs.size(), 0);
    r.crowding.assign(objs.size(), 0.0);
    const auto fronts = non_dominated_sort(objs);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        const auto cd = crowding_distance(objs, fronts[f]);
        for (std::size_t k = 0; k < fronts[f].size(); ++k) {
            r.rank[fronts[f][k]] = f;
            r.crowding[fronts[f][k]] = cd[k];
        }
    }
    return r;
}

std::size_t tournament(const Ranked& ranked, rng::Engine& eng, std::size_t n) {
    const std::size_t a = static_cast<std::size_t>(eng.below(n));
    const std::size_t b = static_cast<std::size_t>(eng.below(n));
    if (ranked.rank[a] != ranked.rank[b]) return ranked.rank[a] < ranked.rank[b] ? a : b;
    if (ranked.crowding[a] != ranked.crowding[b])
        return ranked.crowding[a] > ranked.crowding[b] ? a : b;
    return std::min(a, b);
}

}  // namespace

HyperParams Genome::to_hyperparams() const {
    HyperParams hp;
    hp.threshold = genes[0];
    hp.l2 = std::pow(10.0, genes[1]);
    hp.learning_rate = std::pow(10.0, genes[2]);
    hp.epochs = static_cast<int>(std::lround(genes[3]));
    hp.epochs = std::max(10, std::min(200, hp.epochs));
    hp.dropout = genes[4];
    return hp;
}

void Genome::clamp() {
    for (std::size_t k = 0; k < kGenes; ++k) genes[k] = clamp_gene(genes[k], kLower[k], kUpper[k]);
}

rng::Seed Genome::hash() const {
    rng::Seed h = 0x9e3779b97f4a7c15ULL;
    for (double g : genes) {
        std::uint64_t bits;
        std::memcpy(&bits, &g, sizeof bits);
        h = rng::derive(h, {bits});
    }
    return h;
}

void SearchConfig::validate() const {
    if (population < 4 || population % 2 != 0)
        throw Error(ErrorKind::config, "population must be even and >= 4");
    if (generations < 1) throw Error(ErrorKind::config, "generations must be >= 1");
    if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0))
        throw Error(ErrorKind::config, "crossover probability must lie in [0,1]");
    if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0))
        throw Error(ErrorKind::config, "mutation probability must lie in [0,1]");
    if (!(eta_crossover > 0.0) || !(eta_mutation > 0.0))
        throw Error(ErrorKind::config, "distribution indices must be > 0");
}

std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<ObjectiveVector>& objs) {
    const std::size_t n = objs.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            if (dominates(objs[p], objs[q]))
                dominated[p].push_back(q);
            else if (dominates(objs[q], objs[p]))
                ++count[p];
        }
        if (count[p] == 0) fronts[0].push_back(p);
    }
    std::size_t f = 0;
    while (!fronts[f].empty()) {
        std::vector<std::size_t> next;
        for (std::size_t p : fronts[f])
            for (std::size_t q : dominated[p])
                if (--count[q] == 0) next.push_back(q);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
        ++f;
    }
    fronts.pop_back();
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& objs,
                                      const std::vector<std::size_t>& front) {
    const std::size_t n = front.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cd(n, 0.0);
    if (n <= 2) {
        std::fill(cd.begin(), cd.end(), inf);
        return cd;
    }
    for (std::size_t k = 0; k < 3; ++k) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return objs[front[a]].as_array()[k] < objs[front[b]].as_array()[k];
        });
        const double lo = objs[front[order.front()]].as_array()[k];
        const double hi = objs[front[order.back()]].as_array()[k];
        cd[order.front()] = inf;
        cd[order.back()] = inf;
        if (hi - lo <= 0.0) continue;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (cd[order[i]] == inf) continue;
            cd[order[i]] += (objs[front[order[i + 1]]].as_array()[k] -
                             objs[front[order[i - 1]]].as_array()[k]) /
                            (hi - lo);
        }
    }
    // Redundant copies of an objective vector crowd nothing: every occurrence
    // after the first collapses to 0 so truncation sheds duplicates first.
    // Boundary sentinels stay untouched.
    std::map<std::array<double, 3>, std::size_t> first_at;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [it, inserted] = first_at.emplace(objs[front[i]].as_array(), i);
        if (!inserted && cd[i] != inf) cd[i] = 0.0;
    }
    return cd;
}

EvolveResult evolve(const EvalFn& eval, const SearchConfig& cfg, rng::Seed seed, int workers) {
    cfg.validate();
    const std::size_t n = static_cast<std::size_t>(cfg.population);
    const int nworkers = resolve_workers(workers);

    auto evaluate_all = [&](const std::vector<Genome>& genomes) {
        std::vector<ObjectiveVector> objs(genomes.size());
        parallel_for(genomes.size(), nworkers, [&](std::size_t i) {
            objs[i] = eval(genomes[i], rng::derive(seed, {rng::hash_str("eval"), genomes[i].hash()}));
        });
        return objs;
    };

    EvolveResult res;
    std::vector<Genome> pop(n);
    {
        rng::Engine init_eng(rng::derive(seed, {rng::hash_str("init")}));
        for (auto& g : pop)
            for (std::size_t k = 0; k < Genome::kGenes; ++k)
                g.genes[k] = init_eng.uniform(Genome::kLower[k], Genome::kUpper[k]);
    }
    std::vector<ObjectiveVector> pop_objs = evaluate_all(pop);
    for (std::size_t i = 0; i < n; ++i)
        res.archive.push_back(ArchiveEntry{0, i, pop[i], pop_objs[i]});
    {
        const auto fronts = non_dominated_sort(pop_objs);
        std::vector<ObjectiveVector> snap;
        for (std::size_t i : fronts[0]) snap.push_back(pop_objs[i]);
        res.gen_fronts.push_back(std::move(snap));
    }

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        const Ranked ranked = rank_population(pop_objs);
        rng::Engine vary(rng::derive(seed, {rng::hash_str("vary"), static_cast<rng::Seed>(gen)}));
        std::vector<Genome> children;
        children.reserve(n);
        while (children.size() < n) {
            const Genome& pa = pop[tournament(ranked, vary, n)];
            const Genome& pb = pop[tournament(ranked, vary, n)];
            Genome c1 = pa, c2 = pb;
            if (vary.next_double() <= cfg.crossover_prob) {
                for (std::size_t k = 0; k < Genome::kGenes; ++k) {
                    if (vary.next_double() > 0.5) continue;
                    const double u = vary.next_double();
                    const double swap_u = vary.next_double();
                    std::tie(c1.genes[k], c2.genes[k]) =
                        sbx_gene(pa.genes[k], pb.genes[k], Genome::kLower[k], Genome::kUpper[k],
                                 cfg.eta_crossover, u, swap_u);
                }
            }
            for (Genome* c : {&c1, &c2})
                for (std::size_t k = 0; k < Genome::kGenes; ++k)
                    if (vary.next_double() <= cfg.mutation_prob)
                        c->genes[k] = polynomial_mutate_gene(c->genes[k], Genome::kLower[k],
                                                             Genome::kUpper[k], cfg.eta_mutation,
                                                             vary.next_double());
            c1.clamp();
            c2.clamp();
            children.push_back(c1);
            if (children.size() < n) children.push_back(c2);
        }
        const std::vector<ObjectiveVector> child_objs = evaluate_all(children);
        for (std::size_t i = 0; i < n; ++i)
            res.archive.push_back(ArchiveEntry{gen, i, children[i], child_objs[i]});

        std::vector<Genome> pool = pop;
        pool.insert(pool.end(), children.begin(), children.end());
        std::vector<ObjectiveVector> pool_objs = pop_objs;
        pool_objs.insert(pool_objs.end(), child_objs.begin(), child_objs.end());

        const auto fronts = non_dominated_sort(pool_objs);
        std::vector<Genome> next;
        std::vector<ObjectiveVector> next_objs;
        next.reserve(n);
        for (const auto& front : fronts) {
            if (next.size() == n) break;
            if (next.size() + front.size() <= n) {
                for (std::size_t i : front) {
                    next.push_back(pool[i]);
                    next_objs.push_back(pool_objs[i]);
                }
            } else {
                const auto cd = crowding_distance(pool_objs, front);
                std::vector<std::size_t> order(front.size());
                for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
                std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                    if (cd[a] != cd[b]) return cd[a] > cd[b];
                    return front[a] < front[b];
                });
                for (std::size_t i : order) {
                    if (next.size() == n) break;
                    next.push_back(pool[front[i]]);
                    next_objs.push_back(pool_objs[front[i]]);
                }
            }
        }
        pop = std::move(next);
        pop_objs = std::move(next_objs);
        {
            const auto pf = non_dominated_sort(pop_objs);
            std::vector<ObjectiveVector> snap;
            for (std::size_t i : pf[0]) snap.push_back(pop_objs[i]);
            res.gen_fronts.push_back(std::move(snap));
        }
    }

    // The reported front is the non-dominated set over every evaluation, so
    // no returned member can be dominated by anything the run ever saw.
    std::vector<ObjectiveVector> all_objs;
    all_objs.reserve(res.archive.size());
    for (const auto& e : res.archive) all_objs.push_back(e.objectives);
    const auto all_fronts = non_dominated_sort(all_objs);
    std::vector<std::size_t> kept;
    for (std::size_t i : all_fronts[0]) {
        bool dup = false;
        for (std::size_t j : kept)
            if (res.archive[j].genome == res.archive[i].genome) {
                dup = true;
                break;
            }
        if (!dup) kept.push_back(i);
    }
    std::sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
        const auto& oa = res.archive[a].objectives.as_array();
        const auto& ob = res.archive[b].objectives.as_array();
        if (oa != ob) return oa < ob;
        return res.archive[a].genome.hash() < res.archive[b].genome.hash();
    });
    std::vector<std::size_t> front_idx(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) front_idx[i] = i;
    std::vector<ObjectiveVector> front_objs;
    for (std::size_t i : kept) front_objs.push_back(res.archive[i].objectives);
    const auto cd = crowding_distance(front_objs, front_idx);
    for (std::size_t i = 0; i < kept.size(); ++i)
        res.front.push_back(FrontMember{res.archive[kept[i]].genome,
                                        res.archive[kept[i]].objectives, cd[i]});
    return res;
}

ScalarizedPick chebyshev_select(const std::vector<FrontMember>& front,
                                const std::optional<std::array<double, 3>>& scales,
                                const std::optional<std::array<double, 3>>& ideal_override) {
    if (front.empty()) throw Error(ErrorKind::contract, "selection over an empty front");
    ScalarizedPick pick;
    std::array<double, 3> lo{}, hi{};
    for (std::size_t k = 0; k < 3; ++k) {
        lo[k] = hi[k] = front[0].objectives.as_array()[k];
        for (const auto& m : front) {
            lo[k] = std::min(lo[k], m.objectives.as_array()[k]);
            hi[k] = std::max(hi[k], m.objectives.as_array()[k]);
        }
    }
    pick.ideal = ideal_override.value_or(lo);
    if (scales) {
        pick.scale = *scales;
    } else {
        for (std::size_t k = 0; k < 3; ++k) {
            const double range = ideal_override ? hi[k] - pick.ideal[k] : hi[k] - lo[k];
            pick.scale[k] = range > 0.0 ? 1.0 / range : 0.0;
        }
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < front.size(); ++i) {
        double score = 0.0;
        for (std::size_t k = 0; k < 3; ++k)
            score = std::max(score,
                             pick.scale[k] * std::abs(front[i].objectives.as_array()[k] -
                                                      pick.ideal[k]));
        bool better = score < best;
        if (score == best) {
            const auto a = front[i].objectives.as_array();
            const auto b = front[best_i].objectives.as_array();
            if (a != b)
                better = a < b;
            else
                better = front[i].genome.hash() < front[best_i].genome.hash();
        }
        if (better) {
            best = score;
            best_i = i;
        }
    }
    pick.index = best_i;
    pick.score = best;
    return pick;
}

}  // namespace uef
