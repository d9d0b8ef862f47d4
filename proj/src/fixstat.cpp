#include "autgrp/fixstat.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "autgrp/errors.hpp"

namespace autgrp {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
    // Rejection below the largest multiple of n; unbiased and portable.
    const std::uint64_t limit = n * ((~std::uint64_t(0)) / n);
    for (;;) {
        std::uint64_t v = next();
        if (v < limit) return v % n;
    }
}

SplitMix64 SplitMix64::substream(std::uint64_t seed, std::uint64_t worker) {
    SplitMix64 mixer(seed ^ (0xa0761d6478bd642full * (worker + 1)));
    mixer.next();
    return mixer;
}

void StabilizerChain::rebuild_orbit(std::size_t level) {
    Level& lv = levels_[level];
    lv.position.assign(n_, -1);
    lv.orbit.clear();
    lv.transversal.clear();
    lv.position[lv.base] = 0;
    lv.orbit.push_back(lv.base);
    lv.transversal.push_back(identity_perm(n_));
    for (std::size_t i = 0; i < lv.orbit.size(); ++i) {
        // Every generator homed at this level or deeper stabilizes all
        // shallower bases and so belongs to this level's subgroup.
        for (std::size_t k = level; k < levels_.size(); ++k) {
            for (const Perm& g : levels_[k].homed) {
                std::uint32_t image = g[lv.orbit[i]];
                if (lv.position[image] < 0) {
                    lv.position[image] = std::int32_t(lv.orbit.size());
                    lv.orbit.push_back(image);
                    lv.transversal.push_back(compose(g, lv.transversal[i]));
                }
            }
        }
    }
}

void StabilizerChain::insert(std::size_t level, Perm g) {
    // Sift from `level`; the residue is homed at the first level whose base
    // orbit it escapes, or at a fresh level.
    std::size_t lv = level;
    for (; lv < levels_.size(); ++lv) {
        if (is_identity(g)) return;
        std::uint32_t image = g[levels_[lv].base];
        if (image == levels_[lv].base) continue;
        if (levels_[lv].position[image] < 0) break;
        g = compose(
            inverse_perm(levels_[lv].transversal[std::size_t(levels_[lv].position[image])]), g);
    }
    if (is_identity(g)) return;
    if (lv == levels_.size()) {
        std::uint32_t base = 0;
        while (g[base] == base) ++base;
        levels_.push_back(Level{base, {}, {}, {}, {}});
        rebuild_orbit(lv);
    }
    levels_[lv].homed.push_back(std::move(g));
}

void StabilizerChain::complete(std::size_t level) {
    if (level >= levels_.size()) return;
    complete(level + 1);  // deeper levels first, so sifting sees sound orbits
    rebuild_orbit(level);
    // Process Schreier generators of every (orbit point, generator) pair;
    // a surviving residue enlarges a deeper subgroup (or this level's
    // generator view), so rebuild and rescan until the scan is clean.
    for (;;) {
        bool dirty = false;
        for (std::size_t i = 0; i < levels_[level].orbit.size() && !dirty; ++i) {
            for (std::size_t k = level; k < levels_.size() && !dirty; ++k) {
                for (std::size_t si = 0; si < levels_[k].homed.size() && !dirty; ++si) {
                    const Perm s = levels_[k].homed[si];
                    const Perm t_from = levels_[level].transversal[i];
                    const std::uint32_t to = s[levels_[level].orbit[i]];
                    const Perm t_to =
                        levels_[level]
                            .transversal[std::size_t(levels_[level].position[to])];
                    Perm schreier = compose(inverse_perm(t_to), compose(s, t_from));
                    if (is_identity(schreier)) continue;
                    std::size_t before_levels = levels_.size();
                    std::size_t before_homed = 0;
                    for (const auto& L : levels_) before_homed += L.homed.size();
                    insert(level + 1, std::move(schreier));
                    std::size_t after_homed = 0;
                    for (const auto& L : levels_) after_homed += L.homed.size();
                    if (after_homed != before_homed || levels_.size() != before_levels) {
                        complete(level + 1);
                        rebuild_orbit(level);
                        dirty = true;
                    }
                }
            }
        }
        if (!dirty) return;
    }
}

StabilizerChain StabilizerChain::build(std::vector<Perm> generators, std::size_t num_points) {
    StabilizerChain c;
    c.n_ = num_points;
    for (Perm& g : generators) {
        if (g.size() != num_points) throw DomainError("generator degree mismatch");
        if (!is_permutation(g)) throw DomainError("generator is not a permutation");
        c.insert(0, std::move(g));
    }
    c.complete(0);
    c.order_ = 1;
    for (const Level& lv : c.levels_) c.order_ *= BigInt(lv.orbit.size());
    return c;
}

bool StabilizerChain::contains(const Perm& p) const {
    if (p.size() != n_) return false;
    Perm g = p;
    for (const Level& lv : levels_) {
        if (is_identity(g)) return true;
        std::uint32_t image = g[lv.base];
        if (lv.position[image] < 0) return false;
        g = compose(inverse_perm(lv.transversal[std::size_t(lv.position[image])]), g);
    }
    return is_identity(g);
}

Perm StabilizerChain::sample(SplitMix64& rng) const {
    Perm g = identity_perm(n_);
    for (const Level& lv : levels_) {
        std::uint64_t pick = rng.below(lv.orbit.size());
        g = compose(g, lv.transversal[std::size_t(pick)]);
    }
    return g;
}

void StabilizerChain::for_each_element(const std::function<void(const Perm&)>& fn) const {
    // Depth-first product over transversals, deepest level first so each
    // element is produced exactly once as u_0 * u_1 * ... * u_k.
    Perm acc = identity_perm(n_);
    auto rec = [&](auto&& self, std::size_t level, const Perm& partial) -> void {
        if (level == levels_.size()) {
            fn(partial);
            return;
        }
        for (const Perm& u : levels_[level].transversal)
            self(self, level + 1, compose(partial, u));
    };
    rec(rec, 0, acc);
}

LevelGroup build_level_group(const Automaton& a, int n, const Budgets& b) {
    std::uint64_t points = 1;
    for (int i = 0; i < n; ++i) {
        points *= std::uint64_t(a.degree());
        if (points > b.max_level_points)
            throw BudgetError("level group exceeds the point budget");
    }
    AutomatonGroup g(a, b);
    std::vector<Perm> gens;
    for (int s = 0; s < a.state_count(); ++s)
        gens.push_back(g.generator(s).level_permutation(n));
    StabilizerChain chain = StabilizerChain::build(gens, std::size_t(points));
    return LevelGroup{n, a.degree(), std::move(gens), std::move(chain)};
}

namespace {

bool has_fixed_point(const Perm& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] == i) return true;
    return false;
}

// Y_i for i = 1..n from the level-n permutation, by block truncation.
std::vector<std::uint64_t> y_vector(const Perm& p, int degree, int n) {
    std::vector<std::uint64_t> ys(std::size_t(n), 0);
    std::uint64_t span = p.size();
    std::uint64_t step = span;
    for (int i = 1; i <= n; ++i) {
        step /= std::uint64_t(degree);
        std::uint64_t count = 0;
        const std::uint64_t blocks = span / step;
        for (std::uint64_t j = 0; j < blocks; ++j)
            if (p[j * step] / step == j) ++count;
        ys[std::size_t(i - 1)] = count;
    }
    return ys;
}

struct WilsonInterval {
    double low, high;
};

WilsonInterval wilson95(std::uint64_t hits, std::uint64_t samples) {
    const double z = 1.959963984540054;
    const double nn = double(samples);
    const double phat = double(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (phat + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace

std::vector<FStatRow> fstat(const Automaton& a, int n_max, const FStatOptions& opt) {
    std::vector<FStatRow> rows;
    for (int n = 1; n <= n_max; ++n) {
        LevelGroup lg = build_level_group(a, n, opt.budgets);
        FStatRow row;
        row.n = n;
        row.order = lg.chain.order();

        const bool can_enumerate = row.order <= BigInt(opt.budgets.enumeration_budget);
        bool exact = false;
        switch (opt.mode) {
            case FStatMode::Exact:
                if (!can_enumerate)
                    throw BudgetError("exact mode requested beyond the enumeration budget");
                exact = true;
                break;
            case FStatMode::Sample:
                exact = false;
                break;
            case FStatMode::Auto:
                exact = can_enumerate;
                break;
        }
        row.exact = exact;

        if (exact) {
            BigInt fixing = 0;
            lg.chain.for_each_element([&](const Perm& p) {
                if (has_fixed_point(p)) ++fixing;
            });
            row.f_exact = BigRat(fixing, row.order);
        } else {
            const std::uint64_t samples =
                opt.samples ? opt.samples : opt.budgets.default_samples;
            const int workers = std::max(1, opt.workers);
            std::vector<std::uint64_t> hits(std::size_t(workers), 0);
            std::vector<std::thread> pool;
            // Disjoint sample blocks per worker; totals are independent of
            // scheduling.
            for (int w = 0; w < workers; ++w) {
                std::uint64_t lo = samples * std::uint64_t(w) / std::uint64_t(workers);
                std::uint64_t hi = samples * std::uint64_t(w + 1) / std::uint64_t(workers);
                pool.emplace_back([&, w, lo, hi] {
                    SplitMix64 rng = SplitMix64::substream(opt.seed ^ std::uint64_t(n), std::uint64_t(w));
                    std::uint64_t h = 0;
                    for (std::uint64_t i = lo; i < hi; ++i)
                        if (has_fixed_point(lg.chain.sample(rng))) ++h;
                    hits[std::size_t(w)] = h;
                });
            }
            for (auto& t : pool) t.join();
            std::uint64_t total = 0;
            for (auto h : hits) total += h;
            row.samples = samples;
            row.f_estimate = double(total) / double(samples);
            auto ci = wilson95(total, samples);
            row.ci_low = ci.low;
            row.ci_high = ci.high;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

FPTable fp_table(const Automaton& a, int n, const Budgets& b) {
    LevelGroup lg = build_level_group(a, n, b);
    if (lg.chain.order() > BigInt(b.enumeration_budget))
        throw BudgetError("group order exceeds the enumeration budget");
    FPTable table;
    table.n = n;
    table.order = lg.chain.order();
    lg.chain.for_each_element([&](const Perm& p) {
        ++table.rows[y_vector(p, a.degree(), n)];
    });
    return table;
}

bool MartingaleReport::all_match() const {
    for (const auto& r : rows)
        if (!r.matches) return false;
    return !rows.empty();
}

MartingaleReport martingale_check(const Automaton& a, int n_max, bool require_transitive,
                                  const Budgets& b) {
    MartingaleReport rep;
    {
        AutomatonGroup g(a, b);
        auto res = g.state_product().spherically_transitive(n_max);
        rep.transitive = res.transitive;
        rep.first_failing_level = res.first_failing_level;
        if (!rep.transitive && require_transitive)
            throw DomainError(
                "the product of the states is not spherically transitive at level " +
                std::to_string(res.first_failing_level));
    }

    for (int n = 2; n <= n_max; ++n) {
        FPTable table = fp_table(a, n, b);
        // Group histories (t_1..t_{n-1}) and average Y_n.
        std::map<std::vector<std::uint64_t>, std::pair<BigInt, BigInt>> classes;  // count, sum
        for (const auto& [ys, mult] : table.rows) {
            std::vector<std::uint64_t> history(ys.begin(), ys.end() - 1);
            auto& [count, sum] = classes[history];
            count += mult;
            sum += mult * BigInt(ys.back());
        }
        for (const auto& [history, cs] : classes) {
            MartingaleReport::Row row;
            row.n = n;
            row.history = history;
            row.class_size = cs.first;
            row.mean = BigRat(cs.second, cs.first);
            row.matches = row.mean == BigRat(BigInt(history.back()), BigInt(1));
            rep.rows.push_back(std::move(row));
        }
    }
    return rep;
}

BigRat dihedral_fraction(const Automaton& a, int transitivity_depth, const Budgets& b) {
    AutomatonGroup g(a, b);
    std::vector<int> nontrivial;
    for (int s = 0; s < a.state_count(); ++s)
        if (!g.generator(s).is_trivial()) nontrivial.push_back(s);
    if (nontrivial.size() != 2)
        throw DomainError("dihedral fraction needs exactly two non-trivial states");
    Element x = g.generator(nontrivial[0]);
    Element y = g.generator(nontrivial[1]);
    if (!x.times(x).is_trivial() || !y.times(y).is_trivial())
        throw DomainError("dihedral fraction needs both states to be involutions");
    if (!x.times(y).spherically_transitive(transitivity_depth).transitive)
        throw DomainError("dihedral fraction needs a spherically transitive product");
    int r = 0;
    for (const Element& e : {x, y})
        if (e.classify_fixed_ends().kind != FixedEnds::Zero) ++r;
    return BigRat(r, 4);
}

}  // namespace autgrp
