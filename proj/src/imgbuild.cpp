#include "autgrp/imgbuild.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "autgrp/errors.hpp"
#include "autgrp/kneading.hpp"
#include "autgrp/permgeom.hpp"
#include "autgrp/wreath.hpp"

namespace autgrp {

namespace {

std::string sanitize_state_name(const std::string& point) {
    std::string s = "g";
    for (char c : point) {
        if (std::isalnum((unsigned char)c))
            s += c;
        else if (c == '-')
            s += 'm';
        else
            s += '_';
    }
    return s;
}

struct LineCursor {
    std::string_view text;
    std::size_t pos = 0;
    int line;
    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    bool eat(std::string_view tok) {
        skip_ws();
        if (text.substr(pos, tok.size()) == tok) {
            pos += tok.size();
            return true;
        }
        return false;
    }
    std::string_view token() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && !std::isspace((unsigned char)text[pos]) &&
               text[pos] != ',' && text[pos] != ':' && text[pos] != '(' && text[pos] != ')')
            ++pos;
        return text.substr(start, pos - start);
    }
};

}  // namespace

int Portrait::find_point(std::string_view name) const {
    for (int i = 0; i < int(points.size()); ++i)
        if (points[std::size_t(i)] == name) return i;
    return -1;
}

bool Portrait::is_postcritical(int point) const {
    return std::find(postcritical.begin(), postcritical.end(), point) != postcritical.end();
}

Portrait parse_portrait(std::string_view text) {
    Portrait p;
    std::vector<std::string> lines;
    for (std::size_t pos = 0; pos <= text.size();) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(pos));
            break;
        }
        lines.emplace_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }

    struct PendingImage {
        std::string from, to;
        int line;
    };
    struct PendingFiber {
        std::string over;
        std::vector<Portrait::FiberEntry> entries;
        int line;
    };
    std::vector<PendingImage> images;
    std::vector<PendingFiber> fibers;

    for (int li = 0; li < int(lines.size()); ++li) {
        std::string line = lines[std::size_t(li)];
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        LineCursor cur{line, 0, li + 1};
        if (cur.done()) continue;

        if (cur.eat("degree")) {
            if (!cur.eat("=")) throw ParseError({cur.line, 1, "expected '=' after 'degree'"});
            auto num = cur.token();
            p.degree = std::stoi(std::string(num));
            if (p.degree < 2) throw ParseError({cur.line, 1, "degree must be at least 2"});
            continue;
        }
        if (cur.eat("point")) {
            auto from = cur.token();
            if (!cur.eat("->")) throw ParseError({cur.line, 1, "expected '->' in point row"});
            auto to = cur.token();
            if (from.empty() || to.empty())
                throw ParseError({cur.line, 1, "point row needs two names"});
            images.push_back({std::string(from), std::string(to), cur.line});
            continue;
        }
        if (cur.eat("fiber")) {
            auto over = cur.token();
            if (!cur.eat(":")) throw ParseError({cur.line, 1, "expected ':' in fiber row"});
            PendingFiber f{std::string(over), {}, cur.line};
            for (;;) {
                if (!cur.eat("(")) throw ParseError({cur.line, 1, "expected '(' in fiber entry"});
                Portrait::FiberEntry e;
                auto nm = cur.token();
                if (nm != "_") e.point = std::string(nm);
                if (!cur.eat(",")) throw ParseError({cur.line, 1, "expected ',' after entry name"});
                e.multiplicity = std::stoi(std::string(cur.token()));
                if (!cur.eat(","))
                    throw ParseError({cur.line, 1, "expected ',' after multiplicity"});
                auto flag = cur.token();
                if (flag == "pc")
                    e.postcritical = true;
                else if (flag == "npc")
                    e.postcritical = false;
                else
                    throw ParseError({cur.line, 1, "expected 'pc' or 'npc'"});
                if (!cur.eat(")")) throw ParseError({cur.line, 1, "expected ')' in fiber entry"});
                f.entries.push_back(std::move(e));
                if (cur.eat(",")) continue;
                break;
            }
            if (!cur.done()) throw ParseError({cur.line, 1, "trailing input after fiber row"});
            fibers.push_back(std::move(f));
            continue;
        }
        throw ParseError({cur.line, 1, "expected 'degree', 'point', or 'fiber' row"});
    }

    if (p.degree < 2) throw ParseError({1, 1, "missing 'degree = <d>' row"});

    auto intern = [&](const std::string& name) {
        int i = p.find_point(name);
        if (i >= 0) return i;
        p.points.push_back(name);
        p.image.push_back(-1);
        return int(p.points.size()) - 1;
    };
    for (const auto& im : images) {
        int from = intern(im.from), to = intern(im.to);
        if (p.image[std::size_t(from)] >= 0)
            throw ParseError({im.line, 1, "point '" + im.from + "' already has an image"});
        p.image[std::size_t(from)] = to;
    }
    for (const auto& f : fibers) {
        int over = p.find_point(f.over);
        if (over < 0)
            throw ParseError({f.line, 1, "fiber over undeclared point '" + f.over + "'"});
        if (p.is_postcritical(over))
            throw ParseError({f.line, 1, "duplicate fiber for point '" + f.over + "'"});
        p.postcritical.push_back(over);
        p.fiber.push_back(f.entries);
        // Synthesize elided anonymous simple entries.
        int sum = 0;
        for (const auto& e : p.fiber.back()) sum += e.multiplicity;
        while (sum < p.degree) {
            p.fiber.back().push_back({"", 1, false});
            ++sum;
        }
    }
    return p;
}

std::string to_text(const Portrait& p) {
    std::string out = "degree = " + std::to_string(p.degree) + "\n";
    for (std::size_t i = 0; i < p.points.size(); ++i)
        if (p.image[i] >= 0)
            out += "point " + p.points[i] + " -> " + p.points[std::size_t(p.image[i])] + "\n";
    for (std::size_t k = 0; k < p.postcritical.size(); ++k) {
        out += "fiber " + p.points[std::size_t(p.postcritical[k])] + " :";
        for (std::size_t e = 0; e < p.fiber[k].size(); ++e) {
            const auto& en = p.fiber[k][e];
            out += (e ? ", (" : " (");
            out += (en.point.empty() ? "_" : en.point);
            out += ", " + std::to_string(en.multiplicity) + ", ";
            out += en.postcritical ? "pc)" : "npc)";
        }
        out += "\n";
    }
    return out;
}

std::vector<std::string> validate_portrait(const Portrait& p) {
    std::vector<std::string> diags;
    if (p.degree < 2) diags.push_back("degree must be at least 2");
    if (p.postcritical.empty()) diags.push_back("no post-critical points declared");

    // Fiber sums and the critical multiplicity count.
    int crit_weight = 0;
    for (std::size_t k = 0; k < p.postcritical.size(); ++k) {
        int sum = 0;
        for (const auto& e : p.fiber[k]) {
            if (e.multiplicity < 1) diags.push_back("fiber entry with multiplicity < 1");
            sum += e.multiplicity;
            crit_weight += e.multiplicity - 1;
        }
        if (sum != p.degree)
            diags.push_back("fiber over '" + p.points[std::size_t(p.postcritical[k])] +
                            "' sums to " + std::to_string(sum) + ", not the degree");
    }
    if (crit_weight != p.degree - 1)
        diags.push_back("critical multiplicities sum to " + std::to_string(crit_weight) +
                        ", expected degree - 1 = " + std::to_string(p.degree - 1));

    // Entry/image consistency.
    std::set<int> named_entries;
    for (std::size_t k = 0; k < p.postcritical.size(); ++k) {
        int z = p.postcritical[k];
        for (const auto& e : p.fiber[k]) {
            if (e.point.empty()) {
                if (e.postcritical) diags.push_back("anonymous entries cannot be post-critical");
                continue;
            }
            int c = p.find_point(e.point);
            if (c < 0) {
                diags.push_back("fiber entry names undeclared point '" + e.point + "'");
                continue;
            }
            if (!named_entries.insert(c).second)
                diags.push_back("point '" + e.point + "' appears in two fiber entries");
            if (p.image[std::size_t(c)] != z)
                diags.push_back("fiber entry '" + e.point + "' does not map to its fiber base");
            if (e.postcritical != p.is_postcritical(c))
                diags.push_back("entry flag for '" + e.point +
                                "' disagrees with the post-critical set");
        }
    }

    // Forward closure of P and coverage of every P point in its image fiber.
    for (int z : p.postcritical) {
        int fz = p.image[std::size_t(z)];
        if (fz < 0) {
            diags.push_back("post-critical point '" + p.points[std::size_t(z)] +
                            "' has no image");
            continue;
        }
        if (!p.is_postcritical(fz))
            diags.push_back("post-critical set is not forward closed at '" +
                            p.points[std::size_t(z)] + "'");
        if (!named_entries.contains(z))
            diags.push_back("post-critical point '" + p.points[std::size_t(z)] +
                            "' is missing from the fiber over its image");
    }

    // P must equal the forward orbit closure of the critical values.
    std::set<int> orbit;
    for (std::size_t k = 0; k < p.postcritical.size(); ++k) {
        bool has_crit = false;
        for (const auto& e : p.fiber[k]) has_crit |= e.multiplicity >= 2;
        if (has_crit) orbit.insert(p.postcritical[k]);
    }
    bool grew = true;
    while (grew) {
        grew = false;
        for (int z : std::vector<int>(orbit.begin(), orbit.end())) {
            int fz = p.image[std::size_t(z)];
            if (fz >= 0 && orbit.insert(fz).second) grew = true;
        }
    }
    std::set<int> pset(p.postcritical.begin(), p.postcritical.end());
    if (orbit != pset)
        diags.push_back("post-critical set differs from the orbit closure of critical values");

    return diags;
}

namespace {

struct Assignment {
    // Per generator: image table and restriction targets.
    std::vector<Perm> roots;
    std::vector<std::vector<int>> restr;
};

// Lexicographic backtracking over cycle supports, arrangements, and
// restriction positions. Rotations of a cycle give the same permutation, so
// each cycle is anchored at its smallest letter.
class LetterSearch {
public:
    LetterSearch(const Portrait& p) : p_(p), d_(p.degree) {
        for (std::size_t k = 0; k < p_.postcritical.size(); ++k)
            for (std::size_t e = 0; e < p_.fiber[k].size(); ++e) slots_.emplace_back(int(k), int(e));
        asg_.roots.assign(p_.postcritical.size(), identity_perm(std::size_t(d_)));
        asg_.restr.assign(p_.postcritical.size(),
                          std::vector<int>(std::size_t(d_), kIdentityState));
        used_.assign(p_.postcritical.size(), std::vector<bool>(std::size_t(d_), false));
    }

    std::optional<Assignment> run() {
        if (fill(0)) return asg_;
        return std::nullopt;
    }

private:
    bool accept() const {
        PermMultiset t{d_, asg_.roots};
        return is_tree_like(t);
    }

    bool fill(std::size_t slot) {
        if (slot == slots_.size()) return accept();
        auto [k, e] = slots_[slot];
        const auto& entry = p_.fiber[std::size_t(k)][std::size_t(e)];
        const int m = entry.multiplicity;
        auto& used = used_[std::size_t(k)];

        // The cycle is anchored at the smallest free letter of any candidate
        // support; enumerate supports in lexicographic order of their sorted
        // letters, then arrangements of the rest, then the restricted slot.
        std::vector<int> free;
        for (int x = 0; x < d_; ++x)
            if (!used[std::size_t(x)]) free.push_back(x);
        if (int(free.size()) < m) return false;

        std::vector<int> pick(static_cast<std::size_t>(m));
        return choose_support(slot, entry, free, pick, 0, 0);
    }

    bool choose_support(std::size_t slot, const Portrait::FiberEntry& entry,
                        const std::vector<int>& free, std::vector<int>& pick, int depth,
                        std::size_t from) {
        const int m = entry.multiplicity;
        if (depth == m) {
            std::vector<int> arrangement(pick.begin() + 1, pick.end());
            std::sort(arrangement.begin(), arrangement.end());
            do {
                std::vector<int> cycle{pick[0]};
                cycle.insert(cycle.end(), arrangement.begin(), arrangement.end());
                if (place(slot, entry, cycle)) return true;
            } while (std::next_permutation(arrangement.begin(), arrangement.end()));
            return false;
        }
        for (std::size_t i = from; i < free.size(); ++i) {
            pick[std::size_t(depth)] = free[i];
            if (choose_support(slot, entry, free, pick, depth + 1, i + 1)) return true;
        }
        return false;
    }

    bool place(std::size_t slot, const Portrait::FiberEntry& entry,
               const std::vector<int>& cycle) {
        auto [k, e] = slots_[slot];
        (void)e;
        auto& root = asg_.roots[std::size_t(k)];
        auto& restr = asg_.restr[std::size_t(k)];
        auto& used = used_[std::size_t(k)];
        const int m = int(cycle.size());
        for (int i = 0; i < m; ++i) {
            root[std::size_t(cycle[std::size_t(i)])] =
                std::uint32_t(cycle[std::size_t((i + 1) % m)]);
            used[std::size_t(cycle[std::size_t(i)])] = true;
        }
        int target = kIdentityState;
        if (entry.postcritical) {
            int point = p_.find_point(entry.point);
            for (std::size_t g = 0; g < p_.postcritical.size(); ++g)
                if (p_.postcritical[g] == point) target = int(g);
        }
        const int positions = (target == kIdentityState) ? 1 : m;
        for (int pos = 0; pos < positions; ++pos) {
            if (target != kIdentityState) restr[std::size_t(cycle[std::size_t(pos)])] = target;
            if (fill(slot + 1)) return true;
            if (target != kIdentityState)
                restr[std::size_t(cycle[std::size_t(pos)])] = kIdentityState;
        }
        for (int i = 0; i < m; ++i) {
            root[std::size_t(cycle[std::size_t(i)])] = std::uint32_t(cycle[std::size_t(i)]);
            used[std::size_t(cycle[std::size_t(i)])] = false;
        }
        return false;
    }

    const Portrait& p_;
    int d_;
    std::vector<std::pair<int, int>> slots_;  // (generator, entry)
    Assignment asg_;
    std::vector<std::vector<bool>> used_;
};

}  // namespace

Automaton portrait_automaton(const Portrait& p) {
    auto diags = validate_portrait(p);
    if (!diags.empty()) throw DomainError("invalid portrait: " + diags.front());

    LetterSearch search(p);
    auto asg = search.run();
    if (!asg) throw DomainError("portrait admits no kneading realization");

    std::vector<std::string> names;
    std::set<std::string> taken;
    for (int z : p.postcritical) {
        std::string base = sanitize_state_name(p.points[std::size_t(z)]);
        std::string name = base;
        int suffix = 2;
        while (!taken.insert(name).second) name = base + std::to_string(suffix++);
        names.push_back(name);
    }
    Automaton a(Alphabet(p.degree), std::move(names), std::move(asg->roots),
                std::move(asg->restr));

    KneadingReport rep = validate_kneading(a);
    if (!rep.kneading())
        throw DomainError("portrait admits no kneading realization");
    return a;
}

Portrait chebyshev_portrait(int degree, bool negate) {
    if (degree < 2) throw DomainError("chebyshev portraits need degree >= 2");
    if (negate && degree % 2 == 0)
        throw DomainError("the negated chebyshev portrait is only meaningful for odd degrees");
    Portrait p;
    p.degree = degree;
    p.points = {"1", "-1"};
    const int one = 0, mone = 1;
    p.image.assign(2, -1);
    if (degree % 2 == 0) {
        // f(1) = 1, f(-1) = 1.
        p.image[one] = one;
        p.image[mone] = one;
        p.postcritical = {one, mone};
        std::vector<Portrait::FiberEntry> f1{{"1", 1, true}, {"-1", 1, true}};
        for (int i = 0; i < (degree - 2) / 2; ++i) f1.push_back({"", 2, false});
        std::vector<Portrait::FiberEntry> fm1;
        for (int i = 0; i < degree / 2; ++i) fm1.push_back({"", 2, false});
        p.fiber = {f1, fm1};
    } else if (!negate) {
        // f(1) = 1, f(-1) = -1.
        p.image[one] = one;
        p.image[mone] = mone;
        p.postcritical = {one, mone};
        std::vector<Portrait::FiberEntry> f1{{"1", 1, true}};
        std::vector<Portrait::FiberEntry> fm1{{"-1", 1, true}};
        for (int i = 0; i < (degree - 1) / 2; ++i) {
            f1.push_back({"", 2, false});
            fm1.push_back({"", 2, false});
        }
        p.fiber = {f1, fm1};
    } else {
        // f(1) = -1, f(-1) = 1.
        p.image[one] = mone;
        p.image[mone] = one;
        p.postcritical = {one, mone};
        std::vector<Portrait::FiberEntry> f1{{"-1", 1, true}};
        std::vector<Portrait::FiberEntry> fm1{{"1", 1, true}};
        for (int i = 0; i < (degree - 1) / 2; ++i) {
            f1.push_back({"", 2, false});
            fm1.push_back({"", 2, false});
        }
        p.fiber = {f1, fm1};
    }
    return p;
}

Portrait power_portrait(int degree) {
    if (degree < 2) throw DomainError("power portraits need degree >= 2");
    Portrait p;
    p.degree = degree;
    p.points = {"0"};
    p.image = {0};
    p.postcritical = {0};
    p.fiber = {{{"0", degree, true}}};
    return p;
}

Portrait basilica_portrait() {
    Portrait p;
    p.degree = 2;
    p.points = {"-1", "0"};
    p.image = {1, 0};  // f(-1) = 0, f(0) = -1
    p.postcritical = {0, 1};
    p.fiber = {{{"0", 2, true}}, {{"-1", 1, true}, {"", 1, false}}};
    return p;
}

namespace {

bool disjoint_transpositions(const Perm& p) {
    for (std::size_t x = 0; x < p.size(); ++x)
        if (p[p[x]] != std::uint32_t(x)) return false;
    return true;
}

}  // namespace

ExceptionalReport detect_exceptional_shape(const Automaton& a) {
    KneadingReport rep = validate_kneading(a);
    if (!rep.all()) throw DomainError("exceptional-shape detection needs conditions 1-4");

    AutomatonGroup g(a);
    MooreCycles mc = moore_cycle_structure(a);

    // Candidate cycles: all members fix a finite, non-empty set of ends.
    std::vector<std::vector<int>> candidates;
    for (const auto& cyc : mc.cycles) {
        bool all_finite = true;
        for (int s : cyc)
            all_finite &= g.generator(s).classify_fixed_ends().kind == FixedEnds::Finite;
        if (all_finite) candidates.push_back(cyc);
    }

    ExceptionalReport out;
    if (candidates.empty()) return out;

    auto trivial = trivial_states(a);
    auto others_trivial = [&](const std::vector<int>& keep) {
        for (int s = 0; s < a.state_count(); ++s) {
            if (std::find(keep.begin(), keep.end(), s) != keep.end()) continue;
            if (!trivial[std::size_t(s)]) return false;
        }
        return true;
    };
    auto sole_nontrivial_restriction = [&](int s, int at, int target) {
        for (int x = 0; x < a.degree(); ++x) {
            int r = a.restriction(s, x);
            bool expect = (x == at);
            if (expect && r != target) return false;
            if (!expect && r != kIdentityState && !trivial[std::size_t(r)]) return false;
        }
        return true;
    };

    // Involutive two-state pair: each root is a product of disjoint
    // transpositions fixing exactly one letter, where the restriction loops
    // to the partner (2-cycle) or to the state itself (two 1-cycles).
    auto involutive_pair = [&](int s1, int s2, bool crossed) {
        const Perm& p1 = a.root_perm(s1);
        const Perm& p2 = a.root_perm(s2);
        if (!disjoint_transpositions(p1) || !disjoint_transpositions(p2)) return false;
        auto f1 = fixed_points(p1), f2 = fixed_points(p2);
        if (f1.size() != 1 || f2.size() != 1 || f1[0] == f2[0]) return false;
        int t1 = crossed ? s2 : s1;
        int t2 = crossed ? s1 : s2;
        if (!sole_nontrivial_restriction(s1, int(f1[0]), t1)) return false;
        if (!sole_nontrivial_restriction(s2, int(f2[0]), t2)) return false;
        return others_trivial({s1, s2}) && a.degree() % 2 == 1;
    };

    // A 2-cycle in the Moore diagram.
    for (const auto& cyc : candidates) {
        if (cyc.size() < 2) continue;
        if (cyc.size() == 2 && involutive_pair(cyc[0], cyc[1], true)) {
            out.verdict = ExceptionalReport::ChebyshevOdd;
            out.shape_states = {cyc[0], cyc[1]};
        }
        return out;  // longer candidate cycles match nothing
    }

    // Only 1-cycles remain.
    if (candidates.size() == 2 && candidates[0].size() == 1 && candidates[1].size() == 1) {
        int s1 = candidates[0][0], s2 = candidates[1][0];
        if (involutive_pair(s1, s2, false)) {
            out.verdict = ExceptionalReport::ChebyshevOdd;
            out.shape_states = {s1, s2};
        }
        return out;
    }
    if (candidates.size() != 1 || candidates[0].size() != 1) return out;

    const int c = candidates[0][0];
    const Perm& root = a.root_perm(c);
    auto fix = fixed_points(root);
    const int x = mc.cycle_letter[std::size_t(c)];

    if (fix.size() == 2) {
        // c = s(c, a, 1, ..., 1) with a finitary and fixed-point free.
        int y = (int(fix[0]) == x) ? int(fix[1]) : int(fix[0]);
        if (int(fix[0]) != x && int(fix[1]) != x) return out;
        if (!disjoint_transpositions(root)) return out;
        int partner = a.restriction(c, y);
        if (partner == kIdentityState || partner == c || trivial[std::size_t(partner)])
            return out;
        const Perm& proot = a.root_perm(partner);
        if (!disjoint_transpositions(proot) || count_fixed_points(proot) != 0) return out;
        for (int z = 0; z < a.degree(); ++z) {
            int r = a.restriction(partner, z);
            if (r != kIdentityState && !trivial[std::size_t(r)]) return out;
        }
        bool others_ok = true;
        for (int z = 0; z < a.degree(); ++z) {
            if (z == x || z == y) continue;
            int r = a.restriction(c, z);
            if (r != kIdentityState && !trivial[std::size_t(r)]) others_ok = false;
        }
        if (!others_ok || a.restriction(c, x) != c) return out;
        if (!others_trivial({c, partner}) || a.degree() % 2 != 0) return out;
        out.verdict = ExceptionalReport::ChebyshevEven;
        out.shape_states = {c, partner};
        return out;
    }

    if (fix.size() == 1 && int(fix[0]) == x && a.restriction(c, x) == c) {
        out.verdict = ExceptionalReport::SinglePoint;
        out.shape_states = {c};
    }
    return out;
}

std::optional<std::vector<int>> portrait_sigma_hint(const Portrait& p) {
    // Critical points among the named ones: any entry of multiplicity >= 2.
    std::set<int> critical;
    for (const auto& fib : p.fiber)
        for (const auto& e : fib)
            if (e.multiplicity >= 2 && !e.point.empty()) critical.insert(p.find_point(e.point));

    auto admissible = [&](const std::vector<int>& sigma) {
        auto in_sigma = [&](int z) {
            return std::find(sigma.begin(), sigma.end(), z) != sigma.end();
        };
        for (int s : sigma) {
            if (!p.is_postcritical(s)) return false;  // only P fibers are known
            if (critical.contains(s)) return false;
            if (p.image[std::size_t(s)] < 0 || !in_sigma(p.image[std::size_t(s)])) return false;
        }
        for (int z : sigma) {
            std::size_t k = 0;
            while (p.postcritical[k] != z) ++k;
            for (const auto& e : p.fiber[k]) {
                if (e.multiplicity != 1) continue;  // critical preimages are allowed
                if (e.point.empty()) return false;  // an unknown simple preimage escapes
                if (!in_sigma(p.find_point(e.point))) return false;
            }
        }
        return true;
    };

    const int n = int(p.points.size());
    for (int i = 0; i < n; ++i)
        if (admissible({i})) return std::vector<int>{i};
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (admissible({i, j})) return std::vector<int>{i, j};
    return std::nullopt;
}

}  // namespace autgrp
