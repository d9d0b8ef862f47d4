#include "autgrp/kneading.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "autgrp/errors.hpp"
#include "autgrp/permgeom.hpp"

namespace autgrp {

namespace {

struct CycleData : MooreCycles {
    std::vector<int> cycle_states;  // in state order
    std::vector<int> cycle_id;      // per state, -1 if not in a cycle
};

CycleData moore_cycles(const Automaton& a) {
    // Declared states are taken at face value here: the reduced Moore
    // diagram distinguishes only the implicit identity state.
    const int n = a.state_count();
    std::vector<bool> trivial(std::size_t(n), false);
    CycleData out;
    out.cycle_letter.assign(std::size_t(n), -1);
    out.cycle_id.assign(std::size_t(n), -1);

    // In the reduced diagram each non-trivial state has a unique in-arrow
    // (condition 1), so the non-trivial part is cycles with trees hanging
    // off. A state is in a cycle iff it is reachable from itself.
    for (int s = 0; s < n; ++s) {
        if (trivial[s]) continue;
        std::vector<bool> seen(std::size_t(n), false);
        std::deque<int> q{s};
        bool back = false;
        while (!q.empty() && !back) {
            int v = q.front();
            q.pop_front();
            for (int x = 0; x < a.degree(); ++x) {
                int t = a.restriction(v, x);
                if (t == kIdentityState || trivial[t]) continue;
                if (t == s) {
                    back = true;
                    break;
                }
                if (!seen[std::size_t(t)]) {
                    seen[std::size_t(t)] = true;
                    q.push_back(t);
                }
            }
        }
        if (back) out.cycle_states.push_back(s);
    }

    std::set<int> in_cycle(out.cycle_states.begin(), out.cycle_states.end());
    for (int s : out.cycle_states) {
        for (int x = 0; x < a.degree(); ++x) {
            int t = a.restriction(s, x);
            if (t != kIdentityState && in_cycle.contains(t)) {
                // Unique by condition 1: only one arrow enters each cycle
                // member, so a cycle state has exactly one arrow into its
                // own cycle.
                std::vector<bool> seen(std::size_t(a.state_count()), false);
                std::deque<int> q{t};
                seen[std::size_t(t)] = true;
                bool reaches_back = (t == s);
                while (!q.empty() && !reaches_back) {
                    int v = q.front();
                    q.pop_front();
                    for (int y = 0; y < a.degree(); ++y) {
                        int u = a.restriction(v, y);
                        if (u == kIdentityState || !in_cycle.contains(u)) continue;
                        if (u == s) {
                            reaches_back = true;
                            break;
                        }
                        if (!seen[std::size_t(u)]) {
                            seen[std::size_t(u)] = true;
                            q.push_back(u);
                        }
                    }
                }
                if (reaches_back) {
                    out.cycle_letter[std::size_t(s)] = x;
                    break;
                }
            }
        }
    }

    // Group cycle states into their cycles.
    int next_id = 0;
    for (int s : out.cycle_states) {
        if (out.cycle_id[std::size_t(s)] >= 0) continue;
        std::vector<int> members;
        int v = s;
        while (out.cycle_id[std::size_t(v)] < 0) {
            out.cycle_id[std::size_t(v)] = next_id;
            members.push_back(v);
            v = a.restriction(v, out.cycle_letter[std::size_t(v)]);
        }
        out.cycles.push_back(std::move(members));
        ++next_id;
    }
    return out;
}

int minimal_period(const Word& block) {
    const int n = int(block.size());
    for (int p = 1; p <= n; ++p) {
        if (n % p != 0) continue;
        bool ok = true;
        for (int i = p; i < n && ok; ++i)
            if (block[std::size_t(i)] != block[std::size_t(i - p)]) ok = false;
        if (ok) return p;
    }
    return n;
}

}  // namespace

Word KneadingSequence::prefix(int n) const {
    Word w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[std::size_t(i)] = repeating_block[std::size_t(i % period())];
    return w;
}

namespace {

// Conditions 1-3 only; condition 4 needs the kneading graph, which itself
// requires 1-2, so it is layered on top in validate_kneading.
KneadingReport validate_structural(const Automaton& a) {
    KneadingReport rep;
    // Conditions speak about declared states; only the implicit identity
    // counts as the trivial state.
    std::vector<bool> trivial(std::size_t(a.state_count()), false);

    // Condition 1: unique arrow into every non-trivial state.
    rep.unique_in_arrows = true;
    std::vector<int> in_arrows(std::size_t(a.state_count()), 0);
    for (int s = 0; s < a.state_count(); ++s)
        for (int x = 0; x < a.degree(); ++x)
            if (int t = a.restriction(s, x); t != kIdentityState) ++in_arrows[std::size_t(t)];
    for (int s = 0; s < a.state_count(); ++s) {
        if (trivial[s]) continue;
        if (in_arrows[std::size_t(s)] != 1) {
            rep.unique_in_arrows = false;
            if (!rep.in_arrow_witness)
                rep.in_arrow_witness = KneadingReport::InArrowViolation{s, in_arrows[std::size_t(s)]};
        }
    }

    // Condition 2: within each cycle of each root action, at most one
    // non-trivial restriction.
    rep.cycle_restrictions = true;
    for (int s = 0; s < a.state_count(); ++s) {
        std::vector<bool> visited(std::size_t(a.degree()), false);
        for (int x0 = 0; x0 < a.degree(); ++x0) {
            if (visited[std::size_t(x0)]) continue;
            std::vector<std::uint32_t> cyc;
            int x = x0;
            do {
                visited[std::size_t(x)] = true;
                cyc.push_back(std::uint32_t(x));
                x = int(a.root_perm(s)[std::size_t(x)]);
            } while (x != x0);
            int first = -1;
            for (std::uint32_t y : cyc) {
                int t = a.restriction(s, int(y));
                if (t != kIdentityState && !trivial[t]) {
                    if (first < 0) {
                        first = int(y);
                    } else {
                        rep.cycle_restrictions = false;
                        if (!rep.cycle_witness)
                            rep.cycle_witness =
                                KneadingReport::CycleViolation{s, cyc, first, int(y)};
                    }
                }
            }
        }
    }

    // Condition 3: tree-likeness of the first-level actions.
    {
        PermMultiset t{a.degree(), {}};
        for (int s = 0; s < a.state_count(); ++s) t.members.push_back(a.root_perm(s));
        rep.tree_like = is_tree_like(t);
    }
    return rep;
}

}  // namespace

KneadingReport validate_kneading(const Automaton& a) {
    KneadingReport rep = validate_structural(a);

    // Condition 4 via the kneading graph: no component may contain loops
    // labeled by two distinct underlying states. Loops labeled by a state
    // and its own inverse sit at one vertex and count once.
    rep.single_loop_components = true;
    if (rep.unique_in_arrows && rep.cycle_restrictions) {
        KneadingGraph g = build_kneading_graph(a);
        auto comp = g.vertex_component();
        std::map<std::pair<int, int>, int> loop_state_seen;  // (component, state) -> vertex
        for (const auto& e : g.edges) {
            if (e.from != e.to) continue;
            int c = comp[std::size_t(e.from)];
            for (const auto& [key, vert] : loop_state_seen) {
                if (key.first == c && key.second != e.label.state) {
                    rep.single_loop_components = false;
                    if (!rep.component_witness) {
                        Alphabet al(a.degree());
                        rep.component_witness = KneadingReport::ComponentViolation{
                            format_word(g.vertices[std::size_t(vert)], al),
                            format_word(g.vertices[std::size_t(e.from)], al), key.second,
                            e.label.state};
                    }
                }
            }
            loop_state_seen.emplace(std::make_pair(c, e.label.state), e.from);
        }
    }
    return rep;
}

std::vector<KneadingSequence> kneading_sequences(const Automaton& a) {
    KneadingReport rep = validate_structural(a);
    if (!rep.unique_in_arrows || !rep.cycle_restrictions)
        throw DomainError("kneading sequences need conditions 1 and 2");

    CycleData cd = moore_cycles(a);
    AutomatonGroup g(a);
    std::vector<KneadingSequence> out;
    for (int s : cd.cycle_states) {
        // Letters read while following the cycle from s; the sequence is
        // purely periodic with period dividing the cycle length.
        Word block;
        int v = s;
        do {
            block.push_back(cd.cycle_letter[std::size_t(v)]);
            v = a.restriction(v, cd.cycle_letter[std::size_t(v)]);
        } while (v != s);
        const int cycle_len = int(block.size());
        int p = minimal_period(block);
        Word minimal(block.begin(), block.begin() + p);
        out.push_back({SymLetter{s, false}, minimal});

        // The inverse's sequence is the image of the state's sequence. The
        // image is periodic with period dividing the full cycle length (the
        // restriction returns to s only after a full loop), so act on one
        // cycle-length block before minimizing.
        Element es = g.generator(s);
        Word image = es.act(block);
        int pi = minimal_period(image);
        image.resize(std::size_t(pi));
        out.push_back({SymLetter{s, true}, image});
        (void)cycle_len;
    }
    return out;
}

int KneadingGraph::find_vertex(const Word& w) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), w);
    if (it != vertices.end() && *it == w) return int(it - vertices.begin());
    return -1;
}

std::vector<int> KneadingGraph::vertex_component() const {
    std::vector<int> comp(vertices.size());
    std::iota(comp.begin(), comp.end(), 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : edges) {
            int lo = std::min(comp[std::size_t(e.from)], comp[std::size_t(e.to)]);
            if (comp[std::size_t(e.from)] != lo || comp[std::size_t(e.to)] != lo) {
                comp[std::size_t(e.from)] = comp[std::size_t(e.to)] = lo;
                changed = true;
            }
        }
    }
    return comp;
}

KneadingGraph build_kneading_graph(const Automaton& a) {
    auto seqs = kneading_sequences(a);
    KneadingGraph g;
    if (seqs.empty()) return g;

    int m = 1;
    for (const auto& ks : seqs) m = int(std::lcm(m, ks.period()));
    g.period_m = m;

    std::set<Word> verts;
    for (const auto& ks : seqs) verts.insert(ks.prefix(m));
    g.vertices.assign(verts.begin(), verts.end());

    AutomatonGroup grp(a);
    for (const auto& ks : seqs) {
        Word from = ks.prefix(m);
        Element e = grp.generator(ks.who.state, ks.who.inv);
        Word to = e.act(from);
        g.edges.push_back({g.find_vertex(from), g.find_vertex(to), ks.who});
    }
    return g;
}

std::string kneading_graph_dot(const KneadingGraph& g, const Automaton& a) {
    Alphabet al(a.degree());
    std::string out = "digraph kneading {\n";
    for (const auto& v : g.vertices)
        out += "  \"" + format_word(v, al) + "\" [shape=ellipse];\n";
    // The inverse-labeled edges mirror the state-labeled ones; render each
    // pair once.
    for (const auto& e : g.edges) {
        if (e.label.inv) continue;
        out += "  \"" + format_word(g.vertices[std::size_t(e.from)], al) + "\" -> \"" +
               format_word(g.vertices[std::size_t(e.to)], al) + "\" [label=\"" +
               a.state_name(e.label.state) + "\"];\n";
    }
    out += "}\n";
    return out;
}

StableSets stable_sets(const AutomatonGroup& g) {
    const Automaton& a = g.automaton();
    KneadingReport rep = validate_kneading(a);
    if (!rep.kneading()) throw DomainError("stable sets need kneading conditions 1-3");

    KneadingGraph kg = build_kneading_graph(a);
    StableSets out;
    out.n0.push_back(g.identity());
    out.n1.push_back(g.identity());
    out.n1_start_vertex.push_back(-1);

    // Outgoing steps per vertex: applying any cycle state or inverse whose
    // kneading sequence is that vertex.
    std::vector<std::vector<const KneadingGraph::Edge*>> steps(kg.vertices.size());
    for (const auto& e : kg.edges) steps[std::size_t(e.from)].push_back(&e);

    auto find_equal = [&](const std::vector<Element>& pool, const Element& e) {
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (pool[i].equals(e)) return int(i);
        return -1;
    };

    std::size_t total_candidates = 0;
    for (int start = 0; start < int(kg.vertices.size()); ++start) {
        // BFS over (vertex, element) pairs reachable from (start, 1).
        std::vector<std::vector<Element>> at(kg.vertices.size());
        std::deque<std::pair<int, Element>> queue;
        at[std::size_t(start)].push_back(g.identity());
        queue.emplace_back(start, g.identity());
        while (!queue.empty()) {
            auto [v, elem] = queue.front();
            queue.pop_front();
            for (const auto* e : steps[std::size_t(v)]) {
                Element next = g.generator(e->label.state, e->label.inv).times(elem);
                if (find_equal(at[std::size_t(e->to)], next) >= 0) continue;
                if (++total_candidates > g.budgets().stable_set_cap)
                    throw BudgetError("not confirmed contracting within budget");
                at[std::size_t(e->to)].push_back(next);
                queue.emplace_back(e->to, next);
                if (find_equal(out.n0, next) < 0) out.n0.push_back(next);
                if (e->to == start && find_equal(out.n1, next) < 0) {
                    out.n1.push_back(next);
                    out.n1_start_vertex.push_back(start);
                }
            }
        }
    }

    // Nucleus: restriction closure of N0.
    out.nucleus = out.n0;
    std::deque<Element> work(out.n0.begin(), out.n0.end());
    while (!work.empty()) {
        Element e = work.front();
        work.pop_front();
        for (int x = 0; x < g.degree(); ++x) {
            Element r = e.restrict_at({x});
            if (find_equal(out.nucleus, r) < 0) {
                if (out.nucleus.size() > g.budgets().stable_set_cap)
                    throw BudgetError("nucleus closure exceeded the stable-set budget");
                out.nucleus.push_back(r);
                work.push_back(r);
            }
        }
    }
    return out;
}

bool N1Structure::all_decomposed() const {
    for (const auto& e : entries)
        if (!e.decomposed) return false;
    return true;
}

N1Structure n1_structure(const AutomatonGroup& g) {
    const Automaton& a = g.automaton();
    KneadingReport rep = validate_kneading(a);
    if (!rep.all()) throw DomainError("N1 structure needs conditions 1-4");

    KneadingGraph kg = build_kneading_graph(a);
    StableSets ss = stable_sets(g);
    N1Structure out;

    // All cycles must be loops. A state and its inverse label mirrored
    // edges on the same vertex pair, so cycles live in the underlying
    // undirected graph with one edge per state: after dropping loops every
    // component must be a tree.
    {
        auto comp_ids = kg.vertex_component();
        std::vector<std::size_t> comp_vertices(kg.vertices.size(), 0);
        std::vector<std::size_t> comp_edges(kg.vertices.size(), 0);
        for (std::size_t v = 0; v < kg.vertices.size(); ++v)
            ++comp_vertices[std::size_t(comp_ids[v])];
        for (const auto& e : kg.edges) {
            if (e.label.inv || e.from == e.to) continue;
            ++comp_edges[std::size_t(comp_ids[std::size_t(e.from)])];
        }
        for (std::size_t c = 0; c < kg.vertices.size(); ++c)
            if (comp_vertices[c] > 0 && comp_edges[c] != comp_vertices[c] - 1)
                out.all_cycles_are_loops = false;
    }
    out.components_single_loop = rep.single_loop_components;

    // Loop vertex and label per component.
    auto comp = kg.vertex_component();
    std::map<int, const KneadingGraph::Edge*> loop_of_component;
    for (const auto& e : kg.edges)
        if (e.from == e.to) loop_of_component.emplace(comp[std::size_t(e.from)], &e);

    // Undirected adjacency for conjugator paths: traversing an edge forwards
    // reads its label, backwards the inverse.
    struct Step {
        int to;
        SymLetter read;
    };
    std::vector<std::vector<Step>> undirected(kg.vertices.size());
    for (const auto& e : kg.edges) {
        undirected[std::size_t(e.from)].push_back({e.to, e.label});
        undirected[std::size_t(e.to)].push_back({e.from, {e.label.state, !e.label.inv}});
    }

    for (std::size_t i = 0; i < ss.n1.size(); ++i) {
        const Element& elem = ss.n1[i];
        if (elem.is_trivial()) continue;
        N1Structure::Entry entry{elem, -1, 0, g.identity(), false};

        int start = ss.n1_start_vertex[i];
        auto it = loop_of_component.find(comp[std::size_t(start)]);
        if (it != loop_of_component.end()) {
            const auto* loop = it->second;
            entry.loop_state = loop->label.state;
            // Shortest undirected path start -> loop vertex, assembling the
            // element read along the way (later steps multiply on the left).
            std::vector<int> prev(kg.vertices.size(), -1);
            std::vector<SymLetter> how(kg.vertices.size(), SymLetter{0, false});
            std::deque<int> q{start};
            std::vector<bool> seen(kg.vertices.size(), false);
            seen[std::size_t(start)] = true;
            while (!q.empty()) {
                int v = q.front();
                q.pop_front();
                for (const auto& st : undirected[std::size_t(v)]) {
                    if (seen[std::size_t(st.to)]) continue;
                    seen[std::size_t(st.to)] = true;
                    prev[std::size_t(st.to)] = v;
                    how[std::size_t(st.to)] = st.read;
                    q.push_back(st.to);
                }
            }
            Element h = g.identity();
            if (seen[std::size_t(loop->from)]) {
                std::vector<SymLetter> reads;
                for (int v = loop->from; v != start; v = prev[std::size_t(v)])
                    reads.push_back(how[std::size_t(v)]);
                // reads are collected end-to-start, i.e. leftmost factor first.
                for (const auto& l : reads) h = h.times(g.generator(l.state, l.inv));
            }
            Element base = g.generator(entry.loop_state);
            const int bound = int(ss.n0.size()) + 1;
            for (int step = 1; step <= 2 * bound && !entry.decomposed; ++step) {
                int k = (step % 2 == 1) ? (step + 1) / 2 : -(step / 2);
                Element cand = h.inverse().times(base.power(k)).times(h);
                if (cand.equals(elem)) {
                    entry.exponent = k;
                    entry.conjugator = h;
                    entry.decomposed = true;
                }
            }
        }
        out.entries.push_back(entry);
    }
    return out;
}

MooreCycles moore_cycle_structure(const Automaton& a) {
    CycleData cd = moore_cycles(a);
    return {std::move(cd.cycle_letter), std::move(cd.cycles)};
}

}  // namespace autgrp
