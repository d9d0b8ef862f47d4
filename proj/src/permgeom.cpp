#include "autgrp/permgeom.hpp"

#include <numeric>

#include "autgrp/errors.hpp"
#include "autgrp/wreath.hpp"

namespace autgrp {

namespace {

// Union-find over white (0..d-1) and black (d..d+k-1) vertices.
struct UnionFind {
    std::vector<int> up;
    explicit UnionFind(std::size_t n) : up(n) { std::iota(up.begin(), up.end(), 0); }
    int find(int x) {
        while (up[std::size_t(x)] != x) x = up[std::size_t(x)] = up[std::size_t(up[std::size_t(x)])];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        up[std::size_t(a)] = b;
        return true;
    }
};

}  // namespace

std::size_t CycleGraph::edge_count() const {
    std::size_t e = 0;
    for (const auto& b : blacks) e += b.points.size();
    return e;
}

int CycleGraph::component_count() const {
    UnionFind uf(vertex_count());
    for (std::size_t bi = 0; bi < blacks.size(); ++bi)
        for (std::uint32_t p : blacks[bi].points) uf.unite(int(std::size_t(domain) + bi), int(p));
    int c = 0;
    for (std::size_t v = 0; v < vertex_count(); ++v)
        if (uf.find(int(v)) == int(v)) ++c;
    return c;
}

bool CycleGraph::is_tree() const {
    return component_count() == 1 && edge_count() == vertex_count() - 1;
}

CycleGraph cycle_graph(const PermMultiset& t) {
    CycleGraph g{t.domain, {}};
    for (std::size_t m = 0; m < t.members.size(); ++m) {
        if (int(t.members[m].size()) != t.domain)
            throw DomainError("multiset member acts on the wrong domain");
        if (!is_permutation(t.members[m]))
            throw DomainError("multiset member is not a permutation");
        for (auto& cyc : nontrivial_cycles(t.members[m]))
            g.blacks.push_back({int(m), std::move(cyc)});
    }
    return g;
}

bool is_tree_like(const PermMultiset& t) { return cycle_graph(t).is_tree(); }

bool treelike_at_level(const Automaton& a, int n) {
    AutomatonGroup g(a);
    std::uint64_t points = 1;
    for (int i = 0; i < n; ++i) points *= std::uint64_t(a.degree());
    PermMultiset t{int(points), {}};
    for (int s = 0; s < a.state_count(); ++s)
        t.members.push_back(g.generator(s).level_permutation(n));
    return is_tree_like(t);
}

TreelikeReport treeperms_report(const PermMultiset& t) {
    if (!is_tree_like(t)) throw DomainError("multiset is not tree-like");
    const std::size_t d = std::size_t(t.domain);

    TreelikeReport rep{};
    for (const auto& p : t.members) rep.total_cells += nontrivial_cycles(p).size();
    rep.cell_bound_ok = rep.total_cells <= d - 1;

    for (std::size_t i = 0; i < t.members.size(); ++i) {
        for (std::size_t j = i + 1; j < t.members.size(); ++j) {
            const Perm& pi = t.members[i];
            const Perm& pj = t.members[j];
            PairEuler pe{};
            pe.i = int(i);
            pe.j = int(j);
            pe.fix_i = count_fixed_points(pi);
            pe.fix_j = count_fixed_points(pj);
            pe.V = d;
            pe.E = (d - pe.fix_i) + (d - pe.fix_j);
            pe.F = nontrivial_cycles(pi).size() + nontrivial_cycles(pj).size() + 1;

            UnionFind uf(d);
            int comps = int(d);
            for (const Perm* p : {&pi, &pj})
                for (const auto& cyc : nontrivial_cycles(*p))
                    for (std::size_t k = 0; k + 1 < cyc.size(); ++k)
                        if (uf.unite(int(cyc[k]), int(cyc[k + 1]))) --comps;
            pe.components = comps;

            pe.euler_identity =
                std::int64_t(pe.V) - std::int64_t(pe.E) + std::int64_t(pe.F) ==
                2 + (std::int64_t(pe.components) - 1);
            pe.fix_sum_ok = pe.fix_i + pe.fix_j >= 2;
            pe.low_sum_isolated = true;
            if (pe.fix_i + pe.fix_j <= 3) {
                for (std::size_t k = 0; k < t.members.size(); ++k)
                    if (k != i && k != j && !is_identity(t.members[k])) pe.low_sum_isolated = false;
            }
            rep.pairs.push_back(pe);
        }
    }
    return rep;
}

bool TreelikeReport::all_ok() const {
    if (!cell_bound_ok) return false;
    for (const auto& p : pairs)
        if (!(p.euler_identity && p.fix_sum_ok && p.low_sum_isolated)) return false;
    return true;
}

std::string cycle_graph_dot(const PermMultiset& t) {
    CycleGraph g = cycle_graph(t);
    std::string out = "graph cycles {\n";
    for (int p = 0; p < g.domain; ++p)
        out += "  \"w" + std::to_string(p) + "\" [shape=circle,label=\"" + std::to_string(p) +
               "\"];\n";
    for (std::size_t b = 0; b < g.blacks.size(); ++b)
        out += "  \"b" + std::to_string(b) + "\" [shape=square,style=filled,label=\"m" +
               std::to_string(g.blacks[b].member) + "\"];\n";
    for (std::size_t b = 0; b < g.blacks.size(); ++b)
        for (std::uint32_t p : g.blacks[b].points)
            out += "  \"b" + std::to_string(b) + "\" -- \"w" + std::to_string(p) + "\";\n";
    out += "}\n";
    return out;
}

}  // namespace autgrp
