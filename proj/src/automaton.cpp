#include "autgrp/automaton.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <set>

#include "autgrp/errors.hpp"

namespace autgrp {

namespace {

bool valid_name(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha((unsigned char)s[0]) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum((unsigned char)c) || c == '_')) return false;
    return true;
}

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    int line;
    int col() const { return int(pos) + 1; }

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() const { return pos < text.size() ? text[pos] : '\0'; }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    std::string_view token() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && (std::isalnum((unsigned char)text[pos]) || text[pos] == '_'))
            ++pos;
        return text.substr(start, pos - start);
    }
};

}  // namespace

Automaton::Automaton(Alphabet alphabet, std::vector<std::string> names,
                     std::vector<Perm> root_perms, std::vector<std::vector<int>> restrictions)
    : alphabet_(alphabet),
      names_(std::move(names)),
      root_perms_(std::move(root_perms)),
      restrictions_(std::move(restrictions)) {
    const int d = alphabet_.size();
    const int n = int(names_.size());
    if (int(root_perms_.size()) != n || int(restrictions_.size()) != n)
        throw DomainError("automaton tables disagree with state count");
    std::set<std::string> seen;
    for (const auto& nm : names_) {
        if (nm == "1") throw DomainError("the identity state is implicit and cannot be declared");
        if (!seen.insert(nm).second) throw DomainError("duplicate state name " + nm);
    }
    for (int s = 0; s < n; ++s) {
        if (int(root_perms_[s].size()) != d || !is_permutation(root_perms_[s]))
            throw DomainError("state " + names_[s] + " does not act bijectively on the alphabet");
        if (int(restrictions_[s].size()) != d)
            throw DomainError("state " + names_[s] + " has a restriction list of the wrong size");
        for (int t : restrictions_[s])
            if (t != kIdentityState && (t < 0 || t >= n))
                throw DomainError("state " + names_[s] + " restricts to an unknown state");
    }
}

int Automaton::find_state(std::string_view name) const {
    if (name == "1") return kIdentityState;
    for (int i = 0; i < int(names_.size()); ++i)
        if (names_[i] == name) return i;
    return -2;
}

Automaton parse_automaton(std::string_view text) {
    struct Row {
        int line;
        std::string name;
        std::string perm_text;
        std::vector<std::pair<std::string, int>> restr;  // (name, column)
        int perm_col = 0;
    };

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

    int d = -1;
    int alphabet_line = 0;
    std::vector<Row> rows;

    for (int li = 0; li < int(lines.size()); ++li) {
        std::string line = lines[li];
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        Cursor cur{line, 0, li + 1};
        if (cur.done()) continue;

        if (d < 0) {
            auto kw = cur.token();
            if (kw != "alphabet")
                throw ParseError({cur.line, cur.col(), "expected 'alphabet = <size>' first"});
            if (!cur.eat('='))
                throw ParseError({cur.line, cur.col(), "expected '=' after 'alphabet'"});
            auto num = cur.token();
            if (num.empty() || !std::all_of(num.begin(), num.end(),
                                            [](char c) { return std::isdigit((unsigned char)c); }))
                throw ParseError({cur.line, cur.col(), "expected alphabet size"});
            d = std::stoi(std::string(num));
            if (d < 2)
                throw ParseError({cur.line, 1, "alphabet needs at least two letters"});
            if (!cur.done())
                throw ParseError({cur.line, cur.col(), "trailing input after alphabet size"});
            alphabet_line = cur.line;
            continue;
        }

        Row row;
        row.line = cur.line;
        auto nm = cur.token();
        if (nm.empty())
            throw ParseError({cur.line, cur.col(), "expected state name"});
        row.name = std::string(nm);
        if (row.name != "1" && !valid_name(row.name))
            throw ParseError({cur.line, 1, "invalid state name '" + row.name + "'"});
        if (!cur.eat(':'))
            throw ParseError({cur.line, cur.col(), "expected ':' after state name"});

        cur.skip_ws();
        row.perm_col = cur.col();
        std::size_t perm_start = cur.pos;
        while (cur.pos < cur.text.size() && cur.text[cur.pos] != '[') ++cur.pos;
        row.perm_text = std::string(cur.text.substr(perm_start, cur.pos - perm_start));
        while (!row.perm_text.empty() && (row.perm_text.back() == ' ' || row.perm_text.back() == '\t'))
            row.perm_text.pop_back();

        if (!cur.eat('['))
            throw ParseError({cur.line, cur.col(), "expected '[' before restriction list"});
        for (;;) {
            cur.skip_ws();
            int col = cur.col();
            auto rn = cur.token();
            if (rn.empty())
                throw ParseError({cur.line, col, "expected state name or '1' in restriction list"});
            row.restr.emplace_back(std::string(rn), col);
            if (cur.eat(',')) continue;
            if (cur.eat(']')) break;
            throw ParseError({cur.line, cur.col(), "expected ',' or ']' in restriction list"});
        }
        if (!cur.done())
            throw ParseError({cur.line, cur.col(), "trailing input after restriction list"});
        rows.push_back(std::move(row));
    }

    if (d < 0) throw ParseError({int(lines.size()), 1, "missing 'alphabet = <size>' header"});

    // First pass: collect names so restriction lists may reference later rows.
    std::vector<std::string> names;
    for (const auto& row : rows) {
        if (row.name == "1") continue;
        if (std::find(names.begin(), names.end(), row.name) != names.end())
            throw ParseError({row.line, 1, "duplicate state name '" + row.name + "'"});
        names.push_back(row.name);
    }

    Alphabet alphabet(d);
    std::vector<Perm> perms(names.size());
    std::vector<std::vector<int>> restr(names.size());

    for (const auto& row : rows) {
        Perm p;
        try {
            p = parse_cycles(row.perm_text, std::size_t(d));
        } catch (const ParseError& e) {
            throw ParseError({row.line, row.perm_col + std::max(0, e.diagnostic().column - 1),
                              e.diagnostic().message});
        }
        if (int(row.restr.size()) != d)
            throw ParseError({row.line, 1,
                              "alphabet mismatch: " + std::to_string(row.restr.size()) +
                                  " restrictions for alphabet of size " + std::to_string(d)});
        std::vector<int> rs;
        for (const auto& [rn, col] : row.restr) {
            if (rn == "1") {
                rs.push_back(kIdentityState);
                continue;
            }
            auto it = std::find(names.begin(), names.end(), rn);
            if (it == names.end())
                throw ParseError({row.line, col, "unknown state name '" + rn + "'"});
            rs.push_back(int(it - names.begin()));
        }
        if (row.name == "1") {
            if (!is_identity(p))
                throw ParseError({row.line, row.perm_col,
                                  "a declared identity state must carry the identity permutation"});
            for (std::size_t i = 0; i < rs.size(); ++i)
                if (rs[i] != kIdentityState)
                    throw ParseError({row.line, row.restr[i].second,
                                      "a declared identity state must restrict to the identity"});
            continue;  // fold into the implicit identity
        }
        int idx = int(std::find(names.begin(), names.end(), row.name) - names.begin());
        perms[idx] = std::move(p);
        restr[idx] = std::move(rs);
    }

    (void)alphabet_line;
    return Automaton(alphabet, std::move(names), std::move(perms), std::move(restr));
}

std::string to_dsl(const Automaton& a) {
    std::string out = "alphabet = " + std::to_string(a.degree()) + "\n";
    for (int s = 0; s < a.state_count(); ++s) {
        out += a.state_name(s) + " : " + format_cycles(a.root_perm(s)) + " [";
        for (int x = 0; x < a.degree(); ++x) {
            if (x > 0) out += ", ";
            int t = a.restriction(s, x);
            out += (t == kIdentityState) ? "1" : a.state_name(t);
        }
        out += "]\n";
    }
    return out;
}

Automaton inverse_automaton(const Automaton& a) {
    const int d = a.degree();
    std::vector<std::string> names;
    names.reserve(a.state_count());
    for (int s = 0; s < a.state_count(); ++s) names.push_back(a.state_name(s) + "_inv");
    std::vector<Perm> perms;
    std::vector<std::vector<int>> restr;
    for (int s = 0; s < a.state_count(); ++s) {
        Perm inv = inverse_perm(a.root_perm(s));
        std::vector<int> rs(d);
        for (int x = 0; x < d; ++x) {
            int r = a.restriction(s, int(inv[x]));
            rs[x] = (r == kIdentityState) ? kIdentityState : r;
        }
        perms.push_back(std::move(inv));
        restr.push_back(std::move(rs));
    }
    return Automaton(a.alphabet(), std::move(names), std::move(perms), std::move(restr));
}

std::vector<bool> trivial_states(const Automaton& a) {
    // A state is trivial iff every state reachable from it (by restrictions)
    // has the identity root permutation.
    const int n = a.state_count();
    std::vector<bool> trivial(n, true);
    // Seed: states whose own root action is non-trivial.
    std::deque<int> queue;
    for (int s = 0; s < n; ++s) {
        if (!is_identity(a.root_perm(s))) {
            trivial[s] = false;
            queue.push_back(s);
        }
    }
    // Propagate backwards along restriction edges.
    std::vector<std::vector<int>> preds(n);
    for (int s = 0; s < n; ++s)
        for (int x = 0; x < a.degree(); ++x)
            if (int t = a.restriction(s, x); t != kIdentityState) preds[t].push_back(s);
    while (!queue.empty()) {
        int t = queue.front();
        queue.pop_front();
        for (int s : preds[t]) {
            if (trivial[s]) {
                trivial[s] = false;
                queue.push_back(s);
            }
        }
    }
    return trivial;
}

StateClassification classify_states(const Automaton& a, int depth) {
    if (depth < 1) throw DomainError("classification depth must be at least 1");
    const int n = a.state_count();
    const int d = a.degree();
    auto trivial = trivial_states(a);

    // Adjacency over non-trivial states only.
    std::vector<std::vector<int>> adj(n);
    for (int s = 0; s < n; ++s) {
        if (trivial[s]) continue;
        for (int x = 0; x < d; ++x) {
            int t = a.restriction(s, x);
            if (t != kIdentityState && !trivial[t]) adj[s].push_back(t);
        }
    }

    // Tarjan SCC over the non-trivial sub-diagram.
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0, comp_count = 0;
    std::vector<bool> comp_cyclic;

    auto strongconnect = [&](auto&& self, int v) -> void {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
        for (int w : adj[v]) {
            if (index[w] < 0) {
                self(self, w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<int> members;
            for (;;) {
                int w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = comp_count;
                members.push_back(w);
                if (w == v) break;
            }
            bool cyclic = members.size() > 1;
            if (!cyclic)
                for (int t : adj[v])
                    if (t == v) cyclic = true;
            comp_cyclic.push_back(cyclic);
            ++comp_count;
        }
    };
    for (int s = 0; s < n; ++s)
        if (!trivial[s] && index[s] < 0) strongconnect(strongconnect, s);

    // A cyclic SCC is a simple cycle iff every member has exactly one
    // outgoing edge inside the SCC.
    std::vector<bool> comp_simple_cycle(comp_count, true);
    std::vector<int> internal_out(n, 0);
    for (int s = 0; s < n; ++s) {
        if (trivial[s]) continue;
        for (int t : adj[s])
            if (comp[t] == comp[s]) ++internal_out[s];
    }
    for (int s = 0; s < n; ++s) {
        if (trivial[s]) continue;
        if (comp_cyclic[comp[s]] && internal_out[s] != 1) comp_simple_cycle[comp[s]] = false;
    }

    StateClassification out;
    out.states.resize(n);
    for (int s = 0; s < n; ++s) {
        auto& e = out.states[s];
        if (trivial[s]) {
            e.finitary = e.bounded = true;
            e.q_profile.assign(std::size_t(depth), 0);
            continue;
        }
        // Reachable set from s within the non-trivial sub-diagram.
        std::vector<bool> reach(n, false);
        std::deque<int> q{s};
        reach[s] = true;
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (int w : adj[v])
                if (!reach[w]) {
                    reach[w] = true;
                    q.push_back(w);
                }
        }
        bool any_cycle = false;
        for (int v = 0; v < n; ++v)
            if (reach[v] && !trivial[v] && comp_cyclic[comp[v]]) any_cycle = true;
        e.finitary = !any_cycle;

        // Bounded: every reachable cyclic SCC is a simple cycle and no cyclic
        // SCC reaches a different cyclic SCC.
        bool bounded = true;
        for (int v = 0; v < n && bounded; ++v) {
            if (!reach[v] || trivial[v]) continue;
            if (comp_cyclic[comp[v]] && !comp_simple_cycle[comp[v]]) bounded = false;
        }
        if (bounded && any_cycle) {
            for (int v = 0; v < n && bounded; ++v) {
                if (!reach[v] || trivial[v] || !comp_cyclic[comp[v]]) continue;
                // BFS from v's out-edges leaving its SCC; finding another
                // cyclic SCC breaks boundedness.
                std::vector<bool> seen(n, false);
                std::deque<int> qq;
                for (int w : adj[v])
                    if (comp[w] != comp[v] && !seen[w]) {
                        seen[w] = true;
                        qq.push_back(w);
                    }
                while (!qq.empty() && bounded) {
                    int w = qq.front();
                    qq.pop_front();
                    if (comp_cyclic[comp[w]]) bounded = false;
                    for (int u : adj[w])
                        if (!seen[u]) {
                            seen[u] = true;
                            qq.push_back(u);
                        }
                }
            }
        }
        e.bounded = bounded;

        // Exact q_n via path counting per end state: counts[t] = number of
        // length-k words v with s|_v = t (identity excluded).
        std::vector<std::uint64_t> counts(n, 0);
        counts[s] = 1;
        e.q_profile.resize(std::size_t(depth));
        for (int k = 1; k <= depth; ++k) {
            std::vector<std::uint64_t> next(n, 0);
            for (int v = 0; v < n; ++v) {
                if (!counts[v]) continue;
                for (int x = 0; x < d; ++x) {
                    int t = a.restriction(v, x);
                    if (t != kIdentityState) next[t] += counts[v];
                }
            }
            counts.swap(next);
            std::uint64_t q = 0;
            for (int v = 0; v < n; ++v)
                if (!trivial[v]) q += counts[v];
            e.q_profile[std::size_t(k - 1)] = q;
        }
    }
    return out;
}

std::string moore_dot(const Automaton& a, bool reduced) {
    std::string out = "digraph moore {\n  rankdir=LR;\n";
    for (int s = 0; s < a.state_count(); ++s)
        out += "  \"" + a.state_name(s) + "\" [shape=circle];\n";
    if (!reduced) out += "  \"1\" [shape=doublecircle];\n";
    for (int s = 0; s < a.state_count(); ++s) {
        for (int x = 0; x < a.degree(); ++x) {
            int t = a.restriction(s, x);
            if (reduced && t == kIdentityState) continue;
            std::string target = (t == kIdentityState) ? "1" : a.state_name(t);
            out += "  \"" + a.state_name(s) + "\" -> \"" + target + "\" [label=\"(" +
                   std::to_string(x) + "," + std::to_string(a.root_perm(s)[std::size_t(x)]) +
                   ")\"];\n";
        }
    }
    if (!reduced) {
        for (int x = 0; x < a.degree(); ++x)
            out += "  \"1\" -> \"1\" [label=\"(" + std::to_string(x) + "," + std::to_string(x) +
                   ")\"];\n";
    }
    out += "}\n";
    return out;
}

}  // namespace autgrp
