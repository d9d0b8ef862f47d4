#include "autgrp/wreath.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <mutex>

#include "autgrp/errors.hpp"

namespace autgrp {

namespace {

constexpr char32_t encode(int state, bool inv) {
    return char32_t(std::uint32_t(state) * 2u + (inv ? 1u : 0u));
}
constexpr int letter_state(char32_t c) { return int(std::uint32_t(c) / 2u); }
constexpr bool letter_inv(char32_t c) { return (std::uint32_t(c) & 1u) != 0; }
constexpr char32_t mate(char32_t c) { return c ^ 1u; }

}  // namespace

AutomatonGroup::AutomatonGroup(Automaton a, Budgets budgets)
    : spec_(std::move(a)), budgets_(budgets) {
    inverse_roots_.reserve(std::size_t(spec_.state_count()));
    for (int s = 0; s < spec_.state_count(); ++s)
        inverse_roots_.push_back(inverse_perm(spec_.root_perm(s)));
}

AutomatonGroup::~AutomatonGroup() = default;

int AutomatonGroup::letter_image(SymLetter l, int x) const {
    const Perm& p = l.inv ? inverse_roots_[std::size_t(l.state)] : spec_.root_perm(l.state);
    return int(p[std::size_t(x)]);
}

std::optional<SymLetter> AutomatonGroup::letter_restrict(SymLetter l, int x) const {
    int r;
    if (!l.inv) {
        r = spec_.restriction(l.state, x);
    } else {
        // (s^-1)|_x = (s|_{s^-1(x)})^-1
        int y = int(inverse_roots_[std::size_t(l.state)][std::size_t(x)]);
        r = spec_.restriction(l.state, y);
    }
    if (r == kIdentityState) return std::nullopt;
    return SymLetter{r, l.inv};
}

AutomatonGroup::Key AutomatonGroup::append_reduced(Key w, char32_t letter) {
    if (!w.empty() && w.back() == mate(letter))
        w.pop_back();
    else
        w.push_back(letter);
    return w;
}

AutomatonGroup::Key AutomatonGroup::concat_reduced(const Key& a, const Key& b) {
    Key w = a;
    for (char32_t c : b) w = append_reduced(std::move(w), c);
    return w;
}

AutomatonGroup::Key AutomatonGroup::invert_key(const Key& w) {
    Key r;
    r.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(mate(*it));
    return r;
}

Perm AutomatonGroup::word_root(const Key& w) const {
    Perm acc = identity_perm(std::size_t(degree()));
    // Rightmost factor acts first: acc = root(w[0]) o ... o root(w[k-1]).
    for (std::size_t i = w.size(); i-- > 0;) {
        SymLetter l{letter_state(w[i]), letter_inv(w[i])};
        const Perm& p = l.inv ? inverse_roots_[std::size_t(l.state)] : spec_.root_perm(l.state);
        acc = compose(p, acc);
    }
    return acc;
}

AutomatonGroup::Key AutomatonGroup::restrict_word(const Key& w, int x) const {
    // (f_1 ... f_k)|_x = f_1|_{(f_2...f_k)(x)} ... f_k|_x, identities dropped.
    std::vector<char32_t> parts(w.size(), char32_t(0));
    std::vector<bool> present(w.size(), false);
    int t = x;
    for (std::size_t i = w.size(); i-- > 0;) {
        SymLetter l{letter_state(w[i]), letter_inv(w[i])};
        if (auto r = letter_restrict(l, t)) {
            parts[i] = encode(r->state, r->inv);
            present[i] = true;
        }
        t = letter_image(l, t);
    }
    Key out;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (present[i]) out = append_reduced(std::move(out), parts[i]);
    return out;
}

bool AutomatonGroup::word_trivial(const Key& w) const {
    if (w.empty()) return true;
    {
        std::shared_lock lk(mutex_);
        if (auto it = trivial_memo_.find(w); it != trivial_memo_.end()) return it->second;
    }

    // BFS over the restriction closure; the answer is "trivial" iff every
    // reachable word has the identity first-level action.
    std::unordered_map<Key, int> seen;
    std::vector<Key> nodes;
    std::vector<int> parent;
    std::deque<std::pair<int, int>> queue;  // (node, depth)

    auto mark_nontrivial_chain = [&](int v) {
        std::unique_lock lk(mutex_);
        for (int u = v; u >= 0; u = parent[std::size_t(u)]) trivial_memo_[nodes[std::size_t(u)]] = false;
    };

    seen.emplace(w, 0);
    nodes.push_back(w);
    parent.push_back(-1);
    queue.emplace_back(0, 0);

    while (!queue.empty()) {
        auto [v, depth] = queue.front();
        queue.pop_front();
        const Key key = nodes[std::size_t(v)];

        {
            std::shared_lock lk(mutex_);
            if (auto it = trivial_memo_.find(key); it != trivial_memo_.end()) {
                if (it->second) continue;  // known trivial subtree
                lk.unlock();
                mark_nontrivial_chain(v);
                return false;
            }
        }
        if (!is_identity(word_root(key))) {
            mark_nontrivial_chain(v);
            return false;
        }
        if (depth >= budgets_.max_restriction_depth)
            throw BudgetError("triviality undecided within depth budget");
        for (int x = 0; x < degree(); ++x) {
            Key r = restrict_word(key, x);
            if (r.empty()) continue;
            if (seen.contains(r)) continue;
            if (nodes.size() >= budgets_.max_restrictions)
                throw BudgetError("triviality undecided within restriction budget");
            seen.emplace(r, int(nodes.size()));
            nodes.push_back(std::move(r));
            parent.push_back(v);
            queue.emplace_back(int(nodes.size()) - 1, depth + 1);
        }
    }

    std::unique_lock lk(mutex_);
    for (const auto& k : nodes) trivial_memo_[k] = true;
    return true;
}

bool AutomatonGroup::words_equal(const Key& a, const Key& b) const {
    if (a == b) return true;
    return word_trivial(concat_reduced(a, invert_key(b)));
}

std::shared_ptr<const AutomatonGroup::Closure> AutomatonGroup::closure_of(const Key& w) const {
    {
        std::shared_lock lk(mutex_);
        if (auto it = closure_memo_.find(w); it != closure_memo_.end()) return it->second;
    }
    auto cl = std::make_shared<Closure>();
    std::unordered_map<Key, int> seen;
    std::deque<int> queue;
    auto intern = [&](Key k) {
        if (auto it = seen.find(k); it != seen.end()) return it->second;
        if (cl->keys.size() >= budgets_.max_restrictions)
            throw BudgetError("restriction closure exceeds budget");
        int id = int(cl->keys.size());
        seen.emplace(k, id);
        cl->keys.push_back(std::move(k));
        cl->roots.emplace_back();
        cl->restr.emplace_back();
        queue.push_back(id);
        return id;
    };
    intern(w);
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        Key key = cl->keys[std::size_t(v)];
        cl->roots[std::size_t(v)] = word_root(key);
        std::vector<int> rs(static_cast<std::size_t>(degree()));
        for (int x = 0; x < degree(); ++x) rs[std::size_t(x)] = intern(restrict_word(key, x));
        cl->restr[std::size_t(v)] = std::move(rs);
    }
    std::unique_lock lk(mutex_);
    auto [it, inserted] = closure_memo_.emplace(w, std::move(cl));
    return it->second;
}

Element AutomatonGroup::identity() const { return Element(this, {}); }

Element AutomatonGroup::generator(int state, bool inv) const {
    if (state < 0 || state >= spec_.state_count())
        throw DomainError("generator index out of range");
    return Element(this, Key(1, encode(state, inv)));
}

Element AutomatonGroup::element(std::span<const SymLetter> letters) const {
    Key w;
    for (const SymLetter& l : letters) {
        if (l.state < 0 || l.state >= spec_.state_count())
            throw DomainError("element letter outside the automaton's states");
        w = append_reduced(std::move(w), encode(l.state, l.inv));
    }
    return Element(this, std::move(w));
}

Element AutomatonGroup::state_product() const {
    Key w;
    for (int s = 0; s < spec_.state_count(); ++s) w = append_reduced(std::move(w), encode(s, false));
    return Element(this, std::move(w));
}

Element AutomatonGroup::parse_element(std::string_view expr) const {
    Key w;
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < expr.size() && std::isspace((unsigned char)expr[pos])) ++pos;
    };
    bool expect_term = true;
    for (;;) {
        skip_ws();
        if (pos >= expr.size()) {
            if (expect_term) throw ParseError({0, int(pos) + 1, "expected a factor"});
            break;
        }
        if (!expect_term) {
            if (expr[pos] != '*')
                throw ParseError({0, int(pos) + 1, "expected '*' between factors"});
            ++pos;
            expect_term = true;
            continue;
        }
        std::size_t start = pos;
        while (pos < expr.size() && (std::isalnum((unsigned char)expr[pos]) || expr[pos] == '_'))
            ++pos;
        if (pos == start) throw ParseError({0, int(pos) + 1, "expected a state name"});
        std::string name(expr.substr(start, pos - start));
        int exponent = 1;
        skip_ws();
        if (pos < expr.size() && expr[pos] == '^') {
            ++pos;
            skip_ws();
            std::size_t estart = pos;
            if (pos < expr.size() && (expr[pos] == '-' || expr[pos] == '+')) ++pos;
            while (pos < expr.size() && std::isdigit((unsigned char)expr[pos])) ++pos;
            if (pos == estart || (pos == estart + 1 && !std::isdigit((unsigned char)expr[pos - 1])))
                throw ParseError({0, int(estart) + 1, "expected an integer exponent"});
            exponent = std::stoi(std::string(expr.substr(estart, pos - estart)));
        }
        int s = spec_.find_state(name);
        if (s == -2) throw ParseError({0, int(start) + 1, "unknown state name '" + name + "'"});
        if (s != kIdentityState) {
            char32_t c = encode(s, exponent < 0);
            for (int i = 0; i < std::abs(exponent); ++i) w = append_reduced(std::move(w), c);
        }
        expect_term = false;
    }
    return Element(this, std::move(w));
}

std::vector<SymLetter> Element::letters() const {
    std::vector<SymLetter> out;
    out.reserve(word_.size());
    for (char32_t c : word_) out.push_back({letter_state(c), letter_inv(c)});
    return out;
}

Element Element::times(const Element& rhs) const {
    if (group_ != rhs.group_)
        throw DomainError("cannot multiply elements from different automaton groups");
    return Element(group_, AutomatonGroup::concat_reduced(word_, rhs.word_));
}

Element Element::inverse() const {
    return Element(group_, AutomatonGroup::invert_key(word_));
}

Element Element::power(int k) const {
    Element acc = group_->identity();
    Element base = k < 0 ? inverse() : *this;
    for (int i = 0; i < std::abs(k); ++i) acc = acc.times(base);
    return acc;
}

Word Element::act(const Word& v) const {
    auto cl = group_->closure_of(word_);
    Word out;
    out.reserve(v.size());
    int node = 0;
    for (int x : v) {
        if (x < 0 || x >= group_->degree()) throw DomainError("malformed word in act()");
        out.push_back(int(cl->roots[std::size_t(node)][std::size_t(x)]));
        node = cl->restr[std::size_t(node)][std::size_t(x)];
    }
    return out;
}

Element Element::restrict_at(const Word& v) const {
    std::u32string w = word_;
    for (int x : v) {
        if (x < 0 || x >= group_->degree()) throw DomainError("malformed word in restrict_at()");
        w = group_->restrict_word(w, x);
    }
    return Element(group_, std::move(w));
}

Perm Element::root_perm() const { return group_->word_root(word_); }

bool Element::is_trivial() const { return group_->word_trivial(word_); }

bool Element::equals(const Element& rhs) const {
    if (group_ != rhs.group_)
        throw DomainError("cannot compare elements from different automaton groups");
    return group_->words_equal(word_, rhs.word_);
}

Perm Element::level_permutation(int n) const {
    const int d = group_->degree();
    std::uint64_t points = 1;
    for (int i = 0; i < n; ++i) {
        points *= std::uint64_t(d);
        if (points > group_->budgets().max_level_points)
            throw BudgetError("level permutation exceeds the point budget");
    }
    auto cl = group_->closure_of(word_);
    Perm perm(points);
    // Iterative DFS over the level-n tree; indices are big-endian.
    struct Frame {
        int node;
        std::uint64_t in, out;
        int depth;
    };
    std::vector<Frame> stack{{0, 0, 0, 0}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.depth == n) {
            perm[f.in] = std::uint32_t(f.out);
            continue;
        }
        const Perm& root = cl->roots[std::size_t(f.node)];
        for (int x = d - 1; x >= 0; --x) {
            stack.push_back({cl->restr[std::size_t(f.node)][std::size_t(x)],
                             f.in * std::uint64_t(d) + std::uint64_t(x),
                             f.out * std::uint64_t(d) + std::uint64_t(root[std::size_t(x)]),
                             f.depth + 1});
        }
    }
    return perm;
}

std::uint64_t Element::count_fixed(int n) const {
    if (n < 0) throw DomainError("negative level");
    const int d = group_->degree();
    // Guard against overflow of d^n in the counts.
    std::uint64_t points = 1;
    for (int i = 0; i < n; ++i) {
        if (points > (std::uint64_t(1) << 62) / std::uint64_t(d))
            throw BudgetError("fixed-point count would overflow");
        points *= std::uint64_t(d);
    }
    auto cl = group_->closure_of(word_);
    const std::size_t m = cl->keys.size();
    std::vector<std::uint64_t> cnt(m, 1);  // level 0: the root is fixed
    for (int level = 1; level <= n; ++level) {
        std::vector<std::uint64_t> next(m, 0);
        for (std::size_t u = 0; u < m; ++u) {
            const Perm& root = cl->roots[u];
            std::uint64_t total = 0;
            for (int x = 0; x < d; ++x)
                if (int(root[std::size_t(x)]) == x)
                    total += cnt[std::size_t(cl->restr[u][std::size_t(x)])];
            next[u] = total;
        }
        cnt.swap(next);
    }
    return cnt[0];
}

TransitivityResult Element::spherically_transitive(int depth) const {
    if (depth < 1) throw DomainError("transitivity depth must be at least 1");
    auto cl = group_->closure_of(word_);
    const int d = group_->degree();
    const std::size_t m = cl->keys.size();
    // prod[u] at iteration j: product over X^j in word_index order of the
    // first-level actions of u's restrictions (rightmost factor first).
    std::vector<Perm> prod = cl->roots;
    for (int n = 1; n <= depth; ++n) {
        if (!is_single_n_cycle(prod[0])) return {false, n};
        if (n == depth) break;
        std::vector<Perm> next(m);
        for (std::size_t u = 0; u < m; ++u) {
            Perm acc = identity_perm(std::size_t(d));
            for (int x = 0; x < d; ++x)
                acc = compose(acc, prod[std::size_t(cl->restr[u][std::size_t(x)])]);
            next[u] = std::move(acc);
        }
        prod.swap(next);
    }
    return {true, 0};
}

FixedEnds Element::classify_fixed_ends() const {
    // Vertices: restrictions of this element merged up to semantic equality.
    // Edges: u -> u|_x for each letter x fixed by u.
    std::vector<std::u32string> verts;
    std::unordered_map<std::u32string, int> canon;  // syntactic aliases
    auto vertex_of = [&](const std::u32string& w) {
        if (auto it = canon.find(w); it != canon.end()) return it->second;
        for (int i = 0; i < int(verts.size()); ++i) {
            if (group_->words_equal(verts[std::size_t(i)], w)) {
                canon.emplace(w, i);
                return i;
            }
        }
        if (verts.size() >= group_->budgets().max_restrictions)
            throw BudgetError("fixed-end graph exceeds the restriction budget");
        verts.push_back(w);
        canon.emplace(w, int(verts.size()) - 1);
        return int(verts.size()) - 1;
    };

    struct Edge {
        int to;
        int letter;
    };
    std::vector<std::vector<Edge>> edges;
    int start = vertex_of(word_);
    for (int v = 0; v < int(verts.size()); ++v) {
        edges.resize(verts.size());
        const std::u32string w = verts[std::size_t(v)];
        Perm root = group_->word_root(w);
        for (int x = 0; x < group_->degree(); ++x) {
            if (int(root[std::size_t(x)]) != x) continue;
            int t = vertex_of(group_->restrict_word(w, x));
            edges.resize(verts.size());
            edges[std::size_t(v)].push_back({t, x});
        }
    }
    edges.resize(verts.size());

    const int nv = int(verts.size());
    // Tarjan SCC to find vertices lying on cycles.
    std::vector<int> index(nv, -1), low(nv, 0), comp(nv, -1);
    std::vector<bool> on_stack(nv, false);
    std::vector<int> stack;
    std::vector<std::vector<int>> comps;
    int next_index = 0;
    auto strongconnect = [&](auto&& self, int v) -> void {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
        for (const Edge& e : edges[std::size_t(v)]) {
            if (index[e.to] < 0) {
                self(self, e.to);
                low[v] = std::min(low[v], low[e.to]);
            } else if (on_stack[e.to]) {
                low[v] = std::min(low[v], index[e.to]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<int> members;
            for (;;) {
                int w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = int(comps.size());
                members.push_back(w);
                if (w == v) break;
            }
            comps.push_back(std::move(members));
        }
    };
    for (int v = 0; v < nv; ++v)
        if (index[v] < 0) strongconnect(strongconnect, v);

    std::vector<bool> on_cycle(nv, false);
    for (const auto& members : comps) {
        bool cyclic = members.size() > 1;
        if (!cyclic)
            for (const Edge& e : edges[std::size_t(members[0])])
                if (e.to == members[0]) cyclic = true;
        if (cyclic)
            for (int v : members) on_cycle[v] = true;
    }

    // live: can reach a cycle (reverse reachability from cycle vertices).
    std::vector<std::vector<int>> rev(nv);
    for (int v = 0; v < nv; ++v)
        for (const Edge& e : edges[std::size_t(v)]) rev[std::size_t(e.to)].push_back(v);
    std::vector<bool> live(nv, false);
    std::deque<int> q;
    for (int v = 0; v < nv; ++v)
        if (on_cycle[v]) {
            live[v] = true;
            q.push_back(v);
        }
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int u : rev[std::size_t(v)])
            if (!live[u]) {
                live[u] = true;
                q.push_back(u);
            }
    }

    FixedEnds out{};
    if (!live[start]) {
        out.kind = FixedEnds::Zero;
        return out;
    }

    // Restrict attention to live vertices reachable from the start.
    std::vector<bool> reach(nv, false);
    reach[start] = true;
    q.push_back(start);
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (const Edge& e : edges[std::size_t(v)])
            if (live[e.to] && !reach[e.to]) {
                reach[e.to] = true;
                q.push_back(e.to);
            }
    }

    auto live_degree = [&](int v) {
        int deg = 0;
        for (const Edge& e : edges[std::size_t(v)])
            if (live[e.to]) ++deg;
        return deg;
    };

    for (int v = 0; v < nv; ++v) {
        if (reach[v] && on_cycle[v] && live_degree(v) >= 2) {
            out.kind = FixedEnds::Infinite;
            return out;
        }
    }

    // Finitely many ends: count edge-paths from the start into cycle
    // vertices through the acyclic live part.
    out.kind = FixedEnds::Finite;
    std::vector<std::uint64_t> paths(nv, 0);
    std::vector<bool> done(nv, false);
    auto count_paths = [&](auto&& self, int v) -> std::uint64_t {
        if (done[v]) return paths[v];
        done[v] = true;
        if (on_cycle[v]) return paths[v] = 1;
        std::uint64_t total = 0;
        for (const Edge& e : edges[std::size_t(v)])
            if (live[e.to]) total += self(self, e.to);
        return paths[v] = total;
    };
    out.count = count_paths(count_paths, start);

    // Witness: follow live edges, first-live-edge rule, until a vertex repeats.
    std::vector<int> visited_at(nv, -1);
    Word trail;
    int v = start;
    for (;;) {
        if (visited_at[v] >= 0) {
            int split = visited_at[v];
            out.witness_preperiod.assign(trail.begin(), trail.begin() + split);
            out.witness_period.assign(trail.begin() + split, trail.end());
            break;
        }
        visited_at[v] = int(trail.size());
        bool moved = false;
        for (const Edge& e : edges[std::size_t(v)]) {
            if (live[e.to]) {
                trail.push_back(e.letter);
                v = e.to;
                moved = true;
                break;
            }
        }
        if (!moved) break;  // unreachable for live start
    }
    return out;
}

std::string Element::to_string() const {
    if (word_.empty()) return "1";
    std::string out;
    std::size_t i = 0;
    while (i < word_.size()) {
        std::size_t j = i;
        while (j < word_.size() && word_[j] == word_[i]) ++j;
        int run = int(j - i);
        if (!out.empty()) out += "*";
        out += group_->automaton().state_name(letter_state(word_[i]));
        int exp = letter_inv(word_[i]) ? -run : run;
        if (exp != 1) out += "^" + std::to_string(exp);
        i = j;
    }
    return out;
}

}  // namespace autgrp
