#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "autgrp/automaton.hpp"
#include "autgrp/config.hpp"
#include "autgrp/permutil.hpp"
#include "autgrp/words.hpp"

namespace autgrp {

// One factor of a word: a state or its formal inverse.
struct SymLetter {
    int state;
    bool inv;
    friend bool operator==(const SymLetter&, const SymLetter&) = default;
};

class Element;

// Classification of the set of tree ends fixed by an element.
struct FixedEnds {
    enum Kind { Zero, Finite, Infinite } kind;
    std::uint64_t count = 0;  // meaningful for Finite
    // For Finite: one witnessed fixed end, eventually periodic.
    Word witness_preperiod;
    Word witness_period;
};

struct TransitivityResult {
    bool transitive;
    int first_failing_level = 0;  // when !transitive
};

// Evaluation context for words over an automaton's states and their
// inverses: exact products, restrictions, tree actions, and a sound,
// budget-guarded triviality decision. Caches are shared by all elements and
// guarded for concurrent reads; results do not depend on interleaving.
// Elements must not outlive their group.
class AutomatonGroup {
public:
    explicit AutomatonGroup(Automaton a, Budgets budgets = {});
    ~AutomatonGroup();
    AutomatonGroup(const AutomatonGroup&) = delete;
    AutomatonGroup& operator=(const AutomatonGroup&) = delete;

    const Automaton& automaton() const { return spec_; }
    const Budgets& budgets() const { return budgets_; }
    int degree() const { return spec_.degree(); }

    Element identity() const;
    Element generator(int state, bool inv = false) const;
    Element element(std::span<const SymLetter> letters) const;
    // Product of all states in declaration order (leftmost applied last).
    Element state_product() const;

    // CLI expression grammar: expr := term ("*" term)*; term := NAME ("^" INT)?.
    // "1" denotes the identity.
    Element parse_element(std::string_view expr) const;

    // Action of a single factor on one letter, and its restriction there.
    int letter_image(SymLetter l, int x) const;
    std::optional<SymLetter> letter_restrict(SymLetter l, int x) const;

private:
    friend class Element;
    using Key = std::u32string;

    // Interned restriction closure of one word: node 0 is the word itself,
    // every node carries its first-level action and the node reached by
    // restricting at each letter.
    struct Closure {
        std::vector<Perm> roots;
        std::vector<std::vector<int>> restr;
        std::vector<Key> keys;
    };

    static Key append_reduced(Key w, char32_t letter);
    static Key concat_reduced(const Key& a, const Key& b);
    static Key invert_key(const Key& w);

    Perm word_root(const Key& w) const;
    Key restrict_word(const Key& w, int x) const;
    bool word_trivial(const Key& w) const;
    bool words_equal(const Key& a, const Key& b) const;
    std::shared_ptr<const Closure> closure_of(const Key& w) const;

    Automaton spec_;
    Budgets budgets_;
    std::vector<Perm> inverse_roots_;

    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<Key, bool> trivial_memo_;
    mutable std::unordered_map<Key, std::shared_ptr<const Closure>> closure_memo_;
};

// A tree automorphism given as a word in automaton states and formal
// inverses. Words are kept freely reduced with identity factors dropped;
// the empty word is the identity. Value type; cheap to copy.
class Element {
public:
    const AutomatonGroup& group() const { return *group_; }
    std::vector<SymLetter> letters() const;
    std::size_t length() const { return word_.size(); }
    bool is_identity_word() const { return word_.empty(); }

    Element times(const Element& rhs) const;  // this applied last
    Element inverse() const;
    Element power(int k) const;

    // Image of a word under the action; prefixes map to prefixes.
    Word act(const Word& v) const;
    // Restriction at v, transported to the root. Never longer than *this.
    Element restrict_at(const Word& v) const;
    // Action on the first level.
    Perm root_perm() const;

    // Sound and complete over the finite restriction closure; raises
    // BudgetError when the closure exceeds the configured caps.
    bool is_trivial() const;
    bool equals(const Element& rhs) const;

    // Action on X^n materialized in word_index order.
    Perm level_permutation(int n) const;
    // Number of fixed length-n words; descends only under fixed prefixes.
    std::uint64_t count_fixed(int n) const;

    // Exact classification of the fixed ends via the graph of restrictions
    // along fixed letters.
    FixedEnds classify_fixed_ends() const;

    // Checks levels 1..depth of the d-cycle criterion on the per-level
    // products of first-level actions, taken in word_index order.
    TransitivityResult spherically_transitive(int depth) const;

    std::string to_string() const;  // parse_element round-trips it

    friend class AutomatonGroup;

private:
    Element(const AutomatonGroup* g, std::u32string w) : group_(g), word_(std::move(w)) {}
    const AutomatonGroup* group_;
    std::u32string word_;
};

}  // namespace autgrp
