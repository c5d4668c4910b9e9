#pragma once

// Rules B -> G over a powerset lattice ordered by inclusion: when every atom
// of B is present, add all atoms of G. Closure under such rules is proof-rule
// closure over ground atoms; it exercises the generic schedulers on a second
// lattice. The full set A is the greatest element, so is_top reports true
// exactly there.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "proprules/scheduler.hpp"

namespace proprules {

using AtomSet = std::uint64_t; // bitmask over the atom universe

struct SetRule {
    AtomSet premises = 0;   // B; empty for axioms
    AtomSet conclusions = 0; // G

    friend bool operator==(const SetRule&, const SetRule&) = default;
};

class SetRuleSystem {
public:
    using element_type = AtomSet;

    SetRuleSystem(std::size_t atom_count, std::vector<SetRule> rules);

    std::size_t rule_count() const { return rules_.size(); }
    bool holds(std::size_t r, AtomSet e) const { return (rules_[r].premises & ~e) == 0; }
    AtomSet apply_body(std::size_t r, AtomSet e) const { return e | rules_[r].conclusions; }
    bool can_ever_hold_above(std::size_t, AtomSet, DeadRuleCheck) const {
        return true; // every premise set is reachable by growing towards A
    }
    AtomSet witness(std::size_t r) const { return rules_[r].premises; }
    AtomSet bottom() const { return 0; }
    bool is_top(AtomSet e) const { return e == full_; }
    bool leq(AtomSet a, AtomSet b) const { return (a & ~b) == 0; }

    std::size_t atom_count() const { return atom_count_; }
    AtomSet full() const { return full_; }
    const SetRule& rule(std::size_t r) const { return rules_[r]; }

private:
    std::size_t atom_count_;
    AtomSet full_;
    std::vector<SetRule> rules_;
};

// Least superset of `initial` closed under all rules, computed with the
// removing scheduler after friends/obviated precomputation.
AtomSet closure(const SetRuleSystem& sys, AtomSet initial);
AtomSet closure(const CompiledRuleSet<SetRuleSystem>& compiled, AtomSet initial);

// Same closure via plain chaotic iteration.
AtomSet closure_gi(const SetRuleSystem& sys, AtomSet initial);

// Line-oriented text format: one rule per line, "p q -> r s"; atoms are
// identifiers, discovered in order of appearance; an empty left side is an
// axiom; '#' starts a comment.
struct SetRuleFile {
    std::vector<std::string> atoms;
    std::vector<SetRule> rules;
};

SetRuleFile parse_set_rules(std::string_view text);
std::string render_set_rules(const SetRuleFile& file);

} // namespace proprules
