#pragma once

// Brute-force generation of all minimal valid membership and equality rules
// for an extensionally given constraint. A condition set paired with a body
// atom is valid when every constraint tuple matching the conditions avoids
// the removed value, and minimal when dropping any condition or enlarging
// any allowed set by one value breaks validity. Atoms sharing a condition
// set are merged into one rule with a compound body.

#include <cstdint>
#include <string>
#include <vector>

#include "proprules/membership.hpp"
#include "proprules/store.hpp"

namespace proprules {

struct ConstraintDef {
    std::string name;
    std::vector<std::string> var_names; // same length as signature
    Signature signature;
    std::vector<std::vector<std::uint32_t>> tuples; // value indices, duplicate-free

    std::size_t arity() const { return signature.size(); }
};

// Checks arity, value ranges, nonempty duplicate-free tuple set, name/var
// counts. Throws std::invalid_argument.
void validate_constraint(const ConstraintDef& def);

enum class RuleKind { equality, membership };

struct GenLimits {
    std::size_t max_arity = 6;
    std::size_t max_universe = 11;
    // Upper bound on the number of condition sets the generator will visit.
    std::uint64_t max_condition_sets = 40'000'000;
};

// True when applying the rule removes no solution: every tuple matching all
// conditions satisfies every body atom.
bool is_valid(const MembershipRule& rule, const ConstraintDef& def);

std::vector<MembershipRule> generate_rules(const ConstraintDef& def, RuleKind kind,
                                           const GenLimits& limits = {},
                                           Exec exec = Exec::parallel);

inline std::vector<MembershipRule> generate_equality_rules(const ConstraintDef& def,
                                                           const GenLimits& limits = {},
                                                           Exec exec = Exec::parallel) {
    return generate_rules(def, RuleKind::equality, limits, exec);
}

inline std::vector<MembershipRule> generate_membership_rules(const ConstraintDef& def,
                                                             const GenLimits& limits = {},
                                                             Exec exec = Exec::parallel) {
    return generate_rules(def, RuleKind::membership, limits, exec);
}

inline MembershipSystem make_system(const ConstraintDef& def, std::vector<MembershipRule> rules) {
    return MembershipSystem(def.signature, std::move(rules));
}

} // namespace proprules
