#pragma once

// Membership rules over finite-domain stores:
//
//     y1 in S1, ..., yk in Sk  ->  z1 != a1, ..., zm != am
//
// The condition holds when every yi's current domain is included in Si (and
// always at Top); the body removes each ai from zi's domain in turn. Every
// membership rule has a monotonic, precise condition and a stable body, so
// the generic schedulers apply.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "proprules/scheduler.hpp"
#include "proprules/store.hpp"

namespace proprules {

struct Condition {
    std::uint32_t var;
    DomainSet allowed;

    friend bool operator==(const Condition&, const Condition&) = default;
};

struct BodyAtom {
    std::uint32_t var;
    std::uint32_t value;

    friend bool operator==(const BodyAtom&, const BodyAtom&) = default;
};

class MembershipRule {
public:
    // Conditions are stored sorted by variable; variables must be pairwise
    // distinct and every allowed set nonempty. The body must be nonempty;
    // duplicate atoms are dropped. Body variables may repeat and may overlap
    // condition variables.
    MembershipRule(std::vector<Condition> conditions, std::vector<BodyAtom> body);

    std::span<const Condition> conditions() const { return conditions_; }
    std::span<const BodyAtom> body() const { return body_; }
    bool is_equality() const; // every allowed set is a singleton

    friend bool operator==(const MembershipRule&, const MembershipRule&) = default;

private:
    std::vector<Condition> conditions_;
    std::vector<BodyAtom> body_;
};

// Copy with the body atoms sorted; use for order-insensitive comparisons.
MembershipRule normalized(const MembershipRule& rule);

// Checks variable indices and allowed sets against a signature.
void validate_rule(const MembershipRule& rule, const Signature& sig);

bool holds(const MembershipRule& rule, const Store& s);

// Strict reading for equality rules: each condition variable's domain equals
// its singleton set. Coincides with the inclusion reading on non-Top stores.
bool holds_under_equality(const MembershipRule& rule, const Store& s);

// Rule application: the body folded over the store when the condition holds,
// the store unchanged otherwise.
Store apply(const MembershipRule& rule, const Store& s);

// The body alone, applied unconditionally.
Store apply_body(const MembershipRule& rule, const Store& s);

// The least store satisfying the condition: allowed sets at the condition
// variables, full universes elsewhere.
Store witness(const MembershipRule& rule, const Signature& sig);

// False only when some condition is already unsatisfiable at every non-Top
// store above s (empty intersection of current domain and allowed set). The
// singleton_only mode runs the intersection test just for variables whose
// domain is a singleton and keeps the rule otherwise. s must not be Top.
bool can_ever_hold_above(const MembershipRule& rule, const Store& s, DeadRuleCheck mode);

// Membership rules bundled with their signature; the RuleSystem the generic
// schedulers run on.
class MembershipSystem {
public:
    using element_type = Store;

    MembershipSystem(Signature sig, std::vector<MembershipRule> rules);

    std::size_t rule_count() const { return rules_.size(); }
    bool holds(std::size_t r, const Store& s) const { return proprules::holds(rules_[r], s); }
    Store apply_body(std::size_t r, const Store& s) const {
        return proprules::apply_body(rules_[r], s);
    }
    bool can_ever_hold_above(std::size_t r, const Store& s, DeadRuleCheck mode) const {
        return proprules::can_ever_hold_above(rules_[r], s, mode);
    }
    Store witness(std::size_t r) const { return proprules::witness(rules_[r], sig_); }
    Store bottom() const { return store_bottom(sig_); }
    bool is_top(const Store& s) const { return s.is_top(); }
    bool leq(const Store& a, const Store& b) const { return store_leq(a, b); }

    const Signature& signature() const { return sig_; }
    const MembershipRule& rule(std::size_t r) const { return rules_[r]; }
    std::span<const MembershipRule> rules() const { return rules_; }

private:
    Signature sig_;
    std::vector<MembershipRule> rules_;
};

// Exhaustively confirms the prop-rule properties of a membership rule over
// the full store carrier of the signature.
PropRuleReport verify_prop_rule(const MembershipRule& rule, const Signature& sig);

} // namespace proprules
