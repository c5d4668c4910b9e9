#include "proprules/membership.hpp"

#include <algorithm>
#include <stdexcept>

namespace proprules {

MembershipRule::MembershipRule(std::vector<Condition> conditions, std::vector<BodyAtom> body)
    : conditions_(std::move(conditions)) {
    std::sort(conditions_.begin(), conditions_.end(),
              [](const Condition& a, const Condition& b) { return a.var < b.var; });
    for (std::size_t i = 0; i < conditions_.size(); ++i) {
        if (conditions_[i].allowed.empty())
            throw std::invalid_argument("membership rule: empty allowed set");
        if (i > 0 && conditions_[i - 1].var == conditions_[i].var)
            throw std::invalid_argument("membership rule: duplicate condition variable");
    }
    if (body.empty())
        throw std::invalid_argument("membership rule: empty body");
    body_.reserve(body.size());
    for (const auto& atom : body) {
        const bool dup = std::find(body_.begin(), body_.end(), atom) != body_.end();
        if (!dup)
            body_.push_back(atom);
    }
}

bool MembershipRule::is_equality() const {
    return std::all_of(conditions_.begin(), conditions_.end(),
                       [](const Condition& c) { return c.allowed.is_singleton(); });
}

MembershipRule normalized(const MembershipRule& rule) {
    std::vector<BodyAtom> body(rule.body().begin(), rule.body().end());
    std::sort(body.begin(), body.end(), [](const BodyAtom& a, const BodyAtom& b) {
        return a.var != b.var ? a.var < b.var : a.value < b.value;
    });
    return MembershipRule(
        std::vector<Condition>(rule.conditions().begin(), rule.conditions().end()),
        std::move(body));
}

void validate_rule(const MembershipRule& rule, const Signature& sig) {
    for (const auto& c : rule.conditions()) {
        if (c.var >= sig.size())
            throw std::invalid_argument("membership rule: condition variable out of range");
        if (!c.allowed.subset_of(sig[c.var].full()))
            throw std::invalid_argument("membership rule: allowed set outside the universe");
    }
    for (const auto& atom : rule.body()) {
        if (atom.var >= sig.size())
            throw std::invalid_argument("membership rule: body variable out of range");
        if (atom.value >= sig[atom.var].size())
            throw std::invalid_argument("membership rule: body value outside the universe");
    }
}

bool holds(const MembershipRule& rule, const Store& s) {
    if (s.is_top())
        return true;
    for (const auto& c : rule.conditions())
        if (!s.domain(c.var).subset_of(c.allowed))
            return false;
    return true;
}

bool holds_under_equality(const MembershipRule& rule, const Store& s) {
    if (s.is_top())
        return true;
    for (const auto& c : rule.conditions())
        if (s.domain(c.var) != c.allowed)
            return false;
    return true;
}

Store apply_body(const MembershipRule& rule, const Store& s) {
    Store out = s;
    for (const auto& atom : rule.body())
        out = out.remove_value(atom.var, atom.value);
    return out;
}

Store apply(const MembershipRule& rule, const Store& s) {
    return holds(rule, s) ? apply_body(rule, s) : s;
}

Store witness(const MembershipRule& rule, const Signature& sig) {
    Store w = store_bottom(sig);
    for (const auto& c : rule.conditions())
        w = w.with_domain(c.var, c.allowed);
    return w;
}

bool can_ever_hold_above(const MembershipRule& rule, const Store& s, DeadRuleCheck mode) {
    for (const auto& c : rule.conditions()) {
        const DomainSet dom = s.domain(c.var);
        if (mode == DeadRuleCheck::singleton_only && !dom.is_singleton())
            continue;
        if (!dom.intersects(c.allowed))
            return false;
    }
    return true;
}

MembershipSystem::MembershipSystem(Signature sig, std::vector<MembershipRule> rules)
    : sig_(std::move(sig)), rules_(std::move(rules)) {
    for (const auto& r : rules_)
        validate_rule(r, sig_);
}

PropRuleReport verify_prop_rule(const MembershipRule& rule, const Signature& sig) {
    MembershipSystem sys(sig, {rule});
    const auto carrier = enumerate_stores(sig, /*include_top=*/true);
    return check_prop_rule(sys, 0, std::span<const Store>(carrier), [&](std::size_t i) {
        return store_to_text(carrier[i], sig);
    });
}

} // namespace proprules
