#include "proprules/redundancy.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "proprules/errors.hpp"

namespace proprules {

bool is_redundant(const MembershipRule& rule, std::span<const MembershipRule> others,
                  const Signature& sig) {
    MembershipSystem sys(sig, std::vector<MembershipRule>(others.begin(), others.end()));
    const Store w = witness(rule, sig);
    const Store e = gi_fixpoint(sys, w).final_store;
    return apply_body(rule, e) == e;
}

std::vector<std::uint32_t> RedundancyReport::removed_rules() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t r = 0; r < status.size(); ++r)
        if (status[r] == RuleStatus::removed)
            out.push_back(r);
    return out;
}

namespace {

MembershipRule atomic_rule(const MembershipRule& rule, std::uint32_t atom) {
    return MembershipRule(
        std::vector<Condition>(rule.conditions().begin(), rule.conditions().end()),
        {rule.body()[atom]});
}

std::vector<AtomRef> cost_descending_order(std::span<const MembershipRule> rules) {
    std::vector<std::uint32_t> rule_order(rules.size());
    std::iota(rule_order.begin(), rule_order.end(), 0u);
    auto cost = [&](std::uint32_t r) {
        std::size_t sum = 0;
        for (const auto& c : rules[r].conditions())
            sum += c.allowed.count();
        return std::pair<std::size_t, std::size_t>(rules[r].conditions().size(), sum);
    };
    std::sort(rule_order.begin(), rule_order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const auto ca = cost(a), cb = cost(b);
        if (ca != cb)
            return ca > cb; // most expensive first
        return a < b;
    });
    std::vector<AtomRef> order;
    for (auto r : rule_order)
        for (std::uint32_t k = 0; k < rules[r].body().size(); ++k)
            order.push_back({r, k});
    return order;
}

} // namespace

RedundancyReport minimize(std::span<const MembershipRule> rules, const Signature& sig,
                          const MinimizeOptions& options) {
    RedundancyReport report;
    report.status.assign(rules.size(), RuleStatus::kept);
    report.removed_atoms.resize(rules.size());

    std::vector<AtomRef> order;
    std::vector<std::vector<char>> covered(rules.size());
    for (std::uint32_t r = 0; r < rules.size(); ++r)
        covered[r].assign(rules[r].body().size(), 0);
    auto push = [&](AtomRef a) {
        if (!covered[a.rule][a.atom]) {
            covered[a.rule][a.atom] = 1;
            order.push_back(a);
        }
    };
    if (options.order == MinimizeOrder::explicit_order)
        for (auto a : options.explicit_atoms) {
            if (a.rule >= rules.size() || a.atom >= rules[a.rule].body().size())
                throw std::invalid_argument("minimize: atom reference out of range");
            push(a);
        }
    else
        for (auto a : cost_descending_order(rules))
            push(a);
    for (std::uint32_t r = 0; r < rules.size(); ++r)
        for (std::uint32_t k = 0; k < rules[r].body().size(); ++k)
            push({r, k});

    // decompose into atomic sub-rules, then greedily drop redundant ones
    std::vector<MembershipRule> atoms;
    std::vector<AtomRef> refs;
    std::vector<char> alive;
    std::vector<std::vector<std::uint32_t>> atom_index(rules.size());
    for (std::uint32_t r = 0; r < rules.size(); ++r)
        for (std::uint32_t k = 0; k < rules[r].body().size(); ++k) {
            atom_index[r].push_back(static_cast<std::uint32_t>(atoms.size()));
            atoms.push_back(atomic_rule(rules[r], k));
            refs.push_back({r, k});
            alive.push_back(1);
        }
    report.total_atoms = atoms.size();

    auto others_of = [&](std::size_t skip) {
        std::vector<MembershipRule> rest;
        rest.reserve(atoms.size());
        for (std::size_t i = 0; i < atoms.size(); ++i)
            if (alive[i] && i != skip)
                rest.push_back(atoms[i]);
        return rest;
    };

    for (auto a : order) {
        const std::uint32_t i = atom_index[a.rule][a.atom];
        if (!alive[i])
            continue;
        const auto rest = others_of(i);
        if (is_redundant(atoms[i], rest, sig)) {
            alive[i] = 0;
            report.removed_atoms[a.rule].push_back(a.atom);
            ++report.removed_atom_count;
        }
    }

    if (options.verify_survivors)
        for (std::size_t i = 0; i < atoms.size(); ++i)
            if (alive[i] && is_redundant(atoms[i], others_of(i), sig))
                throw std::logic_error("minimize: a survivor is still redundant");

    for (std::uint32_t r = 0; r < rules.size(); ++r) {
        std::sort(report.removed_atoms[r].begin(), report.removed_atoms[r].end());
        if (report.removed_atoms[r].size() == rules[r].body().size())
            report.status[r] = RuleStatus::removed;
        else if (!report.removed_atoms[r].empty())
            report.status[r] = RuleStatus::partially_reduced;
    }

    // re-merge surviving atoms by condition set, keeping first-seen order
    std::vector<std::vector<Condition>> seen_conds;
    std::vector<std::vector<BodyAtom>> seen_atoms;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (!alive[i])
            continue;
        std::vector<Condition> key(atoms[i].conditions().begin(), atoms[i].conditions().end());
        auto at = std::find(seen_conds.begin(), seen_conds.end(), key);
        if (at == seen_conds.end()) {
            seen_conds.push_back(key);
            seen_atoms.push_back({atoms[i].body()[0]});
        } else {
            seen_atoms[static_cast<std::size_t>(at - seen_conds.begin())].push_back(
                atoms[i].body()[0]);
        }
    }
    for (std::size_t j = 0; j < seen_conds.size(); ++j)
        report.kept.emplace_back(std::move(seen_conds[j]), std::move(seen_atoms[j]));
    return report;
}

std::vector<AtomRef> parse_atom_order(std::string_view text,
                                      std::span<const MembershipRule> rules) {
    std::vector<AtomRef> out;
    int line_no = 1, col = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        const char ch = text[i];
        if (ch == '#') {
            while (i < text.size() && text[i] != '\n')
                ++i;
            continue;
        }
        if (ch == '\n') {
            ++line_no;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++col;
            ++i;
            continue;
        }
        const int tok_col = col;
        std::string tok;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
               text[i] != '#') {
            tok += text[i];
            ++i;
            ++col;
        }
        const auto dot = tok.find('.');
        try {
            const unsigned long rule_no = std::stoul(tok.substr(0, dot));
            if (rule_no == 0 || rule_no > rules.size())
                throw ParseError("rule number out of range: " + tok, line_no, tok_col);
            const std::uint32_t r = static_cast<std::uint32_t>(rule_no - 1);
            if (dot == std::string::npos) {
                for (std::uint32_t k = 0; k < rules[r].body().size(); ++k)
                    out.push_back({r, k});
            } else {
                const unsigned long atom_no = std::stoul(tok.substr(dot + 1));
                if (atom_no == 0 || atom_no > rules[r].body().size())
                    throw ParseError("atom number out of range: " + tok, line_no, tok_col);
                out.push_back({r, static_cast<std::uint32_t>(atom_no - 1)});
            }
        } catch (const std::invalid_argument&) {
            throw ParseError("bad order token: " + tok, line_no, tok_col);
        } catch (const std::out_of_range&) {
            throw ParseError("bad order token: " + tok, line_no, tok_col);
        }
    }
    return out;
}

} // namespace proprules
