#include "proprules/rulegen.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <stdexcept>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "proprules/errors.hpp"

namespace proprules {

void validate_constraint(const ConstraintDef& def) {
    if (def.name.empty())
        throw std::invalid_argument("constraint has no name");
    if (def.var_names.size() != def.signature.size())
        throw std::invalid_argument("constraint: variable name count does not match arity");
    if (def.tuples.empty())
        throw std::invalid_argument("constraint has no tuples");
    std::set<std::vector<std::uint32_t>> seen;
    for (const auto& t : def.tuples) {
        if (t.size() != def.arity())
            throw std::invalid_argument("constraint tuple has wrong arity");
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] >= def.signature[i].size())
                throw std::invalid_argument("constraint tuple value outside the universe");
        if (!seen.insert(t).second)
            throw std::invalid_argument("duplicate constraint tuple");
    }
}

bool is_valid(const MembershipRule& rule, const ConstraintDef& def) {
    for (const auto& t : def.tuples) {
        bool matches = true;
        for (const auto& c : rule.conditions())
            if (!c.allowed.contains(t[c.var])) {
                matches = false;
                break;
            }
        if (!matches)
            continue;
        for (const auto& atom : rule.body())
            if (t[atom.var] == atom.value)
                return false;
    }
    return true;
}

namespace {

// One candidate condition set during enumeration.
struct ConditionSet {
    std::vector<std::uint32_t> vars;      // ascending
    std::vector<std::uint64_t> allowed;   // mask per var in `vars`
};

// Tuple indices matching the condition set.
std::vector<std::uint32_t> matching_tuples(const ConstraintDef& def, const ConditionSet& c) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t ti = 0; ti < def.tuples.size(); ++ti) {
        const auto& t = def.tuples[ti];
        bool ok = true;
        for (std::size_t j = 0; j < c.vars.size(); ++j)
            if (!((c.allowed[j] >> t[c.vars[j]]) & 1u)) {
                ok = false;
                break;
            }
        if (ok)
            out.push_back(ti);
    }
    return out;
}

bool atom_valid(const ConstraintDef& def, const std::vector<std::uint32_t>& matches,
                std::uint32_t var, std::uint32_t value) {
    for (auto ti : matches)
        if (def.tuples[ti][var] == value)
            return false;
    return true;
}

bool atom_valid_for(const ConstraintDef& def, const ConditionSet& c, std::uint32_t var,
                    std::uint32_t value) {
    return atom_valid(def, matching_tuples(def, c), var, value);
}

// Valid and no one-step weakening (drop a condition; for membership rules
// also enlarge an allowed set by one value) stays valid. Validity is
// monotone under strengthening, so local minimality is global.
bool atom_minimal(const ConstraintDef& def, const ConditionSet& c,
                  const std::vector<std::uint32_t>& matches, RuleKind kind, std::uint32_t var,
                  std::uint32_t value) {
    if (!atom_valid(def, matches, var, value))
        return false;
    for (std::size_t j = 0; j < c.vars.size(); ++j) {
        ConditionSet weak = c;
        weak.vars.erase(weak.vars.begin() + static_cast<std::ptrdiff_t>(j));
        weak.allowed.erase(weak.allowed.begin() + static_cast<std::ptrdiff_t>(j));
        if (atom_valid_for(def, weak, var, value))
            return false;
        if (kind == RuleKind::membership) {
            const std::uint64_t full = def.signature[c.vars[j]].full().bits();
            for (std::uint64_t rest = full & ~c.allowed[j]; rest; rest &= rest - 1) {
                ConditionSet wider = c;
                wider.allowed[j] |= rest & ~(rest - 1);
                if (wider.allowed[j] == full)
                    continue; // equivalent to dropping the condition, tested above
                if (atom_valid_for(def, wider, var, value))
                    return false;
            }
        }
    }
    return true;
}

// Minimal atoms found for one condition set.
struct Found {
    std::uint64_t index; // flat enumeration index, for deterministic merging
    ConditionSet cond;
    std::vector<BodyAtom> atoms;
};

void scan_condition_set(const ConstraintDef& def, const ConditionSet& c, RuleKind kind,
                        std::uint64_t index, std::vector<Found>& out) {
    const auto matches = matching_tuples(def, c);
    // a condition no tuple satisfies yields only vacuously valid conclusions
    if (matches.empty())
        return;
    std::vector<BodyAtom> atoms;
    for (std::uint32_t var = 0; var < def.arity(); ++var) {
        // an atom on a condition variable is inert unless the allowed set
        // still contains the removed value
        std::uint64_t allowed_here = def.signature[var].full().bits();
        for (std::size_t j = 0; j < c.vars.size(); ++j)
            if (c.vars[j] == var)
                allowed_here = c.allowed[j];
        for (std::uint32_t value = 0; value < def.signature[var].size(); ++value) {
            if (!((allowed_here >> value) & 1u))
                continue;
            if (atom_minimal(def, c, matches, kind, var, value))
                atoms.push_back(BodyAtom{var, value});
        }
    }
    if (!atoms.empty())
        out.push_back(Found{index, c, std::move(atoms)});
}

// Allowed-set choices for one condition variable: singletons for equality
// rules, nonempty proper subsets for membership rules (a full set is the
// same as no condition).
std::vector<std::uint64_t> allowed_choices(const Universe& u, RuleKind kind) {
    std::vector<std::uint64_t> out;
    const std::uint64_t full = u.full().bits();
    if (kind == RuleKind::equality) {
        for (std::uint32_t v = 0; v < u.size(); ++v)
            out.push_back(std::uint64_t{1} << v);
    } else {
        for (std::uint64_t m = 1; m < full; ++m)
            out.push_back(m);
    }
    return out;
}

} // namespace

std::vector<MembershipRule> generate_rules(const ConstraintDef& def, RuleKind kind,
                                           const GenLimits& limits, Exec exec) {
    validate_constraint(def);
    const std::size_t n = def.arity();
    if (n > limits.max_arity)
        throw SizeLimitError("constraint arity exceeds the generation limit");
    for (const auto& u : def.signature)
        if (u.size() > limits.max_universe)
            throw SizeLimitError("universe exceeds the generation limit");

    // variable subsets grouped by size, ascending
    std::vector<std::uint32_t> subsets;
    for (std::uint32_t size = 0; size <= n; ++size)
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
            if (static_cast<std::uint32_t>(std::popcount(mask)) == size)
                subsets.push_back(mask);

    std::uint64_t total = 0;
    std::vector<Found> found;
    for (const std::uint32_t mask : subsets) {
        ConditionSet base;
        std::vector<std::vector<std::uint64_t>> choices;
        for (std::uint32_t var = 0; var < n; ++var)
            if ((mask >> var) & 1u) {
                base.vars.push_back(var);
                choices.push_back(allowed_choices(def.signature[var], kind));
            }
        std::uint64_t count = 1;
        for (const auto& ch : choices) {
            if (ch.empty()) {
                count = 0;
                break;
            }
            count *= ch.size();
            if (count > limits.max_condition_sets)
                throw SizeLimitError("candidate condition space exceeds the generation limit");
        }
        total += count;
        if (total > limits.max_condition_sets)
            throw SizeLimitError("candidate condition space exceeds the generation limit");
        if (count == 0)
            continue;

        const auto expand = [&](std::uint64_t flat) {
            ConditionSet c = base;
            c.allowed.resize(c.vars.size());
            for (std::size_t j = 0; j < choices.size(); ++j) {
                c.allowed[j] = choices[j][flat % choices[j].size()];
                flat /= choices[j].size();
            }
            return c;
        };

#if defined(_OPENMP)
        if (exec == Exec::parallel && count > 64) {
            std::vector<std::vector<Found>> per_thread;
#pragma omp parallel
            {
#pragma omp single
                per_thread.resize(static_cast<std::size_t>(omp_get_num_threads()));
#pragma omp for schedule(dynamic, 64)
                for (std::int64_t flat = 0; flat < static_cast<std::int64_t>(count); ++flat)
                    scan_condition_set(def, expand(static_cast<std::uint64_t>(flat)), kind,
                                       static_cast<std::uint64_t>(flat),
                                       per_thread[static_cast<std::size_t>(omp_get_thread_num())]);
            }
            std::vector<Found> merged;
            for (auto& part : per_thread)
                merged.insert(merged.end(), std::make_move_iterator(part.begin()),
                              std::make_move_iterator(part.end()));
            std::sort(merged.begin(), merged.end(),
                      [](const Found& a, const Found& b) { return a.index < b.index; });
            found.insert(found.end(), std::make_move_iterator(merged.begin()),
                         std::make_move_iterator(merged.end()));
            continue;
        }
#else
        (void)exec;
#endif
        for (std::uint64_t flat = 0; flat < count; ++flat)
            scan_condition_set(def, expand(flat), kind, flat, found);
    }

    // merge by condition set; deterministic order: condition count, then
    // variable/mask lexicographic
    std::map<std::vector<std::pair<std::uint32_t, std::uint64_t>>, std::vector<BodyAtom>> merged;
    for (auto& f : found) {
        std::vector<std::pair<std::uint32_t, std::uint64_t>> key;
        for (std::size_t j = 0; j < f.cond.vars.size(); ++j)
            key.emplace_back(f.cond.vars[j], f.cond.allowed[j]);
        auto& atoms = merged[key];
        atoms.insert(atoms.end(), f.atoms.begin(), f.atoms.end());
    }

    std::vector<MembershipRule> rules;
    rules.reserve(merged.size());
    for (auto& [key, atoms] : merged) {
        std::vector<Condition> conds;
        conds.reserve(key.size());
        for (const auto& [var, bits] : key)
            conds.push_back(Condition{var, DomainSet::from_bits(bits)});
        std::sort(atoms.begin(), atoms.end(), [](const BodyAtom& a, const BodyAtom& b) {
            return a.var != b.var ? a.var < b.var : a.value < b.value;
        });
        rules.emplace_back(std::move(conds), std::move(atoms));
    }
    std::stable_sort(rules.begin(), rules.end(),
                     [](const MembershipRule& a, const MembershipRule& b) {
                         return a.conditions().size() < b.conditions().size();
                     });
    return rules;
}

} // namespace proprules
