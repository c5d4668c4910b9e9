#pragma once

// Fixpoint-based redundancy of membership rules. A rule is redundant with
// respect to a set when every common fixpoint of the set is already a
// fixpoint of the rule; for rules with precise conditions and stable bodies
// this reduces to one test: compute the least fixpoint of the set above the
// rule's witness and check that the rule's body fixes it.
//
// Compound bodies decompose into atomic sub-rules, so a rule may be
// partially redundant; minimization works at atom granularity and re-merges
// the survivors.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proprules/membership.hpp"
#include "proprules/scheduler.hpp"

namespace proprules {

bool is_redundant(const MembershipRule& rule, std::span<const MembershipRule> others,
                  const Signature& sig);

struct AtomRef {
    std::uint32_t rule;
    std::uint32_t atom;

    friend bool operator==(const AtomRef&, const AtomRef&) = default;
};

enum class MinimizeOrder {
    cost_descending, // most condition variables first, then largest allowed sets
    explicit_order,  // caller-provided atom sequence; uncovered atoms appended
};

struct MinimizeOptions {
    MinimizeOrder order = MinimizeOrder::cost_descending;
    std::vector<AtomRef> explicit_atoms;
    // Re-test every survivor against the final set and fail loudly if one is
    // still redundant (they cannot be; this is a self-check for tests).
    bool verify_survivors = false;
};

enum class RuleStatus { kept, partially_reduced, removed };

struct RedundancyReport {
    // Parallel to the input rule sequence.
    std::vector<RuleStatus> status;
    std::vector<std::vector<std::uint32_t>> removed_atoms; // per rule, atom indices
    std::vector<MembershipRule> kept;                      // survivors, re-merged by condition set
    std::size_t total_atoms = 0;
    std::size_t removed_atom_count = 0;

    double redundancy_ratio() const {
        return total_atoms == 0 ? 0.0
                                : static_cast<double>(removed_atom_count) /
                                      static_cast<double>(total_atoms);
    }
    std::vector<std::uint32_t> removed_rules() const;
};

RedundancyReport minimize(std::span<const MembershipRule> rules, const Signature& sig,
                          const MinimizeOptions& options = {});

// Expands an atom order written as tokens "r" (whole rule, body order) or
// "r.k" (single atom), both 1-based.
std::vector<AtomRef> parse_atom_order(std::string_view text, std::span<const MembershipRule> rules);

struct SolvingStats {
    struct Row {
        std::uint32_t rule;
        double degree;
        std::uint32_t friends_size;
        std::uint32_t obviated_size;
    };
    std::vector<Row> rows;
    std::uint32_t solving_count = 0;
    double average_union_size = 0.0;
};

template <RuleSystem S>
SolvingStats solving_stats(const CompiledRuleSet<S>& compiled) {
    SolvingStats stats;
    const std::size_t n = compiled.rule_count();
    stats.rows.reserve(n);
    double sum = 0;
    for (std::uint32_t r = 0; r < n; ++r) {
        stats.rows.push_back({r, compiled.solving_degree(r),
                              static_cast<std::uint32_t>(compiled.friends(r).size()),
                              static_cast<std::uint32_t>(compiled.obviated(r).size())});
        sum += static_cast<double>(compiled.union_size(r));
        if (compiled.is_solving(r))
            ++stats.solving_count;
    }
    stats.average_union_size = n == 0 ? 0.0 : sum / static_cast<double>(n);
    return stats;
}

} // namespace proprules
