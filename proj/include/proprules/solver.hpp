#pragma once

// Multi-constraint propagation intertwined with splitting. Each constraint
// carries its own compiled rule set and is scheduled on the projection of
// the global store onto its variables; constraints re-enter the queue when
// another constraint shrinks one of their variables. With the removing
// scheduler, each constraint resumes from the rules that survived its last
// run — sound because the projected store only grows along a branch — and
// live sets are restored through a trail on backtrack.

#include <cstdint>
#include <string>
#include <vector>

#include "proprules/membership.hpp"
#include "proprules/rulegen.hpp"
#include "proprules/scheduler.hpp"
#include "proprules/store.hpp"

namespace proprules {

struct ConstraintInstance {
    std::string name;
    std::vector<std::uint32_t> vars; // global variable index per constraint position
    CompiledRuleSet<MembershipSystem> compiled;
};

struct Csp {
    std::vector<std::string> var_names;
    Signature signature;
    std::vector<ConstraintInstance> constraints;
};

// Validates variable mappings and universe agreement.
Csp make_csp(std::vector<std::string> var_names, Signature sig,
             std::vector<ConstraintInstance> constraints);

enum class SchedulerKind { gi, r };

struct LiveState {
    std::vector<std::vector<std::uint32_t>> live; // per constraint
    std::vector<char> solved;
};

LiveState initial_live(const Csp& csp);

struct PropCounters {
    std::uint64_t condition_tests = 0;
    std::uint64_t body_applications = 0;
    std::uint64_t rules_removed = 0;

    PropCounters& operator+=(const PropCounters& o) {
        condition_tests += o.condition_tests;
        body_applications += o.body_applications;
        rules_removed += o.rules_removed;
        return *this;
    }
};

// Undo log for per-constraint live/solved state.
class LiveTrail {
public:
    std::size_t mark() const { return entries_.size(); }
    void record(std::uint32_t constraint, const LiveState& state);
    void rollback_to(std::size_t mark, LiveState& state);

private:
    struct Entry {
        std::uint32_t constraint;
        std::vector<std::uint32_t> live;
        char solved;
    };
    std::vector<Entry> entries_;
};

struct PropagateResult {
    Store store;
    PropCounters counters;
};

// Round-robin constraint-level worklist to a joint fixpoint (or Top).
// Updates `state` in place, logging prior values into `trail` when given.
PropagateResult propagate(const Csp& csp, const Store& start, LiveState& state,
                          SchedulerKind scheduler, LiveTrail* trail = nullptr);

// Convenience form returning the updated live sets.
struct PropagateOutcome {
    Store store;
    LiveState live;
    PropCounters counters;
};
PropagateOutcome propagate(const Csp& csp, const Store& start, const LiveState& live,
                           SchedulerKind scheduler);

enum class Labelling { random_var_val_action, lexicographic };

struct SearchConfig {
    std::uint64_t seed = 0;
    Labelling labelling = Labelling::random_var_val_action;
    std::uint64_t fixpoint_record_limit = 1000;
    SchedulerKind scheduler = SchedulerKind::r;
};

struct SearchReport {
    std::uint64_t solutions = 0;
    std::uint64_t fixpoints = 0; // recorded non-solution fixpoints
    PropCounters counters;
    bool limit_hit = false;
    std::vector<Store> solution_stores;    // discovery order, deduplicated
    std::vector<Store> recorded_fixpoints; // discovery order
};

// Depth-first search: propagate, deduplicate the reached fixpoint against
// everything recorded so far, then branch on a (variable, value, action)
// choice and its complement.
SearchReport search(const Csp& csp, const SearchConfig& config);

} // namespace proprules
