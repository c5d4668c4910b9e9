#include "proprules/solver.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace proprules {

Csp make_csp(std::vector<std::string> var_names, Signature sig,
             std::vector<ConstraintInstance> constraints) {
    if (var_names.size() != sig.size())
        throw std::invalid_argument("csp: variable name count does not match signature");
    for (const auto& c : constraints) {
        const Signature& local = c.compiled.system().signature();
        if (c.vars.size() != local.size())
            throw std::invalid_argument("csp: constraint arity does not match its mapping");
        for (std::size_t i = 0; i < c.vars.size(); ++i) {
            if (c.vars[i] >= sig.size())
                throw std::invalid_argument("csp: constraint variable out of range");
            if (!(sig[c.vars[i]] == local[i]))
                throw std::invalid_argument("csp: universe mismatch for constraint " + c.name);
        }
    }
    return Csp{std::move(var_names), std::move(sig), std::move(constraints)};
}

LiveState initial_live(const Csp& csp) {
    LiveState state;
    state.live.reserve(csp.constraints.size());
    for (const auto& c : csp.constraints)
        state.live.push_back(all_rule_indices(c.compiled.rule_count()));
    state.solved.assign(csp.constraints.size(), 0);
    return state;
}

void LiveTrail::record(std::uint32_t constraint, const LiveState& state) {
    entries_.push_back(Entry{constraint, state.live[constraint], state.solved[constraint]});
}

void LiveTrail::rollback_to(std::size_t mark, LiveState& state) {
    while (entries_.size() > mark) {
        Entry& e = entries_.back();
        state.live[e.constraint] = std::move(e.live);
        state.solved[e.constraint] = e.solved;
        entries_.pop_back();
    }
}

namespace {

Store project(const Store& global, const std::vector<std::uint32_t>& vars) {
    std::vector<DomainSet> doms;
    doms.reserve(vars.size());
    for (auto v : vars)
        doms.push_back(global.domain(v));
    return Store::of(std::move(doms));
}

} // namespace

PropagateResult propagate(const Csp& csp, const Store& start, LiveState& state,
                          SchedulerKind scheduler, LiveTrail* trail) {
    PropCounters counters;
    Store store = start;
    if (store.is_top())
        return {store, counters};

    const std::size_t nc = csp.constraints.size();
    std::deque<std::uint32_t> queue;
    std::vector<char> queued(nc, 0);
    auto enqueue = [&](std::uint32_t c) {
        if (!queued[c]) {
            queued[c] = 1;
            queue.push_back(c);
        }
    };
    for (std::uint32_t c = 0; c < nc; ++c)
        enqueue(c);

    while (!queue.empty()) {
        const std::uint32_t ci = queue.front();
        queue.pop_front();
        queued[ci] = 0;
        if (state.solved[ci])
            continue;
        const ConstraintInstance& inst = csp.constraints[ci];

        const Store local = project(store, inst.vars);
        Trace<Store> trace =
            scheduler == SchedulerKind::r
                ? r_fixpoint(inst.compiled, local, state.live[ci])
                : gi_fixpoint(inst.compiled.system(), local);
        counters.condition_tests += trace.condition_tests;
        counters.body_applications += trace.body_applications;
        counters.rules_removed += trace.rules_removed;

        if (scheduler == SchedulerKind::r && trace.f_fin != state.live[ci]) {
            if (trail)
                trail->record(ci, state);
            state.live[ci] = trace.f_fin;
        }

        if (trace.final_store.is_top())
            return {Store::top(), counters};

        // write shrunk domains back; wake constraints sharing a changed var
        std::vector<char> changed(csp.signature.size(), 0);
        bool any_changed = false;
        for (std::size_t i = 0; i < inst.vars.size(); ++i) {
            if (trace.final_store.domain(i) != store.domain(inst.vars[i])) {
                changed[inst.vars[i]] = 1;
                any_changed = true;
                store = store.with_domain(inst.vars[i], trace.final_store.domain(i));
            }
        }
        if (any_changed)
            for (std::uint32_t other = 0; other < nc; ++other) {
                if (other == ci || state.solved[other])
                    continue;
                const auto& ovars = csp.constraints[other].vars;
                if (std::any_of(ovars.begin(), ovars.end(),
                                [&](std::uint32_t v) { return changed[v]; }))
                    enqueue(other);
            }

        const bool now_solved = (scheduler == SchedulerKind::r && trace.f_fin.empty()) ||
                                trace.final_store.all_singleton();
        if (now_solved && !state.solved[ci]) {
            if (trail)
                trail->record(ci, state);
            state.solved[ci] = 1;
        }
    }
    return {store, counters};
}

PropagateOutcome propagate(const Csp& csp, const Store& start, const LiveState& live,
                           SchedulerKind scheduler) {
    LiveState state = live;
    auto result = propagate(csp, start, state, scheduler, nullptr);
    return PropagateOutcome{std::move(result.store), std::move(state), result.counters};
}

namespace {

struct SearchDriver {
    const Csp& csp;
    const SearchConfig& cfg;
    LiveState state;
    LiveTrail trail;
    std::mt19937_64 rng;
    std::unordered_set<Store, StoreHash> recorded;
    SearchReport report;
    bool stop = false;

    SearchDriver(const Csp& c, const SearchConfig& k)
        : csp(c), cfg(k), state(initial_live(c)), rng(k.seed) {}

    void pick(const Store& store, std::uint32_t& var, std::uint32_t& value, bool& assign_first) {
        std::vector<std::uint32_t> open;
        for (std::uint32_t v = 0; v < store.arity(); ++v)
            if (!store.domain(v).is_singleton())
                open.push_back(v);
        if (cfg.labelling == Labelling::lexicographic) {
            var = open.front();
            value = store.domain(var).lowest();
            assign_first = true;
            return;
        }
        var = open[static_cast<std::size_t>(rng() % open.size())];
        const auto values = store.domain(var).values();
        value = values[static_cast<std::size_t>(rng() % values.size())];
        assign_first = (rng() & 1u) == 0;
    }

    void node(const Store& start) {
        if (stop)
            return;
        const std::size_t mark = trail.mark();
        auto result = propagate(csp, start, state, cfg.scheduler, &trail);
        report.counters += result.counters;
        const Store& fix = result.store;
        if (!fix.is_top() && recorded.insert(fix).second) {
            if (fix.all_singleton()) {
                ++report.solutions;
                report.solution_stores.push_back(fix);
            } else {
                ++report.fixpoints;
                report.recorded_fixpoints.push_back(fix);
                if (report.fixpoints >= cfg.fixpoint_record_limit) {
                    report.limit_hit = true;
                    stop = true;
                }
                if (!stop) {
                    std::uint32_t var = 0, value = 0;
                    bool assign_first = true;
                    pick(fix, var, value, assign_first);
                    const Store assigned = fix.with_domain(var, DomainSet::single(value));
                    const Store removed = fix.remove_value(var, value);
                    node(assign_first ? assigned : removed);
                    node(assign_first ? removed : assigned);
                }
            }
        }
        trail.rollback_to(mark, state);
    }
};

} // namespace

SearchReport search(const Csp& csp, const SearchConfig& config) {
    SearchDriver driver(csp, config);
    driver.node(store_bottom(csp.signature));
    return std::move(driver.report);
}

} // namespace proprules
