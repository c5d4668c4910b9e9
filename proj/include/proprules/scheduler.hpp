#pragma once

// Generic fixpoint machinery over a finite partial ordering with least and
// greatest elements. The rules scheduled here have a monotonic, precise
// condition and a stable, inflationary, monotonic body; under those
// assumptions the iteration reaches the least common fixpoint above the
// start element regardless of the choose order.
//
// Three entry points:
//   gi_fixpoint             plain chaotic iteration over a worklist
//   compute_friends_obviated
//                           per-rule precomputation: run the iteration from
//                           the rule's applied witness, record which rules
//                           fired (friends) and which are permanently fixed
//                           or unsatisfiable at the resulting element
//                           (obviated)
//   r_fixpoint              iteration that, when a rule fires, applies its
//                           friends' bodies without testing their conditions
//                           and permanently drops friends and obviated rules
//
// A trace carries the surviving rule set, which is sufficient for any later
// fixpoint computation above the reached element (resume()).

#include <concepts>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace proprules {

enum class ChooseStrategy { fifo, seeded_random };
enum class DeadRuleCheck { always, singleton_only };
enum class Exec { serial, parallel };

struct SchedulerOptions {
    ChooseStrategy choose = ChooseStrategy::fifo;
    std::uint64_t seed = 0; // for seeded_random
    DeadRuleCheck dead_check = DeadRuleCheck::singleton_only;
    // Test/replay hook: pop this rule first if it is pending.
    std::optional<std::uint32_t> first_choice;
};

struct FoOptions {
    SchedulerOptions gi = {};
    // The obviated test "no element above d satisfies the condition" runs at
    // precomputation time, so the exact variant is the default.
    DeadRuleCheck dead_check = DeadRuleCheck::always;
};

// A bundle of rules over one lattice. Elements are immutable values.
template <typename S>
concept RuleSystem = requires(const S& sys, const typename S::element_type& e, std::size_t i,
                              DeadRuleCheck m) {
    typename S::element_type;
    { sys.rule_count() } -> std::convertible_to<std::size_t>;
    { sys.holds(i, e) } -> std::convertible_to<bool>;
    { sys.apply_body(i, e) } -> std::same_as<typename S::element_type>;
    { sys.can_ever_hold_above(i, e, m) } -> std::convertible_to<bool>;
    { sys.witness(i) } -> std::same_as<typename S::element_type>;
    { sys.bottom() } -> std::same_as<typename S::element_type>;
    { sys.is_top(e) } -> std::convertible_to<bool>;
    { sys.leq(e, e) } -> std::convertible_to<bool>;
};

template <typename E>
struct Trace {
    E final_store;
    std::vector<std::uint32_t> f_fin; // surviving rules, ascending
    std::uint64_t condition_tests = 0;
    std::uint64_t body_applications = 0;
    std::uint32_t rules_removed = 0;
    bool reached_top = false;
};

template <typename E>
struct GiRun {
    Trace<E> trace;
    std::vector<std::uint32_t> fired; // rules whose application changed the element, in order
};

// Instrumentation hook called at the head of every loop iteration with the
// current element, the pending-rule flags (the set G) and |G|.
struct NullObserver {
    template <typename E>
    void operator()(const E&, std::span<const char>, std::size_t) const {}
};

inline std::vector<std::uint32_t> all_rule_indices(std::size_t n) {
    std::vector<std::uint32_t> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = static_cast<std::uint32_t>(i);
    return v;
}

namespace detail {

// The set G with a pluggable choose order. A rule is pending at most once.
class Worklist {
public:
    Worklist(std::size_t n, const SchedulerOptions& opt)
        : strategy_(opt.choose), rng_(opt.seed), first_(opt.first_choice), pending_(n, 0) {
        if (first_ && *first_ >= n)
            first_.reset();
        if (strategy_ == ChooseStrategy::seeded_random)
            pos_.assign(n, -1);
    }

    void push(std::uint32_t r) {
        if (pending_[r])
            return;
        pending_[r] = 1;
        ++count_;
        if (strategy_ == ChooseStrategy::fifo) {
            fifo_.push_back(r);
        } else {
            pos_[r] = static_cast<std::int32_t>(bag_.size());
            bag_.push_back(r);
        }
    }

    void erase(std::uint32_t r) {
        if (!pending_[r])
            return;
        take(r);
    }

    bool empty() const { return count_ == 0; }
    std::size_t size() const { return count_; }
    std::span<const char> pending_flags() const { return pending_; }

    std::uint32_t pop() {
        if (first_ && pending_[*first_]) {
            const std::uint32_t r = *first_;
            first_.reset();
            take(r);
            return r;
        }
        if (strategy_ == ChooseStrategy::fifo) {
            for (;;) {
                const std::uint32_t r = fifo_.front();
                fifo_.pop_front();
                if (pending_[r]) {
                    pending_[r] = 0;
                    --count_;
                    return r;
                }
            }
        }
        const std::size_t j = static_cast<std::size_t>(rng_() % bag_.size());
        const std::uint32_t r = bag_[j];
        take(r);
        return r;
    }

private:
    void take(std::uint32_t r) {
        pending_[r] = 0;
        --count_;
        if (strategy_ == ChooseStrategy::seeded_random) {
            const std::int32_t at = pos_[r];
            const std::uint32_t last = bag_.back();
            bag_[static_cast<std::size_t>(at)] = last;
            pos_[last] = at;
            bag_.pop_back();
            pos_[r] = -1;
        }
        // fifo entries are skipped lazily in pop()
    }

    ChooseStrategy strategy_;
    std::mt19937_64 rng_;
    std::optional<std::uint32_t> first_;
    std::vector<char> pending_;
    std::deque<std::uint32_t> fifo_;
    std::vector<std::uint32_t> bag_;
    std::vector<std::int32_t> pos_;
    std::size_t count_ = 0;
};

} // namespace detail

// Chaotic iteration: repeatedly choose a pending rule, apply it, and requeue
// every live rule not currently pending whenever the element changed. Stops
// when the worklist empties or the greatest element is reached. `live` is an
// ascending list of rule indices.
template <RuleSystem S, typename Obs = NullObserver>
GiRun<typename S::element_type> run_gi(const S& sys, typename S::element_type start,
                                       std::span<const std::uint32_t> live,
                                       const SchedulerOptions& opt = {}, Obs&& obs = Obs{}) {
    using E = typename S::element_type;
    detail::Worklist work(sys.rule_count(), opt);
    for (auto r : live)
        work.push(r);

    E d = std::move(start);
    std::uint64_t tests = 0, apps = 0;
    std::vector<std::uint32_t> fired;
    while (!work.empty() && !sys.is_top(d)) {
        obs(d, work.pending_flags(), work.size());
        const std::uint32_t g = work.pop();
        ++tests;
        if (!sys.holds(g, d))
            continue;
        E next = sys.apply_body(g, d);
        ++apps;
        if (next != d) {
            fired.push_back(g);
            for (auto r : live)
                work.push(r);
            d = std::move(next);
        }
    }

    const bool top = sys.is_top(d);
    Trace<E> trace{std::move(d),
                   std::vector<std::uint32_t>(live.begin(), live.end()),
                   tests,
                   apps,
                   0,
                   top};
    return GiRun<E>{std::move(trace), std::move(fired)};
}

template <RuleSystem S, typename Obs = NullObserver>
Trace<typename S::element_type> gi_fixpoint(const S& sys, typename S::element_type start,
                                            const SchedulerOptions& opt = {}, Obs&& obs = Obs{}) {
    const auto all = all_rule_indices(sys.rule_count());
    return run_gi(sys, std::move(start), all, opt, std::forward<Obs>(obs)).trace;
}

// Rules plus their precomputed friends/obviated lists. Immutable; safe to
// share across concurrent fixpoint runs.
template <RuleSystem S>
class CompiledRuleSet {
public:
    CompiledRuleSet(S system, std::vector<std::vector<std::uint32_t>> friends,
                    std::vector<std::vector<std::uint32_t>> obviated)
        : system_(std::move(system)), friends_(std::move(friends)), obviated_(std::move(obviated)) {
        const std::size_t n = system_.rule_count();
        if (friends_.size() != n || obviated_.size() != n)
            throw std::invalid_argument("compiled rule set: list count mismatch");
        for (std::uint32_t r = 0; r < n; ++r) {
            std::vector<char> in_friends(n, 0);
            for (auto h : friends_[r]) {
                if (h >= n || h == r)
                    throw std::invalid_argument("compiled rule set: bad friends entry");
                in_friends[h] = 1;
            }
            bool self = false;
            for (auto h : obviated_[r]) {
                if (h >= n || in_friends[h])
                    throw std::invalid_argument("compiled rule set: bad obviated entry");
                self |= (h == r);
            }
            if (!self)
                throw std::invalid_argument("compiled rule set: rule missing from its own obviated list");
        }
    }

    const S& system() const { return system_; }
    std::size_t rule_count() const { return system_.rule_count(); }
    std::span<const std::uint32_t> friends(std::size_t r) const { return friends_[r]; }
    std::span<const std::uint32_t> obviated(std::size_t r) const { return obviated_[r]; }
    std::size_t union_size(std::size_t r) const { return friends_[r].size() + obviated_[r].size(); }
    double solving_degree(std::size_t r) const {
        return static_cast<double>(union_size(r)) / static_cast<double>(rule_count());
    }
    bool is_solving(std::size_t r) const { return union_size(r) == rule_count(); }

private:
    S system_;
    std::vector<std::vector<std::uint32_t>> friends_;
    std::vector<std::vector<std::uint32_t>> obviated_;
};

namespace detail {

template <RuleSystem S>
void analyze_rule(const S& sys, std::uint32_t r, std::span<const std::uint32_t> all,
                  const FoOptions& opt, std::vector<std::uint32_t>& friends_out,
                  std::vector<std::uint32_t>& obviated_out) {
    using E = typename S::element_type;
    const std::size_t n = sys.rule_count();

    E w = sys.witness(r);
    if (!sys.holds(r, w))
        throw std::invalid_argument("rule " + std::to_string(r) +
                                    ": witness does not satisfy the rule condition");
    auto run = run_gi(sys, sys.apply_body(r, w), all, opt.gi);

    friends_out.clear();
    std::vector<char> in_friends(n, 0);
    for (auto h : run.fired) {
        if (h == r)
            continue; // a stable body cannot fire again above its own application
        friends_out.push_back(h);
        in_friends[h] = 1;
    }

    const E& d = run.trace.final_store;
    obviated_out.clear();
    for (std::uint32_t r2 = 0; r2 < n; ++r2) {
        if (in_friends[r2])
            continue;
        if (sys.apply_body(r2, d) == d || !sys.can_ever_hold_above(r2, d, opt.dead_check))
            obviated_out.push_back(r2);
    }
}

} // namespace detail

template <RuleSystem S>
CompiledRuleSet<S> compute_friends_obviated_serial(S sys, const FoOptions& opt = {}) {
    const std::size_t n = sys.rule_count();
    const auto all = all_rule_indices(n);
    std::vector<std::vector<std::uint32_t>> friends(n), obviated(n);
    for (std::uint32_t r = 0; r < n; ++r)
        detail::analyze_rule(sys, r, all, opt, friends[r], obviated[r]);
    return CompiledRuleSet<S>(std::move(sys), std::move(friends), std::move(obviated));
}

// Per-rule analyses are independent; they fan out across threads. Results are
// written by rule index, so the outcome does not depend on scheduling.
template <RuleSystem S>
CompiledRuleSet<S> compute_friends_obviated(S sys, const FoOptions& opt = {},
                                            Exec exec = Exec::parallel) {
#if defined(_OPENMP)
    if (exec == Exec::parallel && sys.rule_count() > 1) {
        const std::size_t n = sys.rule_count();
        const auto all = all_rule_indices(n);
        std::vector<std::vector<std::uint32_t>> friends(n), obviated(n);
        std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t r = 0; r < static_cast<std::int64_t>(n); ++r) {
            try {
                detail::analyze_rule(sys, static_cast<std::uint32_t>(r), all, opt,
                                     friends[static_cast<std::size_t>(r)],
                                     obviated[static_cast<std::size_t>(r)]);
            } catch (...) {
#pragma omp critical(proprules_fo_error)
                if (!error)
                    error = std::current_exception();
            }
        }
        if (error)
            std::rethrow_exception(error);
        return CompiledRuleSet<S>(std::move(sys), std::move(friends), std::move(obviated));
    }
#else
    (void)exec;
#endif
    return compute_friends_obviated_serial(std::move(sys), opt);
}

// Iteration with permanent rule removal. When a chosen rule's condition
// holds, the bodies of its friends are applied without testing their
// conditions, and friends and obviated rules leave both the live set and the
// worklist for good. When the condition cannot hold at any element above the
// current one, the rule alone is dropped.
template <RuleSystem S, typename Obs = NullObserver>
Trace<typename S::element_type> r_fixpoint(const CompiledRuleSet<S>& compiled,
                                           typename S::element_type start,
                                           std::span<const std::uint32_t> live,
                                           const SchedulerOptions& opt = {}, Obs&& obs = Obs{}) {
    using E = typename S::element_type;
    const S& sys = compiled.system();
    const std::size_t n = sys.rule_count();

    std::vector<char> in_f(n, 0);
    detail::Worklist work(n, opt);
    for (auto r : live) {
        in_f[r] = 1;
        work.push(r);
    }

    E d = std::move(start);
    std::uint64_t tests = 0, apps = 0;
    std::uint32_t removed = 0;
    while (!work.empty() && !sys.is_top(d)) {
        obs(d, work.pending_flags(), work.size());
        const std::uint32_t f = work.pop();
        ++tests;
        if (sys.holds(f, d)) {
            auto drop = [&](std::uint32_t r2) {
                if (in_f[r2]) {
                    in_f[r2] = 0;
                    ++removed;
                    work.erase(r2);
                }
            };
            for (auto r2 : compiled.friends(f))
                drop(r2);
            for (auto r2 : compiled.obviated(f))
                drop(r2);

            E next = sys.apply_body(f, d);
            ++apps;
            for (auto r2 : compiled.friends(f)) {
                next = sys.apply_body(r2, next);
                ++apps;
            }
            if (next != d) {
                for (auto r : live)
                    if (in_f[r])
                        work.push(r);
                d = std::move(next);
            }
        } else if (!sys.can_ever_hold_above(f, d, opt.dead_check)) {
            in_f[f] = 0;
            ++removed;
        }
    }

    std::vector<std::uint32_t> f_fin;
    for (std::uint32_t r = 0; r < n; ++r)
        if (in_f[r])
            f_fin.push_back(r);
    const bool top = sys.is_top(d);
    return Trace<E>{std::move(d), std::move(f_fin), tests, apps, removed, top};
}

// Continue a fixpoint computation from an element above a previously reached
// fixpoint. Only the rules that survived the prior run need to be scheduled;
// the result still equals the least common fixpoint of the full rule set.
template <RuleSystem S>
Trace<typename S::element_type> resume(const CompiledRuleSet<S>& compiled,
                                       const Trace<typename S::element_type>& prior,
                                       typename S::element_type e,
                                       const SchedulerOptions& opt = {}) {
    if (!compiled.system().leq(prior.final_store, e))
        throw std::invalid_argument("resume: element is not above the prior fixpoint");
    return r_fixpoint(compiled, std::move(e), prior.f_fin, opt);
}

// Exhaustive verification that rule `r` behaves as required on the given
// carrier: monotonic condition, precise condition (the declared witness is
// the least element satisfying it), stable / inflationary / monotonic body.
struct PropRuleReport {
    bool condition_monotonic = true;
    bool condition_precise = true;
    bool body_stable = true;
    bool body_inflationary = true;
    bool body_monotonic = true;
    std::vector<std::string> failures;

    bool ok() const {
        return condition_monotonic && condition_precise && body_stable && body_inflationary &&
               body_monotonic;
    }
};

template <RuleSystem S, typename Desc>
PropRuleReport check_prop_rule(const S& sys, std::size_t r,
                               std::span<const typename S::element_type> carrier, Desc&& desc) {
    PropRuleReport rep;
    const std::size_t n = carrier.size();

    for (std::size_t i = 0; i < n && rep.body_inflationary; ++i)
        if (!sys.leq(carrier[i], sys.apply_body(r, carrier[i]))) {
            rep.body_inflationary = false;
            rep.failures.push_back("body not inflationary at " + desc(i));
        }

    const auto w = sys.witness(r);
    if (!sys.holds(r, w)) {
        rep.condition_precise = false;
        rep.failures.push_back("condition does not hold at the declared witness");
    }
    for (std::size_t i = 0; i < n && rep.condition_precise; ++i)
        if (sys.holds(r, carrier[i]) && !sys.leq(w, carrier[i])) {
            rep.condition_precise = false;
            rep.failures.push_back("witness is not least: condition holds at " + desc(i) +
                                   " below it");
        }

    for (std::size_t i = 0; i < n; ++i) {
        const auto fi = sys.apply_body(r, carrier[i]);
        const bool hi = sys.holds(r, carrier[i]);
        for (std::size_t j = 0; j < n; ++j) {
            if (rep.condition_monotonic && hi && sys.leq(carrier[i], carrier[j]) &&
                !sys.holds(r, carrier[j])) {
                rep.condition_monotonic = false;
                rep.failures.push_back("condition not monotonic: holds at " + desc(i) +
                                       " but not at " + desc(j) + " above it");
            }
            if (rep.body_monotonic && sys.leq(carrier[i], carrier[j]) &&
                !sys.leq(fi, sys.apply_body(r, carrier[j]))) {
                rep.body_monotonic = false;
                rep.failures.push_back("body not monotonic between " + desc(i) + " and " + desc(j));
            }
            if (rep.body_stable && sys.leq(fi, carrier[j]) &&
                sys.apply_body(r, carrier[j]) != carrier[j]) {
                rep.body_stable = false;
                rep.failures.push_back("body not stable: moved " + desc(j) + " above its image of " +
                                       desc(i));
            }
            if (!rep.condition_monotonic && !rep.body_monotonic && !rep.body_stable)
                break;
        }
    }
    return rep;
}

template <RuleSystem S>
PropRuleReport check_prop_rule(const S& sys, std::size_t r,
                               std::span<const typename S::element_type> carrier) {
    return check_prop_rule(sys, r, carrier,
                           [](std::size_t i) { return "element #" + std::to_string(i); });
}

} // namespace proprules
