#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "proprules/membership.hpp"
#include "proprules/scheduler.hpp"
#include "test_util.hpp"

using namespace proprules;
using testutil::mask_of;

namespace {

constexpr std::uint32_t A = 0, B = 1;

// the three rules over four {a,b,c} variables:
//   r1: x1 in {a,b}            -> x2 != a, x4 != b
//   r2: x1 in {a,b}, x2 in {b,c} -> x3 != a
//   r3: x2 in {b}              -> x3 != a, x4 != b
MembershipSystem three_rule_system() {
    const Signature sig = testutil::uniform_signature(4, {"a", "b", "c"});
    std::vector<MembershipRule> rules;
    rules.emplace_back(std::vector<Condition>{{0, mask_of({0, 1})}},
                       std::vector<BodyAtom>{{1, 0}, {3, 1}});
    rules.emplace_back(std::vector<Condition>{{0, mask_of({0, 1})}, {1, mask_of({1, 2})}},
                       std::vector<BodyAtom>{{2, 0}});
    rules.emplace_back(std::vector<Condition>{{1, mask_of({1})}},
                       std::vector<BodyAtom>{{2, 0}, {3, 1}});
    return MembershipSystem(sig, std::move(rules));
}

MembershipSystem small_random_system(std::uint64_t seed, std::size_t arity,
                                     std::vector<std::string> symbols, std::size_t rule_count) {
    std::mt19937_64 rng(seed);
    const Signature sig = testutil::uniform_signature(arity, std::move(symbols));
    return MembershipSystem(sig, testutil::random_rules(rng, sig, rule_count));
}

} // namespace

TEST_CASE("empty rule set fixes the start immediately") {
    MembershipSystem sys(testutil::uniform_signature(2, {"0", "1"}), {});
    const auto trace = gi_fixpoint(sys, sys.bottom());
    REQUIRE(trace.final_store == sys.bottom());
    REQUIRE(trace.body_applications == 0);
    REQUIRE(trace.condition_tests == 0);
    REQUIRE(trace.f_fin.empty());
}

TEST_CASE("friends and obviated on the three-rule example") {
    const auto compiled = compute_friends_obviated(three_rule_system());
    REQUIRE(std::vector<std::uint32_t>(compiled.friends(0).begin(), compiled.friends(0).end()) ==
            std::vector<std::uint32_t>{1});
    const auto ob0 = compiled.obviated(0);
    REQUIRE(std::find(ob0.begin(), ob0.end(), 2u) != ob0.end()); // r3 obviated by r1
    REQUIRE(std::find(ob0.begin(), ob0.end(), 0u) != ob0.end()); // r1 in its own list
    for (std::uint32_t r = 0; r < 3; ++r) {
        const auto ob = compiled.obviated(r);
        REQUIRE(std::find(ob.begin(), ob.end(), r) != ob.end());
        const auto fr = compiled.friends(r);
        REQUIRE(std::find(fr.begin(), fr.end(), r) == fr.end());
        for (auto f : fr)
            REQUIRE(std::find(ob.begin(), ob.end(), f) == ob.end());
        REQUIRE(compiled.solving_degree(r) ==
                Catch::Approx(compiled.union_size(r) / 3.0));
    }
}

TEST_CASE("gi_fixpoint equals the round-robin oracle from every start") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto sys = small_random_system(seed, 4, {"0", "1"}, 8);
        const auto carrier = enumerate_stores(sys.signature(), true);
        for (const auto& start : carrier)
            REQUIRE(gi_fixpoint(sys, start).final_store ==
                    testutil::oracle_fixpoint(sys, start));
    }
}

TEST_CASE("r_fixpoint matches gi_fixpoint for every start and choose order") {
    for (std::uint64_t seed : {4ull, 5ull}) {
        const auto sys = small_random_system(seed, 3, {"a", "b", "c"}, 10);
        const auto compiled = compute_friends_obviated(sys);
        const auto live = all_rule_indices(sys.rule_count());
        const auto carrier = enumerate_stores(sys.signature(), true);
        for (const auto& start : carrier) {
            const Store expect = gi_fixpoint(sys, start).final_store;
            REQUIRE(r_fixpoint(compiled, start, live).final_store == expect);
            for (std::uint64_t choose_seed : {0ull, 9ull}) {
                SchedulerOptions opt;
                opt.choose = ChooseStrategy::seeded_random;
                opt.seed = choose_seed;
                REQUIRE(r_fixpoint(compiled, start, live, opt).final_store == expect);
            }
        }
    }
}

TEST_CASE("a holding solving rule terminates the loop after one test") {
    const Signature sig = testutil::uniform_signature(2, {"0", "1"});
    MembershipSystem sys(sig, {MembershipRule({{0, mask_of({A, B})}}, {{1, B}})});
    const auto compiled = compute_friends_obviated(sys);
    REQUIRE(compiled.is_solving(0));
    const auto trace = r_fixpoint(compiled, sys.bottom(), all_rule_indices(1));
    REQUIRE(trace.condition_tests == 1);
    REQUIRE(trace.f_fin.empty());
    REQUIRE(trace.rules_removed == 1);
}

TEST_CASE("instrumented runs: loop invariant and lexicographic descent") {
    const auto sys = small_random_system(6, 3, {"a", "b"}, 8);
    const auto live = all_rule_indices(sys.rule_count());
    const auto compiled = compute_friends_obviated(sys);

    struct Step {
        Store d;
        std::size_t g_size;
    };
    for (const auto& start : enumerate_stores(sys.signature(), false)) {
        std::vector<Step> steps;
        auto observe = [&](const Store& d, std::span<const char> in_g, std::size_t g_size) {
            // invariant: every live rule outside G already fixes d
            for (auto r : live)
                if (!in_g[r])
                    REQUIRE(apply(sys.rule(r), d) == d);
            steps.push_back({d, g_size});
        };
        gi_fixpoint(sys, start, {}, observe);
        for (std::size_t i = 1; i < steps.size(); ++i) {
            const bool grew = steps[i - 1].d != steps[i].d;
            if (grew)
                REQUIRE(store_leq(steps[i - 1].d, steps[i].d));
            else
                REQUIRE(steps[i].g_size < steps[i - 1].g_size);
        }

        // the removing scheduler descends in the same ordering
        steps.clear();
        auto observe_r = [&](const Store& d, std::span<const char>, std::size_t g_size) {
            steps.push_back({d, g_size});
        };
        r_fixpoint(compiled, start, live, {}, observe_r);
        for (std::size_t i = 1; i < steps.size(); ++i) {
            const bool grew = steps[i - 1].d != steps[i].d;
            if (!grew)
                REQUIRE(steps[i].g_size < steps[i - 1].g_size);
        }
    }
}

TEST_CASE("trace bookkeeping: removals and survivors partition the live set") {
    const auto sys = small_random_system(8, 3, {"a", "b", "c"}, 12);
    const auto compiled = compute_friends_obviated(sys);
    const auto live = all_rule_indices(sys.rule_count());
    for (const auto& start : enumerate_stores(sys.signature(), false)) {
        const auto trace = r_fixpoint(compiled, start, live);
        REQUIRE(trace.rules_removed + trace.f_fin.size() == live.size());
        REQUIRE(std::is_sorted(trace.f_fin.begin(), trace.f_fin.end()));
        REQUIRE(trace.reached_top == trace.final_store.is_top());
    }
}

TEST_CASE("conditions behind the removing scheduler hold on random systems") {
    for (std::uint64_t seed : {10ull, 11ull, 12ull}) {
        const auto sys = small_random_system(seed, 3, {"a", "b"}, 9);
        const auto compiled = compute_friends_obviated(sys);
        const auto carrier = enumerate_stores(sys.signature(), true);
        REQUIRE(testutil::check_condition_1(compiled, std::span<const Store>(carrier)));
        REQUIRE(testutil::check_condition_2_sequential(compiled,
                                                       std::span<const Store>(carrier)));
    }
}

TEST_CASE("resume continues above a prior fixpoint") {
    const auto sys = small_random_system(14, 3, {"a", "b", "c"}, 10);
    const auto compiled = compute_friends_obviated(sys);
    const auto live = all_rule_indices(sys.rule_count());

    const auto prior = r_fixpoint(compiled, sys.bottom(), live);

    SECTION("resuming at the fixpoint itself changes nothing") {
        const auto again = resume(compiled, prior, prior.final_store);
        REQUIRE(again.final_store == prior.final_store);
    }
    SECTION("resuming below the fixpoint is rejected") {
        if (!prior.final_store.is_top() && prior.final_store != sys.bottom())
            REQUIRE_THROWS_AS(resume(compiled, prior, sys.bottom()), std::invalid_argument);
    }
    SECTION("resume equals a full-rule-set run from every element above") {
        for (const auto& e : testutil::stores_above(prior.final_store)) {
            const auto resumed = resume(compiled, prior, e);
            REQUIRE(resumed.final_store == gi_fixpoint(sys, e).final_store);
        }
    }
    SECTION("an empty survivor set leaves every element untouched") {
        Trace<Store> no_rules = prior;
        no_rules.f_fin.clear();
        for (const auto& e : testutil::stores_above(prior.final_store))
            REQUIRE(resume(compiled, no_rules, e).final_store == e);
    }
}

namespace {

struct BadWitnessSystem {
    struct Level {
        int v;
        friend bool operator==(Level, Level) = default;
    };
    using element_type = Level;
    std::size_t rule_count() const { return 1; }
    bool holds(std::size_t, Level e) const { return e.v >= 1; }
    Level apply_body(std::size_t, Level e) const { return {e.v}; }
    bool can_ever_hold_above(std::size_t, Level, DeadRuleCheck) const { return true; }
    Level witness(std::size_t) const { return {0}; } // condition fails here
    Level bottom() const { return {0}; }
    bool is_top(Level e) const { return e.v >= 3; }
    bool leq(Level a, Level b) const { return a.v <= b.v; }
};

} // namespace

TEST_CASE("friends/obviated precomputation rejects a lying witness") {
    REQUIRE_THROWS_AS(compute_friends_obviated(BadWitnessSystem{}), std::invalid_argument);
}

TEST_CASE("chained resumption down random shrink paths") {
    std::mt19937_64 rng(55);
    for (std::uint64_t seed : {41ull, 42ull, 43ull}) {
        const auto sys = small_random_system(seed, 3, {"a", "b", "c"}, 14);
        const auto compiled = compute_friends_obviated(sys);
        for (int path = 0; path < 20; ++path) {
            auto trace = r_fixpoint(compiled, sys.bottom(), all_rule_indices(14));
            while (!trace.final_store.is_top() && !trace.final_store.all_singleton()) {
                std::vector<std::uint32_t> open;
                for (std::uint32_t v = 0; v < 3; ++v)
                    if (!trace.final_store.domain(v).is_singleton())
                        open.push_back(v);
                const auto var = open[rng() % open.size()];
                const auto values = trace.final_store.domain(var).values();
                const Store e = trace.final_store.remove_value(var, values[rng() % values.size()]);
                trace = resume(compiled, trace, e);
                REQUIRE(trace.final_store == gi_fixpoint(sys, e).final_store);
                REQUIRE(trace.f_fin.size() <= 14);
            }
        }
    }
}

TEST_CASE("parallel and serial precomputation agree") {
    const auto sys = small_random_system(21, 3, {"a", "b", "c"}, 24);
    const auto serial = compute_friends_obviated_serial(sys);
    const auto parallel = compute_friends_obviated(sys, {}, Exec::parallel);
    REQUIRE(serial.rule_count() == parallel.rule_count());
    for (std::uint32_t r = 0; r < serial.rule_count(); ++r) {
        REQUIRE(std::vector<std::uint32_t>(serial.friends(r).begin(), serial.friends(r).end()) ==
                std::vector<std::uint32_t>(parallel.friends(r).begin(),
                                           parallel.friends(r).end()));
        REQUIRE(std::vector<std::uint32_t>(serial.obviated(r).begin(),
                                           serial.obviated(r).end()) ==
                std::vector<std::uint32_t>(parallel.obviated(r).begin(),
                                           parallel.obviated(r).end()));
    }
}

TEST_CASE("removing scheduler never tests more conditions than plain iteration") {
    std::mt19937_64 rng(33);
    for (int instance = 0; instance < 60; ++instance) {
        const Signature sig =
            testutil::uniform_signature(2 + rng() % 3, {"a", "b", "c"});
        MembershipSystem sys(sig, testutil::random_rules(rng, sig, 4 + rng() % 12));
        const auto compiled = compute_friends_obviated(sys);
        const Store start = testutil::random_store(rng, sig);
        const auto gi = gi_fixpoint(sys, start);
        const auto r = r_fixpoint(compiled, start, all_rule_indices(sys.rule_count()));
        REQUIRE(r.final_store == gi.final_store);
        REQUIRE(r.condition_tests <= gi.condition_tests);
    }
}
