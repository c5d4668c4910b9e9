#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "proprules/errors.hpp"
#include "proprules/textio.hpp"
#include "test_util.hpp"

using namespace proprules;
using testutil::mask_of;

TEST_CASE("constraint files parse and render") {
    const auto def = parse_constraint_file("constraint c 4   # name, arity\n"
                                           "values 0 1\n"
                                           "tuple 0 1 0 1\n"
                                           "tuple 1 0 0 1\n"
                                           "tuple 1 1 1 0\n");
    REQUIRE(def.name == "c");
    REQUIRE(def.arity() == 4);
    REQUIRE(def.var_names == std::vector<std::string>{"x1", "x2", "x3", "x4"});
    REQUIRE(def.tuples.size() == 3);

    const auto again = parse_constraint_file(render_constraint_file(def));
    REQUIRE(again.tuples == def.tuples);
    REQUIRE(again.signature == def.signature);

    const auto mixed = parse_constraint_file("constraint m 2\n"
                                             "values 0 1\n"
                                             "values@1 t f u\n"
                                             "tuple 0 u\n");
    REQUIRE(mixed.signature[0].size() == 2);
    REQUIRE(mixed.signature[1].size() == 3);
    const auto mixed_again = parse_constraint_file(render_constraint_file(mixed));
    REQUIRE(mixed_again.signature == mixed.signature);
}

TEST_CASE("constraint file errors carry positions") {
    REQUIRE_THROWS_AS(parse_constraint_file(""), ParseError);
    REQUIRE_THROWS_AS(parse_constraint_file("values 0 1\nconstraint c 2\n"), ParseError);
    REQUIRE_THROWS_AS(parse_constraint_file("constraint c 2\nvalues 0 1\ntuple 0 2\n"),
                      ParseError);
    REQUIRE_THROWS_AS(parse_constraint_file("constraint c 2\nvalues 0 1\ntuple 0\n"), ParseError);
    REQUIRE_THROWS_AS(parse_constraint_file("constraint c 2\ntuple 0 1\n"), ParseError);
    try {
        parse_constraint_file("constraint c 2\nvalues 0 1\ntuple 0 2\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        REQUIRE(e.line() == 3);
    }
}

TEST_CASE("rule files parse the published examples") {
    ConstraintDef c3;
    c3.name = "c";
    c3.var_names = {"x", "y", "z"};
    c3.signature = testutil::uniform_signature(3, {"0", "1", "2"});
    c3.tuples = {{0, 0, 0}};

    const auto rules = parse_rule_file("c(0,Y,Z) ==> in(Y,[1,2]) | Z ## 2.", c3);
    REQUIRE(rules.size() == 1);
    const MembershipRule expect({{0, mask_of({0})}, {1, mask_of({1, 2})}}, {{2, 2}});
    REQUIRE(rules[0] == expect);

    const auto c = testutil::load_constraint("c.con");
    const auto fig1 = parse_rule_file("c(X, Y, Z, 0) ==> X ## 0, Y ## 0, Z ## 0.", c);
    REQUIRE(fig1.size() == 1);
    REQUIRE(normalized(fig1[0]) ==
            normalized(MembershipRule({{3, mask_of({0})}}, {{0, 0}, {1, 0}, {2, 0}})));
}

TEST_CASE("rule file diagnostics") {
    ConstraintDef c1;
    c1.name = "c";
    c1.var_names = {"x"};
    c1.signature = testutil::uniform_signature(1, {"0", "1"});
    c1.tuples = {{0}};

    // guard over a variable the head does not bind
    REQUIRE_THROWS_AS(parse_rule_file("c(X) ==> in(Q,[1]) | X ## 0.", c1), ParseError);
    // arity mismatch
    REQUIRE_THROWS_AS(parse_rule_file("c(X, Y) ==> X ## 0.", c1), ParseError);
    // value outside the universe
    REQUIRE_THROWS_AS(parse_rule_file("c(X) ==> X ## 7.", c1), ParseError);
    // wrong constraint name
    REQUIRE_THROWS_AS(parse_rule_file("d(X) ==> X ## 0.", c1), ParseError);
    // missing terminator
    REQUIRE_THROWS_AS(parse_rule_file("c(X) ==> X ## 0", c1), ParseError);
    // body variable unbound
    REQUIRE_THROWS_AS(parse_rule_file("c(0) ==> Z ## 0.", c1), ParseError);
    // no body
    REQUIRE_THROWS_AS(parse_rule_file("c(X) ==> in(X,[0]).", c1), ParseError);

    try {
        parse_rule_file("% comment line\nc(X) ==> in(Q,[1]) | X ## 0.", c1);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        REQUIRE(e.line() == 2);
        REQUIRE(e.col() > 1);
    }
}

TEST_CASE("rendered rules parse back to the same set") {
    for (const char* name : {"c.con", "equ3.con", "and3.con"}) {
        const auto def = testutil::load_constraint(name);
        const auto rules = generate_membership_rules(def);
        const auto parsed = parse_rule_file(render_rule_file(rules, def), def);
        REQUIRE(parsed.size() == rules.size());
        for (std::size_t i = 0; i < rules.size(); ++i)
            REQUIRE(normalized(parsed[i]) == normalized(rules[i]));
    }
    // empty sequence renders to a header-only file
    const auto def = testutil::load_constraint("c.con");
    const auto text = render_rule_file({}, def);
    REQUIRE(parse_rule_file(text, def).empty());

    // a body atom on a singleton-condition variable keeps that variable
    // named, with the condition rendered as a guard
    const auto equ3 = testutil::load_constraint("equ3.con");
    const MembershipRule overlap({{0, mask_of({0})}}, {{0, 2}, {1, 2}});
    const auto rendered = render_rule_file(std::vector<MembershipRule>{overlap}, equ3);
    REQUIRE(rendered.find("in(X,[t])") != std::string::npos);
    const auto back = parse_rule_file(rendered, equ3);
    REQUIRE(back.size() == 1);
    REQUIRE(normalized(back[0]) == normalized(overlap));
}

TEST_CASE("artifacts round-trip bit for bit and behave identically") {
    const auto def = testutil::load_constraint("equ3.con");
    const auto compiled =
        compute_friends_obviated(make_system(def, generate_membership_rules(def)));
    const std::string text = render_artifact(compiled, def);
    const auto loaded = parse_artifact(text);

    REQUIRE(render_artifact(loaded.compiled, loaded.def) == text);
    REQUIRE(loaded.compiled.rule_count() == compiled.rule_count());
    for (std::uint32_t r = 0; r < compiled.rule_count(); ++r) {
        REQUIRE(std::equal(compiled.friends(r).begin(), compiled.friends(r).end(),
                           loaded.compiled.friends(r).begin(), loaded.compiled.friends(r).end()));
        REQUIRE(std::equal(compiled.obviated(r).begin(), compiled.obviated(r).end(),
                           loaded.compiled.obviated(r).begin(),
                           loaded.compiled.obviated(r).end()));
    }
    const auto live = all_rule_indices(compiled.rule_count());
    for (const auto& s : enumerate_stores(def.signature, false)) {
        const auto a = r_fixpoint(compiled, s, live);
        const auto b = r_fixpoint(loaded.compiled, s, live);
        REQUIRE(a.final_store == b.final_store);
        REQUIRE(a.f_fin == b.f_fin);
        REQUIRE(a.condition_tests == b.condition_tests);
    }
}

TEST_CASE("store literals") {
    const auto def = testutil::load_constraint("equ3.con");
    const Store s = parse_store_literal("x={f}, y={f,t,u}, z={f,u}", def.var_names,
                                        def.signature);
    REQUIRE(s.domain(0) == mask_of({1}));
    REQUIRE(s.domain(1) == mask_of({0, 1, 2}));
    REQUIRE(s.domain(2) == mask_of({1, 2}));

    // omitted variables default to the full universe
    const Store partial = parse_store_literal("y={t}", def.var_names, def.signature);
    REQUIRE(partial.domain(0) == def.signature[0].full());
    REQUIRE(partial.domain(1) == mask_of({0}));

    const Store again = parse_store_literal(
        render_store_literal(s, def.var_names, def.signature), def.var_names, def.signature);
    REQUIRE(again == s);

    REQUIRE_THROWS_AS(parse_store_literal("q={t}", def.var_names, def.signature), ParseError);
    REQUIRE_THROWS_AS(parse_store_literal("x={bogus}", def.var_names, def.signature), ParseError);
    REQUIRE_THROWS_AS(parse_store_literal("x={t},x={f}", def.var_names, def.signature),
                      ParseError);
    REQUIRE_THROWS_AS(parse_store_literal("x=t", def.var_names, def.signature), ParseError);
}

TEST_CASE("csp files load and solve") {
    const Csp csp = load_csp_file(testutil::data_path("csp/and2.csp"), RuleKind::membership);
    REQUIRE(csp.var_names == std::vector<std::string>{"x", "y", "z"});
    REQUIRE(csp.constraints.size() == 1);
    SearchConfig cfg;
    cfg.labelling = Labelling::lexicographic;
    cfg.fixpoint_record_limit = 1000;
    REQUIRE(search(csp, cfg).solutions == 4);

    const Csp chain = load_csp_file(testutil::data_path("csp/chain3.csp"), RuleKind::membership);
    REQUIRE(chain.var_names.size() == 5);
    REQUIRE(chain.constraints.size() == 2);
    cfg.fixpoint_record_limit = 100000;
    // solutions: assignments of (a,b,d) determine c and e
    REQUIRE(search(chain, cfg).solutions == 8);
}

TEST_CASE("csv reports are deterministic and carry the expected columns") {
    const auto def = testutil::load_constraint("and2.con");
    const auto compiled =
        compute_friends_obviated(make_system(def, generate_equality_rules(def)));
    const auto csv = render_stats_csv(solving_stats(compiled));
    REQUIRE(csv == render_stats_csv(solving_stats(compiled)));
    REQUIRE(csv.rfind("rule_id,degree,friends_size,obviated_size\n", 0) == 0);
    REQUIRE(csv.find("# 6 solving / 6") != std::string::npos);

    const auto rules = generate_equality_rules(def);
    const auto report = minimize(rules, def.signature, {});
    const auto mcsv = render_minimize_csv(report, rules);
    REQUIRE(mcsv.rfind("rule_id,status,removed_atoms,degree\n", 0) == 0);
    REQUIRE(mcsv.find("# redundancy_ratio") != std::string::npos);

    REQUIRE(render_search_csv_header() ==
            "seed,scheduler,solutions,fixpoints,condition_tests,body_apps,rules_removed\n");
}
