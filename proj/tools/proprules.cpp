// Command-line surface: generate, compile, minimize, propagate, solve,
// bench, stats. Exit codes: 0 ok, 1 usage, 2 parse error, 3 size limit.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proprules/errors.hpp"
#include "proprules/redundancy.hpp"
#include "proprules/rulegen.hpp"
#include "proprules/solver.hpp"
#include "proprules/textio.hpp"

namespace {

using namespace proprules;

RuleKind kind_of(const std::string& s) {
    if (s == "equality")
        return RuleKind::equality;
    if (s == "membership")
        return RuleKind::membership;
    throw CLI::ValidationError("--kind", "expected 'equality' or 'membership'");
}

SchedulerKind scheduler_of(const std::string& s) {
    if (s == "GI" || s == "gi")
        return SchedulerKind::gi;
    if (s == "R" || s == "r")
        return SchedulerKind::r;
    throw CLI::ValidationError("--scheduler", "expected 'GI' or 'R'");
}

struct Args {
    std::string constraint_file;
    std::string rule_file;
    std::string artifact_file;
    std::string csp_file;
    std::string output;
    std::string report_file;
    std::string kind = "membership";
    std::string scheduler = "R";
    std::string order = "cost";
    std::string store_literal;
    std::string dead_check = "singleton-only";
    std::string labelling = "random";
    std::uint64_t seed = 0;
    std::uint64_t limit = 1000;
    std::uint64_t seeds = 10;
    std::int64_t first_rule = -1;
    bool serial = false;
};

int run_generate(const Args& args) {
    const auto def = load_constraint_file(args.constraint_file);
    const auto rules =
        generate_rules(def, kind_of(args.kind), {}, args.serial ? Exec::serial : Exec::parallel);
    std::cout << render_rule_file(rules, def);
    return 0;
}

int run_compile(const Args& args) {
    const auto def = load_constraint_file(args.constraint_file);
    auto rules = parse_rule_file(read_file(args.rule_file), def);
    const auto t0 = std::chrono::steady_clock::now();
    auto compiled = compute_friends_obviated(MembershipSystem(def.signature, std::move(rules)),
                                             {}, args.serial ? Exec::serial : Exec::parallel);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    write_file(args.output, render_artifact(compiled, def));
    const auto stats = solving_stats(compiled);
    std::cout << "compiled " << compiled.rule_count() << " rules for " << def.name << ": "
              << stats.solving_count << " solving, friends/obviated construction " << ms
              << " ms\n";
    return 0;
}

int run_minimize(const Args& args) {
    const auto def = load_constraint_file(args.constraint_file);
    const auto rules = parse_rule_file(read_file(args.rule_file), def);
    MinimizeOptions options;
    if (args.order == "cost") {
        options.order = MinimizeOrder::cost_descending;
    } else if (args.order.rfind("paper:", 0) == 0) {
        options.order = MinimizeOrder::explicit_order;
        options.explicit_atoms = parse_atom_order(read_file(args.order.substr(6)), rules);
    } else {
        throw CLI::ValidationError("--order", "expected 'cost' or 'paper:<file>'");
    }
    const auto report = minimize(rules, def.signature, options);
    const std::string reduced = render_rule_file(report.kept, def);
    if (args.output.empty())
        std::cout << reduced;
    else
        write_file(args.output, reduced);
    const std::string csv = render_minimize_csv(report, rules);
    if (args.report_file.empty())
        std::cerr << csv;
    else
        write_file(args.report_file, csv);
    return 0;
}

int run_propagate(const Args& args) {
    auto loaded = load_artifact(args.artifact_file);
    const auto& sig = loaded.def.signature;
    const Store start = parse_store_literal(args.store_literal, loaded.def.var_names, sig);
    SchedulerOptions opt;
    opt.dead_check =
        args.dead_check == "always" ? DeadRuleCheck::always : DeadRuleCheck::singleton_only;
    if (args.first_rule >= 0) {
        if (static_cast<std::uint64_t>(args.first_rule) >= loaded.compiled.rule_count())
            throw CLI::ValidationError("--first-rule", "rule index out of range");
        opt.first_choice = static_cast<std::uint32_t>(args.first_rule);
    }

    Trace<Store> trace;
    if (scheduler_of(args.scheduler) == SchedulerKind::r) {
        trace = r_fixpoint(loaded.compiled, start, all_rule_indices(loaded.compiled.rule_count()),
                           opt);
    } else {
        trace = gi_fixpoint(loaded.compiled.system(), start, opt);
    }
    std::cout << "store: " << render_store_literal(trace.final_store, loaded.def.var_names, sig)
              << "\n"
              << "live_rules: " << trace.f_fin.size() << "\n"
              << "condition_tests: " << trace.condition_tests << "\n"
              << "body_applications: " << trace.body_applications << "\n"
              << "rules_removed: " << trace.rules_removed << "\n";
    return 0;
}

SearchConfig config_of(const Args& args, std::uint64_t seed) {
    SearchConfig cfg;
    cfg.seed = seed;
    cfg.labelling = args.labelling == "lex" ? Labelling::lexicographic
                                            : Labelling::random_var_val_action;
    cfg.fixpoint_record_limit = args.limit;
    cfg.scheduler = scheduler_of(args.scheduler);
    return cfg;
}

int run_solve(const Args& args) {
    const Csp csp = load_csp_file(args.csp_file, kind_of(args.kind));
    const auto report = search(csp, config_of(args, args.seed));
    std::cout << render_search_csv_header()
              << render_search_csv_row(args.seed, scheduler_of(args.scheduler), report);
    return 0;
}

int run_bench(const Args& args) {
    const Csp csp = load_csp_file(args.csp_file, kind_of(args.kind));
    const std::size_t n = static_cast<std::size_t>(args.seeds);
    std::vector<SearchReport> gi(n), r(n);
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) if (!args.serial)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        Args a = args;
        a.scheduler = "GI";
        gi[static_cast<std::size_t>(i)] =
            search(csp, config_of(a, static_cast<std::uint64_t>(i)));
        a.scheduler = "R";
        r[static_cast<std::size_t>(i)] =
            search(csp, config_of(a, static_cast<std::uint64_t>(i)));
    }
    std::cout << render_search_csv_header();
    std::size_t r_not_worse = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::cout << render_search_csv_row(i, SchedulerKind::gi, gi[i])
                  << render_search_csv_row(i, SchedulerKind::r, r[i]);
        if (r[i].counters.condition_tests <= gi[i].counters.condition_tests)
            ++r_not_worse;
    }
    std::cerr << "# R condition tests <= GI on " << r_not_worse << "/" << n << " seeds\n";
    return 0;
}

int run_stats(const Args& args) {
    const auto loaded = load_artifact(args.artifact_file);
    std::cout << render_stats_csv(solving_stats(loaded.compiled));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"schedulers, generation and minimization for constraint propagation rules"};
    app.require_subcommand(1);
    Args args;

    auto* generate = app.add_subcommand("generate", "generate all minimal valid rules");
    generate->add_option("constraint", args.constraint_file, "constraint file")->required();
    generate->add_option("--kind", args.kind, "equality|membership");
    generate->add_flag("--serial", args.serial, "disable parallel enumeration");

    auto* compile = app.add_subcommand("compile", "precompute friends/obviated tables");
    compile->add_option("rules", args.rule_file, "rule file")->required();
    compile->add_option("constraint", args.constraint_file, "constraint file")->required();
    compile->add_option("-o,--output", args.output, "artifact path")->required();
    compile->add_flag("--serial", args.serial, "disable parallel analysis");

    auto* minimize = app.add_subcommand("minimize", "drop redundant rules and body atoms");
    minimize->add_option("rules", args.rule_file, "rule file")->required();
    minimize->add_option("constraint", args.constraint_file, "constraint file")->required();
    minimize->add_option("--order", args.order, "cost | paper:<order-file>");
    minimize->add_option("-o,--output", args.output, "reduced rule file (default stdout)");
    minimize->add_option("--report", args.report_file, "CSV report path (default stderr)");

    auto* propagate = app.add_subcommand("propagate", "run one fixpoint from a store");
    propagate->add_option("artifact", args.artifact_file, "compiled artifact")->required();
    propagate->add_option("--store", args.store_literal, "store literal, e.g. \"x={0,1},y={1}\"");
    propagate->add_option("--scheduler", args.scheduler, "GI|R");
    propagate->add_option("--dead-check", args.dead_check, "always|singleton-only");
    propagate->add_option("--first-rule", args.first_rule, "choose this rule first (0-based)");

    auto* solve = app.add_subcommand("solve", "search with propagation and splitting");
    solve->add_option("csp", args.csp_file, "csp file")->required();
    solve->add_option("--seed", args.seed, "random seed");
    solve->add_option("--limit", args.limit, "recorded-fixpoint limit");
    solve->add_option("--scheduler", args.scheduler, "GI|R");
    solve->add_option("--kind", args.kind, "equality|membership");
    solve->add_option("--labelling", args.labelling, "random|lex");

    auto* bench = app.add_subcommand("bench", "run both schedulers over many seeds");
    bench->add_option("csp", args.csp_file, "csp file")->required();
    bench->add_option("--seeds", args.seeds, "number of seeds");
    bench->add_option("--limit", args.limit, "recorded-fixpoint limit");
    bench->add_option("--kind", args.kind, "equality|membership");
    bench->add_option("--labelling", args.labelling, "random|lex");
    bench->add_flag("--serial", args.serial, "do not fan seeds across threads");

    auto* stats = app.add_subcommand("stats", "solving-degree CSV for an artifact");
    stats->add_option("artifact", args.artifact_file, "compiled artifact")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (generate->parsed())
            return run_generate(args);
        if (compile->parsed())
            return run_compile(args);
        if (minimize->parsed())
            return run_minimize(args);
        if (propagate->parsed())
            return run_propagate(args);
        if (solve->parsed())
            return run_solve(args);
        if (bench->parsed())
            return run_bench(args);
        if (stats->parsed())
            return run_stats(args);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const SizeLimitError& e) {
        std::cerr << "size limit: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
