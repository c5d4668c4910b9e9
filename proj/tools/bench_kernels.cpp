// Compares the OpenMP kernels against their serial reference and the two
// schedulers against each other:
//
//   * rule generation, serial vs parallel candidate enumeration
//   * friends/obviated construction, serial vs parallel per-rule analysis
//   * GI vs R condition-test counts across a full store carrier
//
// Usage: bench_kernels [constraint-dir] [reps]

#include <cstdio>
#include <cstdlib>
#include <string>

#if defined(_OPENMP)
#include <omp.h>
#else
#include <chrono>
#endif

#include "proprules/redundancy.hpp"
#include "proprules/rulegen.hpp"
#include "proprules/textio.hpp"

using namespace proprules;

namespace {

double now() {
#if defined(_OPENMP)
    return omp_get_wtime();
#else
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
#endif
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e100;
    for (int i = 0; i < reps; ++i) {
        const double t0 = now();
        fn();
        best = std::min(best, now() - t0);
    }
    return best;
}

void bench_constraint(const ConstraintDef& def, RuleKind kind, const char* label, int reps) {
    const double gen_serial =
        time_best_of(reps, [&] { (void)generate_rules(def, kind, {}, Exec::serial); });
    const double gen_parallel =
        time_best_of(reps, [&] { (void)generate_rules(def, kind, {}, Exec::parallel); });
    auto rules = generate_rules(def, kind);
    const std::size_t n = rules.size();

    MembershipSystem sys(def.signature, rules);
    const double fo_serial =
        time_best_of(reps, [&] { (void)compute_friends_obviated_serial(sys); });
    const double fo_parallel = time_best_of(reps, [&] { (void)compute_friends_obviated(sys); });

    // scheduler comparison: one fixpoint from every store of the carrier
    const auto compiled = compute_friends_obviated(sys);
    const auto carrier = enumerate_stores(def.signature, false);
    const auto live = all_rule_indices(n);
    std::uint64_t gi_tests = 0, r_tests = 0;
    double gi_time = 0, r_time = 0;
    {
        const double t0 = now();
        for (const auto& s : carrier)
            gi_tests += gi_fixpoint(sys, s).condition_tests;
        gi_time = now() - t0;
        const double t1 = now();
        for (const auto& s : carrier)
            r_tests += r_fixpoint(compiled, s, live).condition_tests;
        r_time = now() - t1;
    }

    std::printf("%-18s %5zu rules | gen %8.2f ms /%8.2f ms | f&o %8.2f ms /%8.2f ms\n", label, n,
                gen_serial * 1e3, gen_parallel * 1e3, fo_serial * 1e3, fo_parallel * 1e3);
    std::printf("%-18s carrier %4zu  | GI %10llu tests %8.2f ms | R %10llu tests %8.2f ms "
                "(%.0f%%)\n",
                "", carrier.size(), (unsigned long long)gi_tests, gi_time * 1e3,
                (unsigned long long)r_tests, r_time * 1e3,
                100.0 * (double)r_tests / (double)gi_tests);
}

} // namespace

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "data/constraints";
    const int reps = argc > 2 ? std::atoi(argv[2]) : 5;
#if defined(_OPENMP)
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without openmp; parallel columns run the serial path\n");
#endif
    std::printf("%-18s %11s | %-12s serial / parallel | %-12s serial / parallel\n", "constraint",
                "", "generate", "friends&obviated");
    try {
        bench_constraint(load_constraint_file(dir + "/equ3.con"), RuleKind::membership,
                         "equ3 membership", reps);
        bench_constraint(load_constraint_file(dir + "/and3.con"), RuleKind::membership,
                         "and3 membership", reps);
        bench_constraint(load_constraint_file(dir + "/c.con"), RuleKind::equality, "c equality",
                         reps);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
