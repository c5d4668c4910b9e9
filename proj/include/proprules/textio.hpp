#pragma once

// Text formats and their parsers:
//
//   constraint file (.con)   extensional constraint definition
//   rule file                one propagation rule per line,
//                            c(0,Y,Z) ==> in(Y,[1,2]) | Z ## 2.
//   artifact                 compiled rule set with friends/obviated tables
//   csp file                 variables plus posted constraints
//   store literal            x={0,1},y={1}  (omitted variables stay full)
//
// All parsers raise ParseError with a 1-based line/column position.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "proprules/membership.hpp"
#include "proprules/redundancy.hpp"
#include "proprules/rulegen.hpp"
#include "proprules/solver.hpp"
#include "proprules/store.hpp"

namespace proprules {

// --- constraint files -----------------------------------------------------
//   constraint c 4        # name, arity
//   vars x y z u          # optional; defaults to x1..xn
//   values 0 1            # default universe for all variables
//   values@2 t f u        # optional per-variable override (0-based)
//   tuple 0 1 0 1
ConstraintDef parse_constraint_file(std::string_view text);
std::string render_constraint_file(const ConstraintDef& def);
ConstraintDef load_constraint_file(const std::filesystem::path& path);

// --- rule files -------------------------------------------------------------
// Head constants bind a position to one value; in(Var,[v,...]) guards give
// the remaining conditions; body atoms are Var ## value. Variables start
// with an uppercase letter or '_', rules end with '.', '%' starts a comment.
std::vector<MembershipRule> parse_rule_file(std::string_view text, const ConstraintDef& def);
std::string render_rule_file(std::span<const MembershipRule> rules, const ConstraintDef& def);

// --- compiled artifacts -----------------------------------------------------
std::string render_artifact(const CompiledRuleSet<MembershipSystem>& compiled,
                            const ConstraintDef& def);
struct LoadedArtifact {
    ConstraintDef def; // no tuples
    CompiledRuleSet<MembershipSystem> compiled;
};
LoadedArtifact parse_artifact(std::string_view text);
LoadedArtifact load_artifact(const std::filesystem::path& path);

// --- store literals ---------------------------------------------------------
Store parse_store_literal(std::string_view text, const std::vector<std::string>& var_names,
                          const Signature& sig);
std::string render_store_literal(const Store& s, const std::vector<std::string>& var_names,
                                 const Signature& sig);

// --- csp files ---------------------------------------------------------------
//   domain bool 0 1            # named universe
//   var x y z : bool           # variables sharing a universe
//   use ../some/file.con       # optional explicit constraint source
//   post and2(x, y, z)         # otherwise resolved as <csp dir>/<name>.con
Csp load_csp_file(const std::filesystem::path& path, RuleKind kind,
                  const GenLimits& limits = {});

// --- reports ------------------------------------------------------------------
std::string render_stats_csv(const SolvingStats& stats);
std::string render_minimize_csv(const RedundancyReport& report,
                                std::span<const MembershipRule> rules);
std::string render_search_csv_header();
std::string render_search_csv_row(std::uint64_t seed, SchedulerKind scheduler,
                                  const SearchReport& report);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace proprules
