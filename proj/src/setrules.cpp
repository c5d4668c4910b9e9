#include "proprules/setrules.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "proprules/errors.hpp"

namespace proprules {

SetRuleSystem::SetRuleSystem(std::size_t atom_count, std::vector<SetRule> rules)
    : atom_count_(atom_count),
      full_(atom_count >= 64 ? ~AtomSet{0} : (AtomSet{1} << atom_count) - 1),
      rules_(std::move(rules)) {
    if (atom_count > 64)
        throw SizeLimitError("atom universe exceeds 64 atoms");
    for (const auto& r : rules_)
        if ((r.premises & ~full_) != 0 || (r.conclusions & ~full_) != 0)
            throw std::invalid_argument("set rule references atoms outside the universe");
}

AtomSet closure(const SetRuleSystem& sys, AtomSet initial) {
    return closure(compute_friends_obviated(sys), initial);
}

AtomSet closure(const CompiledRuleSet<SetRuleSystem>& compiled, AtomSet initial) {
    const auto live = all_rule_indices(compiled.rule_count());
    return r_fixpoint(compiled, initial, live).final_store;
}

AtomSet closure_gi(const SetRuleSystem& sys, AtomSet initial) {
    return gi_fixpoint(sys, initial).final_store;
}

namespace {

std::uint32_t atom_index(SetRuleFile& file, const std::string& name) {
    for (std::uint32_t i = 0; i < file.atoms.size(); ++i)
        if (file.atoms[i] == name)
            return i;
    if (file.atoms.size() >= 64)
        throw SizeLimitError("atom universe exceeds 64 atoms");
    file.atoms.push_back(name);
    return static_cast<std::uint32_t>(file.atoms.size() - 1);
}

} // namespace

SetRuleFile parse_set_rules(std::string_view text) {
    SetRuleFile file;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);

        std::vector<std::string> tokens;
        std::string cur;
        for (char ch : line) {
            if (std::isspace(static_cast<unsigned char>(ch))) {
                if (!cur.empty())
                    tokens.push_back(std::exchange(cur, {}));
            } else {
                cur += ch;
            }
        }
        if (!cur.empty())
            tokens.push_back(cur);
        if (tokens.empty())
            continue;

        const auto arrow = std::find(tokens.begin(), tokens.end(), "->");
        if (arrow == tokens.end())
            throw ParseError("expected '->' in rule", line_no, 1);
        if (arrow + 1 == tokens.end())
            throw ParseError("rule has no conclusions", line_no, 1);
        SetRule rule;
        for (auto it = tokens.begin(); it != arrow; ++it)
            rule.premises |= AtomSet{1} << atom_index(file, *it);
        for (auto it = arrow + 1; it != tokens.end(); ++it)
            rule.conclusions |= AtomSet{1} << atom_index(file, *it);
        file.rules.push_back(rule);
    }
    return file;
}

std::string render_set_rules(const SetRuleFile& file) {
    std::string out;
    auto emit = [&](AtomSet set) {
        for (std::uint32_t i = 0; i < file.atoms.size(); ++i)
            if ((set >> i) & 1u) {
                out += ' ';
                out += file.atoms[i];
            }
    };
    for (const auto& r : file.rules) {
        std::string_view sep;
        for (std::uint32_t i = 0; i < file.atoms.size(); ++i)
            if ((r.premises >> i) & 1u) {
                out += sep;
                out += file.atoms[i];
                sep = " ";
            }
        out += sep.empty() ? "->" : " ->";
        emit(r.conclusions);
        out += '\n';
    }
    return out;
}

} // namespace proprules
