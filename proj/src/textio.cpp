#include "proprules/textio.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "proprules/errors.hpp"

namespace proprules {

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------- line files

struct Line {
    int number;
    std::vector<std::string> tokens;
};

// Splits on whitespace, dropping blank lines and, unless told otherwise,
// '#' comments. The artifact format keeps '#' verbatim: its rule lines
// contain '##' atoms.
std::vector<Line> tokenize_lines(std::string_view text, bool strip_comments = true) {
    std::vector<Line> lines;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        if (strip_comments)
            if (const auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
        Line out{line_no, {}};
        std::string cur;
        for (char ch : line) {
            if (std::isspace(static_cast<unsigned char>(ch))) {
                if (!cur.empty())
                    out.tokens.push_back(std::exchange(cur, {}));
            } else {
                cur += ch;
            }
        }
        if (!cur.empty())
            out.tokens.push_back(cur);
        if (!out.tokens.empty())
            lines.push_back(std::move(out));
    }
    return lines;
}

long parse_long(const std::string& tok, int line, const char* what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(tok, &used);
        if (used != tok.size())
            throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("expected ") + what + ", got '" + tok + "'", line, 1);
    }
}

} // namespace

// ------------------------------------------------------------ constraint files

ConstraintDef parse_constraint_file(std::string_view text) {
    const auto lines = tokenize_lines(text);
    if (lines.empty())
        throw ParseError("empty constraint file", 1, 1);

    ConstraintDef def;
    std::size_t arity = 0;
    std::optional<Universe> default_universe;
    std::map<std::size_t, Universe> overrides;
    bool tuples_started = false;

    for (const auto& line : lines) {
        const auto& t = line.tokens;
        const std::string& kw = t[0];
        if (kw == "constraint") {
            if (!def.name.empty())
                throw ParseError("duplicate constraint line", line.number, 1);
            if (t.size() != 3)
                throw ParseError("expected: constraint <name> <arity>", line.number, 1);
            def.name = t[1];
            const long a = parse_long(t[2], line.number, "arity");
            if (a < 1 || a > 32)
                throw ParseError("arity out of range", line.number, 1);
            arity = static_cast<std::size_t>(a);
        } else if (def.name.empty()) {
            throw ParseError("constraint line must come first", line.number, 1);
        } else if (kw == "vars") {
            if (t.size() != arity + 1)
                throw ParseError("vars line must name every variable", line.number, 1);
            def.var_names.assign(t.begin() + 1, t.end());
        } else if (kw == "values" || kw.rfind("values@", 0) == 0) {
            if (tuples_started)
                throw ParseError("values line after tuples", line.number, 1);
            if (t.size() < 2)
                throw ParseError("values line needs at least one value", line.number, 1);
            std::vector<std::string> syms(t.begin() + 1, t.end());
            try {
                Universe u(std::move(syms));
                if (kw == "values") {
                    default_universe = std::move(u);
                } else {
                    const long i = parse_long(kw.substr(7), line.number, "variable index");
                    if (i < 0 || static_cast<std::size_t>(i) >= arity)
                        throw ParseError("values@ index out of range", line.number, 1);
                    overrides.insert_or_assign(static_cast<std::size_t>(i), std::move(u));
                }
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), line.number, 1);
            }
        } else if (kw == "tuple") {
            if (!tuples_started) {
                for (std::size_t i = 0; i < arity; ++i) {
                    if (auto at = overrides.find(i); at != overrides.end())
                        def.signature.push_back(at->second);
                    else if (default_universe)
                        def.signature.push_back(*default_universe);
                    else
                        throw ParseError("no values line covers variable " + std::to_string(i),
                                         line.number, 1);
                }
                tuples_started = true;
            }
            if (t.size() != arity + 1)
                throw ParseError("tuple arity mismatch", line.number, 1);
            std::vector<std::uint32_t> tuple;
            tuple.reserve(arity);
            for (std::size_t i = 0; i < arity; ++i) {
                const auto idx = def.signature[i].index_of(t[i + 1]);
                if (!idx)
                    throw ParseError("value '" + t[i + 1] + "' outside the universe of variable " +
                                         std::to_string(i),
                                     line.number, 1);
                tuple.push_back(*idx);
            }
            def.tuples.push_back(std::move(tuple));
        } else {
            throw ParseError("unknown directive '" + kw + "'", line.number, 1);
        }
    }
    if (def.name.empty())
        throw ParseError("missing constraint line", lines.back().number, 1);
    if (def.var_names.empty())
        for (std::size_t i = 0; i < arity; ++i)
            def.var_names.push_back("x" + std::to_string(i + 1));
    try {
        validate_constraint(def);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), lines.back().number, 1);
    }
    return def;
}

namespace {

void render_signature_lines(std::string& out, const ConstraintDef& def) {
    out += "vars";
    for (const auto& v : def.var_names) {
        out += ' ';
        out += v;
    }
    out += '\n';
    out += "values";
    for (const auto& s : def.signature[0].symbols()) {
        out += ' ';
        out += s;
    }
    out += '\n';
    for (std::size_t i = 1; i < def.signature.size(); ++i) {
        if (def.signature[i] == def.signature[0])
            continue;
        out += "values@" + std::to_string(i);
        for (const auto& s : def.signature[i].symbols()) {
            out += ' ';
            out += s;
        }
        out += '\n';
    }
}

} // namespace

std::string render_constraint_file(const ConstraintDef& def) {
    std::string out = "constraint " + def.name + ' ' + std::to_string(def.arity()) + '\n';
    render_signature_lines(out, def);
    for (const auto& t : def.tuples) {
        out += "tuple";
        for (std::size_t i = 0; i < t.size(); ++i) {
            out += ' ';
            out += def.signature[i].symbol(t[i]);
        }
        out += '\n';
    }
    return out;
}

ConstraintDef load_constraint_file(const std::filesystem::path& path) {
    return parse_constraint_file(read_file(path));
}

// ----------------------------------------------------------------- rule files

namespace {

struct Token {
    enum Kind { word, punct, eof } kind;
    std::string text;
    int line, col;
};

class RuleLexer {
public:
    explicit RuleLexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        advance();
        return t;
    }
    bool at_eof() const { return tok_.kind == Token::eof; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, tok_.line, tok_.col);
    }

    Token expect_word(const char* what) {
        if (tok_.kind != Token::word)
            fail(std::string("expected ") + what);
        return next();
    }
    void expect_punct(const std::string& p) {
        if (tok_.kind != Token::punct || tok_.text != p)
            fail("expected '" + p + "'");
        advance();
    }
    bool accept_punct(const std::string& p) {
        if (tok_.kind == Token::punct && tok_.text == p) {
            advance();
            return true;
        }
        return false;
    }

private:
    void advance() {
        for (;;) {
            while (pos_ < text_.size() &&
                   std::isspace(static_cast<unsigned char>(text_[pos_])))
                step();
            if (pos_ < text_.size() && text_[pos_] == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    step();
                continue;
            }
            break;
        }
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= text_.size()) {
            tok_ = Token{Token::eof, "", line_, col_};
            return;
        }
        const char c = text_[pos_];
        if (is_word_char(c)) {
            std::string w;
            while (pos_ < text_.size() && is_word_char(text_[pos_])) {
                w += text_[pos_];
                step();
            }
            tok_ = Token{Token::word, std::move(w), tok_.line, tok_.col};
            return;
        }
        if (c == '=') {
            if (text_.substr(pos_, 3) == "==>") {
                step();
                step();
                step();
                tok_ = Token{Token::punct, "==>", tok_.line, tok_.col};
                return;
            }
            throw ParseError("stray '='; did you mean '==>'?", line_, col_);
        }
        if (c == '#') {
            if (text_.substr(pos_, 2) == "##") {
                step();
                step();
                tok_ = Token{Token::punct, "##", tok_.line, tok_.col};
                return;
            }
            throw ParseError("stray '#'; did you mean '##'?", line_, col_);
        }
        if (std::string_view("()[],|.").find(c) != std::string_view::npos) {
            step();
            tok_ = Token{Token::punct, std::string(1, c), tok_.line, tok_.col};
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }

    void step() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_{Token::eof, "", 1, 1};
};

bool is_variable_name(const std::string& w) {
    return !w.empty() && (std::isupper(static_cast<unsigned char>(w[0])) || w[0] == '_');
}

std::uint32_t symbol_index(const RuleLexer& lex, const Universe& u, const std::string& name,
                           std::size_t var_pos) {
    const auto idx = u.index_of(name);
    if (!idx)
        lex.fail("value '" + name + "' outside the universe of variable " +
                 std::to_string(var_pos));
    return *idx;
}

MembershipRule parse_one_rule(RuleLexer& lex, const ConstraintDef& def) {
    const Token head = lex.expect_word("constraint name");
    if (head.text != def.name)
        throw ParseError("rule head '" + head.text + "' does not match constraint '" + def.name +
                             "'",
                         head.line, head.col);
    lex.expect_punct("(");

    // -1: position bound to a constant; otherwise index into var_at
    std::vector<std::string> var_of_pos(def.arity());
    std::map<std::string, std::uint32_t> pos_of_var;
    std::vector<Condition> conditions;
    for (std::uint32_t i = 0; i < def.arity(); ++i) {
        if (i)
            lex.expect_punct(",");
        const Token arg = lex.expect_word("head argument");
        if (is_variable_name(arg.text)) {
            if (!pos_of_var.emplace(arg.text, i).second)
                throw ParseError("variable '" + arg.text + "' repeats in the head", arg.line,
                                 arg.col);
            var_of_pos[i] = arg.text;
        } else {
            const auto idx = def.signature[i].index_of(arg.text);
            if (!idx)
                throw ParseError("value '" + arg.text + "' outside the universe of variable " +
                                     std::to_string(i),
                                 arg.line, arg.col);
            conditions.push_back(Condition{i, DomainSet::single(*idx)});
        }
    }
    lex.expect_punct(")");
    lex.expect_punct("==>");

    struct Item {
        bool is_guard;
        Condition guard;
        BodyAtom atom;
        int line, col;
    };
    auto parse_item = [&]() -> Item {
        const Token w = lex.expect_word("guard or body atom");
        if (w.text == "in" && lex.peek().kind == Token::punct && lex.peek().text == "(") {
            lex.expect_punct("(");
            const Token var = lex.expect_word("variable");
            const auto at = pos_of_var.find(var.text);
            if (at == pos_of_var.end())
                throw ParseError("guard variable '" + var.text + "' not bound in the head",
                                 var.line, var.col);
            lex.expect_punct(",");
            lex.expect_punct("[");
            DomainSet allowed = DomainSet::none();
            for (;;) {
                const Token sym = lex.expect_word("value");
                allowed = allowed.with(symbol_index(lex, def.signature[at->second], sym.text,
                                                    at->second));
                if (!lex.accept_punct(","))
                    break;
            }
            lex.expect_punct("]");
            lex.expect_punct(")");
            return Item{true, Condition{at->second, allowed}, {}, w.line, w.col};
        }
        if (!is_variable_name(w.text))
            throw ParseError("expected a variable or in(...) guard, got '" + w.text + "'", w.line,
                             w.col);
        const auto at = pos_of_var.find(w.text);
        if (at == pos_of_var.end())
            throw ParseError("body variable '" + w.text + "' not bound in the head", w.line,
                             w.col);
        lex.expect_punct("##");
        const Token sym = lex.expect_word("value");
        const std::uint32_t value =
            symbol_index(lex, def.signature[at->second], sym.text, at->second);
        return Item{false, {}, BodyAtom{at->second, value}, w.line, w.col};
    };

    std::vector<Item> first;
    for (;;) {
        first.push_back(parse_item());
        if (!lex.accept_punct(","))
            break;
    }
    std::vector<Item> body_items;
    if (lex.accept_punct("|")) {
        for (const auto& item : first)
            if (!item.is_guard)
                throw ParseError("body atom before '|'", item.line, item.col);
        for (;;) {
            body_items.push_back(parse_item());
            if (!lex.accept_punct(","))
                break;
        }
    } else {
        body_items = std::move(first);
        first.clear();
    }
    lex.expect_punct(".");

    for (const auto& item : first) {
        bool dup = false;
        for (const auto& c : conditions)
            dup |= (c.var == item.guard.var);
        if (dup)
            throw ParseError("duplicate condition for one variable", item.line, item.col);
        conditions.push_back(item.guard);
    }
    std::vector<BodyAtom> body;
    for (const auto& item : body_items) {
        if (item.is_guard)
            throw ParseError("guard after '|'", item.line, item.col);
        if (std::find(body.begin(), body.end(), item.atom) != body.end())
            std::cerr << "warning: " << item.line << ":" << item.col
                      << ": duplicate body atom dropped\n";
        body.push_back(item.atom);
    }
    if (body.empty())
        throw ParseError("rule has no body atoms", head.line, head.col);
    try {
        MembershipRule rule(std::move(conditions), std::move(body));
        validate_rule(rule, def.signature);
        return rule;
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), head.line, head.col);
    }
}

} // namespace

std::vector<MembershipRule> parse_rule_file(std::string_view text, const ConstraintDef& def) {
    RuleLexer lex(text);
    std::vector<MembershipRule> rules;
    while (!lex.at_eof())
        rules.push_back(parse_one_rule(lex, def));
    return rules;
}

std::string render_rule_file(std::span<const MembershipRule> rules, const ConstraintDef& def) {
    std::string out = "% constraint: " + def.name + "/" + std::to_string(def.arity()) + "\n";
    for (const auto& rule : rules) {
        // positions referenced by body atoms keep their variable, so the
        // atom has a name to point at; other singleton conditions inline
        std::vector<char> needs_var(def.arity(), 0);
        for (const auto& atom : rule.body())
            needs_var[atom.var] = 1;
        std::vector<const Condition*> cond_at(def.arity(), nullptr);
        for (const auto& c : rule.conditions())
            cond_at[c.var] = &c;

        auto var_name = [&](std::size_t i) {
            std::string n = def.var_names[i];
            n[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(n[0])));
            return n;
        };

        out += def.name + "(";
        std::vector<std::pair<std::uint32_t, DomainSet>> guards;
        for (std::size_t i = 0; i < def.arity(); ++i) {
            if (i)
                out += ", ";
            const Condition* c = cond_at[i];
            if (c && c->allowed.is_singleton() && !needs_var[i]) {
                out += def.signature[i].symbol(c->allowed.lowest());
            } else {
                out += var_name(i);
                if (c)
                    guards.emplace_back(static_cast<std::uint32_t>(i), c->allowed);
            }
        }
        out += ") ==> ";
        if (!guards.empty()) {
            for (std::size_t g = 0; g < guards.size(); ++g) {
                if (g)
                    out += ", ";
                out += "in(" + var_name(guards[g].first) + ",[";
                const auto values = guards[g].second.values();
                for (std::size_t v = 0; v < values.size(); ++v) {
                    if (v)
                        out += ",";
                    out += def.signature[guards[g].first].symbol(values[v]);
                }
                out += "])";
            }
            out += " | ";
        }
        for (std::size_t a = 0; a < rule.body().size(); ++a) {
            if (a)
                out += ", ";
            out += var_name(rule.body()[a].var) + " ## " +
                   def.signature[rule.body()[a].var].symbol(rule.body()[a].value);
        }
        out += ".\n";
    }
    return out;
}

// ------------------------------------------------------------------ artifacts

std::string render_artifact(const CompiledRuleSet<MembershipSystem>& compiled,
                            const ConstraintDef& def) {
    std::string out = "proprules artifact 1\n";
    out += "constraint " + def.name + ' ' + std::to_string(def.arity()) + '\n';
    render_signature_lines(out, def);
    out += "rules " + std::to_string(compiled.rule_count()) + '\n';
    const auto rule_text = render_rule_file(compiled.system().rules(), def);
    std::istringstream lines(rule_text);
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty() && line[0] != '%')
            out += "rule " + line + '\n';
    auto emit_list = [&](const char* kw, std::uint32_t r, std::span<const std::uint32_t> list) {
        out += kw;
        out += ' ' + std::to_string(r) + " :";
        for (auto x : list)
            out += ' ' + std::to_string(x);
        out += '\n';
    };
    for (std::uint32_t r = 0; r < compiled.rule_count(); ++r) {
        emit_list("friends", r, compiled.friends(r));
        emit_list("obviated", r, compiled.obviated(r));
    }
    out += "end\n";
    return out;
}

LoadedArtifact parse_artifact(std::string_view text) {
    const auto lines = tokenize_lines(text, /*strip_comments=*/false);
    std::size_t at = 0;
    auto need = [&](const char* what) -> const Line& {
        if (at >= lines.size())
            throw ParseError(std::string("unexpected end of artifact, expected ") + what,
                             lines.empty() ? 1 : lines.back().number, 1);
        return lines[at];
    };

    {
        const Line& magic = need("magic line");
        if (magic.tokens != std::vector<std::string>{"proprules", "artifact", "1"})
            throw ParseError("not a proprules artifact", magic.number, 1);
        ++at;
    }

    ConstraintDef def;
    std::optional<Universe> default_universe;
    std::map<std::size_t, Universe> overrides;
    std::size_t arity = 0;
    while (at < lines.size()) {
        const Line& line = lines[at];
        const std::string& kw = line.tokens[0];
        if (kw == "constraint") {
            if (line.tokens.size() != 3)
                throw ParseError("expected: constraint <name> <arity>", line.number, 1);
            def.name = line.tokens[1];
            arity = static_cast<std::size_t>(parse_long(line.tokens[2], line.number, "arity"));
        } else if (kw == "vars") {
            def.var_names.assign(line.tokens.begin() + 1, line.tokens.end());
        } else if (kw == "values" || kw.rfind("values@", 0) == 0) {
            std::vector<std::string> syms(line.tokens.begin() + 1, line.tokens.end());
            Universe u(std::move(syms));
            if (kw == "values")
                default_universe = std::move(u);
            else
                overrides.insert_or_assign(
                    static_cast<std::size_t>(parse_long(kw.substr(7), line.number, "index")),
                    std::move(u));
        } else {
            break;
        }
        ++at;
    }
    if (def.name.empty() || arity == 0 || !default_universe)
        throw ParseError("incomplete artifact header", need("header").number, 1);
    for (std::size_t i = 0; i < arity; ++i) {
        if (auto o = overrides.find(i); o != overrides.end())
            def.signature.push_back(o->second);
        else
            def.signature.push_back(*default_universe);
    }
    if (def.var_names.empty())
        for (std::size_t i = 0; i < arity; ++i)
            def.var_names.push_back("x" + std::to_string(i + 1));
    if (def.var_names.size() != arity)
        throw ParseError("vars line does not match arity", need("vars").number, 1);

    const Line& rules_line = need("rules line");
    if (rules_line.tokens.size() != 2 || rules_line.tokens[0] != "rules")
        throw ParseError("expected: rules <count>", rules_line.number, 1);
    const std::size_t rule_count =
        static_cast<std::size_t>(parse_long(rules_line.tokens[1], rules_line.number, "count"));
    ++at;

    std::string rule_text;
    for (std::size_t r = 0; r < rule_count; ++r) {
        const Line& line = need("rule line");
        if (line.tokens[0] != "rule")
            throw ParseError("expected a rule line", line.number, 1);
        for (std::size_t i = 1; i < line.tokens.size(); ++i) {
            rule_text += line.tokens[i];
            rule_text += ' ';
        }
        rule_text += '\n';
        ++at;
    }
    std::vector<MembershipRule> rules = parse_rule_file(rule_text, def);
    if (rules.size() != rule_count)
        throw ParseError("rule count mismatch", rules_line.number, 1);

    std::vector<std::vector<std::uint32_t>> friends(rule_count), obviated(rule_count);
    for (std::size_t r = 0; r < rule_count; ++r) {
        for (const char* kw : {"friends", "obviated"}) {
            const Line& line = need(kw);
            if (line.tokens.size() < 3 || line.tokens[0] != kw || line.tokens[2] != ":")
                throw ParseError(std::string("expected: ") + kw + " <rule> : <indices>",
                                 line.number, 1);
            const long idx = parse_long(line.tokens[1], line.number, "rule index");
            if (idx != static_cast<long>(r))
                throw ParseError("rule lists out of order", line.number, 1);
            auto& list = kw[0] == 'f' ? friends[r] : obviated[r];
            for (std::size_t i = 3; i < line.tokens.size(); ++i) {
                const long v = parse_long(line.tokens[i], line.number, "rule index");
                if (v < 0 || v >= static_cast<long>(rule_count))
                    throw ParseError("rule index out of range", line.number, 1);
                list.push_back(static_cast<std::uint32_t>(v));
            }
            ++at;
        }
    }
    const Line& end = need("end line");
    if (end.tokens != std::vector<std::string>{"end"})
        throw ParseError("expected end line", end.number, 1);

    try {
        CompiledRuleSet<MembershipSystem> compiled(MembershipSystem(def.signature, std::move(rules)),
                                                   std::move(friends), std::move(obviated));
        return LoadedArtifact{std::move(def), std::move(compiled)};
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), end.number, 1);
    }
}

LoadedArtifact load_artifact(const std::filesystem::path& path) {
    return parse_artifact(read_file(path));
}

// -------------------------------------------------------------- store literals

Store parse_store_literal(std::string_view text, const std::vector<std::string>& var_names,
                          const Signature& sig) {
    Store store = store_bottom(sig);
    std::vector<char> seen(sig.size(), 0);
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    };
    skip_ws();
    while (pos < text.size()) {
        std::string name;
        while (pos < text.size() && is_word_char(text[pos]))
            name += text[pos++];
        skip_ws();
        if (name.empty() || pos >= text.size() || text[pos] != '=')
            throw ParseError("expected <var>={v,...}", 1, static_cast<int>(pos) + 1);
        ++pos;
        skip_ws();
        const auto var_it = std::find(var_names.begin(), var_names.end(), name);
        if (var_it == var_names.end())
            throw ParseError("unknown variable '" + name + "'", 1, static_cast<int>(pos) + 1);
        const auto var = static_cast<std::uint32_t>(var_it - var_names.begin());
        if (seen[var])
            throw ParseError("variable '" + name + "' given twice", 1,
                             static_cast<int>(pos) + 1);
        seen[var] = 1;
        if (pos >= text.size() || text[pos] != '{')
            throw ParseError("expected '{'", 1, static_cast<int>(pos) + 1);
        ++pos;
        DomainSet dom = DomainSet::none();
        for (;;) {
            skip_ws();
            std::string value;
            while (pos < text.size() && is_word_char(text[pos]))
                value += text[pos++];
            const auto idx = sig[var].index_of(value);
            if (!idx)
                throw ParseError("value '" + value + "' outside the universe of '" + name + "'",
                                 1, static_cast<int>(pos) + 1);
            dom = dom.with(*idx);
            skip_ws();
            if (pos < text.size() && text[pos] == ',') {
                ++pos;
                continue;
            }
            break;
        }
        if (pos >= text.size() || text[pos] != '}')
            throw ParseError("expected '}'", 1, static_cast<int>(pos) + 1);
        ++pos;
        store = store.with_domain(var, dom);
        skip_ws();
        if (pos < text.size()) {
            if (text[pos] != ',')
                throw ParseError("expected ',' between variables", 1,
                                 static_cast<int>(pos) + 1);
            ++pos;
            skip_ws();
        }
    }
    return store;
}

std::string render_store_literal(const Store& s, const std::vector<std::string>& var_names,
                                 const Signature& sig) {
    if (s.is_top())
        return "TOP";
    std::string out;
    for (std::size_t i = 0; i < s.arity(); ++i) {
        if (i)
            out += ',';
        out += var_names[i];
        out += "={";
        const auto values = s.domain(i).values();
        for (std::size_t v = 0; v < values.size(); ++v) {
            if (v)
                out += ',';
            out += sig[i].symbol(values[v]);
        }
        out += '}';
    }
    return out;
}

// ------------------------------------------------------------------- csp files

Csp load_csp_file(const std::filesystem::path& path, RuleKind kind, const GenLimits& limits) {
    const auto lines = tokenize_lines(read_file(path));
    const auto dir = path.parent_path();

    std::map<std::string, Universe> domains;
    std::vector<std::string> var_names;
    Signature sig;
    std::map<std::string, std::uint32_t> var_index;
    std::map<std::string, ConstraintDef> loaded;
    std::vector<ConstraintInstance> instances;

    auto constraint_for = [&](const std::string& name, int line_no) -> const ConstraintDef& {
        if (auto it = loaded.find(name); it != loaded.end())
            return it->second;
        const auto file = dir / (name + ".con");
        if (!std::filesystem::exists(file))
            throw ParseError("constraint '" + name + "' not found (no use line and no " +
                                 file.string() + ")",
                             line_no, 1);
        ConstraintDef def = load_constraint_file(file);
        if (def.name != name)
            throw ParseError("file " + file.string() + " defines '" + def.name + "', not '" +
                                 name + "'",
                             line_no, 1);
        return loaded.emplace(name, std::move(def)).first->second;
    };

    for (const auto& line : lines) {
        const auto& t = line.tokens;
        const std::string& kw = t[0];
        if (kw == "domain") {
            if (t.size() < 3)
                throw ParseError("expected: domain <name> <values...>", line.number, 1);
            try {
                domains.insert_or_assign(t[1],
                                         Universe(std::vector<std::string>(t.begin() + 2, t.end())));
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), line.number, 1);
            }
        } else if (kw == "var") {
            const auto colon = std::find(t.begin(), t.end(), ":");
            if (colon == t.end() || colon + 2 != t.end() || colon == t.begin() + 1)
                throw ParseError("expected: var <names...> : <domain>", line.number, 1);
            const auto dom = domains.find(*(colon + 1));
            if (dom == domains.end())
                throw ParseError("unknown domain '" + *(colon + 1) + "'", line.number, 1);
            for (auto it = t.begin() + 1; it != colon; ++it) {
                if (var_index.count(*it))
                    throw ParseError("variable '" + *it + "' declared twice", line.number, 1);
                var_index.emplace(*it, static_cast<std::uint32_t>(var_names.size()));
                var_names.push_back(*it);
                sig.push_back(dom->second);
            }
        } else if (kw == "use") {
            if (t.size() != 2)
                throw ParseError("expected: use <path>", line.number, 1);
            ConstraintDef def = load_constraint_file(dir / t[1]);
            const std::string name = def.name;
            loaded.insert_or_assign(name, std::move(def));
        } else if (kw == "post") {
            std::string joined;
            for (std::size_t i = 1; i < t.size(); ++i)
                joined += t[i];
            const auto open = joined.find('(');
            if (open == std::string::npos || joined.back() != ')')
                throw ParseError("expected: post <constraint>(<vars...>)", line.number, 1);
            const std::string cname = joined.substr(0, open);
            std::vector<std::uint32_t> vars;
            std::string arg;
            for (std::size_t i = open + 1; i < joined.size(); ++i) {
                const char ch = joined[i];
                if (ch == ',' || ch == ')') {
                    if (arg.empty())
                        throw ParseError("empty argument in post", line.number, 1);
                    const auto at = var_index.find(arg);
                    if (at == var_index.end())
                        throw ParseError("unknown variable '" + arg + "'", line.number, 1);
                    vars.push_back(at->second);
                    arg.clear();
                } else {
                    arg += ch;
                }
            }
            const ConstraintDef& def = constraint_for(cname, line.number);
            auto rules = generate_rules(def, kind, limits);
            auto compiled = compute_friends_obviated(make_system(def, std::move(rules)));
            instances.push_back(ConstraintInstance{cname, std::move(vars), std::move(compiled)});
        } else {
            throw ParseError("unknown directive '" + kw + "'", line.number, 1);
        }
    }
    try {
        return make_csp(std::move(var_names), std::move(sig), std::move(instances));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), lines.empty() ? 1 : lines.back().number, 1);
    }
}

// --------------------------------------------------------------------- reports

std::string render_stats_csv(const SolvingStats& stats) {
    std::string out = "rule_id,degree,friends_size,obviated_size\n";
    for (const auto& row : stats.rows)
        out += std::to_string(row.rule) + ',' + format_double(row.degree) + ',' +
               std::to_string(row.friends_size) + ',' + std::to_string(row.obviated_size) + '\n';
    out += "# " + std::to_string(stats.solving_count) + " solving / " +
           std::to_string(stats.rows.size()) + ", average friends+obviated size " +
           format_double(stats.average_union_size) + '\n';
    return out;
}

std::string render_minimize_csv(const RedundancyReport& report,
                                std::span<const MembershipRule> rules) {
    std::string out = "rule_id,status,removed_atoms,degree\n";
    for (std::uint32_t r = 0; r < report.status.size(); ++r) {
        const char* status = report.status[r] == RuleStatus::kept ? "kept"
                             : report.status[r] == RuleStatus::removed ? "removed"
                                                                       : "partially_reduced";
        std::string atoms;
        for (std::size_t i = 0; i < report.removed_atoms[r].size(); ++i) {
            if (i)
                atoms += ';';
            atoms += std::to_string(report.removed_atoms[r][i] + 1);
        }
        const double degree = rules[r].body().empty()
                                  ? 0.0
                                  : static_cast<double>(report.removed_atoms[r].size()) /
                                        static_cast<double>(rules[r].body().size());
        out += std::to_string(r + 1) + ',' + status + ',' + atoms + ',' + format_double(degree) +
               '\n';
    }
    out += "# redundancy_ratio " + format_double(report.redundancy_ratio()) + '\n';
    return out;
}

std::string render_search_csv_header() {
    return "seed,scheduler,solutions,fixpoints,condition_tests,body_apps,rules_removed\n";
}

std::string render_search_csv_row(std::uint64_t seed, SchedulerKind scheduler,
                                  const SearchReport& report) {
    return std::to_string(seed) + ',' + (scheduler == SchedulerKind::gi ? "GI" : "R") + ',' +
           std::to_string(report.solutions) + ',' + std::to_string(report.fixpoints) + ',' +
           std::to_string(report.counters.condition_tests) + ',' +
           std::to_string(report.counters.body_applications) + ',' +
           std::to_string(report.counters.rules_removed) + '\n';
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

} // namespace proprules
