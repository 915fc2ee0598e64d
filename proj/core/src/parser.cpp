#include "dynq/parser.hpp"

#include "dynq/errors.hpp"
#include "lexer.hpp"

#include <cctype>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace dynq {

using detail::Lexer;
using detail::Token;

namespace {

bool is_variable_name(std::string_view s)
{
    return not s.empty() and (std::islower(static_cast<unsigned char>(s[0])) or s[0] == '_');
}

Value constant_from(const Token &t, ConstantPool &pool)
{
    switch (t.kind) {
        case Token::Kind::integer:
            try {
                return pool.intern_int(std::stoll(t.text));
            } catch (const std::out_of_range &) {
                Lexer::fail_at(t, "integer literal out of range");
            }
        case Token::Kind::string:
        case Token::Kind::identifier: return pool.intern_string(t.text);
        default: Lexer::fail_at(t, "malformed literal '" + Lexer::describe(t) + "'");
    }
}

struct RuleBuilder
{
    CQ q;
    std::unordered_map<std::string, VarId> vars;

    Term term(Lexer &lex, ConstantPool &pool)
    {
        const Token &t = lex.peek();
        if (t.kind == Token::Kind::identifier) {
            if (not is_variable_name(t.text))
                lex.fail("expected a term (variable or constant) but found '" + t.text + "'");
            Token tok = lex.next();
            auto [it, added] = vars.emplace(tok.text, static_cast<VarId>(q.var_names.size()));
            if (added)
                q.var_names.push_back(tok.text);
            return Term::var(it->second);
        }
        if (t.kind == Token::Kind::integer or t.kind == Token::Kind::string)
            return Term::constant(constant_from(lex.next(), pool));
        lex.fail("expected a term but found '" + Lexer::describe(t) + "'");
    }

    std::vector<Term> term_list(Lexer &lex, ConstantPool &pool)
    {
        std::vector<Term> out;
        lex.expect("(");
        if (lex.accept(")"))
            return out;
        do
            out.push_back(term(lex, pool));
        while (lex.accept(","));
        lex.expect(")");
        return out;
    }
};

}

Schema parse_schema(std::string_view text)
{
    Schema schema;
    Lexer lex(text);
    while (not lex.at_end()) {
        Token kw = lex.expect_identifier();
        if (kw.text != "rel")
            Lexer::fail_at(kw, "expected 'rel' but found '" + kw.text + "'");
        Token name = lex.expect_identifier();
        lex.expect("/");
        const std::int64_t arity = lex.expect_integer();
        if (arity < 0)
            Lexer::fail_at(name, "negative arity");
        try {
            schema.add(name.text, static_cast<std::size_t>(arity));
        } catch (const schema_error &e) {
            Lexer::fail_at(name, e.what());
        }
    }
    return schema;
}

UCQ parse_query(std::string_view text, const Schema &schema, ConstantPool &pool)
{
    Lexer lex(text);
    UCQ out;
    bool first = true;
    while (not lex.at_end()) {
        RuleBuilder rb;
        Token head_tok = lex.expect_identifier();
        rb.q.head = rb.term_list(lex, pool);
        lex.expect(":-");
        do {
            Token rel = lex.expect_identifier();
            auto id = schema.find(rel.text);
            if (not id)
                Lexer::fail_at(rel, "unknown relation '" + rel.text + "'");
            Atom a{*id, rb.term_list(lex, pool)};
            if (a.args.size() != schema[*id].arity)
                throw schema_error("relation '" + rel.text + "' has arity " + std::to_string(schema[*id].arity) +
                                   " but is used with " + std::to_string(a.args.size()) + " arguments at " +
                                   std::to_string(rel.line) + ":" + std::to_string(rel.column));
            rb.q.body.push_back(std::move(a));
        } while (lex.accept(","));
        lex.expect(".");
        std::unordered_set<VarId> in_body;
        for (const Atom &a : rb.q.body)
            for (const Term &t : a.args)
                if (t.is_var())
                    in_body.insert(t.id);
        for (const Term &t : rb.q.head)
            if (t.is_var() and not in_body.contains(t.id))
                throw schema_error("head variable '" + rb.q.var_names[t.id] + "' does not occur in the body of rule at " +
                                   std::to_string(head_tok.line) + ":" + std::to_string(head_tok.column));
        if (first) {
            out.arity = rb.q.arity();
            first = false;
        } else if (rb.q.arity() != out.arity) {
            throw schema_error("rule at " + std::to_string(head_tok.line) + ":" + std::to_string(head_tok.column) +
                               " has head arity " + std::to_string(rb.q.arity()) + ", expected " +
                               std::to_string(out.arity));
        }
        out.disjuncts.push_back(std::move(rb.q));
    }
    if (first)
        throw parse_error("query text contains no rule", 1, 1);
    return out;
}

UpdateCommand parse_update(std::string_view line, const Schema &schema, ConstantPool &pool)
{
    Lexer lex(line);
    Token kw = lex.expect_identifier();
    UpdateCommand cmd;
    if (kw.text == "insert")
        cmd.kind = UpdateKind::insert;
    else if (kw.text == "delete")
        cmd.kind = UpdateKind::remove;
    else
        Lexer::fail_at(kw, "expected 'insert' or 'delete' but found '" + kw.text + "'");
    Token rel = lex.expect_identifier();
    auto id = schema.find(rel.text);
    if (not id)
        throw schema_error("unknown relation '" + rel.text + "'");
    cmd.relation = *id;
    lex.expect("(");
    if (not lex.accept(")")) {
        do {
            const Token &t = lex.peek();
            if (t.kind != Token::Kind::integer and t.kind != Token::Kind::string and t.kind != Token::Kind::identifier)
                lex.fail("malformed literal '" + Lexer::describe(t) + "'");
            cmd.tuple.push_back(constant_from(lex.next(), pool));
        } while (lex.accept(","));
        lex.expect(")");
    }
    if (not lex.at_end())
        lex.fail("unexpected trailing input '" + Lexer::describe(lex.peek()) + "'");
    if (cmd.tuple.size() != schema[cmd.relation].arity)
        throw schema_error("relation '" + rel.text + "' has arity " + std::to_string(schema[cmd.relation].arity) +
                           " but the update has " + std::to_string(cmd.tuple.size()) + " values");
    return cmd;
}

std::vector<UpdateCommand> parse_update_stream(std::string_view text, const Schema &schema, ConstantPool &pool)
{
    std::vector<UpdateCommand> out;
    std::size_t line_no = 0;
    while (not text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos or line[first] == '#')
            continue;
        try {
            out.push_back(parse_update(line, schema, pool));
        } catch (const parse_error &e) {
            throw parse_error(e.message(), line_no, e.column());
        }
    }
    return out;
}

Value parse_constant(std::string_view text, ConstantPool &pool)
{
    Lexer lex(text);
    Token t = lex.next();
    if (not lex.at_end())
        lex.fail("unexpected trailing input after constant");
    if (t.kind == Token::Kind::end or t.kind == Token::Kind::punct)
        Lexer::fail_at(t, "malformed literal '" + Lexer::describe(t) + "'");
    return constant_from(t, pool);
}

std::string print_term(const CQ &q, const Term &t, const ConstantPool &pool)
{
    if (t.is_const())
        return pool.render(t.id);
    const std::string &name = t.id < q.var_names.size() ? q.var_names[t.id] : std::string();
    if (is_variable_name(name))
        return name;
    return "v" + std::to_string(t.id);
}

std::string print_atom(const CQ &q, const Atom &a, const Schema &schema, const ConstantPool &pool)
{
    std::string out = schema[a.relation].name + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i)
            out += ',';
        out += print_term(q, a.args[i], pool);
    }
    return out + ")";
}

std::string print_cq(const CQ &q, const Schema &schema, const ConstantPool &pool, std::string_view head_name)
{
    // Disambiguate repeated or invalid names so the output re-parses to the same structure.
    CQ named = q;
    std::unordered_set<std::string> taken;
    for (VarId v = 0; v < named.num_vars(); ++v) {
        std::string &n = named.var_names[v];
        if (not is_variable_name(n) or taken.contains(n)) {
            std::string base = is_variable_name(n) ? n : "v";
            std::string candidate = base + "_" + std::to_string(v);
            while (taken.contains(candidate))
                candidate += "_";
            n = candidate;
        }
        taken.insert(n);
    }
    std::string out(head_name);
    out += "(";
    for (std::size_t i = 0; i < named.head.size(); ++i) {
        if (i)
            out += ',';
        out += print_term(named, named.head[i], pool);
    }
    out += ") :- ";
    for (std::size_t i = 0; i < named.body.size(); ++i) {
        if (i)
            out += ", ";
        out += print_atom(named, named.body[i], schema, pool);
    }
    return out + ".";
}

std::string print_ucq(const UCQ &q, const Schema &schema, const ConstantPool &pool, std::string_view head_name)
{
    if (q.is_empty_query())
        return "# empty query of arity " + std::to_string(q.arity) + "\n";
    std::string out;
    for (const CQ &d : q.disjuncts)
        out += print_cq(d, schema, pool, head_name) + "\n";
    return out;
}

std::string print_update(const UpdateCommand &cmd, const Schema &schema, const ConstantPool &pool)
{
    std::string out = cmd.kind == UpdateKind::insert ? "insert " : "delete ";
    out += schema[cmd.relation].name;
    out += "(";
    for (std::size_t i = 0; i < cmd.tuple.size(); ++i) {
        if (i)
            out += ',';
        out += pool.render(cmd.tuple[i]);
    }
    return out + ")";
}

std::string print_tuple(std::span<const Value> t, const ConstantPool &pool)
{
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i)
            out += ',';
        out += pool.render(t[i]);
    }
    return out + ")";
}

std::string print_schema(const Schema &schema)
{
    std::ostringstream os;
    for (const Relation &r : schema)
        os << "rel " << r.name << "/" << r.arity << "\n";
    return os.str();
}

}
