#include "cli.hpp"

#include <dynq/constant_rewrite.hpp>
#include <dynq/constraints.hpp>
#include <dynq/engine.hpp>
#include <dynq/errors.hpp>
#include <dynq/hierarchy.hpp>
#include <dynq/homomorphism.hpp>
#include <dynq/parser.hpp>
#include <dynq/workload.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dynq::cli {

namespace {

/// Everything a subcommand reads from its flags.
struct SessionConfig
{
    std::string schema_path;
    std::string query_path;
    std::string constraints_path;
    std::string stream_path = "-";
    std::string engine = "auto";
    std::string require;
    std::string format = "csv";
    std::string instance_path;
    std::vector<std::size_t> sizes;
    std::uint64_t seed = 1;
    std::size_t budget = default_hom_budget;
    std::size_t n = 8;
    bool strict_constraints = false;
    bool show_stripped = false;
};

/// Parsed inputs shared by the subcommands.
struct Session
{
    Schema schema;
    ConstantPool pool;
    UCQ query;
    std::optional<ConstraintSet> gamma;
};

/// Raised for unreadable input files; reported like a parse error.
class input_error : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (not in)
        throw input_error("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Session load(const SessionConfig &cfg)
{
    Session s;
    s.schema = parse_schema(read_file(cfg.schema_path));
    s.query = parse_query(read_file(cfg.query_path), s.schema, s.pool);
    if (not cfg.constraints_path.empty())
        s.gamma = parse_constraints(read_file(cfg.constraints_path), s.schema, s.pool);
    return s;
}

/// q_Gamma: IND simplification first, since it can only shrink the bodies the small-domain rewrite multiplies out.
UCQ constrained(const UCQ &q, const ConstraintSet &gamma)
{
    return sd_rewrite(simplify_with_inds(q, gamma), gamma);
}

std::string prefixed(const std::string &text, const std::string &prefix)
{
    std::string out;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);)
        out += prefix + line + "\n";
    return out;
}

bool meets(const ClassReport &r, const std::string &require)
{
    if (require == "q")
        return r.q_hierarchical;
    if (require == "t")
        return r.t_hierarchical;
    if (require == "exhaustive")
        return r.exhaustively_q_hierarchical;
    return true;
}

int cmd_classify(const SessionConfig &cfg, std::ostream &out)
{
    Session s = load(cfg);
    const ClassReport r = classify(s.query, cfg.budget);
    out << format_report(r, s.schema, s.pool);
    if (cfg.show_stripped)
        for (std::size_t i = 0; i < r.core.disjuncts.size(); ++i) {
            const StrippedQuery st = strip_constants(r.core.disjuncts[i], s.schema);
            out << "stripped_" << i + 1 << ": " << print_cq(st.hat, st.hat_schema, s.pool) << "\n";
        }
    const ClassReport *decisive = &r;
    std::optional<ClassReport> rg;
    if (s.gamma) {
        const UCQ qg = constrained(s.query, *s.gamma);
        rg = classify(qg, cfg.budget);
        out << prefixed(format_report(*rg, s.schema, s.pool), "constrained_");
        decisive = &*rg;
    }
    return meets(*decisive, cfg.require) ? exit_ok : exit_check_failed;
}

int cmd_core(const SessionConfig &cfg, std::ostream &out)
{
    Session s = load(cfg);
    out << print_ucq(core_of_ucq(s.query, cfg.budget), s.schema, s.pool);
    return exit_ok;
}

int cmd_rewrite(const SessionConfig &cfg, std::ostream &out)
{
    Session s = load(cfg);
    ConstraintSet gamma = s.gamma ? *s.gamma : ConstraintSet{};
    UCQ simplified = UCQ::empty(s.query.arity);
    for (const CQ &d : s.query.disjuncts) {
        const IndSimplification step = simplify_with_inds(d, gamma);
        for (const IndStep &st : step.steps)
            out << "# applied " << print_constraint(Constraint{gamma.inclusion_deps()[st.dependency]}, s.schema, s.pool)
                << " to atoms " << st.psi1 + 1 << "," << st.psi2 + 1 << "\n";
        simplified.disjuncts.push_back(step.query);
    }
    out << print_ucq(sd_rewrite(simplified, gamma), s.schema, s.pool);
    return exit_ok;
}

/// Splits `?test 1 2` or `?test 1,2` arguments into constants.
Tuple parse_probe(std::string_view args, ConstantPool &pool)
{
    std::string text(args);
    std::replace(text.begin(), text.end(), ',', ' ');
    std::istringstream words(text);
    Tuple t;
    for (std::string w; words >> w;)
        t.push_back(parse_constant(w, pool));
    return t;
}

int cmd_run(const SessionConfig &cfg, std::istream &in, std::ostream &out, std::ostream &err)
{
    Session s = load(cfg);
    const UCQ q = s.gamma ? constrained(s.query, *s.gamma) : s.query;
    std::unique_ptr<QueryEngine> engine = make_engine(q, s.schema, parse_engine_kind(cfg.engine), cfg.budget);
    std::optional<ConstraintGuard> guard;
    if (s.gamma)
        guard.emplace(s.schema, *s.gamma);
    out << "#engine " << engine->description() << "\n";

    std::ifstream file;
    if (cfg.stream_path != "-") {
        file.open(cfg.stream_path);
        if (not file)
            throw input_error("cannot read '" + cfg.stream_path + "'");
    }
    std::istream &src = cfg.stream_path == "-" ? in : file;

    int status = exit_ok;
    std::size_t line_no = 0;
    for (std::string raw; std::getline(src, raw);) {
        ++line_no;
        const std::size_t first = raw.find_first_not_of(" \t\r");
        if (first == std::string::npos or raw[first] == '#')
            continue;
        const std::string line = raw.substr(first, raw.find_last_not_of(" \t\r") + 1 - first);
        try {
            if (line[0] != '?') {
                const UpdateCommand cmd = parse_update(line, s.schema, s.pool);
                if (guard) {
                    if (auto why = guard->violation(cmd)) {
                        out << "!rejected " << *why << "\n";
                        if (cfg.strict_constraints) {
                            err << "error: line " << line_no << ": update rejected: " << *why << "\n";
                            return exit_rejected;
                        }
                        err << "warning: line " << line_no << ": update skipped: " << *why << "\n";
                        continue;
                    }
                    guard->apply(cmd);
                }
                engine->update(cmd);
                out << "ok\n";
                continue;
            }
            const std::size_t space = line.find_first_of(" \t");
            const std::string word = line.substr(1, space == std::string::npos ? std::string::npos : space - 1);
            const std::string_view rest = space == std::string::npos ? std::string_view{}
                                                                     : std::string_view(line).substr(space);
            if (word == "count") {
                out << engine->count() << "\n";
            } else if (word == "answer") {
                out << (engine->answer() ? "yes" : "no") << "\n";
            } else if (word == "test") {
                const Tuple t = parse_probe(rest, s.pool);
                if (t.size() != engine->arity())
                    throw parse_error("?test expects " + std::to_string(engine->arity()) + " constants, got " +
                                          std::to_string(t.size()),
                                      line_no, 1);
                out << (engine->test(t) ? "true" : "false") << "\n";
            } else if (word == "enum") {
                engine->enumerate([&](const Tuple &t) {
                    out << print_tuple(t, s.pool) << "\n";
                    return true;
                });
                out << "#EOE\n";
            } else {
                throw parse_error("unknown command '?" + word + "'", line_no, 1);
            }
        } catch (const unsupported_routine &e) {
            out << "!unsupported " << e.what() << "\n";
            status = exit_unsupported;
        } catch (const parse_error &e) {
            throw parse_error(e.message(), line_no, e.column());
        }
    }
    return status;
}

int cmd_bench(const SessionConfig &cfg, std::ostream &out)
{
    Session s = load(cfg);
    if (cfg.format != "csv" and cfg.format != "table")
        throw std::invalid_argument("unknown format '" + cfg.format + "' (expected csv or table)");
    const std::vector<BenchRow> rows =
        bench(s.query, s.schema, parse_engine_kind(cfg.engine), cfg.sizes, cfg.seed, s.pool);
    out << (cfg.format == "csv" ? format_bench_csv(rows) : format_bench_table(rows));
    return exit_ok;
}

int cmd_oumv(const SessionConfig &cfg, std::ostream &out)
{
    Session s = load(cfg);
    const UCQ core = core_of_ucq(s.query, cfg.budget);
    if (core.disjuncts.size() != 1)
        throw precondition_error("oumv needs a query whose core is a single conjunctive query");
    const OuMvInstance inst =
        cfg.instance_path.empty() ? random_oumv(cfg.n, cfg.seed) : parse_oumv(read_file(cfg.instance_path));
    const ReductionSpec spec = make_reduction(core.disjuncts[0], inst.n, s.pool);
    std::unique_ptr<QueryEngine> engine = make_engine(core, s.schema, parse_engine_kind(cfg.engine), cfg.budget);
    const OuMvTrial trial = run_oumv_trial(*engine, inst, spec, s.schema);

    out << "engine: " << engine->description() << "\n";
    out << "clause: " << spec.witness.clause << "\n";
    for (std::size_t t = 0; t < inst.n; ++t)
        out << "round " << t + 1 << ": answer " << trial.answers[t] << " expected " << trial.expected[t] << " delta "
            << trial.delta_sizes[t] << "\n";
    const bool deltas_ok = std::all_of(trial.delta_sizes.begin(), trial.delta_sizes.end(),
                                       [&](std::size_t k) { return k <= 2 * inst.n; });
    out << "match: " << (trial.all_match() ? "yes" : "no") << "\n";
    out << "deltas_within_2n: " << (deltas_ok ? "yes" : "no") << "\n";
    out << "homomorphism: " << (trial.homomorphism_ok ? "yes" : "no") << "\n";
    return trial.all_match() and deltas_ok and trial.homomorphism_ok ? exit_ok : exit_check_failed;
}

void add_inputs(CLI::App *sub, SessionConfig &cfg, bool needs_constraints = false)
{
    sub->add_option("--schema", cfg.schema_path, "schema file (lines `rel NAME/ARITY`)")->required();
    sub->add_option("--query", cfg.query_path, "query file (one rule per disjunct)")->required();
    auto *c = sub->add_option("--constraints", cfg.constraints_path, "constraint file (sd / ind / fd lines)");
    if (needs_constraints)
        c->required();
    sub->add_option("--budget", cfg.budget, "node budget for homomorphism searches")->capture_default_str();
}

}

int run(const std::vector<std::string> &args, std::istream &in, std::ostream &out, std::ostream &err)
{
    SessionConfig cfg;
    CLI::App app{"Dynamic evaluation of conjunctive queries and their unions", "dynq"};
    app.require_subcommand(1);

    auto *classify_cmd = app.add_subcommand("classify", "classify the homomorphic core of a query");
    add_inputs(classify_cmd, cfg);
    classify_cmd->add_option("--require", cfg.require, "exit 1 unless the class holds")
        ->check(CLI::IsMember({"q", "t", "exhaustive"}));
    classify_cmd->add_flag("--show-stripped", cfg.show_stripped, "print the constant-free form of each disjunct");

    auto *run_cmd = app.add_subcommand("run", "maintain a query under an update stream");
    add_inputs(run_cmd, cfg);
    run_cmd->add_option("--stream", cfg.stream_path, "update/command stream, `-` for standard input")
        ->capture_default_str();
    run_cmd->add_option("--engine", cfg.engine, "auto, dynamic or naive")
        ->check(CLI::IsMember({"auto", "dynamic", "naive"}))
        ->capture_default_str();
    run_cmd->add_flag("--strict-constraints", cfg.strict_constraints, "stop with status 5 on a rejected update");

    auto *bench_cmd = app.add_subcommand("bench", "instrumented cost per active-domain size");
    add_inputs(bench_cmd, cfg);
    bench_cmd->add_option("--engine", cfg.engine, "auto, dynamic or naive")
        ->check(CLI::IsMember({"auto", "dynamic", "naive"}))
        ->capture_default_str();
    bench_cmd->add_option("--sizes", cfg.sizes, "comma-separated active-domain sizes")->delimiter(',')->required();
    bench_cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    bench_cmd->add_option("--format", cfg.format, "csv or table")->capture_default_str();

    auto *rewrite_cmd = app.add_subcommand("rewrite", "rewrite a query under integrity constraints");
    add_inputs(rewrite_cmd, cfg, true);

    auto *core_cmd = app.add_subcommand("core", "print the homomorphic core");
    add_inputs(core_cmd, cfg);

    auto *oumv_cmd = app.add_subcommand("oumv", "play an OuMv instance through the reduction database");
    add_inputs(oumv_cmd, cfg);
    oumv_cmd->add_option("--engine", cfg.engine, "auto, dynamic or naive")
        ->check(CLI::IsMember({"auto", "dynamic", "naive"}))
        ->capture_default_str();
    oumv_cmd->add_option("--instance", cfg.instance_path, "instance file; random when omitted");
    oumv_cmd->add_option("--n", cfg.n, "dimension of the random instance")->capture_default_str();
    oumv_cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_parse_error;
    }

    try {
        if (classify_cmd->parsed())
            return cmd_classify(cfg, out);
        if (run_cmd->parsed())
            return cmd_run(cfg, in, out, err);
        if (bench_cmd->parsed())
            return cmd_bench(cfg, out);
        if (rewrite_cmd->parsed())
            return cmd_rewrite(cfg, out);
        if (core_cmd->parsed())
            return cmd_core(cfg, out);
        return cmd_oumv(cfg, out);
    } catch (const parse_error &e) {
        err << "parse error: " << e.what() << "\n";
        return exit_parse_error;
    } catch (const schema_error &e) {
        err << "schema error: " << e.what() << "\n";
        return exit_parse_error;
    } catch (const input_error &e) {
        err << "error: " << e.what() << "\n";
        return exit_parse_error;
    } catch (const budget_exceeded &e) {
        err << "budget exceeded: " << e.what() << "\n";
        return exit_budget;
    } catch (const unsupported_routine &e) {
        err << "unsupported: " << e.what() << "\n";
        return exit_unsupported;
    } catch (const constraint_violation &e) {
        err << "constraint violation: " << e.what() << "\n";
        return exit_rejected;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return exit_check_failed;
    }
}

}
