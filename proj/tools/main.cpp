// fionf command line front end.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace fionf;
using fionf::cli::options;

enum exit_code : int {
    ok = 0,
    internal = 1,
    usage = 2,
    schema = 3,
    precondition = 4,
    resonance = 5,
    io_error = 6,
};

struct io_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path)
{
    if (path.empty() || path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        if (std::cin.bad())
            throw io_failure("cannot read stdin");
        return ss.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw io_failure("cannot open " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout)
            throw io_failure("cannot write stdout");
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text))
        throw io_failure("cannot write " + path);
}

json envelope(const std::string& cmd, const options& o, const json& in)
{
    json e{{"tool", "fionf"}, {"version", fionf::version}, {"command", cmd}, {"field", o.field}};
    e["trunc"] = o.trunc > 0 ? json(o.trunc) : json(nullptr);
    e["h_trunc"] = o.htrunc > 0 ? json(o.htrunc) : json(nullptr);
    e["tol"] = o.tol;
    e["branch"] = o.branch;
    e["tau_model"] = model_to_json(cli::tau_model_of(in));
    return e;
}

json dispatch(const std::string& cmd, const json& in, const options& o)
{
    const bool ex = o.field == "exact";
    if (cmd == "symlog")
        return ex ? cli::symlog_exact(in, o) : cli::symlog_float(in, o);
    if (cmd == "resonance")
        return cli::resonance_cmd(in, o, ex);
    if (cmd == "maplog")
        return ex ? cli::maplog_cmd<exact>(in, o) : cli::maplog_cmd<cplx>(in, o);
    if (cmd == "bnf")
        return ex ? cli::bnf_cmd<exact>(in, o) : cli::bnf_cmd<cplx>(in, o);
    if (cmd == "oplog")
        return ex ? cli::oplog_cmd<exact>(in, o) : cli::oplog_cmd<cplx>(in, o);
    if (cmd == "qbnf")
        return ex ? cli::qbnf_cmd<exact>(in, o) : cli::qbnf_cmd<cplx>(in, o);
    return ex ? cli::pipeline_cmd<exact>(in, o) : cli::pipeline_cmd<cplx>(in, o);
}

int fail(int code, const char* kind, const std::string& msg, json extra = json::object())
{
    json e{{"code", code}, {"kind", kind}, {"stage", cli::current_stage}, {"message", msg}};
    for (auto it = extra.begin(); it != extra.end(); ++it)
        e[it.key()] = it.value();
    std::cerr << json{{"error", e}}.dump(2) << "\n";
    return code;
}

int run(const std::string& cmd, const options& o, const std::string& input, const std::string& out)
{
    try {
        cli::current_stage = "input";
        json in;
        try {
            in = json::parse(read_input(input));
        }
        catch (const json::parse_error& e) {
            return fail(schema, "schema", e.what(), {{"pointer", ""}, {"byte", e.byte}});
        }
        cli::current_stage = cmd;
        json report = envelope(cmd, o, in);
        report["result"] = dispatch(cmd, in, o);
        cli::current_stage = "output";
        write_output(out, report.dump(2) + "\n");
        if (cmd == "resonance" && report["result"]["resonant"].get<bool>())
            return resonance;
        return ok;
    }
    catch (const io_failure& e) {
        return fail(io_error, "io", e.what());
    }
    catch (const schema_violation& e) {
        return fail(schema, "schema", e.what(), {{"pointer", e.pointer}});
    }
    catch (const schema_error& e) {
        return fail(schema, "schema", e.what());
    }
    catch (const resonance_error& e) {
        return fail(resonance, "resonance", e.what(), {{"k", e.k}, {"degree", e.degree}, {"value", e.value}});
    }
    catch (const negative_eigenvalue_error& e) {
        return fail(precondition, "negative_eigenvalue", e.what(), {{"eigenvalue", e.eigenvalue}});
    }
    catch (const not_representable_error& e) {
        return fail(precondition, "not_representable", e.what());
    }
    catch (const precondition_error& e) {
        return fail(precondition, "precondition", e.what());
    }
    catch (const json::exception& e) {
        return fail(schema, "schema", e.what());
    }
    catch (const std::exception& e) {
        return fail(internal, "internal", e.what());
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Normal forms of formal Fourier integral operators"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(fionf::version));

    options o;
    std::string input = "-";
    std::string out = "-";

    const std::vector<std::pair<const char*, const char*>> cmds = {
        {"symlog", "logarithm of a real symplectic matrix"},
        {"resonance", "scan integer combinations of exponents for resonances"},
        {"maplog", "Hamiltonian whose time-1 flow is a given map germ"},
        {"bnf", "classical Birkhoff normal form of a Hamiltonian jet"},
        {"oplog", "operator logarithm of a formal FIO"},
        {"qbnf", "quantum Birkhoff normal form of an h-jet"},
        {"pipeline", "full normal form F(iota; h) of a formal FIO"},
    };
    for (const auto& [name, desc] : cmds) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("input", input, "input JSON file, - for stdin")->capture_default_str();
        sub->add_option("--trunc", o.trunc, "truncation degree N");
        sub->add_option("--h-trunc", o.htrunc, "h truncation M");
        sub->add_option("--field", o.field, "coefficient field")->check(CLI::IsMember({"exact", "float"}))->capture_default_str();
        sub->add_option("--tol", o.tol, "float tolerance")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--branch", o.branch, "logarithm branch rule")->check(CLI::IsMember({"principal"}))->capture_default_str();
        sub->add_option("--out", out, "output file, - for stdout")->capture_default_str();
        if (std::string(name) == "resonance")
            sub->add_option("--condition", o.condition, "resonance condition")
                ->check(CLI::IsMember({"map_log", "diagonal", "quantum"}))
                ->capture_default_str();
        if (std::string(name) == "oplog") {
            sub->add_option("--homotopy", o.homotopy, "amplitude homotopy (float field)")
                ->check(CLI::IsMember({"exp_sharp", "linear"}))
                ->capture_default_str();
            sub->add_option("--turns", o.turns, "branch shift of log a(0) (float field)");
        }
    }

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int r = app.exit(e);
        return r == 0 ? ok : usage;
    }
    std::string cmd;
    for (const auto* s : app.get_subcommands())
        cmd = s->get_name();
    return run(cmd, o, input, out);
}
