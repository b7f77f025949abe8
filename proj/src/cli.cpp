#include "hmpst/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "hmpst/compose.hpp"
#include "hmpst/localiser.hpp"
#include "hmpst/projection.hpp"
#include "hmpst/surface.hpp"

namespace hmpst::cli {

namespace {

namespace fs = std::filesystem;

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const fs::path& file, const std::string& text) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw Usage("cannot write " + file.string());
    os << text;
    if (!os) throw Usage("cannot write " + file.string());
}

RoleSet split_roles(const std::string& csv) {
    RoleSet out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        if (comma == std::string::npos) comma = csv.size();
        std::string r = csv.substr(start, comma - start);
        r.erase(0, r.find_first_not_of(" \t"));
        r.erase(r.find_last_not_of(" \t") + 1);
        if (r.empty()) throw Usage("empty role in --roles");
        out.insert(r);
        start = comma + 1;
    }
    return out;
}

void report(std::ostream& err, const std::vector<Diagnostic>& ds, const std::string& prefix = "") {
    for (const auto& d : ds) err << "error: " << prefix << to_string(d) << "\n";
}

int cmd_check(const std::string& file, std::ostream& out, std::ostream& err) {
    Type t = load_type(file);
    auto ds = check_wellformed(t);
    if (!ds.empty()) {
        report(err, ds);
        return 1;
    }
    std::string kind = is_global(t) ? "global" : is_local(t) ? "local" : "hybrid";
    out << "ok: " << kind << ", parts " << to_string(parts(t)) << ", eparts " << to_string(eparts(t)) << "\n";
    return 0;
}

int cmd_project(const std::string& file, const std::string& roles, std::ostream& out, std::ostream& err) {
    RoleSet e = split_roles(roles);
    Type t = load_type(file);
    auto ds = check_wellformed(t);
    if (!ds.empty()) {
        report(err, ds);
        return 1;
    }
    out << print_type(project(t, e)) << "\n";
    return 0;
}

int cmd_localise(const std::string& file, std::ostream& out, std::ostream& err) {
    Type t = load_type(file);
    auto ds = check_wellformed(t);
    if (!ds.empty()) {
        report(err, ds);
        return 1;
    }
    out << print_type(localise(t)) << "\n";
    return 0;
}

int cmd_compat(const std::string& manifest, std::ostream& out, std::ostream& err) {
    CompositionSpec spec = load_manifest(manifest);
    int code = 0;
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        auto ds = check_compat(spec.compat, spec.components[i]);
        std::string label = "component " + std::to_string(i) + " " + to_string(spec.components[i].roles);
        if (ds.empty()) {
            out << label << ": compatible\n";
        } else {
            out << label << ": incompatible\n";
            report(err, ds, label + ": ");
            code = 1;
        }
    }
    return code;
}

CompositionResult composed(const std::string& manifest, bool verify, std::ostream& err) {
    CompositionSpec spec = load_manifest(manifest);
    ComposeOptions opts;
    opts.verify = verify;
    CompositionResult res = compose_spec(spec, opts);
    for (const auto& c : res.compat_report)
        report(err, c.diagnostics, "component " + std::to_string(c.index) + " " + to_string(c.roles) + ": ");
    report(err, res.errors);
    return res;
}

int cmd_compose(const std::string& manifest, const std::string& out_file, bool verify, std::ostream& out,
                std::ostream& err) {
    CompositionResult res = composed(manifest, verify, err);
    if (!res.ok()) return 1;
    std::string text = print_type(*res.global_type) + "\n";
    if (out_file.empty())
        out << text;
    else
        write_file(out_file, text);
    return 0;
}

int cmd_locals(const std::string& manifest, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    CompositionResult res = composed(manifest, false, err);
    if (!res.ok()) return 1;
    if (out_dir.empty()) {
        for (const auto& [r, l] : res.locals) out << "# " << r << "\n" << print_type(l) << "\n";
        return 0;
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Usage("cannot create " + out_dir);
    for (const auto& [r, l] : res.locals) write_file(fs::path(out_dir) / (r + ".hmpst"), print_type(l) + "\n");
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hybrid multiparty session types: check, project, localise, compose", "hmpst"};
    app.require_subcommand(1);

    std::string file, roles, manifest, out_file, out_dir;
    bool verify = false;

    auto* check = app.add_subcommand("check", "Parse a protocol and check well-formedness");
    check->add_option("FILE", file, "protocol file")->required();

    auto* proj = app.add_subcommand("project", "Project a protocol onto a set of roles");
    proj->add_option("FILE", file, "protocol file")->required();
    proj->add_option("--roles", roles, "comma-separated roles")->required();

    auto* loc = app.add_subcommand("localise", "Localise a protocol");
    loc->add_option("FILE", file, "protocol file")->required();

    auto* compat = app.add_subcommand("compat", "Check every component against the compatibility type");
    compat->add_option("MANIFEST", manifest, "manifest file")->required();

    auto* compose = app.add_subcommand("compose", "Build the composed global type");
    compose->add_option("MANIFEST", manifest, "manifest file")->required();
    compose->add_option("--out", out_file, "write the result here instead of stdout");
    compose->add_flag("--verify", verify, "re-check the unmerge and build-back equations while composing");

    auto* locals = app.add_subcommand("locals", "Write one local type per role");
    locals->add_option("MANIFEST", manifest, "manifest file")->required();
    locals->add_option("--out-dir", out_dir, "directory for <role>.hmpst files");

    try {
        std::vector<std::string> args(argv.rbegin(), argv.rend());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (check->parsed()) return cmd_check(file, out, err);
        if (proj->parsed()) return cmd_project(file, roles, out, err);
        if (loc->parsed()) return cmd_localise(file, out, err);
        if (compat->parsed()) return cmd_compat(manifest, out, err);
        if (compose->parsed()) return cmd_compose(manifest, out_file, verify, out, err);
        if (locals->parsed()) return cmd_locals(manifest, out_dir, out, err);
    } catch (const ParseException& e) {
        err << "parse error: " << to_string(e.error()) << "\n";
        return 2;
    } catch (const Usage& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Failure& f) {
        err << "error: " << to_string(f.diagnostic()) << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace hmpst::cli
