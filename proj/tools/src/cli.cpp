#include "cli.hpp"

#include "fibcon/fiber_lab.hpp"
#include "fibcon/lattice_models.hpp"
#include "fibcon/singularity.hpp"
#include "fibcon/surface_morse.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fibcon::cli {

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError(fmt::format("cannot open '{}'", path));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> parse_list(const std::string& text, const char* what)
{
    std::vector<double> out;
    if (text.empty())
        return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        const std::string tok = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size())
                throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw InputError(fmt::format("bad {} entry '{}'", what, tok));
        }
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return out;
}

fiber::SystemSpec load_system(const std::string& name)
{
    try {
        return fiber::builtin_system(name);
    } catch (const fiber::UnknownSystem&) {
        if (!std::filesystem::is_regular_file(name))
            throw;
    }
    return fiber::read_system_spec_file(name);
}

template <class T>
std::string join(const std::vector<T>& v)
{
    return fmt::format("{}", fmt::join(v, ","));
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream f(path);
    if (!f)
        throw InputError(fmt::format("cannot write '{}'", path));
    return f;
}

// Common numeric options of the system subcommands.
struct SystemOptions {
    std::string system;
    std::string levels;
    std::string beta;
    std::size_t res = 0;
    std::uint64_t seed = 0;
    double tol = 1e-9;
    std::string csv;
};

void add_system_options(CLI::App* sub, SystemOptions& o)
{
    sub->add_option("system", o.system, "built-in name or system spec file")->required();
    sub->add_option("--levels", o.levels, "comma-separated g levels");
    sub->add_option("--beta", o.beta, "comma-separated Phi values");
    sub->add_option("--res", o.res, "grid cells per axis");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--tol", o.tol, "tolerance");
    sub->add_option("--csv", o.csv, "CSV output path");
}

int cmd_defpoly(const std::string& path, std::ostream& out)
{
    const auto data = lattice::parse_isotropy(slurp(path));
    const auto dp = lattice::compute_defining_polynomial(data);
    out << fmt::format("xi=[{}] N={} tall={}\n", join(dp.xi), dp.degree, dp.tall ? "true" : "false");
    return kOk;
}

int cmd_classify(const std::string& path, const singularity::ClassifyOptions& opts, std::ostream& out)
{
    const auto forms = singularity::parse_quadratic_forms(slurp(path));
    const singularity::HamiltonianSpan span(forms);
    const auto c = singularity::classify_block_signature(span, opts);
    if (c.degenerate())
        out << fmt::format("signature=degenerate reason=\"{}\"\n", c.reason);
    else
        out << fmt::format("signature={} n={}\n", c.signature->to_string(), c.signature->n());
    return kOk;
}

int cmd_reeb(const std::string& path, const std::string& dot, std::ostream& out)
{
    const auto mesh = morse::validate_mesh(morse::read_soff_file(path));
    const auto g = morse::reeb_graph(mesh);
    const auto rep = morse::connectedness_report(mesh, g);
    if (!dot.empty()) {
        auto f = open_output(dot);
        morse::write_dot(f, g);
    }
    out << fmt::format("chi={} genus={} saddles={} all_levels_connected={}\n", rep.euler_characteristic, rep.genus,
                       rep.saddle_count, rep.all_levels_connected ? "true" : "false");
    return kOk;
}

int cmd_levels(const std::string& path, const std::string& levels_text, std::ostream& out)
{
    const auto mesh = morse::validate_mesh(morse::read_soff_file(path));
    auto levels = parse_list(levels_text, "level");
    const auto rep = morse::connectedness_report(mesh);
    if (levels.empty()) {
        const auto crit = morse::pl_critical_points(mesh);
        std::vector<double> values;
        for (auto v : crit.minima)
            values.push_back(mesh.value(v));
        for (auto v : crit.maxima)
            values.push_back(mesh.value(v));
        for (const auto& sd : crit.saddles)
            values.push_back(mesh.value(sd.vertex));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t i = 1; i < values.size(); ++i)
            levels.push_back(0.5 * (values[i - 1] + values[i]));
    }
    for (double c : levels)
        out << fmt::format("level={} components={}\n", c, morse::level_components(mesh, c));
    for (const auto& p : rep.parity_per_level)
        out << fmt::format("critical_level={} saddles={}\n", p.level, p.saddles);
    out << fmt::format("all_levels_connected={}\n", rep.all_levels_connected ? "true" : "false");
    return kOk;
}

std::string indexed_path(const std::string& path, std::size_t k, std::size_t count)
{
    if (count == 1)
        return path;
    const std::filesystem::path p(path);
    return (p.parent_path() / (p.stem().string() + fmt::format("_{}", k) + p.extension().string())).string();
}

int cmd_fibers(const SystemOptions& o, unsigned threads, std::ostream& out)
{
    const auto spec = load_system(o.system);
    const auto beta = spec.beta_or_default(parse_list(o.beta, "beta"));
    auto levels = parse_list(o.levels, "level");
    if (levels.empty())
        levels = spec.default_levels;
    if (levels.empty())
        throw InputError("no levels given (use --levels)");
    fiber::SampleOptions sopt;
    sopt.resolution = o.res;
    sopt.seed = o.seed;
    sopt.threads = threads;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const auto s = fiber::sample_fiber(spec, beta, levels[k], sopt);
        out << fmt::format("level={} components={} cells={} epsilon={:.6g}{}\n", levels[k], s.component_count,
                           s.marked.size(), s.epsilon,
                           s.empty() ? " empty" : (s.any_boundary() ? " touches_boundary" : ""));
        if (!o.csv.empty()) {
            auto f = open_output(indexed_path(o.csv, k, levels.size()));
            fiber::write_labels_csv(f, s);
        }
    }
    return kOk;
}

int cmd_verify(const SystemOptions& o, unsigned threads, std::ostream& out)
{
    const auto spec = load_system(o.system);
    fiber::VerdictOptions vopt;
    vopt.levels = parse_list(o.levels, "level");
    vopt.beta = parse_list(o.beta, "beta");
    vopt.resolution = o.res;
    vopt.seed = o.seed;
    vopt.tol = o.tol;
    vopt.threads = threads;
    spec.beta_or_default(vopt.beta);
    const auto v = fiber::verdict(spec, vopt);
    fiber::write_report(out, spec, v, vopt);
    if (!o.csv.empty()) {
        auto f = open_output(o.csv);
        fiber::write_verdict_csv(f, spec, v);
    }
    if (v.prediction.prediction == fiber::Prediction::Inconclusive)
        return kInconclusive;
    return v.agree ? kOk : kDisagree;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"fibcon: defining polynomials, block signatures, Reeb graphs and fiber connectedness", "fibcon"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads for grid sweeps (0: all cores)");

    std::string path, dot, levels;
    singularity::ClassifyOptions copts;
    SystemOptions fopts, vopts;

    auto* defpoly = app.add_subcommand("defpoly", "defining polynomial of an isotropy file");
    defpoly->add_option("file", path)->required();

    auto* classify = app.add_subcommand("classify", "block signature of a span of quadratic forms");
    classify->add_option("file", path)->required();
    classify->add_option("--tol", copts.tol);
    classify->add_option("--seed", copts.seed);
    classify->add_option("--trials", copts.trials);

    auto* reeb = app.add_subcommand("reeb", "Reeb graph and level connectivity of a SOFF mesh");
    reeb->add_option("mesh", path)->required();
    reeb->add_option("--dot", dot, "DOT output path");

    auto* lev = app.add_subcommand("levels", "level-set component counts of a SOFF mesh");
    lev->add_option("mesh", path)->required();
    lev->add_option("--levels", levels);

    auto* fibers = app.add_subcommand("fibers", "grid oracle for fiber components");
    add_system_options(fibers, fopts);

    auto* verify = app.add_subcommand("verify", "prediction versus oracle");
    add_system_options(verify, vopts);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kBadInput;
    }

    try {
        if (*defpoly)
            return cmd_defpoly(path, out);
        if (*classify)
            return cmd_classify(path, copts, out);
        if (*reeb)
            return cmd_reeb(path, dot, out);
        if (*lev)
            return cmd_levels(path, levels, out);
        if (*fibers)
            return cmd_fibers(fopts, threads, out);
        if (*verify)
            return cmd_verify(vopts, threads, out);
    } catch (const lattice::KernelRankError& e) {
        err << "error: " << e.what() << "\n";
        return kKernelRank;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kBadInput;
    }
    return kBadInput;
}

} // namespace fibcon::cli
