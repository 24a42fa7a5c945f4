// One PASS/FAIL line per acceptance criterion.  Exit status is the number of
// failed criteria.

#include "fibcon/fiber_lab.hpp"
#include "fibcon/lattice_models.hpp"
#include "fibcon/mesh_fixtures.hpp"
#include "fibcon/random.hpp"
#include "fibcon/singularity.hpp"
#include "fibcon/surface_morse.hpp"

#ifdef FIBCON_HAVE_CLI
#include "cli.hpp"
#endif

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

using namespace fibcon;
namespace fx = fibcon::morse::fixtures;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body, double limit = 0.0)
{
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (limit > 0.0 && secs >= limit) {
        o.pass = false;
        o.detail += fmt::format("; runtime exceeds {:.0f} s", limit);
    }
    if (!o.pass)
        ++failures;
    fmt::print("{} criterion {}: {} [{}] ({:.2f} s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail, secs);
    std::fflush(stdout);
}

lattice::DefiningPolynomial tall_xi(std::vector<std::int64_t> xi)
{
    lattice::DefiningPolynomial dp;
    dp.degree = std::accumulate(xi.begin(), xi.end(), std::int64_t{0});
    dp.xi = std::move(xi);
    dp.tall = true;
    return dp;
}

Outcome defining_polynomials()
{
    using lattice::compute_defining_polynomial;
    using lattice::parse_isotropy;
    struct Case {
        const char* text;
        std::vector<std::int64_t> xi;
        bool tall;
    };
    const Case cases[] = {{"h: 0\ntorsion: [1/2]\n", {2}, true},
                          {"h: 1\nweights: [[1,-1]]\n", {1, 1}, true},
                          {"h: 1\nweights: [[1,1]]\n", {1, -1}, false}};
    double worst = 0.0;
    bool ok = true;
    for (const auto& c : cases) {
        const auto data = parse_isotropy(c.text);
        const int reps = 200;
        const auto t0 = Clock::now();
        lattice::DefiningPolynomial dp;
        for (int i = 0; i < reps; ++i)
            dp = compute_defining_polynomial(data);
        worst = std::max(worst, std::chrono::duration<double>(Clock::now() - t0).count() / reps);
        ok = ok && dp.xi == c.xi && dp.tall == c.tall && dp.degree == 2;
    }
    return {ok && worst < 1e-3, fmt::format("xi=(2),(1,1) tall, (1,1)-weights short; worst {:.1f} us", worst * 1e6)};
}

Outcome radial_identity()
{
    double worst = 0.0;
    for (const auto& xi : {std::vector<std::int64_t>{1, 1}, {2}, {0, 0, 1}, {1, 2}, {3, 1, 2}}) {
        const auto dp = tall_xi(xi);
        const double c = lattice::radial_constant(dp);
        for (const auto& z : lattice::moment_zero_sample(dp, 1000, 1)) {
            double r2 = 0.0;
            for (const auto& zi : z)
                r2 += std::norm(zi);
            const double rhs =
                c * std::pow(std::abs(lattice::eval_defining_polynomial(dp, z)), 2.0 / static_cast<double>(dp.degree));
            worst = std::max(worst, std::abs(r2 - rhs));
        }
    }
    return {worst <= 1e-9, fmt::format("max error {:.2e} over 5 x 1000 samples", worst)};
}

Outcome block_classification()
{
    using namespace singularity;
    const auto e = classify_block_signature(HamiltonianSpan({QuadraticForm::elliptic(1, 0)}));
    const auto h = classify_block_signature(HamiltonianSpan({QuadraticForm::hyperbolic(1, 0)}));
    const auto f = classify_block_signature(
        HamiltonianSpan({QuadraticForm::focus_focus_phi(2, 0, 1), QuadraticForm::focus_focus_g(2, 0, 1)}));
    const bool blocks = e.signature == BlockSignature{1, 0, 0} && h.signature == BlockSignature{0, 1, 0} &&
                        f.signature == BlockSignature{0, 0, 1};
    Rng rng(12345);
    int agree = 0, total = 0;
    while (total < 100) {
        LocalQuadraticData d;
        d.kind = static_cast<LocalCase>(rng.integer(0, 3));
        d.ax = rng.uniform(-1, 1);
        d.ay = rng.uniform(-1, 1);
        d.arho = rng.uniform(-1, 1);
        const auto len = rng.integer(1, 3);
        for (std::int64_t k = 0; k < len; ++k)
            d.c.push_back(rng.uniform(0.2, 1.0) * (rng.integer(0, 1) ? 1 : -1));
        if (d.kind != LocalCase::Nbig && std::abs(d.discriminant()) <= 1e-6)
            continue;
        ++total;
        agree += consistency_check(d) ? 1 : 0;
    }
    return {blocks && agree == total,
            fmt::format("blocks ({}) ({}) ({}); case_classify agreement {}/{}", to_string(e), to_string(h), to_string(f), agree,
                        total)};
}

Outcome torus_example()
{
    const auto m = morse::validate_mesh(fx::cos_cos_torus(64));
    const auto r = morse::pl_critical_points(m);
    bool ok = r.minima.size() == 1 && r.maxima.size() == 1 && r.saddle_count() == 2 && r.saddles.size() == 2;
    ok = ok && std::abs(m.value(r.minima[0]) + 2.0) < 1e-12 && std::abs(m.value(r.maxima[0]) - 2.0) < 1e-12;
    for (const auto& s : r.saddles)
        ok = ok && std::abs(m.value(s.vertex)) < 1e-12;
    const auto rep = morse::connectedness_report(m);
    const bool parity = rep.parity_per_level.size() == 1 && rep.parity_per_level[0].saddles == 2 &&
                        std::abs(rep.parity_per_level[0].level) < 1e-12 && rep.all_levels_connected;

    const auto spec = fiber::builtin_system("torus_cos");
    fiber::SampleOptions o;
    o.resolution = 512;
    int levels = 0, connected = 0;
    for (int k = -19; k <= 19; ++k) {
        ++levels;
        connected += fiber::sample_fiber(spec, {}, 0.1 * k, o).component_count == 1 ? 1 : 0;
    }
    return {ok && parity && connected == levels,
            fmt::format("PL min/max/saddles {}/{}/{}; parity {}; oracle 1 component on {}/{} levels",
                        r.minima.size(), r.maxima.size(), r.saddle_count(), parity ? "ok" : "bad", connected, levels)};
}

Outcome focus_focus()
{
    const auto spec = fiber::builtin_system("ff_model");
    fiber::VerdictOptions o;
    o.levels = {-1.0, 0.0, 1.0};
    o.beta = {0.0};
    o.resolution = 48;
    const auto v = fiber::verdict(spec, o);
    bool ok = v.prediction.prediction == fiber::Prediction::AllConnected && v.agree;
    for (const auto& l : v.oracle)
        ok = ok && l.components == 1;

    const lattice::DefiningPolynomial dp{{1, 1}, 2, true};
    double worst = 0.0, phi_worst = 0.0;
    for (const auto& z : lattice::moment_zero_sample(dp, 500, 9)) {
        const std::vector<double> x{z[0].real(), z[0].imag(), z[1].real(), z[1].imag()};
        phi_worst = std::max(phi_worst, std::abs(spec.phi[0].eval(x)));
        worst = std::max(worst, std::abs(spec.g.eval(x) - lattice::eval_defining_polynomial(dp, z).imag()));
    }
    ok = ok && worst <= 1e-9 && phi_worst <= 1e-12;
    return {ok, fmt::format("prediction {}; oracle {},{},{}; chart error {:.2e}", fiber::to_string(v.prediction.prediction),
                            v.oracle[0].components, v.oracle[1].components, v.oracle[2].components, worst)};
}

fx::PointField random_sphere_field(Rng& rng)
{
    std::array<double, 3> tilt{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const int bumps = static_cast<int>(rng.integer(0, 4));
    std::vector<std::array<double, 5>> b;
    for (int i = 0; i < bumps; ++i) {
        const double z = rng.uniform(-1, 1), phi = rng.uniform(0, 2 * std::numbers::pi);
        const double r = std::sqrt(1 - z * z);
        b.push_back({r * std::cos(phi), r * std::sin(phi), z, rng.uniform(-2.5, 2.5), rng.uniform(0.15, 0.6)});
    }
    return [tilt, b](const std::array<double, 3>& p) {
        double v = tilt[0] * p[0] + tilt[1] * p[1] + tilt[2] * p[2];
        for (const auto& q : b) {
            const double d2 = (p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]) + (p[2] - q[2]) * (p[2] - q[2]);
            v += q[3] * std::exp(-d2 / (q[4] * q[4]));
        }
        return v;
    };
}

Outcome sphere_level_suite()
{
    Rng rng(31415);
    int violations = 0, with_saddles = 0;
    for (int t = 0; t < 200; ++t) {
        const auto m = morse::validate_mesh(fx::icosphere(2 + t % 3, random_sphere_field(rng)));
        const auto r = morse::pl_critical_points(m);
        std::vector<double> v;
        for (auto i : r.minima)
            v.push_back(m.value(i));
        for (auto i : r.maxima)
            v.push_back(m.value(i));
        for (const auto& s : r.saddles)
            v.push_back(m.value(s.vertex));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        bool connected = true;
        for (std::size_t i = 1; i < v.size(); ++i)
            connected = connected && morse::level_components(m, 0.5 * (v[i - 1] + v[i])) <= 1;
        with_saddles += r.saddle_count() > 0 ? 1 : 0;
        violations += ((r.saddle_count() == 0) != connected) ? 1 : 0;
    }
    return {violations == 0, fmt::format("{} violations; {} of 200 fields have saddles", violations, with_saddles)};
}

Outcome converse()
{
    const auto spec = fiber::builtin_system("double_bump");
    const auto pred = fiber::predict_connectedness(spec);
    double saddle = NAN;
    for (const auto& p : pred.points)
        if (p.type.kind == singularity::ReducedPointType::Kind::HyperbolicSaddle)
            saddle = p.point.g_value;
    fiber::SampleOptions o;
    const auto above = fiber::sample_fiber(spec, {}, 0.9, o).component_count;
    int code = -1;
#ifdef FIBCON_HAVE_CLI
    std::ostringstream out, err;
    code = cli::run_cli({"verify", "double_bump"}, out, err);
#endif
    const bool ok = pred.prediction == fiber::Prediction::SomeDisconnected && 0.9 > saddle && above == 2 && code == 0;
    return {ok, fmt::format("prediction {}; saddle at g={:.4f}; oracle {} components at g=0.9; verify exit {}",
                            fiber::to_string(pred.prediction), saddle, above, code)};
}

Outcome genus_bound()
{
    std::vector<morse::ScalarMesh> fixtures{fx::cos_cos_torus(16), fx::cos_cos_torus(64), fx::standing_torus(16),
                                            fx::standing_torus(32), fx::four_saddle_torus(32)};
    Rng rng(77);
    for (int t = 0; t < 20; ++t) {
        const double a = rng.uniform(-1, 1), c = rng.uniform(0.2, 1), ph = rng.uniform(0, 6);
        fixtures.push_back(fx::torus_grid(24, [=](double x, double y) {
            return std::cos(2 * std::numbers::pi * x) + c * std::cos(2 * std::numbers::pi * y + ph) +
                   a * std::sin(2 * std::numbers::pi * (x + y));
        }));
    }
    bool all = true;
    int checked = 0;
    for (const auto& f : fixtures) {
        const auto m = morse::validate_mesh(f);
        if (m.genus() != 1)
            return {false, "fixture is not genus 1"};
        all = all && morse::pl_critical_points(m).saddle_count() >= 2;
        ++checked;
    }
    // Four saddles with the minima on one level and the maxima on one level.
    const auto four = morse::validate_mesh(fx::four_saddle_torus(32));
    const auto r = morse::pl_critical_points(four);
    std::set<double> min_levels, max_levels;
    for (auto v : r.minima)
        min_levels.insert(four.value(v));
    for (auto v : r.maxima)
        max_levels.insert(four.value(v));
    const auto rep = morse::connectedness_report(four);
    const bool second = r.saddle_count() == 4 && min_levels.size() == 1 && max_levels.size() == 1 &&
                        !rep.all_levels_connected;
    return {all && second, fmt::format("{} genus-1 fixtures with >= 2 saddles; four-saddle torus: {} saddles, "
                                       "{} min level, {} max level, disconnected level {}",
                                       checked, r.saddle_count(), min_levels.size(), max_levels.size(),
                                       rep.all_levels_connected ? "no" : "yes")};
}

Outcome poisson_sanity()
{
    std::vector<std::string> names = fiber::builtin_names();
    names.push_back("elliptic_model(1,-2,3)");
    int passed = 0;
    for (const auto& n : names)
        passed += fiber::poisson_check(fiber::builtin_system(n), 200, 1e-9, 0) ? 1 : 0;
    return {passed == static_cast<int>(names.size()), fmt::format("{}/{} built-ins pass", passed, names.size())};
}

} // namespace

int main()
{
    criterion(1, "defining polynomials", defining_polynomials);
    criterion(2, "radial identity", radial_identity);
    criterion(3, "block classification", block_classification);
    criterion(4, "torus example", torus_example, 30.0);
    criterion(5, "focus-focus model", focus_focus, 120.0);
    criterion(6, "sphere level connectivity", sphere_level_suite);
    criterion(7, "converse at desk scale", converse);
    criterion(8, "genus bound", genus_bound);
    criterion(9, "Poisson sanity", poisson_sanity);
    fmt::print("{} of 9 criteria failed\n", failures);
    return failures;
}
