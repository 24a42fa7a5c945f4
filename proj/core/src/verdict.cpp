#include "compiled_system.hpp"
#include "fibcon/fiber_lab.hpp"
#include "fibcon/random.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace fibcon::fiber {

using singularity::ExtremumSign;
using singularity::ReducedPointType;

std::string_view to_string(Prediction p)
{
    switch (p) {
    case Prediction::AllConnected: return "AllConnected";
    case Prediction::SomeDisconnected: return "SomeDisconnected";
    case Prediction::Inconclusive: return "Inconclusive";
    }
    return "?";
}

namespace {

std::string num(double v)
{
    if (std::abs(v) < 5e-7)
        v = 0.0;
    return fmt::format("{:.6f}", v);
}

std::string point_text(const std::vector<double>& p)
{
    std::vector<std::string> parts;
    for (double v : p)
        parts.push_back(num(v));
    return fmt::format("({})", fmt::join(parts, ", "));
}

// Moves x onto Phi = beta by minimum-norm Gauss-Newton steps.
bool project_to_level(const detail::CompiledSystem& sys, std::size_t nphi, const std::vector<double>& beta,
                      std::vector<double>& x)
{
    const auto d = static_cast<Eigen::Index>(sys.dim);
    const auto k = static_cast<Eigen::Index>(nphi);
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd F(k);
        Eigen::MatrixXd D(k, d);
        for (Eigen::Index i = 0; i < k; ++i) {
            F(i) = sys.value[static_cast<std::size_t>(i)].eval(x.data()) - beta[static_cast<std::size_t>(i)];
            for (Eigen::Index a = 0; a < d; ++a)
                D(i, a) = sys.gradient[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)].eval(x.data());
        }
        if (F.lpNorm<Eigen::Infinity>() <= 1e-14)
            return true;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.singularValues()(0) == 0.0)
            return false;
        svd.setThreshold(1e-10);
        const Eigen::VectorXd step = svd.solve(F);
        for (Eigen::Index a = 0; a < d; ++a)
            x[static_cast<std::size_t>(a)] -= step(a);
    }
    return false;
}

// Sign of g - g(p) on the Phi-level near p: from a definite slice Hessian,
// otherwise from nearby sample points.
std::optional<ExtremumSign> extremum_sign(const detail::CompiledSystem& sys, std::size_t nphi,
                                           const std::vector<double>& beta, const CriticalPoint& cp, double radius,
                                           std::uint64_t seed)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cp.hessian.matrix());
    const auto& ev = es.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    if (scale > 0.0) {
        if (ev.minCoeff() > 1e-8 * scale)
            return ExtremumSign::Min;
        if (ev.maxCoeff() < -1e-8 * scale)
            return ExtremumSign::Max;
    }
    Rng rng(seed);
    int above = 0, below = 0;
    const std::size_t d = sys.dim;
    for (int s = 0; s < 64; ++s) {
        std::vector<double> x = cp.point;
        double n2 = 0.0;
        std::vector<double> u(d);
        for (auto& ui : u) {
            ui = rng.uniform(-1.0, 1.0);
            n2 += ui * ui;
        }
        const double len = std::sqrt(n2);
        if (len == 0.0)
            continue;
        for (std::size_t a = 0; a < d; ++a)
            x[a] += radius * u[a] / len;
        if (nphi && !project_to_level(sys, nphi, beta, x))
            continue;
        const double delta = sys.value[nphi].eval(x.data()) - cp.g_value;
        if (delta > 1e-13)
            ++above;
        else if (delta < -1e-13)
            ++below;
    }
    if (above > 0 && below == 0)
        return ExtremumSign::Min;
    if (below > 0 && above == 0)
        return ExtremumSign::Max;
    return std::nullopt;
}

std::vector<double> evenly_spaced_levels(const SystemSpec& spec, std::uint64_t seed)
{
    const expr::Program g(spec.g);
    Rng rng(seed);
    std::vector<double> x(spec.dimension());
    double lo = INFINITY, hi = -INFINITY;
    for (int s = 0; s < 4096; ++s) {
        for (std::size_t k = 0; k < x.size(); ++k)
            x[k] = rng.uniform(spec.domain.axes()[k].lo, spec.domain.axes()[k].hi);
        const double v = g.eval(x.data());
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    std::vector<double> levels;
    if (!(lo < hi))
        return {std::isfinite(lo) ? lo : 0.0};
    for (int i = 1; i <= 9; ++i)
        levels.push_back(std::stod(fmt::format("{:.6g}", lo + (hi - lo) * i / 10.0)));
    return levels;
}

} // namespace

PredictionResult predict_connectedness(const SystemSpec& spec, const VerdictOptions& opts)
{
    PredictionResult out;
    const std::size_t nphi = spec.n - 1;
    const auto beta = spec.beta_or_default(opts.beta);

    DetectOptions dopt;
    dopt.resolution = opts.detect_resolution;
    dopt.tol = opts.tol;
    if (nphi)
        dopt.beta = beta;
    const CriticalSearch search = detect_critical_mod_phi(spec, dopt);
    const detail::CompiledSystem sys(spec, false);

    double hmax = 0.0;
    for (const auto& ax : spec.domain.axes())
        hmax = std::max(hmax, ax.length() / static_cast<double>(search.resolution));

    bool degenerate = false;
    for (const auto& f : search.failures) {
        out.diagnostics.push_back(
            fmt::format("refinement did not converge near {} (cluster of {} cells)", point_text(f.start), f.cluster_size));
        degenerate = true;
    }

    for (const auto& cp : search.points) {
        ClassifiedPoint c;
        c.point = cp;
        if (const auto* hint = spec.hint_for(cp.point)) {
            c.stabilizer_connected = hint->connected;
            c.tall = hint->tall;
        }
        try {
            const singularity::HamiltonianSpan span(cp.span_forms);
            c.signature = singularity::classify_block_signature(span, opts.classify);
        } catch (const singularity::SingularityError& e) {
            c.signature = singularity::Classification::make_degenerate(e.what());
        }
        if (c.signature.degenerate()) {
            c.type = ReducedPointType::degenerate();
        } else {
            const auto& sig = *c.signature.signature;
            std::optional<ExtremumSign> sign = ExtremumSign::Min;
            if (sig.kh + sig.kf == 0)
                sign = extremum_sign(sys, nphi, beta, cp, 0.5 * hmax, opts.seed);
            if (!sign) {
                c.type = ReducedPointType::degenerate();
            } else {
                try {
                    c.type = singularity::morse_datum(sig, c.stabilizer_connected, *sign);
                } catch (const singularity::SingularityError&) {
                    c.type = ReducedPointType::degenerate();
                }
            }
        }
        if (c.type.kind == ReducedPointType::Kind::Degenerate) {
            degenerate = true;
            out.diagnostics.push_back(fmt::format("degenerate critical point at {}: {}", point_text(cp.point),
                                                  c.signature.reason.empty() ? "no extremum sign" : c.signature.reason));
        }
        out.points.push_back(std::move(c));
    }

    if (spec.reduced_genus) {
        out.genus = spec.reduced_genus;
    } else if (spec.n == 1 && spec.domain.closed() && !degenerate) {
        int chi = 0;
        for (const auto& c : out.points) {
            if (c.type.kind == ReducedPointType::Kind::EllipticExtremum)
                ++chi;
            else if (c.type.kind == ReducedPointType::Kind::HyperbolicSaddle)
                --chi;
        }
        if (chi <= 2 && chi % 2 == 0)
            out.genus = (2 - chi) / 2;
    }

    if (!spec.builtin && spec.n >= 2) {
        out.diagnostics.push_back("tallness of critical points is not determined for general systems with n >= 2");
        out.prediction = Prediction::Inconclusive;
        return out;
    }
    if (degenerate) {
        out.prediction = Prediction::Inconclusive;
        return out;
    }

    std::vector<double> saddle_levels;
    for (const auto& c : out.points)
        if (c.type.kind == ReducedPointType::Kind::HyperbolicSaddle && c.tall)
            saddle_levels.push_back(c.point.g_value);
    if (saddle_levels.empty()) {
        out.prediction = Prediction::AllConnected;
        return out;
    }
    if (out.genus && *out.genus == 0) {
        out.diagnostics.push_back("reduced surface has genus 0");
        out.prediction = Prediction::SomeDisconnected;
        return out;
    }
    std::sort(saddle_levels.begin(), saddle_levels.end());
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& c : out.points) {
        lo = std::min(lo, c.point.g_value);
        hi = std::max(hi, c.point.g_value);
    }
    const double tie = 1e-6 * std::max(1.0, hi - lo);
    for (std::size_t i = 1; i < saddle_levels.size(); ++i) {
        if (saddle_levels[i] - saddle_levels[i - 1] <= tie) {
            std::size_t count = 2;
            while (i + 1 < saddle_levels.size() && saddle_levels[i + 1] - saddle_levels[i] <= tie) {
                ++count;
                ++i;
            }
            out.diagnostics.push_back(
                fmt::format("{} saddles (index-1 points) in one fiber g={}", count, num(saddle_levels[i])));
            out.prediction = Prediction::Inconclusive;
            return out;
        }
    }
    out.diagnostics.push_back("one saddle per fiber");
    out.prediction = Prediction::SomeDisconnected;
    return out;
}

Verdict verdict(const SystemSpec& spec, const VerdictOptions& opts)
{
    Verdict v;
    v.beta = spec.beta_or_default(opts.beta);
    v.prediction = predict_connectedness(spec, opts);
    std::vector<double> levels = opts.levels;
    if (levels.empty())
        levels = spec.default_levels.empty() ? evenly_spaced_levels(spec, opts.seed) : spec.default_levels;

    SampleOptions sopt;
    sopt.resolution = opts.resolution;
    sopt.seed = opts.seed;
    sopt.threads = opts.threads;
    v.resolution = opts.resolution ? opts.resolution : default_resolution(spec.dimension());
    for (double c : levels) {
        const auto s = sample_fiber(spec, v.beta, c, sopt);
        v.oracle.push_back({c, s.component_count, s.marked.size(), s.any_boundary()});
    }
    switch (v.prediction.prediction) {
    case Prediction::AllConnected:
        v.agree = std::all_of(v.oracle.begin(), v.oracle.end(), [](const OracleLevel& o) { return o.components <= 1; });
        break;
    case Prediction::SomeDisconnected:
        v.agree = std::any_of(v.oracle.begin(), v.oracle.end(), [](const OracleLevel& o) { return o.components >= 2; });
        break;
    case Prediction::Inconclusive: v.agree = true; break;
    }
    return v;
}

void write_report(std::ostream& out, const SystemSpec& spec, const Verdict& v, const VerdictOptions& opts)
{
    std::vector<std::string> beta, levels;
    for (double b : v.beta)
        beta.push_back(fmt::format("{}", b));
    for (const auto& o : v.oracle)
        levels.push_back(fmt::format("{}", o.level));
    const std::size_t detect_res = opts.detect_resolution
                                       ? opts.detect_resolution
                                       : (spec.dimension() <= 2 ? 128 : spec.dimension() == 4 ? 20 : 10);

    out << fmt::format("system: {}\n", spec.name);
    out << fmt::format("n: {}\n", spec.n);
    out << fmt::format("domain: {}\n", spec.domain.to_string());
    for (std::size_t i = 0; i < spec.phi.size(); ++i)
        out << fmt::format("phi{}: {}\n", i + 1, i < spec.phi_text.size() ? spec.phi_text[i] : spec.phi[i].to_string());
    out << fmt::format("g: {}\n", spec.g_text.empty() ? spec.g.to_string() : spec.g_text);
    out << fmt::format("beta: [{}]\n", fmt::join(beta, ","));
    out << fmt::format("levels: [{}]\n", fmt::join(levels, ","));
    out << fmt::format("resolution: {}\n", v.resolution);
    out << fmt::format("detect_resolution: {}\n", detect_res);
    out << fmt::format("seed: {}\n", opts.seed);
    out << fmt::format("tol: {}\n", opts.tol);
    out << fmt::format("classify_trials: {}\n", opts.classify.trials);
    out << fmt::format("classify_tol: {}\n", opts.classify.tol);
    out << fmt::format("classify_seed: {}\n", opts.classify.seed);
    out << "\n";

    out << fmt::format("critical points: {}\n", v.prediction.points.size());
    for (const auto& c : v.prediction.points) {
        out << fmt::format("  x={} g={} signature={} type={} stabilizer={} tall={}\n", point_text(c.point.point),
                           num(c.point.g_value), singularity::to_string(c.signature), singularity::to_string(c.type),
                           c.stabilizer_connected ? "connected" : "disconnected", c.tall ? "true" : "false");
    }
    if (v.prediction.genus)
        out << fmt::format("reduced genus: {}\n", *v.prediction.genus);
    out << fmt::format("prediction: {}\n", to_string(v.prediction.prediction));
    for (const auto& d : v.prediction.diagnostics)
        out << fmt::format("  note: {}\n", d);
    out << "oracle:\n";
    for (const auto& o : v.oracle)
        out << fmt::format("  level={} components={} cells={}{}\n", o.level, o.components, o.marked_cells,
                           o.marked_cells == 0 ? " empty" : (o.boundary ? " touches_boundary" : ""));
    out << fmt::format("agree: {}\n", v.agree ? "true" : "false");
}

void write_verdict_csv(std::ostream& out, const SystemSpec& spec, const Verdict& v)
{
    out << "system,level,components,marked_cells,boundary,prediction,agree\n";
    for (const auto& o : v.oracle)
        out << fmt::format("{},{},{},{},{},{},{}\n", spec.name, o.level, o.components, o.marked_cells,
                           o.boundary ? 1 : 0, to_string(v.prediction.prediction), v.agree ? 1 : 0);
}

} // namespace fibcon::fiber
