#include "fibcon/fiber_lab.hpp"

#include <fmt/format.h>

#include <cmath>

namespace fibcon::fiber {

namespace {

SystemSpec make(std::string name, std::size_t n, Domain domain, std::vector<std::string> phi, std::string g)
{
    SystemSpec s;
    s.name = std::move(name);
    s.n = n;
    s.domain = std::move(domain);
    s.builtin = true;
    for (auto& p : phi) {
        s.phi.push_back(expr::parse_expression(p, 2 * n));
        s.phi_text.push_back(std::move(p));
    }
    s.g = expr::parse_expression(g, 2 * n);
    s.g_text = std::move(g);
    s.default_beta.assign(n - 1, 0.0);
    return s;
}

Domain cube(std::size_t dim, double half)
{
    return Domain::box(std::vector<Axis>(dim, Axis{-half, half, false}));
}

SystemSpec elliptic_model(const std::vector<double>& b)
{
    if (b.empty() || b.front() == 0.0)
        throw UnknownSystem("elliptic_model needs b0 != 0");
    const std::size_t n = b.size();
    std::vector<std::string> phi;
    for (std::size_t k = 2; k <= n; ++k)
        phi.push_back(fmt::format("0.5*(re{0}^2 + im{0}^2)", k));
    std::vector<std::string> terms;
    for (std::size_t k = 1; k <= n; ++k)
        terms.push_back(fmt::format("({0})*(re{1}^2 + im{1}^2)", b[k - 1], k));
    auto s = make(fmt::format("elliptic_model({})", fmt::join(b, ",")), n, cube(2 * n, 2.0), phi,
                  fmt::format("{}", fmt::join(terms, " + ")));
    // The only singular orbit is the origin, with the full torus as stabilizer.
    s.hints.push_back({std::vector<double>(2 * n, 0.0), true, true, 0.1});
    const double s0 = b.front();
    s.default_levels = {0.5 * s0, s0, 2.0 * s0};
    s.reduced_genus = 0;
    return s;
}

} // namespace

std::vector<std::string> builtin_names()
{
    return {"torus_cos", "ff_model", "elliptic_model(1)", "short_model", "double_bump", "torus_cos_x_sphere"};
}

SystemSpec builtin_system(std::string_view name)
{
    if (name == "torus_cos") {
        auto s = make("torus_cos", 1, Domain::torus2(), {}, "cos(2*pi*x) + cos(2*pi*y)");
        s.default_levels = {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5};
        return s;
    }
    if (name == "ff_model") {
        auto s = make("ff_model", 2, cube(4, 2.0), {"0.5*(re1^2 + im1^2 - re2^2 - im2^2)"}, "re1*im2 + re2*im1");
        s.hints.push_back({{0, 0, 0, 0}, true, true, 0.1});
        s.default_levels = {-1.0, 0.0, 1.0};
        return s;
    }
    if (name == "short_model") {
        auto s = make("short_model", 2, cube(4, 1.5), {"0.5*(re1^2 + im1^2 + re2^2 + im2^2)"},
                      "0.5*(re1^2 + im1^2 - re2^2 - im2^2)");
        s.hints.push_back({{0, 0, 0, 0}, true, false, 0.1});
        s.default_beta = {0.5};
        s.default_levels = {-0.4, -0.2, 0.0, 0.2, 0.4};
        s.reduced_genus = 0;
        return s;
    }
    if (name == "double_bump") {
        auto s = make("double_bump", 1, cube(2, 3.0), {}, "exp(-((x - 1)^2 + y^2)) + exp(-((x + 1)^2 + y^2))");
        s.default_levels = {0.2, 0.5, 0.8, 0.9, 1.0};
        s.reduced_genus = 0;
        return s;
    }
    if (name == "torus_cos_x_sphere") {
        auto s = make("torus_cos_x_sphere", 2, Domain::product(Domain::torus2(), Domain::sphere()), {"x4"},
                      "cos(2*pi*x1) + cos(2*pi*x2)");
        s.default_levels = {-1.5, -0.5, 0.0, 0.5, 1.5};
        s.reduced_genus = 1;
        return s;
    }
    if (name.substr(0, 14) == "elliptic_model") {
        std::string_view rest = name.substr(14);
        if (rest.empty())
            return elliptic_model({1.0});
        if (rest.front() != '(' || rest.back() != ')')
            throw UnknownSystem(fmt::format("unknown system '{}'", name));
        rest = rest.substr(1, rest.size() - 2);
        std::vector<double> b;
        std::size_t start = 0;
        while (start <= rest.size()) {
            const auto comma = rest.find(',', start);
            const auto tok = rest.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
            try {
                const auto e = expr::parse_expression(tok, 0);
                if (!e.is_constant())
                    throw UnknownSystem("");
                b.push_back(e.node().value);
            } catch (const std::exception&) {
                throw UnknownSystem(fmt::format("bad elliptic_model coefficient '{}'", tok));
            }
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        return elliptic_model(b);
    }
    throw UnknownSystem(fmt::format("unknown system '{}'", name));
}

} // namespace fibcon::fiber
