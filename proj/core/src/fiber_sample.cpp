#include "compiled_system.hpp"
#include "disjoint_sets.hpp"
#include "fibcon/fiber_lab.hpp"
#include "fibcon/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>
#include <unordered_map>

namespace fibcon::fiber {

bool FiberSample::any_boundary() const
{
    return std::any_of(touches_boundary.begin(), touches_boundary.end(), [](bool b) { return b; });
}

std::size_t default_resolution(std::size_t dimension)
{
    if (dimension <= 2)
        return 512;
    if (dimension == 4)
        return 48;
    return 16;
}

namespace {

constexpr int kLipschitzSamples = 4096;
constexpr double kLipschitzSafety = 1.25;

std::vector<double> sampled_lipschitz(const SystemSpec& spec, const detail::CompiledSystem& sys, std::uint64_t seed)
{
    const std::size_t d = sys.dim;
    std::vector<double> L(d, 0.0), x(d);
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (int s = 0; s < kLipschitzSamples; ++s) {
        for (std::size_t k = 0; k < d; ++k) {
            const auto& ax = spec.domain.axes()[k];
            x[k] = rng.uniform(ax.lo, ax.hi);
        }
        for (std::size_t c = 0; c < sys.components(); ++c)
            for (std::size_t k = 0; k < d; ++k) {
                const double v = std::abs(sys.gradient[c][k].eval(x.data()));
                if (std::isfinite(v))
                    L[k] = std::max(L[k], v);
            }
    }
    for (auto& l : L)
        l *= kLipschitzSafety;
    return L;
}

} // namespace

FiberSample sample_fiber(const SystemSpec& spec, const std::vector<double>& beta_in, double c, const SampleOptions& opts)
{
    const auto beta = spec.beta_or_default(beta_in);
    const std::size_t d = spec.dimension();
    const std::size_t r = opts.resolution ? opts.resolution : default_resolution(d);
    if (r < 2)
        throw FiberError("resolution must be at least 2");
    double total = 1.0;
    for (std::size_t k = 0; k < d; ++k)
        total *= static_cast<double>(r);
    if (total > 4e9)
        throw FiberError(fmt::format("grid of {}^{} cells is too large", r, d));

    const detail::CompiledSystem sys(spec);
    const auto& axes = spec.domain.axes();

    FiberSample out;
    out.resolution.assign(d, r);
    for (const auto& ax : axes)
        out.spacing.push_back(ax.length() / static_cast<double>(r));

    const auto L = sampled_lipschitz(spec, sys, opts.seed);
    double lh = 0.0;
    for (std::size_t k = 0; k < d; ++k)
        lh = std::max(lh, L[k] * out.spacing[k]);
    out.lipschitz = *std::max_element(L.begin(), L.end());
    out.epsilon = std::max(std::sqrt(static_cast<double>(d)) * lh, 1e-12);

    std::vector<double> target = beta;
    target.push_back(c);

    std::vector<std::uint64_t> stride(d);
    stride[d - 1] = 1;
    for (std::size_t k = d - 1; k-- > 0;)
        stride[k] = stride[k + 1] * r;
    const std::uint64_t slab = stride[0];

    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, r));

    std::vector<std::vector<std::uint64_t>> chunks(threads);
    auto work = [&](unsigned t) {
        std::vector<double> x(d);
        const std::size_t i_begin = r * t / threads, i_end = r * (t + 1) / threads;
        auto& mine = chunks[t];
        for (std::uint64_t cell = i_begin * slab; cell < i_end * slab; ++cell) {
            std::uint64_t rem = cell;
            for (std::size_t k = 0; k < d; ++k) {
                const std::uint64_t i = rem / stride[k];
                rem -= i * stride[k];
                x[k] = axes[k].lo + (static_cast<double>(i) + 0.5) * out.spacing[k];
            }
            bool hit = true;
            for (std::size_t f = 0; f < sys.components(); ++f) {
                const double v = sys.value[f].eval(x.data());
                if (!(std::abs(v - target[f]) <= out.epsilon)) {
                    hit = false;
                    break;
                }
            }
            if (hit)
                mine.push_back(cell);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work, t);
        for (auto& th : pool)
            th.join();
    }
    for (auto& ch : chunks)
        out.marked.insert(out.marked.end(), ch.begin(), ch.end());

    const std::size_t m = out.marked.size();
    fibcon::detail::DisjointSets ds;
    ds.reset(m);
    auto lookup = [&](std::uint64_t cell) -> std::size_t {
        const auto it = std::lower_bound(out.marked.begin(), out.marked.end(), cell);
        if (it == out.marked.end() || *it != cell)
            return m;
        return static_cast<std::size_t>(it - out.marked.begin());
    };

    std::vector<bool> box_axis(d, false);
    std::vector<std::pair<std::size_t, std::size_t>> spheres; // (theta axis, h axis)
    for (const auto& f : spec.domain.factors()) {
        if (f.kind == Domain::FactorKind::Box)
            for (std::size_t k = 0; k < f.dimension; ++k)
                box_axis[f.first_axis + k] = true;
        else if (f.kind == Domain::FactorKind::Sphere)
            spheres.emplace_back(f.first_axis, f.first_axis + 1);
    }

    std::vector<bool> on_boundary(m, false);
    std::vector<std::uint64_t> coord(d);
    std::vector<std::unordered_map<std::uint64_t, std::size_t>> pole_first(2 * spheres.size());
    for (std::size_t a = 0; a < m; ++a) {
        const std::uint64_t cell = out.marked[a];
        std::uint64_t rem = cell;
        for (std::size_t k = 0; k < d; ++k) {
            coord[k] = rem / stride[k];
            rem -= coord[k] * stride[k];
        }
        for (std::size_t k = 0; k < d; ++k) {
            if (box_axis[k] && (coord[k] == 0 || coord[k] == r - 1))
                on_boundary[a] = true;
            std::uint64_t nb;
            if (coord[k] + 1 < r)
                nb = cell + stride[k];
            else if (axes[k].periodic)
                nb = cell - coord[k] * stride[k];
            else
                continue;
            const std::size_t b = lookup(nb);
            if (b < m)
                ds.unite(a, b);
        }
        for (std::size_t s = 0; s < spheres.size(); ++s) {
            const auto [ta, ha] = spheres[s];
            if (coord[ha] != 0 && coord[ha] != r - 1)
                continue;
            const std::uint64_t key = cell - coord[ta] * stride[ta];
            auto& first = pole_first[2 * s + (coord[ha] == 0 ? 0 : 1)];
            const auto [it, inserted] = first.emplace(key, a);
            if (!inserted)
                ds.unite(a, it->second);
        }
    }

    out.labels.assign(m, 0);
    constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> root_label(m, unset);
    for (std::size_t a = 0; a < m; ++a) {
        const std::size_t root = ds.find(a);
        if (root_label[root] == unset) {
            root_label[root] = static_cast<std::uint32_t>(out.component_count++);
            out.touches_boundary.push_back(false);
        }
        out.labels[a] = root_label[root];
        if (on_boundary[a])
            out.touches_boundary[out.labels[a]] = true;
    }
    return out;
}

void write_labels_csv(std::ostream& out, const FiberSample& s)
{
    out << "cell_index,label\n";
    for (std::size_t i = 0; i < s.marked.size(); ++i)
        out << fmt::format("{},{}\n", s.marked[i], s.labels[i]);
}

} // namespace fibcon::fiber
