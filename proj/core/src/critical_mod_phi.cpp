#include "compiled_system.hpp"
#include "disjoint_sets.hpp"
#include "fibcon/fiber_lab.hpp"
#include "fibcon/random.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fibcon::fiber {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::size_t default_detect_resolution(std::size_t dim)
{
    if (dim <= 2)
        return 128;
    if (dim == 4)
        return 20;
    return 10;
}

// Values and derivatives of every component at one point.
struct Jet {
    VectorXd value;              // [component]
    MatrixXd grad;               // component x axis
    std::vector<MatrixXd> hess;  // per component
};

Jet evaluate(const detail::CompiledSystem& sys, const VectorXd& x)
{
    const std::size_t d = sys.dim, m = sys.components();
    Jet j;
    j.value.resize(static_cast<Eigen::Index>(m));
    j.grad.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    j.hess.assign(m, MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
    for (std::size_t c = 0; c < m; ++c) {
        const auto ci = static_cast<Eigen::Index>(c);
        j.value(ci) = sys.value[c].eval(x.data());
        for (std::size_t a = 0; a < d; ++a) {
            const auto ai = static_cast<Eigen::Index>(a);
            j.grad(ci, ai) = sys.gradient[c][a].eval(x.data());
            for (std::size_t b = a; b < d; ++b) {
                const auto bi = static_cast<Eigen::Index>(b);
                const double h = sys.hessian[c][a][b].eval(x.data());
                j.hess[c](ai, bi) = h;
                j.hess[c](bi, ai) = h;
            }
        }
    }
    return j;
}

// Least-squares multipliers of grad g on the Phi gradients.
VectorXd multipliers(const Jet& j, std::size_t nphi)
{
    if (nphi == 0)
        return VectorXd();
    const auto k = static_cast<Eigen::Index>(nphi);
    const MatrixXd G = j.grad.topRows(k).transpose();
    Eigen::JacobiSVD<MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    svd.setThreshold(smax > 0.0 ? 1e-10 : 1.0);
    if (smax == 0.0)
        return VectorXd::Zero(k);
    return svd.solve(j.grad.row(k).transpose());
}

VectorXd residual_vector(const Jet& j, std::size_t nphi, const VectorXd& lambda)
{
    VectorXd r = j.grad.row(static_cast<Eigen::Index>(nphi)).transpose();
    for (std::size_t i = 0; i < nphi; ++i)
        r -= lambda(static_cast<Eigen::Index>(i)) * j.grad.row(static_cast<Eigen::Index>(i)).transpose();
    return r;
}

// F(x, lambda) = (grad g - lambda.grad Phi, Phi - beta) and its Jacobian.
void system_at(const Jet& j, std::size_t nphi, const VectorXd& lambda, const std::vector<double>& beta, VectorXd& F,
               MatrixXd& J)
{
    const auto d = j.grad.cols();
    const auto k = static_cast<Eigen::Index>(nphi);
    F.resize(d + k);
    J = MatrixXd::Zero(d + k, d + k);
    F.head(d) = residual_vector(j, nphi, lambda);
    J.topLeftCorner(d, d) = j.hess[nphi];
    for (Eigen::Index i = 0; i < k; ++i) {
        J.topLeftCorner(d, d) -= lambda(i) * j.hess[static_cast<std::size_t>(i)];
        J.block(0, d + i, d, 1) = -j.grad.row(i).transpose();
        J.block(d + i, 0, 1, d) = j.grad.row(i);
        F(d + i) = j.value(i) - beta[static_cast<std::size_t>(i)];
    }
}

VectorXd pinv_step(const MatrixXd& J, const VectorXd& F)
{
    Eigen::JacobiSVD<MatrixXd> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smax = svd.singularValues()(0);
    if (smax == 0.0)
        return VectorXd::Zero(F.size());
    svd.setThreshold(1e-10);
    return -svd.solve(F);
}

void wrap(const Domain& dom, VectorXd& x)
{
    for (std::size_t k = 0; k < dom.dimension(); ++k) {
        const auto& ax = dom.axes()[k];
        if (!ax.periodic)
            continue;
        const auto ki = static_cast<Eigen::Index>(k);
        const double L = ax.length();
        x(ki) = ax.lo + (x(ki) - ax.lo - L * std::floor((x(ki) - ax.lo) / L));
    }
}

bool inside(const Domain& dom, const VectorXd& x, const std::vector<double>& slack)
{
    for (std::size_t k = 0; k < dom.dimension(); ++k) {
        const auto& ax = dom.axes()[k];
        const double v = x(static_cast<Eigen::Index>(k));
        if (!ax.periodic && (v < ax.lo - slack[k] || v > ax.hi + slack[k]))
            return false;
    }
    return true;
}

// Within `cells` grid cells of each other in every axis, with periodic wrap.
bool close_on_grid(const Domain& dom, const std::vector<double>& a, const std::vector<double>& b,
                   const std::vector<double>& h, double cells)
{
    for (std::size_t k = 0; k < a.size(); ++k) {
        double dlt = a[k] - b[k];
        const auto& ax = dom.axes()[k];
        if (ax.periodic)
            dlt -= ax.length() * std::round(dlt / ax.length());
        if (std::abs(dlt) > cells * h[k])
            return false;
    }
    return true;
}

struct Refined {
    bool ok = false;
    VectorXd x;
    double residual = 0.0;
};

Refined refine(const detail::CompiledSystem& sys, const Domain& dom, std::size_t nphi, const std::vector<double>& beta,
               VectorXd x, double tol_abs, double polish, const std::vector<double>& slack)
{
    const auto d = static_cast<Eigen::Index>(sys.dim);
    Jet j = evaluate(sys, x);
    VectorXd lambda = multipliers(j, nphi);
    VectorXd F;
    MatrixXd J;
    system_at(j, nphi, lambda, beta, F, J);
    double norm = F.lpNorm<Eigen::Infinity>();
    double mu = 1e-3;
    Refined out;
    // Keep polishing past tol_abs: at points where grad Phi vanishes the
    // iteration is only linearly convergent and the rank test needs more digits.
    for (int it = 0; it < 400 && std::isfinite(norm); ++it) {
        if (norm <= polish)
            break;
        bool accepted = false;
        VectorXd step = pinv_step(J, F);
        for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
            if (attempt > 0) {
                const MatrixXd A = J.transpose() * J + mu * MatrixXd::Identity(J.cols(), J.cols());
                step = -A.ldlt().solve(J.transpose() * F);
                mu *= 4.0;
            }
            VectorXd xn = x + step.head(d);
            wrap(dom, xn);
            VectorXd ln = lambda + step.tail(static_cast<Eigen::Index>(nphi));
            Jet jn = evaluate(sys, xn);
            VectorXd Fn;
            MatrixXd Jn;
            system_at(jn, nphi, ln, beta, Fn, Jn);
            const double nn = Fn.lpNorm<Eigen::Infinity>();
            if (std::isfinite(nn) && nn < norm) {
                x = xn;
                lambda = ln;
                j = std::move(jn);
                F = Fn;
                J = Jn;
                norm = nn;
                accepted = true;
                mu = std::max(mu / 16.0, 1e-9);
            }
        }
        if (!accepted)
            break;
    }
    out.x = x;
    out.residual = residual_vector(j, nphi, multipliers(j, nphi)).norm();
    out.ok = std::isfinite(norm) && norm <= tol_abs && inside(dom, x, slack);
    return out;
}

MatrixXd null_space(const MatrixXd& M, std::size_t cols, double rel)
{
    const auto c = static_cast<Eigen::Index>(cols);
    if (M.rows() == 0)
        return MatrixXd::Identity(c, c);
    Eigen::JacobiSVD<MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (smax > 0.0 && s(i) > rel * std::max(1.0, smax))
            ++rank;
    return svd.matrixV().rightCols(c - rank);
}

double omega(const VectorXd& u, const VectorXd& v)
{
    // omega(u, v) = (J u) . v with J (x, y) = (-y, x) in each pair.
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < u.size(); i += 2)
        s += u(i) * v(i + 1) - u(i + 1) * v(i);
    return s;
}

MatrixXd symplectic_basis(const MatrixXd& S)
{
    std::vector<VectorXd> pool;
    for (Eigen::Index c = 0; c < S.cols(); ++c)
        pool.push_back(S.col(c));
    MatrixXd B(S.rows(), S.cols());
    Eigen::Index out = 0;
    while (!pool.empty()) {
        VectorXd e = pool.front();
        std::size_t best = 0;
        double w = 0.0;
        for (std::size_t i = 1; i < pool.size(); ++i) {
            const double wi = omega(e, pool[i]);
            if (std::abs(wi) > std::abs(w)) {
                w = wi;
                best = i;
            }
        }
        if (best == 0 || std::abs(w) < 1e-10)
            throw FiberError("symplectic form is degenerate on the slice");
        const VectorXd f = pool[best] / w;
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
        pool.erase(pool.begin());
        for (auto& v : pool)
            v = v - omega(v, f) * e + omega(v, e) * f;
        B.col(out++) = e;
        B.col(out++) = f;
    }
    return B;
}

CriticalPoint describe(const detail::CompiledSystem& sys, std::size_t nphi, const VectorXd& x, double residual)
{
    const Jet j = evaluate(sys, x);
    const auto d = static_cast<Eigen::Index>(sys.dim);
    const auto k = static_cast<Eigen::Index>(nphi);
    CriticalPoint cp;
    cp.point.assign(x.data(), x.data() + d);
    cp.g_value = j.value(k);
    for (Eigen::Index i = 0; i < k; ++i)
        cp.phi_value.push_back(j.value(i));
    cp.residual = residual;

    // Slice: kernel of DPhi, orthogonal to the orbit directions J grad Phi_i.
    MatrixXd M(2 * k, d);
    for (Eigen::Index i = 0; i < k; ++i) {
        const VectorXd gi = j.grad.row(i).transpose();
        VectorXd jg(d);
        for (Eigen::Index a = 0; a + 1 < d; a += 2) {
            jg(a) = -gi(a + 1);
            jg(a + 1) = gi(a);
        }
        M.row(i) = gi.transpose();
        M.row(k + i) = jg.transpose();
    }
    const MatrixXd S = null_space(M, sys.dim, 1e-5);
    cp.slice_basis = symplectic_basis(S);
    const MatrixXd& B = cp.slice_basis;

    const VectorXd lambda = multipliers(j, nphi);
    MatrixXd H = j.hess[nphi];
    for (Eigen::Index i = 0; i < k; ++i)
        H -= lambda(i) * j.hess[static_cast<std::size_t>(i)];
    auto restrict = [&](const MatrixXd& A) {
        MatrixXd R = B.transpose() * A * B;
        R = 0.5 * (R + R.transpose());
        return singularity::QuadraticForm(R);
    };
    if (B.cols() == 0)
        throw FiberError("empty slice at critical point");
    cp.hessian = restrict(H);

    const MatrixXd W = null_space(j.grad.transpose(), sys.components(), 1e-5);
    for (Eigen::Index c = 0; c < W.cols(); ++c) {
        MatrixXd A = MatrixXd::Zero(d, d);
        for (std::size_t f = 0; f < sys.components(); ++f)
            A += W(static_cast<Eigen::Index>(f), c) * j.hess[f];
        cp.span_forms.push_back(restrict(A));
    }
    return cp;
}

} // namespace

CriticalSearch detect_critical_mod_phi(const SystemSpec& spec, const DetectOptions& opts)
{
    const std::size_t d = spec.dimension();
    const std::size_t nphi = spec.n - 1;
    const std::size_t r = opts.resolution ? opts.resolution : default_detect_resolution(d);
    if (r < 2)
        throw FiberError("resolution must be at least 2");
    const std::vector<double> beta = nphi ? spec.beta_or_default(opts.beta.value_or(std::vector<double>{}))
                                          : std::vector<double>{};
    const detail::CompiledSystem sys(spec, true);
    const auto& axes = spec.domain.axes();

    std::vector<double> h(d);
    for (std::size_t k = 0; k < d; ++k)
        h[k] = axes[k].length() / static_cast<double>(r);
    const double hmax = *std::max_element(h.begin(), h.end());

    double scale = 1.0;
    {
        Rng rng(0x5eed);
        std::vector<double> x(d);
        for (int s = 0; s < 1024; ++s) {
            for (std::size_t k = 0; k < d; ++k)
                x[k] = rng.uniform(axes[k].lo, axes[k].hi);
            for (std::size_t c = 0; c < sys.components(); ++c)
                for (std::size_t k = 0; k < d; ++k) {
                    const double v = std::abs(sys.gradient[c][k].eval(x.data()));
                    if (std::isfinite(v))
                        scale = std::max(scale, v);
                }
        }
    }
    const double tol_abs = opts.tol * scale;

    std::vector<std::uint64_t> stride(d);
    stride[d - 1] = 1;
    for (std::size_t k = d - 1; k-- > 0;)
        stride[k] = stride[k + 1] * r;
    const std::uint64_t total = stride[0] * r;
    if (total > 200'000'000ULL)
        throw FiberError("detection grid is too large");

    // A cell is a candidate when the Newton step from its centre stays within
    // one cell in every axis.
    std::vector<double> step_size(total, -1.0);
    std::vector<std::uint64_t> candidates;
    VectorXd x(static_cast<Eigen::Index>(d)), F;
    MatrixXd J;
    for (std::uint64_t cell = 0; cell < total; ++cell) {
        std::uint64_t rem = cell;
        for (std::size_t k = 0; k < d; ++k) {
            const std::uint64_t i = rem / stride[k];
            rem -= i * stride[k];
            x(static_cast<Eigen::Index>(k)) = axes[k].lo + (static_cast<double>(i) + 0.5) * h[k];
        }
        const Jet j = evaluate(sys, x);
        if (!j.value.allFinite() || !j.grad.allFinite())
            continue;
        // Cheap rejection: Phi too far from beta for a one-cell step.
        bool near = true;
        for (std::size_t i = 0; i < nphi && near; ++i) {
            const double gnorm = j.grad.row(static_cast<Eigen::Index>(i)).norm();
            const double hn = j.hess[i].norm();
            if (std::abs(j.value(static_cast<Eigen::Index>(i)) - beta[i]) > 2.0 * (gnorm + hn * hmax) * hmax * std::sqrt(double(d)))
                near = false;
        }
        if (!near)
            continue;
        const VectorXd lambda = multipliers(j, nphi);
        system_at(j, nphi, lambda, beta, F, J);
        if (!J.allFinite())
            continue;
        const VectorXd step = pinv_step(J, F);
        // A rank-deficient J can give a short least-squares step that does not
        // solve the linear model at all.
        if ((F + J * step).norm() > 0.25 * F.norm())
            continue;
        double worst = 0.0;
        for (std::size_t k = 0; k < d; ++k)
            worst = std::max(worst, std::abs(step(static_cast<Eigen::Index>(k))) / h[k]);
        if (worst <= 1.0) {
            step_size[cell] = worst;
            candidates.push_back(cell);
        }
    }

    // Cluster candidates over the full neighbourhood (with periodic wrap).
    fibcon::detail::DisjointSets ds(candidates.size());
    auto lookup = [&](std::uint64_t cell) -> std::size_t {
        const auto it = std::lower_bound(candidates.begin(), candidates.end(), cell);
        if (it == candidates.end() || *it != cell)
            return candidates.size();
        return static_cast<std::size_t>(it - candidates.begin());
    };
    std::vector<std::int64_t> coord(d), nb(d);
    std::size_t offsets = 1;
    for (std::size_t k = 0; k < d; ++k)
        offsets *= 3;
    for (std::size_t a = 0; a < candidates.size(); ++a) {
        std::uint64_t rem = candidates[a];
        for (std::size_t k = 0; k < d; ++k) {
            coord[k] = static_cast<std::int64_t>(rem / stride[k]);
            rem -= static_cast<std::uint64_t>(coord[k]) * stride[k];
        }
        for (std::size_t o = 0; o < offsets; ++o) {
            std::size_t t = o;
            bool valid = true;
            std::uint64_t cell = 0;
            for (std::size_t k = 0; k < d; ++k) {
                nb[k] = coord[k] + static_cast<std::int64_t>(t % 3) - 1;
                t /= 3;
                const auto R = static_cast<std::int64_t>(r);
                if (nb[k] < 0 || nb[k] >= R) {
                    if (!axes[k].periodic) {
                        valid = false;
                        break;
                    }
                    nb[k] = (nb[k] + R) % R;
                }
                cell += static_cast<std::uint64_t>(nb[k]) * stride[k];
            }
            if (!valid)
                continue;
            const std::size_t b = lookup(cell);
            if (b < candidates.size())
                ds.unite(a, b);
        }
    }

    std::vector<std::vector<std::size_t>> clusters;
    {
        std::vector<std::size_t> id(candidates.size(), SIZE_MAX);
        for (std::size_t a = 0; a < candidates.size(); ++a) {
            const std::size_t root = ds.find(a);
            if (id[root] == SIZE_MAX) {
                id[root] = clusters.size();
                clusters.emplace_back();
            }
            clusters[id[root]].push_back(a);
        }
    }

    CriticalSearch out;
    out.resolution = r;
    out.threshold = hmax;
    std::vector<double> slack(h);
    for (const auto& cl : clusters) {
        const std::size_t best = *std::min_element(cl.begin(), cl.end(), [&](std::size_t p, std::size_t q) {
            return step_size[candidates[p]] < step_size[candidates[q]];
        });
        std::uint64_t rem = candidates[best];
        VectorXd x0(static_cast<Eigen::Index>(d));
        for (std::size_t k = 0; k < d; ++k) {
            const std::uint64_t i = rem / stride[k];
            rem -= i * stride[k];
            x0(static_cast<Eigen::Index>(k)) = axes[k].lo + (static_cast<double>(i) + 0.5) * h[k];
        }
        const Refined rf = refine(sys, spec.domain, nphi, beta, x0, tol_abs, 1e-15 * scale, slack);
        if (!rf.ok) {
            out.failures.push_back({std::vector<double>(x0.data(), x0.data() + x0.size()), rf.residual, cl.size()});
            continue;
        }
        const std::vector<double> p(rf.x.data(), rf.x.data() + rf.x.size());
        const bool duplicate = std::any_of(out.points.begin(), out.points.end(), [&](const CriticalPoint& q) {
            return close_on_grid(spec.domain, p, q.point, h, 2.0);
        });
        if (duplicate)
            continue;
        try {
            out.points.push_back(describe(sys, nphi, rf.x, rf.residual));
        } catch (const std::exception&) {
            out.failures.push_back({p, rf.residual, cl.size()});
        }
    }
    std::sort(out.points.begin(), out.points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.g_value != b.g_value)
            return a.g_value < b.g_value;
        return a.point < b.point;
    });
    return out;
}

} // namespace fibcon::fiber
