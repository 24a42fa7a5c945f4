#include "fibcon/singularity.hpp"
#include "fibcon/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace fibcon::singularity {

namespace {

void check_index(std::size_t n, std::size_t k)
{
    if (k >= n)
        throw DimensionMismatch(fmt::format("coordinate index {} out of range for C^{}", k, n));
}

std::size_t xi(std::size_t k) { return 2 * k; }
std::size_t yi(std::size_t k) { return 2 * k + 1; }

void add_sym(Eigen::MatrixXd& a, std::size_t i, std::size_t j, double v)
{
    const auto r = static_cast<Eigen::Index>(i);
    const auto c = static_cast<Eigen::Index>(j);
    a(r, c) += v;
    if (r != c)
        a(c, r) += v;
}

} // namespace

QuadraticForm::QuadraticForm(Eigen::MatrixXd hessian) : a_(std::move(hessian))
{
    if (a_.rows() != a_.cols())
        throw InvalidForm(fmt::format("matrix is {}x{}, not square", a_.rows(), a_.cols()));
    if (a_.rows() % 2 != 0)
        throw InvalidForm(fmt::format("matrix size {} is odd", a_.rows()));
    if (!a_.allFinite())
        throw InvalidForm("matrix has non-finite entries");
    const double scale = std::max(1.0, a_.size() ? a_.cwiseAbs().maxCoeff() : 0.0);
    const double asym = a_.size() ? (a_ - a_.transpose()).cwiseAbs().maxCoeff() : 0.0;
    if (asym > 1e-12 * scale)
        throw InvalidForm(fmt::format("matrix is not symmetric (defect {:g})", asym));
    a_ = 0.5 * (a_ + a_.transpose());
}

double QuadraticForm::operator()(std::span<const double> v) const
{
    if (v.size() != dimension())
        throw DimensionMismatch("vector size does not match the form");
    const Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
    return 0.5 * x.dot(a_ * x);
}

QuadraticForm QuadraticForm::zero(std::size_t n)
{
    const auto d = static_cast<Eigen::Index>(2 * n);
    return QuadraticForm(Eigen::MatrixXd::Zero(d, d));
}

QuadraticForm QuadraticForm::elliptic(std::size_t n, std::size_t k)
{
    check_index(n, k);
    Eigen::MatrixXd a = zero(n).matrix();
    add_sym(a, xi(k), xi(k), 1.0);
    add_sym(a, yi(k), yi(k), 1.0);
    return QuadraticForm(std::move(a));
}

QuadraticForm QuadraticForm::hyperbolic(std::size_t n, std::size_t k)
{
    check_index(n, k);
    Eigen::MatrixXd a = zero(n).matrix();
    add_sym(a, xi(k), yi(k), 2.0);
    return QuadraticForm(std::move(a));
}

QuadraticForm QuadraticForm::focus_focus_phi(std::size_t n, std::size_t k, std::size_t l)
{
    check_index(n, k);
    check_index(n, l);
    Eigen::MatrixXd a = zero(n).matrix();
    add_sym(a, xi(k), xi(k), 1.0);
    add_sym(a, yi(k), yi(k), 1.0);
    add_sym(a, xi(l), xi(l), -1.0);
    add_sym(a, yi(l), yi(l), -1.0);
    return QuadraticForm(std::move(a));
}

QuadraticForm QuadraticForm::focus_focus_g(std::size_t n, std::size_t k, std::size_t l)
{
    check_index(n, k);
    check_index(n, l);
    Eigen::MatrixXd a = zero(n).matrix();
    add_sym(a, xi(k), yi(l), 1.0);
    add_sym(a, yi(k), xi(l), 1.0);
    return QuadraticForm(std::move(a));
}

Eigen::MatrixXd symplectic_matrix(std::size_t n)
{
    const auto d = static_cast<Eigen::Index>(2 * n);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t k = 0; k < n; ++k) {
        j(static_cast<Eigen::Index>(xi(k)), static_cast<Eigen::Index>(yi(k))) = -1.0;
        j(static_cast<Eigen::Index>(yi(k)), static_cast<Eigen::Index>(xi(k))) = 1.0;
    }
    return j;
}

Eigen::MatrixXd hamiltonian_operator(const QuadraticForm& q)
{
    return symplectic_matrix(q.n()) * q.matrix();
}

std::string BlockSignature::to_string() const { return fmt::format("{},{},{}", ke, kh, kf); }

BlockSignature parse_block_signature(std::string_view text)
{
    BlockSignature s;
    char c1 = 0, c2 = 0;
    std::istringstream in{std::string(text)};
    if (!(in >> s.ke >> c1 >> s.kh >> c2 >> s.kf) || c1 != ',' || c2 != ',' || s.ke < 0 || s.kh < 0 || s.kf < 0)
        throw SingularityError(fmt::format("cannot parse block signature '{}'", text));
    in >> std::ws;
    if (!in.eof())
        throw SingularityError(fmt::format("trailing characters in block signature '{}'", text));
    return s;
}

std::string to_string(const Classification& c)
{
    return c.signature ? c.signature->to_string() : std::string("degenerate");
}

HamiltonianSpan::HamiltonianSpan(std::vector<QuadraticForm> forms) : forms_(std::move(forms))
{
    if (forms_.empty())
        throw InvalidForm("span needs at least one form");
    const auto d = forms_.front().dimension();
    for (const auto& f : forms_)
        if (f.dimension() != d)
            throw DimensionMismatch(fmt::format("forms of size {} and {} in one span", d, f.dimension()));

    const auto entries = static_cast<Eigen::Index>(d * d);
    Eigen::MatrixXd stacked(entries, static_cast<Eigen::Index>(forms_.size()));
    for (std::size_t k = 0; k < forms_.size(); ++k)
        stacked.col(static_cast<Eigen::Index>(k)) = forms_[k].matrix().reshaped();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0)
        throw InvalidForm("span contains only the zero form");
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) <= 1e-9 * sv(0))
            throw InvalidForm("forms in the span are linearly dependent");
}

Classification classify_form(const QuadraticForm& q, double tol)
{
    const double norm = q.matrix().norm();
    if (norm == 0.0)
        return Classification::make_degenerate("zero form");

    const Eigen::EigenSolver<Eigen::MatrixXd> solver(hamiltonian_operator(q), false);
    if (solver.info() != Eigen::Success)
        return Classification::make_degenerate("eigenvalue computation failed");
    const Eigen::VectorXcd ev = solver.eigenvalues();

    int imaginary = 0, real = 0, complex = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const std::complex<double> lam = ev(i);
        const double mag = std::abs(lam);
        if (mag <= tol * norm)
            return Classification::make_degenerate("zero eigenvalue");
        for (Eigen::Index j = i + 1; j < ev.size(); ++j)
            if (std::abs(lam - ev(j)) <= tol * norm)
                return Classification::make_degenerate("repeated eigenvalue");
        if (std::abs(lam.real()) <= tol * mag)
            ++imaginary;
        else if (std::abs(lam.imag()) <= tol * mag)
            ++real;
        else
            ++complex;
    }
    if (imaginary % 2 != 0 || real % 2 != 0 || complex % 4 != 0)
        return Classification::make_degenerate("eigenvalue counts are not Hamiltonian");
    return {BlockSignature{imaginary / 2, real / 2, complex / 4}, {}};
}

Classification classify_block_signature(const HamiltonianSpan& span, const ClassifyOptions& opts)
{
    if (opts.trials < 1)
        throw SingularityError("classify_block_signature needs at least one trial");
    Rng rng(opts.seed);
    const auto& forms = span.forms();
    const auto d = static_cast<Eigen::Index>(span.dimension());

    std::map<std::string, std::pair<int, Classification>> votes;
    for (int t = 0; t < opts.trials; ++t) {
        std::vector<std::int64_t> coeff(forms.size());
        bool nonzero = false;
        while (!nonzero) {
            for (auto& cf : coeff) {
                cf = rng.integer(-10, 10);
                nonzero = nonzero || cf != 0;
            }
        }
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
        for (std::size_t k = 0; k < forms.size(); ++k)
            a += static_cast<double>(coeff[k]) * forms[k].matrix();
        auto result = classify_form(QuadraticForm(std::move(a)), opts.tol);
        auto& slot = votes[to_string(result)];
        if (slot.first == 0)
            slot.second = std::move(result);
        ++slot.first;
    }

    const auto best = std::max_element(votes.begin(), votes.end(),
                                       [](const auto& a, const auto& b) { return a.second.first < b.second.first; });
    if (2 * best->second.first <= opts.trials)
        return Classification::make_degenerate("no majority among random combinations");
    return best->second.second;
}

std::string_view to_string(LocalCase c)
{
    switch (c) {
    case LocalCase::N1: return "N1";
    case LocalCase::N2split: return "N2split";
    case LocalCase::N2ff: return "N2ff";
    case LocalCase::Nbig: return "Nbig";
    }
    return "?";
}

std::size_t LocalQuadraticData::n() const
{
    return kind == LocalCase::Nbig ? c.size() : c.size() + 1;
}

double LocalQuadraticData::discriminant() const
{
    switch (kind) {
    case LocalCase::N1:
    case LocalCase::N2split: return ax * ax + ay * ay - arho * arho;
    case LocalCase::N2ff: return ax * ax + ay * ay - 4.0 * arho * arho;
    case LocalCase::Nbig: return 0.0;
    }
    return 0.0;
}

double LocalQuadraticData::discriminant_scale() const
{
    const double w = kind == LocalCase::N2ff ? 4.0 : 1.0;
    return ax * ax + ay * ay + w * arho * arho;
}

QuadraticForm LocalQuadraticData::generic_form() const
{
    const std::size_t dim = n();
    if (dim == 0)
        throw DimensionMismatch("local data has no coordinates");
    if (kind == LocalCase::N2ff && dim < 2)
        throw DimensionMismatch("N2ff needs c_1");
    Eigen::MatrixXd a = QuadraticForm::zero(dim).matrix();
    std::size_t first_elliptic = 0;
    switch (kind) {
    case LocalCase::N1:
    case LocalCase::N2split:
        add_sym(a, xi(0), xi(0), 2.0 * ax + 2.0 * arho);
        add_sym(a, yi(0), yi(0), -2.0 * ax + 2.0 * arho);
        add_sym(a, xi(0), yi(0), 2.0 * ay);
        first_elliptic = 1;
        break;
    case LocalCase::N2ff:
        add_sym(a, xi(0), xi(1), ax);
        add_sym(a, yi(0), yi(1), -ax);
        add_sym(a, xi(0), yi(1), ay);
        add_sym(a, yi(0), xi(1), ay);
        for (std::size_t k = 0; k < 2; ++k) {
            add_sym(a, xi(k), xi(k), 2.0 * arho);
            add_sym(a, yi(k), yi(k), 2.0 * arho);
        }
        a += c[0] * QuadraticForm::focus_focus_phi(dim, 0, 1).matrix();
        first_elliptic = 2;
        break;
    case LocalCase::Nbig:
        first_elliptic = 0;
        break;
    }
    const std::size_t offset = kind == LocalCase::Nbig ? 0 : 1;
    for (std::size_t k = first_elliptic; k < dim; ++k) {
        const double ck = c[k - offset];
        add_sym(a, xi(k), xi(k), 2.0 * ck);
        add_sym(a, yi(k), yi(k), 2.0 * ck);
    }
    return QuadraticForm(std::move(a));
}

Classification case_classify(const LocalQuadraticData& d)
{
    for (double ck : d.c)
        if (ck == 0.0)
            return Classification::make_degenerate("vanishing elliptic coefficient");

    const int n = static_cast<int>(d.n());
    if (d.kind == LocalCase::Nbig) {
        if (n == 0)
            return Classification::make_degenerate("no coordinates");
        return {BlockSignature{n, 0, 0}, {}};
    }
    if (d.kind == LocalCase::N2ff && d.c.empty())
        return Classification::make_degenerate("N2ff needs c_1");

    const double disc = d.discriminant();
    const double scale = d.discriminant_scale();
    if (scale == 0.0 || std::abs(disc) <= 1e-12 * scale)
        return Classification::make_degenerate("vanishing discriminant");

    if (d.kind == LocalCase::N2ff)
        return disc > 0 ? Classification{BlockSignature{n - 2, 0, 1}, {}} : Classification{BlockSignature{n, 0, 0}, {}};
    return disc > 0 ? Classification{BlockSignature{n - 1, 1, 0}, {}} : Classification{BlockSignature{n, 0, 0}, {}};
}

bool consistency_check(const LocalQuadraticData& d, const ClassifyOptions& opts)
{
    if (d.kind != LocalCase::Nbig && std::abs(d.discriminant()) <= opts.tol * d.discriminant_scale())
        throw PreconditionViolation(
            fmt::format("discriminant {:g} is within tolerance of zero", d.discriminant()));
    const HamiltonianSpan span({d.generic_form()});
    return case_classify(d) == classify_block_signature(span, opts);
}

std::string_view to_string(ZeroSetType t)
{
    switch (t) {
    case ZeroSetType::Point: return "Point";
    case ZeroSetType::Cross: return "Cross";
    case ZeroSetType::Line: return "Line";
    }
    return "?";
}

ZeroSetType reduced_zero_set_type(const LocalQuadraticData& d)
{
    const auto cls = case_classify(d);
    if (cls.degenerate())
        throw DegenerateInput(cls.reason);
    const auto& s = *cls.signature;
    if (s.kh == 0 && s.kf == 0)
        return ZeroSetType::Point;
    if (s.kh == 1 && d.kind == LocalCase::N1)
        return ZeroSetType::Cross;
    return ZeroSetType::Line;
}

std::string to_string(const ReducedPointType& t)
{
    switch (t.kind) {
    case ReducedPointType::Kind::RegularPoint: return "regular";
    case ReducedPointType::Kind::EllipticExtremum: return t.sign == ExtremumSign::Min ? "minimum" : "maximum";
    case ReducedPointType::Kind::HyperbolicSaddle: return "saddle";
    case ReducedPointType::Kind::Degenerate: return "degenerate";
    }
    return "?";
}

ReducedPointType morse_datum(const BlockSignature& sig, bool stabilizer_connected, ExtremumSign extremum_sign)
{
    if (sig.ke < 0 || sig.kh < 0 || sig.kf < 0)
        throw SingularityError("negative block count");
    if (sig.kh + sig.kf > 1)
        throw TooManyBlocks(fmt::format("signature {} has more than one non-elliptic block", sig.to_string()));
    if (sig.kh == 1)
        return stabilizer_connected ? ReducedPointType::saddle() : ReducedPointType::regular();
    if (sig.kf == 1)
        return ReducedPointType::regular();
    return ReducedPointType::extremum(extremum_sign);
}

QuadraticForm quadratic_from_function(const ScalarField& f, std::span<const double> point, double step)
{
    if (!(step > 0.0))
        throw SingularityError("finite-difference step must be positive");
    const std::size_t d = point.size();
    std::vector<double> x(point.begin(), point.end());
    auto eval = [&]() {
        const double v = f(x);
        if (!std::isfinite(v))
            throw NonFiniteValue("scalar field returned a non-finite value");
        return v;
    };
    const double f0 = eval();
    const double h2 = step * step;

    Eigen::MatrixXd a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        x[i] = point[i] + step;
        const double fp = eval();
        x[i] = point[i] - step;
        const double fm = eval();
        x[i] = point[i];
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = (fp - 2.0 * f0 + fm) / h2;
        for (std::size_t j = 0; j < i; ++j) {
            double acc = 0.0;
            for (int si : {1, -1})
                for (int sj : {1, -1}) {
                    x[i] = point[i] + si * step;
                    x[j] = point[j] + sj * step;
                    acc += si * sj * eval();
                }
            x[i] = point[i];
            x[j] = point[j];
            const double v = acc / (4.0 * h2);
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return QuadraticForm(std::move(a));
}

double canonical_chart_value(const ReducedPointType& kind, double x, double y)
{
    switch (kind.kind) {
    case ReducedPointType::Kind::EllipticExtremum:
        return kind.sign == ExtremumSign::Min ? x * x + y * y : -(x * x + y * y);
    case ReducedPointType::Kind::HyperbolicSaddle: return x * x - y * y;
    case ReducedPointType::Kind::RegularPoint: return y;
    case ReducedPointType::Kind::Degenerate: break;
    }
    throw DegenerateInput("degenerate points have no canonical chart");
}

EllipticChart::EllipticChart(std::int64_t degree, double radial_constant) : n_(degree), c_(radial_constant)
{
    if (n_ < 1)
        throw SingularityError("chart degree must be at least 1");
    if (!(c_ > 0.0))
        throw SingularityError("radial constant must be positive");
}

Eigen::Vector2d EllipticChart::forward(double r, double theta) const
{
    const double rho = std::sqrt(c_) * std::pow(r, 1.0 / static_cast<double>(n_));
    return {rho * std::cos(theta), rho * std::sin(theta)};
}

Eigen::Vector2d EllipticChart::inverse(double x, double y) const
{
    const double rho = std::hypot(x, y);
    const double r = std::pow(rho / std::sqrt(c_), static_cast<double>(n_));
    return {r, std::atan2(y, x)};
}

double EllipticChart::value(double r, double theta) const
{
    const auto p = forward(r, theta);
    return p.squaredNorm();
}

void write_quadratic_form(std::ostream& out, const QuadraticForm& q)
{
    const auto& a = q.matrix();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out << (j ? " " : "") << fmt::format("{}", a(i, j));
        out << '\n';
    }
}

std::vector<QuadraticForm> parse_quadratic_forms(std::string_view text)
{
    std::vector<QuadraticForm> forms;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;

    auto flush = [&]() {
        if (rows.empty())
            return;
        const auto d = static_cast<Eigen::Index>(rows.size());
        Eigen::MatrixXd a(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != d)
                throw InvalidForm(fmt::format("form ending at line {} is not square", line_no));
            for (Eigen::Index j = 0; j < d; ++j)
                a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        forms.emplace_back(std::move(a));
        rows.clear();
    };

    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(tok, &used));
                if (used != tok.size())
                    throw std::invalid_argument(tok);
            } catch (const std::logic_error&) {
                throw InvalidForm(fmt::format("line {}: '{}' is not a number", line_no, tok));
            }
        }
        if (row.empty())
            flush();
        else
            rows.push_back(std::move(row));
    }
    flush();
    return forms;
}

} // namespace fibcon::singularity
