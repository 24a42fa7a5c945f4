#include "fibcon/lattice_models.hpp"
#include "fibcon/random.hpp"

#include "smith_normal_form.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>

namespace fibcon::lattice {

using detail::MpzMatrix;

KernelRankError::KernelRankError(std::size_t rank)
    : LatticeError(fmt::format("ker(weights^T) has rank {}, expected 1 for a complexity-one model", rank)),
      kernel_rank(rank)
{
}

NotTallError::NotTallError() : LatticeError("operation requires a tall defining polynomial") {}

ParseError::ParseError(std::string message, std::size_t line_no)
    : LatticeError(fmt::format("line {}: {}", line_no, message)), line(line_no)
{
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

Rational reduce_mod_one(Rational q)
{
    if (q.den == 0)
        throw LatticeError("torsion entry has zero denominator");
    if (q.den < 0) {
        q.den = -q.den;
        q.num = -q.num;
    }
    const std::int64_t g = std::gcd(q.num, q.den);
    if (g > 1) {
        q.num /= g;
        q.den /= g;
    }
    q.num -= floor_div(q.num, q.den) * q.den;
    if (q.num == 0)
        q.den = 1;
    return q;
}

std::int64_t to_int64(const mpz_class& v)
{
    if (!v.fits_slong_p())
        throw LatticeError("defining polynomial exponent overflows 64-bit integers");
    return v.get_si();
}

void require_tall(const DefiningPolynomial& dp)
{
    if (!is_tall(dp))
        throw NotTallError();
}

std::complex<double> ipow(std::complex<double> z, std::int64_t e)
{
    std::complex<double> out{1.0, 0.0};
    for (std::int64_t i = 0; i < e; ++i)
        out *= z;
    return out;
}

} // namespace

IsotropyData::IsotropyData(std::size_t slice_dimension,
                           std::vector<std::vector<std::int64_t>> weight_columns,
                           std::vector<std::vector<Rational>> torsion_generators)
    : dim_(slice_dimension), columns_(std::move(weight_columns))
{
    if (dim_ == 0)
        throw DimensionMismatch("slice dimension h+1 must be at least 1");
    for (const auto& col : columns_)
        if (col.size() != dim_)
            throw DimensionMismatch(
                fmt::format("weight column has length {}, expected {}", col.size(), dim_));
    if (columns_.size() >= dim_)
        throw DimensionMismatch("connected part of H must have dimension at most h");

    for (auto& gen : torsion_generators) {
        if (gen.size() != dim_)
            throw DimensionMismatch(
                fmt::format("torsion generator has length {}, expected {}", gen.size(), dim_));
        bool identity = true;
        for (auto& q : gen) {
            q = reduce_mod_one(q);
            identity = identity && q.num == 0;
        }
        if (!identity)
            torsion_.push_back(std::move(gen));
    }
}

std::string DefiningPolynomial::to_string() const
{
    return fmt::format("xi=[{}], N={}, tall={}", fmt::join(xi, ","), degree, tall ? "true" : "false");
}

DefiningPolynomial compute_defining_polynomial(const IsotropyData& data)
{
    const std::size_t n = data.slice_dimension();
    const auto& cols = data.weight_columns();

    // A = weights^T, shape d x (h+1).
    MpzMatrix A(cols.size(), n);
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < n; ++i)
            A(j, i) = static_cast<long>(cols[j][i]);

    const auto snf = detail::smith_normal_form(A);
    if (snf.rank() != cols.size())
        throw InjectivityError(fmt::format("weight matrix has rank {} < {}", snf.rank(), cols.size()));
    for (const auto& d : snf.divisors)
        if (d != 1)
            throw InjectivityError(fmt::format("weight matrix has elementary divisor {}", d.get_str()));

    const auto kernel = detail::integer_kernel(snf);
    if (kernel.size() != 1)
        throw KernelRankError(kernel.size());
    const auto& primitive = kernel.front();

    // Smallest multiple of the primitive generator that is integral on every torsion generator.
    mpz_class multiplier = 1;
    for (const auto& gen : data.torsion_generators()) {
        mpq_class pairing = 0;
        for (std::size_t i = 0; i < n; ++i)
            pairing += mpq_class(primitive[i]) * mpq_class(static_cast<long>(gen[i].num), static_cast<long>(gen[i].den));
        pairing.canonicalize();
        mpz_lcm(multiplier.get_mpz_t(), multiplier.get_mpz_t(), pairing.get_den_mpz_t());
    }

    DefiningPolynomial dp;
    dp.xi.resize(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        dp.xi[i] = to_int64(multiplier * primitive[i]);
        has_pos = has_pos || dp.xi[i] > 0;
        has_neg = has_neg || dp.xi[i] < 0;
    }
    dp.tall = !(has_pos && has_neg);

    bool flip = false;
    if (dp.tall) {
        flip = has_neg;
    } else {
        for (auto v : dp.xi)
            if (v != 0) {
                flip = v < 0;
                break;
            }
    }
    if (flip)
        for (auto& v : dp.xi)
            v = -v;

    dp.degree = 0;
    for (auto v : dp.xi)
        dp.degree += v < 0 ? -v : v;
    return dp;
}

bool is_tall(const DefiningPolynomial& dp)
{
    for (std::size_t i = 0; i < dp.xi.size(); ++i)
        for (std::size_t j = i + 1; j < dp.xi.size(); ++j)
            if ((dp.xi[i] > 0 && dp.xi[j] < 0) || (dp.xi[i] < 0 && dp.xi[j] > 0))
                return false;
    return true;
}

bool in_image_rho_star(const DefiningPolynomial& dp, std::span<const double> b, double tol)
{
    if (b.size() != dp.xi.size())
        throw DimensionMismatch(fmt::format("vector has length {}, expected {}", b.size(), dp.xi.size()));
    double dot = 0.0, bb = 0.0, xx = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto x = static_cast<double>(dp.xi[i]);
        dot += b[i] * x;
        bb += b[i] * b[i];
        xx += x * x;
    }
    return std::abs(dot) <= tol * std::sqrt(bb) * std::sqrt(xx);
}

InvariantMonomial InvariantWord::expand(const DefiningPolynomial& dp) const
{
    InvariantMonomial m{abs_sq_powers, abs_sq_powers};
    for (std::size_t i = 0; i < dp.xi.size(); ++i) {
        m.holo[i] += p_power * dp.xi[i];
        m.antiholo[i] += conj_p_power * dp.xi[i];
    }
    return m;
}

InvariantWord decompose_invariant(const InvariantMonomial& m, const DefiningPolynomial& dp)
{
    require_tall(dp);
    const std::size_t n = dp.xi.size();
    if (m.holo.size() != n || m.antiholo.size() != n)
        throw DimensionMismatch("monomial exponent vectors do not match the slice dimension");
    for (std::size_t i = 0; i < n; ++i)
        if (m.holo[i] < 0 || m.antiholo[i] < 0)
            throw LatticeError("monomial exponents must be nonnegative");

    // j - k = t * xi for a single integer t.
    std::optional<std::int64_t> t;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t diff = m.holo[i] - m.antiholo[i];
        if (dp.xi[i] == 0) {
            if (diff != 0)
                throw NotInvariantError("exponent difference is not a multiple of xi");
            continue;
        }
        if (diff % dp.xi[i] != 0)
            throw NotInvariantError("exponent difference is not a multiple of xi");
        const std::int64_t q = diff / dp.xi[i];
        if (t && *t != q)
            throw NotInvariantError("exponent difference is not a multiple of xi");
        t = q;
    }
    const std::int64_t mult = t.value_or(0);

    InvariantWord w;
    if (mult >= 0) {
        w.p_power = mult;
        w.abs_sq_powers = m.antiholo;
    } else {
        w.conj_p_power = -mult;
        w.abs_sq_powers = m.holo;
    }
    return w;
}

double radial_constant(const DefiningPolynomial& dp)
{
    require_tall(dp);
    if (dp.degree < 1)
        throw LatticeError("radial constant needs degree N >= 1");
    const auto N = static_cast<double>(dp.degree);
    double log_prod = 0.0;
    for (auto v : dp.xi)
        if (v > 0)
            log_prod += static_cast<double>(v) * std::log(static_cast<double>(v));
    return N * std::exp(-log_prod / N);
}

std::vector<std::vector<std::complex<double>>>
moment_zero_sample(const DefiningPolynomial& dp, std::size_t count, std::uint64_t seed)
{
    require_tall(dp);
    Rng rng(seed);
    std::vector<std::vector<std::complex<double>>> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        const double c = 1.0 - rng.uniform(); // (0, 1]
        std::vector<std::complex<double>> z(dp.xi.size());
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double radius = std::sqrt(c * static_cast<double>(dp.xi[j]));
            const double phase = 2.0 * std::numbers::pi * rng.uniform();
            z[j] = std::polar(radius, phase);
        }
        out.push_back(std::move(z));
    }
    return out;
}

std::complex<double> eval_defining_polynomial(const DefiningPolynomial& dp,
                                              std::span<const std::complex<double>> z)
{
    require_tall(dp);
    if (z.size() != dp.xi.size())
        throw DimensionMismatch("point dimension does not match the defining polynomial");
    std::complex<double> out{1.0, 0.0};
    for (std::size_t j = 0; j < z.size(); ++j)
        out *= ipow(z[j], dp.xi[j]);
    return out;
}

std::complex<double> eval_monomial(const InvariantMonomial& m, std::span<const std::complex<double>> z)
{
    if (z.size() != m.holo.size() || z.size() != m.antiholo.size())
        throw DimensionMismatch("point dimension does not match the monomial");
    std::complex<double> out{1.0, 0.0};
    for (std::size_t j = 0; j < z.size(); ++j)
        out *= ipow(z[j], m.holo[j]) * ipow(std::conj(z[j]), m.antiholo[j]);
    return out;
}

std::complex<double> eval_word(const InvariantWord& w, const DefiningPolynomial& dp,
                               std::span<const std::complex<double>> z)
{
    const auto p = eval_defining_polynomial(dp, z);
    std::complex<double> out = ipow(p, w.p_power) * ipow(std::conj(p), w.conj_p_power);
    for (std::size_t j = 0; j < z.size(); ++j)
        out *= std::pow(std::norm(z[j]), static_cast<double>(w.abs_sq_powers[j]));
    return out;
}

// ---- text format -------------------------------------------------------------

namespace {

// value := number | number '/' number | '[' [value (',' value)*] ']'
struct Node {
    bool is_list = false;
    Rational scalar;
    std::vector<Node> items;
};

class BracketParser {
public:
    BracketParser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

    Node parse_all()
    {
        Node n = value();
        skip();
        if (pos_ != s_.size())
            fail("trailing characters");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError(fmt::format("{} at column {}", what, pos_ + 1), line_);
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    std::int64_t integer()
    {
        skip();
        const std::size_t start = pos_;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+'))
            ++pos_;
        const std::size_t digits = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (pos_ == digits)
            fail("expected integer");
        try {
            return std::stoll(std::string(s_.substr(start, pos_ - start)));
        } catch (const std::out_of_range&) {
            fail("integer out of range");
        }
    }

    Node value()
    {
        skip();
        if (pos_ >= s_.size())
            fail("unexpected end of input");
        Node n;
        if (s_[pos_] == '[') {
            n.is_list = true;
            ++pos_;
            skip();
            if (pos_ < s_.size() && s_[pos_] == ']') {
                ++pos_;
                return n;
            }
            for (;;) {
                n.items.push_back(value());
                skip();
                if (pos_ < s_.size() && s_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                if (pos_ < s_.size() && s_[pos_] == ']') {
                    ++pos_;
                    return n;
                }
                fail("expected ',' or ']'");
            }
        }
        n.scalar.num = integer();
        skip();
        if (pos_ < s_.size() && s_[pos_] == '/') {
            ++pos_;
            n.scalar.den = integer();
            if (n.scalar.den == 0)
                fail("zero denominator");
        }
        return n;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_;
};

std::vector<Rational> flat_scalars(const Node& list, std::size_t line)
{
    std::vector<Rational> out;
    for (const auto& item : list.items) {
        if (item.is_list)
            throw ParseError("expected a flat list of numbers", line);
        out.push_back(item.scalar);
    }
    return out;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

} // namespace

IsotropyData parse_isotropy(std::string_view text)
{
    std::optional<std::size_t> h;
    bool saw_weights = false;
    std::vector<std::vector<std::int64_t>> columns;
    std::vector<std::vector<Rational>> torsion;

    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto colon = line.find(':');
        if (colon == std::string_view::npos)
            throw ParseError("expected 'key: value'", line_no);
        const auto key = trim(line.substr(0, colon));
        const auto value = trim(line.substr(colon + 1));

        if (key == "h") {
            try {
                const long long v = std::stoll(std::string(value));
                if (v < 0)
                    throw ParseError("h must be nonnegative", line_no);
                h = static_cast<std::size_t>(v);
            } catch (const std::logic_error&) {
                throw ParseError("h must be an integer", line_no);
            }
        } else if (key == "weights") {
            saw_weights = true;
            const Node root = BracketParser(value, line_no).parse_all();
            if (!root.is_list)
                throw ParseError("weights must be a list of columns", line_no);
            for (const auto& col : root.items) {
                if (!col.is_list)
                    throw ParseError("each weight column must be a list", line_no);
                std::vector<std::int64_t> ints;
                for (const auto& r : flat_scalars(col, line_no)) {
                    if (r.den != 1)
                        throw ParseError("weights must be integers", line_no);
                    ints.push_back(r.num);
                }
                columns.push_back(std::move(ints));
            }
        } else if (key == "torsion") {
            const Node root = BracketParser(value, line_no).parse_all();
            if (!root.is_list)
                throw ParseError("torsion must be a list", line_no);
            const bool nested = !root.items.empty() && root.items.front().is_list;
            if (nested) {
                for (const auto& gen : root.items) {
                    if (!gen.is_list)
                        throw ParseError("mixed nesting in torsion list", line_no);
                    torsion.push_back(flat_scalars(gen, line_no));
                }
            } else if (!root.items.empty()) {
                torsion.push_back(flat_scalars(root, line_no));
            }
        } else {
            throw ParseError(fmt::format("unknown key '{}'", key), line_no);
        }
    }

    std::optional<std::size_t> dim;
    if (h)
        dim = *h + 1;
    auto agree = [&](std::size_t d) {
        if (dim && *dim != d)
            throw ParseError(fmt::format("inconsistent slice dimension {} vs {}", *dim, d), line_no);
        dim = d;
    };
    for (const auto& col : columns)
        agree(col.size());
    for (const auto& gen : torsion)
        agree(gen.size());
    if (!dim)
        throw ParseError(saw_weights ? "cannot infer h from empty weights; add 'h: <int>'"
                                     : "cannot infer h; add 'h: <int>'",
                         line_no);

    try {
        return IsotropyData(*dim, std::move(columns), std::move(torsion));
    } catch (const DimensionMismatch& e) {
        throw ParseError(e.what(), line_no);
    }
}

} // namespace fibcon::lattice
