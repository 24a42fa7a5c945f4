#pragma once

// Block signatures of non-degenerate singular points.
//
// Coordinates on R^{2n} are interleaved (x1, y1, ..., xn, yn) with
// z_j = x_j + i y_j, and J is block diagonal with blocks [[0,-1],[1,0]].
// A quadratic form is stored as its Hessian A, so q(v) = v^T A v / 2, and the
// associated Hamiltonian endomorphism is J A.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fibcon::singularity {

class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public SingularityError {
public:
    using SingularityError::SingularityError;
};

class InvalidForm : public SingularityError {
public:
    using SingularityError::SingularityError;
};

class TooManyBlocks : public SingularityError {
public:
    using SingularityError::SingularityError;
};

class DegenerateInput : public SingularityError {
public:
    using SingularityError::SingularityError;
};

class PreconditionViolation : public SingularityError {
public:
    using SingularityError::SingularityError;
};

class NonFiniteValue : public SingularityError {
public:
    using SingularityError::SingularityError;
};

class QuadraticForm {
public:
    /// Throws InvalidForm unless `hessian` is square, of even size, finite and
    /// symmetric to 1e-12 (relative to its largest entry).
    explicit QuadraticForm(Eigen::MatrixXd hessian);

    const Eigen::MatrixXd& matrix() const { return a_; }
    std::size_t dimension() const { return static_cast<std::size_t>(a_.rows()); }
    /// Number of complex coordinates.
    std::size_t n() const { return dimension() / 2; }

    double operator()(std::span<const double> v) const;

    static QuadraticForm zero(std::size_t n);
    /// 1/2 |z_k|^2 on C^n.
    static QuadraticForm elliptic(std::size_t n, std::size_t k);
    /// Im(z_k^2) = 2 x_k y_k on C^n.
    static QuadraticForm hyperbolic(std::size_t n, std::size_t k);
    /// 1/2 (|z_k|^2 - |z_l|^2) and Im(z_k z_l) on C^n.
    static QuadraticForm focus_focus_phi(std::size_t n, std::size_t k, std::size_t l);
    static QuadraticForm focus_focus_g(std::size_t n, std::size_t k, std::size_t l);

private:
    Eigen::MatrixXd a_;
};

Eigen::MatrixXd symplectic_matrix(std::size_t n);

Eigen::MatrixXd hamiltonian_operator(const QuadraticForm& q);

struct BlockSignature {
    int ke = 0;
    int kh = 0;
    int kf = 0;

    int n() const { return ke + kh + 2 * kf; }
    /// `ke,kh,kf`
    std::string to_string() const;

    friend bool operator==(const BlockSignature&, const BlockSignature&) = default;
};

BlockSignature parse_block_signature(std::string_view text);

/// Either a block signature or Degenerate, with a human-readable reason.
struct Classification {
    std::optional<BlockSignature> signature;
    std::string reason;

    bool degenerate() const { return !signature.has_value(); }
    static Classification make_degenerate(std::string why) { return {std::nullopt, std::move(why)}; }

    friend bool operator==(const Classification& a, const Classification& b)
    {
        return a.signature == b.signature;
    }
};

std::string to_string(const Classification& c);

/// Forms spanning the image of the stabilizer algebra, for example the Taylor
/// polynomial of g together with the components of the H moment map.
class HamiltonianSpan {
public:
    /// Throws DimensionMismatch for unequal sizes and InvalidForm for an empty
    /// or linearly dependent list (rank tolerance 1e-9).
    explicit HamiltonianSpan(std::vector<QuadraticForm> forms);

    const std::vector<QuadraticForm>& forms() const { return forms_; }
    std::size_t dimension() const { return forms_.front().dimension(); }

private:
    std::vector<QuadraticForm> forms_;
};

struct ClassifyOptions {
    int trials = 7;
    double tol = 1e-8;
    std::uint64_t seed = 0;
};

/// Eigenvalue type of J A for one element A; Degenerate on zero or repeated
/// eigenvalues.
Classification classify_form(const QuadraticForm& q, double tol = 1e-8);

Classification classify_block_signature(const HamiltonianSpan& span, const ClassifyOptions& opts = {});

enum class LocalCase { N1, N2split, N2ff, Nbig };

std::string_view to_string(LocalCase c);

/// Coefficients of a generic element of the stabilizer span in the normal
/// form of a tall local model.  For N1 and N2split the element is
///   a_x Re(z0^2) + a_y Im(z0^2) + a_rho |z0|^2 + sum_{k>=1} c_k |z_k|^2,
/// for N2ff it is
///   a_x Re(z0 z1) + a_y Im(z0 z1) + a_rho (|z0|^2 + |z1|^2)
///     + c_1 (|z0|^2 - |z1|^2)/2 + sum_{k>=2} c_k |z_k|^2,
/// and for Nbig it is sum_{k>=0} c_k |z_k|^2.
struct LocalQuadraticData {
    LocalCase kind = LocalCase::N1;
    double ax = 0.0;
    double ay = 0.0;
    double arho = 0.0;
    std::vector<double> c;

    /// Number of complex coordinates h+1.
    std::size_t n() const;
    /// a_x^2 + a_y^2 - a_rho^2 (N1, N2split) or a_x^2 + a_y^2 - 4 a_rho^2 (N2ff); 0 for Nbig.
    double discriminant() const;
    /// Nonnegative normalizer for discriminant comparisons.
    double discriminant_scale() const;

    QuadraticForm generic_form() const;
};

Classification case_classify(const LocalQuadraticData& d);

/// Throws PreconditionViolation when |discriminant| <= tol * scale.
bool consistency_check(const LocalQuadraticData& d, const ClassifyOptions& opts = {});

enum class ZeroSetType { Point, Cross, Line };

std::string_view to_string(ZeroSetType t);

ZeroSetType reduced_zero_set_type(const LocalQuadraticData& d);

enum class ExtremumSign { Min, Max };

struct ReducedPointType {
    enum class Kind { RegularPoint, EllipticExtremum, HyperbolicSaddle, Degenerate };

    Kind kind = Kind::RegularPoint;
    ExtremumSign sign = ExtremumSign::Min;
    std::optional<int> morse_index;

    static ReducedPointType regular() { return {}; }
    static ReducedPointType extremum(ExtremumSign s) { return {Kind::EllipticExtremum, s, s == ExtremumSign::Min ? 0 : 2}; }
    static ReducedPointType saddle() { return {Kind::HyperbolicSaddle, ExtremumSign::Min, 1}; }
    static ReducedPointType degenerate() { return {Kind::Degenerate, ExtremumSign::Min, std::nullopt}; }

    friend bool operator==(const ReducedPointType&, const ReducedPointType&) = default;
};

std::string to_string(const ReducedPointType& t);

ReducedPointType morse_datum(const BlockSignature& sig, bool stabilizer_connected, ExtremumSign extremum_sign);

using ScalarField = std::function<double(std::span<const double>)>;

/// Central second differences, symmetrized.
QuadraticForm quadratic_from_function(const ScalarField& f, std::span<const double> point, double step = 1e-4);

/// Local model of g-bar in a chart around a point of the given type:
/// x^2 + y^2 at a minimum, -(x^2 + y^2) at a maximum, x^2 - y^2 at a saddle
/// and y at a regular point.
double canonical_chart_value(const ReducedPointType& kind, double x, double y);

/// The chart S(r, theta) = (sqrt(C) r^(1/N), theta) from the P-plane of a tall
/// elliptic model to the plane where g-bar is x^2 + y^2.
class EllipticChart {
public:
    EllipticChart(std::int64_t degree, double radial_constant);

    std::int64_t degree() const { return n_; }
    double radial_constant() const { return c_; }

    Eigen::Vector2d forward(double r, double theta) const;
    /// Returns (r, theta) with theta in (-pi, pi].
    Eigen::Vector2d inverse(double x, double y) const;
    /// x^2 + y^2 at the chart image of w = r e^{i theta}.
    double value(double r, double theta) const;

private:
    std::int64_t n_;
    double c_;
};

/// Dense row-major text, one row per line.
void write_quadratic_form(std::ostream& out, const QuadraticForm& q);
/// Blocks separated by blank lines; `#` starts a comment.
std::vector<QuadraticForm> parse_quadratic_forms(std::string_view text);

} // namespace fibcon::singularity
