#pragma once

// Defining polynomials of complexity-one local models
//   Y = T x_H h° x C^{h+1},
// where H acts on C^{h+1} through an injective homomorphism into (S^1)^{h+1}.
// All lattice computations are exact; only sampling and evaluation use doubles.

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fibcon::lattice {

class LatticeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// ker(weight_matrix^T) does not have rank one: not a complexity-one model.
class KernelRankError : public LatticeError {
public:
    KernelRankError(std::size_t rank);
    std::size_t kernel_rank;
};

/// The weight matrix does not describe an injective map of the connected part.
class InjectivityError : public LatticeError {
public:
    using LatticeError::LatticeError;
};

class NotTallError : public LatticeError {
public:
    NotTallError();
};

class NotInvariantError : public LatticeError {
public:
    using LatticeError::LatticeError;
};

class DimensionMismatch : public LatticeError {
public:
    using LatticeError::LatticeError;
};

class ParseError : public LatticeError {
public:
    ParseError(std::string message, std::size_t line);
    std::size_t line;
};

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
};

/// Slice representation data of a stabilizer H.
///
/// `weight_columns[j]` is the image of the j-th lattice basis vector of the
/// identity component of H, a vector of length h+1.  Each torsion generator q
/// stands for exp(2 pi i q) in (S^1)^{h+1}.  Torsion entries are reduced into
/// [0, 1) and generators equal to the identity are dropped.
class IsotropyData {
public:
    IsotropyData(std::size_t slice_dimension,
                 std::vector<std::vector<std::int64_t>> weight_columns,
                 std::vector<std::vector<Rational>> torsion_generators);

    /// h + 1, the complex dimension of the symplectic slice.
    std::size_t slice_dimension() const { return dim_; }
    const std::vector<std::vector<std::int64_t>>& weight_columns() const { return columns_; }
    const std::vector<std::vector<Rational>>& torsion_generators() const { return torsion_; }

private:
    std::size_t dim_;
    std::vector<std::vector<std::int64_t>> columns_;
    std::vector<std::vector<Rational>> torsion_;
};

/// Parses the plain-text block
///
///     h: 1                       (optional when weights or torsion fix it)
///     weights: [[1,-1]]          (list of columns)
///     torsion: [[1/2, 0], ...]   (a flat list is read as one generator)
///
/// `#` starts a comment.
IsotropyData parse_isotropy(std::string_view text);

struct DefiningPolynomial {
    std::vector<std::int64_t> xi;
    std::int64_t degree = 0;
    bool tall = false;

    std::size_t size() const { return xi.size(); }

    /// `xi=[1,1], N=2, tall=true`
    std::string to_string() const;

    friend bool operator==(const DefiningPolynomial&, const DefiningPolynomial&) = default;
};

/// prod z_i^holo_i * conj(z_i)^antiholo_i
struct InvariantMonomial {
    std::vector<std::int64_t> holo;
    std::vector<std::int64_t> antiholo;

    friend bool operator==(const InvariantMonomial&, const InvariantMonomial&) = default;
};

/// P^p_power * conj(P)^conj_p_power * prod |z_i|^(2 abs_sq_powers_i).
struct InvariantWord {
    std::int64_t p_power = 0;
    std::int64_t conj_p_power = 0;
    std::vector<std::int64_t> abs_sq_powers;

    /// Multiplies the word back out into a single monomial.
    InvariantMonomial expand(const DefiningPolynomial& dp) const;

    friend bool operator==(const InvariantWord&, const InvariantWord&) = default;
};

DefiningPolynomial compute_defining_polynomial(const IsotropyData& data);

bool is_tall(const DefiningPolynomial& dp);

/// Whether b lies in the image of the Lie algebra of H, i.e. b . xi = 0, up to
/// a tolerance relative to |b| |xi|.
bool in_image_rho_star(const DefiningPolynomial& dp, std::span<const double> b, double tol = 1e-9);

InvariantWord decompose_invariant(const InvariantMonomial& m, const DefiningPolynomial& dp);

/// c = N (prod xi_j^xi_j)^(-1/N), with 0^0 = 1, so that |z|^2 = c |P(z)|^(2/N)
/// on the zero level of the H moment map.
double radial_constant(const DefiningPolynomial& dp);

/// Points with |z_j|^2 = c xi_j, c uniform on (0, 1], independent uniform phases.
std::vector<std::vector<std::complex<double>>>
moment_zero_sample(const DefiningPolynomial& dp, std::size_t count, std::uint64_t seed);

std::complex<double> eval_defining_polynomial(const DefiningPolynomial& dp,
                                              std::span<const std::complex<double>> z);

std::complex<double> eval_monomial(const InvariantMonomial& m, std::span<const std::complex<double>> z);

std::complex<double> eval_word(const InvariantWord& w, const DefiningPolynomial& dp,
                               std::span<const std::complex<double>> z);

} // namespace fibcon::lattice
