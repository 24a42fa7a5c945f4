#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <vector>

namespace fibcon::lattice::detail {

class MpzMatrix {
public:
    MpzMatrix() = default;
    MpzMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static MpzMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    mpz_class& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const mpz_class& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    MpzMatrix operator*(const MpzMatrix& rhs) const;
    bool operator==(const MpzMatrix& rhs) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<mpz_class> data_;
};

/// U * A * V == D with U, V unimodular and D diagonal, d_0 | d_1 | ... | d_{rank-1}.
struct SmithDecomposition {
    MpzMatrix D;
    MpzMatrix U;
    MpzMatrix V;
    std::vector<mpz_class> divisors;

    std::size_t rank() const { return divisors.size(); }
};

SmithDecomposition smith_normal_form(const MpzMatrix& A);

/// Z-basis of {x in Z^n : A x = 0}, as columns of the right transform.
std::vector<std::vector<mpz_class>> integer_kernel(const SmithDecomposition& snf);

} // namespace fibcon::lattice::detail
