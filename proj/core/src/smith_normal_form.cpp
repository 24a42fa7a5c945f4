#include "smith_normal_form.hpp"

#include <utility>

namespace fibcon::lattice::detail {

MpzMatrix MpzMatrix::identity(std::size_t n)
{
    MpzMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1;
    return m;
}

MpzMatrix MpzMatrix::operator*(const MpzMatrix& rhs) const
{
    MpzMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            if ((*this)(i, k) == 0)
                continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j)
                out(i, j) += (*this)(i, k) * rhs(k, j);
        }
    return out;
}

bool MpzMatrix::operator==(const MpzMatrix& rhs) const
{
    return rows_ == rhs.rows_ && cols_ == rhs.cols_ && data_ == rhs.data_;
}

namespace {

// Row/column operations applied to D, mirrored in U (rows) and V (columns).
struct Reducer {
    MpzMatrix& D;
    MpzMatrix& U;
    MpzMatrix& V;

    void swap_rows(std::size_t a, std::size_t b)
    {
        if (a == b)
            return;
        for (std::size_t j = 0; j < D.cols(); ++j)
            std::swap(D(a, j), D(b, j));
        for (std::size_t j = 0; j < U.cols(); ++j)
            std::swap(U(a, j), U(b, j));
    }

    void swap_cols(std::size_t a, std::size_t b)
    {
        if (a == b)
            return;
        for (std::size_t i = 0; i < D.rows(); ++i)
            std::swap(D(i, a), D(i, b));
        for (std::size_t i = 0; i < V.rows(); ++i)
            std::swap(V(i, a), V(i, b));
    }

    // row[target] -= q * row[source]
    void add_row(std::size_t target, std::size_t source, const mpz_class& q)
    {
        for (std::size_t j = 0; j < D.cols(); ++j)
            D(target, j) -= q * D(source, j);
        for (std::size_t j = 0; j < U.cols(); ++j)
            U(target, j) -= q * U(source, j);
    }

    // col[target] -= q * col[source]
    void add_col(std::size_t target, std::size_t source, const mpz_class& q)
    {
        for (std::size_t i = 0; i < D.rows(); ++i)
            D(i, target) -= q * D(i, source);
        for (std::size_t i = 0; i < V.rows(); ++i)
            V(i, target) -= q * V(i, source);
    }

    void negate_row(std::size_t r)
    {
        for (std::size_t j = 0; j < D.cols(); ++j)
            D(r, j) = -D(r, j);
        for (std::size_t j = 0; j < U.cols(); ++j)
            U(r, j) = -U(r, j);
    }

    // Moves the smallest nonzero |entry| of the trailing block to (t, t).
    bool place_pivot(std::size_t t)
    {
        bool found = false;
        std::size_t bi = t, bj = t;
        mpz_class best;
        for (std::size_t i = t; i < D.rows(); ++i)
            for (std::size_t j = t; j < D.cols(); ++j) {
                if (D(i, j) == 0)
                    continue;
                mpz_class a = abs(D(i, j));
                if (!found || a < best) {
                    best = a;
                    bi = i;
                    bj = j;
                    found = true;
                }
            }
        if (!found)
            return false;
        swap_rows(t, bi);
        swap_cols(t, bj);
        return true;
    }

    // Clears row and column t, keeping the pivot the smallest entry seen.
    void clear_cross(std::size_t t)
    {
        for (;;) {
            bool dirty = false;
            for (std::size_t i = t + 1; i < D.rows(); ++i) {
                if (D(i, t) == 0)
                    continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), D(i, t).get_mpz_t(), D(t, t).get_mpz_t());
                add_row(i, t, q);
                if (D(i, t) != 0) {
                    swap_rows(t, i);
                    dirty = true;
                }
            }
            for (std::size_t j = t + 1; j < D.cols(); ++j) {
                if (D(t, j) == 0)
                    continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), D(t, j).get_mpz_t(), D(t, t).get_mpz_t());
                add_col(j, t, q);
                if (D(t, j) != 0) {
                    swap_cols(t, j);
                    dirty = true;
                }
            }
            if (!dirty)
                return;
        }
    }

    // Returns a row whose trailing entries are not all divisible by the pivot.
    bool find_indivisible(std::size_t t, std::size_t& row) const
    {
        for (std::size_t i = t + 1; i < D.rows(); ++i)
            for (std::size_t j = t + 1; j < D.cols(); ++j)
                if (!mpz_divisible_p(D(i, j).get_mpz_t(), D(t, t).get_mpz_t())) {
                    row = i;
                    return true;
                }
        return false;
    }
};

} // namespace

SmithDecomposition smith_normal_form(const MpzMatrix& A)
{
    SmithDecomposition out{A, MpzMatrix::identity(A.rows()), MpzMatrix::identity(A.cols()), {}};
    Reducer r{out.D, out.U, out.V};

    const std::size_t steps = std::min(A.rows(), A.cols());
    for (std::size_t t = 0; t < steps; ++t) {
        if (!r.place_pivot(t))
            break;
        for (;;) {
            r.clear_cross(t);
            std::size_t row = 0;
            if (!r.find_indivisible(t, row))
                break;
            r.add_row(t, row, -1);
        }
        if (out.D(t, t) < 0)
            r.negate_row(t);
        out.divisors.push_back(out.D(t, t));
    }
    return out;
}

std::vector<std::vector<mpz_class>> integer_kernel(const SmithDecomposition& snf)
{
    std::vector<std::vector<mpz_class>> basis;
    const std::size_t n = snf.V.cols();
    for (std::size_t j = snf.rank(); j < n; ++j) {
        std::vector<mpz_class> col(n);
        for (std::size_t i = 0; i < n; ++i)
            col[i] = snf.V(i, j);
        basis.push_back(std::move(col));
    }
    return basis;
}

} // namespace fibcon::lattice::detail
