#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "modfusion/errors.hpp"

namespace modfusion {

// Exact arithmetic on int64 with loud overflow failure. Everything in
// this library is desk-scale, so an overflow signals a bug or an input
// far outside the supported range, never a value to wrap.
inline std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw internal_invariant_error("integer overflow in exact addition");
    return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r))
        throw internal_invariant_error("integer overflow in exact subtraction");
    return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw internal_invariant_error("integer overflow in exact multiplication");
    return r;
}

inline std::int64_t checked_neg(std::int64_t a)
{
    return checked_sub(0, a);
}

// floor division; remainder lands in [0, |b|) for b > 0
inline std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

/// Dense row-major integer matrix. Row and column counts may be zero;
/// all products and eliminations are overflow-checked.
struct IntMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::int64_t> data;

    IntMatrix() = default;
    IntMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0)
    {
        if (r < 0 || c < 0)
            throw invalid_input_error("matrix dimensions must be non-negative");
    }

    static IntMatrix identity(int n)
    {
        IntMatrix m(n, n);
        for (int i = 0; i < n; ++i)
            m.at(i, i) = 1;
        return m;
    }

    std::int64_t& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    std::int64_t at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

    std::vector<std::int64_t> row(int i) const
    {
        return std::vector<std::int64_t>(data.begin() + static_cast<std::ptrdiff_t>(i) * cols,
                                         data.begin() + static_cast<std::ptrdiff_t>(i + 1) * cols);
    }

    bool operator==(const IntMatrix&) const = default;

    IntMatrix multiplied(const IntMatrix& rhs) const
    {
        if (cols != rhs.rows)
            throw invalid_input_error("matrix product dimension mismatch");
        IntMatrix out(rows, rhs.cols);
        for (int i = 0; i < rows; ++i)
            for (int k = 0; k < cols; ++k) {
                const std::int64_t aik = at(i, k);
                if (aik == 0)
                    continue;
                for (int j = 0; j < rhs.cols; ++j)
                    out.at(i, j) = checked_add(out.at(i, j), checked_mul(aik, rhs.at(k, j)));
            }
        return out;
    }

    IntMatrix transposed() const
    {
        IntMatrix out(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                out.at(j, i) = at(i, j);
        return out;
    }

    void swap_rows(int i, int j)
    {
        if (i == j)
            return;
        for (int k = 0; k < cols; ++k)
            std::swap(at(i, k), at(j, k));
    }

    void swap_cols(int i, int j)
    {
        if (i == j)
            return;
        for (int k = 0; k < rows; ++k)
            std::swap(at(k, i), at(k, j));
    }

    // row i += c * row j
    void add_row(int i, int j, std::int64_t c)
    {
        for (int k = 0; k < cols; ++k)
            at(i, k) = checked_add(at(i, k), checked_mul(c, at(j, k)));
    }

    // col i += c * col j
    void add_col(int i, int j, std::int64_t c)
    {
        for (int k = 0; k < rows; ++k)
            at(k, i) = checked_add(at(k, i), checked_mul(c, at(k, j)));
    }

    void negate_row(int i)
    {
        for (int k = 0; k < cols; ++k)
            at(i, k) = checked_neg(at(i, k));
    }

    void negate_col(int i)
    {
        for (int k = 0; k < rows; ++k)
            at(k, i) = checked_neg(at(k, i));
    }
};

/// u * m * v = d with u, v unimodular and d diagonal with the
/// divisibility chain d_i | d_{i+1} (zeros last). u_inv and v_inv are
/// the exact inverses, accumulated during the reduction.
struct SNFDecomposition {
    IntMatrix u, d, v;
    IntMatrix u_inv, v_inv;

    std::vector<std::int64_t> diagonal() const
    {
        std::vector<std::int64_t> out;
        const int n = d.rows < d.cols ? d.rows : d.cols;
        out.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            out.push_back(d.at(i, i));
        return out;
    }
};

/// Smith normal form with a fixed deterministic pivot rule: smallest
/// nonzero absolute value, ties broken by lowest row then lowest
/// column. Total on all integer matrices, including empty ones.
inline SNFDecomposition smith_normal_form(const IntMatrix& m)
{
    SNFDecomposition s;
    s.d = m;
    s.u = IntMatrix::identity(m.rows);
    s.u_inv = IntMatrix::identity(m.rows);
    s.v = IntMatrix::identity(m.cols);
    s.v_inv = IntMatrix::identity(m.cols);
    IntMatrix& a = s.d;

    auto row_add = [&](int i, int j, std::int64_t c) {
        a.add_row(i, j, c);
        s.u.add_row(i, j, c);
        s.u_inv.add_col(j, i, checked_neg(c));
    };
    auto col_add = [&](int i, int j, std::int64_t c) {
        a.add_col(i, j, c);
        s.v.add_col(i, j, c);
        s.v_inv.add_row(j, i, checked_neg(c));
    };
    auto row_swap = [&](int i, int j) {
        a.swap_rows(i, j);
        s.u.swap_rows(i, j);
        s.u_inv.swap_cols(i, j);
    };
    auto col_swap = [&](int i, int j) {
        a.swap_cols(i, j);
        s.v.swap_cols(i, j);
        s.v_inv.swap_rows(i, j);
    };
    auto row_negate = [&](int i) {
        a.negate_row(i);
        s.u.negate_row(i);
        s.u_inv.negate_col(i);
    };

    const int n = a.rows < a.cols ? a.rows : a.cols;
    for (int k = 0; k < n; ++k) {
        for (;;) {
            // pivot: smallest |entry| in the trailing submatrix
            int pi = -1, pj = -1;
            std::int64_t best = 0;
            for (int i = k; i < a.rows; ++i)
                for (int j = k; j < a.cols; ++j) {
                    const std::int64_t e = a.at(i, j);
                    if (e == 0)
                        continue;
                    const std::int64_t ab = e < 0 ? checked_neg(e) : e;
                    if (pi < 0 || ab < best) {
                        best = ab;
                        pi = i;
                        pj = j;
                    }
                }
            if (pi < 0)
                return s; // trailing submatrix is zero
            row_swap(k, pi);
            col_swap(k, pj);

            for (int i = k + 1; i < a.rows; ++i)
                if (a.at(i, k) != 0)
                    row_add(i, k, -(a.at(i, k) / a.at(k, k)));
            for (int j = k + 1; j < a.cols; ++j)
                if (a.at(k, j) != 0)
                    col_add(j, k, -(a.at(k, j) / a.at(k, k)));

            bool lone = true;
            for (int i = k + 1; i < a.rows && lone; ++i)
                lone = a.at(i, k) == 0;
            for (int j = k + 1; j < a.cols && lone; ++j)
                lone = a.at(k, j) == 0;
            if (!lone)
                continue;

            // pivot must divide the whole trailing block before we move on
            int bi = -1;
            for (int i = k + 1; i < a.rows && bi < 0; ++i)
                for (int j = k + 1; j < a.cols; ++j)
                    if (a.at(i, j) % a.at(k, k) != 0) {
                        bi = i;
                        break;
                    }
            if (bi < 0)
                break;
            row_add(k, bi, 1);
        }
        if (a.at(k, k) < 0)
            row_negate(k);
    }
    return s;
}

/// Row-style Hermite normal form: h = u * m with u unimodular, h in row
/// echelon form with positive pivots and the entries above each pivot
/// reduced into [0, pivot). The nonzero rows of h are the unique HNF
/// basis of the row lattice of m; rank is their count.
struct HermiteForm {
    IntMatrix h;
    IntMatrix u;
    int rank = 0;
};

inline HermiteForm hermite_normal_form(const IntMatrix& m)
{
    HermiteForm f;
    f.h = m;
    f.u = IntMatrix::identity(m.rows);
    IntMatrix& a = f.h;

    int r = 0;
    for (int j = 0; j < a.cols && r < a.rows; ++j) {
        for (;;) {
            int pi = -1;
            std::int64_t best = 0;
            for (int i = r; i < a.rows; ++i) {
                const std::int64_t e = a.at(i, j);
                if (e == 0)
                    continue;
                const std::int64_t ab = e < 0 ? checked_neg(e) : e;
                if (pi < 0 || ab < best) {
                    best = ab;
                    pi = i;
                }
            }
            if (pi < 0)
                break; // column clear, no pivot here
            a.swap_rows(r, pi);
            f.u.swap_rows(r, pi);
            bool clear = true;
            for (int i = r + 1; i < a.rows; ++i)
                if (a.at(i, j) != 0) {
                    const std::int64_t q = a.at(i, j) / a.at(r, j);
                    a.add_row(i, r, -q);
                    f.u.add_row(i, r, -q);
                    if (a.at(i, j) != 0)
                        clear = false;
                }
            if (!clear)
                continue;
            if (a.at(r, j) < 0) {
                a.negate_row(r);
                f.u.negate_row(r);
            }
            for (int i = 0; i < r; ++i) {
                const std::int64_t q = floor_div(a.at(i, j), a.at(r, j));
                if (q != 0) {
                    a.add_row(i, r, -q);
                    f.u.add_row(i, r, -q);
                }
            }
            ++r;
            break;
        }
    }
    f.rank = r;
    return f;
}

/// Basis (as rows) of { x : x * m = 0 }. May have zero rows.
inline IntMatrix kernel_basis(const IntMatrix& m)
{
    const HermiteForm f = hermite_normal_form(m);
    IntMatrix out(m.rows - f.rank, m.rows);
    for (int i = f.rank; i < m.rows; ++i)
        for (int j = 0; j < m.rows; ++j)
            out.at(i - f.rank, j) = f.u.at(i, j);
    return out;
}

/// One solution of x * m = t over the integers, or nullopt when none
/// exists. The solution returned is a deterministic function of (m, t).
inline std::optional<std::vector<std::int64_t>> solve_row_system(const SNFDecomposition& snf,
                                                                 const std::vector<std::int64_t>& t)
{
    const int rows = snf.u.rows;
    const int cols = snf.v.cols;
    if (static_cast<int>(t.size()) != cols)
        throw invalid_input_error("solve_row_system: target length mismatch");

    // x*m = t  <=>  (x*u_inv)*d = t*v
    std::vector<std::int64_t> s(static_cast<std::size_t>(cols), 0);
    for (int j = 0; j < cols; ++j) {
        std::int64_t acc = 0;
        for (int k = 0; k < cols; ++k)
            acc = checked_add(acc, checked_mul(t[static_cast<std::size_t>(k)], snf.v.at(k, j)));
        s[static_cast<std::size_t>(j)] = acc;
    }
    const int n = rows < cols ? rows : cols;
    std::vector<std::int64_t> w(static_cast<std::size_t>(rows), 0);
    for (int j = 0; j < cols; ++j) {
        const std::int64_t dj = j < n ? snf.d.at(j, j) : 0;
        if (dj == 0) {
            if (s[static_cast<std::size_t>(j)] != 0)
                return std::nullopt;
        } else {
            if (s[static_cast<std::size_t>(j)] % dj != 0)
                return std::nullopt;
            w[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j)] / dj;
        }
    }
    std::vector<std::int64_t> x(static_cast<std::size_t>(rows), 0);
    for (int j = 0; j < rows; ++j) {
        std::int64_t acc = 0;
        for (int k = 0; k < rows; ++k)
            acc = checked_add(acc, checked_mul(w[static_cast<std::size_t>(k)], snf.u.at(k, j)));
        x[static_cast<std::size_t>(j)] = acc;
    }
    return x;
}

inline std::optional<std::vector<std::int64_t>> solve_row_system(const IntMatrix& m,
                                                                 const std::vector<std::int64_t>& t)
{
    return solve_row_system(smith_normal_form(m), t);
}

/// Exact determinant by fraction-free (Bareiss) elimination.
inline std::int64_t determinant(const IntMatrix& m)
{
    if (m.rows != m.cols)
        throw invalid_input_error("determinant of a non-square matrix");
    const int n = m.rows;
    if (n == 0)
        return 1;
    IntMatrix a = m;
    std::int64_t sign = 1;
    std::int64_t prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (a.at(k, k) == 0) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (a.at(i, k) != 0) {
                    p = i;
                    break;
                }
            if (p < 0)
                return 0;
            a.swap_rows(k, p);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                const std::int64_t num =
                    checked_sub(checked_mul(a.at(i, j), a.at(k, k)), checked_mul(a.at(i, k), a.at(k, j)));
                a.at(i, j) = num / prev; // exact by Bareiss
            }
        prev = a.at(k, k);
    }
    return checked_mul(sign, a.at(n - 1, n - 1));
}

} // namespace modfusion
