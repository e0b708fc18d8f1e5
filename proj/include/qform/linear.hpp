#pragma once
// Exact dense linear algebra over Z, F_p and Z/m.

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qform {

using Int = mpz_class;
using Rat = mpq_class;

// Malformed or out-of-contract input (CLI exit 3).
struct InvalidInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// A search exhausted its explicit budget (CLI exit 2).
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RingKind { Z, Fp, Zmod };

struct Ring {
    RingKind kind = RingKind::Z;
    Int mod = 0;  // p or m; 0 for Z

    static Ring Z() { return {}; }
    static Ring Fp(const Int& p);
    static Ring Zmod(const Int& m);

    bool is_Z() const { return kind == RingKind::Z; }
    bool is_field() const { return kind == RingKind::Fp; }
    Int reduce(const Int& x) const;
    bool is_unit(const Int& x) const;
    Int inverse(const Int& x) const;  // throws if not a unit
    // Some y with d*y == c in the ring, if one exists.
    std::optional<Int> divide(const Int& c, const Int& d) const;
    std::string name() const;
    bool operator==(const Ring& o) const { return kind == o.kind && mod == o.mod; }
    bool operator!=(const Ring& o) const { return !(*this == o); }
};

class Matrix {
public:
    Matrix() = default;
    Matrix(Ring r, std::size_t rows, std::size_t cols);
    Matrix(Ring r, std::size_t rows, std::size_t cols, const std::vector<long>& rowmajor);
    static Matrix identity(Ring r, std::size_t n);
    static Matrix zero(Ring r, std::size_t rows, std::size_t cols) { return Matrix(r, rows, cols); }
    static Matrix column(Ring r, const std::vector<Int>& v);
    static Matrix scalar(Ring r, const Int& x);

    const Ring& ring() const { return ring_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    const Int& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    void set(std::size_t i, std::size_t j, const Int& x) { a_[i * cols_ + j] = ring_.reduce(x); }

    Matrix operator+(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;
    Matrix operator-() const;
    Matrix operator*(const Matrix& o) const;
    Matrix operator*(const Int& s) const;
    bool operator==(const Matrix& o) const;
    bool operator!=(const Matrix& o) const { return !(*this == o); }

    Matrix T() const;
    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    Matrix col(std::size_t j) const { return block(0, j, rows_, 1); }
    Matrix cols_range(std::size_t c0, std::size_t nc) const { return block(0, c0, rows_, nc); }
    Matrix rows_range(std::size_t r0, std::size_t nr) const { return block(r0, 0, nr, cols_); }
    Matrix select(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const;
    void paste(std::size_t r0, std::size_t c0, const Matrix& b);
    bool is_zero() const;
    std::vector<Int> column_vector(std::size_t j) const;
    Matrix lift() const;          // same entries viewed over Z
    Matrix over(Ring r) const;    // reduce entries into r
    std::string str() const;

private:
    Ring ring_;
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Int> a_;
};

Matrix hcat(const std::vector<Matrix>& ms);
Matrix vcat(const std::vector<Matrix>& ms);
Matrix block_diag(const std::vector<Matrix>& ms);
// 2x2 block matrix [[a,b],[c,d]].
Matrix blocks(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d);

// A = U * D * W with U, W invertible; Ui = U^-1, Wi = W^-1.
struct SNF {
    Matrix U, D, W, Ui, Wi;
    std::size_t rank = 0;  // number of nonzero diagonal entries (in the ring)
    std::vector<Int> diagonal() const;
};

// Smallest-pivot Smith form over Z; finite-ring inputs are lifted, reduced, and
// (over fields) normalised to a 0/1 diagonal.
SNF smith(const Matrix& A);

Int det(const Matrix& A);
bool is_unit_det(const Matrix& A);
std::size_t rank(const Matrix& A);
Matrix kernel(const Matrix& A);                          // columns: basis of ker A
std::optional<Matrix> solve(const Matrix& A, const Matrix& B);  // some X with A X = B
Matrix inverse(const Matrix& A);                         // throws unless det is a unit
bool is_primitive(const Matrix& B);                      // columns span a direct summand
// Unimodular matrix whose leading columns are B (B primitive).
Matrix complete_basis(const Matrix& B);

// Exact inverse over Q (A square, nonsingular).
std::vector<std::vector<Rat>> rational_inverse(const Matrix& A);
// LLL-reduced basis (delta = 3/4) of the lattice spanned by the independent integer columns of B.
Matrix lll_reduce(const Matrix& B);

}  // namespace qform
