#include "qform/linear.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace qform {

// ---------------------------------------------------------------- rings

Ring Ring::Fp(const Int& p) {
    if (p < 2 || mpz_probab_prime_p(p.get_mpz_t(), 30) == 0)
        throw InvalidInput("Fp: modulus " + p.get_str() + " is not prime");
    return {RingKind::Fp, p};
}

Ring Ring::Zmod(const Int& m) {
    if (m < 2) throw InvalidInput("Zmod: modulus must be >= 2");
    if (mpz_probab_prime_p(m.get_mpz_t(), 30) != 0) return {RingKind::Fp, m};
    return {RingKind::Zmod, m};
}

Int Ring::reduce(const Int& x) const {
    if (is_Z()) return x;
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
    return r;
}

bool Ring::is_unit(const Int& x) const {
    if (is_Z()) return x == 1 || x == -1;
    Int g;
    mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
    return g == 1;
}

Int Ring::inverse(const Int& x) const {
    if (!is_unit(x)) throw InvalidInput("element " + x.get_str() + " is not a unit in " + name());
    if (is_Z()) return x;
    Int r;
    mpz_invert(r.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
    return r;
}

std::optional<Int> Ring::divide(const Int& c, const Int& d) const {
    if (is_Z()) {
        if (d == 0) return c == 0 ? std::optional<Int>(Int(0)) : std::nullopt;
        if (c % d != 0) return std::nullopt;
        return Int(c / d);
    }
    Int cc = reduce(c), dd = reduce(d), g;
    mpz_gcd(g.get_mpz_t(), dd.get_mpz_t(), mod.get_mpz_t());
    if (cc % g != 0) return std::nullopt;
    Int m2 = mod / g, d2 = dd / g, inv;
    if (m2 == 1) return Int(0);
    mpz_invert(inv.get_mpz_t(), d2.get_mpz_t(), m2.get_mpz_t());
    Int y = (cc / g) * inv;
    mpz_fdiv_r(y.get_mpz_t(), y.get_mpz_t(), m2.get_mpz_t());
    return y;
}

std::string Ring::name() const {
    switch (kind) {
        case RingKind::Z: return "Z";
        case RingKind::Fp: return "F" + mod.get_str();
        default: return "Z/" + mod.get_str();
    }
}

// ---------------------------------------------------------------- matrices

Matrix::Matrix(Ring r, std::size_t rows, std::size_t cols)
    : ring_(std::move(r)), rows_(rows), cols_(cols), a_(rows * cols, Int(0)) {}

Matrix::Matrix(Ring r, std::size_t rows, std::size_t cols, const std::vector<long>& v)
    : Matrix(std::move(r), rows, cols) {
    if (v.size() != rows * cols) throw InvalidInput("matrix literal has wrong length");
    for (std::size_t k = 0; k < v.size(); ++k) a_[k] = ring_.reduce(Int(v[k]));
}

Matrix Matrix::identity(Ring r, std::size_t n) {
    Matrix m(std::move(r), n, n);
    for (std::size_t i = 0; i < n; ++i) m.a_[i * n + i] = m.ring_.reduce(Int(1));
    return m;
}

Matrix Matrix::column(Ring r, const std::vector<Int>& v) {
    Matrix m(std::move(r), v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m.set(i, 0, v[i]);
    return m;
}

Matrix Matrix::scalar(Ring r, const Int& x) {
    Matrix m(std::move(r), 1, 1);
    m.set(0, 0, x);
    return m;
}

static void need_same(const Matrix& a, const Matrix& b, const char* op) {
    if (a.ring() != b.ring()) throw InvalidInput(std::string(op) + ": ring mismatch");
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInput(std::string(op) + ": shape mismatch");
}

Matrix Matrix::operator+(const Matrix& o) const {
    need_same(*this, o, "add");
    Matrix r(ring_, rows_, cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = ring_.reduce(a_[k] + o.a_[k]);
    return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
    need_same(*this, o, "sub");
    Matrix r(ring_, rows_, cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = ring_.reduce(a_[k] - o.a_[k]);
    return r;
}

Matrix Matrix::operator-() const {
    Matrix r(ring_, rows_, cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = ring_.reduce(-a_[k]);
    return r;
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (ring_ != o.ring_) throw InvalidInput("mul: ring mismatch");
    if (cols_ != o.rows_) throw InvalidInput("mul: shape mismatch");
    Matrix r(ring_, rows_, o.cols_);
    Int acc;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < o.cols_; ++j) {
            acc = 0;
            for (std::size_t k = 0; k < cols_; ++k) {
                const Int& x = a_[i * cols_ + k];
                if (x != 0) acc += x * o.a_[k * o.cols_ + j];
            }
            r.a_[i * o.cols_ + j] = ring_.reduce(acc);
        }
    return r;
}

Matrix Matrix::operator*(const Int& s) const {
    Matrix r(ring_, rows_, cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = ring_.reduce(a_[k] * s);
    return r;
}

bool Matrix::operator==(const Matrix& o) const {
    return ring_ == o.ring_ && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

Matrix Matrix::T() const {
    Matrix r(ring_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r.a_[j * rows_ + i] = a_[i * cols_ + j];
    return r;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw InvalidInput("block out of range");
    Matrix r(ring_, nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) r.a_[i * nc + j] = a_[(r0 + i) * cols_ + c0 + j];
    return r;
}

Matrix Matrix::select(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const {
    Matrix r(ring_, rs.size(), cs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
        for (std::size_t j = 0; j < cs.size(); ++j) r.a_[i * cs.size() + j] = (*this)(rs[i], cs[j]);
    return r;
}

void Matrix::paste(std::size_t r0, std::size_t c0, const Matrix& b) {
    if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) throw InvalidInput("paste out of range");
    for (std::size_t i = 0; i < b.rows_; ++i)
        for (std::size_t j = 0; j < b.cols_; ++j) a_[(r0 + i) * cols_ + c0 + j] = ring_.reduce(b(i, j));
}

bool Matrix::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const Int& x) { return x == 0; });
}

std::vector<Int> Matrix::column_vector(std::size_t j) const {
    std::vector<Int> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

Matrix Matrix::lift() const {
    Matrix r(Ring::Z(), rows_, cols_);
    r.a_ = a_;
    return r;
}

Matrix Matrix::over(Ring rg) const {
    Matrix r(std::move(rg), rows_, cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = r.ring_.reduce(a_[k]);
    return r;
}

std::string Matrix::str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < rows_; ++i) {
        os << (i ? ",[" : "[");
        for (std::size_t j = 0; j < cols_; ++j) os << (j ? "," : "") << (*this)(i, j).get_str();
        os << "]";
    }
    os << "]";
    return os.str();
}

Matrix hcat(const std::vector<Matrix>& ms) {
    if (ms.empty()) throw InvalidInput("hcat of nothing");
    std::size_t c = 0;
    for (auto& m : ms) {
        if (m.rows() != ms[0].rows()) throw InvalidInput("hcat: row mismatch");
        c += m.cols();
    }
    Matrix r(ms[0].ring(), ms[0].rows(), c);
    c = 0;
    for (auto& m : ms) { r.paste(0, c, m); c += m.cols(); }
    return r;
}

Matrix vcat(const std::vector<Matrix>& ms) {
    if (ms.empty()) throw InvalidInput("vcat of nothing");
    std::size_t n = 0;
    for (auto& m : ms) {
        if (m.cols() != ms[0].cols()) throw InvalidInput("vcat: column mismatch");
        n += m.rows();
    }
    Matrix r(ms[0].ring(), n, ms[0].cols());
    n = 0;
    for (auto& m : ms) { r.paste(n, 0, m); n += m.rows(); }
    return r;
}

Matrix block_diag(const std::vector<Matrix>& ms) {
    if (ms.empty()) throw InvalidInput("block_diag of nothing");
    std::size_t r = 0, c = 0;
    for (auto& m : ms) { r += m.rows(); c += m.cols(); }
    Matrix out(ms[0].ring(), r, c);
    r = c = 0;
    for (auto& m : ms) { out.paste(r, c, m); r += m.rows(); c += m.cols(); }
    return out;
}

Matrix blocks(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
    return vcat({hcat({a, b}), hcat({c, d})});
}

// ---------------------------------------------------------------- Smith form

namespace {

// Working state of the integer Smith reduction, row-major vectors of Int.
struct Work {
    std::size_t m, n;
    std::vector<std::vector<Int>> D, U, Ui, W, Wi;

    explicit Work(const Matrix& A) : m(A.rows()), n(A.cols()) {
        D.assign(m, std::vector<Int>(n));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) D[i][j] = A(i, j);
        U = Ui = eye(m);
        W = Wi = eye(n);
    }
    static std::vector<std::vector<Int>> eye(std::size_t k) {
        std::vector<std::vector<Int>> e(k, std::vector<Int>(k));
        for (std::size_t i = 0; i < k; ++i) e[i][i] = 1;
        return e;
    }
    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        std::swap(D[a], D[b]);
        std::swap(Ui[a], Ui[b]);
        for (auto& row : U) std::swap(row[a], row[b]);
    }
    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (auto& row : D) std::swap(row[a], row[b]);
        for (auto& row : Wi) std::swap(row[a], row[b]);
        std::swap(W[a], W[b]);
    }
    // row_i -= q * row_t
    void row_sub(std::size_t i, std::size_t t, const Int& q) {
        for (std::size_t j = 0; j < n; ++j) D[i][j] -= q * D[t][j];
        for (std::size_t j = 0; j < m; ++j) Ui[i][j] -= q * Ui[t][j];
        for (std::size_t r = 0; r < m; ++r) U[r][t] += q * U[r][i];
    }
    // col_j -= q * col_t
    void col_sub(std::size_t j, std::size_t t, const Int& q) {
        for (std::size_t r = 0; r < m; ++r) D[r][j] -= q * D[r][t];
        for (std::size_t r = 0; r < n; ++r) Wi[r][j] -= q * Wi[r][t];
        for (std::size_t c = 0; c < n; ++c) W[t][c] += q * W[j][c];
    }
    void negate_row(std::size_t t) {
        for (auto& x : D[t]) x = -x;
        for (auto& x : Ui[t]) x = -x;
        for (std::size_t r = 0; r < m; ++r) U[r][t] = -U[r][t];
    }

    void run() {
        std::size_t t = 0;
        while (t < std::min(m, n)) {
            // smallest nonzero pivot in the trailing block
            std::size_t bi = m, bj = n;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j)
                    if (D[i][j] != 0 && (bi == m || abs(D[i][j]) < abs(D[bi][bj]))) { bi = i; bj = j; }
            if (bi == m) break;
            swap_rows(t, bi);
            swap_cols(t, bj);
            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (D[i][t] == 0) continue;
                Int q = D[i][t] / D[t][t];
                if (q != 0) row_sub(i, t, q);
                if (D[i][t] != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (D[t][j] == 0) continue;
                Int q = D[t][j] / D[t][t];
                if (q != 0) col_sub(j, t, q);
                if (D[t][j] != 0) clean = false;
            }
            if (!clean) continue;
            // enforce d_t | every trailing entry
            bool fixed = false;
            for (std::size_t i = t + 1; i < m && !fixed; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (D[i][j] % D[t][t] != 0) {
                        row_sub(t, i, Int(-1));  // row_t += row_i
                        fixed = true;
                        break;
                    }
            if (fixed) continue;
            if (D[t][t] < 0) negate_row(t);
            ++t;
        }
    }

    Matrix mat(const std::vector<std::vector<Int>>& v, std::size_t r, std::size_t c) const {
        Matrix out(Ring::Z(), r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) out.set(i, j, v[i][j]);
        return out;
    }
};

}  // namespace

std::vector<Int> SNF::diagonal() const {
    std::vector<Int> d;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) d.push_back(D(i, i));
    return d;
}

SNF smith(const Matrix& A) {
    Work w(A.lift());
    w.run();
    SNF s{w.mat(w.U, w.m, w.m), w.mat(w.D, w.m, w.n), w.mat(w.W, w.n, w.n),
          w.mat(w.Ui, w.m, w.m), w.mat(w.Wi, w.n, w.n), 0};
    const Ring& R = A.ring();
    if (!R.is_Z()) {
        s.U = s.U.over(R); s.D = s.D.over(R); s.W = s.W.over(R);
        s.Ui = s.Ui.over(R); s.Wi = s.Wi.over(R);
        if (R.is_field()) {
            for (std::size_t i = 0; i < std::min(w.m, w.n); ++i) {
                Int d = s.D(i, i);
                if (d == 0 || d == 1) continue;
                Int di = R.inverse(d);
                s.D.set(i, i, 1);
                for (std::size_t r = 0; r < w.m; ++r) s.U.set(r, i, s.U(r, i) * d);
                for (std::size_t c = 0; c < w.m; ++c) s.Ui.set(i, c, s.Ui(i, c) * di);
            }
        }
    }
    for (std::size_t i = 0; i < std::min(w.m, w.n); ++i)
        if (s.D(i, i) != 0) ++s.rank;
    return s;
}

// ---------------------------------------------------------------- derived ops

Int det(const Matrix& A) {
    if (!A.square()) throw InvalidInput("det: non-square matrix");
    std::size_t n = A.rows();
    if (n == 0) return A.ring().reduce(Int(1));
    // Bareiss fraction-free elimination over Z
    std::vector<std::vector<Int>> a(n, std::vector<Int>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = A(i, j);
    Int prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t p = k + 1;
            while (p < n && a[p][k] == 0) ++p;
            if (p == n) return Int(0);
            std::swap(a[p], a[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Int v = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                a[i][j] = v;
            }
        prev = a[k][k];
    }
    return A.ring().reduce(a[n - 1][n - 1] * sign);
}

bool is_unit_det(const Matrix& A) { return A.ring().is_unit(det(A)); }

std::size_t rank(const Matrix& A) {
    if (A.ring().kind == RingKind::Zmod) throw InvalidInput("rank: not offered over composite Z/m");
    return smith(A).rank;
}

Matrix kernel(const Matrix& A) {
    if (A.ring().kind == RingKind::Zmod) throw InvalidInput("kernel: not offered over composite Z/m");
    SNF s = smith(A);
    return s.Wi.cols_range(s.rank, A.cols() - s.rank);
}

namespace {
// Square nonsingular systems over Z by elimination over Q; avoids transform growth in the Smith form.
std::optional<Matrix> solve_square_Z(const Matrix& A, const Matrix& B) {
    auto inv = rational_inverse(A);
    const std::size_t n = A.rows();
    Matrix X(A.ring(), n, B.cols());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < B.cols(); ++k) {
            Rat x = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (B(j, k) != 0) x += inv[i][j] * B(j, k);
            x.canonicalize();
            if (x.get_den() != 1) return std::nullopt;
            X.set(i, k, x.get_num());
        }
    return X;
}
}  // namespace

std::optional<Matrix> solve(const Matrix& A, const Matrix& B) {
    if (A.ring() != B.ring() || A.rows() != B.rows()) throw InvalidInput("solve: shape mismatch");
    const Ring& R = A.ring();
    if (R.is_Z() && A.square() && A.rows() > 0 && det(A) != 0) return solve_square_Z(A, B);
    SNF s = smith(A);
    Matrix C = s.Ui * B;
    Matrix Y(R, A.cols(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t k = 0; k < B.cols(); ++k) {
            Int d = i < A.cols() ? s.D(i, i) : Int(0);
            auto y = R.divide(C(i, k), d);
            if (!y) return std::nullopt;
            if (i < A.cols()) Y.set(i, k, *y);
        }
    return s.Wi * Y;
}

Matrix inverse(const Matrix& A) {
    if (!A.square()) throw InvalidInput("inverse: non-square matrix");
    if (!is_unit_det(A)) throw InvalidInput("inverse: determinant is not a unit");
    auto X = solve(A, Matrix::identity(A.ring(), A.rows()));
    if (!X) throw InvalidInput("inverse: no solution");
    return *X;
}

bool is_primitive(const Matrix& B) {
    if (B.cols() == 0) return true;
    if (B.cols() > B.rows()) return false;
    SNF s = smith(B);
    for (std::size_t i = 0; i < B.cols(); ++i)
        if (!B.ring().is_unit(s.D(i, i))) return false;
    return true;
}

Matrix complete_basis(const Matrix& B) {
    if (!is_primitive(B)) throw InvalidInput("complete_basis: columns are not primitive");
    SNF s = smith(B);
    std::size_t k = B.cols(), n = B.rows();
    if (k == n) return B;
    return hcat({B, s.U.cols_range(k, n - k)});
}

std::vector<std::vector<Rat>> rational_inverse(const Matrix& A) {
    if (!A.square()) throw InvalidInput("rational_inverse: non-square");
    std::size_t n = A.rows();
    std::vector<std::vector<Rat>> a(n, std::vector<Rat>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = Rat(A(i, j));
        a[i][n + i] = 1;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) throw InvalidInput("rational_inverse: singular");
        std::swap(a[p], a[c]);
        Rat piv = a[c][c];
        for (auto& x : a[c]) x /= piv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            Rat f = a[i][c];
            for (std::size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    std::vector<std::vector<Rat>> inv(n, std::vector<Rat>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = a[i][n + j];
    return inv;
}

Matrix lll_reduce(const Matrix& B) {
    if (!B.ring().is_Z()) throw InvalidInput("lll_reduce: needs an integer matrix");
    const std::size_t n = B.rows(), k = B.cols();
    if (k < 2) return B;
    std::vector<std::vector<Int>> b(k, std::vector<Int>(n));
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < n; ++i) b[j][i] = B(i, j);
    std::vector<std::vector<Rat>> mu(k, std::vector<Rat>(k));
    std::vector<Rat> Bn(k);  // squared norms of the Gram-Schmidt vectors
    auto gram_schmidt = [&] {
        std::vector<std::vector<Rat>> bs(k, std::vector<Rat>(n));
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = 0; i < n; ++i) bs[j][i] = b[j][i];
            for (std::size_t l = 0; l < j; ++l) {
                Rat d = 0;
                for (std::size_t i = 0; i < n; ++i) d += Rat(b[j][i]) * bs[l][i];
                mu[j][l] = d / Bn[l];
                for (std::size_t i = 0; i < n; ++i) bs[j][i] -= mu[j][l] * bs[l][i];
            }
            Bn[j] = 0;
            for (std::size_t i = 0; i < n; ++i) Bn[j] += bs[j][i] * bs[j][i];
            if (Bn[j] == 0) throw InvalidInput("lll_reduce: columns are dependent");
        }
    };
    gram_schmidt();
    const Rat delta(3, 4);
    std::size_t j = 1;
    while (j < k) {
        for (std::size_t l = j; l-- > 0;) {
            Rat m = mu[j][l];
            // nearest integer to m
            Rat h = m + Rat(1, 2);
            Int q = h.get_num() / h.get_den();
            if (h.get_num() < 0 && q * h.get_den() != h.get_num()) q -= 1;
            if (q == 0) continue;
            for (std::size_t i = 0; i < n; ++i) b[j][i] -= q * b[l][i];
            for (std::size_t t = 0; t < l; ++t) mu[j][t] -= Rat(q) * mu[l][t];
            mu[j][l] -= Rat(q);
        }
        if (Bn[j] >= (delta - mu[j][j - 1] * mu[j][j - 1]) * Bn[j - 1]) {
            ++j;
        } else {
            std::swap(b[j], b[j - 1]);
            gram_schmidt();
            j = std::max<std::size_t>(j - 1, 1);
        }
    }
    Matrix out(B.ring(), n, k);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t i = 0; i < n; ++i) out.set(i, c, b[c][i]);
    return out;
}

}  // namespace qform
