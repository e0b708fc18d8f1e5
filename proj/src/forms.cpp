#include "qform/forms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace qform {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "Yes";
        case Verdict::No: return "No";
        default: return "Unknown";
    }
}

QuadraticForm::QuadraticForm(Ring r, int e, Matrix t) : ring(std::move(r)), eps(e), theta(std::move(t)) {
    if (e != 1 && e != -1) throw InvalidInput("epsilon must be +1 or -1");
    if (!theta.square()) throw InvalidInput("theta must be square");
    if (theta.ring() != ring) theta = theta.over(ring);
}

Matrix QuadraticForm::lambda() const { return theta + theta.T() * Int(eps); }

bool q_equal(const Matrix& t1, const Matrix& t2, int eps) {
    Matrix d = t1 - t2;
    if (!d.square()) throw InvalidInput("q_equal: non-square");
    if (!(d + d.T() * Int(eps)).is_zero()) return false;
    const Ring& R = d.ring();
    for (std::size_t i = 0; i < d.rows(); ++i) {
        if (eps == 1) {
            if (d(i, i) != 0) return false;
        } else if (!R.divide(d(i, i), Int(2))) {
            return false;
        }
    }
    return true;
}

Matrix symmetrize(const QuadraticForm& v) { return v.lambda(); }

QuadraticForm hyperbolic(std::size_t k, int eps, const Ring& r) {
    Matrix t(r, 2 * k, 2 * k);
    for (std::size_t i = 0; i < k; ++i) t.set(i, k + i, 1);
    return {r, eps, t};
}

QuadraticForm zero_form(std::size_t k, int eps, const Ring& r) { return {r, eps, Matrix(r, k, k)}; }

QuadraticForm restrict_to(const QuadraticForm& v, const Matrix& B) {
    return {v.ring, v.eps, B.T() * v.theta * B};
}

QuadraticForm direct_sum(const QuadraticForm& a, const QuadraticForm& b) {
    if (a.ring != b.ring || a.eps != b.eps) throw InvalidInput("direct_sum: ring/epsilon mismatch");
    return {a.ring, a.eps, block_diag({a.theta, b.theta})};
}

QuadraticForm negate(const QuadraticForm& v) { return {v.ring, v.eps, -v.theta}; }

bool same_form(const QuadraticForm& a, const QuadraticForm& b) {
    return a.ring == b.ring && a.eps == b.eps && a.rank() == b.rank() && q_equal(a.theta, b.theta, a.eps);
}

bool is_nonsingular(const QuadraticForm& v) { return is_unit_det(v.lambda()); }

Annihilator annihilator(const QuadraticForm& v, const Matrix& W) {
    if (W.rows() != v.rank()) throw InvalidInput("annihilator: ambient rank mismatch");
    if (!is_primitive(W)) throw InvalidInput("annihilator: submodule is not a direct summand");
    Matrix K = kernel(W.T() * v.lambda());
    return {K, restrict_to(v, K)};
}

Matrix radical(const QuadraticForm& v) { return kernel(v.lambda()); }

// ---------------------------------------------------------------- signature

Inertia inertia(const Matrix& S) {
    if (!S.square() || S != S.T()) throw InvalidInput("inertia: matrix is not symmetric");
    std::size_t n = S.rows();
    std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = Rat(S(i, j));
    Inertia in;
    for (std::size_t k = 0; k < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t j = k + 1;
            while (j < n && a[j][j] == 0) ++j;
            if (j < n) {
                std::swap(a[k], a[j]);
                for (auto& row : a) std::swap(row[k], row[j]);
            } else {
                j = k + 1;
                while (j < n && a[k][j] == 0) ++j;
                if (j == n) { ++in.zero; continue; }
                // x_k <- x_k + x_j makes the pivot 2 a_kj (characteristic zero)
                for (std::size_t c = 0; c < n; ++c) a[k][c] += a[j][c];
                for (std::size_t r = 0; r < n; ++r) a[r][k] += a[r][j];
            }
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a[i][k] == 0) continue;
            Rat f = a[i][k] / a[k][k];
            for (std::size_t c = k; c < n; ++c) a[i][c] -= f * a[k][c];
            for (std::size_t r = k; r < n; ++r) a[r][i] -= f * a[r][k];
        }
        (a[k][k] > 0 ? in.pos : in.neg)++;
    }
    return in;
}

Int signature(const Matrix& S) {
    Inertia in = inertia(S);
    return Int(static_cast<long>(in.pos)) - Int(static_cast<long>(in.neg));
}

bool is_definite(const Matrix& S) {
    Inertia in = inertia(S);
    return in.zero == 0 && (in.pos == 0 || in.neg == 0);
}

// ---------------------------------------------------------------- Arf

int arf_invariant(const QuadraticForm& v) {
    bool f2 = v.ring.is_field() && v.ring.mod == 2;
    if (!(v.ring.is_Z() || f2)) throw InvalidInput("arf: ring must be Z or F2");
    if (v.eps != -1 && !f2) throw InvalidInput("arf: epsilon must be -1");
    Matrix lam = v.lambda();
    if (!v.ring.is_unit(det(lam))) throw InvalidInput("arf: form is singular");
    std::size_t n = v.rank();
    auto bit = [](const Int& x) { return static_cast<int>(mpz_odd_p(x.get_mpz_t()) != 0); };
    std::vector<std::vector<int>> L(n, std::vector<int>(n)), Th(n, std::vector<int>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) { L[i][j] = bit(lam(i, j)); Th[i][j] = bit(v.theta(i, j)); }
    using Vec = std::vector<int>;
    auto lam2 = [&](const Vec& x, const Vec& y) {
        int s = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (x[i]) for (std::size_t j = 0; j < n; ++j) s ^= (y[j] & L[i][j]);
        return s;
    };
    auto mu = [&](const Vec& x) {
        int s = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (x[i]) for (std::size_t j = 0; j < n; ++j) s ^= (x[j] & Th[i][j]);
        return s;
    };
    std::vector<Vec> rest;
    for (std::size_t i = 0; i < n; ++i) { Vec e(n); e[i] = 1; rest.push_back(e); }
    int arf = 0;
    while (!rest.empty()) {
        Vec e = rest.front();
        rest.erase(rest.begin());
        auto it = std::find_if(rest.begin(), rest.end(), [&](const Vec& y) { return lam2(e, y) == 1; });
        if (it == rest.end()) throw InvalidInput("arf: form is singular mod 2");
        Vec f = *it;
        rest.erase(it);
        arf ^= mu(e) & mu(f);
        for (auto& x : rest) {
            int a = lam2(x, f), b = lam2(x, e);
            for (std::size_t i = 0; i < n; ++i) x[i] ^= (a & e[i]) ^ (b & f[i]);
        }
    }
    return arf;
}

// ---------------------------------------------------------------- isometries

bool is_isometry(const QuadraticForm& src, const QuadraticForm& tgt, const Matrix& h) {
    if (src.ring != tgt.ring || src.eps != tgt.eps) return false;
    if (h.rows() != tgt.rank() || h.cols() != src.rank() || !h.square()) return false;
    if (!is_unit_det(h)) return false;
    return q_equal(h.T() * tgt.theta * h, src.theta, src.eps);
}

std::vector<std::vector<Int>> vectors_of_norm(const Matrix& G, const Int& target) {
    std::size_t n = G.rows();
    std::vector<std::vector<Int>> out;
    if (target < 0) return out;
    if (n == 0) {
        if (target == 0) out.emplace_back();
        return out;
    }
    // Fincke-Pohst: Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
    using LD = long double;
    std::vector<std::vector<LD>> q(n, std::vector<LD>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q[i][j] = G(i, j).get_d();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for (std::size_t k = i + 1; k < n; ++k)
            for (std::size_t l = k; l < n; ++l) q[k][l] -= q[k][i] * q[i][l];
    }
    const LD N = target.get_d();
    const LD slack = 1e-6L * (1 + N);
    std::vector<long> x(n, 0);
    std::function<void(std::size_t, LD)> rec = [&](std::size_t i1, LD used) {
        std::size_t i = i1 - 1;
        LD c = 0;
        for (std::size_t j = i + 1; j < n; ++j) c -= q[i][j] * x[j];
        LD room = (N - used + slack) / q[i][i];
        if (room < 0) return;
        LD r = std::sqrt(room);
        long lo = static_cast<long>(std::ceil(c - r - 1e-9L)), hi = static_cast<long>(std::floor(c + r + 1e-9L));
        for (long xi = lo; xi <= hi; ++xi) {
            x[i] = xi;
            LD d = xi - c;
            LD u = used + q[i][i] * d * d;
            if (u > N + slack) continue;
            if (i == 0) {
                std::vector<Int> v(n);
                for (std::size_t k = 0; k < n; ++k) v[k] = x[k];
                Int s = 0;
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b) s += v[a] * G(a, b) * v[b];
                if (s == target) out.push_back(v);
            } else {
                rec(i, u);
            }
        }
        x[i] = 0;
    };
    rec(n, 0);
    return out;
}

namespace {

Int bil(const Matrix& M, const std::vector<Int>& x, const std::vector<Int>& y) {
    Int s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        for (std::size_t j = 0; j < y.size(); ++j) s += x[i] * M(i, j) * y[j];
    }
    return s;
}

std::vector<std::vector<Int>> box_vectors(std::size_t n, int B, const Ring& R, std::uint64_t limit) {
    std::vector<std::vector<Int>> out;
    long lo = -B, hi = B;
    if (!R.is_Z()) { lo = 0; hi = R.mod.get_si() - 1; }
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        total *= static_cast<std::uint64_t>(hi - lo + 1);
        if (total > limit) throw BudgetExceeded("box enumeration exceeds budget");
    }
    std::vector<long> c(n, lo);
    for (std::uint64_t t = 0; t < total; ++t) {
        std::vector<Int> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = c[i];
        out.push_back(std::move(v));
        for (std::size_t i = 0; i < n; ++i) {
            if (++c[i] <= hi) break;
            c[i] = lo;
        }
    }
    return out;
}

struct Search {
    const QuadraticForm& v;
    const QuadraticForm& w;
    Budget budget;
    std::size_t cap;
    bool want_all;
    bool exhaustive = true;
    std::uint64_t nodes = 0;
    std::vector<std::vector<std::vector<Int>>> cand;
    std::vector<Matrix> found;
    Matrix Lv, Lw;

    Search(const QuadraticForm& a, const QuadraticForm& b, Budget bd, std::size_t c, bool all)
        : v(a), w(b), budget(bd), cap(c), want_all(all), Lv(a.lambda()), Lw(b.lambda()) {}

    // candidate images for each basis vector; returns false if no search mode applies
    bool build() {
        std::size_t n = v.rank();
        const Ring& R = v.ring;
        std::vector<std::vector<Int>> pool;
        bool definite = R.is_Z() && v.eps == 1 && n > 0 && is_definite(Lw) && is_definite(Lv);
        int sgn = 1;
        if (definite) {
            if (inertia(Lw).neg > 0) sgn = -1;
        } else if (!R.is_Z()) {
            pool = box_vectors(n, 0, R, budget.nodes);
        } else if (n <= 6) {
            pool = box_vectors(n, budget.box, R, budget.nodes);
            exhaustive = false;
        } else {
            return false;
        }
        cand.assign(n, {});
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::vector<Int>> c;
            if (definite) c = vectors_of_norm(Lw * Int(sgn), Lv(i, i) * sgn);
            else c = pool;
            for (auto& y : c) {
                if (R.reduce(bil(Lw, y, y) - Lv(i, i)) != 0) continue;
                Matrix yy = Matrix::column(R, y);
                if (!q_equal(yy.T() * w.theta * yy, Matrix::scalar(R, v.theta(i, i)), v.eps)) continue;
                cand[i].push_back(y);
            }
        }
        return true;
    }

    void run(std::vector<std::size_t>& pick, std::size_t i) {
        if (!want_all && !found.empty()) return;
        if (found.size() > cap) return;
        std::size_t n = v.rank();
        if (i == n) {
            Matrix h(v.ring, n, n);
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t r = 0; r < n; ++r) h.set(r, k, cand[k][pick[k]][r]);
            if (is_isometry(v, w, h)) found.push_back(h);
            return;
        }
        for (std::size_t c = 0; c < cand[i].size(); ++c) {
            if (++nodes > budget.nodes) throw BudgetExceeded("isometry search exceeded budget");
            const auto& y = cand[i][c];
            bool ok = true;
            for (std::size_t j = 0; j < i && ok; ++j)
                ok = v.ring.reduce(bil(Lw, cand[j][pick[j]], y) - Lv(j, i)) == 0;
            if (!ok) continue;
            pick[i] = c;
            run(pick, i + 1);
            if (!want_all && !found.empty()) return;
        }
    }
};

std::optional<std::string> separating_invariant(const QuadraticForm& v, const QuadraticForm& w) {
    if (v.ring != w.ring) return "ring differs";
    if (v.eps != w.eps) return "epsilon differs";
    if (v.rank() != w.rank()) return "rank " + std::to_string(v.rank()) + " != " + std::to_string(w.rank());
    Matrix a = v.lambda(), b = w.lambda();
    if (v.ring.is_Z()) {
        Int da = det(a), db = det(b);
        if (da != db) return "det(lambda) " + da.get_str() + " != " + db.get_str();
        auto sa = smith(a).diagonal(), sb = smith(b).diagonal();
        if (sa != sb) return "invariant factors of lambda differ (boundary linking group)";
        if (v.eps == 1) {
            Int s1 = signature(a), s2 = signature(b);
            if (s1 != s2) return "signature " + s1.get_str() + " != " + s2.get_str();
        }
    } else if (v.ring.is_field()) {
        if (rank(a) != rank(b)) return "rank of lambda differs";
    }
    bool f2 = v.ring.is_field() && v.ring.mod == 2;
    if ((v.ring.is_Z() && v.eps == -1 || f2) && v.ring.is_unit(det(a)) && v.ring.is_unit(det(b)) && v.rank() > 0) {
        int x = arf_invariant(v), y = arf_invariant(w);
        if (x != y) return "Arf " + std::to_string(x) + " != " + std::to_string(y);
    }
    return std::nullopt;
}

}  // namespace

IsoResult is_isometric(const QuadraticForm& v, const QuadraticForm& w, const Budget& b) {
    IsoResult r;
    if (auto why = separating_invariant(v, w)) {
        r.verdict = Verdict::No;
        r.witness = *why;
        return r;
    }
    if (v.rank() == 0) {
        r.verdict = Verdict::Yes;
        r.map = Matrix(v.ring, 0, 0);
        return r;
    }
    Search s(v, w, b, 1, false);
    try {
        if (!s.build()) return r;
        std::vector<std::size_t> pick(v.rank());
        s.run(pick, 0);
    } catch (const BudgetExceeded&) {
        return r;
    }
    if (!s.found.empty()) {
        r.verdict = Verdict::Yes;
        r.map = s.found.front();
    } else if (s.exhaustive) {
        r.verdict = Verdict::No;
        r.witness = "exhaustive search found no isometry";
    }
    return r;
}

std::optional<std::vector<Matrix>> all_isometries(const QuadraticForm& v, const QuadraticForm& w,
                                                  std::size_t cap, const Budget& b) {
    if (separating_invariant(v, w)) return std::vector<Matrix>{};
    if (v.rank() == 0) return std::vector<Matrix>{Matrix(v.ring, 0, 0)};
    Search s(v, w, b, cap, true);
    try {
        if (!s.build() || !s.exhaustive) return std::nullopt;
        std::vector<std::size_t> pick(v.rank());
        s.run(pick, 0);
    } catch (const BudgetExceeded&) {
        return std::nullopt;
    }
    if (s.found.size() > cap) return std::nullopt;
    return s.found;
}

// ---------------------------------------------------------------- transvections

Matrix transvection(const QuadraticForm& V, const Matrix& u, const Int& a, const Matrix& w) {
    const Ring& R = V.ring;
    std::size_t n = V.rank();
    if (u.rows() != n || w.rows() != n || u.cols() != 1 || w.cols() != 1)
        throw InvalidInput("transvection: vectors have wrong shape");
    Matrix L = V.lambda();
    Matrix uL = u.T() * L;  // lambda(u, .)
    if (!is_primitive(uL.T())) throw InvalidInput("transvection: u is not unimodular");
    if ((u.T() * L * w)(0, 0) != 0) throw InvalidInput("transvection: lambda(u,v) != 0");
    Matrix z = Matrix::zero(R, 1, 1);
    if (!q_equal(u.T() * V.theta * u, z, V.eps)) throw InvalidInput("transvection: theta(u,u) is not 0");
    if (!q_equal(w.T() * V.theta * w, Matrix::scalar(R, a), V.eps))
        throw InvalidInput("transvection: theta(v,v) is not [a]");
    Int e = V.eps;
    Matrix t = Matrix::identity(R, n) + u * (w.T() * L) - w * uL * e - u * uL * (e * a);
    if (!is_isometry(V, V, t)) throw InvalidInput("transvection: result failed isometry check");
    return t;
}

// ---------------------------------------------------------------- Witt index

WittResult witt_index_lower_bound(const QuadraticForm& v, const Budget& b) {
    const Ring& R = v.ring;
    WittResult res;
    res.pairs = Matrix(R, v.rank(), 0);
    Matrix N = Matrix::identity(R, v.rank());  // current complement, as columns in v
    std::uint64_t spent = 0;
    while (N.cols() >= 2) {
        QuadraticForm cur = restrict_to(v, N);
        Matrix L = cur.lambda();
        if (R.is_Z() && cur.eps == 1 && is_definite(L)) break;
        std::size_t n = cur.rank();
        std::vector<std::vector<Int>> pool;
        try {
            pool = box_vectors(n, b.box, R, b.nodes);
        } catch (const BudgetExceeded&) {
            break;
        }
        // small vectors first
        auto height = [](const std::vector<Int>& x) {
            Int h = 0;
            for (auto& c : x) h += abs(c);
            return h;
        };
        std::stable_sort(pool.begin(), pool.end(), [&](auto& x, auto& y) { return height(x) < height(y); });
        // a binary form with square discriminant has its isotropic lines in closed form
        if (R.is_Z() && cur.eps == 1 && n == 2) {
            Int a = cur.theta(0, 0), bb = cur.theta(0, 1) + cur.theta(1, 0), c = cur.theta(1, 1);
            Int D = bb * bb - 4 * a * c, s = sqrt(D);
            if (D >= 0 && s * s == D) {
                for (Int r : {s, Int(-s)}) {
                    std::vector<Int> x = a == 0 ? std::vector<Int>{1, 0} : std::vector<Int>{-bb + r, 2 * a};
                    Int g = gcd(x[0], x[1]);
                    if (g != 0) x = {x[0] / g, x[1] / g};
                    pool.insert(pool.begin(), x);
                }
            }
        }
        bool got = false;
        for (auto& x : pool) {
            if (++spent > b.nodes) break;
            Matrix e = Matrix::column(R, x);
            if (e.is_zero()) continue;
            if (!q_equal(e.T() * cur.theta * e, Matrix::zero(R, 1, 1), cur.eps)) continue;
            Matrix eL = e.T() * L;
            auto f0 = solve(eL, Matrix::scalar(R, 1));
            if (!f0) continue;
            Matrix f = *f0;
            Int t = (f.T() * cur.theta * f)(0, 0);
            f = f - e * t;
            if (!q_equal(f.T() * cur.theta * f, Matrix::zero(R, 1, 1), cur.eps)) continue;
            Matrix P = hcat({e, f});
            Matrix K = kernel(P.T() * L);
            res.pairs = hcat({res.pairs, N * P});
            N = N * K;
            ++res.index;
            got = true;
            break;
        }
        if (!got) break;
    }
    return res;
}

// ---------------------------------------------------------------- named lattices

bool is_named_lattice(const std::string& name) {
    return name == "E8" || name == "E7" || name == "E6" || name == "D5" || name == "A4";
}

QuadraticForm named_lattice(const std::string& name) {
    // chain of `chain` nodes, optional extra node attached to chain node 2
    std::size_t chain = 0;
    bool branch = true;
    if (name == "E8") chain = 7;
    else if (name == "E7") chain = 6;
    else if (name == "E6") chain = 5;
    else if (name == "D5") chain = 4;
    else if (name == "A4") { chain = 4; branch = false; }
    else throw InvalidInput("unknown lattice name: " + name);
    std::size_t n = chain + (branch ? 1 : 0);
    Matrix t(Ring::Z(), n, n);
    for (std::size_t i = 0; i < n; ++i) t.set(i, i, 1);
    for (std::size_t i = 0; i + 1 < chain; ++i) t.set(i, i + 1, -1);
    if (branch) t.set(2, chain, -1);
    return {Ring::Z(), 1, t};
}

}  // namespace qform
