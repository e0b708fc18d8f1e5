#include "qform/formations.hpp"

#include <algorithm>
#include <functional>

namespace qform {

namespace {

Matrix I(const Ring& r, std::size_t n) { return Matrix::identity(r, n); }
Matrix O(const Ring& r, std::size_t a, std::size_t b) { return Matrix(r, a, b); }

Matrix inv_T(const Matrix& m) { return inverse(m).T(); }

void require(bool c, const char* msg) {
    if (!c) throw InvalidInput(msg);
}

// [[a b c],[d e f],[g h i]] from a row-major list of nine blocks.
Matrix blocks3(const std::vector<Matrix>& b) {
    return vcat({hcat({b[0], b[1], b[2]}), hcat({b[3], b[4], b[5]}), hcat({b[6], b[7], b[8]})});
}

// Block permutation: new block i = old block perm[i].
Matrix block_permutation(const Ring& r, const std::vector<std::size_t>& sizes, const std::vector<std::size_t>& perm) {
    std::vector<std::size_t> off{0};
    for (auto s : sizes) off.push_back(off.back() + s);
    Matrix P(r, off.back(), off.back());
    std::size_t row = 0;
    for (auto bi : perm)
        for (std::size_t t = 0; t < sizes[bi]; ++t) P.set(row++, off[bi] + t, 1);
    return P;
}

// column-major vectorisation
Matrix vec(const Matrix& m) {
    Matrix v(m.ring(), m.rows() * m.cols(), 1);
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) v.set(j * m.rows() + i, 0, m(i, j));
    return v;
}

Matrix unvec(const Matrix& v, std::size_t rows, std::size_t cols) {
    Matrix m(v.ring(), rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) m.set(i, j, v(j * rows + i, 0));
    return m;
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix k(a.ring(), a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (a(i, j) == 0) continue;
            for (std::size_t p = 0; p < b.rows(); ++p)
                for (std::size_t q = 0; q < b.cols(); ++q)
                    k.set(i * b.rows() + p, j * b.cols() + q, a(i, j) * b(p, q));
        }
    return k;
}

// ---------------------------------------------------------------- split formations

SplitFormation boundary_of_form(const QuadraticForm& v) {
    return {v.ring, -v.eps, I(v.ring, v.rank()), v.lambda(), v.theta};
}

SplitFormation trivial_formation(std::size_t p, int eps, const Ring& r) {
    return {r, eps, O(r, p, p), I(r, p), O(r, p, p)};
}

SplitFormation direct_sum(const SplitFormation& x, const SplitFormation& y) {
    require(x.ring == y.ring && x.eps == y.eps, "direct_sum: ring/epsilon mismatch");
    return {x.ring, x.eps, block_diag({x.gamma, y.gamma}), block_diag({x.mu, y.mu}),
            block_diag({x.theta, y.theta})};
}

bool is_valid(const SplitFormation& x) {
    if (x.F() != x.G() || x.mu.rows() != x.F() || x.mu.cols() != x.G()) return false;
    if (x.theta.rows() != x.G() || !x.theta.square()) return false;
    if (x.gamma.T() * x.mu != x.theta - x.theta.T() * Int(x.eps)) return false;
    return is_primitive(vcat({x.gamma, x.mu}));
}

std::string iso_failure(const SplitFormation& x, const SplitFormation& y, const FormationIso& f) {
    const int e = x.eps;
    if (x.eps != y.eps) return "epsilon mismatch";
    if (f.alpha.rows() != y.F() || f.alpha.cols() != x.F() || f.beta.rows() != y.G() ||
        f.beta.cols() != x.G() || f.nu.rows() != x.F() || !f.nu.square())
        return "shape mismatch";
    if (!is_unit_det(f.alpha)) return "alpha not invertible";
    if (!is_unit_det(f.beta)) return "beta not invertible";
    Matrix chi = f.nu - f.nu.T() * Int(e);
    if (f.alpha * x.gamma + f.alpha * chi.T() * x.mu != y.gamma * f.beta) return "condition (a)";
    if (inv_T(f.alpha) * x.mu != y.mu * f.beta) return "condition (b)";
    if (!q_equal(x.theta + x.mu.T() * f.nu * x.mu, f.beta.T() * y.theta * f.beta, -e)) return "condition (c)";
    return {};
}

bool verify_iso(const SplitFormation& x, const SplitFormation& y, const FormationIso& f) {
    return iso_failure(x, y, f).empty();
}

std::string homotopy_failure(const SplitFormation& x, const SplitFormation& y, const FormationIso& f,
                             const FormationIso& g, const Matrix& D) {
    if (auto m = iso_failure(x, y, f); !m.empty()) return "first map: " + m;
    if (auto m = iso_failure(x, y, g); !m.empty()) return "second map: " + m;
    if (D.rows() != y.F() || D.cols() != x.G()) return "shape mismatch";
    const int e = x.eps;
    if (inv_T(g.beta) - inv_T(f.beta) != y.mu.T() * D) return "condition (a)";
    if (g.alpha - f.alpha != D * x.mu.T()) return "condition (b)";
    Matrix lhs = g.alpha * g.nu * g.alpha.T() - f.alpha * f.nu * f.alpha.T();
    Matrix rhs = (g.alpha * x.gamma * Int(e) + D * x.theta) * D.T();
    if (!q_equal(lhs, rhs, -e)) return "condition (c)";
    return {};
}

bool verify_homotopy(const SplitFormation& x, const SplitFormation& y, const FormationIso& f,
                     const FormationIso& g, const Matrix& D) {
    return homotopy_failure(x, y, f, g, D).empty();
}

FormationIso identity_iso(const SplitFormation& x) {
    return {I(x.ring, x.F()), I(x.ring, x.G()), O(x.ring, x.F(), x.F())};
}

FormationIso compose(const FormationIso& g, const FormationIso& f) {
    Matrix ai = inverse(f.alpha);
    return {g.alpha * f.alpha, g.beta * f.beta, f.nu + ai * g.nu * ai.T()};
}

FormationIso invert(const FormationIso& f) {
    return {inverse(f.alpha), inverse(f.beta), -(f.alpha * f.nu * f.alpha.T())};
}

FormationIso direct_sum(const FormationIso& f, const FormationIso& g) {
    return {block_diag({f.alpha, g.alpha}), block_diag({f.beta, g.beta}), block_diag({f.nu, g.nu})};
}

FormationIso boundary_of_isometry(const Matrix& h) { return {h, h, O(h.ring(), h.rows(), h.rows())}; }

FormationIso boundary_to_trivial(const QuadraticForm& m) {
    Matrix phi = m.lambda();
    require(is_unit_det(phi), "boundary_to_trivial: form is singular");
    Matrix pi = inverse(phi);
    return {I(m.ring, m.rank()), phi, -(pi.T() * m.theta * pi)};
}

// ---------------------------------------------------------------- stable boundary isomorphisms

SplitFormation BoundaryIso::source() const {
    return direct_sum(boundary_of_form(src), trivial_formation(p, -src.eps, src.ring));
}
SplitFormation BoundaryIso::target() const {
    return direct_sum(boundary_of_form(tgt), trivial_formation(pp, -tgt.eps, tgt.ring));
}

bool verify(const BoundaryIso& f) {
    return f.src.eps == f.tgt.eps && f.src.rank() + f.p == f.tgt.rank() + f.pp &&
           verify_iso(f.source(), f.target(), f.f);
}

BoundaryIso compose(const BoundaryIso& g, const BoundaryIso& f) {
    require(f.tgt.theta == g.src.theta && f.pp == g.p, "compose: target/source mismatch");
    return {f.src, g.tgt, f.p, g.pp, compose(g.f, f.f)};
}

BoundaryIso invert(const BoundaryIso& f) { return {f.tgt, f.src, f.pp, f.p, invert(f.f)}; }

BoundaryIso boundary_iso_of_isometry(const QuadraticForm& v, const QuadraticForm& w, const Matrix& h) {
    return {v, w, 0, 0, boundary_of_isometry(h)};
}

NormalForm normal_form(const BoundaryIso& f) {
    const std::size_t n = f.src.rank(), np = f.tgt.rank();
    const Matrix& A = f.f.alpha;
    Matrix Bi = inverse(f.f.beta);
    Matrix S = A * f.f.nu * A.T();
    NormalForm nf;
    nf.a = A.block(0, 0, np, n);
    nf.a1 = A.block(0, n, np, A.cols() - n);
    nf.a3 = A.block(np, n, A.rows() - np, A.cols() - n);
    nf.b = Bi.block(0, 0, n, np);
    nf.b1 = Bi.block(0, np, n, Bi.cols() - np);
    nf.s = S.block(0, 0, np, np);
    return nf;
}

std::string normal_form_failure(const BoundaryIso& f, const NormalForm& nf) {
    const int e = f.src.eps;
    const Ring& R = f.src.ring;
    const std::size_t n = f.src.rank(), np = f.tgt.rank();
    Matrix lam = f.src.lambda(), lamp = f.tgt.lambda();
    const Matrix& A = f.f.alpha;
    Matrix Bi = inverse(f.f.beta);
    if (A.block(np, 0, A.rows() - np, n) != nf.b1.T() * lam * Int(e)) return "alpha lower-left";
    if (Bi.block(n, 0, Bi.rows() - n, np) != nf.a1.T() * lamp) return "beta^-1 lower-left";
    if (Bi.block(n, np, Bi.rows() - n, Bi.cols() - np) != nf.a3.T()) return "beta^-1 lower-right";
    Matrix S = A * f.f.nu * A.T();
    Matrix rep = blocks(nf.s, -(nf.a * nf.b1) * Int(e), O(R, f.pp, np), -(nf.b1.T() * f.src.theta * nf.b1));
    if (!q_equal(S, rep, e)) return "alpha nu alpha^T";
    if (nf.a * nf.b + (nf.s.T() + nf.s * Int(e)) * lamp != I(R, np)) return "ab + (s^T + eps s) lambda' = 1";
    if (nf.a.T() * lamp != lam * nf.b) return "a^T lambda' = lambda b";
    if (!q_equal(f.tgt.theta, nf.b.T() * f.src.theta * nf.b + lamp.T() * nf.s * lamp, e)) return "theta' class";
    return {};
}

QuadraticForm union_form(const BoundaryIso& f) {
    require(verify(f), "union: not a stable boundary isomorphism");
    NormalForm nf = normal_form(f);
    const Ring& R = f.src.ring;
    Matrix t = blocks(f.src.theta, O(R, f.src.rank(), f.tgt.rank()), nf.a * Int(f.src.eps), -nf.s);
    return {R, f.src.eps, t};
}

std::optional<StableHomotopy> find_stable_homotopy(const BoundaryIso& f, const BoundaryIso& g, const Budget& bud) {
    require(f.src.theta == g.src.theta && f.tgt.theta == g.tgt.theta && f.src.eps == g.src.eps,
            "find_stable_homotopy: maps have different source/target forms");
    require(verify(f) && verify(g), "find_stable_homotopy: input is not an isomorphism");
    const Ring& R = f.src.ring;
    const int fe = -f.src.eps;
    const std::size_t n = f.src.rank(), np = f.tgt.rank(), p = f.p, q = g.p;

    StableHomotopy out;
    // f + id_Q : V|P|Q -> V'|P'|Q ;  g + id_P : V|Q|P -> V'|Q'|P, precomposed with the block swap.
    out.source = direct_sum(f.source(), trivial_formation(q, fe, R));
    out.target = direct_sum(f.target(), trivial_formation(q, fe, R));
    out.f = direct_sum(f.f, identity_iso(trivial_formation(q, fe, R)));
    FormationIso gp = direct_sum(g.f, identity_iso(trivial_formation(p, fe, R)));
    Matrix Pi = block_permutation(R, {n, p, q}, {0, 2, 1});
    out.g = compose(gp, FormationIso{Pi, Pi, O(R, Pi.rows(), Pi.rows())});
    if (!verify_iso(out.source, out.target, out.g)) return std::nullopt;

    const SplitFormation &X = out.source, &Y = out.target;
    const std::size_t r = Y.F(), c = X.G();
    Matrix lhs = vcat({kron(I(R, c), Y.mu.T()), kron(X.mu, I(R, r))});
    Matrix rhs = vcat({vec(inv_T(out.g.beta) - inv_T(out.f.beta)), vec(out.g.alpha - out.f.alpha)});
    auto part = solve(lhs, rhs);
    if (!part) return std::nullopt;
    Matrix K = kernel(lhs);

    auto try_delta = [&](const Matrix& d) {
        Matrix D = unvec(d, r, c);
        if (verify_homotopy(X, Y, out.f, out.g, D)) {
            out.delta = D;
            return true;
        }
        return false;
    };
    if (try_delta(*part)) return out;
    const std::size_t k = K.cols();
    if (k == 0) return std::nullopt;

    // Shells of growing sup-norm over the integer kernel.
    std::uint64_t nodes = 0;
    const int maxR = bud.box + 1;
    std::vector<long> t(k);
    for (int rad = 1; rad <= maxR; ++rad) {
        std::function<bool(std::size_t, bool)> rec = [&](std::size_t i, bool hit) -> bool {
            if (i == k) {
                if (!hit) return false;
                if (++nodes > bud.nodes) throw BudgetExceeded("homotopy search budget exhausted");
                Matrix d = *part;
                for (std::size_t j = 0; j < k; ++j)
                    if (t[j] != 0) d = d + K.col(j) * Int(t[j]);
                return try_delta(d);
            }
            for (long v = -rad; v <= rad; ++v) {
                t[i] = v;
                if (rec(i + 1, hit || v == rad || v == -rad)) return true;
            }
            return false;
        };
        if (rec(0, false)) return out;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- splitting and extension

SplitEmbedding split_embedding(const QuadraticForm& m, const Matrix& j, const std::optional<Matrix>& jperp) {
    const Ring& R = m.ring;
    const int e = m.eps;
    require(j.rows() == m.rank(), "split: embedding has wrong ambient rank");
    require(is_nonsingular(m), "split: ambient form is singular");
    require(is_primitive(j), "split: image is not a direct summand");
    const std::size_t n = m.rank(), k = j.cols();
    Matrix phi = m.lambda();

    SplitEmbedding s;
    s.v = restrict_to(m, j);
    s.jperp = kernel(j.T() * phi);
    if (jperp) {
        require(jperp->rows() == n && jperp->cols() == s.jperp.cols() && (j.T() * phi * *jperp).is_zero() &&
                    solve(*jperp, s.jperp).has_value() && solve(s.jperp, *jperp).has_value(),
                "split: supplied basis does not span V^perp");
        s.jperp = *jperp;
    }
    const std::size_t r = s.jperp.cols();
    s.vperp = restrict_to(m, s.jperp);
    auto sig = solve(s.jperp.T() * phi, I(R, r));
    require(sig.has_value(), "split: no section for V^perp");
    s.sigma = *sig;

    Matrix h1 = vcat({hcat({I(R, r), O(R, r, r), O(R, r, k)}), hcat({s.jperp, s.sigma, j})});
    Matrix h2 = blocks3({-(s.sigma.T() * phi.T() * j), I(R, r), -(s.sigma.T() * m.theta.T() * s.sigma),
                         O(R, r, k), O(R, r, r), I(R, r), I(R, k), O(R, k, r), O(R, k, r)});
    s.h = h1 * h2;
    QuadraticForm hsrc = direct_sum(s.v, hyperbolic(r, e, R));
    QuadraticForm htgt = direct_sum(negate(s.vperp), m);
    if (!is_isometry(hsrc, htgt, s.h)) throw std::logic_error("split: h is not an isometry");

    FormationIso g = boundary_to_trivial(m);
    FormationIso g2 = boundary_to_trivial(hyperbolic(r, e, R));
    FormationIso idr{I(R, r), I(R, r), O(R, r, r)}, idk{I(R, k), I(R, k), O(R, k, k)};
    FormationIso fj = compose(direct_sum(idr, g), compose(boundary_of_isometry(s.h), direct_sum(idk, invert(g2))));
    s.fj = {s.v, negate(s.vperp), 2 * r, n, fj};
    if (!verify(s.fj)) throw std::logic_error("split: f_j is not an isomorphism");
    s.glued = union_form(s.fj);
    s.rj = hcat({j, -s.sigma});
    if (!is_isometry(s.glued, m, s.rj) || !is_unit_det(s.rj))
        throw std::logic_error("split: r_j is not an isometry");
    return s;
}

Extension extend_boundary_iso(const BoundaryIso& f, const Budget& bud, bool with_homotopy) {
    require(verify(f), "extend: not a stable boundary isomorphism");
    const Ring& R = f.src.ring;
    const int e = f.src.eps;
    const std::size_t v = f.src.rank(), vp = f.tgt.rank();
    NormalForm nf = normal_form(f);
    Matrix lamp = f.tgt.lambda();

    Extension x;
    x.glued = union_form(f);
    Matrix A = blocks3({O(R, vp, v), I(R, vp), O(R, vp, vp), I(R, v), nf.b, O(R, v, vp), O(R, vp, v), -lamp,
                        I(R, vp)});
    Matrix B = blocks3({I(R, v), O(R, v, vp), O(R, v, vp), -nf.a, I(R, vp), nf.s.T(), O(R, vp, v), O(R, vp, vp),
                        I(R, vp)});
    x.h = -(A * B);
    QuadraticForm hsrc = direct_sum(f.src, hyperbolic(vp, e, R));
    QuadraticForm htgt = direct_sum(f.tgt, x.glued);
    if (!is_isometry(hsrc, htgt, x.h)) throw std::logic_error("extend: h is not an isometry");

    FormationIso g = boundary_to_trivial(x.glued);
    FormationIso g2 = boundary_to_trivial(hyperbolic(vp, e, R));
    FormationIso idp{I(R, vp), I(R, vp), O(R, vp, vp)}, idv{I(R, v), I(R, v), O(R, v, v)};
    FormationIso dh = compose(direct_sum(idp, g), compose(boundary_of_isometry(x.h), direct_sum(idv, invert(g2))));
    x.dh = {f.src, f.tgt, 2 * vp, v + vp, dh};
    if (!verify(x.dh)) throw std::logic_error("extend: converted boundary is not an isomorphism");
    if (with_homotopy) x.homotopy = find_stable_homotopy(x.dh, f, bud);
    return x;
}

// ---------------------------------------------------------------- quasi-formations

bool is_lagrangian(const QuadraticForm& m, const Matrix& L) {
    if (L.rows() != m.rank() || 2 * L.cols() != m.rank() || !is_primitive(L)) return false;
    return q_equal(L.T() * m.theta * L, O(m.ring, L.cols(), L.cols()), m.eps) &&
           (L.T() * m.lambda() * L).is_zero();
}

std::string quasi_failure(const QuasiFormation& x) {
    const QuadraticForm& m = x.form;
    if (m.rank() % 2 != 0) return "ambient rank is odd";
    if (!is_nonsingular(m)) return "ambient form is singular";
    if (!is_lagrangian(m, x.L)) return "L is not a lagrangian";
    if (x.V.rows() != m.rank() || 2 * x.V.cols() != m.rank()) return "V has wrong rank";
    if (!is_primitive(x.V)) return "V is not a direct summand";
    return {};
}

void validate(const QuasiFormation& x) {
    if (auto m = quasi_failure(x); !m.empty()) throw InvalidInput("quasi-formation: " + m);
}

QuasiFormation boundary_of_asymmetric(const Matrix& rho, int eps) {
    require(rho.square(), "delta: rho must be square");
    const Ring& R = rho.ring();
    const std::size_t k = rho.rows();
    QuasiFormation x{hyperbolic(k, eps, R), vcat({I(R, k), O(R, k, k)}), vcat({I(R, k), rho}), 0};
    return x;
}

QuasiFormation direct_sum(const QuasiFormation& x, const QuasiFormation& y) {
    return {direct_sum(x.form, y.form), block_diag({x.L, y.L}), block_diag({x.V, y.V}), x.stab + y.stab};
}

QuasiFormation t_flip(const QuasiFormation& x) { return {negate(x.form), x.L, x.V, x.stab}; }

BoundaryPair b_invariant(const QuasiFormation& x) {
    validate(x);
    Annihilator an = annihilator(x.form, x.V);
    return {restrict_to(x.form, x.V), negate(an.induced), an.basis};
}

Matrix lagrangian_partner_right(const QuadraticForm& m, const Matrix& E) {
    Matrix phi = m.lambda();
    auto w0 = solve(E.T() * phi, I(m.ring, E.cols()));
    require(w0.has_value(), "partner: E is not a direct summand");
    return *w0 - E * (w0->T() * m.theta * *w0) * Int(m.eps);
}

Matrix lagrangian_partner_left(const QuadraticForm& m, const Matrix& W) {
    Matrix phi = m.lambda();
    auto e0 = solve(W.T() * phi.T(), I(m.ring, W.cols()));
    require(e0.has_value(), "partner: W is not a direct summand");
    return *e0 - W * (e0->T() * m.theta * *e0);
}

std::optional<ElementaryCertificate> certificate_from_complement(const QuasiFormation& x, const Matrix& K,
                                                                 std::optional<Matrix> E) {
    if (!is_lagrangian(x.form, K) || !is_unit_det(hcat({K, x.V}))) return std::nullopt;
    ElementaryCertificate c;
    c.complement = K;
    c.E = E ? *E : lagrangian_partner_left(x.form, K);
    c.g = hcat({c.E, K});
    if (!is_unit_det(c.g)) return std::nullopt;
    Matrix yx = inverse(c.g) * x.V;
    const std::size_t k = K.cols();
    Matrix y = yx.rows_range(0, k), xx = yx.rows_range(k, k);
    if (!is_unit_det(y)) return std::nullopt;
    c.rho = xx * inverse(y);
    if (!verify_certificate(x, c)) return std::nullopt;
    return c;
}

bool verify_certificate(const QuasiFormation& x, const ElementaryCertificate& c) {
    const std::size_t k = c.rho.rows();
    const Ring& R = x.form.ring;
    if (2 * k != x.form.rank() || !is_unit_det(c.g)) return false;
    if (!is_isometry(hyperbolic(k, x.form.eps, R), x.form, c.g)) return false;
    Matrix gV = c.g * vcat({I(R, k), c.rho});
    // same column span: each is an integral combination of the other
    return solve(x.V, gV).has_value() && solve(gV, x.V).has_value() && c.g.cols_range(0, k) == c.E;
}

ElementaryVerdict is_elementary_representative(const QuasiFormation& x) {
    validate(x);
    ElementaryVerdict out;
    Matrix Ls = lagrangian_partner_right(x.form, x.L);
    if (auto c = certificate_from_complement(x, Ls, x.L)) {
        out.verdict = Verdict::Yes;
        out.cert = c;
        out.route = "V complements the hamiltonian partner of L";
        return out;
    }
    if (auto c = certificate_from_complement(x, x.L)) {
        out.verdict = Verdict::Yes;
        out.cert = c;
        out.route = "V complements L";
        return out;
    }
    out.route = "V complements neither L nor its hamiltonian partner";
    return out;
}

}  // namespace qform
