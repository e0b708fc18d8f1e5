#include "doctest.h"
#include "oracles.hpp"
#include "qform/formations.hpp"

using namespace qform;

namespace {
const Ring Z = Ring::Z();

Matrix M(std::size_t r, std::size_t c, std::vector<long> v) { return Matrix(Z, r, c, v); }
QuadraticForm form1(long x, int eps) { return {Z, eps, M(1, 1, {x})}; }

// Random rank-r form with small entries.
QuadraticForm random_form(std::mt19937_64& g, std::size_t r, int eps) {
    return {Z, eps, oracle::random_matrix(g, r, r, -3, 3)};
}

// Transvection data as in the forms tests: u with lambda(u,.) unimodular, theta(u,u) = 0, lambda(u,v) = 0.
bool transvection_data(std::mt19937_64& g, const QuadraticForm& v, Matrix& u, Int& a, Matrix& w) {
    Matrix L = v.lambda();
    const std::size_t n = v.rank();
    for (int tries = 0; tries < 4000; ++tries) {
        u = oracle::random_matrix(g, n, 1, -3, 3);
        if (u.is_zero() || oracle::gcd_entries(L.T() * u) != 1) continue;
        if (!q_equal(u.T() * v.theta * u, Matrix(Z, 1, 1), v.eps)) continue;
        w = oracle::random_matrix(g, n, 1, -3, 3);
        if ((u.T() * L * w)(0, 0) != 0) continue;
        a = (w.T() * v.theta * w)(0, 0);
        return true;
    }
    return false;
}
}  // namespace

TEST_CASE("boundary formation convention per epsilon") {
    // mu is the symmetrization psi + eps psi^T, tagged with the opposite epsilon
    SplitFormation p = boundary_of_form(form1(1, 1));
    CHECK(p.eps == -1);
    CHECK(p.gamma == M(1, 1, {1}));
    CHECK(p.mu == M(1, 1, {2}));
    CHECK(p.theta == M(1, 1, {1}));
    SplitFormation m = boundary_of_form(form1(1, -1));
    CHECK(m.eps == 1);
    CHECK(m.mu == M(1, 1, {0}));
    SplitFormation h = boundary_of_form(hyperbolic(1, -1));
    CHECK(h.mu == M(2, 2, {0, 1, -1, 0}));
    SplitFormation z = boundary_of_form(form1(0, 1));
    CHECK(z.mu == M(1, 1, {0}));

    std::mt19937_64 g(1);
    for (int t = 0; t < 100; ++t) {
        int e = t % 2 ? 1 : -1;
        CHECK(is_valid(boundary_of_form(random_form(g, 1 + g() % 4, e))));
    }
    CHECK(is_valid(trivial_formation(3, 1)));
}

TEST_CASE("conversion to the trivial formation and its automorphisms") {
    std::mt19937_64 g(2);
    for (int t = 0; t < 40; ++t) {
        int e = t % 2 ? 1 : -1;
        QuadraticForm m = t == 0 ? hyperbolic(1, e) : oracle::random_simple_form(g, 1 + g() % 3, e);
        CHECK(verify_iso(boundary_of_form(m), trivial_formation(m.rank(), -e), boundary_to_trivial(m)));
    }
    // every (alpha, alpha^{-*}, chi + eps' chi^T) is an automorphism, homotopic to 1 via 1 - alpha
    for (int t = 0; t < 40; ++t) {
        int fe = t % 2 ? 1 : -1;
        std::size_t p = 1 + g() % 4;
        SplitFormation P = trivial_formation(p, fe);
        Matrix a = oracle::random_unimodular(g, p);
        Matrix chi = oracle::random_matrix(g, p, p, -3, 3);
        FormationIso f{a, inverse(a).T(), chi + chi.T() * Int(fe)};
        REQUIRE(verify_iso(P, P, f));
        CHECK(verify_homotopy(P, P, f, identity_iso(P), Matrix::identity(Z, p) - a));
        CHECK_FALSE(verify_homotopy(P, P, f, identity_iso(P), Matrix::identity(Z, p) - a + Matrix::identity(Z, p)) );
    }
}

TEST_CASE("composition and inverses") {
    std::mt19937_64 g(3);
    QuadraticForm v = form1(1, 1);
    SplitFormation X = direct_sum(boundary_of_form(v), trivial_formation(2, -1));
    auto rand_aut = [&]() {
        // boundary of -1 on v, conjugated trivial automorphism on P
        Matrix a = oracle::random_unimodular(g, 2);
        Matrix chi = oracle::random_matrix(g, 2, 2, -2, 2);
        FormationIso tp{a, inverse(a).T(), chi - chi.T()};
        Int s = g() % 2 ? 1 : -1;
        return direct_sum(boundary_of_isometry(M(1, 1, {1}) * s), tp);
    };
    for (int t = 0; t < 30; ++t) {
        FormationIso f = rand_aut(), h = rand_aut(), k = rand_aut();
        REQUIRE(verify_iso(X, X, f));
        CHECK(verify_iso(X, X, compose(h, f)));
        FormationIso l = compose(k, compose(h, f)), r = compose(compose(k, h), f);
        CHECK(l.alpha == r.alpha);
        CHECK(l.beta == r.beta);
        CHECK(q_equal(l.nu, r.nu, 1));
        FormationIso fi = compose(f, invert(f));
        CHECK(fi.alpha == Matrix::identity(Z, 3));
        CHECK(fi.beta == Matrix::identity(Z, 3));
        CHECK(fi.nu.is_zero());
        FormationIso c = compose(f, identity_iso(X));
        CHECK(c.alpha == f.alpha);
        CHECK(c.nu == f.nu);
    }
}

TEST_CASE("transvection boundaries are homotopic to the identity") {
    std::mt19937_64 g(4);
    int done = 0;
    for (int t = 0; t < 60; ++t) {
        int e = t % 2 ? 1 : -1;
        QuadraticForm v = oracle::random_simple_form(g, 1 + g() % 2, e);
        Matrix u, w;
        Int a;
        if (!transvection_data(g, v, u, a, w)) continue;
        Matrix tau = transvection(v, u, a, w);
        SplitFormation X = boundary_of_form(v);
        FormationIso dt = boundary_of_isometry(tau), id = identity_iso(X);
        REQUIRE(verify_iso(X, X, dt));
        Matrix D = u * w.T() * Int(-e) + w * u.T() + u * u.T() * a;
        CHECK_MESSAGE(verify_homotopy(X, X, dt, id, D), homotopy_failure(X, X, dt, id, D));
        // homotopic isomorphisms glue to isometric forms via [[1, -D1^T],[0, 1]]
        BoundaryIso f1{v, v, 0, 0, dt}, f2{v, v, 0, 0, id};
        QuadraticForm u1 = union_form(f1), u2 = union_form(f2);
        const std::size_t n = v.rank();
        Matrix S = blocks(Matrix::identity(Z, n), -D.T(), Matrix(Z, n, n), Matrix::identity(Z, n));
        CHECK(is_isometry(u1, u2, S));
        // the bounded search finds some homotopy as well
        auto sh = find_stable_homotopy(f1, f2);
        REQUIRE(sh);
        CHECK(verify_homotopy(sh->source, sh->target, sh->f, sh->g, sh->delta));
        ++done;
    }
    CHECK(done >= 20);
}

TEST_CASE("normal form of stable boundary isomorphisms") {
    std::mt19937_64 g(5);
    // boundary of an isometry: a = h, b = h^-1, s = 0
    QuadraticForm v = oracle::random_simple_form(g, 2, 1);
    Matrix U = oracle::random_unimodular(g, 4);
    QuadraticForm w = restrict_to(v, inverse(U));  // U : v -> w is an isometry
    BoundaryIso dh = boundary_iso_of_isometry(v, w, U);
    REQUIRE(verify(dh));
    NormalForm nf = normal_form(dh);
    CHECK(nf.a == U);
    CHECK(nf.b == inverse(U));
    CHECK(nf.s.is_zero());
    CHECK(normal_form_failure(dh, nf).empty());

    BoundaryIso id0 = boundary_iso_of_isometry(form1(0, 1), form1(0, 1), M(1, 1, {1}));
    NormalForm n0 = normal_form(id0);
    CHECK(n0.a == M(1, 1, {1}));
    CHECK(n0.b == M(1, 1, {1}));
    CHECK(n0.s.is_zero());

    // stabilised maps from embedding splittings
    for (int t = 0; t < 60; ++t) {
        int e = t % 2 ? 1 : -1;
        QuadraticForm m = oracle::random_simple_form(g, 1 + g() % 3, e);
        Matrix j = oracle::random_primitive(g, m.rank(), 1 + g() % (m.rank() - 1));
        SplitEmbedding s = split_embedding(m, j);
        NormalForm n = normal_form(s.fj);
        CHECK_MESSAGE(normal_form_failure(s.fj, n).empty(), normal_form_failure(s.fj, n));
    }
}

TEST_CASE("unions") {
    for (int e : {1, -1}) {
        QuadraticForm z = form1(0, e);
        QuadraticForm u = union_form(boundary_iso_of_isometry(z, z, M(1, 1, {1})));
        CHECK(u.theta == M(2, 2, {0, 0, e, 0}));
        CHECK(is_nonsingular(u));
    }
    QuadraticForm one = form1(1, 1);
    QuadraticForm u = union_form(boundary_iso_of_isometry(one, one, M(1, 1, {1})));
    CHECK(u.theta == M(2, 2, {1, 0, 1, 0}));
    CHECK(abs(det(u.lambda())) == 1);

    // naturality: [[k,0],[0,k'^{-T}]] : v cup_f v' -> w cup_{dk' f dk^-1} w'
    std::mt19937_64 g(6);
    for (int t = 0; t < 30; ++t) {
        int e = t % 2 ? 1 : -1;
        QuadraticForm v = oracle::random_simple_form(g, 1, e);
        Matrix tau, uu, ww;
        Int a;
        if (!transvection_data(g, v, uu, a, ww)) continue;
        tau = transvection(v, uu, a, ww);
        BoundaryIso f = boundary_iso_of_isometry(v, v, tau);
        Matrix k = oracle::random_unimodular(g, 2), kp = oracle::random_unimodular(g, 2);
        QuadraticForm w = restrict_to(v, inverse(k)), wp = restrict_to(v, inverse(kp));
        BoundaryIso fk = compose(boundary_iso_of_isometry(v, wp, kp), compose(f, boundary_iso_of_isometry(w, v, inverse(k))));
        REQUIRE(verify(fk));
        Matrix N = block_diag({k, inverse(kp).T()});
        CHECK(is_isometry(union_form(f), union_form(fk), N));
    }
}

TEST_CASE("splitting along an embedding") {
    std::mt19937_64 g(7);
    for (int t = 0; t < 300; ++t) {
        int e = t % 2 ? 1 : -1;
        QuadraticForm m = oracle::random_simple_form(g, 1 + g() % 3, e);
        Matrix j = oracle::random_primitive(g, m.rank(), 1 + g() % (m.rank() - 1));
        SplitEmbedding s = split_embedding(m, j);
        CHECK(verify(s.fj));
        CHECK(abs(det(s.glued.lambda())) == 1);
        CHECK(is_isometry(s.glued, m, s.rj));
        CHECK(s.jperp.cols() + j.cols() == m.rank());
        CHECK((j.T() * m.lambda() * s.jperp).is_zero());
    }
    // E8 with a root
    QuadraticForm e8 = named_lattice("E8");
    Matrix r(Z, 8, 1);
    r.set(0, 0, 1);
    SplitEmbedding s = split_embedding(e8, r);
    CHECK(is_isometry(s.glued, e8, s.rj));
}

TEST_CASE("extension of boundary isomorphisms") {
    // zero forms, identity: a = b = 1, s = 0 gives h = -[[-1,1,0],[0,1,0],[0,0,1]]
    QuadraticForm z = form1(0, 1);
    Extension x0 = extend_boundary_iso(boundary_iso_of_isometry(z, z, M(1, 1, {1})));
    CHECK(x0.h == M(3, 3, {1, -1, 0, 0, -1, 0, 0, 0, -1}));
    REQUIRE(x0.homotopy);
    CHECK(verify_homotopy(x0.homotopy->source, x0.homotopy->target, x0.homotopy->f, x0.homotopy->g,
                          x0.homotopy->delta));

    QuadraticForm one = form1(1, 1);
    Extension x1 = extend_boundary_iso(boundary_iso_of_isometry(one, one, M(1, 1, {1})));
    CHECK(abs(det(x1.h)) == 1);
    REQUIRE(x1.homotopy);
    CHECK(verify_homotopy(x1.homotopy->source, x1.homotopy->target, x1.homotopy->f, x1.homotopy->g,
                          x1.homotopy->delta));

    // splitting maps of random embeddings, then extended back
    std::mt19937_64 g(8);
    int found = 0, total = 0;
    for (int t = 0; t < 40; ++t) {
        int e = t % 2 ? 1 : -1;
        QuadraticForm m = oracle::random_simple_form(g, 1 + g() % 2, e);
        Matrix j = oracle::random_primitive(g, m.rank(), 1 + g() % (m.rank() - 1));
        SplitEmbedding s = split_embedding(m, j);
        Extension x = extend_boundary_iso(s.fj);
        ++total;
        CHECK(is_isometry(direct_sum(s.fj.src, hyperbolic(s.fj.tgt.rank(), e)), direct_sum(s.fj.tgt, x.glued), x.h));
        if (x.homotopy) {
            ++found;
            CHECK(verify_homotopy(x.homotopy->source, x.homotopy->target, x.homotopy->f, x.homotopy->g,
                                  x.homotopy->delta));
        }
    }
    CHECK(found == total);
}

TEST_CASE("quasi-formations, boundaries of asymmetric forms and b") {
    QuasiFormation d3 = boundary_of_asymmetric(M(1, 1, {3}), 1);
    CHECK(d3.V == M(2, 1, {1, 3}));
    CHECK(quasi_failure(d3).empty());
    QuasiFormation d0 = boundary_of_asymmetric(M(1, 1, {0}), 1);
    CHECK(d0.V == d0.L);

    Matrix rho = M(2, 2, {0, 1, 0, 0});
    QuasiFormation dm = boundary_of_asymmetric(rho, -1);
    CHECK(dm.form.rank() == 4);
    BoundaryPair bm = b_invariant(dm);
    CHECK(q_equal(bm.v.theta, rho, -1));

    QuasiFormation d5 = boundary_of_asymmetric(M(1, 1, {5}), 1);
    BoundaryPair b5 = b_invariant(d5);
    CHECK(b5.v.theta == M(1, 1, {5}));
    CHECK(is_isometric(b5.vperp, form1(5, 1)).verdict == Verdict::Yes);
    BoundaryPair bf = b_invariant(t_flip(d5));
    CHECK(bf.v.theta == M(1, 1, {-5}));
    CHECK(is_isometric(bf.vperp, form1(-5, 1)).verdict == Verdict::Yes);

    QuasiFormation tt = t_flip(t_flip(d5));
    CHECK(tt.form.theta == d5.form.theta);

    // trivial formation (H(P); P, P): both components are zero forms
    BoundaryPair b0 = b_invariant(d0);
    CHECK(b0.v.theta.is_zero());
    CHECK(b0.vperp.theta.is_zero());

    // additivity
    BoundaryPair bs = b_invariant(direct_sum(d5, d3));
    CHECK(bs.v.theta == M(2, 2, {5, 0, 0, 3}));

    // malformed: L not lagrangian
    QuasiFormation bad = d3;
    bad.L = M(2, 1, {1, 1});
    CHECK_FALSE(quasi_failure(bad).empty());
    CHECK_THROWS_AS(b_invariant(bad), InvalidInput);
}

TEST_CASE("elementary representatives") {
    QuasiFormation d3 = boundary_of_asymmetric(M(1, 1, {3}), 1);
    ElementaryVerdict v3 = is_elementary_representative(d3);
    REQUIRE(v3.verdict == Verdict::Yes);
    CHECK(v3.cert->rho == M(1, 1, {3}));
    CHECK(verify_certificate(d3, *v3.cert));

    QuasiFormation skew{hyperbolic(1, -1), M(2, 1, {1, 0}), M(2, 1, {1, 1}), 0};
    ElementaryVerdict vs = is_elementary_representative(skew);
    REQUIRE(vs.verdict == Verdict::Yes);
    CHECK(vs.cert->rho == M(1, 1, {1}));

    // (H(Z); L, L) is literally delta(Z, 0)
    QuasiFormation ll{hyperbolic(1, 1), M(2, 1, {1, 0}), M(2, 1, {1, 0}), 0};
    ElementaryVerdict vl = is_elementary_representative(ll);
    REQUIRE(vl.verdict == Verdict::Yes);
    CHECK(vl.cert->rho == M(1, 1, {0}));

    // L = span f, V = span(2e + f): [L|V] has det -2 but the partner e complements V
    QuasiFormation viaPartner{hyperbolic(1, 1), M(2, 1, {0, 1}), M(2, 1, {2, 1}), 0};
    CHECK(is_elementary_representative(viaPartner).verdict == Verdict::Yes);
    // V = span(2e1 + f2, e2): meets L, and has index 2 against L*
    QuasiFormation no2{hyperbolic(2, 1), M(4, 2, {1, 0, 0, 1, 0, 0, 0, 0}), M(4, 2, {2, 0, 0, 1, 0, 0, 1, 0}),
                       0};
    ElementaryVerdict vn = is_elementary_representative(no2);
    CHECK(vn.verdict == Verdict::No);

    // random deltas always certify with the original rho
    std::mt19937_64 g(9);
    for (int t = 0; t < 50; ++t) {
        int e = t % 2 ? 1 : -1;
        std::size_t k = 1 + g() % 3;
        Matrix r = oracle::random_matrix(g, k, k, -4, 4);
        QuasiFormation d = boundary_of_asymmetric(r, e);
        ElementaryVerdict ev = is_elementary_representative(d);
        REQUIRE(ev.verdict == Verdict::Yes);
        CHECK(ev.cert->rho == r);
    }
}

TEST_CASE("lagrangian partners") {
    std::mt19937_64 g(10);
    for (int t = 0; t < 40; ++t) {
        int e = t % 2 ? 1 : -1;
        std::size_t k = 1 + g() % 3;
        QuadraticForm h = hyperbolic(k, e);
        Matrix U = oracle::random_unimodular(g, 2 * k);
        QuadraticForm m = restrict_to(h, inverse(U));  // U : h -> m
        Matrix L = U * vcat({Matrix::identity(Z, k), Matrix(Z, k, k)});
        REQUIRE(is_lagrangian(m, L));
        Matrix W = lagrangian_partner_right(m, L);
        CHECK(is_lagrangian(m, W));
        CHECK(L.T() * m.lambda() * W == Matrix::identity(Z, k));
        Matrix E = lagrangian_partner_left(m, L);
        CHECK(is_lagrangian(m, E));
        CHECK(E.T() * m.lambda() * L == Matrix::identity(Z, k));
        CHECK(is_isometry(h, m, hcat({L, W})));
    }
}
