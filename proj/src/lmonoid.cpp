#include "qform/lmonoid.hpp"

#include <functional>
#include <sstream>

namespace qform {

namespace {

Matrix I(const Ring& r, std::size_t n) { return Matrix::identity(r, n); }

bool is_prime(const Int& n) { return n >= 2 && mpz_probab_prime_p(n.get_mpz_t(), 30) > 0; }

std::string str(const Int& x) { return x.get_str(); }

// Integer points of [-R,R]^k with sup-norm exactly R, in lexicographic order.
template <class F>
bool for_shell(std::size_t k, long R, F&& f) {
    std::vector<long> t(k);
    std::function<bool(std::size_t, bool)> rec = [&](std::size_t i, bool hit) -> bool {
        if (i == k) return (hit || R == 0) && f(t);
        for (long v = -R; v <= R; ++v) {
            t[i] = v;
            if (rec(i + 1, hit || v == R || v == -R)) return true;
        }
        return false;
    };
    return rec(0, false);
}

Matrix reduced(const Matrix& B) { return B.cols() > 1 ? lll_reduce(B) : B; }

// v minus the lattice vector of span(B) nearest in least squares (coefficients rounded).
Matrix size_reduce(const Matrix& v, const Matrix& B) {
    if (B.cols() == 0) return v;
    auto G = rational_inverse(B.T() * B);
    Matrix Bv = B.T() * v;
    Matrix t(Ring::Z(), B.cols(), 1);
    for (std::size_t i = 0; i < B.cols(); ++i) {
        Rat c = 0;
        for (std::size_t j = 0; j < B.cols(); ++j) c += G[i][j] * Bv(j, 0);
        Rat h = c + Rat(1, 2);
        Int q = h.get_num() / h.get_den();
        if (h.get_num() < 0 && q * h.get_den() != h.get_num()) q -= 1;
        t.set(i, 0, q);
    }
    return v - B * t;
}

// phi-isotropic complement of the half-rank summand V of (Z^n, phi), phi unimodular skew.
Matrix isotropic_complement(const Matrix& phi, const Matrix& V, const Budget& bud, std::uint64_t& spent) {
    const Ring Z = Ring::Z();
    const std::size_t n = phi.rows(), m = V.cols();
    if (m == 0) return Matrix(Z, n, 0);
    // lead with a radical vector of phi|V when there is one
    Matrix Vb = V;
    Matrix Kr = kernel(V.T() * phi * V);
    if (Kr.cols() > 0) Vb = V * complete_basis(Kr.col(0));
    Matrix x = Vb.col(0);
    Matrix e1(Z, m, 1);
    e1.set(0, 0, 1);
    Matrix A = Vb.T() * phi;
    auto w0 = solve(A, e1);
    if (!w0) throw std::logic_error("skew complement: V is not a direct summand");
    Matrix Kp = reduced(kernel(A));
    *w0 = size_reduce(*w0, Kp);
    std::optional<Matrix> w;
    for (long R = 0; R <= bud.box + 2 && !w; ++R)
        for_shell(Kp.cols(), R, [&](const std::vector<long>& t) {
            if (++spent > bud.nodes) throw BudgetExceeded("skew complement: search budget exhausted");
            Matrix c = *w0;
            for (std::size_t i = 0; i < t.size(); ++i)
                if (t[i]) c = c + Kp.col(i) * Int(t[i]);
            if (!is_primitive(hcat({Vb, c}))) return false;
            w = c;
            return true;
        });
    if (!w) throw BudgetExceeded("skew complement: no primitive partner in the search box");
    Matrix P = hcat({x, *w});
    Matrix Pp = reduced(kernel(P.T() * phi));
    Matrix Vpp(Z, Pp.cols(), 0);
    for (std::size_t i = 1; i < m; ++i) {
        Matrix v = Vb.col(i);
        Int beta = (x.T() * phi * v)(0, 0);  // phi(x, w) = 1
        auto c = solve(Pp, v - *w * beta);
        if (!c) throw std::logic_error("skew complement: reduction left the complement");
        Vpp = hcat({Vpp, *c});
    }
    Matrix Wpp = isotropic_complement(Pp.T() * phi * Pp, Vpp, bud, spent);
    return reduced(hcat({*w, Pp * Wpp}));
}

Int mu(const QuadraticForm& m, const Matrix& w) { return (w.T() * m.theta * w)(0, 0); }

// Two elements x, y of order 2 spanning a copy of the boundary of (Z^2, [[0,2],[0,0]]).
std::optional<std::pair<std::vector<Int>, std::vector<Int>>> u2_summand(const LinkingForm& g) {
    std::vector<std::vector<Int>> order2{{}};
    for (auto& d : g.factors) {
        std::vector<std::vector<Int>> next;
        for (auto& e : order2) {
            auto a = e;
            a.push_back(0);
            next.push_back(a);
            if (d % 2 == 0) {
                auto b = e;
                b.push_back(d / 2);
                next.push_back(b);
            }
        }
        order2 = std::move(next);
    }
    for (auto& x : order2)
        for (auto& y : order2)
            if (g.phi(x, x) == 0 && g.phi(y, y) == 0 && g.phi(x, y) == Rat(1, 2)) return std::make_pair(x, y);
    return std::nullopt;
}

}  // namespace

const char* to_string(OrbitStatus s) {
    switch (s) {
        case OrbitStatus::IsIdentityOrbit: return "IsIdentityOrbit";
        case OrbitStatus::NontrivialOrbit: return "NontrivialOrbit";
        default: return "Unknown";
    }
}

const char* to_string(CancellationRule r) {
    switch (r) {
        case CancellationRule::Indefinite_i: return "Indefinite_i";
        case CancellationRule::NamedLattice_ii: return "NamedLattice_ii";
        case CancellationRule::PrimeRank1_iii: return "PrimeRank1_iii";
        case CancellationRule::Empirical: return "Empirical";
        default: return "Unknown";
    }
}

// ---------------------------------------------------------------- delta and kappa

DeltaClass delta_of_iso(const BoundaryIso& f, const Budget& bud) {
    DeltaClass d;
    d.v = f.src;
    d.vprime = f.tgt;
    d.representative = descend(f);
    if (f.src.eps == -1) {
        d.evidence = "skew boundaries: descent is not injective (K_theta), orbit left undecided";
        return d;
    }
    BIsoOrbits o;
    try {
        o = biso_orbits(f.src, f.tgt, 10000, 100000, bud);
    } catch (const BudgetExceeded& e) {
        d.evidence = e.what();
        return d;
    }
    std::size_t at = o.find(normalize(s_boundary(f.tgt), d.representative));
    std::ostringstream ev;
    ev << o.count() << " orbit(s) on " << o.isos.size() << " boundary isometries";
    if (o.identity_orbit && at == *o.identity_orbit) {
        d.status = OrbitStatus::IsIdentityOrbit;
        ev << "; representative lies in the orbit of boundaries of isometries";
    } else if (o.status == Verdict::Yes) {
        d.status = OrbitStatus::NontrivialOrbit;
        ev << "; representative lies in orbit " << at;
    } else {
        ev << "; automorphism groups not fully enumerated";
    }
    d.evidence = ev.str();
    return d;
}

DeltaClass delta_invariant(const QuasiFormation& x, const Budget& bud) {
    validate(x);
    if (!x.form.ring.is_Z()) throw InvalidInput("delta: only implemented over Z");
    BoundaryPair bp = b_invariant(x);
    if (bp.v.lambda().is_zero() && bp.vperp.lambda().is_zero() && q_equal(bp.v.theta, Matrix(x.form.ring, bp.v.rank(), bp.v.rank()), x.form.eps)) {
        DeltaClass d;
        d.v = bp.v;
        d.vprime = bp.vperp;
        d.representative = Matrix(Ring::Z(), 0, 0);
        d.status = OrbitStatus::IsIdentityOrbit;
        d.evidence = "zero boundaries: every boundary isomorphism is homotopic to the identity";
        return d;
    }
    if (det(bp.v.lambda()) == 0) throw InvalidInput("delta: degenerate boundary (split off the radical first)");
    SplitEmbedding s = split_embedding(x.form, x.V);
    return delta_of_iso(s.fj, bud);
}

KappaValue kappa(const BoundaryIso& f) {
    QuadraticForm u = union_form(f);
    KappaValue k;
    k.eps = f.src.eps;
    if (k.eps == 1) k.value = signature(u.lambda());
    else k.value = arf_invariant(u);
    return k;
}

QuasiFormation e_of(const QuadraticForm& v) { return boundary_of_asymmetric(v.theta, v.eps); }

// ---------------------------------------------------------------- stable isometry

StableIsoResult stably_isometric(const QuadraticForm& v, const QuadraticForm& vp, std::size_t stab_cap,
                                 const Budget& bud) {
    StableIsoResult r;
    if (v.eps != vp.eps || v.ring != vp.ring) throw InvalidInput("stably_isometric: ring/epsilon mismatch");
    if (v.rank() != vp.rank()) {
        r.verdict = Verdict::No;
        r.witness = "rank";
        return r;
    }
    if (v.ring.is_Z()) {
        Matrix L = v.lambda(), Lp = vp.lambda();
        if (rank(L) != rank(Lp)) {
            r.verdict = Verdict::No;
            r.witness = "rank of the symmetrization";
            return r;
        }
        if (v.eps == 1 && signature(L) != signature(Lp)) {
            r.verdict = Verdict::No;
            r.witness = "signature";
            return r;
        }
        if (det(L) != 0) {
            LinkingForm a = s_boundary(v), b = s_boundary(vp);
            if (a.order() != b.order()) {
                r.verdict = Verdict::No;
                r.witness = "boundary linking form (order)";
                return r;
            }
            try {
                if (enumerate_isometries(a, b).empty()) {
                    r.verdict = Verdict::No;
                    r.witness = "boundary linking form";
                    return r;
                }
            } catch (const BudgetExceeded&) {
            }
        }
    }
    for (std::size_t k = 0; k <= stab_cap; ++k) {
        QuadraticForm h = hyperbolic(k, v.eps, v.ring);
        IsoResult t = is_isometric(direct_sum(v, h), direct_sum(vp, h), bud);
        if (t.verdict == Verdict::Yes) {
            r.verdict = Verdict::Yes;
            r.k = k;
            r.map = t.map;
            return r;
        }
    }
    r.witness = "no isometry found up to the stabilisation cap";
    return r;
}

// ---------------------------------------------------------------- strict cancellation

CancellationVerdict strict_cancellation_check(const QuadraticForm& v, const Budget& bud) {
    if (!v.ring.is_Z() || v.eps != 1) throw InvalidInput("cancel-check: needs a +1-quadratic form over Z");
    Matrix L = v.lambda();
    if (v.rank() == 0 || det(L) == 0) throw InvalidInput("cancel-check: form is degenerate");
    CancellationVerdict out;
    auto& ev = out.evidence;
    const std::size_t r = v.rank();

    if (r == 1 && is_prime(abs(v.theta(0, 0)))) {
        out.holds = true;
        out.rule = CancellationRule::PrimeRank1_iii;
        ev.push_back("rank 1 with theta = " + str(v.theta(0, 0)) + ", |theta| prime");
        return out;
    }

    Inertia in = inertia(L);
    if (in.pos == 0 || in.neg == 0) {
        for (const char* name : {"E8", "E7", "E6", "D5", "A4"}) {
            QuadraticForm nl = named_lattice(name);
            if (nl.rank() != r) continue;
            for (int sgn : {1, -1}) {
                QuadraticForm w = sgn == 1 ? v : negate(v);
                IsoResult t = is_isometric(nl, w, bud);
                if (t.verdict == Verdict::Yes) {
                    out.holds = true;
                    out.rule = CancellationRule::NamedLattice_ii;
                    ev.push_back(std::string("symmetrization isometric to ") + (sgn == 1 ? "" : "-") + name +
                                 " via a verified isometry");
                    return out;
                }
            }
        }
        ev.push_back("definite and not one of E8, E7, E6, D5, A4");
    } else {
        ev.push_back("indefinite: inertia (" + std::to_string(in.pos) + "," + std::to_string(in.neg) + ")");
        LinkingForm g = s_boundary(v);
        bool ok = true;
        for (auto& p : prime_divisors(g.order())) {
            std::size_t lp = min_generators(g.factors, p);
            if (p == 2) continue;
            std::string line = "rk " + std::to_string(r) + " >= l_" + str(p) + " + 2 = " + std::to_string(lp + 2);
            if (r < lp + 2) {
                ok = false;
                ev.push_back("fails: " + line);
            } else {
                ev.push_back(line);
            }
        }
        std::size_t l2 = min_generators(g.factors, 2);
        if (ok && r == l2) {
            auto u = u2_summand(g);
            if (u) ev.push_back("rk = l_2; found a summand isometric to the boundary of (Z^2,[[0,2],[0,0]])");
            else {
                ok = false;
                ev.push_back("fails: rk = l_2 and no summand isometric to the boundary of (Z^2,[[0,2],[0,0]])");
            }
        } else if (ok) {
            ev.push_back("rk " + std::to_string(r) + " != l_2 = " + std::to_string(l2));
        }
        if (ok) {
            out.holds = true;
            out.rule = CancellationRule::Indefinite_i;
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------- skew certificate

Matrix skew_elementary_certificate(const QuasiFormation& x, const Budget& bud) {
    validate(x);
    const QuadraticForm& M = x.form;
    if (!M.ring.is_Z() || M.eps != -1) throw InvalidInput("skew certificate: needs a -1-quasi-formation over Z");
    Matrix phi = M.lambda();
    std::uint64_t spent = 0;
    Matrix W = isotropic_complement(phi, x.V, bud, spent);
    const std::size_t k = W.cols();
    if (!(W.T() * phi * W).is_zero() || !is_unit_det(hcat({W, x.V})))
        throw std::logic_error("skew certificate: reduction did not produce an isotropic complement");

    // mu is linear mod 2 on W; arrange mu(w_1) = 1 and mu(w_i) = 0 for i > 1
    std::vector<std::size_t> odd;
    for (std::size_t i = 0; i < k; ++i)
        if (mu(M, W.col(i)) % 2 != 0) odd.push_back(i);
    if (odd.empty()) return W;
    std::vector<Matrix> cols;
    Matrix w1 = W.col(odd[0]);
    cols.push_back(w1);
    for (std::size_t i = 0; i < k; ++i) {
        if (i == odd[0]) continue;
        Matrix c = W.col(i);
        if (mu(M, c) % 2 != 0) c = c - w1;
        cols.push_back(c);
    }
    W = hcat(cols);
    // v_1 in V dual to w_1
    Matrix e1(M.ring, k, 1);
    e1.set(0, 0, 1);
    auto c = solve(W.T() * phi.T() * x.V, e1);
    if (!c) throw std::logic_error("skew certificate: V and W are not dual");
    Matrix v1 = x.V * *c;
    if (mu(M, v1) % 2 != 0) {
        std::ostringstream os;
        os << "skew certificate: refinement of the dual vector is odd; V=" << x.V.str() << " W=" << W.str()
           << " v1=" << v1.str();
        throw std::logic_error(os.str());
    }
    W.paste(0, 0, w1 + v1);
    if (!is_lagrangian(M, W) || !is_unit_det(hcat({W, x.V})))
        throw std::logic_error("skew certificate: corrected complement failed verification");
    return W;
}

// ---------------------------------------------------------------- stabilisation

Matrix boundary_stable_isometry(const QuasiFormation& x) {
    validate(x);
    SplitEmbedding s = split_embedding(x.form, x.V);
    Extension e = extend_boundary_iso(s.fj, {}, false);
    const std::size_t r = s.jperp.cols();
    Matrix g = hcat({x.L, lagrangian_partner_right(x.form, x.L)});  // H(M/2) -> M
    Matrix iso = block_diag({I(x.form.ring, r), inverse(g) * s.rj}) * e.h;
    QuadraticForm h = hyperbolic(x.form.rank() / 2, x.form.eps, x.form.ring);
    if (!is_isometry(direct_sum(s.v, hyperbolic(r, x.form.eps, x.form.ring)), direct_sum(negate(s.vperp), h), iso))
        throw std::logic_error("boundary isometry failed verification");
    return iso;
}

StabilizeResult stabilize_until_elementary(const QuasiFormation& x, std::size_t k_max, const Budget& bud) {
    validate(x);
    const QuadraticForm& M = x.form;
    StabilizeResult out;
    if (M.ring.is_field()) {
        FieldCertificate fc = field_elementary_certificate(x, bud);
        out.stabilized = x;
        out.verdict = fc.verdict;
        out.cert = fc.cert;
        out.route = "lagrangian complement over a field";
        return out;
    }
    if (!M.ring.is_Z()) throw InvalidInput("stabilize: ring not supported");
    if (M.eps == -1) {
        Matrix K = skew_elementary_certificate(x, bud);
        out.stabilized = x;
        out.cert = certificate_from_complement(x, K);
        if (!out.cert) throw std::logic_error("stabilize: skew complement gave no certificate");
        out.verdict = Verdict::Yes;
        out.route = "skew lagrangian complement";
        return out;
    }
    try {
        out.delta = delta_invariant(x, bud);
    } catch (const std::exception&) {
        out.delta.reset();
    }
    for (std::size_t k = 0; k <= k_max; ++k) {
        QuasiFormation y = k == 0 ? x : direct_sum(x, e_of(hyperbolic(k, 1)));
        out.k = k;
        out.stabilized = y;
        ElementaryVerdict ev = is_elementary_representative(y);
        if (ev.verdict == Verdict::Yes) {
            out.verdict = Verdict::Yes;
            out.cert = ev.cert;
            out.route = "representative: " + ev.route;
            return out;
        }
        BoundaryPair bp = b_invariant(y);
        if (det(bp.v.lambda()) == 0) continue;
        CancellationVerdict cv = strict_cancellation_check(bp.v, bud);
        if (cv.holds) {
            out.verdict = Verdict::Yes;
            out.cancellation = cv;
            out.boundary_isometry = boundary_stable_isometry(x);
            out.route = "strict cancellation of the stabilised boundary";
            return out;
        }
    }
    out.verdict = Verdict::Unknown;
    out.route = "stabilisation cap reached";
    return out;
}

std::string stabilize_failure(const QuasiFormation& x, const StabilizeResult& r) {
    if (r.verdict != Verdict::Yes) return "no certificate";
    if (x.form.ring.is_Z() && x.form.eps == 1) {
        QuasiFormation y = r.k == 0 ? x : direct_sum(x, e_of(hyperbolic(r.k, 1)));
        if (y.form.theta != r.stabilized.form.theta || y.V != r.stabilized.V || y.L != r.stabilized.L)
            return "stabilised quasi-formation does not match k";
    }
    if (r.cert) return verify_certificate(r.stabilized, *r.cert) ? "" : "certificate does not verify";
    if (!r.cancellation || !r.boundary_isometry) return "missing evidence";
    CancellationVerdict again = strict_cancellation_check(b_invariant(r.stabilized).v);
    if (!again.holds || again.rule != r.cancellation->rule) return "cancellation rule does not re-verify";
    SplitEmbedding s = split_embedding(x.form, x.V);
    const std::size_t rr = s.jperp.cols();
    if (!is_isometry(direct_sum(s.v, hyperbolic(rr, 1)), direct_sum(negate(s.vperp), hyperbolic(x.form.rank() / 2, 1)),
                     *r.boundary_isometry))
        return "boundary isometry does not verify";
    return {};
}

// ---------------------------------------------------------------- fields

FieldCertificate field_elementary_certificate(const QuasiFormation& x, const Budget& bud) {
    validate(x);
    const QuadraticForm& M = x.form;
    const Ring& R = M.ring;
    if (!R.is_field()) throw InvalidInput("field certificate: ring is not a field");
    const std::size_t n = M.rank(), h = n / 2;
    FieldCertificate out;
    if (auto c = certificate_from_complement(x, lagrangian_partner_right(M, x.L), x.L)) {
        out.verdict = Verdict::Yes;
        out.cert = c;
        return out;
    }
    Matrix phi = M.lambda();
    // isotropic, refinement-free vectors
    std::vector<Matrix> pool;
    std::vector<Int> v(n, 0);
    const Int p = R.mod;
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= p.get_ui();
    if (total > bud.nodes) throw BudgetExceeded("field certificate: ambient space too large");
    for (std::uint64_t idx = 1; idx < total; ++idx) {
        std::uint64_t t = idx;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = Int(static_cast<unsigned long>(t % p.get_ui()));
            t /= p.get_ui();
        }
        Matrix c = Matrix::column(R, v);
        if (q_equal(c.T() * M.theta * c, Matrix(R, 1, 1), M.eps)) pool.push_back(c);
    }
    std::uint64_t spent = 0;
    std::vector<std::size_t> pick;
    std::function<bool(std::size_t)> rec = [&](std::size_t from) -> bool {
        if (pick.size() == h) {
            std::vector<Matrix> cs;
            for (auto i : pick) cs.push_back(pool[i]);
            if (auto c = certificate_from_complement(x, hcat(cs))) {
                out.cert = c;
                return true;
            }
            return false;
        }
        for (std::size_t i = from; i < pool.size(); ++i) {
            if (++spent > bud.nodes) throw BudgetExceeded("field certificate: search budget exhausted");
            bool ok = true;
            for (auto j : pick) ok = ok && (pool[j].T() * phi * pool[i])(0, 0) == 0;
            if (!ok) continue;
            std::vector<Matrix> cs{x.V};
            for (auto j : pick) cs.push_back(pool[j]);
            cs.push_back(pool[i]);
            if (rank(hcat(cs)) != h + pick.size() + 1) continue;
            pick.push_back(i);
            if (rec(i + 1)) return true;
            pick.pop_back();
        }
        return false;
    };
    try {
        out.verdict = rec(0) ? Verdict::Yes : Verdict::No;
    } catch (const BudgetExceeded&) {
        out.verdict = Verdict::Unknown;
    }
    if (out.verdict == Verdict::No) out.verdict = Verdict::Unknown;  // no complement in this representative
    return out;
}

// ---------------------------------------------------------------- union route

std::optional<GluedQuasiFormation> quasi_formation_from_iso(const BoundaryIso& f, const Budget& bud) {
    if (f.src.rank() != f.tgt.rank()) throw InvalidInput("glue: boundary components differ in rank");
    QuadraticForm u = union_form(f);
    const std::size_t n = f.src.rank();
    WittResult w;
    for (Budget wb = bud; wb.box <= bud.box + 8; ++wb.box) {
        w = witt_index_lower_bound(u, wb);
        if (2 * w.index == u.rank()) break;
    }
    if (2 * w.index != u.rank()) return std::nullopt;
    std::vector<Matrix> es;
    for (std::size_t i = 0; i < w.index; ++i) es.push_back(w.pairs.col(2 * i));
    Matrix L = hcat(es);
    Matrix V = vcat({I(u.ring, n), Matrix(u.ring, n, n)});
    GluedQuasiFormation g{{u, L, V, 0}, Matrix()};
    validate(g.x);
    NormalForm nf = normal_form(f);
    g.jperp = vcat({nf.b, -f.tgt.lambda()});
    return g;
}

}  // namespace qform
