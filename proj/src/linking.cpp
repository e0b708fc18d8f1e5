#include "qform/linking.hpp"

#include <functional>
#include <map>
#include <numeric>

namespace qform {

namespace {

Int pmod(const Int& a, const Int& m) {
    Int r = a % m;
    if (r < 0) r += m;
    return r;
}

bool is_integer(const Rat& x) { return x.get_den() == 1; }

std::string key(const Matrix& m) { return m.str(); }

struct UnionFind {
    std::vector<std::size_t> p;
    explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    std::size_t find(std::size_t x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { p[find(a)] = find(b); }
};

}  // namespace

Rat mod1(const Rat& x) {
    Rat r(x);
    r.canonicalize();
    Int fl;
    mpz_fdiv_q(fl.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    Rat out = r - Rat(fl);
    out.canonicalize();
    return out;
}

Int LinkingForm::order() const {
    Int o = 1;
    for (auto& d : factors) o *= d;
    return o;
}

Rat LinkingForm::phi(const std::vector<Int>& x, const std::vector<Int>& y) const {
    Rat s = 0;
    for (std::size_t i = 0; i < gens(); ++i) {
        if (x[i] == 0) continue;
        for (std::size_t j = 0; j < gens(); ++j)
            if (y[j] != 0) s += Rat(x[i] * y[j]) * pairing[i][j];
    }
    return mod1(s);
}

Rat LinkingForm::nu(const std::vector<Int>& x) const {
    if (refinement.empty()) return 0;
    Rat s = 0;
    for (std::size_t i = 0; i < gens(); ++i) {
        if (x[i] == 0) continue;
        s += Rat(x[i] * x[i]) * refinement[i];
        for (std::size_t j = i + 1; j < gens(); ++j)
            if (x[j] != 0) s += Rat(x[i] * x[j]) * pairing[i][j];
    }
    return mod1(s);
}

std::string linking_failure(const LinkingForm& g) {
    const std::size_t k = g.gens();
    if (g.eps != 1 && g.eps != -1) return "epsilon must be +1 or -1";
    if (g.pairing.size() != k) return "pairing has wrong size";
    for (auto& row : g.pairing)
        if (row.size() != k) return "pairing has wrong size";
    if (g.eps == 1 && g.refinement.size() != k) return "refinement has wrong size";
    if (g.eps == -1 && !g.refinement.empty()) return "skew linking forms carry no refinement";
    for (std::size_t i = 0; i < k; ++i) {
        if (g.factors[i] < 2) return "invariant factor below 2";
        if (i + 1 < k && g.factors[i + 1] % g.factors[i] != 0) return "invariant factors do not divide";
        for (std::size_t j = 0; j < k; ++j) {
            if (!is_integer(g.pairing[i][j] - Rat(g.eps) * g.pairing[j][i])) return "pairing not eps-symmetric";
            if (!is_integer(Rat(g.factors[i]) * g.pairing[i][j])) return "pairing not defined on the presentation";
        }
        if (g.eps == 1) {
            if (!is_integer(Rat(2) * g.refinement[i] - g.pairing[i][i])) return "refinement does not lift the pairing";
            if (!is_integer(Rat(g.factors[i] * g.factors[i]) * g.refinement[i])) return "refinement not defined on the presentation";
        }
    }
    return {};
}

std::vector<Int> SBoundary::coords(const Matrix& y) const {
    Matrix c = Ui * y;
    std::vector<Int> out;
    for (std::size_t i = 0; i < index.size(); ++i) out.push_back(pmod(c(index[i], 0), form.factors[i]));
    return out;
}

SBoundary s_boundary_data(const QuadraticForm& v) {
    if (!v.ring.is_Z()) throw InvalidInput("S-boundary: only defined over Z");
    Matrix lam = v.lambda();
    if (det(lam) == 0) throw InvalidInput("S-boundary: form is degenerate");
    SNF s = smith(lam);
    SBoundary b;
    b.Ui = s.Ui;
    b.form.eps = v.eps;
    auto d = s.diagonal();
    for (std::size_t i = 0; i < d.size(); ++i)
        if (abs(d[i]) > 1) b.index.push_back(i);
    const std::size_t k = b.index.size(), n = v.rank();
    b.gens = Matrix(v.ring, n, k);
    b.lifts = Matrix(v.ring, n, k);
    for (std::size_t i = 0; i < k; ++i) {
        b.form.factors.push_back(abs(d[b.index[i]]));
        b.gens.paste(0, i, s.U.col(b.index[i]));
        b.lifts.paste(0, i, s.Wi.col(b.index[i]));
    }
    b.form.pairing.assign(k, std::vector<Rat>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            b.form.pairing[i][j] = mod1(Rat((b.gens.col(i).T() * b.lifts.col(j))(0, 0), b.form.factors[j]));
    if (v.eps == 1)
        for (std::size_t i = 0; i < k; ++i) {
            Matrix z = b.lifts.col(i);
            Int dd = b.form.factors[i] * b.form.factors[i];
            b.form.refinement.push_back(mod1(Rat((z.T() * v.theta * z)(0, 0), dd)));
        }
    if (auto m = linking_failure(b.form); !m.empty()) throw std::logic_error("S-boundary: " + m);
    return b;
}

LinkingForm s_boundary(const QuadraticForm& v) { return s_boundary_data(v).form; }

Matrix normalize(const LinkingForm& tgt, const Matrix& m) {
    Matrix out(Ring::Z(), m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out.set(i, j, pmod(m(i, j), tgt.factors[i]));
    return out;
}

std::string linking_iso_failure(const LinkingForm& a, const LinkingForm& b, const Matrix& m) {
    if (m.rows() != b.gens() || m.cols() != a.gens()) return "shape mismatch";
    if (a.eps != b.eps) return "epsilon mismatch";
    if (a.order() != b.order()) return "group orders differ";
    std::vector<std::vector<Int>> img(a.gens());
    for (std::size_t i = 0; i < a.gens(); ++i) {
        img[i] = m.column_vector(i);
        for (std::size_t r = 0; r < b.gens(); ++r)
            if ((a.factors[i] * img[i][r]) % b.factors[r] != 0) return "not a homomorphism on the presentation";
    }
    for (std::size_t i = 0; i < a.gens(); ++i) {
        for (std::size_t j = 0; j < a.gens(); ++j)
            if (b.phi(img[i], img[j]) != mod1(a.pairing[i][j])) return "pairing not preserved";
        if (a.eps == 1 && b.nu(img[i]) != mod1(a.refinement[i])) return "refinement not preserved";
    }
    // a nondegenerate pairing is preserved, so the map is injective; equal orders make it bijective
    return {};
}

bool is_linking_iso(const LinkingForm& a, const LinkingForm& b, const Matrix& m) {
    return linking_iso_failure(a, b, m).empty();
}

Matrix compose_linking(const LinkingForm& tgt, const Matrix& g, const Matrix& f) { return normalize(tgt, g * f); }

Matrix identity_linking(const LinkingForm& a) { return Matrix::identity(Ring::Z(), a.gens()); }

std::vector<Matrix> enumerate_isometries(const LinkingForm& a, const LinkingForm& b, std::uint64_t order_cap) {
    if (a.eps != b.eps || a.order() != b.order()) return {};
    if (b.order() > Int(static_cast<unsigned long>(order_cap)))
        throw BudgetExceeded("linking isometry enumeration: group order exceeds cap");
    const std::size_t k = a.gens(), kp = b.gens();
    // all elements of G'
    std::vector<std::vector<Int>> elems{{}};
    for (std::size_t r = 0; r < kp; ++r) {
        std::vector<std::vector<Int>> next;
        for (auto& e : elems)
            for (Int t = 0; t < b.factors[r]; ++t) {
                auto x = e;
                x.push_back(t);
                next.push_back(std::move(x));
            }
        elems = std::move(next);
    }
    std::vector<std::vector<std::size_t>> cand(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t e = 0; e < elems.size(); ++e) {
            bool ok = true;
            for (std::size_t r = 0; r < kp && ok; ++r) ok = (a.factors[i] * elems[e][r]) % b.factors[r] == 0;
            if (!ok) continue;
            if (b.phi(elems[e], elems[e]) != mod1(a.pairing[i][i])) continue;
            if (a.eps == 1 && b.nu(elems[e]) != mod1(a.refinement[i])) continue;
            cand[i].push_back(e);
        }
    std::vector<Matrix> out;
    std::vector<std::size_t> pick(k);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == k) {
            Matrix m(Ring::Z(), kp, k);
            for (std::size_t c = 0; c < k; ++c)
                for (std::size_t r = 0; r < kp; ++r) m.set(r, c, elems[pick[c]][r]);
            out.push_back(m);
            return;
        }
        for (auto e : cand[i]) {
            bool ok = true;
            for (std::size_t j = 0; j < i && ok; ++j)
                ok = b.phi(elems[pick[j]], elems[e]) == mod1(a.pairing[j][i]);
            if (!ok) continue;
            pick[i] = e;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

Matrix descend(const BoundaryIso& f, const SBoundary& src, const SBoundary& tgt) {
    const std::size_t n = f.src.rank(), np = f.tgt.rank();
    Matrix aiT = inverse(f.f.alpha).T();
    Matrix m(Ring::Z(), tgt.form.gens(), src.form.gens());
    for (std::size_t i = 0; i < src.form.gens(); ++i) {
        Matrix g(Ring::Z(), n + f.p, 1);
        g.paste(0, 0, src.gens.col(i));
        Matrix y = (aiT * g).rows_range(0, np);  // the P'-part lies in the image of mu'
        auto c = tgt.coords(y);
        for (std::size_t r = 0; r < c.size(); ++r) m.set(r, i, c[r]);
    }
    if (auto msg = linking_iso_failure(src.form, tgt.form, m); !msg.empty())
        throw std::logic_error("descend: " + msg);
    return m;
}

Matrix descend(const BoundaryIso& f) {
    if (!verify(f)) throw InvalidInput("descend: not a stable boundary isomorphism");
    return descend(f, s_boundary_data(f.src), s_boundary_data(f.tgt));
}

std::size_t BIsoOrbits::find(const Matrix& m) const {
    for (std::size_t i = 0; i < isos.size(); ++i)
        if (isos[i] == m) return orbit_of[i];
    throw std::logic_error("orbit lookup: not an isometry of the boundaries");
}

BIsoOrbits biso_orbits(const QuadraticForm& v, const QuadraticForm& vp, std::uint64_t order_cap,
                       std::size_t aut_cap, const Budget& bud) {
    SBoundary sb = s_boundary_data(v), sbp = s_boundary_data(vp);
    BIsoOrbits out;
    out.isos = enumerate_isometries(sb.form, sbp.form, order_cap);
    std::map<std::string, std::size_t> where;
    for (std::size_t i = 0; i < out.isos.size(); ++i) where[key(out.isos[i])] = i;

    auto auts = [&](const QuadraticForm& w) {
        auto all = all_isometries(w, w, aut_cap, bud);
        if (all) return *all;
        out.status = Verdict::Unknown;
        Matrix id = Matrix::identity(w.ring, w.rank());
        return std::vector<Matrix>{id, -id};
    };
    std::vector<Matrix> A = auts(v), Ap = auts(vp);
    std::vector<Matrix> dA, dAp;  // boundaries of k^{-1} and of k'
    for (auto& k : A) dA.push_back(descend(boundary_iso_of_isometry(v, v, inverse(k)), sb, sb));
    for (auto& k : Ap) dAp.push_back(descend(boundary_iso_of_isometry(vp, vp, k), sbp, sbp));

    UnionFind uf(out.isos.size());
    for (std::size_t i = 0; i < out.isos.size(); ++i) {
        for (auto& g : dA) uf.unite(i, where.at(key(compose_linking(sbp.form, out.isos[i], g))));
        for (auto& g : dAp) uf.unite(i, where.at(key(compose_linking(sbp.form, g, out.isos[i]))));
    }
    std::map<std::size_t, std::size_t> orbit_index;
    out.orbit_of.resize(out.isos.size());
    for (std::size_t i = 0; i < out.isos.size(); ++i) {
        std::size_t r = uf.find(i);
        auto it = orbit_index.find(r);
        if (it == orbit_index.end()) {
            it = orbit_index.emplace(r, out.representatives.size()).first;
            out.representatives.push_back(i);
        }
        out.orbit_of[i] = it->second;
    }
    IsoResult h = is_isometric(v, vp, bud);
    if (h.verdict == Verdict::Yes)
        out.identity_orbit = out.find(descend(boundary_iso_of_isometry(v, vp, *h.map), sb, sbp));
    else if (h.verdict == Verdict::Unknown)
        out.status = Verdict::Unknown;
    return out;
}

std::size_t min_generators(const std::vector<Int>& factors, const Int& p) {
    std::size_t c = 0;
    for (auto& d : factors)
        if (d % p == 0) ++c;
    return c;
}

std::vector<Int> prime_divisors(Int n) {
    n = abs(n);
    std::vector<Int> ps;
    for (Int p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
    if (n > 1) ps.push_back(n);
    return ps;
}

}  // namespace qform
