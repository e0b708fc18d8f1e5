#include "qform/io.hpp"

#include <regex>

namespace qform::io {

namespace {

std::string at_index(const std::string& at, std::size_t i) { return at + "/" + std::to_string(i); }
std::string at_key(const std::string& at, const std::string& k) { return at + "/" + k; }

const json& field(const json& j, const std::string& key, const std::string& at) {
    if (!j.is_object()) throw DocError(at, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw DocError(at_key(at, key), "missing field '" + key + "'");
    return *it;
}

int eps_from(const json& j, const std::string& at) {
    Int e = int_from(j, at);
    if (e != 1 && e != -1) throw DocError(at, "epsilon must be \"1\" or \"-1\"");
    return e == 1 ? 1 : -1;
}

std::size_t size_from(const json& j, const std::string& at) {
    Int s = int_from(j, at);
    if (s < 0 || !s.fits_ulong_p()) throw DocError(at, "expected a non-negative size");
    return s.get_ui();
}

}  // namespace

// ---------------------------------------------------------------- writers

json to_json(const Int& x) { return x.get_str(); }

json to_json(const Rat& x) {
    Rat c = x;
    c.canonicalize();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

json to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(to_json(m(i, j)));
        rows.push_back(std::move(r));
    }
    return rows;
}

json to_json(const QuadraticForm& v) {
    return {{"ring", v.ring.name()}, {"epsilon", std::to_string(v.eps)}, {"theta", to_json(v.theta)}};
}

json to_json(const QuasiFormation& x) {
    return {{"form", to_json(x.form)}, {"L", to_json(x.L)}, {"V", to_json(x.V)}, {"stab", std::to_string(x.stab)}};
}

json to_json(const BoundaryIso& f) {
    return {{"source", to_json(f.src)},        {"target", to_json(f.tgt)},
            {"p", std::to_string(f.p)},        {"pp", std::to_string(f.pp)},
            {"alpha", to_json(f.f.alpha)},     {"beta", to_json(f.f.beta)},
            {"nu", to_json(f.f.nu)}};
}

json to_json(const LinkingForm& g) {
    json factors = json::array(), pairing = json::array(), refinement = json::array();
    for (auto& d : g.factors) factors.push_back(to_json(d));
    for (auto& row : g.pairing) {
        json r = json::array();
        for (auto& q : row) r.push_back(to_json(q));
        pairing.push_back(std::move(r));
    }
    for (auto& q : g.refinement) refinement.push_back(to_json(q));
    return {{"epsilon", std::to_string(g.eps)}, {"factors", factors}, {"pairing", pairing}, {"refinement", refinement}};
}

json to_json(const ElementaryCertificate& c) {
    return {{"rho", to_json(c.rho)}, {"g", to_json(c.g)}, {"E", to_json(c.E)}, {"complement", to_json(c.complement)}};
}

json document(const std::string& kind, json payload) {
    return {{"kind", kind}, {"format_version", kFormatVersion}, {"payload", std::move(payload)}};
}

// ---------------------------------------------------------------- readers

Int int_from(const json& j, const std::string& at) {
    static const std::regex dec("-?(0|[1-9][0-9]*)");
    if (j.is_number_integer()) return Int(j.dump());  // tolerated on input
    if (!j.is_string()) throw DocError(at, "expected a decimal string");
    const std::string& s = j.get_ref<const std::string&>();
    if (!std::regex_match(s, dec)) throw DocError(at, "not a decimal integer: '" + s + "'");
    return Int(s);
}

Rat rat_from(const json& j, const std::string& at) {
    static const std::regex frac("(-?(0|[1-9][0-9]*))(/([1-9][0-9]*))?");
    if (j.is_number_integer()) return Rat(Int(j.dump()));
    std::smatch m;
    if (!j.is_string()) throw DocError(at, "expected a fraction string");
    const std::string& s = j.get_ref<const std::string&>();
    if (!std::regex_match(s, m, frac)) throw DocError(at, "not a fraction: '" + s + "'");
    Rat q(Int(m[1].str()), m[4].matched ? Int(m[4].str()) : Int(1));
    q.canonicalize();
    return q;
}

Ring ring_from(const json& j, const std::string& at) {
    if (!j.is_string()) throw DocError(at, "expected a ring name (\"Z\", \"F2\", \"F3\", ...)");
    std::string s = j.get<std::string>();
    if (s == "Z") return Ring::Z();
    static const std::regex fp("F([1-9][0-9]*)");
    std::smatch m;
    if (std::regex_match(s, m, fp)) {
        try {
            return Ring::Fp(Int(m[1].str()));
        } catch (const InvalidInput& e) {
            throw DocError(at, e.what());
        }
    }
    throw DocError(at, "unsupported ring '" + s + "'");
}

Matrix matrix_from(const json& j, const Ring& r, const std::string& at, std::size_t rows, std::size_t cols) {
    if (!j.is_array()) throw DocError(at, "expected an array of rows");
    std::size_t n = j.size();
    if (rows != SIZE_MAX && n != rows)
        throw DocError(at, "expected " + std::to_string(rows) + " rows, got " + std::to_string(n));
    std::size_t c = cols;
    for (std::size_t i = 0; i < n; ++i) {
        if (!j[i].is_array()) throw DocError(at_index(at, i), "expected a row array");
        if (c == SIZE_MAX) c = j[i].size();
        if (j[i].size() != c)
            throw DocError(at_index(at, i), "ragged matrix: expected " + std::to_string(c) + " entries");
    }
    if (c == SIZE_MAX) c = 0;
    Matrix m(r, n, c);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < c; ++k) m.set(i, k, int_from(j[i][k], at_index(at_index(at, i), k)));
    return m;
}

QuadraticForm form_from(const json& j, const std::string& at) {
    Ring r = ring_from(field(j, "ring", at), at_key(at, "ring"));
    int e = eps_from(field(j, "epsilon", at), at_key(at, "epsilon"));
    const json& t = field(j, "theta", at);
    Matrix th = matrix_from(t, r, at_key(at, "theta"), SIZE_MAX, t.is_array() ? t.size() : 0);
    return {r, e, th};
}

QuasiFormation quasi_from(const json& j, const std::string& at) {
    QuadraticForm m = form_from(field(j, "form", at), at_key(at, "form"));
    std::size_t n = m.rank();
    if (n % 2) throw DocError(at_key(at, "form"), "form has odd rank");
    QuasiFormation x{m, matrix_from(field(j, "L", at), m.ring, at_key(at, "L"), n, n / 2),
                     matrix_from(field(j, "V", at), m.ring, at_key(at, "V"), n, n / 2), 0};
    if (j.contains("stab")) x.stab = size_from(j["stab"], at_key(at, "stab"));
    std::string why = quasi_failure(x);
    if (!why.empty()) throw DocError(at, why);
    return x;
}

BoundaryIso boundary_iso_from(const json& j, const std::string& at) {
    BoundaryIso f;
    f.src = form_from(field(j, "source", at), at_key(at, "source"));
    f.tgt = form_from(field(j, "target", at), at_key(at, "target"));
    if (f.src.ring != f.tgt.ring || f.src.eps != f.tgt.eps) throw DocError(at, "source and target forms differ in ring or epsilon");
    f.p = j.contains("p") ? size_from(j["p"], at_key(at, "p")) : 0;
    f.pp = j.contains("pp") ? size_from(j["pp"], at_key(at, "pp")) : 0;
    std::size_t n = f.src.rank() + f.p, np = f.tgt.rank() + f.pp;
    if (n != np) throw DocError(at, "stabilised ranks differ");
    const Ring& r = f.src.ring;
    f.f.alpha = matrix_from(field(j, "alpha", at), r, at_key(at, "alpha"), n, n);
    f.f.beta = matrix_from(field(j, "beta", at), r, at_key(at, "beta"), n, n);
    f.f.nu = matrix_from(field(j, "nu", at), r, at_key(at, "nu"), n, n);
    if (!verify(f)) throw DocError(at, "not a stable boundary isomorphism: " + iso_failure(f.source(), f.target(), f.f));
    return f;
}

LinkingForm linking_from(const json& j, const std::string& at) {
    LinkingForm g;
    g.eps = eps_from(field(j, "epsilon", at), at_key(at, "epsilon"));
    const json& fs = field(j, "factors", at);
    if (!fs.is_array()) throw DocError(at_key(at, "factors"), "expected an array");
    for (std::size_t i = 0; i < fs.size(); ++i) g.factors.push_back(int_from(fs[i], at_index(at_key(at, "factors"), i)));
    const json& ps = field(j, "pairing", at);
    std::size_t k = g.factors.size();
    if (!ps.is_array() || ps.size() != k) throw DocError(at_key(at, "pairing"), "expected a k x k array");
    for (std::size_t i = 0; i < k; ++i) {
        std::string ai = at_index(at_key(at, "pairing"), i);
        if (!ps[i].is_array() || ps[i].size() != k) throw DocError(ai, "expected a row of length " + std::to_string(k));
        std::vector<Rat> row;
        for (std::size_t c = 0; c < k; ++c) row.push_back(rat_from(ps[i][c], at_index(ai, c)));
        g.pairing.push_back(row);
    }
    if (j.contains("refinement")) {
        const json& rs = j["refinement"];
        if (!rs.is_array()) throw DocError(at_key(at, "refinement"), "expected an array");
        for (std::size_t i = 0; i < rs.size(); ++i) g.refinement.push_back(rat_from(rs[i], at_index(at_key(at, "refinement"), i)));
    }
    std::string why = linking_failure(g);
    if (!why.empty()) throw DocError(at, why);
    return g;
}

std::string kind_of(const json& doc) {
    if (!doc.is_object()) throw DocError("", "document must be an object");
    const json& k = field(doc, "kind", "");
    if (!k.is_string()) throw DocError("/kind", "expected a string");
    const json& v = field(doc, "format_version", "");
    if (v != json(kFormatVersion)) throw DocError("/format_version", "unsupported format version");
    return k.get<std::string>();
}

const json& payload_of(const json& doc, const std::string& kind) {
    std::string k = kind_of(doc);
    if (k != kind) throw DocError("/kind", "expected a '" + kind + "' document, got '" + k + "'");
    return field(doc, "payload", "");
}

}  // namespace qform::io
