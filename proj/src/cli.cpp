#include "qform/cli.hpp"

#include <functional>
#include <map>

namespace qform::cli {

using io::json;
using io::to_json;

namespace {

using Handler = std::function<Outcome(const json&, const Options&)>;

json strings(const std::vector<std::string>& v) {
    json a = json::array();
    for (auto& s : v) a.push_back(s);
    return a;
}

Outcome done(json out, int code = Computed) { return {std::move(out), code}; }

int verdict_exit(Verdict v) { return v == Verdict::Yes ? Computed : v == Verdict::No ? Negative : Undecided; }

QuadraticForm form_doc(const json& doc) { return io::form_from(io::payload_of(doc, "form"), "/payload"); }
QuasiFormation quasi_doc(const json& doc) { return io::quasi_from(io::payload_of(doc, "quasiformation"), "/payload"); }
BoundaryIso iso_doc(const json& doc) { return io::boundary_iso_from(io::payload_of(doc, "formation_iso"), "/payload"); }

json certificate_json(const std::optional<ElementaryCertificate>& c) { return c ? to_json(*c) : json(nullptr); }

Outcome cmd_snf(const json& doc, const Options&) {
    Matrix A;
    std::string kind = io::kind_of(doc);
    if (kind == "form") {
        A = form_doc(doc).lambda();
    } else if (kind == "matrix") {
        const json& p = io::payload_of(doc, "matrix");
        if (!p.contains("ring")) throw io::DocError("/payload/ring", "missing field 'ring'");
        if (!p.contains("entries")) throw io::DocError("/payload/entries", "missing field 'entries'");
        A = io::matrix_from(p["entries"], io::ring_from(p["ring"], "/payload/ring"), "/payload/entries");
    } else {
        throw io::DocError("/kind", "snf expects a 'matrix' or 'form' document");
    }
    SNF s = smith(A);
    json diag = json::array();
    for (auto& d : s.diagonal()) diag.push_back(to_json(d));
    return done({{"U", to_json(s.U)}, {"D", to_json(s.D)}, {"W", to_json(s.W)}, {"diagonal", diag}, {"rank", s.rank}});
}

Outcome cmd_boundary(const json& doc, const Options&) {
    return done(io::document("linking_form", to_json(s_boundary(form_doc(doc)))));
}

Outcome cmd_glue(const json& doc, const Options&) {
    BoundaryIso f = iso_doc(doc);
    QuadraticForm u = union_form(f);
    return done(io::document("form", to_json(u)));
}

Outcome cmd_split(const json& doc, const Options&) {
    QuasiFormation x = quasi_doc(doc);
    SplitEmbedding s = split_embedding(x.form, x.V);
    bool ok = verify(s.fj) &&
              is_isometry(direct_sum(s.v, hyperbolic(s.jperp.cols(), x.form.eps, x.form.ring)),
                          direct_sum(negate(s.vperp), x.form), s.h) &&
              is_isometry(s.glued, x.form, s.rj);
    if (!ok) throw std::logic_error("split: constructed data failed verification");
    return done({{"v", to_json(s.v)},
                 {"vperp", to_json(s.vperp)},
                 {"jperp", to_json(s.jperp)},
                 {"sigma", to_json(s.sigma)},
                 {"h", to_json(s.h)},
                 {"fj", to_json(s.fj)},
                 {"glued", to_json(s.glued)},
                 {"rj", to_json(s.rj)},
                 {"verified", true}});
}

Outcome cmd_b(const json& doc, const Options&) {
    BoundaryPair b = b_invariant(quasi_doc(doc));
    return done({{"v", to_json(b.v)}, {"vperp", to_json(b.vperp)}, {"jperp", to_json(b.jperp)}});
}

json delta_json(const DeltaClass& d) {
    return {{"status", to_string(d.status)},
            {"representative", to_json(d.representative)},
            {"v", to_json(d.v)},
            {"vprime", to_json(d.vprime)},
            {"evidence", d.evidence}};
}

Outcome cmd_delta(const json& doc, const Options& opt) {
    DeltaClass d;
    if (io::kind_of(doc) == "formation_iso") d = delta_of_iso(iso_doc(doc), opt.budget);
    else d = delta_invariant(quasi_doc(doc), opt.budget);
    return done(delta_json(d), d.status == OrbitStatus::Unknown ? Undecided : Computed);
}

Outcome cmd_kappa(const json& doc, const Options&) {
    KappaValue k = kappa(iso_doc(doc));
    return done({{"epsilon", std::to_string(k.eps)},
                 {"invariant", k.eps == 1 ? "signature" : "arf"},
                 {"value", to_json(k.value)}});
}

Outcome cmd_elementary(const json& doc, const Options& opt) {
    QuasiFormation x = quasi_doc(doc);
    const QuadraticForm& m = x.form;
    if (m.ring.is_field()) {
        FieldCertificate c = field_elementary_certificate(x, opt.budget);
        return done({{"elementary", to_string(c.verdict)}, {"route", "field complement search"},
                     {"certificate", certificate_json(c.cert)}},
                    verdict_exit(c.verdict));
    }
    if (m.eps == -1) {
        Matrix K = skew_elementary_certificate(x, opt.budget);
        auto c = certificate_from_complement(x, K);
        if (!c || !verify_certificate(x, *c)) throw std::logic_error("elementary: skew complement gave no certificate");
        return done({{"elementary", "Yes"}, {"route", "skew lagrangian complement"}, {"certificate", to_json(*c)}});
    }
    ElementaryVerdict ev = is_elementary_representative(x);
    if (ev.verdict == Verdict::Yes)
        return done({{"elementary", "Yes"}, {"route", "representative: " + ev.route}, {"certificate", certificate_json(ev.cert)}});
    BoundaryPair bp = b_invariant(x);
    if (det(bp.v.lambda()) == 0)
        return done({{"elementary", "Unknown"}, {"route", "degenerate boundary"}, {"certificate", nullptr}}, Undecided);
    CancellationVerdict cv = strict_cancellation_check(bp.v, opt.budget);
    if (cv.holds)
        return done({{"elementary", "Yes"},
                     {"route", "strict cancellation"},
                     {"rule", to_string(cv.rule)},
                     {"evidence", strings(cv.evidence)},
                     {"certificate", nullptr}});
    DeltaClass d = delta_invariant(x, opt.budget);
    if (d.status == OrbitStatus::NontrivialOrbit)
        return done({{"elementary", "No"}, {"route", "delta outside the identity orbit"}, {"delta", delta_json(d)},
                     {"certificate", nullptr}},
                    Negative);
    return done({{"elementary", "Unknown"}, {"route", "undecided"}, {"delta", delta_json(d)}, {"certificate", nullptr}},
                Undecided);
}

Outcome cmd_sbaut(const json& doc, const Options& opt) {
    QuadraticForm v = form_doc(doc);
    BIsoOrbits o = biso_orbits(v, v, opt.order_cap, 100000, opt.budget);
    json reps = json::array();
    for (auto i : o.representatives) reps.push_back(to_json(o.isos[i]));
    json out{{"orbits", o.count()}, {"isometries", o.isos.size()}, {"status", to_string(o.status)},
             {"representatives", reps}};
    out["identity_orbit"] = o.identity_orbit ? json(*o.identity_orbit) : json(nullptr);
    return done(out, verdict_exit(o.status));
}

Outcome cmd_cancel(const json& doc, const Options& opt) {
    CancellationVerdict c = strict_cancellation_check(form_doc(doc), opt.budget);
    return done({{"holds", c.holds}, {"rule", to_string(c.rule)}, {"evidence", strings(c.evidence)}},
                c.holds ? Computed : Undecided);
}

Outcome cmd_stabilize(const json& doc, const Options& opt) {
    QuasiFormation x = quasi_doc(doc);
    StabilizeResult r = stabilize_until_elementary(x, opt.stab_cap, opt.budget);
    json out{{"verdict", to_string(r.verdict)}, {"k", r.k}, {"route", r.route},
             {"certificate", certificate_json(r.cert)}};
    if (r.verdict == Verdict::Yes) {
        std::string why = stabilize_failure(x, r);
        if (!why.empty()) throw std::logic_error("stabilize: " + why);
        out["verified"] = true;
    }
    out["cancellation"] = r.cancellation ? json{{"rule", to_string(r.cancellation->rule)},
                                                {"evidence", strings(r.cancellation->evidence)}}
                                         : json(nullptr);
    out["boundary_isometry"] = r.boundary_isometry ? to_json(*r.boundary_isometry) : json(nullptr);
    out["delta"] = r.delta ? json(to_string(r.delta->status)) : json(nullptr);
    return done(out, verdict_exit(r.verdict));
}

const std::map<std::string, Handler>& table() {
    static const std::map<std::string, Handler> t{
        {"snf", cmd_snf},         {"boundary", cmd_boundary},       {"glue", cmd_glue},
        {"split", cmd_split},     {"b", cmd_b},                     {"delta", cmd_delta},
        {"kappa", cmd_kappa},     {"elementary", cmd_elementary},   {"sbaut", cmd_sbaut},
        {"cancel-check", cmd_cancel}, {"stabilize", cmd_stabilize},
    };
    return t;
}

json error(const std::string& path, const std::string& what) { return {{"error", what}, {"path", path}}; }

}  // namespace

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (auto& [k, _] : table()) n.push_back(k);
        return n;
    }();
    return names;
}

Outcome run(const std::string& command, const json& doc, const Options& opt) {
    auto it = table().find(command);
    if (it == table().end()) return {error("", "unknown command '" + command + "'"), Invalid};
    try {
        return it->second(doc, opt);
    } catch (const io::DocError& e) {
        return {error(e.path(), e.what()), Invalid};
    } catch (const InvalidInput& e) {
        return {error("/payload", e.what()), Invalid};
    } catch (const BudgetExceeded& e) {
        return {{{"status", "Unknown"}, {"reason", e.what()}}, Undecided};
    }
}

Outcome run_text(const std::string& command, const std::string& text, const Options& opt) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) return {error("", "input is not valid JSON"), Invalid};
    return run(command, doc, opt);
}

std::string render(const json& j) { return j.dump(2) + "\n"; }

}  // namespace qform::cli
