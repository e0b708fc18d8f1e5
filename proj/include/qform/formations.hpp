#pragma once
// Split formations, their isomorphisms and homotopies, quasi-formations,
// boundaries, unions and the splitting/extension isometries.

#include "qform/forms.hpp"

#include <optional>
#include <string>

namespace qform {

// (F, ((gamma, mu), theta) G) with gamma: G -> F, mu: G -> F*, theta in Q_{-eps}(G).
struct SplitFormation {
    Ring ring;
    int eps = 1;  // the formation's own epsilon
    Matrix gamma, mu, theta;
    std::size_t F() const { return gamma.rows(); }
    std::size_t G() const { return gamma.cols(); }
};

// Boundary of an eps-form: a split (-eps)-formation with gamma = 1, mu = lambda, theta = psi.
SplitFormation boundary_of_form(const QuadraticForm& v);
// (P, P*): gamma = 0, mu = 1, theta = 0.
SplitFormation trivial_formation(std::size_t p, int eps, const Ring& r = Ring::Z());
SplitFormation direct_sum(const SplitFormation& x, const SplitFormation& y);
bool is_valid(const SplitFormation& x);

struct FormationIso {
    Matrix alpha, beta, nu;
};

// Empty string when f: x -> y is an isomorphism, else the failing condition.
std::string iso_failure(const SplitFormation& x, const SplitFormation& y, const FormationIso& f);
bool verify_iso(const SplitFormation& x, const SplitFormation& y, const FormationIso& f);
std::string homotopy_failure(const SplitFormation& x, const SplitFormation& y, const FormationIso& f,
                             const FormationIso& g, const Matrix& delta);
bool verify_homotopy(const SplitFormation& x, const SplitFormation& y, const FormationIso& f,
                     const FormationIso& g, const Matrix& delta);

FormationIso identity_iso(const SplitFormation& x);
FormationIso compose(const FormationIso& g, const FormationIso& f);  // g o f
FormationIso invert(const FormationIso& f);
FormationIso direct_sum(const FormationIso& f, const FormationIso& g);
FormationIso boundary_of_isometry(const Matrix& h);  // (h, h, 0)
// (1, phi, -phi^{-*} psi phi^{-1}) : boundary(M,psi) -> (M, M*) for nonsingular psi.
FormationIso boundary_to_trivial(const QuadraticForm& m);

// Stable boundary isomorphism  f : d(src) + (P,P*) -> d(tgt) + (P',P'*).
// Block order is V + P on the F side and V + P* on the G side.
struct BoundaryIso {
    QuadraticForm src, tgt;
    std::size_t p = 0, pp = 0;
    FormationIso f;
    SplitFormation source() const;
    SplitFormation target() const;
};
bool verify(const BoundaryIso& f);
BoundaryIso compose(const BoundaryIso& g, const BoundaryIso& f);
BoundaryIso invert(const BoundaryIso& f);
BoundaryIso boundary_iso_of_isometry(const QuadraticForm& v, const QuadraticForm& w, const Matrix& h);

// Block components of a stable boundary isomorphism, all six identities re-verified.
struct NormalForm {
    Matrix a, a1, a3, b, b1, s;
};
NormalForm normal_form(const BoundaryIso& f);
std::string normal_form_failure(const BoundaryIso& f, const NormalForm& n);

// v cup_f v'  for  f : d v + (P,P*) -> d(-v') + (P',P'*).
QuadraticForm union_form(const BoundaryIso& f);

// A homotopy between two stable isomorphisms with the same source and target forms,
// realised after padding both to a common stabilisation.
struct StableHomotopy {
    SplitFormation source, target;
    FormationIso f, g;  // padded representatives
    Matrix delta;       // homotopy f ~ g
};
std::optional<StableHomotopy> find_stable_homotopy(const BoundaryIso& f, const BoundaryIso& g,
                                                   const Budget& b = {});

struct SplitEmbedding {
    QuadraticForm v;       // (V, theta)
    Matrix jperp;          // basis of V^perp
    QuadraticForm vperp;   // (V^perp, theta^perp)
    Matrix sigma;          // section with jperp^T phi sigma = 1
    Matrix h;              // (V,theta) + H(V^perp) -> (V^perp,-theta^perp) + (M,psi)
    BoundaryIso fj;        // d(V,theta) + (M',M'*) -> d(V^perp,-theta^perp) + (M,M*)
    QuadraticForm glued;   // (V,theta) cup_{fj} (V^perp, theta^perp)
    Matrix rj;             // isometry glued -> (M, psi)
};
// jperp: optional basis of V^perp to use instead of a computed kernel basis.
SplitEmbedding split_embedding(const QuadraticForm& m, const Matrix& j,
                               const std::optional<Matrix>& jperp = std::nullopt);

struct Extension {
    QuadraticForm glued;  // v cup_f (-v')
    Matrix h;             // v + H(V') -> v' + glued
    BoundaryIso dh;       // d v + (M',M'*) -> d v' + (M,M*), the converted boundary of h
    std::optional<StableHomotopy> homotopy;  // dh ~ f
};
Extension extend_boundary_iso(const BoundaryIso& f, const Budget& b = {}, bool with_homotopy = true);

// ---------------------------------------------------------------- quasi-formations

struct QuasiFormation {
    QuadraticForm form;
    Matrix L, V;
    std::size_t stab = 0;
};
// Empty string when valid, else the violated condition.
std::string quasi_failure(const QuasiFormation& x);
void validate(const QuasiFormation& x);

QuasiFormation boundary_of_asymmetric(const Matrix& rho, int eps);
QuasiFormation direct_sum(const QuasiFormation& x, const QuasiFormation& y);
QuasiFormation t_flip(const QuasiFormation& x);

struct BoundaryPair {
    QuadraticForm v;      // (V, theta)
    QuadraticForm vperp;  // (V^perp, -theta^perp)
    Matrix jperp;
};
BoundaryPair b_invariant(const QuasiFormation& x);

// Lagrangian W with E^T phi W = 1 and [E|W] a hamiltonian basis.
Matrix lagrangian_partner_right(const QuadraticForm& m, const Matrix& E);
// Lagrangian E with E^T phi W = 1 and [E|W] a hamiltonian basis.
Matrix lagrangian_partner_left(const QuadraticForm& m, const Matrix& W);
bool is_lagrangian(const QuadraticForm& m, const Matrix& L);

// x is isomorphic to delta(K, rho) via g : H(K) -> M with g(K) = E and g(graph rho) = V.
struct ElementaryCertificate {
    Matrix rho;
    Matrix g;
    Matrix E;           // g(K x 0)
    Matrix complement;  // Lagrangian complement of V used
};
// Certificate from a Lagrangian complement K of V (E defaults to the left partner of K).
std::optional<ElementaryCertificate> certificate_from_complement(const QuasiFormation& x, const Matrix& K,
                                                                 std::optional<Matrix> E = std::nullopt);
bool verify_certificate(const QuasiFormation& x, const ElementaryCertificate& c);

struct ElementaryVerdict {
    Verdict verdict = Verdict::No;
    std::optional<ElementaryCertificate> cert;
    std::string route;  // which Lagrangian complemented V
};
ElementaryVerdict is_elementary_representative(const QuasiFormation& x);

// Kronecker product (utility for vectorised linear systems).
Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace qform
