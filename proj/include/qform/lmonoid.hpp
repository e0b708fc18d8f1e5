#pragma once
// Decision layer for quasi-formations over Z and small fields: the invariants b, delta and
// kappa, the elementary section e, strict cancellation, and elementarity certificates.

#include "qform/linking.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qform {

enum class OrbitStatus { IsIdentityOrbit, NontrivialOrbit, Unknown };
const char* to_string(OrbitStatus s);

struct DeltaClass {
    QuadraticForm v, vprime;
    Matrix representative;  // linking isometry d_S v -> d_S v'
    OrbitStatus status = OrbitStatus::Unknown;
    std::string evidence;
};
DeltaClass delta_invariant(const QuasiFormation& x, const Budget& b = {});
// Orbit of the descent of a stable boundary isomorphism.
DeltaClass delta_of_iso(const BoundaryIso& f, const Budget& b = {});

struct KappaValue {
    int eps = 1;
    Int value = 0;  // signature for eps = +1, Arf invariant for eps = -1
};
KappaValue kappa(const BoundaryIso& f);

QuasiFormation e_of(const QuadraticForm& v);

struct StableIsoResult {
    Verdict verdict = Verdict::Unknown;
    std::size_t k = 0;
    std::optional<Matrix> map;  // v + H(Z^k) -> v' + H(Z^k)
    std::string witness;
};
StableIsoResult stably_isometric(const QuadraticForm& v, const QuadraticForm& vp, std::size_t stab_cap = 2,
                                 const Budget& b = {});

enum class CancellationRule { Indefinite_i, NamedLattice_ii, PrimeRank1_iii, Empirical, Unknown };
const char* to_string(CancellationRule r);

struct CancellationVerdict {
    bool holds = false;
    CancellationRule rule = CancellationRule::Unknown;
    std::vector<std::string> evidence;
};
CancellationVerdict strict_cancellation_check(const QuadraticForm& v, const Budget& b = {});

// Lagrangian K with K + V = M for a skew quasi-formation over Z.
Matrix skew_elementary_certificate(const QuasiFormation& x, const Budget& b = {});

// Isometry (V,theta) + H(V^perp) -> (V^perp,-theta^perp) + H(M/2), built from the splitting,
// the extension isometry and a hamiltonian basis of M.
Matrix boundary_stable_isometry(const QuasiFormation& x);

struct StabilizeResult {
    Verdict verdict = Verdict::Unknown;
    std::size_t k = 0;
    QuasiFormation stabilized;
    std::string route;
    std::optional<ElementaryCertificate> cert;        // explicit delta(K, rho) isomorphism
    std::optional<CancellationVerdict> cancellation;  // strict cancellation of the stabilised boundary
    std::optional<Matrix> boundary_isometry;          // stable isometry of the two boundary components
    std::optional<DeltaClass> delta;                  // delta of the unstabilised input (evidence only)
};
StabilizeResult stabilize_until_elementary(const QuasiFormation& x, std::size_t k_max, const Budget& b = {});
std::string stabilize_failure(const QuasiFormation& x, const StabilizeResult& r);

struct FieldCertificate {
    Verdict verdict = Verdict::Unknown;
    std::optional<ElementaryCertificate> cert;
};
FieldCertificate field_elementary_certificate(const QuasiFormation& x, const Budget& b = {});

// Quasi-formation (v cup_f -v'; L, V) for f with vanishing kappa, with V^perp based as the image of V'.
struct GluedQuasiFormation {
    QuasiFormation x;
    Matrix jperp;
};
std::optional<GluedQuasiFormation> quasi_formation_from_iso(const BoundaryIso& f, const Budget& b = {});

}  // namespace qform
