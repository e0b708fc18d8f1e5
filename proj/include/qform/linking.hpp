#pragma once
// Split eps-quadratic linking forms over (Z, Z\{0}): S-boundaries, isometries, descent
// of formation isomorphisms, and orbit sets of boundary isomorphisms.

#include "qform/formations.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qform {

Rat mod1(const Rat& x);  // representative in [0, 1)

// G = (+) Z/d_i with generator pairings and refinement values mod Z.
struct LinkingForm {
    int eps = 1;
    std::vector<Int> factors;                // d_1 | d_2 | ..., each >= 2
    std::vector<std::vector<Rat>> pairing;   // phi(g_i, g_j)
    std::vector<Rat> refinement;             // nu(g_i); empty when eps = -1
    std::size_t gens() const { return factors.size(); }
    Int order() const;
    Rat phi(const std::vector<Int>& x, const std::vector<Int>& y) const;
    Rat nu(const std::vector<Int>& x) const;
};

std::string linking_failure(const LinkingForm& g);

// The S-boundary together with the presentation data needed to push vectors of V* into G.
struct SBoundary {
    LinkingForm form;
    Matrix gens;   // columns g_i in V* coordinates
    Matrix lifts;  // columns z_i in V with lambda z_i = d_i g_i
    Matrix Ui;     // V* -> SNF coordinates
    std::vector<std::size_t> index;  // SNF positions of the nontrivial factors
    std::vector<Int> coords(const Matrix& y) const;  // y in V*, reduced coordinates in G
};
SBoundary s_boundary_data(const QuadraticForm& v);
LinkingForm s_boundary(const QuadraticForm& v);

// A homomorphism G -> G' is a k' x k integer matrix whose column i is the image of g_i.
Matrix normalize(const LinkingForm& tgt, const Matrix& m);
std::string linking_iso_failure(const LinkingForm& a, const LinkingForm& b, const Matrix& m);
bool is_linking_iso(const LinkingForm& a, const LinkingForm& b, const Matrix& m);
Matrix compose_linking(const LinkingForm& tgt, const Matrix& g, const Matrix& f);  // g o f
Matrix identity_linking(const LinkingForm& a);

// Every isometry a -> b; throws BudgetExceeded when |G| exceeds order_cap.
std::vector<Matrix> enumerate_isometries(const LinkingForm& a, const LinkingForm& b,
                                         std::uint64_t order_cap = 10000);

// The map induced by alpha^{-*} on the cokernels of the stabilised boundaries.
Matrix descend(const BoundaryIso& f);
Matrix descend(const BoundaryIso& f, const SBoundary& src, const SBoundary& tgt);

struct BIsoOrbits {
    Verdict status = Verdict::Yes;  // Unknown when an automorphism group could not be enumerated
    std::vector<Matrix> isos;       // Iso_S(dv, dv')
    std::vector<std::size_t> orbit_of;
    std::vector<std::size_t> representatives;  // index into isos, one per orbit
    std::optional<std::size_t> identity_orbit;  // orbit containing the boundaries of isometries v -> v'
    std::size_t count() const { return representatives.size(); }
    std::size_t find(const Matrix& m) const;  // orbit of a normalised iso
};
BIsoOrbits biso_orbits(const QuadraticForm& v, const QuadraticForm& vp, std::uint64_t order_cap = 10000,
                       std::size_t aut_cap = 100000, const Budget& b = {});

std::size_t min_generators(const std::vector<Int>& factors, const Int& p);
std::vector<Int> prime_divisors(Int n);

}  // namespace qform
