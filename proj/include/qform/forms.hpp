#pragma once
// epsilon-quadratic forms on based free modules.

#include "qform/linear.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qform {

// Explicit limits for every bounded search.
struct Budget {
    std::uint64_t nodes = 2'000'000;  // backtracking / enumeration steps
    int box = 2;                      // coordinate bound for box enumeration
};

enum class Verdict { Yes, No, Unknown };
const char* to_string(Verdict v);

struct QuadraticForm {
    Ring ring;
    int eps = 1;  // +1 or -1
    Matrix theta;

    QuadraticForm() = default;
    QuadraticForm(Ring r, int e, Matrix t);
    std::size_t rank() const { return theta.rows(); }
    Matrix lambda() const;  // theta + eps theta^T
};

// theta1 - theta2 = chi - eps chi^T for some chi.
bool q_equal(const Matrix& t1, const Matrix& t2, int eps);
Matrix symmetrize(const QuadraticForm& v);
QuadraticForm hyperbolic(std::size_t k, int eps, const Ring& r = Ring::Z());
QuadraticForm zero_form(std::size_t k, int eps, const Ring& r = Ring::Z());
QuadraticForm restrict_to(const QuadraticForm& v, const Matrix& basis);
QuadraticForm direct_sum(const QuadraticForm& a, const QuadraticForm& b);
QuadraticForm negate(const QuadraticForm& v);
bool same_form(const QuadraticForm& a, const QuadraticForm& b);
bool is_nonsingular(const QuadraticForm& v);  // det lambda is a unit

struct Annihilator {
    Matrix basis;  // columns span W^perp
    QuadraticForm induced;
};
Annihilator annihilator(const QuadraticForm& v, const Matrix& W);
Matrix radical(const QuadraticForm& v);

struct Inertia {
    std::size_t pos = 0, neg = 0, zero = 0;
};
Inertia inertia(const Matrix& sym);
Int signature(const Matrix& sym);
bool is_definite(const Matrix& sym);  // positive or negative definite

int arf_invariant(const QuadraticForm& v);

bool is_isometry(const QuadraticForm& src, const QuadraticForm& tgt, const Matrix& h);

struct IsoResult {
    Verdict verdict = Verdict::Unknown;
    std::optional<Matrix> map;  // verified isometry src -> tgt when Yes
    std::string witness;        // distinguishing invariant when No
};
IsoResult is_isometric(const QuadraticForm& v, const QuadraticForm& w, const Budget& b = {});
// Every isometry v -> w; nullopt if the search is not finite/complete within budget
// or more than cap maps exist.
std::optional<std::vector<Matrix>> all_isometries(const QuadraticForm& v, const QuadraticForm& w,
                                                  std::size_t cap, const Budget& b = {});
// All x with x^T G x == n for positive definite integral G.
std::vector<std::vector<Int>> vectors_of_norm(const Matrix& G, const Int& n);

// x -> x + u lambda(v,x) - eps v lambda(u,x) - eps u a lambda(u,x), lambda(x,y) = x^T Lambda y.
Matrix transvection(const QuadraticForm& v, const Matrix& u, const Int& a, const Matrix& w);

struct WittResult {
    std::size_t index = 0;
    Matrix pairs;  // columns e_1, f_1, e_2, f_2, ...
};
WittResult witt_index_lower_bound(const QuadraticForm& v, const Budget& b = {});

QuadraticForm named_lattice(const std::string& name);
bool is_named_lattice(const std::string& name);

}  // namespace qform
