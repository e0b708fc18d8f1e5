// Writes the fixed stabilisation corpus: eps = +1 quasi-formations over H(Z^k), k <= 3, whose
// boundary (V, theta) is definite, together with the k found by stabilize.
//   qform_gen_corpus <out.json> [seed]

#include "qform/cli.hpp"

#include <fstream>
#include <iostream>
#include <random>

using namespace qform;

namespace {

Matrix random_primitive(std::mt19937_64& g, std::size_t n, std::size_t k) {
    std::uniform_int_distribution<long> d(-2, 2);
    for (;;) {
        Matrix j(Ring::Z(), n, k);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < k; ++c) j.set(r, c, d(g));
        if (is_primitive(j) && rank(j) == k) return j;
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: qform_gen_corpus <out.json> [seed]\n";
        return 3;
    }
    std::mt19937_64 g(argc > 2 ? std::stoull(argv[2]) : 20260101);
    io::json items = io::json::array();
    while (items.size() < 50) {
        std::size_t k = 1 + items.size() % 3;
        QuadraticForm h = hyperbolic(k, 1);
        Matrix L = vcat({Matrix::identity(Ring::Z(), k), Matrix(Ring::Z(), k, k)});
        Matrix V = random_primitive(g, 2 * k, k);
        QuasiFormation x{h, L, V, 0};
        if (!quasi_failure(x).empty()) continue;
        if (!is_definite(restrict_to(h, V).lambda())) continue;
        StabilizeResult r = stabilize_until_elementary(x, 3);
        if (r.verdict != Verdict::Yes) {
            std::cerr << "instance " << items.size() << " not certified within k <= 3\n";
            return 2;
        }
        items.push_back({{"input", io::document("quasiformation", io::to_json(x))},
                         {"k", r.k},
                         {"route", r.route}});
    }
    std::ofstream(argv[1]) << cli::render(items);
    return 0;
}
