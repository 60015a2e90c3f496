#ifndef QUADTOPE_TESTS_FIXTURES_HPP
#define QUADTOPE_TESTS_FIXTURES_HPP

#include <vector>

#include "quadtope/qform.hpp"
#include "quadtope/rng.hpp"

namespace quadtope::fixtures {

// Family of constant forms (k = 0).
inline QuadFamily constant_family(const std::vector<QuadForm>& qs) {
    QuadFamily fam;
    fam.m = static_cast<int>(qs.size());
    fam.l = qs.at(0).dim() - 1;
    fam.k = 0;
    fam.d = 0;
    for (const auto& q : qs) {
        std::vector<std::vector<MultiPoly>> mat;
        for (const auto& row : q.m) {
            std::vector<MultiPoly> r;
            for (const auto& e : row) r.push_back(MultiPoly::constant(e));
            mat.push_back(r);
        }
        fam.forms.push_back(mat);
    }
    fam.validate();
    return fam;
}

// Pencil {diag(1,1,-1), diag(-1,1,1)}: index 2 on the open quarter arc of
// Omega_{1,2} except index 1 at the midpoint direction (-1,-1)/sqrt(2).
inline QuadFamily diagonal_pencil() {
    return constant_family({QuadForm::diagonal({Rat(1), Rat(1), Rat(-1)}),
                            QuadForm::diagonal({Rat(-1), Rat(1), Rat(1)})});
}

// Single form diag(1, 1, -x1): fiber {Q <= 0} on S^2 is empty for x < 0 and
// a pair of caps for x > 0.
inline QuadFamily single_pencil() {
    QuadFamily fam;
    fam.m = 1;
    fam.l = 2;
    fam.k = 1;
    fam.d = 1;
    std::vector<std::vector<MultiPoly>> mat(3, std::vector<MultiPoly>(3, MultiPoly::zero()));
    mat[0][0] = MultiPoly::constant(Rat(1));
    mat[1][1] = MultiPoly::constant(Rat(1));
    mat[2][2] = MultiPoly::neg(MultiPoly::variable("x1"));
    fam.forms.push_back(mat);
    fam.validate();
    return fam;
}

inline QuadForm random_symmetric(CounterRng& rng, int dim, long span = 9) {
    QuadForm q = QuadForm::zero(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            Rat v(static_cast<long>(rng.next_below(static_cast<std::uint64_t>(2 * span + 1))) - span,
                  static_cast<long>(rng.next_below(3)) + 1);
            v.canonicalize();
            q.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            q.m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
        }
    return q;
}

}  // namespace quadtope::fixtures

#endif
