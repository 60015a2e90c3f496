#ifndef QUADTOPE_FIBERS_HPP
#define QUADTOPE_FIBERS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "quadtope/agrachev.hpp"
#include "quadtope/error.hpp"
#include "quadtope/homology.hpp"
#include "quadtope/poly.hpp"
#include "quadtope/qform.hpp"
#include "quadtope/rat.hpp"
#include "quadtope/signcond.hpp"
#include "quadtope/strata.hpp"

namespace quadtope {

// --- Monotone formulas ------------------------------------------------------

enum class Rel { Le, Ge, Eq };

inline std::string rel_name(Rel r) {
    switch (r) {
        case Rel::Le: return "le";
        case Rel::Ge: return "ge";
        case Rel::Eq: return "eq";
    }
    return "";
}

inline Rel rel_parse(const std::string& s) {
    if (s == "le") return Rel::Le;
    if (s == "ge") return Rel::Ge;
    if (s == "eq") return Rel::Eq;
    throw Error("bad_relation", "unknown relation", {{"rel", s}});
}

// AND/OR tree over sign atoms on an indexed polynomial family. Negation is
// not representable, so every formula in this class is monotone.
struct PClosedFormula {
    enum class Kind { Atom, And, Or };
    Kind kind = Kind::Atom;
    int atom_index = 0;  // index into the polynomial family
    Rel rel = Rel::Le;
    std::vector<PClosedFormula> args;

    static PClosedFormula atom(int index, Rel r) {
        PClosedFormula f;
        f.kind = Kind::Atom;
        f.atom_index = index;
        f.rel = r;
        return f;
    }

    static PClosedFormula conj(std::vector<PClosedFormula> parts) {
        if (parts.empty()) throw Error("bad_formula", "empty conjunction");
        PClosedFormula f;
        f.kind = Kind::And;
        f.args = std::move(parts);
        return f;
    }

    static PClosedFormula disj(std::vector<PClosedFormula> parts) {
        if (parts.empty()) throw Error("bad_formula", "empty disjunction");
        PClosedFormula f;
        f.kind = Kind::Or;
        f.args = std::move(parts);
        return f;
    }

    int max_atom_index() const {
        if (kind == Kind::Atom) return atom_index;
        int mx = -1;
        for (const auto& a : args) mx = std::max(mx, a.max_atom_index());
        return mx;
    }

    nlohmann::json to_json() const {
        if (kind == Kind::Atom)
            return {{"atom", {{"p", atom_index}, {"rel", rel_name(rel)}}}};
        nlohmann::json parts = nlohmann::json::array();
        for (const auto& a : args) parts.push_back(a.to_json());
        return {{"op", kind == Kind::And ? "and" : "or"}, {"args", parts}};
    }

    static PClosedFormula from_json(const nlohmann::json& j) {
        if (j.contains("atom"))
            return atom(j["atom"].at("p").get<int>(),
                        rel_parse(j["atom"].at("rel").get<std::string>()));
        if (!j.contains("op") || !j.contains("args"))
            throw Error("bad_formula", "node needs 'atom' or 'op'+'args'");
        std::vector<PClosedFormula> parts;
        for (const auto& a : j["args"]) parts.push_back(from_json(a));
        const std::string op = j["op"].get<std::string>();
        if (op == "and") return conj(std::move(parts));
        if (op == "or") return disj(std::move(parts));
        throw Error("bad_formula", "unknown op", {{"op", op}});
    }
};

namespace detail {

inline bool atom_holds(Rel rel, int sign) {
    switch (rel) {
        case Rel::Le: return sign <= 0;
        case Rel::Ge: return sign >= 0;
        case Rel::Eq: return sign == 0;
    }
    return false;
}

template <class AtomEval>
bool eval_tree(const PClosedFormula& phi, AtomEval&& atom_sign) {
    switch (phi.kind) {
        case PClosedFormula::Kind::Atom:
            return atom_holds(phi.rel, atom_sign(phi.atom_index));
        case PClosedFormula::Kind::And:
            for (const auto& a : phi.args)
                if (!eval_tree(a, atom_sign)) return false;
            return true;
        case PClosedFormula::Kind::Or:
            for (const auto& a : phi.args)
                if (eval_tree(a, atom_sign)) return true;
            return false;
    }
    return false;
}

}  // namespace detail

// Exact evaluation against a polynomial family at a rational point.
inline bool eval_formula(const PClosedFormula& phi, const std::vector<MultiPoly>& polys,
                         const std::map<std::string, Rat>& point) {
    return detail::eval_tree(phi, [&](int idx) {
        if (idx < 0 || idx >= static_cast<int>(polys.size()))
            throw Error("bad_atom", "atom index out of range", {{"index", idx}});
        return sign_of(polys[static_cast<std::size_t>(idx)].eval(point));
    });
}

// --- Compactification / homogenization --------------------------------------

struct CompactifiedSystem {
    std::vector<MultiPoly> polys;  // homogenized in Y plus the appended ball cut
    PClosedFormula phi;            // original formula AND (ball cut <= 0)
    Rat eps;
};

// Appends the ball cut P_0 = eps^2 (sum Y_i^2 + sum X_i^2) - 1 as a
// conjunct and homogenizes every polynomial in the Y block with a fresh
// variable y0. Membership is preserved pointwise: a point (y, x) inside the
// ball satisfies the original formula iff ((1, y), x) satisfies the result.
inline CompactifiedSystem compactify_homogenize(const std::vector<MultiPoly>& polys,
                                                const PClosedFormula& phi, int l, int k,
                                                const Rat& eps) {
    if (eps <= 0) throw Error("bad_eps", "eps must be positive");
    if (l < 0 || k < 0) throw Error("bad_dimension", "l and k must be >= 0");
    if (phi.max_atom_index() >= static_cast<int>(polys.size()))
        throw Error("bad_atom", "formula references a missing polynomial");

    CompactifiedSystem out;
    out.eps = eps;
    MultiPoly ball = MultiPoly::constant(Rat(-1));
    const Rat e2 = eps * eps;
    for (int i = 1; i <= l; ++i) {
        const MultiPoly yi = MultiPoly::variable("y" + std::to_string(i), 1);
        ball = MultiPoly::add(ball, MultiPoly::scale(MultiPoly::mul(yi, yi), e2));
    }
    for (int i = 1; i <= k; ++i) {
        const MultiPoly xi = MultiPoly::variable("x" + std::to_string(i), 1);
        ball = MultiPoly::add(ball, MultiPoly::scale(MultiPoly::mul(xi, xi), e2));
    }

    for (const auto& p : polys) out.polys.push_back(homogenize_Y(p));
    const int ball_index = static_cast<int>(out.polys.size());
    out.polys.push_back(homogenize_Y(ball));
    out.phi = PClosedFormula::conj({phi, PClosedFormula::atom(ball_index, Rel::Le)});
    return out;
}

// --- Fiber invariants --------------------------------------------------------

// Homotopy-proxy data for one fiber: sampled (or closed-form) Betti numbers
// plus the index histogram of the combined forms over a coarse Omega mesh.
struct FiberInvariant {
    BettiVector betti;
    std::map<int, int> index_histogram;
    bool empty = false;
    bool exact = false;  // true when the closed form was used instead of sampling

    // proxy identity: two fibers are indistinguishable at proxy level when
    // these agree
    std::string proxy_key() const {
        std::ostringstream os;
        os << (empty ? "E" : "F");
        for (long v : betti.trimmed()) os << ":" << v;
        os << "|";
        for (const auto& [j, c] : index_histogram) os << j << "=" << c << ",";
        return os.str();
    }

    nlohmann::json to_json() const {
        nlohmann::json hist = nlohmann::json::object();
        for (const auto& [j, c] : index_histogram) hist[std::to_string(j)] = c;
        return {{"betti", betti.trimmed()},
                {"empty", empty},
                {"exact", exact},
                {"index_histogram", hist}};
    }
};

namespace detail {

inline std::map<int, int> index_histogram(const QuadFamily& fam, const std::vector<Rat>& x,
                                          int depth = 2) {
    std::set<int> full;
    for (int i = 1; i <= fam.m; ++i) full.insert(i);
    const OmegaMesh mesh = mesh_omega(full, fam.m == 1 ? 0 : depth);
    std::map<int, int> hist;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const QuadForm q = omega_combine(fam, mesh.omega_full(fam.m, v), x);
        ++hist[index_descartes(char_poly(q)).neg];
    }
    return hist;
}

}  // namespace detail

// Invariant of the fiber {y in S^l : phi(Q_1(y,x), ..., Q_m(y,x))}. The
// single-atom cases use the exact eigenvalue-count closed form (the set
// deformation-retracts onto the sphere of the non-positive eigenspace);
// everything else goes through the sampling oracle.
inline FiberInvariant fiber_invariant(const QuadFamily& fam, const PClosedFormula& phi,
                                      const std::vector<Rat>& x, const OracleConfig& cfg) {
    if (phi.max_atom_index() >= fam.m)
        throw Error("bad_atom", "formula references a missing form");
    FiberInvariant out;
    out.index_histogram = detail::index_histogram(fam, x);

    if (phi.kind == PClosedFormula::Kind::Atom && phi.rel != Rel::Eq) {
        const QuadForm q = fam.form_at(phi.atom_index, x);
        const Signature s = signature_of(q);
        // {Q <= 0} retracts onto the sphere of the non-positive eigenspace;
        // {Q >= 0} is the mirror case
        const int dim_plus_1 = (phi.rel == Rel::Le) ? s.neg + s.zero : s.pos + s.zero;
        out.exact = true;
        if (dim_plus_1 == 0) {
            out.empty = true;
            out.betti.field = cfg.field;
        } else {
            out.betti = betti(sphere_complex(dim_plus_1 - 1), cfg.field);
        }
        return out;
    }

    const auto mats = detail::forms_as_doubles(fam, x);
    auto pred = [&](const std::vector<double>& y) {
        return detail::eval_tree(phi, [&](int idx) {
            const double v = detail::quad_value(mats[static_cast<std::size_t>(idx)], y);
            if (std::abs(v) <= 1e-9) return 0;
            return v < 0 ? -1 : 1;
        });
    };
    const auto sample = sphere_sample(pred, fam.l, cfg.budget, cfg.seed, 3);
    const auto oracle = betti_oracle(sample.points, cfg);
    out.betti = oracle.betti;
    out.empty = oracle.empty;
    return out;
}

// --- Example families --------------------------------------------------------

// A runnable instance: either a quadratic family with a formula over its
// forms, or a polynomial system whose solution set is a finite candidate
// lattice (evaluated by direct enumeration).
struct ExampleBundle {
    std::string name;
    bool lattice = false;

    // quadratic kind
    QuadFamily fam;
    PClosedFormula phi;

    // lattice kind: polynomials in y/x variables, formula over them, and the
    // finite candidate set in y-space
    std::vector<MultiPoly> polys;
    std::vector<std::vector<Rat>> candidates;
    int k = 1;

    std::pair<Rat, Rat> segment{Rat(-2), Rat(2)};
    nlohmann::json expected;

    std::map<std::string, Rat> lattice_point(const std::vector<Rat>& y,
                                             const std::vector<Rat>& x) const {
        std::map<std::string, Rat> pt;
        for (std::size_t i = 0; i < y.size(); ++i) pt["y" + std::to_string(i + 1)] = y[i];
        for (std::size_t i = 0; i < x.size(); ++i) pt["x" + std::to_string(i + 1)] = x[i];
        return pt;
    }

    // component count of the (finite) lattice fiber at x
    long lattice_count(const std::vector<Rat>& x) const {
        long n = 0;
        for (const auto& y : candidates)
            if (eval_formula(phi, polys, lattice_point(y, x))) ++n;
        return n;
    }

    FiberInvariant invariant_at(const std::vector<Rat>& x, const OracleConfig& cfg) const {
        if (!lattice) return fiber_invariant(fam, phi, x, cfg);
        FiberInvariant out;
        const long n = lattice_count(x);
        out.exact = true;
        out.empty = (n == 0);
        out.betti.field = cfg.field;
        if (n > 0) out.betti.b = {n};
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j{{"name", name},
                         {"lattice", lattice},
                         {"phi", phi.to_json()},
                         {"segment", {rat_str(segment.first), rat_str(segment.second)}},
                         {"expected", expected}};
        if (lattice) {
            j["k"] = k;
            nlohmann::json ps = nlohmann::json::array();
            for (const auto& p : polys) ps.push_back(p.to_json());
            j["polys"] = ps;
            nlohmann::json cs = nlohmann::json::array();
            for (const auto& c : candidates) {
                nlohmann::json row = nlohmann::json::array();
                for (const auto& v : c) row.push_back(rat_str(v));
                cs.push_back(row);
            }
            j["candidates"] = cs;
        } else {
            j["family"] = fam.to_json();
        }
        return j;
    }

    static ExampleBundle from_json(const nlohmann::json& j) {
        ExampleBundle b;
        b.name = j.value("name", "");
        b.lattice = j.value("lattice", false);
        b.phi = PClosedFormula::from_json(j.at("phi"));
        if (j.contains("segment"))
            b.segment = {rat_parse(j["segment"][0].get<std::string>()),
                         rat_parse(j["segment"][1].get<std::string>())};
        if (j.contains("expected")) b.expected = j["expected"];
        if (b.lattice) {
            b.k = j.value("k", 1);
            for (const auto& p : j.at("polys")) b.polys.push_back(MultiPoly::from_json(p));
            for (const auto& row : j.at("candidates")) {
                std::vector<Rat> c;
                for (const auto& v : row) c.push_back(rat_parse(v.get<std::string>()));
                b.candidates.push_back(std::move(c));
            }
        } else {
            b.fam = QuadFamily::from_json(j.at("family"));
            b.k = b.fam.k;
        }
        return b;
    }
};

inline std::vector<std::string> example_names() {
    return {"grid-lines", "binary-components", "wall-pencil", "single-pencil"};
}

inline ExampleBundle example_family(const std::string& name) {
    ExampleBundle b;
    b.name = name;
    const MultiPoly y1 = MultiPoly::variable("y1", 1);
    const MultiPoly y2 = MultiPoly::variable("y2", 1);
    const MultiPoly x1 = MultiPoly::variable("x1", 1);

    if (name == "single-pencil") {
        // Q = y0^2 + y1^2 - x1 y2^2 on S^2: empty for x1 < 0, a point pair
        // from x1 = 0 on
        b.fam.m = 1;
        b.fam.l = 2;
        b.fam.k = 1;
        b.fam.d = 1;
        std::vector<std::vector<MultiPoly>> mat(3, std::vector<MultiPoly>(3, MultiPoly::zero()));
        mat[0][0] = MultiPoly::constant(Rat(1));
        mat[1][1] = MultiPoly::constant(Rat(1));
        mat[2][2] = MultiPoly::neg(x1);
        b.fam.forms.push_back(mat);
        b.fam.validate();
        b.phi = PClosedFormula::atom(0, Rel::Le);
        b.segment = {Rat(-2), Rat(2)};
        b.expected = {{"walls", {"0"}}, {"distinct_count", 2}};
        b.k = 1;
        return b;
    }

    if (name == "wall-pencil") {
        // Q = x1 y1^2 + x2 y2^2 on S^2 (k = 2): fiber type changes with the
        // signs of the coefficients
        b.fam.m = 1;
        b.fam.l = 2;
        b.fam.k = 2;
        b.fam.d = 1;
        std::vector<std::vector<MultiPoly>> mat(3, std::vector<MultiPoly>(3, MultiPoly::zero()));
        mat[1][1] = x1;
        mat[2][2] = MultiPoly::variable("x2", 1);
        b.fam.forms.push_back(mat);
        b.fam.validate();
        b.phi = PClosedFormula::atom(0, Rel::Le);
        b.expected = {{"betti_at_1_1", {2}}, {"betti_at_m1_1", {1, 1}}};
        b.k = 2;
        return b;
    }

    // shared lattice scaffold for the two enumeration families:
    // candidates {0,1}^2, gate x1 >= 0, threshold y1 + 2 y2 - x1 >= 0
    const MultiPoly p_y1 = MultiPoly::sub(MultiPoly::mul(y1, y1), y1);  // y1^2 - y1
    const MultiPoly p_y2 = MultiPoly::sub(MultiPoly::mul(y2, y2), y2);  // y2^2 - y2
    const MultiPoly thresh =
        MultiPoly::sub(MultiPoly::add(y1, MultiPoly::scale(y2, Rat(2))), x1);
    for (long a : {0L, 1L})
        for (long c : {0L, 1L}) b.candidates.push_back({Rat(a), Rat(c)});
    b.lattice = true;
    b.k = 1;
    b.segment = {rat(-1, 2), rat(7, 2)};

    if (name == "binary-components") {
        b.polys = {p_y1, p_y2, x1, thresh};
        b.phi = PClosedFormula::conj({PClosedFormula::atom(0, Rel::Eq),
                                      PClosedFormula::atom(1, Rel::Eq),
                                      PClosedFormula::atom(2, Rel::Ge),
                                      PClosedFormula::atom(3, Rel::Ge)});
        b.expected = {{"walls", {"0", "1", "2", "3"}},
                      {"distinct_count", 5},
                      {"b0_multiset", {4, 3, 2, 1, 0}}};
        return b;
    }

    if (name == "grid-lines") {
        // single equation: sum over i of prod over j in {0, 1} of (y_i - j)^2
        const MultiPoly p =
            MultiPoly::add(MultiPoly::mul(p_y1, p_y1), MultiPoly::mul(p_y2, p_y2));
        b.polys = {p, x1, thresh};
        b.phi = PClosedFormula::conj({PClosedFormula::atom(0, Rel::Eq),
                                      PClosedFormula::atom(1, Rel::Ge),
                                      PClosedFormula::atom(2, Rel::Ge)});
        b.expected = {{"walls", {"0", "1", "2", "3"}},
                      {"distinct_count", 5},
                      {"b0_at_integers", {4, 3, 2, 1}}};
        return b;
    }

    throw Error("unknown_example", "no such example family", {{"name", name}});
}

// --- Wall sweep ---------------------------------------------------------------

namespace detail {

// Simplest rational (smallest denominator, then smallest numerator) in the
// closed interval [lo, hi]; Stern-Brocot style.
inline Rat simplest_rational(const Rat& lo, const Rat& hi) {
    if (lo > hi) throw Error("bad_interval", "lo > hi");
    if (lo == hi) return lo;
    if (lo <= 0 && 0 <= hi) return Rat(0);
    if (hi < 0) return -simplest_rational(-hi, -lo);
    // 0 < lo < hi
    mpz_class fl = lo.get_num() / lo.get_den();  // floor for positive lo
    if (Rat(fl + 1) <= hi) return Rat(fl + (lo == Rat(fl) ? 0 : 1));
    const Rat a = lo - Rat(fl), b = hi - Rat(fl);
    if (a == 0) return Rat(fl);
    // both fractional parts in (0, 1): recurse on reciprocals
    const Rat r = simplest_rational(Rat(1) / b, Rat(1) / a);
    return Rat(fl) + Rat(1) / r;
}

using Profile = std::vector<long>;

inline std::vector<Rat> walls_from_profile(const std::function<Profile(const Rat&)>& profile,
                                           const std::pair<Rat, Rat>& segment, int resolution,
                                           const Rat& tol) {
    if (resolution < 2) throw Error("bad_resolution", "resolution must be >= 2");
    if (segment.first >= segment.second) throw Error("bad_segment", "empty segment");
    const Rat step = (segment.second - segment.first) / resolution;

    std::vector<Rat> grid;
    std::vector<Profile> profs;
    for (int i = 0; i <= resolution; ++i) {
        grid.push_back(segment.first + step * i);
        profs.push_back(profile(grid.back()));
    }

    std::vector<Rat> walls;
    for (int i = 0; i + 1 <= resolution; ++i) {
        if (profs[static_cast<std::size_t>(i)] == profs[static_cast<std::size_t>(i) + 1])
            continue;
        Rat lo = grid[static_cast<std::size_t>(i)], hi = grid[static_cast<std::size_t>(i) + 1];
        Profile plo = profs[static_cast<std::size_t>(i)];
        while (hi - lo > tol) {
            const Rat mid = (lo + hi) / 2;
            if (profile(mid) == plo)
                lo = mid;
            else
                hi = mid;
        }
        walls.push_back(simplest_rational(lo, hi));
    }

    // merge walls that bisection found twice (profile changes at and just
    // after the same location); keep the simplest representative
    std::sort(walls.begin(), walls.end());
    std::vector<Rat> out;
    const Rat merge_tol = rat(1, 10000000);
    for (const auto& w : walls) {
        if (!out.empty() && w - out.back() <= merge_tol) {
            if (w.get_den() < out.back().get_den()) out.back() = w;
        } else {
            out.push_back(w);
        }
    }
    return out;
}

}  // namespace detail

// Scans the segment for changes of the exact per-vertex profile (H-sign
// vectors and index over a fixed Omega sample) and bisects each change down
// to the ladder's finest scale, snapping to the simplest rational in the
// final bracket.
inline std::vector<Rat> wall_sweep(const QuadFamily& fam, const std::pair<Rat, Rat>& segment,
                                   int resolution, const EpsDeltaLadder& ladder) {
    if (fam.k != 1) throw Error("unsupported_dimension", "wall sweep needs k = 1");
    std::set<int> full;
    for (int i = 1; i <= fam.m; ++i) full.insert(i);
    const OmegaMesh mesh = mesh_omega(full, fam.m == 1 ? 0 : 2);

    // profile = exact signature (negative and zero eigenvalue counts) of the
    // combined form at every sample direction; signature changes are exactly
    // the eigenvalue zero-crossings, whereas raw characteristic-coefficient
    // signs also vanish at non-structural cancellations
    auto profile = [&](const Rat& x) {
        detail::Profile p;
        for (int v = 0; v < mesh.vertex_count(); ++v) {
            const QuadForm q = omega_combine(fam, mesh.omega_full(fam.m, v), {x});
            const Signature s = index_descartes(char_poly(q));
            p.push_back(s.neg);
            p.push_back(s.zero);
        }
        return p;
    };
    return detail::walls_from_profile(profile, segment, resolution, ladder.delta[0]);
}

// Lattice-kind walls: profile = candidate count.
inline std::vector<Rat> wall_sweep(const ExampleBundle& bundle,
                                   const std::pair<Rat, Rat>& segment, int resolution,
                                   const EpsDeltaLadder& ladder) {
    if (!bundle.lattice) return wall_sweep(bundle.fam, segment, resolution, ladder);
    auto profile = [&](const Rat& x) { return detail::Profile{bundle.lattice_count({x})}; };
    return detail::walls_from_profile(profile, segment, resolution, ladder.delta[0]);
}

// One representative per open cell between consecutive walls.
inline std::vector<Rat> representatives(const std::vector<Rat>& walls,
                                        const std::pair<Rat, Rat>& segment) {
    if (segment.first >= segment.second) throw Error("bad_segment", "empty segment");
    std::vector<Rat> cuts = {segment.first};
    for (const auto& w : walls) {
        if (w <= segment.first || w >= segment.second)
            throw Error("bad_walls", "wall outside the open segment");
        if (w <= cuts.back()) throw Error("bad_walls", "walls not strictly increasing");
        cuts.push_back(w);
    }
    cuts.push_back(segment.second);
    std::vector<Rat> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) out.push_back((cuts[i] + cuts[i + 1]) / 2);
    return out;
}

// --- Census -------------------------------------------------------------------

struct BoundParams {
    int m = 1, l = 1, k = 1, d = 1;
    int C = 1;

    void validate() const {
        if (m < 1 || l < 1 || k < 1 || d < 1 || C < 1)
            throw Error("bad_params", "all bound parameters must be positive");
    }
};

inline mpz_class bound_main(const BoundParams& p) {
    p.validate();
    mpz_class base = 1;
    mpz_mul_2exp(base.get_mpz_t(), base.get_mpz_t(), static_cast<mp_bitcnt_t>(p.m));
    base *= p.l * p.k * p.d;
    mpz_class out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(),
               static_cast<unsigned long>(p.C) * p.m * p.k);
    return out;
}

struct AuxBoundParams {
    int M = 0;  // metric bound base (number of balls); 0 = not supplied
    int n = 0;  // projection: ambient dimension
    int s = 0;  // projection: number of polynomials
    int c = 1;  // metric exponent constant
};

inline nlohmann::json bound_others(const BoundParams& p, const AuxBoundParams& aux = {}) {
    p.validate();
    nlohmann::json out;
    mpz_class t;

    mpz_class base = p.m * p.l;
    mpz_pow_ui(t.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(p.C) * p.m);
    out["barvinok"] = t.get_str();

    base = 1;
    mpz_mul_2exp(base.get_mpz_t(), base.get_mpz_t(), static_cast<mp_bitcnt_t>(p.l));
    base *= p.m * p.k * p.d;
    mpz_pow_ui(t.get_mpz_t(), base.get_mpz_t(),
               static_cast<unsigned long>(p.C) * p.k * p.l);
    out["general"] = t.get_str();

    if (aux.n > 0 && aux.s > 0) {
        base = mpz_class(aux.n) * aux.s * p.d;
        mpz_pow_ui(t.get_mpz_t(), base.get_mpz_t(),
                   static_cast<unsigned long>(p.C) * (p.k + aux.n * p.m));
        out["projection"] = t.get_str();
    } else if (aux.n > 0 || aux.s > 0) {
        throw Error("missing_parameter", "projection bound needs both n and s");
    }

    if (aux.M > 0) {
        if (aux.c < 1) throw Error("missing_parameter", "metric bound needs c >= 1");
        mpz_class expo;
        mpz_pow_ui(expo.get_mpz_t(), mpz_class(p.l).get_mpz_t(),
                   static_cast<unsigned long>(aux.c) * p.m);
        if (!expo.fits_ulong_p())
            throw Error("bad_params", "metric bound exponent too large");
        mpz_pow_ui(t.get_mpz_t(), mpz_class(aux.M).get_mpz_t(), expo.get_ui());
        out["metric"] = t.get_str();
    }
    return out;
}

struct SweepRow {
    Rat x;
    bool is_wall = false;
    FiberInvariant invariant;
};

struct SweepReport {
    nlohmann::json inputs;
    std::vector<Rat> walls;
    std::vector<Rat> representatives;
    std::vector<SweepRow> rows;  // representatives then walls, in x order
    int distinct_count = 0;
    nlohmann::json bound_comparisons;
    std::string note =
        "distinct_count compares invariants at proxy level (Betti numbers and "
        "index histogram); equal rows are indistinguishable at proxy level, "
        "not certified equivalent";

    nlohmann::json to_json() const {
        nlohmann::json jw = nlohmann::json::array(), jt = nlohmann::json::array(),
                       jr = nlohmann::json::array();
        for (const auto& w : walls) jw.push_back(rat_str(w));
        for (const auto& t : representatives) jt.push_back(rat_str(t));
        for (const auto& r : rows)
            jr.push_back({{"x", rat_str(r.x)},
                          {"is_wall", r.is_wall},
                          {"invariant", r.invariant.to_json()}});
        return {{"inputs", inputs},
                {"walls", jw},
                {"representatives", jt},
                {"rows", jr},
                {"distinct_count", distinct_count},
                {"bound_comparisons", bound_comparisons},
                {"note", note}};
    }

    std::string to_csv() const {
        std::ostringstream os;
        os << "x,is_wall,empty,betti,proxy_key\n";
        for (const auto& r : rows) {
            os << rat_str(r.x) << "," << (r.is_wall ? 1 : 0) << ","
               << (r.invariant.empty ? 1 : 0) << ",\"";
            const auto b = r.invariant.betti.trimmed();
            for (std::size_t i = 0; i < b.size(); ++i) os << (i ? " " : "") << b[i];
            os << "\",\"" << r.invariant.proxy_key() << "\"\n";
        }
        return os.str();
    }
};

// Evaluates the invariant at every representative and at every wall point
// (wall fibers can realize classes of measure zero in the parameter, so
// dropping them would undercount), then counts distinct proxy classes.
inline SweepReport census(const ExampleBundle& bundle, const std::vector<Rat>& walls,
                          const std::pair<Rat, Rat>& segment, const OracleConfig& cfg,
                          const BoundParams& bp) {
    SweepReport rep;
    rep.walls = walls;
    rep.representatives = representatives(walls, segment);
    if (rep.representatives.empty()) throw Error("bad_segment", "no representatives");

    std::vector<std::pair<Rat, bool>> points;
    for (const auto& t : rep.representatives) points.push_back({t, false});
    for (const auto& w : walls) points.push_back({w, true});
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::set<std::string> classes;
    for (const auto& [x, is_wall] : points) {
        SweepRow row;
        row.x = x;
        row.is_wall = is_wall;
        row.invariant = bundle.invariant_at({x}, cfg);
        classes.insert(row.invariant.proxy_key());
        rep.rows.push_back(std::move(row));
    }
    rep.distinct_count = static_cast<int>(classes.size());

    rep.bound_comparisons = bound_others(bp);
    rep.bound_comparisons["main"] = bound_main(bp).get_str();
    rep.bound_comparisons["C"] = bp.C;
    rep.bound_comparisons["within_main_bound"] =
        mpz_class(rep.distinct_count) <= bound_main(bp);
    rep.inputs = {{"segment", {rat_str(segment.first), rat_str(segment.second)}},
                  {"oracle", cfg.to_json()},
                  {"family", bundle.name.empty() ? "(inline)" : bundle.name}};
    return rep;
}

// Full pipeline for k = 1 bundles: walls, representatives, census.
inline SweepReport run_sweep(const ExampleBundle& bundle, const std::pair<Rat, Rat>& segment,
                             int resolution, const Rat& eta, const OracleConfig& cfg,
                             const BoundParams& bp) {
    if (bundle.k != 1) throw Error("unsupported_dimension", "sweep needs k = 1");
    const int l = bundle.lattice ? static_cast<int>(bundle.candidates.front().size())
                                 : bundle.fam.l;
    const EpsDeltaLadder ladder = build_ladder(l, eta);
    const auto walls = wall_sweep(bundle, segment, resolution, ladder);
    SweepReport rep = census(bundle, walls, segment, cfg, bp);
    rep.inputs["resolution"] = resolution;
    rep.inputs["eta"] = rat_str(eta);
    rep.inputs["ladder"] = ladder.to_json();
    return rep;
}

}  // namespace quadtope

#endif
