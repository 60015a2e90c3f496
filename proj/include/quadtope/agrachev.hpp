#ifndef QUADTOPE_AGRACHEV_HPP
#define QUADTOPE_AGRACHEV_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include <json.hpp>

#include "quadtope/error.hpp"
#include "quadtope/homology.hpp"
#include "quadtope/qform.hpp"
#include "quadtope/rat.hpp"
#include "quadtope/rng.hpp"
#include "quadtope/strata.hpp"

namespace quadtope {

namespace detail {

// Double matrices of the family forms at a fixed rational parameter point.
inline std::vector<std::vector<std::vector<double>>> forms_as_doubles(
    const QuadFamily& fam, const std::vector<Rat>& x) {
    std::vector<std::vector<std::vector<double>>> out;
    for (int i = 0; i < fam.m; ++i) {
        const QuadForm q = fam.form_at(i, x);
        std::vector<std::vector<double>> a(q.m.size(), std::vector<double>(q.m.size()));
        for (std::size_t r = 0; r < q.m.size(); ++r)
            for (std::size_t c = 0; c < q.m.size(); ++c) a[r][c] = rat_double(q.m[r][c]);
        out.push_back(std::move(a));
    }
    return out;
}

inline double quad_value(const std::vector<std::vector<double>>& a,
                         const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r)
        for (std::size_t c = 0; c < a.size(); ++c) s += a[r][c] * y[r] * y[c];
    return s;
}

}  // namespace detail

// Point-set membership test for the union region on the sphere:
// y is in the region iff some selected form is <= 0 at y.
inline std::function<bool(const std::vector<double>&)> union_region_predicate(
    const QuadFamily& fam, const std::vector<Rat>& x, const std::set<int>& I) {
    auto mats = detail::forms_as_doubles(fam, x);
    std::vector<int> sel(I.begin(), I.end());
    return [mats = std::move(mats), sel = std::move(sel)](const std::vector<double>& y) {
        for (int i : sel)
            if (detail::quad_value(mats[static_cast<std::size_t>(i - 1)], y) <= 0) return true;
        return false;
    };
}

// Product samples from the flag region: pairs (omega, y) with omega on the
// nonpositive coordinate patch of the sphere (supported on I), y on S^l,
// accepted when sum_i omega_i Q_i(y, x) >= 0. Stored as concatenated
// coordinates; the product metric is Euclidean on the join coordinates.
struct ProductSample {
    std::vector<std::vector<double>> points;  // [omega (m coords) | y (l+1 coords)]
    int omega_dim = 0;
    int y_dim = 0;
    double acceptance_rate = 0.0;
    bool possibly_empty = false;
};

inline ProductSample sample_B(const QuadFamily& fam, const std::vector<Rat>& x,
                              const std::set<int>& I, int n, std::uint64_t seed) {
    if (n < 1) throw Error("bad_budget", "sample budget must be >= 1");
    if (I.empty()) throw Error("bad_subset", "I must be nonempty");
    for (int i : I)
        if (i < 1 || i > fam.m) throw Error("bad_subset", "I not contained in [m]");

    const auto mats = detail::forms_as_doubles(fam, x);
    const std::vector<int> sel(I.begin(), I.end());
    CounterRng rng(seed, 5);

    ProductSample out;
    out.omega_dim = fam.m;
    out.y_dim = fam.l + 1;
    for (int t = 0; t < n; ++t) {
        // uniform on the nonpositive orthant patch of the #I-sphere
        const auto raw = rng.sphere_point(static_cast<int>(sel.size()) - 1);
        std::vector<double> omega(static_cast<std::size_t>(fam.m), 0.0);
        for (std::size_t s = 0; s < sel.size(); ++s)
            omega[static_cast<std::size_t>(sel[s] - 1)] = -std::abs(raw[s]);
        const auto y = rng.sphere_point(fam.l);
        double v = 0.0;
        for (int i : sel)
            v += omega[static_cast<std::size_t>(i - 1)] *
                 detail::quad_value(mats[static_cast<std::size_t>(i - 1)], y);
        if (v >= 0.0) {
            std::vector<double> p = omega;
            p.insert(p.end(), y.begin(), y.end());
            out.points.push_back(std::move(p));
        }
    }
    out.acceptance_rate = static_cast<double>(out.points.size()) / static_cast<double>(n);
    out.possibly_empty = out.points.empty();
    return out;
}

struct AuditReport {
    bool match = false;
    BettiVector left;
    BettiVector right;
    bool left_empty = false;
    bool right_empty = false;
    nlohmann::json details;

    nlohmann::json to_json() const {
        return {{"match", match},
                {"left_betti", left.b},
                {"right_betti", right.b},
                {"left_empty", left_empty},
                {"right_empty", right_empty},
                {"details", details}};
    }
};

// Compares the sampled homology of the flag region B (in the product) with
// the sampled homology of its sphere projection A (the union region).
inline AuditReport audit_A_equals_B(const QuadFamily& fam, const std::vector<Rat>& x,
                                    const std::set<int>& I, const OracleConfig& cfg) {
    AuditReport rep;

    const auto a_sample = sphere_sample(union_region_predicate(fam, x, I), fam.l,
                                        cfg.budget, cfg.seed, 2);
    const auto a = betti_oracle(a_sample.points, cfg);

    const auto b_sample = sample_B(fam, x, I, cfg.budget, cfg.seed);
    const auto b = betti_oracle(b_sample.points, cfg);

    rep.left = a.betti;
    rep.right = b.betti;
    rep.left_empty = a.empty;
    rep.right_empty = b.empty;
    rep.match = (a.empty && b.empty) ||
                (!a.empty && !b.empty && a.betti.b == b.betti.b);
    rep.details = {{"a_acceptance", a_sample.acceptance_rate},
                   {"b_acceptance", b_sample.acceptance_rate},
                   {"a_radius", a.radius},
                   {"b_radius", b.radius},
                   {"config", cfg.to_json()}};
    return rep;
}

// Constructive total space of the sphere-bundle decomposition over a base
// of dimension <= 1. Over an index-j vertex the fiber is the cross-polytope
// model of S^{l-j}; over an edge the fiber is S^{l - max of the endpoint
// indices}, included into both endpoint fibers by the coordinate equatorial
// embedding (shared vertex labels).
struct BundleModel {
    OmegaMesh base;
    IndexFiltration filtration;
    FrameField frames;
    std::vector<int> fiber_dims;  // per base vertex; -1 marks the empty fiber
    SimplicialComplex total;
    long block_cells = 0;   // prism/fiber cells before face closure
    int vertex_stride = 0;  // total-space vertex id = base_vertex * stride + fiber_vertex
};

inline BundleModel build_bundle_model(const QuadFamily& fam, const std::vector<Rat>& x,
                                      const std::set<int>& I, int depth) {
    if (I.size() > 2)
        throw Error("unsupported_dimension",
                    "bundle model supports base dimension <= 1 (#I <= 2)",
                    {{"I_size", I.size()}});
    BundleModel model;
    model.base = mesh_omega(I, depth);
    model.filtration = index_filtration(fam, x, model.base);
    model.frames = frame_field(fam, x, model.filtration);
    model.vertex_stride = 2 * (fam.l + 1);

    for (int v = 0; v < model.base.vertex_count(); ++v) {
        const int j = model.filtration.vertex_index[static_cast<std::size_t>(v)];
        model.fiber_dims.push_back(j <= fam.l ? fam.l - j : -1);
    }

    std::vector<Simplex> cells;
    auto lift = [&](int base_v, int fiber_v) {
        return base_v * model.vertex_stride + fiber_v;
    };

    // vertex blocks: one fiber sphere per base vertex
    for (int v = 0; v < model.base.vertex_count(); ++v) {
        const int fd = model.fiber_dims[static_cast<std::size_t>(v)];
        if (fd < 0) continue;
        const SimplicialComplex fiber = sphere_complex(fd);
        for (const auto& s : fiber.by_dim()[static_cast<std::size_t>(fiber.dim())]) {
            Simplex lifted;
            for (int fv : s) lifted.push_back(lift(v, fv));
            cells.push_back(std::move(lifted));
            ++model.block_cells;
        }
    }

    // edge blocks: prisms over the smaller fiber, glued by shared labels
    const SimplicialComplex base_full = SimplicialComplex::closure(model.base.simplices);
    if (base_full.dim() >= 1) {
        for (const auto& e : base_full.by_dim()[1]) {
            const int ju = model.filtration.vertex_index[static_cast<std::size_t>(e[0])];
            const int jv = model.filtration.vertex_index[static_cast<std::size_t>(e[1])];
            const int j = std::max(ju, jv);
            if (j > fam.l) continue;  // an empty endpoint fiber: no edge block
            const SimplicialComplex fiber = sphere_complex(fam.l - j);
            for (const auto& s : fiber.by_dim()[static_cast<std::size_t>(fiber.dim())]) {
                // standard prism triangulation of s x [u, v]
                const int d = static_cast<int>(s.size());
                for (int cut = 0; cut < d; ++cut) {
                    Simplex lifted;
                    for (int t = 0; t <= cut; ++t) lifted.push_back(lift(e[0], s[static_cast<std::size_t>(t)]));
                    for (int t = cut; t < d; ++t) lifted.push_back(lift(e[1], s[static_cast<std::size_t>(t)]));
                    std::sort(lifted.begin(), lifted.end());
                    cells.push_back(std::move(lifted));
                    ++model.block_cells;
                }
            }
        }
    }

    model.total = SimplicialComplex::closure(cells);
    return model;
}

// Compares the homology of the constructed bundle total space with the
// sampled homology of the union region it models.
inline AuditReport audit_C_prime(const QuadFamily& fam, const std::vector<Rat>& x,
                                 const std::set<int>& I, int depth,
                                 const OracleConfig& cfg) {
    AuditReport rep;
    const BundleModel model = build_bundle_model(fam, x, I, depth);
    BettiVector model_b = betti(model.total, cfg.field);
    if (model_b.b.size() > static_cast<std::size_t>(cfg.max_dim))
        model_b.b.resize(static_cast<std::size_t>(cfg.max_dim));

    const auto a_sample = sphere_sample(union_region_predicate(fam, x, I), fam.l,
                                        cfg.budget, cfg.seed, 2);
    const auto a = betti_oracle(a_sample.points, cfg);

    rep.left = model_b;
    rep.right = a.betti;
    rep.left_empty = model.total.empty();
    rep.right_empty = a.empty;
    rep.match = (rep.left_empty && rep.right_empty) ||
                (!rep.left_empty && !rep.right_empty &&
                 model_b.trimmed() == a.betti.trimmed());
    rep.details = {{"depth", depth},
                   {"block_cells", model.block_cells},
                   {"max_frame_angle", model.frames.max_angle},
                   {"a_acceptance", a_sample.acceptance_rate},
                   {"a_radius", a.radius},
                   {"config", cfg.to_json()}};
    return rep;
}

}  // namespace quadtope

#endif
