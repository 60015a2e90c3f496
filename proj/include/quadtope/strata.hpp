#ifndef QUADTOPE_STRATA_HPP
#define QUADTOPE_STRATA_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadtope/error.hpp"
#include "quadtope/homology.hpp"
#include "quadtope/qform.hpp"
#include "quadtope/rat.hpp"

namespace quadtope {

// Triangulation of the spherical region {omega_i <= 0 for i in I,
// omega_i = 0 otherwise, |omega| = 1}. Vertices are stored both as the
// exact rational barycentric points (pre-normalization) and as the
// radially projected floats.
struct OmegaMesh {
    std::vector<int> I;                        // sorted, 1-based indices into [m]
    std::vector<std::vector<Rat>> raw;         // per vertex, length #I, entries <= 0
    std::vector<std::vector<double>> vertices; // unit vectors, length #I
    std::vector<Simplex> simplices;            // top-dimensional cells

    int vertex_count() const { return static_cast<int>(raw.size()); }

    // Full-length coefficient vector with the off-I slots zero.
    std::vector<Rat> omega_full(int m, int v) const {
        std::vector<Rat> out(static_cast<std::size_t>(m), Rat(0));
        for (std::size_t t = 0; t < I.size(); ++t)
            out[static_cast<std::size_t>(I[t] - 1)] = raw[static_cast<std::size_t>(v)][t];
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json jv = nlohmann::json::array(), jr = nlohmann::json::array(),
                       js = nlohmann::json::array();
        for (const auto& v : vertices) jv.push_back(v);
        for (const auto& r : raw) {
            nlohmann::json row = nlohmann::json::array();
            for (const auto& c : r) row.push_back(rat_str(c));
            jr.push_back(row);
        }
        for (const auto& s : simplices) js.push_back(s);
        return {{"I", I}, {"vertices", jv}, {"raw", jr}, {"simplices", js}};
    }
};

namespace detail {

// One barycentric subdivision. Vertices of the result are the barycenters
// of all faces; cells are the flags of the face poset, so refinement is
// deterministic given a deterministic face order.
inline void barycentric_subdivide(std::vector<std::vector<Rat>>& verts,
                                  std::vector<Simplex>& cells) {
    std::map<Simplex, int> face_id;
    std::vector<std::vector<Rat>> new_verts;
    std::set<Simplex> faces;
    for (const auto& c : cells) {
        const std::size_t n = c.size();
        for (std::uint64_t mask = 1; mask < (1ull << n); ++mask) {
            Simplex f;
            for (std::size_t t = 0; t < n; ++t)
                if (mask & (1ull << t)) f.push_back(c[t]);
            faces.insert(f);
        }
    }
    for (const auto& f : faces) {
        std::vector<Rat> b(verts[0].size(), Rat(0));
        for (int v : f)
            for (std::size_t t = 0; t < b.size(); ++t)
                b[t] += verts[static_cast<std::size_t>(v)][t];
        const Rat inv = rat(1, static_cast<long>(f.size()));
        for (auto& c : b) c *= inv;
        face_id[f] = static_cast<int>(new_verts.size());
        new_verts.push_back(std::move(b));
    }
    std::vector<Simplex> new_cells;
    for (const auto& c : cells) {
        // enumerate maximal chains of faces by inserting vertices one at a
        // time in every order
        std::vector<int> perm(c);
        std::sort(perm.begin(), perm.end());
        do {
            Simplex cell;
            Simplex f;
            for (int v : perm) {
                f.push_back(v);
                Simplex key = f;
                std::sort(key.begin(), key.end());
                cell.push_back(face_id.at(key));
            }
            std::sort(cell.begin(), cell.end());
            new_cells.push_back(std::move(cell));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    std::sort(new_cells.begin(), new_cells.end());
    new_cells.erase(std::unique(new_cells.begin(), new_cells.end()), new_cells.end());
    verts = std::move(new_verts);
    cells = std::move(new_cells);
}

}  // namespace detail

inline OmegaMesh mesh_omega(const std::set<int>& I, int depth) {
    if (I.empty()) throw Error("bad_subset", "I must be nonempty");
    if (depth < 0) throw Error("bad_depth", "depth must be >= 0");
    for (int i : I)
        if (i < 1) throw Error("bad_subset", "indices are 1-based");

    OmegaMesh mesh;
    mesh.I.assign(I.begin(), I.end());
    const std::size_t n = I.size();

    // coordinate simplex on {-e_i : i in I}
    std::vector<std::vector<Rat>> verts(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t t = 0; t < n; ++t) verts[t][t] = Rat(-1);
    Simplex top(n);
    for (std::size_t t = 0; t < n; ++t) top[t] = static_cast<int>(t);
    std::vector<Simplex> cells = {top};

    for (int r = 0; r < depth; ++r) detail::barycentric_subdivide(verts, cells);

    mesh.raw = verts;
    mesh.simplices = cells;
    for (const auto& v : verts) {
        double norm2 = 0.0;
        std::vector<double> p(n);
        for (std::size_t t = 0; t < n; ++t) {
            p[t] = rat_double(v[t]);
            norm2 += p[t] * p[t];
        }
        const double norm = std::sqrt(norm2);
        for (auto& c : p) c /= norm;
        mesh.vertices.push_back(std::move(p));
    }
    return mesh;
}

// Nested index level sets of the mesh at a fixed parameter point. The
// index per vertex is exact (computed at the rational pre-normalization
// point; the index is invariant under positive scaling).
struct IndexFiltration {
    OmegaMesh mesh;
    std::vector<Rat> x;
    std::vector<int> vertex_index;
    std::vector<SimplicialComplex> level_sets;  // level_sets[j] = F_j, j = 0..l+1
    std::vector<Simplex> warnings;              // edges whose endpoint indices differ by >= 2

    nlohmann::json to_json() const {
        nlohmann::json jx = nlohmann::json::array();
        for (const auto& c : x) jx.push_back(rat_str(c));
        nlohmann::json jw = nlohmann::json::array();
        for (const auto& e : warnings) jw.push_back(e);
        return {{"mesh", mesh.to_json()},
                {"x", jx},
                {"vertex_index", vertex_index},
                {"warnings", jw}};
    }
};

inline IndexFiltration index_filtration(const QuadFamily& fam, const std::vector<Rat>& x,
                                        const OmegaMesh& mesh) {
    if (static_cast<int>(x.size()) != fam.k) throw Error("bad_point", "x dimension mismatch");
    for (int i : mesh.I)
        if (i > fam.m) throw Error("bad_subset", "mesh index set exceeds family size");

    IndexFiltration out;
    out.mesh = mesh;
    out.x = x;
    out.vertex_index.resize(static_cast<std::size_t>(mesh.vertex_count()));
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const QuadForm q = omega_combine(fam, mesh.omega_full(fam.m, v), x);
        out.vertex_index[static_cast<std::size_t>(v)] = index_descartes(char_poly(q)).neg;
    }

    const SimplicialComplex full = SimplicialComplex::closure(mesh.simplices);
    for (int j = 0; j <= fam.l + 1; ++j) {
        std::set<int> keep;
        for (int v = 0; v < mesh.vertex_count(); ++v)
            if (out.vertex_index[static_cast<std::size_t>(v)] <= j) keep.insert(v);
        out.level_sets.push_back(full.restrict_to(keep));
    }

    if (full.dim() >= 1)
        for (const auto& e : full.by_dim()[1]) {
            const int a = out.vertex_index[static_cast<std::size_t>(e[0])];
            const int b = out.vertex_index[static_cast<std::size_t>(e[1])];
            if (std::abs(a - b) >= 2) out.warnings.push_back(e);
        }
    return out;
}

// Sphere dimension of the fiber over an index-j vertex; nullopt marks the
// empty fiber at j = l+1.
inline std::optional<int> fiber_dim(int j, int l) {
    if (j < 0 || j > l + 1) throw Error("bad_level", "j out of range", {{"j", j}, {"l", l}});
    if (j == l + 1) return std::nullopt;
    return l - j;
}

// Orthonormal bases of the non-negative eigenspaces over the mesh, with
// per-edge continuity diagnostics (largest principal angle between
// endpoint subspaces, reported only where the endpoint indices agree).
struct FrameField {
    std::vector<std::vector<std::vector<double>>> frames;  // frames[v][t] = t-th basis vector
    std::map<Simplex, double> edge_angles;
    double max_angle = 0.0;
};

namespace detail {

inline double max_principal_angle(const std::vector<std::vector<double>>& a,
                                  const std::vector<std::vector<double>>& b) {
    // singular values of A^T B; smallest singular value gives the largest
    // principal angle
    const std::size_t r = a.size();
    if (r != b.size()) throw Error("frame_mismatch", "subspace dimensions differ");
    if (r == 0) return 0.0;
    std::vector<std::vector<double>> g(r, std::vector<double>(r, 0.0));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            for (std::size_t t = 0; t < a[i].size(); ++t) g[i][j] += a[i][t] * b[j][t];
    std::vector<std::vector<double>> gtg(r, std::vector<double>(r, 0.0));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            for (std::size_t t = 0; t < r; ++t) gtg[i][j] += g[t][i] * g[t][j];
    const EigenDecomp d = jacobi_eigen(gtg, 1e-14);
    const double smin2 = std::clamp(d.values.front(), 0.0, 1.0);
    return std::acos(std::sqrt(smin2));
}

}  // namespace detail

inline FrameField frame_field(const QuadFamily& fam, const std::vector<Rat>& x,
                              const IndexFiltration& filt, double tol = 1e-9) {
    if (tol <= 0) throw Error("bad_tolerance", "tol must be positive");
    FrameField out;
    const OmegaMesh& mesh = filt.mesh;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const QuadForm q = omega_combine(fam, mesh.omega_full(fam.m, v), x);
        try {
            out.frames.push_back(positive_eigenspace(q, tol));
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), {{"vertex", v}, {"inner", e.details()}});
        }
        const int dim_plus = static_cast<int>(out.frames.back().size());
        if (dim_plus + filt.vertex_index[static_cast<std::size_t>(v)] != fam.l + 1)
            throw Error("frame_mismatch", "eigenspace dimension disagrees with index",
                        {{"vertex", v}});
    }
    const SimplicialComplex full = SimplicialComplex::closure(mesh.simplices);
    if (full.dim() < 1) return out;
    for (const auto& e : full.by_dim()[1]) {
        if (filt.vertex_index[static_cast<std::size_t>(e[0])] !=
            filt.vertex_index[static_cast<std::size_t>(e[1])])
            continue;
        const double ang = detail::max_principal_angle(
            out.frames[static_cast<std::size_t>(e[0])],
            out.frames[static_cast<std::size_t>(e[1])]);
        out.edge_angles[e] = ang;
        out.max_angle = std::max(out.max_angle, ang);
    }
    return out;
}

// One step of the explicit fiber retraction: scales the first j
// coordinates by (1-t) and rescales the tail to keep unit norm.
inline std::vector<double> retract_step(const std::vector<double>& w, int j, double t) {
    const int n = static_cast<int>(w.size());
    if (j < 0 || j > n) throw Error("bad_level", "j out of range");
    if (t < 0.0 || t > 1.0) throw Error("bad_time", "t outside [0,1]");
    double head = 0.0, tail = 0.0, norm = 0.0;
    for (int i = 0; i < n; ++i) {
        norm += w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
        (i < j ? head : tail) += w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
    }
    if (std::abs(norm - 1.0) > 1e-9)
        throw Error("bad_point", "input not unit norm", {{"norm", norm}});
    if (tail <= 0.0)
        throw Error("zero_tail", "retraction undefined: no mass on coordinates >= j",
                    {{"j", j}});
    if (t == 0.0) return w;  // identity by definition; avoid rounding drift
    const double tprime = std::sqrt((1.0 - (1.0 - t) * (1.0 - t) * head) / tail);
    std::vector<double> out(w.size());
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            (i < j ? (1.0 - t) : tprime) * w[static_cast<std::size_t>(i)];
    return out;
}

}  // namespace quadtope

#endif
