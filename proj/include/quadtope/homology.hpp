#ifndef QUADTOPE_HOMOLOGY_HPP
#define QUADTOPE_HOMOLOGY_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadtope/error.hpp"
#include "quadtope/rat.hpp"
#include "quadtope/rng.hpp"

namespace quadtope {

using Simplex = std::vector<int>;  // sorted vertex ids

// Finite simplicial complex, closed under faces by construction.
class SimplicialComplex {
public:
    SimplicialComplex() = default;

    // Builds the face closure of the given simplices.
    static SimplicialComplex closure(const std::vector<Simplex>& simplices) {
        SimplicialComplex k;
        std::set<Simplex> all;
        for (Simplex s : simplices) {
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            if (s.empty()) continue;
            // all nonempty subsets
            const std::size_t n = s.size();
            for (std::size_t mask = 1; mask < (1u << n); ++mask) {
                Simplex f;
                for (std::size_t b = 0; b < n; ++b)
                    if (mask & (1u << b)) f.push_back(s[b]);
                all.insert(f);
            }
        }
        for (const auto& s : all) k.insert_raw(s);
        return k;
    }

    const std::vector<std::vector<Simplex>>& by_dim() const { return dims_; }

    int dim() const { return static_cast<int>(dims_.size()) - 1; }

    bool empty() const { return dims_.empty(); }

    std::size_t count(int d) const {
        if (d < 0 || d > dim()) return 0;
        return dims_[static_cast<std::size_t>(d)].size();
    }

    bool contains(const Simplex& s) const {
        int d = static_cast<int>(s.size()) - 1;
        if (d < 0 || d > dim()) return false;
        const auto& v = dims_[static_cast<std::size_t>(d)];
        return std::binary_search(v.begin(), v.end(), s);
    }

    std::vector<int> vertices() const {
        std::vector<int> out;
        if (!dims_.empty())
            for (const auto& s : dims_[0]) out.push_back(s[0]);
        return out;
    }

    long euler() const {
        long chi = 0;
        for (int d = 0; d <= dim(); ++d)
            chi += (d % 2 == 0 ? 1 : -1) * static_cast<long>(count(d));
        return chi;
    }

    // Set-theoretic union / intersection of subcomplexes of a common complex.
    static SimplicialComplex unite(const SimplicialComplex& a, const SimplicialComplex& b) {
        SimplicialComplex out = a;
        for (int d = 0; d <= b.dim(); ++d)
            for (const auto& s : b.dims_[static_cast<std::size_t>(d)])
                if (!out.contains(s)) out.insert_raw(s);
        out.sort_all();
        return out;
    }

    static SimplicialComplex intersect(const SimplicialComplex& a, const SimplicialComplex& b) {
        SimplicialComplex out;
        for (int d = 0; d <= std::min(a.dim(), b.dim()); ++d)
            for (const auto& s : a.dims_[static_cast<std::size_t>(d)])
                if (b.contains(s)) out.insert_raw(s);
        return out;
    }

    // Induced subcomplex on a vertex subset.
    SimplicialComplex restrict_to(const std::set<int>& verts) const {
        SimplicialComplex out;
        for (int d = 0; d <= dim(); ++d)
            for (const auto& s : dims_[static_cast<std::size_t>(d)]) {
                bool keep = true;
                for (int v : s)
                    if (!verts.count(v)) {
                        keep = false;
                        break;
                    }
                if (keep) out.insert_raw(s);
            }
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["vertices"] = vertices();
        nlohmann::json ss = nlohmann::json::array();
        for (int d = 1; d <= dim(); ++d)
            for (const auto& s : dims_[static_cast<std::size_t>(d)]) ss.push_back(s);
        j["simplices"] = ss;
        return j;
    }

    static SimplicialComplex from_json(const nlohmann::json& j) {
        std::vector<Simplex> top;
        for (const auto& v : j.at("vertices")) top.push_back({v.get<int>()});
        for (const auto& s : j.at("simplices")) top.push_back(s.get<Simplex>());
        return closure(top);
    }

    // Internal: insert an already-sorted simplex, keeping dim buckets sorted
    // at the end via sort_all (closure/insert paths call it).
    void insert_raw(const Simplex& s) {
        int d = static_cast<int>(s.size()) - 1;
        while (dim() < d) dims_.push_back({});
        auto& bucket = dims_[static_cast<std::size_t>(d)];
        auto it = std::lower_bound(bucket.begin(), bucket.end(), s);
        if (it == bucket.end() || *it != s) bucket.insert(it, s);
    }

private:
    std::vector<std::vector<Simplex>> dims_;

    void sort_all() {
        for (auto& b : dims_) std::sort(b.begin(), b.end());
    }
};

enum class Field { Rationals, F2 };

inline std::string field_name(Field f) { return f == Field::Rationals ? "Q" : "F2"; }

struct BettiVector {
    std::vector<long> b;
    Field field = Field::Rationals;

    bool same_ranks(const BettiVector& o) const { return trimmed() == o.trimmed(); }

    std::vector<long> trimmed() const {
        std::vector<long> t = b;
        while (!t.empty() && t.back() == 0) t.pop_back();
        return t;
    }

    long sum() const {
        long s = 0;
        for (long x : b) s += x;
        return s;
    }

    long at(int i) const {
        if (i < 0 || i >= static_cast<int>(b.size())) return 0;
        return b[static_cast<std::size_t>(i)];
    }

    // Reduced Betti numbers (empty set handled by the caller).
    long reduced(int i) const { return i == 0 ? std::max(0L, at(0) - 1) : at(i); }
};

namespace detail {

// Column reduction rank over Q; boundary entries stay small for the +-1
// matrices that arise here.
inline long rank_columns_q(std::vector<std::map<int, Rat>> cols) {
    std::map<int, std::size_t> pivot_of_row;
    long rank = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        auto& col = cols[c];
        while (!col.empty()) {
            int low = col.rbegin()->first;
            auto it = pivot_of_row.find(low);
            if (it == pivot_of_row.end()) {
                pivot_of_row[low] = c;
                ++rank;
                break;
            }
            const auto& pcol = cols[it->second];
            Rat factor = col.rbegin()->second / pcol.rbegin()->second;
            for (const auto& [r, v] : pcol) {
                auto jt = col.find(r);
                if (jt == col.end()) {
                    col[r] = -factor * v;
                } else {
                    jt->second -= factor * v;
                    if (jt->second == 0) col.erase(jt);
                }
            }
        }
    }
    return rank;
}

inline long rank_columns_f2(std::vector<std::set<int>> cols) {
    std::map<int, std::size_t> pivot_of_row;
    long rank = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        auto& col = cols[c];
        while (!col.empty()) {
            int low = *col.rbegin();
            auto it = pivot_of_row.find(low);
            if (it == pivot_of_row.end()) {
                pivot_of_row[low] = c;
                ++rank;
                break;
            }
            for (int r : cols[it->second]) {
                auto jt = col.find(r);
                if (jt == col.end())
                    col.insert(r);
                else
                    col.erase(jt);
            }
        }
    }
    return rank;
}

inline long boundary_rank(const SimplicialComplex& K, int d, Field field) {
    if (d <= 0 || d > K.dim()) return 0;
    const auto& rows = K.by_dim()[static_cast<std::size_t>(d - 1)];
    const auto& colsimp = K.by_dim()[static_cast<std::size_t>(d)];
    std::map<Simplex, int> row_index;
    for (std::size_t i = 0; i < rows.size(); ++i) row_index[rows[i]] = static_cast<int>(i);
    if (field == Field::F2) {
        std::vector<std::set<int>> cols(colsimp.size());
        for (std::size_t c = 0; c < colsimp.size(); ++c)
            for (std::size_t skip = 0; skip < colsimp[c].size(); ++skip) {
                Simplex face = colsimp[c];
                face.erase(face.begin() + static_cast<long>(skip));
                cols[c].insert(row_index.at(face));
            }
        return rank_columns_f2(std::move(cols));
    }
    std::vector<std::map<int, Rat>> cols(colsimp.size());
    for (std::size_t c = 0; c < colsimp.size(); ++c)
        for (std::size_t skip = 0; skip < colsimp[c].size(); ++skip) {
            Simplex face = colsimp[c];
            face.erase(face.begin() + static_cast<long>(skip));
            cols[c][row_index.at(face)] = (skip % 2 == 0) ? Rat(1) : Rat(-1);
        }
    return rank_columns_q(std::move(cols));
}

}  // namespace detail

// Betti numbers b_0..b_top as dim ker - dim im of the boundary maps.
inline BettiVector betti(const SimplicialComplex& K, Field field = Field::Rationals) {
    BettiVector out;
    out.field = field;
    if (K.empty()) return out;
    std::vector<long> rank(static_cast<std::size_t>(K.dim()) + 2, 0);
    for (int d = 1; d <= K.dim(); ++d)
        rank[static_cast<std::size_t>(d)] = detail::boundary_rank(K, d, field);
    for (int d = 0; d <= K.dim(); ++d) {
        long n = static_cast<long>(K.count(d));
        long kernel = n - rank[static_cast<std::size_t>(d)];
        out.b.push_back(kernel - rank[static_cast<std::size_t>(d) + 1]);
    }
    return out;
}

// Boundary of the (n+1)-dimensional cross-polytope: the smallest standard
// triangulation of S^n. Vertex 2i is +e_i, vertex 2i+1 is -e_i; facets pick
// one sign per axis. The coordinate embedding S^{n'} into S^n for n' <= n is
// the identity on the first 2(n'+1) vertices.
inline SimplicialComplex sphere_complex(int n) {
    if (n < 0) throw Error("bad_dimension", "sphere dimension must be >= 0");
    std::vector<Simplex> facets;
    const int axes = n + 1;
    for (int mask = 0; mask < (1 << axes); ++mask) {
        Simplex f;
        for (int a = 0; a < axes; ++a) f.push_back(2 * a + ((mask >> a) & 1));
        facets.push_back(f);
    }
    return SimplicialComplex::closure(facets);
}

// Flag complex of the radius graph, truncated at max_dim.
inline SimplicialComplex rips_complex(const std::vector<std::vector<double>>& points, double radius,
                                      int max_dim) {
    if (radius <= 0) throw Error("bad_radius", "rips radius must be positive");
    if (max_dim < 0) throw Error("bad_dimension", "max_dim must be >= 0");
    const int n = static_cast<int>(points.size());
    SimplicialComplex k;
    // lower neighbors (sorted ascending) per vertex
    std::vector<std::vector<int>> lower(static_cast<std::size_t>(n));
    const double r2 = radius * radius;
    auto close = [&](int a, int b) {
        double s = 0;
        const auto& pa = points[static_cast<std::size_t>(a)];
        const auto& pb = points[static_cast<std::size_t>(b)];
        for (std::size_t i = 0; i < pa.size(); ++i) {
            double dd = pa[i] - pb[i];
            s += dd * dd;
        }
        return s <= r2;
    };
    for (int i = 0; i < n; ++i) {
        k.insert_raw({i});
        for (int j = 0; j < i; ++j)
            if (close(i, j)) lower[static_cast<std::size_t>(i)].push_back(j);
    }
    // incremental clique expansion
    std::vector<Simplex> frontier;
    if (max_dim >= 1)
        for (int i = 0; i < n; ++i)
            for (int j : lower[static_cast<std::size_t>(i)]) {
                k.insert_raw({j, i});
                frontier.push_back({j, i});
            }
    for (int d = 2; d <= max_dim && !frontier.empty(); ++d) {
        std::vector<Simplex> next;
        for (const auto& s : frontier) {
            // extend below the minimum vertex: common lower neighbor of all
            std::vector<int> cand = lower[static_cast<std::size_t>(s[0])];
            for (std::size_t i = 1; i < s.size() && !cand.empty(); ++i) {
                std::vector<int> merged;
                std::set_intersection(cand.begin(), cand.end(),
                                      lower[static_cast<std::size_t>(s[i])].begin(),
                                      lower[static_cast<std::size_t>(s[i])].end(),
                                      std::back_inserter(merged));
                cand = merged;
            }
            for (int v : cand) {
                Simplex t;
                t.push_back(v);
                t.insert(t.end(), s.begin(), s.end());
                k.insert_raw(t);
                next.push_back(t);
            }
        }
        frontier = std::move(next);
    }
    return k;
}

struct SphereSample {
    std::vector<std::vector<double>> points;
    double acceptance_rate = 0.0;
    bool possibly_empty = false;
};

// Draws `budget` uniform points on S^l and keeps those passing the predicate.
inline SphereSample sphere_sample(const std::function<bool(const std::vector<double>&)>& predicate,
                                  int l, int budget, std::uint64_t seed,
                                  std::uint64_t stream = 1) {
    if (budget < 1) throw Error("bad_budget", "sample budget must be >= 1");
    CounterRng rng(seed, stream);
    SphereSample out;
    for (int i = 0; i < budget; ++i) {
        std::vector<double> p = rng.sphere_point(l);
        if (predicate(p)) out.points.push_back(std::move(p));
    }
    out.acceptance_rate = static_cast<double>(out.points.size()) / static_cast<double>(budget);
    out.possibly_empty = out.points.empty();
    return out;
}

struct LandmarkSet {
    std::vector<std::size_t> indices;
    double covering_radius = 0.0;  // max distance of any input point to its landmark
};

// Farthest-point (maxmin) subsample; deterministic, starts from index 0.
inline LandmarkSet landmarks(const std::vector<std::vector<double>>& points, std::size_t count) {
    LandmarkSet out;
    if (points.empty()) return out;
    count = std::min(count, points.size());
    auto dist2 = [&](std::size_t a, std::size_t b) {
        double s = 0;
        for (std::size_t i = 0; i < points[a].size(); ++i) {
            double d = points[a][i] - points[b][i];
            s += d * d;
        }
        return s;
    };
    std::vector<double> best(points.size(), 1e300);
    std::size_t cur = 0;
    for (std::size_t k = 0; k < count; ++k) {
        out.indices.push_back(cur);
        std::size_t far = 0;
        double fd = -1;
        for (std::size_t i = 0; i < points.size(); ++i) {
            best[i] = std::min(best[i], dist2(i, cur));
            if (best[i] > fd) {
                fd = best[i];
                far = i;
            }
        }
        cur = far;
    }
    double cover = 0;
    for (double d : best) cover = std::max(cover, d);
    out.covering_radius = std::sqrt(cover);
    return out;
}

// Sampling-based Betti oracle: farthest-point landmarks + Rips at a radius
// proportional to the covering radius. Reports its parameters so runs are
// reproducible from the record.
struct OracleConfig {
    int budget = 4000;            // raw sphere samples
    std::size_t landmark_count = 80;
    double radius_factor = 2.8;   // rips radius = factor * covering radius
    double min_radius = 0.0;      // floor, useful for very sparse sets
    int max_dim = 3;              // clique truncation
    Field field = Field::Rationals;
    std::uint64_t seed = 7;

    nlohmann::json to_json() const {
        return {{"budget", budget},        {"landmarks", landmark_count},
                {"radius_factor", radius_factor}, {"min_radius", min_radius},
                {"max_dim", max_dim},      {"field", field_name(field)},
                {"seed", seed}};
    }
};

struct OracleResult {
    BettiVector betti;
    bool empty = false;
    double acceptance_rate = 0.0;
    double radius = 0.0;
    std::size_t landmark_count = 0;
};

inline OracleResult betti_oracle(const std::vector<std::vector<double>>& cloud,
                                 const OracleConfig& cfg) {
    OracleResult out;
    if (cloud.empty()) {
        out.empty = true;
        return out;
    }
    LandmarkSet lm = landmarks(cloud, cfg.landmark_count);
    std::vector<std::vector<double>> pts;
    for (std::size_t i : lm.indices) pts.push_back(cloud[i]);
    out.radius = std::max(cfg.min_radius, cfg.radius_factor * lm.covering_radius);
    out.landmark_count = pts.size();
    SimplicialComplex K = rips_complex(pts, out.radius, cfg.max_dim);
    out.betti = betti(K, cfg.field);
    // the clique truncation makes the top dimension unreliable; report only
    // b_0 .. b_{max_dim-1}
    if (out.betti.b.size() > static_cast<std::size_t>(cfg.max_dim))
        out.betti.b.resize(static_cast<std::size_t>(cfg.max_dim));
    return out;
}

// --- Mayer-Vietoris -------------------------------------------------------

struct MvReport {
    bool ok = true;
    nlohmann::json rows = nlohmann::json::array();
};

// Checks both Mayer-Vietoris inequality families on a closed-subcomplex
// system: b_i(union) <= sum over nonempty J of b_{i-#J+1}(intersection over J)
// and b_i(intersection) <= sum over nonempty J of b_{i+#J-1}(union over J).
inline MvReport mv_audit(const std::vector<SimplicialComplex>& W, int i_max,
                         Field field = Field::Rationals) {
    MvReport rep;
    const std::size_t r = W.size();
    if (r == 0) return rep;
    // precompute unions/intersections and betti per subset
    std::vector<BettiVector> b_cap(1u << r), b_cup(1u << r);
    for (std::size_t mask = 1; mask < (1u << r); ++mask) {
        SimplicialComplex cap, cup;
        bool first = true;
        for (std::size_t j = 0; j < r; ++j)
            if (mask & (1u << j)) {
                if (first) {
                    cap = W[j];
                    cup = W[j];
                    first = false;
                } else {
                    cap = SimplicialComplex::intersect(cap, W[j]);
                    cup = SimplicialComplex::unite(cup, W[j]);
                }
            }
        b_cap[mask] = betti(cap, field);
        b_cup[mask] = betti(cup, field);
    }
    const std::size_t full = (1u << r) - 1;
    for (int i = 0; i <= i_max; ++i) {
        long lhs_union = b_cup[full].at(i);
        long rhs_union = 0;
        long lhs_cap = b_cap[full].at(i);
        long rhs_cap = 0;
        for (std::size_t mask = 1; mask <= full; ++mask) {
            int cardJ = static_cast<int>(std::popcount(mask));
            rhs_union += b_cap[mask].at(i - cardJ + 1);
            rhs_cap += b_cup[mask].at(i + cardJ - 1);
        }
        bool ok1 = lhs_union <= rhs_union;
        bool ok2 = lhs_cap <= rhs_cap;
        rep.rows.push_back({{"i", i},
                            {"b_union", lhs_union},
                            {"mv_bound_union", rhs_union},
                            {"b_intersection", lhs_cap},
                            {"mv_bound_intersection", rhs_cap},
                            {"ok", ok1 && ok2}});
        if (!(ok1 && ok2)) rep.ok = false;
    }
    return rep;
}

// --- Homotopy colimit (Mayer-Vietoris blow-up complex) ---------------------

struct Cover {
    std::vector<SimplicialComplex> parts;

    SimplicialComplex colim() const {
        SimplicialComplex u;
        for (const auto& p : parts) u = SimplicialComplex::unite(u, p);
        return u;
    }

    SimplicialComplex intersection_over(const std::vector<int>& I) const {
        SimplicialComplex c = parts.at(static_cast<std::size_t>(I.at(0)));
        for (std::size_t t = 1; t < I.size(); ++t)
            c = SimplicialComplex::intersect(c, parts[static_cast<std::size_t>(I[t])]);
        return c;
    }
};

// Simplicial model of the blow-up complex: vertices are pairs (i, v) with v a
// vertex of A_i; a simplex is a chain in the product order on [n] x V whose
// index support I and vertex support s satisfy s in A_I. Chains triangulate
// each product cell Delta_I x s, and shared sub-chains implement the face
// identifications.
inline SimplicialComplex hocolim(const Cover& cover) {
    const std::size_t n = cover.parts.size();
    if (n == 0) throw Error("empty_cover", "hocolim requires a nonempty cover");
    // vertex ids: (i, v) -> i * stride + v with stride above all vertex ids
    int maxv = 0;
    for (const auto& p : cover.parts)
        for (int v : p.vertices()) maxv = std::max(maxv, v);
    const int stride = maxv + 1;

    // membership of a simplex in A_i
    auto in_part = [&](std::size_t i, const Simplex& s) { return cover.parts[i].contains(s); };

    std::vector<Simplex> found;  // chains, encoded vertices
    // DFS over chains in the product order
    struct Item {
        std::size_t i;
        int v;
    };
    std::vector<Item> chain;
    Simplex svert;     // dedup sorted vertex support
    std::vector<std::size_t> isupp;  // dedup sorted index support

    std::function<void()> emit = [&]() {
        Simplex enc;
        for (const auto& it : chain) enc.push_back(static_cast<int>(it.i) * stride + it.v);
        found.push_back(enc);
    };

    // checks s-support in A_I for current supports
    auto supported = [&]() {
        for (std::size_t i : isupp)
            if (!in_part(i, svert)) return false;
        return true;
    };

    std::function<void(std::size_t, int)> extend = [&](std::size_t i0, int v0) {
        // try to append (i, v) >= (i0, v0) in each coordinate, excluding the
        // current last element itself
        for (std::size_t i = i0; i < n; ++i) {
            for (int v : cover.parts[i].vertices()) {
                if (v < v0) continue;
                if (i == i0 && v == v0) continue;
                bool newi = isupp.empty() || isupp.back() != i;
                bool newv = !std::binary_search(svert.begin(), svert.end(), v);
                if (newi) isupp.push_back(i);
                Simplex saved = svert;
                if (newv) {
                    svert.insert(std::lower_bound(svert.begin(), svert.end(), v), v);
                }
                if (supported()) {
                    chain.push_back({i, v});
                    emit();
                    extend(i, v);
                    chain.pop_back();
                }
                svert = saved;
                if (newi) isupp.pop_back();
            }
        }
    };

    for (std::size_t i = 0; i < n; ++i)
        for (int v : cover.parts[i].vertices()) {
            if (!in_part(i, {v})) continue;
            chain = {{i, v}};
            svert = {v};
            isupp = {i};
            emit();
            extend(i, v);
        }
    if (found.empty()) throw Error("empty_cover", "cover has no simplices");
    return SimplicialComplex::closure(found);
}

// Nerve of the cover: I with nonempty common intersection.
inline SimplicialComplex nerve(const Cover& cover) {
    const int n = static_cast<int>(cover.parts.size());
    std::vector<Simplex> simplices;
    for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<int> I;
        for (int j = 0; j < n; ++j)
            if (mask & (1 << j)) I.push_back(j);
        if (!cover.intersection_over(I).empty()) simplices.push_back(I);
    }
    return SimplicialComplex::closure(simplices);
}

struct HocolimReport {
    BettiVector hocolim_betti;
    BettiVector union_betti;
    bool equal = false;
};

inline HocolimReport hocolim_audit(const Cover& cover, Field field = Field::Rationals) {
    HocolimReport rep;
    rep.hocolim_betti = betti(hocolim(cover), field);
    rep.union_betti = betti(cover.colim(), field);
    rep.equal = rep.hocolim_betti.same_ranks(rep.union_betti);
    return rep;
}

// --- Alexander duality audit ------------------------------------------------

struct AlexanderReport {
    std::vector<long> x_reduced;           // reduced b~_i(X), i = 0..l-1
    std::vector<long> complement_reduced;  // reduced b~_{l-1-i}(complement)
    bool ok = true;
    nlohmann::json details;
};

// Homology-level duality proxy on S^l: b~_i(X) = b~_{l-i-1}(S^l \ X),
// both sides estimated by the sampling oracle.
inline AlexanderReport alexander_audit(const std::vector<std::vector<double>>& x_sample,
                                       const std::vector<std::vector<double>>& complement_sample,
                                       int l, const OracleConfig& cfg) {
    AlexanderReport rep;
    OracleResult rx = betti_oracle(x_sample, cfg);
    OracleResult rc = betti_oracle(complement_sample, cfg);
    for (int i = 0; i <= l - 1; ++i) {
        long lhs = rx.empty ? 0 : rx.betti.reduced(i);
        long rhs = rc.empty ? 0 : rc.betti.reduced(l - i - 1);
        rep.x_reduced.push_back(lhs);
        rep.complement_reduced.push_back(rhs);
        if (lhs != rhs) rep.ok = false;
    }
    rep.details = {{"x_betti", rx.empty ? std::vector<long>{} : rx.betti.b},
                   {"complement_betti", rc.empty ? std::vector<long>{} : rc.betti.b},
                   {"oracle", cfg.to_json()}};
    return rep;
}

}  // namespace quadtope

#endif
