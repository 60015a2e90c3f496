#ifndef QUADTOPE_SIGNCOND_HPP
#define QUADTOPE_SIGNCOND_HPP

#include <concepts>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadtope/error.hpp"
#include "quadtope/poly.hpp"
#include "quadtope/qform.hpp"
#include "quadtope/rat.hpp"
#include "quadtope/rng.hpp"

namespace quadtope {

struct SignVector {
    std::vector<int> signs;  // entries in {-1, 0, +1}

    SignVector() = default;
    explicit SignVector(std::vector<int> s) : signs(std::move(s)) {
        for (int v : signs)
            if (v < -1 || v > 1) throw Error("bad_sign", "sign entry outside {-1,0,+1}");
    }

    int size() const { return static_cast<int>(signs.size()); }

    // Number of zero entries.
    int level() const {
        int z = 0;
        for (int v : signs) z += (v == 0);
        return z;
    }

    auto operator<=>(const SignVector&) const = default;
};

inline nlohmann::json sign_vector_to_json(const SignVector& s) { return s.signs; }

// Exact signs of each polynomial at a rational point.
inline SignVector sign_vector(const std::vector<MultiPoly>& polys,
                              const std::map<std::string, Rat>& point) {
    std::vector<int> s;
    s.reserve(polys.size());
    for (const auto& p : polys) s.push_back(sign_of(p.eval(point)));
    return SignVector(std::move(s));
}

// Signs of an already-evaluated value vector.
inline SignVector sign_vector(const std::vector<Rat>& values) {
    std::vector<int> s;
    s.reserve(values.size());
    for (const auto& v : values) s.push_back(sign_of(v));
    return SignVector(std::move(s));
}

using SignConditionSet = std::set<SignVector>;

// Distinct sign vectors observed over a supplied point set. Exact
// enumeration is out of scope; callers combine grids and seeded samples.
inline SignConditionSet realizable_signs(const std::vector<MultiPoly>& polys,
                                         const std::vector<std::map<std::string, Rat>>& points,
                                         std::size_t budget) {
    if (budget < 1) throw Error("bad_budget", "budget must be >= 1");
    SignConditionSet out;
    for (std::size_t t = 0; t < points.size() && t < budget; ++t)
        out.insert(sign_vector(polys, points[t]));
    return out;
}

template <class Sampler>
    requires std::invocable<Sampler&, std::size_t>
SignConditionSet realizable_signs(const std::vector<MultiPoly>& polys, Sampler&& sampler,
                                  std::size_t budget) {
    if (budget < 1) throw Error("bad_budget", "budget must be >= 1");
    SignConditionSet out;
    for (std::size_t t = 0; t < budget; ++t)
        out.insert(sign_vector(polys, sampler(t)));
    return out;
}

// Concrete geometric scale ladder standing in for infinitesimal
// perturbation sizes: delta_0 < ... < delta_l < eps_0 < ... < eps_{l+1},
// each element <= eta times its successor.
struct EpsDeltaLadder {
    Rat eta;
    std::vector<Rat> eps;    // eps[j], j = 0..l+1, increasing
    std::vector<Rat> delta;  // delta[i], i = 0..l, increasing

    int l() const { return static_cast<int>(delta.size()) - 1; }

    void validate() const {
        if (eta <= 0 || eta >= 1) throw Error("bad_ladder", "eta outside (0,1)");
        if (eps.size() != delta.size() + 1) throw Error("bad_ladder", "size mismatch");
        Rat prev(0);
        for (const auto& d : delta) {
            if (d <= prev) throw Error("bad_ladder", "delta block not increasing");
            prev = d;
        }
        for (const auto& e : eps) {
            if (e <= prev) throw Error("bad_ladder", "eps block not above delta block");
            prev = e;
        }
        if (eps.back() >= 1) throw Error("bad_ladder", "top eps not below 1");
        // strict scale separation
        std::vector<Rat> chain(delta);
        chain.insert(chain.end(), eps.begin(), eps.end());
        for (std::size_t t = 0; t + 1 < chain.size(); ++t)
            if (chain[t] > eta * chain[t + 1])
                throw Error("bad_ladder", "scale separation violated");
    }

    nlohmann::json to_json() const {
        nlohmann::json je = nlohmann::json::array(), jd = nlohmann::json::array();
        for (const auto& e : eps) je.push_back(rat_str(e));
        for (const auto& d : delta) jd.push_back(rat_str(d));
        return {{"eta", rat_str(eta)}, {"eps", je}, {"delta", jd}};
    }
};

inline EpsDeltaLadder build_ladder(int l, const Rat& eta) {
    if (l < 0) throw Error("bad_ladder", "l must be >= 0");
    if (eta <= 0 || eta > Rat(1, 4))
        throw Error("bad_eta", "eta must lie in (0, 1/4]", {{"eta", rat_str(eta)}});
    EpsDeltaLadder lad;
    lad.eta = eta;
    lad.eps.resize(static_cast<std::size_t>(l) + 2);
    lad.delta.resize(static_cast<std::size_t>(l) + 1);
    lad.eps[static_cast<std::size_t>(l) + 1] = eta;
    for (int j = l; j >= 0; --j)
        lad.eps[static_cast<std::size_t>(j)] = eta * lad.eps[static_cast<std::size_t>(j) + 1];
    lad.delta[static_cast<std::size_t>(l)] = eta * lad.eps[0];
    for (int i = l - 1; i >= 0; --i)
        lad.delta[static_cast<std::size_t>(i)] = eta * lad.delta[static_cast<std::size_t>(i) + 1];
    lad.validate();
    return lad;
}

enum class ThickenMode { Open, Closed };

// Thickened sign condition at scale index j. The sign vector and the
// value vector are both ordered [H_l, ..., H_0] (characteristic
// coefficient order), so position t carries slack eps_j + delta_{l-t}.
struct ThickenedPredicate {
    SignVector sigma;
    int j = 0;
    ThickenMode mode = ThickenMode::Closed;
    EpsDeltaLadder ladder;
};

inline bool thickened_membership(const ThickenedPredicate& tp, const std::vector<Rat>& values) {
    const int n = tp.sigma.size();
    if (static_cast<int>(values.size()) != n)
        throw Error("bad_point", "value count does not match sign vector");
    if (n != tp.ladder.l() + 1) throw Error("bad_point", "ladder length mismatch");
    if (tp.j < 0 || tp.j > tp.ladder.l() + 1) throw Error("bad_level", "j out of range");
    const bool open = (tp.mode == ThickenMode::Open);
    for (int t = 0; t < n; ++t) {
        const Rat slack = tp.ladder.eps[static_cast<std::size_t>(tp.j)] +
                          tp.ladder.delta[static_cast<std::size_t>(n - 1 - t)];
        const Rat& h = values[static_cast<std::size_t>(t)];
        switch (tp.sigma.signs[static_cast<std::size_t>(t)]) {
            case 0:
                if (open ? !(h > -slack && h < slack) : !(h >= -slack && h <= slack))
                    return false;
                break;
            case 1:
                if (open ? !(h > -slack) : !(h >= -slack)) return false;
                break;
            case -1:
                if (open ? !(h < slack) : !(h <= slack)) return false;
                break;
        }
    }
    return true;
}

// Sign-condition families by index level: sigma_by_level[j] collects the
// sign vectors seen at points of index <= j (cumulative in j).
inline std::vector<SignConditionSet> sigma_from_samples(
    const std::vector<std::pair<SignVector, int>>& samples, int l) {
    std::vector<SignConditionSet> out(static_cast<std::size_t>(l) + 2);
    for (const auto& [sigma, index] : samples) {
        if (index < 0 || index > l + 1) throw Error("bad_index", "index out of range");
        out[static_cast<std::size_t>(index)].insert(sigma);
    }
    for (std::size_t j = 1; j < out.size(); ++j)
        out[j].insert(out[j - 1].begin(), out[j - 1].end());
    return out;
}

// One sampled datum: exact H-sign vector and exact index of omega*Q(x).
struct SigmaSample {
    SignVector sigma;
    int index = 0;
};

inline SigmaSample h_sign_sample(const QuadFamily& fam, const std::vector<Rat>& omega,
                                 const std::vector<Rat>& x) {
    const QuadForm q = omega_combine(fam, omega, x);
    const CharPoly cp = char_poly(q);
    SigmaSample s;
    s.sigma = sign_vector(cp.coeffs);
    s.index = index_descartes(cp).neg;
    return s;
}

// D'_{I,j} = D^c_{I,j} \ D^o_{I,j-1}: in some closed-j realization over
// Sigma_{I,j}, and in no open-(j-1) realization over Sigma_{I,j-1}.
inline bool d_prime_membership(const std::vector<SignConditionSet>& sigma_by_level, int j,
                               const EpsDeltaLadder& ladder, const std::vector<Rat>& values) {
    if (j < 0 || j >= static_cast<int>(sigma_by_level.size()))
        throw Error("bad_level", "j out of range");
    bool in_closed = false;
    for (const auto& sigma : sigma_by_level[static_cast<std::size_t>(j)]) {
        if (thickened_membership({sigma, j, ThickenMode::Closed, ladder}, values)) {
            in_closed = true;
            break;
        }
    }
    if (!in_closed) return false;
    if (j == 0) return true;  // D^o_{-1} is empty
    for (const auto& sigma : sigma_by_level[static_cast<std::size_t>(j) - 1])
        if (thickened_membership({sigma, j - 1, ThickenMode::Open, ladder}, values))
            return false;
    return true;
}

struct DisjointnessReport {
    long samples = 0;
    nlohmann::json violations = nlohmann::json::array();

    bool ok() const { return violations.empty(); }

    nlohmann::json to_json() const {
        return {{"samples", samples},
                {"violation_count", violations.size()},
                {"violations", violations}};
    }
};

namespace detail {

// Random rational in [-1,1] with denominator `den`.
inline Rat rand_rat(CounterRng& rng, long den = 1000) {
    const long num = static_cast<long>(rng.next_below(static_cast<std::uint64_t>(2 * den + 1))) - den;
    return rat(num, den);
}

}  // namespace detail

// Samples the region {omega_i <= 0 for i in I, omega_i = 0 otherwise}
// times the parameter cube, checks the pairwise-disjointness claim for
// the thickened strata D'_{I,i}, D'_{I,j} with i > j+1 at every sampled
// point. Sigma levels are built from the same sample set.
inline DisjointnessReport disjointness_audit(const QuadFamily& fam, const std::set<int>& I,
                                             const EpsDeltaLadder& ladder, std::size_t budget,
                                             std::uint64_t seed = 7) {
    if (budget < 1) throw Error("bad_budget", "budget must be >= 1");
    for (int i : I)
        if (i < 1 || i > fam.m) throw Error("bad_subset", "I not contained in [m]");
    if (ladder.l() != fam.l) throw Error("bad_ladder", "ladder length mismatch");

    CounterRng rng(seed, 11);
    std::vector<std::vector<Rat>> omegas, xs;
    std::vector<std::pair<SignVector, int>> sigma_samples;
    std::vector<std::vector<Rat>> h_values;
    for (std::size_t t = 0; t < budget; ++t) {
        std::vector<Rat> omega(static_cast<std::size_t>(fam.m), Rat(0));
        bool nonzero = false;
        for (int i : I) {
            const long num = static_cast<long>(rng.next_below(1001));
            omega[static_cast<std::size_t>(i - 1)] = rat(-num, 1000);
            nonzero = nonzero || num != 0;
        }
        if (!nonzero) omega[static_cast<std::size_t>(*I.begin() - 1)] = Rat(-1);
        std::vector<Rat> x(static_cast<std::size_t>(fam.k));
        for (auto& c : x) c = detail::rand_rat(rng);
        const QuadForm q = omega_combine(fam, omega, x);
        const CharPoly cp = char_poly(q);
        sigma_samples.push_back({sign_vector(cp.coeffs), index_descartes(cp).neg});
        h_values.push_back(cp.coeffs);
        omegas.push_back(std::move(omega));
        xs.push_back(std::move(x));
    }
    const auto sigma = sigma_from_samples(sigma_samples, fam.l);

    DisjointnessReport rep;
    rep.samples = static_cast<long>(budget);
    for (std::size_t t = 0; t < budget; ++t) {
        std::vector<bool> member(static_cast<std::size_t>(fam.l) + 2);
        for (int j = 0; j <= fam.l + 1; ++j)
            member[static_cast<std::size_t>(j)] =
                d_prime_membership(sigma, j, ladder, h_values[t]);
        for (int i = 0; i <= fam.l + 1; ++i)
            for (int j = 0; j < i - 1; ++j)
                if (member[static_cast<std::size_t>(i)] && member[static_cast<std::size_t>(j)]) {
                    nlohmann::json om = nlohmann::json::array(), px = nlohmann::json::array();
                    for (const auto& c : omegas[t]) om.push_back(rat_str(c));
                    for (const auto& c : xs[t]) px.push_back(rat_str(c));
                    rep.violations.push_back(
                        {{"i", i}, {"j", j}, {"omega", om}, {"x", px}});
                }
    }
    return rep;
}

}  // namespace quadtope

#endif
