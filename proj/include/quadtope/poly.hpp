#ifndef QUADTOPE_POLY_HPP
#define QUADTOPE_POLY_HPP

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "quadtope/error.hpp"
#include "quadtope/rat.hpp"

namespace quadtope {

// Variables live in three named blocks: Y (form variables y0,y1,...),
// X (parameters x1,...,xk) and Z (coefficient-space variables z1,...,zm).
// The global order is Y-block, then X-block, then Z-block, each by index,
// so exponent vectors compare deterministically across the whole toolkit.
inline int var_block_rank(char b) {
    switch (b) {
        case 'y': return 0;
        case 'x': return 1;
        case 'z': return 2;
        default: return -1;
    }
}

inline void check_var_name(const std::string& name) {
    if (name.empty() || var_block_rank(name[0]) < 0 || name.size() < 2)
        throw Error("bad_variable", "variable must be y<i>, x<i> or z<i>: " + name);
    for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i])))
            throw Error("bad_variable", "variable must be y<i>, x<i> or z<i>: " + name);
}

inline bool var_less(const std::string& a, const std::string& b) {
    int ra = var_block_rank(a[0]), rb = var_block_rank(b[0]);
    if (ra != rb) return ra < rb;
    long ia = std::stol(a.substr(1)), ib = std::stol(b.substr(1));
    return ia < ib;
}

// Sparse multivariate polynomial over the rationals.
class MultiPoly {
public:
    using Expo = std::vector<int>;

    MultiPoly() = default;

    static MultiPoly zero() { return MultiPoly(); }

    static MultiPoly constant(const Rat& c) {
        MultiPoly p;
        if (c != 0) p.terms_[{}] = c;
        return p;
    }

    static MultiPoly variable(const std::string& name, int power = 1) {
        check_var_name(name);
        MultiPoly p;
        p.vars_ = {name};
        if (power == 0) return constant(1);
        p.terms_[{power}] = Rat(1);
        return p;
    }

    static MultiPoly monomial(const Rat& c, const std::vector<std::pair<std::string, int>>& factors) {
        MultiPoly p = constant(c);
        for (const auto& [name, pow] : factors)
            p = mul(p, variable(name, pow));
        return p;
    }

    const std::vector<std::string>& vars() const { return vars_; }
    const std::map<Expo, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    bool operator==(const MultiPoly& o) const {
        MultiPoly a = *this, b = o;
        align(a, b);
        return a.terms_ == b.terms_;
    }
    bool operator!=(const MultiPoly& o) const { return !(*this == o); }

    // Max degree over the given block ('y', 'x' or 'z').
    int deg_block(char block) const {
        int d = 0;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (std::size_t i = 0; i < vars_.size(); ++i)
                if (vars_[i][0] == block) s += e[i];
            d = std::max(d, s);
        }
        return d;
    }

    bool homogeneous_in_block(char block, int degree) const {
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (std::size_t i = 0; i < vars_.size(); ++i)
                if (vars_[i][0] == block) s += e[i];
            if (s != degree) return false;
        }
        return true;
    }

    bool uses_block(char block) const {
        for (const auto& v : vars_)
            if (v[0] == block && deg_of_var(v) > 0) return true;
        return false;
    }

    int deg_of_var(const std::string& name) const {
        auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it == vars_.end()) return 0;
        std::size_t idx = static_cast<std::size_t>(it - vars_.begin());
        int d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, e[idx]);
        return d;
    }

    static MultiPoly add(MultiPoly a, MultiPoly b) {
        align(a, b);
        for (const auto& [e, c] : b.terms_) {
            auto it = a.terms_.find(e);
            if (it == a.terms_.end())
                a.terms_[e] = c;
            else {
                it->second += c;
                if (it->second == 0) a.terms_.erase(it);
            }
        }
        return a;
    }

    static MultiPoly neg(MultiPoly a) {
        for (auto& [e, c] : a.terms_) c = -c;
        return a;
    }

    static MultiPoly sub(MultiPoly a, const MultiPoly& b) { return add(std::move(a), neg(b)); }

    static MultiPoly scale(MultiPoly a, const Rat& s) {
        if (s == 0) return zero();
        for (auto& [e, c] : a.terms_) c *= s;
        return a;
    }

    static MultiPoly mul(MultiPoly a, MultiPoly b) {
        align(a, b);
        MultiPoly out;
        out.vars_ = a.vars_;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Expo e(ea);
                for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
                Rat c = ca * cb;
                auto it = out.terms_.find(e);
                if (it == out.terms_.end())
                    out.terms_[e] = c;
                else {
                    it->second += c;
                    if (it->second == 0) out.terms_.erase(it);
                }
            }
        out.compact();
        return out;
    }

    // Exact rational evaluation; every variable must be assigned.
    Rat eval(const std::map<std::string, Rat>& point) const {
        for (const auto& v : vars_)
            if (deg_of_var(v) > 0 && !point.count(v))
                throw Error("missing_assignment", "no value for variable " + v);
        Rat total(0);
        for (const auto& [e, c] : terms_) {
            Rat t = c;
            for (std::size_t i = 0; i < vars_.size(); ++i)
                for (int p = 0; p < e[i]; ++p) t *= point.at(vars_[i]);
            total += t;
        }
        return total;
    }

    double eval_double(const std::map<std::string, double>& point) const {
        double total = 0;
        for (const auto& [e, c] : terms_) {
            double t = rat_double(c);
            for (std::size_t i = 0; i < vars_.size(); ++i)
                if (e[i] > 0) {
                    auto it = point.find(vars_[i]);
                    if (it == point.end())
                        throw Error("missing_assignment", "no value for variable " + vars_[i]);
                    for (int p = 0; p < e[i]; ++p) t *= it->second;
                }
            total += t;
        }
        return total;
    }

    // Substitutes exact values for a subset of variables.
    MultiPoly substitute(const std::map<std::string, Rat>& values) const {
        MultiPoly out;
        out.vars_ = vars_;
        for (const auto& [e, c] : terms_) {
            Rat coeff = c;
            Expo e2(e);
            for (std::size_t i = 0; i < vars_.size(); ++i) {
                auto it = values.find(vars_[i]);
                if (it != values.end() && e[i] > 0) {
                    for (int p = 0; p < e[i]; ++p) coeff *= it->second;
                    e2[i] = 0;
                }
            }
            if (coeff == 0) continue;
            auto it = out.terms_.find(e2);
            if (it == out.terms_.end())
                out.terms_[e2] = coeff;
            else {
                it->second += coeff;
                if (it->second == 0) out.terms_.erase(it);
            }
        }
        out.compact();
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["vars"] = vars_;
        j["terms"] = nlohmann::json::array();
        for (const auto& [e, c] : terms_)
            j["terms"].push_back({{"c", rat_str(c)}, {"e", e}});
        return j;
    }

    static MultiPoly from_json(const nlohmann::json& j) {
        MultiPoly p;
        for (const auto& v : j.at("vars")) {
            std::string name = v.get<std::string>();
            check_var_name(name);
            p.vars_.push_back(name);
        }
        for (const auto& t : j.at("terms")) {
            Expo e = t.at("e").get<Expo>();
            if (e.size() != p.vars_.size())
                throw Error("bad_polynomial", "exponent length mismatch");
            Rat c = rat_parse(t.at("c").get<std::string>());
            if (c == 0) continue;
            p.terms_[e] = c;
        }
        return p.canonical();
    }

    // Reorders variables into the global block order and prunes unused ones.
    MultiPoly canonical() const {
        MultiPoly out = *this;
        out.compact();
        std::vector<std::string> sorted = out.vars_;
        std::sort(sorted.begin(), sorted.end(), var_less);
        if (sorted != out.vars_) {
            MultiPoly re;
            re.vars_ = sorted;
            for (const auto& [e, c] : out.terms_) {
                Expo e2(sorted.size(), 0);
                for (std::size_t i = 0; i < out.vars_.size(); ++i) {
                    auto pos = std::find(sorted.begin(), sorted.end(), out.vars_[i]) - sorted.begin();
                    e2[static_cast<std::size_t>(pos)] = e[i];
                }
                re.terms_[e2] = c;
            }
            return re;
        }
        return out;
    }

private:
    std::vector<std::string> vars_;
    std::map<Expo, Rat> terms_;

    // Drops variables no term uses.
    void compact() {
        std::vector<bool> used(vars_.size(), false);
        for (const auto& [e, c] : terms_)
            for (std::size_t i = 0; i < vars_.size(); ++i)
                if (e[i] > 0) used[i] = true;
        std::vector<std::string> vv;
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (used[i]) {
                vv.push_back(vars_[i]);
                keep.push_back(i);
            }
        if (vv.size() == vars_.size()) return;
        std::map<Expo, Rat> tt;
        for (const auto& [e, c] : terms_) {
            Expo e2(keep.size());
            for (std::size_t i = 0; i < keep.size(); ++i) e2[i] = e[keep[i]];
            tt[e2] = c;
        }
        vars_ = vv;
        terms_ = tt;
    }

    // Rewrites both operands over the union of their variable lists.
    static void align(MultiPoly& a, MultiPoly& b) {
        std::vector<std::string> u = a.vars_;
        for (const auto& v : b.vars_)
            if (std::find(u.begin(), u.end(), v) == u.end()) u.push_back(v);
        std::sort(u.begin(), u.end(), var_less);
        a = a.remap(u);
        b = b.remap(u);
    }

    MultiPoly remap(const std::vector<std::string>& newvars) const {
        MultiPoly out;
        out.vars_ = newvars;
        for (const auto& [e, c] : terms_) {
            Expo e2(newvars.size(), 0);
            for (std::size_t i = 0; i < vars_.size(); ++i) {
                auto pos = std::find(newvars.begin(), newvars.end(), vars_[i]);
                if (pos == newvars.end())
                    throw Error("internal", "remap lost a variable");
                e2[static_cast<std::size_t>(pos - newvars.begin())] = e[i];
            }
            out.terms_[e2] = c;
        }
        return out;
    }
};

// Multiplies each term by y0^(2 - its Y-degree); y0 must be fresh.
inline MultiPoly homogenize_Y(const MultiPoly& p, const std::string& y0 = "y0") {
    if (p.deg_block('y') > 2)
        throw Error("degree_too_high", "homogenize_Y requires deg_Y <= 2",
                    {{"deg_Y", p.deg_block('y')}});
    if (p.deg_of_var(y0) > 0)
        throw Error("variable_in_use", y0 + " already occurs in polynomial");
    MultiPoly out = MultiPoly::zero();
    for (const auto& [e, c] : p.terms()) {
        MultiPoly term = MultiPoly::constant(c);
        int ydeg = 0;
        for (std::size_t i = 0; i < p.vars().size(); ++i) {
            if (e[i] > 0) term = MultiPoly::mul(term, MultiPoly::variable(p.vars()[i], e[i]));
            if (p.vars()[i][0] == 'y') ydeg += e[i];
        }
        if (ydeg < 2) term = MultiPoly::mul(term, MultiPoly::variable(y0, 2 - ydeg));
        out = MultiPoly::add(out, term);
    }
    return out;
}

// q + eps*(y0^2 + ... + yl^2) for a form homogeneous of degree 2 in Y.
inline MultiPoly perturb_tilde(const MultiPoly& q, const Rat& eps, int l) {
    if (eps <= 0) throw Error("bad_epsilon", "perturbation epsilon must be positive");
    if (!q.homogeneous_in_block('y', 2))
        throw Error("not_homogeneous", "perturb_tilde requires a degree-2 homogeneous form in Y");
    MultiPoly out = q;
    for (int i = 0; i <= l; ++i) {
        MultiPoly sq = MultiPoly::variable("y" + std::to_string(i), 2);
        out = MultiPoly::add(out, MultiPoly::scale(sq, eps));
    }
    return out;
}

}  // namespace quadtope

#endif
