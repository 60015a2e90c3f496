#ifndef QUADTOPE_QFORM_HPP
#define QUADTOPE_QFORM_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadtope/error.hpp"
#include "quadtope/poly.hpp"
#include "quadtope/rat.hpp"

namespace quadtope {

// index = neg; zero counted separately so callers can apply the
// "non-negative eigenspace" convention exactly.
struct Signature {
    int neg = 0;
    int zero = 0;
    int pos = 0;
    int dim() const { return neg + zero + pos; }
    bool operator==(const Signature&) const = default;
};

// Symmetric rational matrix of a quadratic form in l+1 variables.
struct QuadForm {
    std::vector<std::vector<Rat>> m;

    QuadForm() = default;
    explicit QuadForm(std::vector<std::vector<Rat>> mat) : m(std::move(mat)) {
        const std::size_t n = m.size();
        for (const auto& row : m)
            if (row.size() != n) throw Error("bad_matrix", "matrix not square");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (m[i][j] != m[j][i])
                    throw Error("not_symmetric", "matrix entry mismatch",
                                {{"i", i}, {"j", j}});
    }

    int dim() const { return static_cast<int>(m.size()); }

    static QuadForm zero(int n) {
        return QuadForm(std::vector<std::vector<Rat>>(
            static_cast<std::size_t>(n), std::vector<Rat>(static_cast<std::size_t>(n), Rat(0))));
    }

    static QuadForm identity(int n) {
        QuadForm q = zero(n);
        for (int i = 0; i < n; ++i) q.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
        return q;
    }

    static QuadForm diagonal(const std::vector<Rat>& d) {
        QuadForm q = zero(static_cast<int>(d.size()));
        for (std::size_t i = 0; i < d.size(); ++i) q.m[i][i] = d[i];
        return q;
    }

    // y^T M y, exact.
    Rat value_at(const std::vector<Rat>& y) const {
        Rat v(0);
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = 0; j < m.size(); ++j)
                v += m[i][j] * y[i] * y[j];
        return v;
    }

    double value_at(const std::vector<double>& y) const {
        double v = 0;
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = 0; j < m.size(); ++j)
                v += rat_double(m[i][j]) * y[i] * y[j];
        return v;
    }
};

// Coefficients [H_l, ..., H_0] of det(M + T Id) = T^{l+1} + H_l T^l + ... + H_0.
struct CharPoly {
    std::vector<Rat> coeffs;

    int dim() const { return static_cast<int>(coeffs.size()); }

    Rat eval(const Rat& t) const {
        Rat v(1);
        for (const auto& h : coeffs) v = v * t + h;
        return v;
    }
};

// Parametrized family Q_1..Q_m of forms in y0..yl with coefficients that are
// polynomials in x1..xk of degree <= d.
struct QuadFamily {
    int m = 0;
    int l = 0;
    int k = 0;
    int d = 0;
    std::vector<std::vector<std::vector<MultiPoly>>> forms;  // forms[i][r][c]

    void validate() const {
        if (static_cast<int>(forms.size()) != m)
            throw Error("bad_family", "form count mismatch");
        for (const auto& f : forms) {
            if (static_cast<int>(f.size()) != l + 1)
                throw Error("bad_family", "matrix dimension mismatch");
            for (std::size_t r = 0; r < f.size(); ++r) {
                if (static_cast<int>(f[r].size()) != l + 1)
                    throw Error("bad_family", "matrix dimension mismatch");
                for (std::size_t c = 0; c < f[r].size(); ++c) {
                    if (f[r][c] != f[c][r])
                        throw Error("not_symmetric", "family matrix not symmetric");
                    if (f[r][c].uses_block('y') || f[r][c].uses_block('z'))
                        throw Error("bad_family", "entries must be polynomials in X only");
                    if (f[r][c].deg_block('x') > d)
                        throw Error("bad_family", "entry X-degree exceeds declared d");
                }
            }
        }
    }

    // Evaluates form i at parameter point x, exactly.
    QuadForm form_at(int i, const std::vector<Rat>& x) const {
        if (static_cast<int>(x.size()) != k)
            throw Error("dimension_mismatch", "parameter point has wrong length");
        std::map<std::string, Rat> pt;
        for (int j = 0; j < k; ++j) pt["x" + std::to_string(j + 1)] = x[static_cast<std::size_t>(j)];
        std::vector<std::vector<Rat>> mat(static_cast<std::size_t>(l + 1),
                                          std::vector<Rat>(static_cast<std::size_t>(l + 1)));
        for (int r = 0; r <= l; ++r)
            for (int c = 0; c <= l; ++c)
                mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                    forms[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)]
                         [static_cast<std::size_t>(c)].eval(pt);
        return QuadForm(mat);
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["l"] = l;
        j["k"] = k;
        j["d"] = d;
        j["m"] = m;
        j["forms"] = nlohmann::json::array();
        for (const auto& f : forms) {
            nlohmann::json mat = nlohmann::json::array();
            for (const auto& row : f) {
                nlohmann::json r = nlohmann::json::array();
                for (const auto& p : row) r.push_back(p.to_json());
                mat.push_back(r);
            }
            j["forms"].push_back({{"matrix", mat}});
        }
        return j;
    }

    static QuadFamily from_json(const nlohmann::json& j) {
        QuadFamily fam;
        fam.l = j.at("l").get<int>();
        fam.k = j.at("k").get<int>();
        fam.d = j.at("d").get<int>();
        fam.m = j.at("m").get<int>();
        for (const auto& f : j.at("forms")) {
            std::vector<std::vector<MultiPoly>> mat;
            for (const auto& row : f.at("matrix")) {
                std::vector<MultiPoly> r;
                for (const auto& p : row) r.push_back(MultiPoly::from_json(p));
                mat.push_back(r);
            }
            fam.forms.push_back(mat);
        }
        fam.validate();
        return fam;
    }
};

// Reads the symmetric matrix off a homogeneous degree-2 form in y0..yl.
inline QuadForm form_from_poly(const MultiPoly& p, int l = -1) {
    if (!p.is_zero() && !p.homogeneous_in_block('y', 2))
        throw Error("not_homogeneous", "form_from_poly needs a homogeneous degree-2 form in Y");
    if (p.uses_block('x') || p.uses_block('z'))
        throw Error("bad_form", "numeric form may not contain X or Z variables");
    int maxidx = l;
    for (const auto& v : p.vars())
        if (v[0] == 'y') maxidx = std::max(maxidx, static_cast<int>(std::stol(v.substr(1))));
    if (maxidx < 0) throw Error("bad_form", "cannot infer dimension of zero form");
    QuadForm q = QuadForm::zero(maxidx + 1);
    for (const auto& [e, c] : p.terms()) {
        std::vector<int> idx;
        for (std::size_t i = 0; i < p.vars().size(); ++i)
            for (int t = 0; t < e[i]; ++t)
                idx.push_back(static_cast<int>(std::stol(p.vars()[i].substr(1))));
        if (idx.size() != 2) throw Error("internal", "unexpected term degree");
        std::size_t a = static_cast<std::size_t>(idx[0]), b = static_cast<std::size_t>(idx[1]);
        if (a == b)
            q.m[a][a] += c;
        else {
            q.m[a][b] += c / 2;
            q.m[b][a] += c / 2;
        }
    }
    return q;
}

// Sum omega_i * Q_i(x), exact.
inline QuadForm omega_combine(const QuadFamily& fam, const std::vector<Rat>& omega,
                              const std::vector<Rat>& x) {
    if (static_cast<int>(omega.size()) != fam.m)
        throw Error("dimension_mismatch", "omega length must equal m");
    QuadForm out = QuadForm::zero(fam.l + 1);
    for (int i = 0; i < fam.m; ++i) {
        if (omega[static_cast<std::size_t>(i)] == 0) continue;
        QuadForm qi = fam.form_at(i, x);
        for (int r = 0; r <= fam.l; ++r)
            for (int c = 0; c <= fam.l; ++c)
                out.m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] +=
                    omega[static_cast<std::size_t>(i)] *
                    qi.m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    return out;
}

namespace detail {

// Faddeev-LeVerrier over any exact coefficient type with ring ops + integer
// division; instantiated for Rat and lifted to MultiPoly for the symbolic H's.
template <typename T, typename Mul, typename Add, typename Tr, typename DivInt>
std::vector<T> faddeev_leverrier(const std::vector<std::vector<T>>& A, const T& one_, const T& zero_,
                                 Mul mul, Add add, Tr /*unused*/, DivInt divint) {
    const std::size_t n = A.size();
    std::vector<std::vector<T>> M(n, std::vector<T>(n, zero_));
    std::vector<T> c(n + 1, zero_);
    c[n] = one_;
    for (std::size_t k = 1; k <= n; ++k) {
        // M <- A*M + c_{n-k+1} I
        std::vector<std::vector<T>> AM(n, std::vector<T>(n, zero_));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                T s = zero_;
                for (std::size_t t = 0; t < n; ++t) s = add(s, mul(A[i][t], M[t][j]));
                AM[i][j] = s;
            }
        for (std::size_t i = 0; i < n; ++i) AM[i][i] = add(AM[i][i], c[n - k + 1]);
        M = AM;
        // c_{n-k} = -(1/k) tr(A*M)
        T tr = zero_;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 0; t < n; ++t) tr = add(tr, mul(A[i][t], M[t][i]));
        c[n - k] = divint(tr, -static_cast<long>(k));
    }
    return c;  // c[0..n], det(tI - A) = sum c_j t^j
}

}  // namespace detail

// det(M + T Id), exact coefficients.
inline CharPoly char_poly(const QuadForm& q) {
    const int n = q.dim();
    // det(T I + M) = det(T I - (-M))
    std::vector<std::vector<Rat>> A(static_cast<std::size_t>(n),
                                    std::vector<Rat>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                -q.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    auto c = detail::faddeev_leverrier<Rat>(
        A, Rat(1), Rat(0), [](const Rat& a, const Rat& b) { return Rat(a * b); },
        [](const Rat& a, const Rat& b) { return Rat(a + b); }, 0,
        [](const Rat& a, long k) { return Rat(a / k); });
    CharPoly out;
    for (int j = n - 1; j >= 0; --j) out.coeffs.push_back(c[static_cast<std::size_t>(j)]);
    return out;
}

// Exact determinant of M + t Id (independent route used by property tests).
inline Rat det_shift(const QuadForm& q, const Rat& t) {
    const std::size_t n = static_cast<std::size_t>(q.dim());
    std::vector<std::vector<Rat>> a = q.m;
    for (std::size_t i = 0; i < n; ++i) a[i][i] += t;
    Rat det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) return Rat(0);
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            if (a[r][col] == 0) continue;
            Rat f = a[r][col] / a[col][col];
            for (std::size_t c2 = col; c2 < n; ++c2) a[r][c2] -= f * a[col][c2];
        }
    }
    return det;
}

// Descartes' rule on Lambda(T) = prod (T + lambda_i): since all roots are
// real, the variation count in (1, H_l, ..., H_zero) equals the number of
// positive roots, i.e. the number of negative eigenvalues. Exact.
inline Signature index_descartes(const CharPoly& c) {
    Signature s;
    const int n = c.dim();
    int zero = 0;
    while (zero < n && c.coeffs[static_cast<std::size_t>(n - 1 - zero)] == 0) ++zero;
    s.zero = zero;
    int variations = 0;
    int prev = 1;  // leading coefficient of T^{l+1}
    for (int j = 0; j < n - zero; ++j) {
        int sg = sign_of(c.coeffs[static_cast<std::size_t>(j)]);
        if (sg == 0) continue;
        if (sg != prev) ++variations;
        prev = sg;
    }
    s.neg = variations;
    s.pos = n - s.neg - s.zero;
    return s;
}

inline Signature signature_of(const QuadForm& q) { return index_descartes(char_poly(q)); }

struct EigenDecomp {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> frame;    // frame[i] = i-th eigenvector (column)
};

namespace detail {

// Cyclic Jacobi for small dense symmetric matrices.
inline EigenDecomp jacobi_eigen(const std::vector<std::vector<double>>& mat, double tol,
                                int max_sweeps = 100) {
    const std::size_t n = mat.size();
    std::vector<std::vector<double>> a = mat;
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a[i][j]));
    if (scale == 0.0) scale = 1.0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (std::sqrt(off) <= tol * scale) {
            EigenDecomp d;
            std::vector<std::size_t> order(n);
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t x, std::size_t y) { return a[x][x] < a[y][y]; });
            for (std::size_t i : order) {
                d.values.push_back(a[i][i]);
                std::vector<double> col(n);
                for (std::size_t r = 0; r < n; ++r) col[r] = v[r][i];
                d.frame.push_back(col);
            }
            return d;
        }
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(a[p][q]) <= 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double cth = 1.0 / std::sqrt(t * t + 1.0);
                double sth = t * cth;
                for (std::size_t i = 0; i < n; ++i) {
                    double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = cth * aip - sth * aiq;
                    a[i][q] = sth * aip + cth * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double api = a[p][i], aqi = a[q][i];
                    a[p][i] = cth * api - sth * aqi;
                    a[q][i] = sth * api + cth * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double vip = v[i][p], viq = v[i][q];
                    v[i][p] = cth * vip - sth * viq;
                    v[i][q] = sth * vip + cth * viq;
                }
            }
    }
    throw Error("no_convergence", "Jacobi iteration did not converge",
                {{"dim", n}, {"tol", tol}});
}

}  // namespace detail

// Numeric eigendecomposition whose sign counts are arbitrated by the exact
// signature: near-zero values within tol*|M| of 0 are assigned to the zero
// block, and the assignment must reproduce (neg, zero, pos) exactly.
inline EigenDecomp eigen_decomp(const QuadForm& q, double tol = 1e-9) {
    if (tol <= 0) throw Error("bad_tolerance", "tol must be positive");
    const std::size_t n = static_cast<std::size_t>(q.dim());
    std::vector<std::vector<double>> a(n, std::vector<double>(n));
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            a[i][j] = rat_double(q.m[i][j]);
            norm = std::max(norm, std::fabs(a[i][j]));
        }
    if (norm == 0.0) norm = 1.0;
    EigenDecomp d = detail::jacobi_eigen(a, 1e-14);
    Signature s = signature_of(q);
    // sorted values: first neg must be < eps band, middle zero block within
    // band, rest above band
    const double band = tol * norm * static_cast<double>(n);
    for (int i = 0; i < s.neg; ++i)
        if (d.values[static_cast<std::size_t>(i)] >= 0)
            throw Error("signature_mismatch", "numeric eigenvalues disagree with exact signature; adjust tol",
                        {{"position", i}});
    for (int i = s.neg; i < s.neg + s.zero; ++i)
        if (std::fabs(d.values[static_cast<std::size_t>(i)]) > band)
            throw Error("signature_mismatch", "expected zero eigenvalue outside tolerance band; adjust tol",
                        {{"position", i}, {"value", d.values[static_cast<std::size_t>(i)]}});
    for (int i = s.neg + s.zero; i < static_cast<int>(n); ++i)
        if (d.values[static_cast<std::size_t>(i)] <= 0)
            throw Error("signature_mismatch", "numeric eigenvalues disagree with exact signature; adjust tol",
                        {{"position", i}});
    return d;
}

// Orthonormal basis of L+ = span of eigenvectors with lambda >= 0 (zero
// eigenvalues included, per the non-negative eigenspace convention).
inline std::vector<std::vector<double>> positive_eigenspace(const QuadForm& q, double tol = 1e-9) {
    Signature s = signature_of(q);
    EigenDecomp d = eigen_decomp(q, tol);
    std::vector<std::vector<double>> basis;
    for (int i = s.neg; i < q.dim(); ++i) basis.push_back(d.frame[static_cast<std::size_t>(i)]);
    return basis;
}

// Coefficients [H_{I,l}, ..., H_{I,0}] of det(M_{Z_I . Q} + T Id) as exact
// polynomials in the Z-variables of I and in X.
inline std::vector<MultiPoly> symbolic_H(const QuadFamily& fam, const std::set<int>& I,
                                         std::size_t term_cap = 1000000) {
    if (I.empty()) throw Error("empty_index_set", "symbolic_H requires nonempty I");
    const std::size_t n = static_cast<std::size_t>(fam.l + 1);
    std::vector<std::vector<MultiPoly>> A(n, std::vector<MultiPoly>(n, MultiPoly::zero()));
    for (int i : I) {
        if (i < 1 || i > fam.m) throw Error("bad_index_set", "I must be a subset of 1..m");
        MultiPoly zi = MultiPoly::variable("z" + std::to_string(i));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                // A = -(Z_I . Q)
                MultiPoly contrib = MultiPoly::mul(
                    zi, fam.forms[static_cast<std::size_t>(i - 1)][r][c]);
                A[r][c] = MultiPoly::sub(A[r][c], contrib);
            }
    }
    std::size_t running = 0;
    auto checked_mul = [&](const MultiPoly& a, const MultiPoly& b) {
        MultiPoly p = MultiPoly::mul(a, b);
        running += p.term_count();
        if (running > term_cap)
            throw Error("term_cap_exceeded", "symbolic characteristic polynomial too large",
                        {{"cap", term_cap}});
        return p;
    };
    auto c = detail::faddeev_leverrier<MultiPoly>(
        A, MultiPoly::constant(Rat(1)), MultiPoly::zero(), checked_mul,
        [](const MultiPoly& a, const MultiPoly& b) { return MultiPoly::add(a, b); }, 0,
        [](const MultiPoly& a, long k) {
            Rat f(1, k);
            f.canonicalize();
            return MultiPoly::scale(a, f);
        });
    std::vector<MultiPoly> out;
    for (int j = fam.l; j >= 0; --j) out.push_back(c[static_cast<std::size_t>(j)]);
    return out;
}

inline nlohmann::json quadform_to_json(const QuadForm& q) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : q.m) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& e : row) r.push_back(rat_str(e));
        rows.push_back(r);
    }
    return nlohmann::json{{"matrix", rows}};
}

inline QuadForm quadform_from_json(const nlohmann::json& j) {
    std::vector<std::vector<Rat>> mat;
    for (const auto& row : j.at("matrix")) {
        std::vector<Rat> r;
        for (const auto& e : row) r.push_back(rat_parse(e.get<std::string>()));
        mat.push_back(r);
    }
    return QuadForm(mat);
}

}  // namespace quadtope

#endif
