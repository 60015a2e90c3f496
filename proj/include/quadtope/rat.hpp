#ifndef QUADTOPE_RAT_HPP
#define QUADTOPE_RAT_HPP

#include <string>

#include <gmpxx.h>

#include "quadtope/error.hpp"

namespace quadtope {

// Exact rational scalar. GMP keeps the canonical-form invariant
// (gcd(num,den)=1, den>0) after every canonicalize() call.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw Error("zero_denominator", "rational with zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// Parses "num", "num/den" or "-num/den"; decimal forms are rejected.
inline Rat rat_parse(const std::string& s) {
    if (s.empty()) throw Error("bad_rational", "empty rational literal");
    if (s.find('.') != std::string::npos)
        throw Error("bad_rational", "decimal literals not accepted: " + s);
    try {
        Rat q(s);
        q.canonicalize();
        if (q.get_den() < 0) throw Error("bad_rational", "negative denominator: " + s);
        return q;
    } catch (const std::invalid_argument&) {
        throw Error("bad_rational", "cannot parse rational: " + s);
    }
}

inline std::string rat_str(const Rat& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline int sign_of(const Rat& q) { return sgn(q); }

inline double rat_double(const Rat& q) { return q.get_d(); }

}  // namespace quadtope

#endif
