#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace landdiv {

// Exact rational arithmetic. All coordinates and values in this library are
// rationals; knife positions and separation thresholds are compared exactly,
// so tie handling is deterministic.
using Rat = mpq_class;
using Int = mpz_class;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input: bad flags, bad files, violated operation preconditions.
struct InputError : Error {
    using Error::Error;
};

// A solver was asked to search a space larger than its configured budget.
struct BudgetError : Error {
    using Error::Error;
};

// A contract that the algorithms themselves guarantee was observed to fail;
// indicates a bug, not a caller mistake.
struct InvariantError : Error {
    using Error::Error;
};

inline Rat rat_of(long num, long den = 1) {
    if (den == 0) throw InputError("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// Parses "p/q" or "p". Used by every file format; whitespace is not accepted.
inline Rat rat_parse(const std::string& text) {
    if (text.empty()) throw InputError("empty rational literal");
    Rat r;
    if (r.set_str(text, 10) != 0)
        throw InputError("bad rational literal: '" + text + "'");
    if (r.get_den() == 0)
        throw InputError("zero denominator in rational literal: '" + text + "'");
    r.canonicalize();
    return r;
}

// Formats canonically: "p" when the denominator is 1, else "p/q".
inline std::string rat_str(const Rat& r) {
    return r.get_str();
}

inline Int rat_floor(const Rat& r) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

inline Int rat_ceil(const Rat& r) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

inline long rat_floor_long(const Rat& r) { return rat_floor(r).get_si(); }
inline long rat_ceil_long(const Rat& r) { return rat_ceil(r).get_si(); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline double rat_double(const Rat& r) { return r.get_d(); }

}  // namespace landdiv
