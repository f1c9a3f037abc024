#pragma once

// Packed monomial keys.
//
// A key stores up to 7 exponents (one byte each) plus the weighted total
// degree in the top byte. Variable 0 sits in the most significant exponent
// byte, so integer order on keys is graded lexicographic order and the
// product of monomials is key addition.

#include <array>
#include <cstdint>
#include <vector>

#include "fionf/errors.hpp"

namespace fionf {

using mkey = std::uint64_t;

inline constexpr int max_vars = 7;
inline constexpr int max_exponent = 255;

using expvec = std::array<int, max_vars>;

constexpr int key_shift(int v) { return 8 * (6 - v); }

constexpr int key_weight(mkey k) { return static_cast<int>(k >> 56); }

constexpr int key_exp(mkey k, int v) { return static_cast<int>((k >> key_shift(v)) & 0xFFu); }

constexpr mkey unit_key(int v, int weight = 1) { return (mkey(weight) << 56) | (mkey(1) << key_shift(v)); }

// exponent bytes only, weight stripped
constexpr mkey key_exps(mkey k) { return k & 0x00FFFFFFFFFFFFFFull; }

inline expvec unpack(mkey k)
{
    expvec e{};
    for (int v = 0; v < max_vars; ++v)
        e[static_cast<std::size_t>(v)] = key_exp(k, v);
    return e;
}

inline mkey pack(const expvec& e, const std::array<int, max_vars>& weights)
{
    mkey k = 0;
    int w = 0;
    for (int v = 0; v < max_vars; ++v) {
        const int x = e[static_cast<std::size_t>(v)];
        if (x < 0 || x > max_exponent)
            throw precondition_error("monomial exponent out of range");
        k |= mkey(x) << key_shift(v);
        w += x * weights[static_cast<std::size_t>(v)];
    }
    if (w > 255)
        throw precondition_error("monomial weight out of range");
    return k | (mkey(w) << 56);
}

// true iff every exponent of a is >= the matching exponent of b
inline bool key_divides(mkey b, mkey a)
{
    for (int v = 0; v < max_vars; ++v)
        if (key_exp(b, v) > key_exp(a, v))
            return false;
    return true;
}

} // namespace fionf
