/**************************************************************************
 * galois.hpp
 *
 * Copyright 2026 The ftclique Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 **************************************************************************/

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ftclique {

/// Prime field GF(2^61 - 1). Reduction uses the Mersenne identity
/// 2^61 = 1 (mod q), so a 122-bit product folds back in two additions.
class Fp {
public:
    static constexpr std::uint64_t kModulus = (std::uint64_t{1} << 61) - 1;
    /// floor(log2 q); the number of payload bits an element can carry.
    static constexpr unsigned kUsableBits = 60;

    constexpr Fp() = default;
    constexpr explicit Fp(std::uint64_t v) : value_(fold(v)) {}

    constexpr std::uint64_t value() const { return value_; }

    friend constexpr Fp operator+(Fp a, Fp b) {
        std::uint64_t s = a.value_ + b.value_;
        if (s >= kModulus) s -= kModulus;
        return from_reduced(s);
    }
    friend constexpr Fp operator-(Fp a, Fp b) {
        return from_reduced(a.value_ >= b.value_ ? a.value_ - b.value_
                                                 : a.value_ + kModulus - b.value_);
    }
    friend constexpr Fp operator*(Fp a, Fp b) {
        unsigned __int128 p = static_cast<unsigned __int128>(a.value_) * b.value_;
        std::uint64_t lo = static_cast<std::uint64_t>(p) & kModulus;
        std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
        std::uint64_t s = lo + hi;
        if (s >= kModulus) s -= kModulus;
        return from_reduced(s);
    }
    Fp& operator+=(Fp o) { return *this = *this + o; }
    Fp& operator-=(Fp o) { return *this = *this - o; }
    Fp& operator*=(Fp o) { return *this = *this * o; }
    friend constexpr bool operator==(Fp a, Fp b) = default;

    constexpr Fp pow(std::uint64_t e) const {
        Fp base = *this, acc{1};
        while (e) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }
    /// Throws std::domain_error for zero.
    Fp inverse() const;

private:
    static constexpr std::uint64_t fold(std::uint64_t v) {
        std::uint64_t s = (v & kModulus) + (v >> 61);
        return s >= kModulus ? s - kModulus : s;
    }
    static constexpr Fp from_reduced(std::uint64_t v) {
        Fp f;
        f.value_ = v;
        return f;
    }
    std::uint64_t value_ = 0;
};

/// [N, K, d] erasure-code parameters with K = N / c and d = N - K + 1.
struct CodeParams {
    std::size_t length = 0;          // N
    std::size_t message_length = 0;  // K
    std::size_t distance = 0;        // d
    std::size_t fault_parameter = 0; // c

    /// Throws std::invalid_argument unless c >= 1 divides N.
    static CodeParams make(std::size_t length, std::size_t fault_parameter);

    bool operator==(const CodeParams&) const = default;
};

/// One coordinate of a codeword: the symbol at evaluation point `index`.
struct IndexedSymbol {
    std::uint32_t index = 0;
    Fp value;
};

/// The piece of an interleaved codeword held by one node: position `index`
/// of every parallel RS instance.
struct Shard {
    std::uint32_t index = 0;
    std::vector<Fp> payload;

    bool operator==(const Shard&) const = default;
};

class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Systematic Reed-Solomon code over GF(2^61 - 1). Codeword position i is the
/// evaluation at x = i of the unique degree < K polynomial whose values at
/// 0..K-1 are the message symbols.
class ReedSolomon {
public:
    explicit ReedSolomon(CodeParams params);

    const CodeParams& params() const { return params_; }

    std::vector<Fp> encode(std::span<const Fp> message) const;

    /// Recovers the message from any K distinct positions. Extra symbols
    /// beyond the first K distinct ones are ignored (erasure decoding only).
    std::vector<Fp> decode(std::span<const IndexedSymbol> symbols) const;

    /// Lagrange weights mapping the values at `points` (K distinct evaluation
    /// points) to the message positions 0..K-1; row t holds the weights for
    /// position t. Shared across every instance of an interleaved codeword.
    std::vector<std::vector<Fp>> interpolation_matrix(std::span<const std::uint32_t> points) const;

private:
    CodeParams params_;
    // parity_[i - K][j]: weight of message symbol j in codeword position i.
    std::vector<std::vector<Fp>> parity_;
};

std::vector<Fp> rs_encode(std::span<const Fp> message, const CodeParams& params);
std::vector<Fp> rs_decode(std::span<const IndexedSymbol> symbols, const CodeParams& params);

/// Number of data symbols of `symbol_bits` bits packed into one field element.
std::size_t symbols_per_element(unsigned symbol_bits);

/// Packs `state` (data symbols of `symbol_bits` bits each) into field
/// elements, prefixed by a length header element, zero-padded to a multiple
/// of K, and encodes it as W interleaved RS instances. Returns N shards; shard
/// i carries position i of all W instances. An empty state yields N shards
/// with empty payloads.
std::vector<Shard> encode_state(std::span<const std::uint64_t> state, const CodeParams& params,
                                unsigned symbol_bits);

/// Inverse of encode_state from any K shards with distinct indices.
std::vector<std::uint64_t> decode_state(std::span<const Shard> shards, const CodeParams& params,
                                        unsigned symbol_bits);

/// Interleave width W that encode_state uses for a state of `length` symbols.
std::size_t interleave_width(std::size_t length, const CodeParams& params, unsigned symbol_bits);

}  // namespace ftclique
