/**************************************************************************
 * galois.cpp
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

#include "ftclique/galois.hpp"

#include <algorithm>
#include <string>

namespace ftclique {

Fp Fp::inverse() const {
    if (value_ == 0) throw std::domain_error("inverse of zero in GF(2^61-1)");
    return pow(kModulus - 2);
}

CodeParams CodeParams::make(std::size_t length, std::size_t fault_parameter) {
    if (fault_parameter == 0 || length == 0 || length % fault_parameter != 0) {
        throw std::invalid_argument("code length " + std::to_string(length) +
                                    " is not a positive multiple of c=" +
                                    std::to_string(fault_parameter));
    }
    if (length > Fp::kModulus) throw std::invalid_argument("field too small: q < N");
    CodeParams p;
    p.length = length;
    p.message_length = length / fault_parameter;
    p.distance = length - p.message_length + 1;
    p.fault_parameter = fault_parameter;
    return p;
}

namespace {

// Weight of the value at points[s] in the interpolant evaluated at x.
std::vector<Fp> lagrange_row(std::span<const std::uint32_t> points, std::uint64_t x,
                             std::span<const Fp> inv_denominators) {
    const std::size_t k = points.size();
    std::vector<Fp> row(k);
    // If x is one of the points the row is a unit vector.
    for (std::size_t s = 0; s < k; ++s) {
        if (points[s] == x) {
            row[s] = Fp{1};
            return row;
        }
    }
    // prefix/suffix products of (x - p_m) give the numerators in O(k)
    std::vector<Fp> prefix(k + 1, Fp{1}), suffix(k + 1, Fp{1});
    const Fp fx{x};
    for (std::size_t m = 0; m < k; ++m) prefix[m + 1] = prefix[m] * (fx - Fp{points[m]});
    for (std::size_t m = k; m-- > 0;) suffix[m] = suffix[m + 1] * (fx - Fp{points[m]});
    for (std::size_t s = 0; s < k; ++s) row[s] = prefix[s] * suffix[s + 1] * inv_denominators[s];
    return row;
}

std::vector<Fp> inverse_denominators(std::span<const std::uint32_t> points) {
    const std::size_t k = points.size();
    std::vector<Fp> den(k, Fp{1});
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t m = 0; m < k; ++m)
            if (m != s) den[s] *= Fp{points[s]} - Fp{points[m]};
    // batch inversion
    std::vector<Fp> prefix(k + 1, Fp{1});
    for (std::size_t s = 0; s < k; ++s) prefix[s + 1] = prefix[s] * den[s];
    Fp inv = prefix[k].inverse();
    std::vector<Fp> out(k);
    for (std::size_t s = k; s-- > 0;) {
        out[s] = inv * prefix[s];
        inv *= den[s];
    }
    return out;
}

}  // namespace

ReedSolomon::ReedSolomon(CodeParams params) : params_(params) {
    const std::size_t k = params_.message_length;
    std::vector<std::uint32_t> points(k);
    for (std::size_t j = 0; j < k; ++j) points[j] = static_cast<std::uint32_t>(j);
    const auto inv = inverse_denominators(points);
    parity_.reserve(params_.length - k);
    for (std::size_t i = k; i < params_.length; ++i) parity_.push_back(lagrange_row(points, i, inv));
}

std::vector<Fp> ReedSolomon::encode(std::span<const Fp> message) const {
    if (message.size() != params_.message_length)
        throw std::invalid_argument("rs_encode: message length " + std::to_string(message.size()) +
                                    " != K=" + std::to_string(params_.message_length));
    std::vector<Fp> codeword(message.begin(), message.end());
    codeword.reserve(params_.length);
    for (const auto& row : parity_) {
        Fp acc;
        for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * message[j];
        codeword.push_back(acc);
    }
    return codeword;
}

std::vector<std::vector<Fp>> ReedSolomon::interpolation_matrix(
    std::span<const std::uint32_t> points) const {
    const std::size_t k = params_.message_length;
    if (points.size() != k) throw std::invalid_argument("interpolation needs exactly K points");
    const auto inv = inverse_denominators(points);
    std::vector<std::vector<Fp>> m;
    m.reserve(k);
    for (std::size_t t = 0; t < k; ++t) m.push_back(lagrange_row(points, t, inv));
    return m;
}

namespace {

// First K distinct indices, in input order; throws on duplicates/too few.
std::vector<std::size_t> select_distinct(std::span<const std::uint32_t> indices, std::size_t k,
                                         std::size_t length) {
    std::vector<bool> seen(length, false);
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    for (std::size_t s = 0; s < indices.size(); ++s) {
        const auto idx = indices[s];
        if (idx >= length) throw DecodeError("shard index " + std::to_string(idx) + " out of range");
        if (seen[idx]) throw DecodeError("duplicate shard index " + std::to_string(idx));
        seen[idx] = true;
        if (chosen.size() < k) chosen.push_back(s);
    }
    if (chosen.size() < k)
        throw DecodeError("insufficient shards: have " + std::to_string(chosen.size()) +
                          ", need K=" + std::to_string(k));
    return chosen;
}

}  // namespace

std::vector<Fp> ReedSolomon::decode(std::span<const IndexedSymbol> symbols) const {
    const std::size_t k = params_.message_length;
    std::vector<std::uint32_t> indices;
    indices.reserve(symbols.size());
    for (const auto& s : symbols) indices.push_back(s.index);
    const auto chosen = select_distinct(indices, k, params_.length);

    std::vector<std::uint32_t> points;
    points.reserve(k);
    bool systematic = true;
    for (auto s : chosen) {
        points.push_back(symbols[s].index);
        systematic = systematic && symbols[s].index < k;
    }
    std::vector<Fp> message(k);
    if (systematic) {
        for (auto s : chosen) message[symbols[s].index] = symbols[s].value;
        return message;
    }
    const auto weights = interpolation_matrix(points);
    for (std::size_t t = 0; t < k; ++t) {
        Fp acc;
        for (std::size_t s = 0; s < k; ++s) acc += weights[t][s] * symbols[chosen[s]].value;
        message[t] = acc;
    }
    return message;
}

std::vector<Fp> rs_encode(std::span<const Fp> message, const CodeParams& params) {
    return ReedSolomon(params).encode(message);
}

std::vector<Fp> rs_decode(std::span<const IndexedSymbol> symbols, const CodeParams& params) {
    return ReedSolomon(params).decode(symbols);
}

std::size_t symbols_per_element(unsigned symbol_bits) {
    if (symbol_bits == 0 || symbol_bits > Fp::kUsableBits)
        throw std::invalid_argument("symbol width must be in [1, 60] bits");
    return Fp::kUsableBits / symbol_bits;
}

std::size_t interleave_width(std::size_t length, const CodeParams& params, unsigned symbol_bits) {
    if (length == 0) return 0;
    const std::size_t per = symbols_per_element(symbol_bits);
    const std::size_t elements = 1 + (length + per - 1) / per;  // header + data
    return (elements + params.message_length - 1) / params.message_length;
}

std::vector<Shard> encode_state(std::span<const std::uint64_t> state, const CodeParams& params,
                                unsigned symbol_bits) {
    const std::size_t n = params.length, k = params.message_length;
    std::vector<Shard> shards(n);
    for (std::size_t i = 0; i < n; ++i) shards[i].index = static_cast<std::uint32_t>(i);
    const std::size_t width = interleave_width(state.size(), params, symbol_bits);
    if (width == 0) return shards;

    const std::size_t per = symbols_per_element(symbol_bits);
    const std::uint64_t mask =
        symbol_bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << symbol_bits) - 1;
    std::vector<Fp> elements(width * k);
    elements[0] = Fp{static_cast<std::uint64_t>(state.size())};
    for (std::size_t s = 0; s < state.size(); ++s) {
        if (state[s] & ~mask)
            throw std::invalid_argument("data symbol " + std::to_string(state[s]) + " exceeds " +
                                        std::to_string(symbol_bits) + " bits");
        const std::size_t e = 1 + s / per, slot = s % per;
        elements[e] = Fp{elements[e].value() | (state[s] << (slot * symbol_bits))};
    }

    const ReedSolomon code(params);
    for (auto& sh : shards) sh.payload.resize(width);
    for (std::size_t w = 0; w < width; ++w) {
        const auto cw = code.encode(std::span<const Fp>(elements).subspan(w * k, k));
        for (std::size_t i = 0; i < n; ++i) shards[i].payload[w] = cw[i];
    }
    return shards;
}

std::vector<std::uint64_t> decode_state(std::span<const Shard> shards, const CodeParams& params,
                                        unsigned symbol_bits) {
    const std::size_t k = params.message_length;
    std::vector<std::uint32_t> indices;
    indices.reserve(shards.size());
    for (const auto& s : shards) indices.push_back(s.index);
    const auto chosen = select_distinct(indices, k, params.length);

    const std::size_t width = shards[chosen[0]].payload.size();
    for (auto s : chosen)
        if (shards[s].payload.size() != width) throw DecodeError("inconsistent shard payload widths");
    if (width == 0) return {};

    std::vector<std::uint32_t> points;
    for (auto s : chosen) points.push_back(shards[s].index);
    const ReedSolomon code(params);
    const auto weights = code.interpolation_matrix(points);

    std::vector<Fp> elements(width * k);
    for (std::size_t w = 0; w < width; ++w)
        for (std::size_t t = 0; t < k; ++t) {
            Fp acc;
            for (std::size_t s = 0; s < k; ++s) acc += weights[t][s] * shards[chosen[s]].payload[w];
            elements[w * k + t] = acc;
        }

    const std::size_t per = symbols_per_element(symbol_bits);
    const std::uint64_t length = elements[0].value();
    if (length > (elements.size() - 1) * per) throw DecodeError("corrupt length header");
    const std::uint64_t mask = (std::uint64_t{1} << symbol_bits) - 1;
    std::vector<std::uint64_t> state(length);
    for (std::size_t s = 0; s < length; ++s) {
        const std::size_t e = 1 + s / per, slot = s % per;
        state[s] = (elements[e].value() >> (slot * symbol_bits)) & mask;
    }
    return state;
}

}  // namespace ftclique
