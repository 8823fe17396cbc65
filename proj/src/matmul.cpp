/**************************************************************************
 * matmul.cpp
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

#include "ftclique/matmul.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace ftclique {

Matrix Matrix::identity(std::size_t n, const Semiring& s) {
    Matrix m(n, s.zero());
    for (std::size_t i = 0; i < n; ++i) m(i, i) = s.one();
    return m;
}

Matrix naive_mm(const Matrix& a, const Matrix& b, const Semiring& s) {
    if (a.dim != b.dim || a.data.size() != a.dim * a.dim || b.data.size() != b.dim * b.dim)
        throw std::invalid_argument("naive_mm: dimension mismatch");
    const std::size_t n = a.dim;
    Matrix c(n, s.zero());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Value acc = s.zero();
            for (std::size_t k = 0; k < n; ++k) acc = s.add(acc, s.mul(a(i, k), b(k, j)));
            c(i, j) = acc;
        }
    return c;
}

std::optional<std::size_t> exact_root(std::size_t n, unsigned k) {
    if (k == 0) return std::nullopt;
    auto r = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / k)));
    for (std::size_t cand : {r == 0 ? 0 : r - 1, r, r + 1}) {
        std::size_t p = 1;
        for (unsigned i = 0; i < k; ++i) p *= cand;
        if (p == n) return cand;
    }
    return std::nullopt;
}

std::uint64_t largest_prime_at_most(std::uint64_t x) {
    if (x < 2) throw std::invalid_argument("no prime below 2");
    for (std::uint64_t p = x;; --p) {
        bool prime = p >= 2;
        for (std::uint64_t d = 2; d * d <= p && prime; ++d) prime = p % d != 0;
        if (prime) return p;
    }
}

double MMTensor::sigma() const {
    return std::log(static_cast<double>(rank)) / std::log(static_cast<double>(m));
}

MMTensor trivial_tensor(std::size_t m) {
    if (m == 0) throw std::invalid_argument("tensor block count must be positive");
    MMTensor t;
    t.name = "trivial";
    t.m = m;
    t.rank = m * m * m;
    t.alpha.assign(t.rank * m * m, 0);
    t.beta.assign(t.rank * m * m, 0);
    t.gamma.assign(m * m * t.rank, 0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < m; ++l)
            for (std::size_t j = 0; j < m; ++j) {
                const std::size_t k = (i * m + l) * m + j;
                t.alpha[(k * m + i) * m + l] = 1;
                t.beta[(k * m + l) * m + j] = 1;
                t.gamma[(i * m + j) * t.rank + k] = 1;
            }
    return t;
}

MMTensor strassen_tensor() {
    MMTensor t;
    t.name = "strassen";
    t.m = 2;
    t.rank = 7;
    // entries in order 11, 12, 21, 22
    const std::int64_t a[7][4] = {{1, 0, 0, 1}, {0, 0, 1, 1}, {1, 0, 0, 0}, {0, 0, 0, 1},
                                  {1, 1, 0, 0}, {-1, 0, 1, 0}, {0, 1, 0, -1}};
    const std::int64_t b[7][4] = {{1, 0, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, -1}, {-1, 0, 1, 0},
                                  {0, 0, 0, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}};
    const std::int64_t g[4][7] = {{1, 0, 0, 1, -1, 0, 1},
                                  {0, 0, 1, 0, 1, 0, 0},
                                  {0, 1, 0, 1, 0, 0, 0},
                                  {1, -1, 1, 0, 0, 1, 0}};
    for (std::size_t k = 0; k < 7; ++k)
        for (std::size_t e = 0; e < 4; ++e) {
            t.alpha.push_back(a[k][e]);
            t.beta.push_back(b[k][e]);
        }
    for (std::size_t e = 0; e < 4; ++e)
        for (std::size_t k = 0; k < 7; ++k) t.gamma.push_back(g[e][k]);
    return t;
}

MMTensor tensor_by_name(const std::string& name, std::size_t m) {
    if (name == "trivial") return trivial_tensor(m);
    if (name == "strassen") return strassen_tensor();
    throw std::invalid_argument("unknown tensor '" + name + "' (expected trivial or strassen)");
}

Value ring_coefficient(std::int64_t c, const Semiring& ring) {
    if (ring.kind != Semiring::Kind::PlusTimesMod)
        throw std::invalid_argument("tensor coefficients need a ring");
    const auto p = static_cast<std::int64_t>(ring.param);
    return static_cast<Value>(((c % p) + p) % p);
}

Matrix apply_tensor(const MMTensor& t, const Matrix& x, const Matrix& y, const Semiring& ring) {
    const std::size_t m = t.m;
    if (x.dim != m || y.dim != m) throw std::invalid_argument("apply_tensor: dimension mismatch");
    std::vector<Value> prod(t.rank);
    for (std::size_t k = 0; k < t.rank; ++k) {
        Value xh = 0, yh = 0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                xh = ring.add(xh, ring.mul(ring_coefficient(t.a(k, i, j), ring), x(i, j)));
                yh = ring.add(yh, ring.mul(ring_coefficient(t.b(k, i, j), ring), y(i, j)));
            }
        prod[k] = ring.mul(xh, yh);
    }
    Matrix out(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            Value acc = 0;
            for (std::size_t k = 0; k < t.rank; ++k)
                acc = ring.add(acc, ring.mul(ring_coefficient(t.g(i, j, k), ring), prod[k]));
            out(i, j) = acc;
        }
    return out;
}

namespace {

unsigned bits_for_semiring(const Semiring& s) {
    unsigned bits = 1;
    while (s.max_value() >> bits) ++bits;
    return bits;
}

Wire wire(std::size_t layer, std::size_t index) {
    return {static_cast<std::uint32_t>(layer), static_cast<std::uint32_t>(index)};
}

// Contiguous parts of `size` gates each.
std::vector<std::vector<std::uint32_t>> uniform_parts(std::size_t n, std::size_t size) {
    std::vector<std::vector<std::uint32_t>> parts(n);
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t j = 0; j < size; ++j) parts[w].push_back(static_cast<std::uint32_t>(w * size + j));
    return parts;
}

}  // namespace

std::size_t group_size_for(std::size_t n, double chi) {
    if (!(chi > 0.0 && chi <= 1.0)) throw std::invalid_argument("chi must lie in (0, 1]");
    const double g = std::pow(static_cast<double>(n), chi);
    const auto r = static_cast<std::size_t>(std::llround(g));
    if (std::abs(g - static_cast<double>(r)) > 1e-6 * g || r == 0 || n % r != 0)
        throw std::invalid_argument("n^chi = " + std::to_string(g) + " must be an integer dividing n");
    return r;
}

MMCircuit build_semiring_mm_circuit(std::size_t n, const Semiring& s, std::size_t group_size) {
    const auto root = exact_root(n, 3);
    if (!root || n < 8) throw std::invalid_argument("n must be a perfect cube >= 8, got " + std::to_string(n));
    const std::size_t q = *root, blk = q * q;
    if (group_size == 0) group_size = n;

    MMCircuit mm{LayeredCircuit(n, bits_for_semiring(s), s), {}, {n, q, blk, q, q}, {}, {}, {1, 3}};
    auto& c = mm.circuit;
    auto split = [q](std::size_t w) {
        return std::array<std::size_t, 3>{w / (q * q), (w / q) % q, w % q};
    };
    auto id = [q](std::size_t a, std::size_t b, std::size_t d) { return (a * q + b) * q + d; };

    // layer 0: A^{w1}_{w2}[w3] (blk x q) then B^{w1}_{w2}[w3] (q x blk)
    c.add_inputs(2 * n * n);
    for (std::size_t w = 0; w < n; ++w) {
        const auto [w1, w2, w3] = split(w);
        for (std::size_t i = 0; i < blk; ++i)
            for (std::size_t j = 0; j < q; ++j)
                mm.input_entries.push_back({0, static_cast<std::uint32_t>(w1 * blk + i),
                                            static_cast<std::uint32_t>(w2 * blk + w3 * q + j)});
        for (std::size_t j = 0; j < q; ++j)
            for (std::size_t k = 0; k < blk; ++k)
                mm.input_entries.push_back({1, static_cast<std::uint32_t>(w1 * blk + w3 * q + j),
                                            static_cast<std::uint32_t>(w2 * blk + k)});
    }

    // layer 1: A^{w1}_{w2}[v] for all v, then B^{w2}_{w3}[v] for all v
    const std::size_t l1 = 2 * q * n;
    c.add_layer();
    for (std::size_t w = 0; w < n; ++w) {
        const auto [w1, w2, w3] = split(w);
        for (std::size_t v = 0; v < q; ++v)
            for (std::size_t e = 0; e < n; ++e)
                c.add_gate(1, Gate{GateFunc::Copy, {wire(0, id(w1, w2, v) * 2 * n + e)}, {}, 0});
        for (std::size_t v = 0; v < q; ++v)
            for (std::size_t e = 0; e < n; ++e)
                c.add_gate(1, Gate{GateFunc::Copy, {wire(0, id(w2, w3, v) * 2 * n + n + e)}, {}, 0});
    }

    // layer 2: (A^{w1}_{w2} B^{w2}_{w3})_{ik}, row-major
    const std::size_t l2 = blk * blk;
    c.add_layer();
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t i = 0; i < blk; ++i)
            for (std::size_t k = 0; k < blk; ++k) {
                Gate g{GateFunc::SumOfProducts, {}, {}, 0};
                g.in.reserve(2 * blk);
                for (std::size_t v = 0; v < q; ++v)
                    for (std::size_t j = 0; j < q; ++j) {
                        g.in.push_back(wire(1, w * l1 + v * n + i * q + j));
                        g.in.push_back(wire(1, w * l1 + q * n + v * n + j * blk + k));
                    }
                c.add_gate(2, std::move(g));
            }

    // layer 3: rows w2*q + i of A^{w1}_v B^v_{w3} for each v
    const std::size_t l3 = q * n;
    c.add_layer();
    for (std::size_t w = 0; w < n; ++w) {
        const auto [w1, w2, w3] = split(w);
        for (std::size_t v = 0; v < q; ++v)
            for (std::size_t i = 0; i < q; ++i)
                for (std::size_t j = 0; j < blk; ++j)
                    c.add_gate(3, Gate{GateFunc::Copy,
                                       {wire(2, id(w1, v, w3) * l2 + (w2 * q + i) * blk + j)}, {}, 0});
    }

    // layer 4: rows w2*q + i of C^{w1}_{w3}
    c.add_layer();
    for (std::size_t w = 0; w < n; ++w) {
        const auto [w1, w2, w3] = split(w);
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = 0; j < blk; ++j) {
                Gate g{GateFunc::Sum, {}, {}, 0};
                for (std::size_t v = 0; v < q; ++v) g.in.push_back(wire(3, w * l3 + v * n + i * blk + j));
                c.add_gate(4, std::move(g));
                mm.output.emplace_back(static_cast<std::uint32_t>(w1 * blk + w2 * q + i),
                                       static_cast<std::uint32_t>(w3 * blk + j));
            }
    }

    std::vector<std::vector<std::vector<std::uint32_t>>> parts = {
        uniform_parts(n, 2 * n), uniform_parts(n, l1), uniform_parts(n, l2), uniform_parts(n, l3),
        uniform_parts(n, n)};
    mm.scheme = PartitionScheme::from_parts(c, std::move(parts), group_size);
    return mm;
}

double effective_chi(double chi, const MMTensor& t) { return std::max(chi, 1.0 - 2.0 / t.sigma()); }

MMCircuit build_fast_mm_circuit(std::size_t n, const MMTensor& t, const Semiring& ring, double chi) {
    if (ring.kind != Semiring::Kind::PlusTimesMod)
        throw std::invalid_argument("fast matrix multiplication needs a ring");
    if (n != t.rank)
        throw std::invalid_argument("n must equal the tensor rank " + std::to_string(t.rank));
    const auto half = exact_root(n, 2);
    if (!half) throw std::invalid_argument("n^{1/2} is not an integer for n = " + std::to_string(n));
    const std::size_t m = t.m, S = *half;
    if (n % m != 0 || (n / m) % S != 0)
        throw std::invalid_argument("n^{1/2-1/sigma} is not an integer for n = " + std::to_string(n));
    const std::size_t blk = n / m, sb = blk / S, sb2 = sb * sb;
    const std::size_t group = group_size_for(n, effective_chi(chi, t));

    MMCircuit mm{LayeredCircuit(n, bits_for_semiring(ring), ring), {}, {n, m, blk, S, sb}, {}, {}, {2, 4}};
    auto& c = mm.circuit;

    // layer 0: A^i_j[w0,w1] for all (i, j), then the same for B
    c.add_inputs(2 * n * n);
    for (std::size_t w = 0; w < n; ++w) {
        const std::size_t w0 = w / S, w1 = w % S;
        for (std::uint8_t mat = 0; mat < 2; ++mat)
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    for (std::size_t a = 0; a < sb; ++a)
                        for (std::size_t b = 0; b < sb; ++b)
                            mm.input_entries.push_back({mat, static_cast<std::uint32_t>(i * blk + w0 * sb + a),
                                                        static_cast<std::uint32_t>(j * blk + w1 * sb + b)});
    }

    // layer 1: for each k, A^_k[w] then B^_k[w]
    const std::size_t l1 = 2 * n * sb2;
    c.add_layer();
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t k = 0; k < n; ++k)
            for (std::uint8_t mat = 0; mat < 2; ++mat)
                for (std::size_t e = 0; e < sb2; ++e) {
                    Gate g{GateFunc::LinearCombination, {}, {}, 0};
                    for (std::size_t i = 0; i < m; ++i)
                        for (std::size_t j = 0; j < m; ++j) {
                            const auto coeff = mat == 0 ? t.a(k, i, j) : t.b(k, i, j);
                            if (coeff == 0) continue;
                            g.in.push_back(wire(0, w * 2 * n + mat * n + (i * m + j) * sb2 + e));
                            g.coeffs.push_back(ring_coefficient(coeff, ring));
                        }
                    c.add_gate(1, std::move(g));
                }

    // layer 2, part k: A^_k[v] then B^_k[v] for each v
    c.add_layer();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t e = 0; e < 2 * sb2; ++e)
                c.add_gate(2, Gate{GateFunc::Copy, {wire(1, v * l1 + k * 2 * sb2 + e)}, {}, 0});

    // layer 3: A^_w B^_w by sub-block (p, q), then entry (a, b)
    const std::size_t l3 = blk * blk;
    c.add_layer();
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t p = 0; p < S; ++p)
            for (std::size_t q = 0; q < S; ++q)
                for (std::size_t a = 0; a < sb; ++a)
                    for (std::size_t b = 0; b < sb; ++b) {
                        const std::size_t r = p * sb + a, col = q * sb + b;
                        Gate g{GateFunc::SumOfProducts, {}, {}, 0};
                        g.in.reserve(2 * blk);
                        for (std::size_t l = 0; l < blk; ++l) {
                            const std::size_t va = (r / sb) * S + l / sb, vb = (l / sb) * S + col / sb;
                            g.in.push_back(wire(2, w * l1 + va * 2 * sb2 + (r % sb) * sb + l % sb));
                            g.in.push_back(wire(2, w * l1 + vb * 2 * sb2 + sb2 + (l % sb) * sb + col % sb));
                        }
                        c.add_gate(3, std::move(g));
                    }

    // layer 4: (A^_v B^_v)[w0,w1] for each v
    const std::size_t l4 = n * sb2;
    c.add_layer();
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t e = 0; e < sb2; ++e)
                c.add_gate(4, Gate{GateFunc::Copy, {wire(3, v * l3 + w * sb2 + e)}, {}, 0});

    // layer 5: C^i_j[w0,w1]
    c.add_layer();
    for (std::size_t w = 0; w < n; ++w) {
        const std::size_t w0 = w / S, w1 = w % S;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t a = 0; a < sb; ++a)
                    for (std::size_t b = 0; b < sb; ++b) {
                        Gate g{GateFunc::LinearCombination, {}, {}, 0};
                        for (std::size_t k = 0; k < n; ++k) {
                            if (t.g(i, j, k) == 0) continue;
                            g.in.push_back(wire(4, w * l4 + k * sb2 + a * sb + b));
                            g.coeffs.push_back(ring_coefficient(t.g(i, j, k), ring));
                        }
                        c.add_gate(5, std::move(g));
                        mm.output.emplace_back(static_cast<std::uint32_t>(i * blk + w0 * sb + a),
                                               static_cast<std::uint32_t>(j * blk + w1 * sb + b));
                    }
    }

    std::vector<std::vector<std::vector<std::uint32_t>>> parts = {
        uniform_parts(n, 2 * n), uniform_parts(n, l1), uniform_parts(n, l1),
        uniform_parts(n, l3),    uniform_parts(n, l4), uniform_parts(n, n)};
    mm.scheme = PartitionScheme::from_parts(c, std::move(parts), group);
    return mm;
}

std::vector<Value> circuit_inputs(const MMCircuit& mm, const Matrix& a, const Matrix& b) {
    const std::size_t n = mm.layout.n;
    if (a.dim != n || b.dim != n) throw std::invalid_argument("matrices must be n x n");
    std::vector<Value> in;
    in.reserve(mm.input_entries.size());
    for (const auto& e : mm.input_entries) in.push_back(e.matrix == 0 ? a(e.row, e.col) : b(e.row, e.col));
    return in;
}

Matrix assemble_output(const MMCircuit& mm, std::span<const Value> outputs) {
    if (outputs.size() != mm.output.size()) throw std::invalid_argument("output size mismatch");
    Matrix c(mm.layout.n);
    for (std::size_t g = 0; g < outputs.size(); ++g) c(mm.output[g].first, mm.output[g].second) = outputs[g];
    return c;
}

std::vector<std::vector<Value>> distribute_matrix_inputs(const Matrix& a, const Matrix& b) {
    if (a.dim != b.dim) throw std::invalid_argument("distribute_matrix_inputs: dimension mismatch");
    std::vector<std::vector<Value>> out(a.dim);
    for (std::size_t r = 0; r < a.dim; ++r) {
        out[r].assign(a.data.begin() + r * a.dim, a.data.begin() + (r + 1) * a.dim);
        out[r].insert(out[r].end(), b.data.begin() + r * b.dim, b.data.begin() + (r + 1) * b.dim);
    }
    return out;
}

}  // namespace ftclique
