/**************************************************************************
 * matmul.hpp
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

#include "ftclique/circuit.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ftclique {

/// Dense square matrix, row-major.
struct Matrix {
    std::size_t dim = 0;
    std::vector<Value> data;

    Matrix() = default;
    explicit Matrix(std::size_t n, Value fill = 0) : dim(n), data(n * n, fill) {}

    Value& operator()(std::size_t r, std::size_t c) { return data[r * dim + c]; }
    Value operator()(std::size_t r, std::size_t c) const { return data[r * dim + c]; }
    bool operator==(const Matrix&) const = default;

    static Matrix identity(std::size_t n, const Semiring& s);
};

/// Triple-loop product; throws std::invalid_argument on a dimension mismatch.
Matrix naive_mm(const Matrix& a, const Matrix& b, const Semiring& s);

/// Exact integer k-th root of n, if any.
std::optional<std::size_t> exact_root(std::size_t n, unsigned k);
/// Largest prime <= x (x >= 2).
std::uint64_t largest_prime_at_most(std::uint64_t x);

/// Bilinear scheme <m,m,m;rank>: X^_k = sum alpha[k][i][j] X_ij,
/// Y^_k = sum beta[k][i][j] Y_ij, (XY)_ij = sum_k gamma[i][j][k] X^_k Y^_k.
/// Coefficients are small integers mapped into the ring on use.
struct MMTensor {
    std::string name;
    std::size_t m = 0;
    std::size_t rank = 0;
    std::vector<std::int64_t> alpha;  // [rank][m][m]
    std::vector<std::int64_t> beta;   // [rank][m][m]
    std::vector<std::int64_t> gamma;  // [m][m][rank]

    std::int64_t a(std::size_t k, std::size_t i, std::size_t j) const { return alpha[(k * m + i) * m + j]; }
    std::int64_t b(std::size_t k, std::size_t i, std::size_t j) const { return beta[(k * m + i) * m + j]; }
    std::int64_t g(std::size_t i, std::size_t j, std::size_t k) const { return gamma[(i * m + j) * rank + k]; }
    double sigma() const;
};

/// <m,m,m;m^3> with product k = (i*m + l)*m + j for X_il * Y_lj.
MMTensor trivial_tensor(std::size_t m);
MMTensor strassen_tensor();
/// "trivial" (m inferred by the caller) or "strassen".
MMTensor tensor_by_name(const std::string& name, std::size_t m);

/// Ring element for a signed tensor coefficient; requires a plus-times ring.
Value ring_coefficient(std::int64_t c, const Semiring& ring);

/// XY via the tensor; requires a plus-times ring.
Matrix apply_tensor(const MMTensor& t, const Matrix& x, const Matrix& y, const Semiring& ring);

/// Block geometry of a matrix-multiplication circuit. For the semiring
/// circuit: grid = n^{1/3}, block = n^{2/3}, inner = n^{1/3} (sub-block
/// width/height). For the fast circuit: outer = n^{1/sigma} blocks per side
/// of size block = n^{1-1/sigma}, grid = n^{1/2} sub-blocks per block side,
/// inner = n^{1/2-1/sigma}.
struct BlockLayout {
    std::size_t n = 0;
    std::size_t outer = 0;
    std::size_t block = 0;
    std::size_t grid = 0;
    std::size_t inner = 0;
};

/// Which input entry a layer-0 gate carries.
struct MatrixEntry {
    std::uint8_t matrix = 0;  // 0 = A, 1 = B
    std::uint32_t row = 0;
    std::uint32_t col = 0;
};

struct MMCircuit {
    LayeredCircuit circuit;
    PartitionScheme scheme;
    BlockLayout layout;
    std::vector<MatrixEntry> input_entries;                       // per layer-0 gate
    std::vector<std::pair<std::uint32_t, std::uint32_t>> output;  // (row, col) per output gate
    /// Layers that receive cross-part wires.
    std::vector<std::size_t> communication_layers;
};

/// Five-layer circuit over parts (w1, w2, w3) in [n^{1/3}]^3, part id
/// w1*n^{2/3} + w2*n^{1/3} + w3. Pieces have `group_size` slots (n by
/// default). Throws std::invalid_argument unless n is a perfect cube.
MMCircuit build_semiring_mm_circuit(std::size_t n, const Semiring& s, std::size_t group_size = 0);

/// Six-layer circuit over parts (w0, w1) in [n^{1/2}]^2, part id w0*n^{1/2}+w1.
/// Requires n = rank, m = n^{1/sigma} and integral n^{1/2}, n^{1/2-1/sigma}.
/// Piece size is n^{chi_eff} with chi_eff = max(chi, 1 - 2/sigma).
MMCircuit build_fast_mm_circuit(std::size_t n, const MMTensor& t, const Semiring& ring, double chi = 1.0);

/// max(chi, 1 - 2/sigma).
double effective_chi(double chi, const MMTensor& t);
/// n^chi when it is an integer dividing n; throws std::invalid_argument otherwise.
std::size_t group_size_for(std::size_t n, double chi);

/// Layer-0 values of the circuit for matrices A, B.
std::vector<Value> circuit_inputs(const MMCircuit& mm, const Matrix& a, const Matrix& b);
/// C from the output-layer values.
Matrix assemble_output(const MMCircuit& mm, std::span<const Value> outputs);

/// Row-major initial ownership: node r holds row r of A then row r of B.
std::vector<std::vector<Value>> distribute_matrix_inputs(const Matrix& a, const Matrix& b);
/// Node holding the entry before the shuffle (its row).
inline std::uint32_t initial_owner(const MatrixEntry& e) { return e.row; }

}  // namespace ftclique
