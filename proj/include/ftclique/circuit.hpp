/**************************************************************************
 * circuit.hpp
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
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ftclique {

/// An alphabet symbol: an unsigned integer of `alphabet_bits` bits.
using Value = std::uint64_t;

/// Commutative semiring on [0, 2^bits). Two realizations cover every shipped
/// workload: arithmetic modulo `param` (a ring) and (min, +) with `param`
/// acting as +infinity (saturating addition).
struct Semiring {
    enum class Kind { PlusTimesMod, MinPlus };

    Kind kind = Kind::PlusTimesMod;
    std::uint64_t param = 2;

    static Semiring plus_times(std::uint64_t modulus) { return {Kind::PlusTimesMod, modulus}; }
    static Semiring min_plus(std::uint64_t infinity) { return {Kind::MinPlus, infinity}; }

    Value zero() const { return kind == Kind::PlusTimesMod ? 0 : param; }
    Value one() const { return kind == Kind::PlusTimesMod ? 1 % param : 0; }
    Value add(Value a, Value b) const {
        if (kind == Kind::MinPlus) return a < b ? a : b;
        return static_cast<Value>((static_cast<unsigned __int128>(a) + b) % param);
    }
    Value mul(Value a, Value b) const {
        if (kind == Kind::MinPlus) {
            const Value s = a + b;
            return (a >= param || b >= param || s >= param) ? param : s;
        }
        return static_cast<Value>((static_cast<unsigned __int128>(a) * b) % param);
    }
    /// Largest value the semiring produces (must fit the alphabet).
    Value max_value() const { return kind == Kind::MinPlus ? param : param - 1; }

    std::string name() const;
    bool operator==(const Semiring&) const = default;
};

enum class GateFunc : std::uint8_t {
    Identity,           // layer-0 input gate
    Copy,               // fan-in 1
    Sum,                // semiring sum of all in-wires
    SumOfProducts,      // in-wires are (a0, b0, a1, b1, ...): sum of a_i * b_i
    LinearCombination,  // sum of coeffs[i] * in_i
    Opaque,             // pure callback of the in-wire values
};

const char* to_string(GateFunc f);
std::optional<GateFunc> gate_func_from_string(const std::string& s);

/// Reference to gate `index` of layer `layer`.
struct Wire {
    std::uint32_t layer = 0;
    std::uint32_t index = 0;
    bool operator==(const Wire&) const = default;
};

struct Gate {
    GateFunc func = GateFunc::Identity;
    std::vector<Wire> in;             // must all lie in the preceding layer
    std::vector<Value> coeffs;        // LinearCombination only
    std::uint32_t opaque_id = 0;      // Opaque only
};

using OpaqueFn = std::function<Value(std::span<const Value>)>;

/// Gates in layers V_0 .. V_D; every wire goes from layer i-1 to layer i.
class LayeredCircuit {
public:
    LayeredCircuit(std::size_t n, unsigned alphabet_bits, Semiring semiring);

    std::size_t n() const { return n_; }
    unsigned alphabet_bits() const { return alphabet_bits_; }
    const Semiring& semiring() const { return semiring_; }

    /// D; a circuit with only V_0 has depth 0.
    std::size_t depth() const { return layers_.empty() ? 0 : layers_.size() - 1; }
    std::size_t num_layers() const { return layers_.size(); }
    const std::vector<Gate>& layer(std::size_t i) const { return layers_.at(i); }
    std::size_t gate_count() const;

    std::size_t add_layer();
    std::size_t add_gate(std::size_t layer, Gate gate);
    /// Adds `count` layer-0 identity gates; returns the first index.
    std::size_t add_inputs(std::size_t count);

    std::uint32_t register_opaque(OpaqueFn fn);
    const OpaqueFn& opaque(std::uint32_t id) const { return opaque_.at(id); }
    bool has_opaque() const { return !opaque_.empty(); }

private:
    std::size_t n_;
    unsigned alphabet_bits_;
    Semiring semiring_;
    std::vector<std::vector<Gate>> layers_;
    std::vector<OpaqueFn> opaque_;
};

/// Empty iff the circuit is well formed: identity gates exactly on layer 0,
/// in-wires inside the preceding layer, arity matching the function, and the
/// gate graph connected.
std::vector<std::string> validate(const LayeredCircuit& circuit);

/// Value of gate `index` in `layer` >= 1 given the values of layer - 1.
/// Only the entries named by the gate's in-wires are read.
Value evaluate_gate(const LayeredCircuit& circuit, std::size_t layer, std::size_t index,
                    std::span<const Value> previous);

/// Values of every layer, V_0 first.
std::vector<std::vector<Value>> evaluate_all(const LayeredCircuit& circuit,
                                             std::span<const Value> inputs);

/// Forward evaluation; returns the values of V_D in gate order.
std::vector<Value> evaluate(const LayeredCircuit& circuit, std::span<const Value> inputs);

/// Marks a padding slot in a piece: a virtual gate holding the value zero.
inline constexpr std::int64_t kVirtualGate = -1;

/// Assignment of every gate to a part (one per node id) and the subdivision
/// of each part into pieces of exactly `group_size` slots.
class PartitionScheme {
public:
    using Piece = std::vector<std::int64_t>;

    PartitionScheme() = default;
    PartitionScheme(std::size_t parts, std::size_t group_size, std::size_t num_layers);

    /// Chunks every part into consecutive pieces of `group_size` gates in
    /// part order, padding the last piece with virtual gates.
    static PartitionScheme from_parts(const LayeredCircuit& circuit,
                                      std::vector<std::vector<std::vector<std::uint32_t>>> parts,
                                      std::size_t group_size);

    std::size_t num_parts() const { return num_parts_; }
    std::size_t group_size() const { return group_size_; }
    std::size_t num_layers() const { return parts_.size(); }

    const std::vector<std::uint32_t>& part(std::size_t layer, std::size_t w) const {
        return parts_.at(layer).at(w);
    }
    const std::vector<Piece>& pieces(std::size_t layer, std::size_t w) const {
        return pieces_.at(layer).at(w);
    }
    std::uint32_t part_of(std::size_t layer, std::size_t gate) const {
        return part_of_.at(layer).at(gate);
    }
    /// (piece, slot) holding `gate`; the first occurrence if pieces overlap.
    std::pair<std::uint32_t, std::uint32_t> piece_of(std::size_t layer, std::size_t gate) const {
        return piece_of_.at(layer).at(gate).front();
    }
    /// Every (piece, slot) of the gate's part that holds `gate`.
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pieces_containing(
        std::size_t layer, std::size_t gate) const {
        return piece_of_.at(layer).at(gate);
    }

    void set_part(std::size_t layer, std::size_t w, std::vector<std::uint32_t> gates);
    void set_pieces(std::size_t layer, std::size_t w, std::vector<Piece> pieces);

    /// Recomputes gate -> part / piece lookups; throws std::invalid_argument
    /// when the parts do not partition a layer or pieces are malformed.
    void finalize(const LayeredCircuit& circuit);

    /// Same scheme with node ids relabeled: part w becomes part perm[w].
    PartitionScheme relabeled(std::span<const std::size_t> perm,
                              const LayeredCircuit& circuit) const;

private:
    std::size_t num_parts_ = 0;
    std::size_t group_size_ = 0;
    std::vector<std::vector<std::vector<std::uint32_t>>> parts_;
    std::vector<std::vector<std::vector<Piece>>> pieces_;
    std::vector<std::vector<std::uint32_t>> part_of_;
    std::vector<std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>>> piece_of_;
};

/// Exact counts for the wires entering one layer (from the layer before it).
struct LayerLocality {
    std::size_t layer = 0;               // receiving layer i + 1
    std::size_t max_left_fan = 0;        // max_w |E_w^L| (cross wires leaving a part)
    std::size_t max_right_fan = 0;       // max_u |E_u^R| (cross wires entering a part)
    std::size_t max_bin_count = 0;       // max_u |bin(P_{i+1,u})|
    std::size_t min_bin_count = 0;
    std::size_t max_source_parts = 0;    // distinct other parts wiring into one part
    std::size_t min_source_parts = 0;
    std::size_t max_wires_per_source = 0;  // cross wires from one source part to one part
    std::size_t min_wires_per_source = 0;
    bool has_cross_wires = false;
};

struct LocalityReport {
    std::size_t max_block_fan = 0;     // max |E^L|, |E^R| over all layer pairs
    std::size_t max_piece_count = 0;   // max pieces per part
    std::size_t max_bin_count = 0;     // max |bin(P_{i+1,u})|
    std::size_t max_output_part = 0;   // max gates in a last-layer part
    std::vector<LayerLocality> layers; // index i describes wires into layer i + 1
    std::vector<std::size_t> max_pieces_per_layer;
};

/// Exact counts by wire traversal. Throws std::invalid_argument if the scheme
/// does not match the circuit's layer sizes.
LocalityReport analyze_partition(const LayeredCircuit& circuit, const PartitionScheme& scheme);

struct Epoch {
    std::size_t start = 0;  // checkpointed layer the epoch reads from
    std::size_t end = 0;    // layer checkpointed at the end of the epoch
    /// Layers in (start, end] whose parts read cross-part wires; at most the
    /// first one (start + 1), by construction.
    bool collects = false;
};

struct EpochPlan {
    /// computation[i] for i < D: every wire out of P_{i,w} enters P_{i+1,w}.
    std::vector<bool> computation;
    /// Receiving layers with at least one cross-part wire.
    std::vector<std::size_t> communication_layers;
    /// Layers whose values are checkpointed: 0, every non-computation layer,
    /// and D.
    std::vector<std::size_t> checkpoint_layers;
    std::vector<Epoch> epochs;
};

EpochPlan classify_layers(const LayeredCircuit& circuit, const PartitionScheme& scheme);

/// Pieces (layer, part w != u, piece j) with a gate wired into P_{layer+1,u}.
struct PieceRef {
    std::uint32_t layer = 0;
    std::uint32_t part = 0;
    std::uint32_t piece = 0;
    auto operator<=>(const PieceRef&) const = default;
};
std::vector<PieceRef> bin(const LayeredCircuit& circuit, const PartitionScheme& scheme,
                          std::size_t layer, std::size_t u);
/// Pieces of any part (including u) with a gate wired into P_{layer+1,u}.
std::vector<PieceRef> inputs_of_part(const LayeredCircuit& circuit, const PartitionScheme& scheme,
                                     std::size_t layer, std::size_t u);

// Text exchange format (see README):
//   circuit n <n> depth <D> alphabet_bits <bits> semiring <plus-times|min-plus> <param>
//   <layer> <index> <func> <fanin> <l1>:<i1> ... <lF>:<iF> [coeffs <c1> ... <cF>]
//   scheme parts <n> group_size <g> layers <L>
//   piece <layer> <part> <piece> <slot_1> ... <slot_g>     (-1 = virtual gate)
void write_circuit(std::ostream& os, const LayeredCircuit& circuit);
LayeredCircuit read_circuit(std::istream& is);
void write_scheme(std::ostream& os, const PartitionScheme& scheme);
PartitionScheme read_scheme(std::istream& is, const LayeredCircuit& circuit);

}  // namespace ftclique
