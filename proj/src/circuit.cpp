/**************************************************************************
 * circuit.cpp
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

#include "ftclique/circuit.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <set>
#include <stdexcept>

namespace ftclique {

std::string Semiring::name() const {
    return kind == Kind::PlusTimesMod ? "plus-times" : "min-plus";
}

const char* to_string(GateFunc f) {
    switch (f) {
        case GateFunc::Identity: return "identity";
        case GateFunc::Copy: return "copy";
        case GateFunc::Sum: return "sum";
        case GateFunc::SumOfProducts: return "sum-of-products";
        case GateFunc::LinearCombination: return "linear-combination";
        case GateFunc::Opaque: return "opaque";
    }
    return "?";
}

std::optional<GateFunc> gate_func_from_string(const std::string& s) {
    for (auto f : {GateFunc::Identity, GateFunc::Copy, GateFunc::Sum, GateFunc::SumOfProducts,
                   GateFunc::LinearCombination, GateFunc::Opaque})
        if (s == to_string(f)) return f;
    return std::nullopt;
}

LayeredCircuit::LayeredCircuit(std::size_t n, unsigned alphabet_bits, Semiring semiring)
    : n_(n), alphabet_bits_(alphabet_bits), semiring_(semiring) {
    if (alphabet_bits == 0 || alphabet_bits > 60)
        throw std::invalid_argument("alphabet_bits must be in [1, 60]");
    if (semiring.param == 0) throw std::invalid_argument("semiring parameter must be positive");
    if (semiring.max_value() >> alphabet_bits)
        throw std::invalid_argument("semiring values exceed the alphabet");
}

std::size_t LayeredCircuit::gate_count() const {
    std::size_t total = 0;
    for (const auto& l : layers_) total += l.size();
    return total;
}

std::size_t LayeredCircuit::add_layer() {
    layers_.emplace_back();
    return layers_.size() - 1;
}

std::size_t LayeredCircuit::add_gate(std::size_t layer, Gate gate) {
    while (layers_.size() <= layer) layers_.emplace_back();
    layers_[layer].push_back(std::move(gate));
    return layers_[layer].size() - 1;
}

std::size_t LayeredCircuit::add_inputs(std::size_t count) {
    if (layers_.empty()) layers_.emplace_back();
    const std::size_t first = layers_[0].size();
    layers_[0].resize(first + count);
    return first;
}

std::uint32_t LayeredCircuit::register_opaque(OpaqueFn fn) {
    opaque_.push_back(std::move(fn));
    return static_cast<std::uint32_t>(opaque_.size() - 1);
}

namespace {

std::string at(std::size_t layer, std::size_t index) {
    return "gate (" + std::to_string(layer) + ", " + std::to_string(index) + ")";
}

std::optional<std::string> arity_problem(const LayeredCircuit& c, const Gate& g) {
    const std::size_t f = g.in.size();
    switch (g.func) {
        case GateFunc::Identity: return std::nullopt;
        case GateFunc::Copy:
            if (f != 1) return "copy needs fan-in 1, has " + std::to_string(f);
            break;
        case GateFunc::Sum:
            if (f == 0) return std::string("sum needs fan-in >= 1");
            break;
        case GateFunc::SumOfProducts:
            if (f == 0 || f % 2) return "sum-of-products needs an even fan-in, has " + std::to_string(f);
            break;
        case GateFunc::LinearCombination:
            if (g.coeffs.size() != f) return std::string("coefficient count != fan-in");
            break;
        case GateFunc::Opaque:
            if (!c.has_opaque()) break;
            try {
                (void)c.opaque(g.opaque_id);
            } catch (const std::out_of_range&) {
                return "unknown opaque function " + std::to_string(g.opaque_id);
            }
            break;
    }
    return std::nullopt;
}

}  // namespace

std::vector<std::string> validate(const LayeredCircuit& circuit) {
    std::vector<std::string> out;
    const std::size_t layers = circuit.num_layers();
    if (layers == 0) {
        out.emplace_back("circuit has no layers");
        return out;
    }
    if (circuit.layer(0).empty()) out.emplace_back("layer 0 has no input gates");

    std::vector<std::size_t> offset(layers + 1, 0);
    for (std::size_t l = 0; l < layers; ++l) offset[l + 1] = offset[l] + circuit.layer(l).size();
    std::vector<std::size_t> parent(offset[layers]);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    for (std::size_t l = 0; l < layers; ++l) {
        const auto& gates = circuit.layer(l);
        for (std::size_t i = 0; i < gates.size(); ++i) {
            const Gate& g = gates[i];
            if (l == 0) {
                if (g.func != GateFunc::Identity || !g.in.empty())
                    out.push_back(at(l, i) + ": layer-0 gates must be identity inputs");
                continue;
            }
            if (g.func == GateFunc::Identity) {
                out.push_back(at(l, i) + ": identity gate outside layer 0");
                continue;
            }
            if (g.func == GateFunc::Opaque && !circuit.has_opaque())
                out.push_back(at(l, i) + ": opaque gate without a registered function");
            if (auto p = arity_problem(circuit, g)) out.push_back(at(l, i) + ": " + *p);
            for (const Wire& w : g.in) {
                if (w.layer + 1 != l) {
                    out.push_back(at(l, i) + ": non-consecutive wire from layer " +
                                  std::to_string(w.layer));
                    continue;
                }
                if (w.index >= circuit.layer(w.layer).size()) {
                    out.push_back(at(l, i) + ": wire to missing gate " + std::to_string(w.index));
                    continue;
                }
                parent[find(offset[l] + i)] = find(offset[w.layer] + w.index);
            }
        }
    }
    if (out.empty() && layers > 1) {
        const std::size_t root = find(0);
        for (std::size_t g = 1; g < offset[layers]; ++g)
            if (find(g) != root) {
                out.emplace_back("circuit is not connected");
                break;
            }
    }
    return out;
}

Value evaluate_gate(const LayeredCircuit& circuit, std::size_t layer, std::size_t index,
                    std::span<const Value> previous) {
    const Gate& g = circuit.layer(layer)[index];
    const Semiring& s = circuit.semiring();
    auto in = [&](std::size_t k) -> Value {
        const Wire& w = g.in[k];
        if (w.layer + 1 != layer || w.index >= previous.size())
            throw std::invalid_argument(at(layer, index) + ": bad wire");
        return previous[w.index];
    };
    Value v = 0;
    switch (g.func) {
        case GateFunc::Identity:
            throw std::invalid_argument(at(layer, index) + ": identity gate has no predecessor");
        case GateFunc::Copy:
            if (g.in.size() != 1) throw std::invalid_argument(at(layer, index) + ": arity mismatch");
            v = in(0);
            break;
        case GateFunc::Sum:
            if (g.in.empty()) throw std::invalid_argument(at(layer, index) + ": arity mismatch");
            v = in(0);
            for (std::size_t k = 1; k < g.in.size(); ++k) v = s.add(v, in(k));
            break;
        case GateFunc::SumOfProducts:
            if (g.in.empty() || g.in.size() % 2)
                throw std::invalid_argument(at(layer, index) + ": arity mismatch");
            v = s.zero();
            for (std::size_t k = 0; k < g.in.size(); k += 2) v = s.add(v, s.mul(in(k), in(k + 1)));
            break;
        case GateFunc::LinearCombination:
            if (g.coeffs.size() != g.in.size())
                throw std::invalid_argument(at(layer, index) + ": arity mismatch");
            v = s.zero();
            for (std::size_t k = 0; k < g.in.size(); ++k) v = s.add(v, s.mul(g.coeffs[k], in(k)));
            break;
        case GateFunc::Opaque: {
            std::vector<Value> args(g.in.size());
            for (std::size_t k = 0; k < args.size(); ++k) args[k] = in(k);
            v = circuit.opaque(g.opaque_id)(args);
            break;
        }
    }
    if (v >> circuit.alphabet_bits())
        throw std::range_error(at(layer, index) + ": value exceeds the alphabet");
    return v;
}

std::vector<std::vector<Value>> evaluate_all(const LayeredCircuit& circuit,
                                             std::span<const Value> inputs) {
    if (circuit.num_layers() == 0) throw std::invalid_argument("empty circuit");
    if (inputs.size() != circuit.layer(0).size())
        throw std::invalid_argument("expected " + std::to_string(circuit.layer(0).size()) +
                                    " inputs, got " + std::to_string(inputs.size()));
    std::vector<std::vector<Value>> values(circuit.num_layers());
    values[0].assign(inputs.begin(), inputs.end());
    for (Value v : values[0])
        if (v >> circuit.alphabet_bits()) throw std::range_error("input exceeds the alphabet");
    for (std::size_t l = 1; l < circuit.num_layers(); ++l) {
        values[l].resize(circuit.layer(l).size());
        for (std::size_t i = 0; i < values[l].size(); ++i)
            values[l][i] = evaluate_gate(circuit, l, i, values[l - 1]);
    }
    return values;
}

std::vector<Value> evaluate(const LayeredCircuit& circuit, std::span<const Value> inputs) {
    auto all = evaluate_all(circuit, inputs);
    return std::move(all.back());
}

// --- PartitionScheme -------------------------------------------------------

PartitionScheme::PartitionScheme(std::size_t parts, std::size_t group_size, std::size_t num_layers)
    : num_parts_(parts),
      group_size_(group_size),
      parts_(num_layers, std::vector<std::vector<std::uint32_t>>(parts)),
      pieces_(num_layers, std::vector<std::vector<Piece>>(parts)) {
    if (parts == 0 || group_size == 0) throw std::invalid_argument("empty partition scheme");
}

PartitionScheme PartitionScheme::from_parts(
    const LayeredCircuit& circuit, std::vector<std::vector<std::vector<std::uint32_t>>> parts,
    std::size_t group_size) {
    if (parts.size() != circuit.num_layers())
        throw std::invalid_argument("scheme layer count does not match the circuit");
    PartitionScheme s(circuit.n(), group_size, parts.size());
    for (std::size_t l = 0; l < parts.size(); ++l) {
        if (parts[l].size() != circuit.n())
            throw std::invalid_argument("layer " + std::to_string(l) + " must have n parts");
        for (std::size_t w = 0; w < parts[l].size(); ++w) {
            const auto& gates = parts[l][w];
            std::vector<Piece> pieces;
            for (std::size_t at = 0; at < gates.size(); at += group_size) {
                Piece p(group_size, kVirtualGate);
                for (std::size_t k = 0; k < group_size && at + k < gates.size(); ++k)
                    p[k] = gates[at + k];
                pieces.push_back(std::move(p));
            }
            s.pieces_[l][w] = std::move(pieces);
            s.parts_[l][w] = std::move(parts[l][w]);
        }
    }
    s.finalize(circuit);
    return s;
}

void PartitionScheme::set_part(std::size_t layer, std::size_t w, std::vector<std::uint32_t> gates) {
    parts_.at(layer).at(w) = std::move(gates);
}

void PartitionScheme::set_pieces(std::size_t layer, std::size_t w, std::vector<Piece> pieces) {
    pieces_.at(layer).at(w) = std::move(pieces);
}

void PartitionScheme::finalize(const LayeredCircuit& circuit) {
    if (parts_.size() != circuit.num_layers())
        throw std::invalid_argument("scheme layer count does not match the circuit");
    part_of_.assign(parts_.size(), {});
    piece_of_.assign(parts_.size(), {});
    for (std::size_t l = 0; l < parts_.size(); ++l) {
        const std::size_t size = circuit.layer(l).size();
        constexpr auto kUnset = static_cast<std::uint32_t>(-1);
        part_of_[l].assign(size, kUnset);
        piece_of_[l].assign(size, {});
        for (std::size_t w = 0; w < num_parts_; ++w) {
            for (auto g : parts_[l][w]) {
                if (g >= size)
                    throw std::invalid_argument("part (" + std::to_string(l) + ", " +
                                                std::to_string(w) + ") names a missing gate");
                if (part_of_[l][g] != kUnset)
                    throw std::invalid_argument(at(l, g) + " is in two parts");
                part_of_[l][g] = static_cast<std::uint32_t>(w);
            }
            const auto& pieces = pieces_[l][w];
            for (std::size_t j = 0; j < pieces.size(); ++j) {
                if (pieces[j].size() != group_size_)
                    throw std::invalid_argument("piece size != group_size");
                for (std::size_t k = 0; k < pieces[j].size(); ++k) {
                    const auto g = pieces[j][k];
                    if (g == kVirtualGate) continue;
                    if (g < 0 || static_cast<std::size_t>(g) >= size || part_of_[l][g] != w)
                        throw std::invalid_argument("piece " + std::to_string(j) + " of part (" +
                                                    std::to_string(l) + ", " + std::to_string(w) +
                                                    ") holds a gate outside the part");
                    piece_of_[l][g].emplace_back(static_cast<std::uint32_t>(j),
                                                 static_cast<std::uint32_t>(k));
                }
            }
        }
        for (std::size_t g = 0; g < size; ++g) {
            if (part_of_[l][g] == kUnset)
                throw std::invalid_argument("scheme does not partition layer " + std::to_string(l) +
                                            ": " + at(l, g) + " unassigned");
            if (piece_of_[l][g].empty())
                throw std::invalid_argument(at(l, g) + " is not covered by any piece");
        }
    }
}

PartitionScheme PartitionScheme::relabeled(std::span<const std::size_t> perm,
                                           const LayeredCircuit& circuit) const {
    PartitionScheme s(num_parts_, group_size_, parts_.size());
    for (std::size_t l = 0; l < parts_.size(); ++l)
        for (std::size_t w = 0; w < num_parts_; ++w) {
            s.parts_[l][perm[w]] = parts_[l][w];
            s.pieces_[l][perm[w]] = pieces_[l][w];
        }
    s.finalize(circuit);
    return s;
}

// --- analysis ---------------------------------------------------------------

namespace {

void check_scheme(const LayeredCircuit& circuit, const PartitionScheme& scheme) {
    if (scheme.num_layers() != circuit.num_layers())
        throw std::invalid_argument("scheme does not cover the circuit");
    for (std::size_t l = 0; l < circuit.num_layers(); ++l) {
        std::size_t total = 0;
        for (std::size_t w = 0; w < scheme.num_parts(); ++w) total += scheme.part(l, w).size();
        if (total != circuit.layer(l).size())
            throw std::invalid_argument("scheme does not partition layer " + std::to_string(l));
    }
}

// For every piece of layer `l`, the set of parts of layer l + 1 it feeds.
std::vector<std::vector<std::vector<std::uint32_t>>> piece_consumers(
    const LayeredCircuit& circuit, const PartitionScheme& scheme, std::size_t l) {
    const std::size_t n = scheme.num_parts();
    std::vector<std::vector<std::vector<std::uint32_t>>> out(n);
    for (std::size_t w = 0; w < n; ++w) out[w].resize(scheme.pieces(l, w).size());
    const auto& next = circuit.layer(l + 1);
    for (std::size_t d = 0; d < next.size(); ++d) {
        const auto u = scheme.part_of(l + 1, d);
        for (const Wire& wire : next[d].in) {
            const auto w = scheme.part_of(l, wire.index);
            for (auto [j, slot] : scheme.pieces_containing(l, wire.index)) out[w][j].push_back(u);
        }
    }
    for (auto& per_part : out)
        for (auto& v : per_part) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
    return out;
}

}  // namespace

LocalityReport analyze_partition(const LayeredCircuit& circuit, const PartitionScheme& scheme) {
    check_scheme(circuit, scheme);
    const std::size_t n = scheme.num_parts();
    LocalityReport r;
    for (std::size_t l = 0; l < circuit.num_layers(); ++l) {
        std::size_t max_pieces = 0;
        for (std::size_t w = 0; w < n; ++w)
            max_pieces = std::max(max_pieces, scheme.pieces(l, w).size());
        r.max_pieces_per_layer.push_back(max_pieces);
        r.max_piece_count = std::max(r.max_piece_count, max_pieces);
    }
    const std::size_t last = circuit.depth();
    for (std::size_t w = 0; w < n; ++w)
        r.max_output_part = std::max(r.max_output_part, scheme.part(last, w).size());

    for (std::size_t l = 0; l + 1 < circuit.num_layers(); ++l) {
        LayerLocality ll;
        ll.layer = l + 1;
        std::vector<std::size_t> left(n, 0), right(n, 0);
        std::vector<std::size_t> pair(n * n, 0);  // pair[u * n + w]: wires w -> u
        for (std::size_t d = 0; d < circuit.layer(l + 1).size(); ++d) {
            const auto u = scheme.part_of(l + 1, d);
            for (const Wire& wire : circuit.layer(l + 1)[d].in) {
                const auto w = scheme.part_of(l, wire.index);
                if (w == u) continue;
                ++left[w];
                ++right[u];
                ++pair[u * n + w];
            }
        }
        ll.max_left_fan = *std::max_element(left.begin(), left.end());
        ll.max_right_fan = *std::max_element(right.begin(), right.end());
        ll.has_cross_wires = ll.max_right_fan > 0;

        const auto consumers = piece_consumers(circuit, scheme, l);
        std::vector<std::size_t> bins(n, 0);
        for (std::size_t w = 0; w < n; ++w)
            for (const auto& us : consumers[w])
                for (auto u : us)
                    if (u != w) ++bins[u];

        ll.min_bin_count = ll.min_source_parts = ll.min_wires_per_source = SIZE_MAX;
        for (std::size_t u = 0; u < n; ++u) {
            ll.max_bin_count = std::max(ll.max_bin_count, bins[u]);
            ll.min_bin_count = std::min(ll.min_bin_count, bins[u]);
            std::size_t sources = 0;
            for (std::size_t w = 0; w < n; ++w) {
                const auto c = pair[u * n + w];
                if (!c) continue;
                ++sources;
                ll.max_wires_per_source = std::max(ll.max_wires_per_source, c);
                ll.min_wires_per_source = std::min(ll.min_wires_per_source, c);
            }
            ll.max_source_parts = std::max(ll.max_source_parts, sources);
            ll.min_source_parts = std::min(ll.min_source_parts, sources);
        }
        if (ll.min_wires_per_source == SIZE_MAX) ll.min_wires_per_source = 0;

        r.max_block_fan = std::max({r.max_block_fan, ll.max_left_fan, ll.max_right_fan});
        r.max_bin_count = std::max(r.max_bin_count, ll.max_bin_count);
        r.layers.push_back(ll);
    }
    return r;
}

EpochPlan classify_layers(const LayeredCircuit& circuit, const PartitionScheme& scheme) {
    check_scheme(circuit, scheme);
    EpochPlan plan;
    const std::size_t depth = circuit.depth();
    plan.computation.assign(depth, true);
    for (std::size_t l = 0; l < depth; ++l) {
        for (std::size_t d = 0; d < circuit.layer(l + 1).size() && plan.computation[l]; ++d) {
            const auto u = scheme.part_of(l + 1, d);
            for (const Wire& wire : circuit.layer(l + 1)[d].in)
                if (scheme.part_of(l, wire.index) != u) {
                    plan.computation[l] = false;
                    break;
                }
        }
        if (!plan.computation[l]) plan.communication_layers.push_back(l + 1);
    }
    plan.checkpoint_layers.push_back(0);
    for (std::size_t l = 1; l < depth; ++l)
        if (!plan.computation[l]) plan.checkpoint_layers.push_back(l);
    if (depth > 0) plan.checkpoint_layers.push_back(depth);
    for (std::size_t k = 0; k + 1 < plan.checkpoint_layers.size(); ++k) {
        Epoch e;
        e.start = plan.checkpoint_layers[k];
        e.end = plan.checkpoint_layers[k + 1];
        e.collects = !plan.computation[e.start];
        plan.epochs.push_back(e);
    }
    return plan;
}

namespace {

std::vector<PieceRef> pieces_feeding(const LayeredCircuit& circuit, const PartitionScheme& scheme,
                                     std::size_t layer, std::size_t u, bool include_self) {
    std::set<PieceRef> refs;
    for (auto d : scheme.part(layer + 1, u))
        for (const Wire& wire : circuit.layer(layer + 1)[d].in) {
            const auto w = scheme.part_of(layer, wire.index);
            if (w == u && !include_self) continue;
            for (auto [j, slot] : scheme.pieces_containing(layer, wire.index))
                refs.insert({static_cast<std::uint32_t>(layer), w, j});
        }
    return {refs.begin(), refs.end()};
}

}  // namespace

std::vector<PieceRef> bin(const LayeredCircuit& circuit, const PartitionScheme& scheme,
                          std::size_t layer, std::size_t u) {
    return pieces_feeding(circuit, scheme, layer, u, false);
}

std::vector<PieceRef> inputs_of_part(const LayeredCircuit& circuit, const PartitionScheme& scheme,
                                     std::size_t layer, std::size_t u) {
    return pieces_feeding(circuit, scheme, layer, u, true);
}

// --- text format ------------------------------------------------------------

void write_circuit(std::ostream& os, const LayeredCircuit& circuit) {
    if (circuit.has_opaque())
        throw std::invalid_argument("circuits with opaque gates cannot be serialized");
    os << "circuit n " << circuit.n() << " depth " << circuit.depth() << " alphabet_bits "
       << circuit.alphabet_bits() << " semiring " << circuit.semiring().name() << ' '
       << circuit.semiring().param << '\n';
    for (std::size_t l = 0; l < circuit.num_layers(); ++l) {
        const auto& gates = circuit.layer(l);
        for (std::size_t i = 0; i < gates.size(); ++i) {
            const Gate& g = gates[i];
            os << l << ' ' << i << ' ' << to_string(g.func) << ' ' << g.in.size();
            for (const Wire& w : g.in) os << ' ' << w.layer << ':' << w.index;
            if (g.func == GateFunc::LinearCombination) {
                os << " coeffs";
                for (Value c : g.coeffs) os << ' ' << c;
            }
            os << '\n';
        }
    }
}

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
    throw std::invalid_argument("line " + std::to_string(line) + ": " + what);
}

void expect(std::istringstream& in, const char* word, std::size_t line) {
    std::string tok;
    if (!(in >> tok) || tok != word) parse_error(line, std::string("expected '") + word + "'");
}

template <class T>
T number(std::istringstream& in, std::size_t line, const char* what) {
    T v{};
    if (!(in >> v)) parse_error(line, std::string("expected ") + what);
    return v;
}

}  // namespace

LayeredCircuit read_circuit(std::istream& is) {
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(is, text)) {
        ++line_no;
        if (text.empty() || text[0] == '#') continue;
        break;
    }
    std::istringstream head(text);
    expect(head, "circuit", line_no);
    expect(head, "n", line_no);
    const auto n = number<std::size_t>(head, line_no, "n");
    expect(head, "depth", line_no);
    const auto depth = number<std::size_t>(head, line_no, "depth");
    expect(head, "alphabet_bits", line_no);
    const auto bits = number<unsigned>(head, line_no, "alphabet_bits");
    expect(head, "semiring", line_no);
    std::string kind;
    head >> kind;
    const auto param = number<std::uint64_t>(head, line_no, "semiring parameter");
    Semiring s;
    if (kind == "plus-times")
        s = Semiring::plus_times(param);
    else if (kind == "min-plus")
        s = Semiring::min_plus(param);
    else
        parse_error(line_no, "unknown semiring '" + kind + "'");

    LayeredCircuit c(n, bits, s);
    for (std::size_t l = 0; l <= depth; ++l) c.add_layer();
    while (std::getline(is, text)) {
        ++line_no;
        if (text.empty() || text[0] == '#') continue;
        std::istringstream in(text);
        const auto layer = number<std::size_t>(in, line_no, "layer");
        const auto index = number<std::size_t>(in, line_no, "index");
        std::string fname;
        in >> fname;
        const auto func = gate_func_from_string(fname);
        if (!func) parse_error(line_no, "unknown gate function '" + fname + "'");
        if (*func == GateFunc::Opaque) parse_error(line_no, "opaque gates cannot be read");
        if (layer > depth) parse_error(line_no, "layer beyond declared depth");
        if (index != c.layer(layer).size()) parse_error(line_no, "gates must be listed in order");
        Gate g;
        g.func = *func;
        const auto fanin = number<std::size_t>(in, line_no, "fan-in");
        for (std::size_t k = 0; k < fanin; ++k) {
            std::string ref;
            if (!(in >> ref)) parse_error(line_no, "missing wire");
            const auto colon = ref.find(':');
            if (colon == std::string::npos) parse_error(line_no, "bad wire '" + ref + "'");
            try {
                g.in.push_back({static_cast<std::uint32_t>(std::stoul(ref.substr(0, colon))),
                                static_cast<std::uint32_t>(std::stoul(ref.substr(colon + 1)))});
            } catch (const std::exception&) {
                parse_error(line_no, "bad wire '" + ref + "'");
            }
        }
        std::string tok;
        if (in >> tok) {
            if (tok != "coeffs") parse_error(line_no, "unexpected '" + tok + "'");
            for (std::size_t k = 0; k < fanin; ++k)
                g.coeffs.push_back(number<Value>(in, line_no, "coefficient"));
        }
        c.add_gate(layer, std::move(g));
    }
    return c;
}

void write_scheme(std::ostream& os, const PartitionScheme& scheme) {
    os << "scheme parts " << scheme.num_parts() << " group_size " << scheme.group_size()
       << " layers " << scheme.num_layers() << '\n';
    for (std::size_t l = 0; l < scheme.num_layers(); ++l)
        for (std::size_t w = 0; w < scheme.num_parts(); ++w) {
            const auto& pieces = scheme.pieces(l, w);
            for (std::size_t j = 0; j < pieces.size(); ++j) {
                os << "piece " << l << ' ' << w << ' ' << j;
                for (auto g : pieces[j]) os << ' ' << g;
                os << '\n';
            }
        }
}

PartitionScheme read_scheme(std::istream& is, const LayeredCircuit& circuit) {
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(is, text)) {
        ++line_no;
        if (!text.empty() && text[0] != '#') break;
    }
    std::istringstream head(text);
    expect(head, "scheme", line_no);
    expect(head, "parts", line_no);
    const auto parts = number<std::size_t>(head, line_no, "parts");
    expect(head, "group_size", line_no);
    const auto group = number<std::size_t>(head, line_no, "group_size");
    expect(head, "layers", line_no);
    const auto layers = number<std::size_t>(head, line_no, "layers");
    PartitionScheme s(parts, group, layers);
    std::vector<std::vector<std::vector<PartitionScheme::Piece>>> pieces(
        layers, std::vector<std::vector<PartitionScheme::Piece>>(parts));
    while (std::getline(is, text)) {
        ++line_no;
        if (text.empty() || text[0] == '#') continue;
        std::istringstream in(text);
        expect(in, "piece", line_no);
        const auto l = number<std::size_t>(in, line_no, "layer");
        const auto w = number<std::size_t>(in, line_no, "part");
        const auto j = number<std::size_t>(in, line_no, "piece");
        if (l >= layers || w >= parts) parse_error(line_no, "piece out of range");
        if (j != pieces[l][w].size()) parse_error(line_no, "pieces must be listed in order");
        PartitionScheme::Piece p(group);
        for (auto& slot : p) slot = number<std::int64_t>(in, line_no, "slot");
        pieces[l][w].push_back(std::move(p));
    }
    for (std::size_t l = 0; l < layers; ++l)
        for (std::size_t w = 0; w < parts; ++w) {
            std::set<std::uint32_t> gates;
            for (const auto& p : pieces[l][w])
                for (auto g : p)
                    if (g != kVirtualGate) gates.insert(static_cast<std::uint32_t>(g));
            s.set_part(l, w, {gates.begin(), gates.end()});
            s.set_pieces(l, w, std::move(pieces[l][w]));
        }
    s.finalize(circuit);
    return s;
}

}  // namespace ftclique
