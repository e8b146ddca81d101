#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "hesn/linalg.hpp"

namespace hesn {

/// Per-sub-reservoir hyperparameters; every field lies in (0, 1].
struct HyperParams {
    double input_scaling = 1.0;
    double spectral_radius = 0.9;
    double leaky_rate = 1.0;

    void validate() const;
    bool operator==(const HyperParams&) const = default;
};

enum class Architecture { shallow, wide, deep };

std::string to_string(Architecture kind);
Architecture parse_architecture(std::string_view name);

struct Topology {
    Architecture kind = Architecture::shallow;
    std::vector<std::size_t> sub_sizes;
    std::size_t input_dim = 1;
    std::vector<HyperParams> hyper;
    // Feed the last sub-reservoir's state to the readout. Always true for the
    // stock experiments; false drops it from the readout features only.
    bool include_last_layer = true;

    std::size_t n_subs() const noexcept { return sub_sizes.size(); }
    std::size_t total_nodes() const noexcept;
    // Columns of the input matrix feeding sub-reservoir l.
    std::size_t sub_input_dim(std::size_t l) const;
    void validate() const;
};

/// Sizes of n_subs sub-reservoirs sharing total nodes: equal split, with the
/// remainder handed one node at a time to the earliest sub-reservoirs.
std::vector<std::size_t> split_nodes(std::size_t total, std::size_t n_subs);

/// Topology with an equal node split; shallow forces a single sub-reservoir.
Topology make_topology(Architecture kind, std::size_t total_nodes, std::size_t n_subs,
                       std::size_t input_dim, std::vector<HyperParams> hyper);

/// Raw weight draws before hyperparameter scaling: input weights uniform over
/// [-1, 1) and recurrent weights uniform over [-1, 1) divided by their
/// spectral radius. Scaling these by (IS, SR) gives the final matrices, so one
/// draw serves every hyperparameter setting with the same seed.
struct UnitWeights {
    std::vector<Matrix> w_in;
    std::vector<Matrix> w_res;
};

UnitWeights draw_unit_weights(const Topology& shape, std::uint64_t seed);

/// Thread-safe memo of draw_unit_weights keyed by (shape, seed).
class UnitWeightCache {
public:
    std::shared_ptr<const UnitWeights> get(const Topology& shape, std::uint64_t seed);

private:
    using Key = std::tuple<int, std::vector<std::size_t>, std::size_t, std::uint64_t>;
    std::mutex mutex_;
    std::map<Key, std::shared_ptr<const UnitWeights>> entries_;
};

class ReservoirNetwork {
public:
    /// Network with explicit weights. Shapes are checked; the spectral radius
    /// contract is not, which makes this the entry point for hand-built cases.
    static ReservoirNetwork from_weights(Topology topology, std::vector<Matrix> w_in,
                                         std::vector<Matrix> w_res);

    const Topology& topology() const noexcept { return topology_; }
    std::uint64_t build_seed() const noexcept { return build_seed_; }
    bool generated_from_seed() const noexcept { return generated_; }
    std::size_t total_nodes() const noexcept { return topology_.total_nodes(); }
    std::size_t n_subs() const noexcept { return subs_.size(); }

    const Matrix& input_weights(std::size_t l) const { return subs_.at(l).w_in; }
    const Matrix& recurrent_weights(std::size_t l) const { return subs_.at(l).w_res; }
    const Vector& state(std::size_t l) const { return subs_.at(l).state; }
    void set_state(std::size_t l, const Vector& x);
    Vector concatenated_state() const;
    void reset();

    /// One update of every sub-reservoir in architecture order. Deep layers
    /// l > 1 read the already-updated state of layer l - 1 from this step.
    Vector step(std::span<const double> u);
    Vector step(const Vector& u) { return step(std::span<const double>(u.data(), u.size())); }

    // Same as step() but writes the concatenated state into `out`.
    void step_into(std::span<const double> u, double* out);

private:
    struct Sub {
        Matrix w_in;
        Matrix w_res;
        Vector state;
        Vector scratch;
        double leaky_rate;
    };

    friend ReservoirNetwork build_network(const Topology&, const UnitWeights&, std::uint64_t);

    ReservoirNetwork() = default;

    Topology topology_;
    std::vector<Sub> subs_;
    std::uint64_t build_seed_ = 0;
    bool generated_ = false;
};

/// Draws weights from `seed` and rescales recurrent blocks to their target
/// spectral radius. States start at zero. Throws BuildError when a raw
/// recurrent draw has zero spectral radius or the eigenvalue solver fails.
ReservoirNetwork build_network(const Topology& topology, std::uint64_t seed);
ReservoirNetwork build_network(const Topology& topology, const UnitWeights& unit,
                               std::uint64_t seed);

/// Concatenated states of a run, one row per step; sub-reservoir l owns
/// columns [offsets[l], offsets[l+1]).
struct StateTrace {
    Matrix states;
    std::vector<std::size_t> offsets;
    std::size_t readout_width = 0;

    std::size_t steps() const noexcept { return static_cast<std::size_t>(states.rows()); }
    std::size_t n_subs() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::size_t sub_size(std::size_t l) const { return offsets.at(l + 1) - offsets.at(l); }
    Matrix sub_states(std::size_t l) const;
};

/// Drives the network through every row of `inputs` (T x N_U).
StateTrace run_sequence(ReservoirNetwork& net, const Matrix& inputs, bool reset);

nlohmann::json topology_to_json(const Topology& topology);
Topology topology_from_json(const nlohmann::json& doc);

/// {format, version, topology, seed}; weights are regenerated from the seed.
nlohmann::json network_to_json(const ReservoirNetwork& net);
ReservoirNetwork network_from_json(const nlohmann::json& doc);

} // namespace hesn
