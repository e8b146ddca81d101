#include "hesn/reservoir.hpp"

#include <cmath>
#include <string>

#include "hesn/errors.hpp"
#include "hesn/rng.hpp"
#include "hesn/spectral.hpp"

namespace hesn {

namespace {

constexpr const char* network_format = "hier-esn/network";
constexpr int network_version = 1;

bool in_unit_interval(double v) { return v > 0.0 && v <= 1.0; }

Matrix draw_uniform(SeededRng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

} // namespace

void HyperParams::validate() const {
    if (!in_unit_interval(input_scaling))
        throw ArgumentError("input_scaling must lie in (0, 1], got " + std::to_string(input_scaling));
    if (!in_unit_interval(spectral_radius))
        throw ArgumentError("spectral_radius must lie in (0, 1], got " +
                            std::to_string(spectral_radius));
    if (!in_unit_interval(leaky_rate))
        throw ArgumentError("leaky_rate must lie in (0, 1], got " + std::to_string(leaky_rate));
}

std::string to_string(Architecture kind) {
    switch (kind) {
    case Architecture::shallow: return "shallow";
    case Architecture::wide: return "wide";
    case Architecture::deep: return "deep";
    }
    return "unknown";
}

Architecture parse_architecture(std::string_view name) {
    if (name == "shallow") return Architecture::shallow;
    if (name == "wide") return Architecture::wide;
    if (name == "deep") return Architecture::deep;
    throw ArgumentError("unknown architecture '" + std::string(name) +
                        "' (expected shallow, wide or deep)");
}

std::size_t Topology::total_nodes() const noexcept {
    std::size_t total = 0;
    for (auto s : sub_sizes) total += s;
    return total;
}

std::size_t Topology::sub_input_dim(std::size_t l) const {
    if (l >= sub_sizes.size()) throw DimensionError("sub-reservoir index out of range");
    if (kind == Architecture::deep && l > 0) return sub_sizes[l - 1];
    return input_dim;
}

void Topology::validate() const {
    if (sub_sizes.empty()) throw ArgumentError("topology needs at least one sub-reservoir");
    if (kind == Architecture::shallow && sub_sizes.size() != 1)
        throw ArgumentError("shallow topology must have exactly one sub-reservoir");
    for (auto s : sub_sizes)
        if (s == 0) throw ArgumentError("sub-reservoir sizes must be >= 1");
    if (input_dim == 0) throw ArgumentError("input dimension must be >= 1");
    if (hyper.size() != sub_sizes.size())
        throw ArgumentError("expected " + std::to_string(sub_sizes.size()) +
                            " hyperparameter sets, got " + std::to_string(hyper.size()));
    for (const auto& h : hyper) h.validate();
}

std::vector<std::size_t> split_nodes(std::size_t total, std::size_t n_subs) {
    if (n_subs == 0) throw ArgumentError("split_nodes: n_subs must be >= 1");
    if (total < n_subs)
        throw ArgumentError("split_nodes: cannot split " + std::to_string(total) + " nodes into " +
                            std::to_string(n_subs) + " sub-reservoirs");
    std::vector<std::size_t> sizes(n_subs, total / n_subs);
    for (std::size_t i = 0; i < total % n_subs; ++i) ++sizes[i];
    return sizes;
}

Topology make_topology(Architecture kind, std::size_t total_nodes, std::size_t n_subs,
                       std::size_t input_dim, std::vector<HyperParams> hyper) {
    if (kind == Architecture::shallow && n_subs != 1)
        throw ArgumentError("shallow architecture requires n_subs = 1");
    Topology t;
    t.kind = kind;
    t.sub_sizes = split_nodes(total_nodes, n_subs);
    t.input_dim = input_dim;
    t.hyper = std::move(hyper);
    t.validate();
    return t;
}

UnitWeights draw_unit_weights(const Topology& shape, std::uint64_t seed) {
    SeededRng rng(seed);
    UnitWeights unit;
    for (std::size_t l = 0; l < shape.n_subs(); ++l) {
        const std::size_t size = shape.sub_sizes[l];
        unit.w_in.push_back(draw_uniform(rng, size, shape.sub_input_dim(l)));
        Matrix w = draw_uniform(rng, size, size);
        double radius = 0.0;
        try {
            radius = spectral_radius_estimate(w);
        } catch (const Error& e) {
            throw BuildError(std::string("spectral radius of recurrent draw failed: ") + e.what());
        }
        if (!(radius > 0.0))
            throw BuildError("recurrent draw for sub-reservoir " + std::to_string(l) +
                             " has zero spectral radius");
        w /= radius;
        unit.w_res.push_back(std::move(w));
    }
    return unit;
}

std::shared_ptr<const UnitWeights> UnitWeightCache::get(const Topology& shape,
                                                        std::uint64_t seed) {
    Key key{static_cast<int>(shape.kind), shape.sub_sizes, shape.input_dim, seed};
    {
        std::lock_guard lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    auto drawn = std::make_shared<const UnitWeights>(draw_unit_weights(shape, seed));
    std::lock_guard lock(mutex_);
    return entries_.emplace(std::move(key), std::move(drawn)).first->second;
}

ReservoirNetwork build_network(const Topology& topology, std::uint64_t seed) {
    topology.validate();
    return build_network(topology, draw_unit_weights(topology, seed), seed);
}

ReservoirNetwork build_network(const Topology& topology, const UnitWeights& unit,
                               std::uint64_t seed) {
    topology.validate();
    if (unit.w_in.size() != topology.n_subs() || unit.w_res.size() != topology.n_subs())
        throw DimensionError("unit weights do not match topology");
    ReservoirNetwork net;
    net.topology_ = topology;
    net.build_seed_ = seed;
    net.generated_ = true;
    for (std::size_t l = 0; l < topology.n_subs(); ++l) {
        const auto& h = topology.hyper[l];
        const auto size = static_cast<Eigen::Index>(topology.sub_sizes[l]);
        const auto in_dim = static_cast<Eigen::Index>(topology.sub_input_dim(l));
        if (unit.w_in[l].rows() != size || unit.w_in[l].cols() != in_dim ||
            unit.w_res[l].rows() != size || unit.w_res[l].cols() != size)
            throw DimensionError("unit weights do not match topology");
        ReservoirNetwork::Sub sub;
        sub.w_in = h.input_scaling * unit.w_in[l];
        sub.w_res = h.spectral_radius * unit.w_res[l];
        sub.state = Vector::Zero(size);
        sub.scratch = Vector::Zero(size);
        sub.leaky_rate = h.leaky_rate;
        net.subs_.push_back(std::move(sub));
    }
    return net;
}

ReservoirNetwork ReservoirNetwork::from_weights(Topology topology, std::vector<Matrix> w_in,
                                                std::vector<Matrix> w_res) {
    topology.validate();
    if (w_in.size() != topology.n_subs() || w_res.size() != topology.n_subs())
        throw DimensionError("from_weights: one input and one recurrent matrix per sub-reservoir");
    ReservoirNetwork net;
    net.topology_ = std::move(topology);
    for (std::size_t l = 0; l < net.topology_.n_subs(); ++l) {
        const auto size = static_cast<Eigen::Index>(net.topology_.sub_sizes[l]);
        const auto in_dim = static_cast<Eigen::Index>(net.topology_.sub_input_dim(l));
        if (w_in[l].rows() != size || w_in[l].cols() != in_dim)
            throw DimensionError("from_weights: input matrix " + std::to_string(l) +
                                 " has the wrong shape");
        if (w_res[l].rows() != size || w_res[l].cols() != size)
            throw DimensionError("from_weights: recurrent matrix " + std::to_string(l) +
                                 " has the wrong shape");
        Sub sub;
        sub.w_in = std::move(w_in[l]);
        sub.w_res = std::move(w_res[l]);
        sub.state = Vector::Zero(size);
        sub.scratch = Vector::Zero(size);
        sub.leaky_rate = net.topology_.hyper[l].leaky_rate;
        net.subs_.push_back(std::move(sub));
    }
    return net;
}

void ReservoirNetwork::set_state(std::size_t l, const Vector& x) {
    auto& sub = subs_.at(l);
    if (x.size() != sub.state.size()) throw DimensionError("set_state: size mismatch");
    sub.state = x;
}

Vector ReservoirNetwork::concatenated_state() const {
    Vector out(static_cast<Eigen::Index>(total_nodes()));
    Eigen::Index offset = 0;
    for (const auto& sub : subs_) {
        out.segment(offset, sub.state.size()) = sub.state;
        offset += sub.state.size();
    }
    return out;
}

void ReservoirNetwork::reset() {
    for (auto& sub : subs_) sub.state.setZero();
}

Vector ReservoirNetwork::step(std::span<const double> u) {
    Vector out(static_cast<Eigen::Index>(total_nodes()));
    step_into(u, out.data());
    return out;
}

void ReservoirNetwork::step_into(std::span<const double> u, double* out) {
    if (u.size() != topology_.input_dim)
        throw DimensionError("step: input has " + std::to_string(u.size()) +
                             " entries, network expects " + std::to_string(topology_.input_dim));
    const Eigen::Map<const Vector> input(u.data(), static_cast<Eigen::Index>(u.size()));
    const bool deep = topology_.kind == Architecture::deep;
    for (std::size_t l = 0; l < subs_.size(); ++l) {
        auto& sub = subs_[l];
        if (deep && l > 0) {
            sub.scratch.noalias() = sub.w_in * subs_[l - 1].state;
        } else {
            sub.scratch.noalias() = sub.w_in * input;
        }
        sub.scratch.noalias() += sub.w_res * sub.state;
        const double a = sub.leaky_rate;
        sub.state = (1.0 - a) * sub.state + a * sub.scratch.array().tanh().matrix();
    }
    for (const auto& sub : subs_) {
        std::copy(sub.state.data(), sub.state.data() + sub.state.size(), out);
        out += sub.state.size();
    }
}

Matrix StateTrace::sub_states(std::size_t l) const {
    return states.middleCols(static_cast<Eigen::Index>(offsets.at(l)),
                             static_cast<Eigen::Index>(sub_size(l)));
}

StateTrace run_sequence(ReservoirNetwork& net, const Matrix& inputs, bool reset) {
    if (inputs.rows() < 1) throw DimensionError("run_sequence: need at least one step");
    if (static_cast<std::size_t>(inputs.cols()) != net.topology().input_dim)
        throw DimensionError("run_sequence: inputs have " + std::to_string(inputs.cols()) +
                             " columns, network expects " +
                             std::to_string(net.topology().input_dim));
    if (reset) net.reset();

    StateTrace trace;
    const auto& topo = net.topology();
    trace.offsets.push_back(0);
    for (auto s : topo.sub_sizes) trace.offsets.push_back(trace.offsets.back() + s);
    trace.readout_width = trace.offsets.back();
    if (!topo.include_last_layer && topo.n_subs() > 1)
        trace.readout_width = trace.offsets[topo.n_subs() - 1];

    trace.states.resize(inputs.rows(), static_cast<Eigen::Index>(net.total_nodes()));
    for (Eigen::Index t = 0; t < inputs.rows(); ++t) {
        net.step_into(std::span<const double>(inputs.row(t).data(),
                                              static_cast<std::size_t>(inputs.cols())),
                      trace.states.row(t).data());
    }
    return trace;
}

nlohmann::json topology_to_json(const Topology& topology) {
    nlohmann::json hyper = nlohmann::json::array();
    for (const auto& h : topology.hyper) {
        hyper.push_back({{"input_scaling", h.input_scaling},
                         {"spectral_radius", h.spectral_radius},
                         {"leaky_rate", h.leaky_rate}});
    }
    return {{"architecture", to_string(topology.kind)},
            {"sub_sizes", topology.sub_sizes},
            {"input_dim", topology.input_dim},
            {"include_last_layer", topology.include_last_layer},
            {"hyperparams", hyper}};
}

Topology topology_from_json(const nlohmann::json& doc) {
    try {
        Topology t;
        t.kind = parse_architecture(doc.at("architecture").get<std::string>());
        t.sub_sizes = doc.at("sub_sizes").get<std::vector<std::size_t>>();
        t.input_dim = doc.value("input_dim", std::size_t{1});
        t.include_last_layer = doc.value("include_last_layer", true);
        for (const auto& h : doc.at("hyperparams")) {
            t.hyper.push_back({h.at("input_scaling").get<double>(),
                               h.at("spectral_radius").get<double>(),
                               h.at("leaky_rate").get<double>()});
        }
        t.validate();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid topology document: ") + e.what());
    }
}

nlohmann::json network_to_json(const ReservoirNetwork& net) {
    if (!net.generated_from_seed())
        throw ArgumentError("network_to_json: only seed-generated networks can be serialized");
    return {{"format", network_format},
            {"version", network_version},
            {"topology", topology_to_json(net.topology())},
            {"seed", net.build_seed()}};
}

ReservoirNetwork network_from_json(const nlohmann::json& doc) {
    try {
        if (doc.value("format", std::string{}) != network_format)
            throw ParseError("not a network document (format field missing or wrong)");
        if (doc.at("version").get<int>() != network_version)
            throw ParseError("unsupported network document version");
        return build_network(topology_from_json(doc.at("topology")),
                             doc.at("seed").get<std::uint64_t>());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid network document: ") + e.what());
    }
}

} // namespace hesn
