#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pccseg/graph.hpp"
#include "pccseg/hop_table.hpp"
#include "pccseg/image.hpp"

namespace pccseg {

struct EngineConfig {
    double p_grd = 0.5;             // probability of the greedy movement rule
    double delta_v = 0.1;           // domination step per visit at full strength
    int max_sweeps = 200000;
    int check_interval = 100;       // sweeps between convergence checks
    double epsilon_conv = 1e-4;
    int patience = 3;               // consecutive stable checks before stopping
    std::uint64_t rng_seed = 0;
    double distance_exponent = 2.0; // greedy weight ~ (1 + dist)^-exponent

    void validate() const;
};

struct Particle {
    ClassId team = 0;
    NodeId home = 0;
    NodeId current = 0;
    NodeId previous = 0;
    double strength = 1.0;
    HopTable dist;  // hop-count estimates from home; absent nodes read n - 1
};

enum class MoveRule : std::uint8_t { Random, Greedy };

struct StepRecord {
    std::int64_t sweep = 0;
    std::size_t particle = 0;
    MoveRule rule = MoveRule::Random;
    NodeId target = 0;
    bool accepted = false;
    double strength = 0.0;
};

struct RunStats {
    int sweeps = 0;
    bool converged = false;
};

// Deterministic stream; draws do not depend on the standard library's
// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    std::size_t below(std::size_t count) {
        const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(count));
        return i < count ? i : count - 1;
    }

private:
    std::mt19937_64 gen_;
};

using DominationMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Particle competition and cooperation over a fixed graph.
///
/// Every labeled node spawns one particle of its class. Particles walk the
/// graph one step per sweep, raising their team's domination on the nodes
/// they visit; a particle only occupies a node its team dominates. The graph
/// must outlive the engine.
///
/// `run()` stops on a plateau of the mean max-domination over unlabeled
/// nodes, but never while a seed-reachable node is still unvisited.
class Engine {
public:
    // `num_classes == 0` derives c from the largest label.
    Engine(const PixelGraph& graph, std::span<const ClassId> labels, EngineConfig config, int num_classes = 0);

    using SweepCallback = std::function<void(const Engine&)>;
    using StepCallback = std::function<void(const StepRecord&)>;

    RunStats run(const SweepCallback& after_sweep = {});
    void sweep();

    // Single-particle primitives, in the order step_particle applies them.
    std::optional<NodeId> select_target_random(std::size_t particle);
    std::optional<NodeId> select_target_greedy(std::size_t particle);
    void update_distance(std::size_t particle, NodeId target);
    void update_domination(std::size_t particle, NodeId target);
    void update_strength(std::size_t particle, NodeId target);
    std::optional<StepRecord> step_particle(std::size_t particle);

    // Normalized greedy-rule probabilities over the current node's neighbors.
    std::vector<double> greedy_probabilities(std::size_t particle) const;

    // Argmax class per node, lowest id on ties. Nodes no particle has ever
    // visited (still at their uniform start) read 0.
    std::vector<ClassId> read_labels() const;
    std::vector<double> confidence() const;

    double mean_unlabeled_max_domination() const;
    // Unlabeled nodes connected to some seed that no particle has visited yet.
    std::size_t untouched_reachable() const { return untouched_reachable_; }

    void set_step_callback(StepCallback cb) { on_step_ = std::move(cb); }

    const PixelGraph& graph() const { return *graph_; }
    const EngineConfig& config() const { return config_; }
    int num_classes() const { return num_classes_; }
    std::size_t num_nodes() const { return graph_->size(); }
    const DominationMatrix& domination() const { return domination_; }
    auto domination(NodeId node) const { return domination_.row(node); }
    const std::vector<Particle>& particles() const { return particles_; }
    bool is_seed(NodeId node) const { return seed_class_[node] != 0; }
    ClassId seed_class(NodeId node) const { return seed_class_[node]; }
    bool reachable(NodeId node) const { return reachable_[node] != 0; }
    bool visited(NodeId node) const { return touched_[node] != 0; }
    std::int64_t sweeps_done() const { return sweeps_done_; }

private:
    const PixelGraph* graph_;
    EngineConfig config_;
    int num_classes_ = 0;
    DominationMatrix domination_;
    std::vector<ClassId> seed_class_;
    std::vector<std::uint8_t> reachable_;
    std::vector<std::uint8_t> touched_;
    std::size_t untouched_reachable_ = 0;
    std::vector<Particle> particles_;
    Rng rng_;
    std::int64_t sweeps_done_ = 0;
    std::vector<double> weights_;  // scratch for the greedy rule
    StepCallback on_step_;
};

}  // namespace pccseg
