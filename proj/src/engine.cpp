#include "pccseg/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace pccseg {

void EngineConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ValidationError("invalid_params", msg); };
    if (!(p_grd >= 0.0 && p_grd <= 1.0))
        fail("p_grd must lie in [0, 1]");
    if (!(delta_v > 0.0 && delta_v <= 1.0))
        fail("delta_v must lie in (0, 1]");
    if (max_sweeps < 1)
        fail("max_sweeps must be positive");
    if (check_interval < 1)
        fail("check_interval must be positive");
    if (!(epsilon_conv >= 0.0))
        fail("epsilon_conv must be non-negative");
    if (patience < 1)
        fail("patience must be positive");
    if (!(distance_exponent >= 0.0) || !std::isfinite(distance_exponent))
        fail("distance_exponent must be a finite non-negative number");
}

Engine::Engine(const PixelGraph& graph, std::span<const ClassId> labels, EngineConfig config, int num_classes)
    : graph_(&graph), config_(config), rng_(config.rng_seed) {
    config_.validate();
    const std::size_t n = graph.size();
    if (labels.size() != n)
        throw ValidationError("dimension_mismatch", "label count " + std::to_string(labels.size()) +
                                                        " differs from node count " + std::to_string(n));
    const int max_label = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
    if (max_label == 0)
        throw ValidationError("no_scribbles", "at least one labeled node is required");
    if (num_classes == 0)
        num_classes = max_label;
    if (max_label > num_classes)
        throw ValidationError("invalid_labels", "label " + std::to_string(max_label) + " exceeds class count " +
                                                    std::to_string(num_classes));
    num_classes_ = num_classes;

    const auto c = static_cast<Eigen::Index>(num_classes_);
    domination_ = DominationMatrix::Constant(static_cast<Eigen::Index>(n), c, 1.0 / static_cast<double>(c));
    seed_class_.assign(labels.begin(), labels.end());

    const auto far = static_cast<std::uint32_t>(n - 1);
    std::deque<NodeId> frontier;
    reachable_.assign(n, 0);
    for (NodeId i = 0; i < n; ++i) {
        if (labels[i] == 0)
            continue;
        domination_.row(i).setZero();
        domination_(i, labels[i] - 1) = 1.0;

        Particle p;
        p.team = labels[i];
        p.home = p.current = p.previous = i;
        p.strength = 1.0;
        p.dist = HopTable(far);
        p.dist.lower(i, 0);
        particles_.push_back(std::move(p));

        reachable_[i] = 1;
        frontier.push_back(i);
    }
    while (!frontier.empty()) {
        const NodeId u = frontier.front();
        frontier.pop_front();
        for (NodeId v : graph.adjacent(u)) {
            if (!reachable_[v]) {
                reachable_[v] = 1;
                ++untouched_reachable_;
                frontier.push_back(v);
            }
        }
    }
    touched_.assign(labels.begin(), labels.end());
}

std::optional<NodeId> Engine::select_target_random(std::size_t particle) {
    const auto adj = graph_->adjacent(particles_[particle].current);
    if (adj.empty())
        return std::nullopt;
    return adj[rng_.below(adj.size())];
}

std::vector<double> Engine::greedy_probabilities(std::size_t particle) const {
    const Particle& p = particles_[particle];
    const auto adj = graph_->adjacent(p.current);
    std::vector<double> probs(adj.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < adj.size(); ++i) {
        const double hops = 1.0 + static_cast<double>(p.dist.get(adj[i]));
        probs[i] = domination_(adj[i], p.team - 1) * std::pow(hops, -config_.distance_exponent);
        total += probs[i];
    }
    if (total > 0.0)
        for (double& w : probs)
            w /= total;
    else
        std::fill(probs.begin(), probs.end(), adj.empty() ? 0.0 : 1.0 / static_cast<double>(adj.size()));
    return probs;
}

std::optional<NodeId> Engine::select_target_greedy(std::size_t particle) {
    const Particle& p = particles_[particle];
    const auto adj = graph_->adjacent(p.current);
    if (adj.empty())
        return std::nullopt;

    const double exponent = config_.distance_exponent;
    const Eigen::Index col = p.team - 1;
    weights_.resize(adj.size());
    double total = 0.0;
    for (std::size_t i = 0; i < adj.size(); ++i) {
        const double hops = 1.0 + static_cast<double>(p.dist.get(adj[i]));
        const double falloff = exponent == 2.0 ? 1.0 / (hops * hops)
                             : exponent == 1.0 ? 1.0 / hops
                                               : std::pow(hops, -exponent);
        weights_[i] = domination_(adj[i], col) * falloff;
        total += weights_[i];
    }
    if (!(total > 0.0))
        return adj[rng_.below(adj.size())];

    const double r = rng_.uniform() * total;
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < adj.size(); ++i) {
        if (weights_[i] <= 0.0)
            continue;
        cumulative += weights_[i];
        last_positive = i;
        if (r < cumulative)
            return adj[i];
    }
    return adj[last_positive];
}

void Engine::update_distance(std::size_t particle, NodeId target) {
    Particle& p = particles_[particle];
    const std::uint32_t here = p.dist.get(p.current);
    p.dist.lower(target, here + 1);
}

void Engine::update_domination(std::size_t particle, NodeId target) {
    if (seed_class_[target] != 0 || num_classes_ < 2)
        return;
    const Particle& p = particles_[particle];
    const Eigen::Index own = p.team - 1;
    const double share = config_.delta_v * p.strength / static_cast<double>(num_classes_ - 1);
    auto row = domination_.row(target);
    double gained = 0.0;
    for (Eigen::Index l = 0; l < row.size(); ++l) {
        if (l == own)
            continue;
        const double taken = std::min(row(l), share);
        row(l) -= taken;
        gained += taken;
    }
    row(own) = std::clamp(row(own) + gained, 0.0, 1.0);
}

void Engine::update_strength(std::size_t particle, NodeId target) {
    Particle& p = particles_[particle];
    p.strength = std::clamp(domination_(target, p.team - 1), 0.0, 1.0);
}

std::optional<StepRecord> Engine::step_particle(std::size_t particle) {
    const bool greedy = rng_.uniform() < config_.p_grd;
    const std::optional<NodeId> target = greedy ? select_target_greedy(particle) : select_target_random(particle);
    if (!target)
        return std::nullopt;

    if (!touched_[*target]) {
        touched_[*target] = 1;
        --untouched_reachable_;
    }
    update_distance(particle, *target);
    update_domination(particle, *target);
    update_strength(particle, *target);

    Particle& p = particles_[particle];
    const auto row = domination_.row(*target);
    const bool dominant = row(p.team - 1) >= row.maxCoeff();
    if (dominant) {
        p.previous = p.current;
        p.current = *target;
    }
    StepRecord record{sweeps_done_, particle, greedy ? MoveRule::Greedy : MoveRule::Random, *target, dominant,
                      p.strength};
    if (on_step_)
        on_step_(record);
    return record;
}

void Engine::sweep() {
    for (std::size_t i = 0; i < particles_.size(); ++i)
        step_particle(i);
    ++sweeps_done_;
}

double Engine::mean_unlabeled_max_domination() const {
    double sum = 0.0;
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < domination_.rows(); ++i) {
        if (seed_class_[static_cast<std::size_t>(i)] != 0)
            continue;
        sum += domination_.row(i).maxCoeff();
        ++count;
    }
    return count == 0 ? 1.0 : sum / static_cast<double>(count);
}

RunStats Engine::run(const SweepCallback& after_sweep) {
    RunStats stats;
    double last_check = std::numeric_limits<double>::quiet_NaN();
    int stable = 0;
    while (sweeps_done_ < config_.max_sweeps) {
        sweep();
        if (after_sweep)
            after_sweep(*this);
        if (sweeps_done_ % config_.check_interval != 0)
            continue;
        const double level = mean_unlabeled_max_domination();
        if (!std::isnan(last_check) && std::abs(level - last_check) < config_.epsilon_conv &&
            untouched_reachable_ == 0) {
            if (++stable >= config_.patience) {
                stats.converged = true;
                break;
            }
        } else {
            stable = 0;
        }
        last_check = level;
    }
    stats.sweeps = static_cast<int>(sweeps_done_);
    return stats;
}

std::vector<ClassId> Engine::read_labels() const {
    const std::size_t n = graph_->size();
    std::vector<ClassId> labels(n, 0);
    for (NodeId i = 0; i < n; ++i) {
        if (!touched_[i])
            continue;
        const auto row = domination_.row(i);
        Eigen::Index best = 0;
        for (Eigen::Index l = 1; l < row.size(); ++l)
            if (row(l) > row(best))
                best = l;
        labels[i] = static_cast<ClassId>(best + 1);
    }
    return labels;
}

std::vector<double> Engine::confidence() const {
    std::vector<double> out(graph_->size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = domination_.row(static_cast<Eigen::Index>(i)).maxCoeff();
    return out;
}

}  // namespace pccseg
