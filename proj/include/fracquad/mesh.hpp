#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fracquad {

/// Time partition 0 = t_0 < t_1 < ... < t_N = T.  Nodes are stored
/// explicitly so nonuniform meshes are first-class; immutable after
/// construction and safe for concurrent shared reads.
class Mesh {
public:
    static Mesh uniform(double T, std::size_t N) {
        if (!(T > 0.0)) throw std::invalid_argument("Mesh::uniform: horizon must be positive");
        if (N < 1) throw std::invalid_argument("Mesh::uniform: need at least one step");
        std::vector<double> nodes(N + 1);
        for (std::size_t k = 0; k <= N; ++k)
            nodes[k] = T * static_cast<double>(k) / static_cast<double>(N);
        nodes[N] = T;
        return Mesh(std::move(nodes));
    }

    static Mesh from_nodes(std::vector<double> nodes) {
        if (nodes.size() < 2) throw std::invalid_argument("Mesh::from_nodes: need at least two nodes");
        if (nodes.front() != 0.0)
            throw std::invalid_argument("Mesh::from_nodes: partition must start at 0");
        for (std::size_t k = 1; k < nodes.size(); ++k)
            if (!(nodes[k] > nodes[k - 1]))
                throw std::invalid_argument("Mesh::from_nodes: nodes must be strictly increasing");
        return Mesh(std::move(nodes));
    }

    std::size_t size() const { return nodes_.size() - 1; }   ///< N, the number of steps
    double horizon() const { return nodes_.back(); }

    double node(std::size_t k) const { return nodes_[k]; }
    /// tau_k = t_k - t_{k-1}, 1-based subinterval index.
    double step(std::size_t k) const { return steps_[k - 1]; }

    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> steps() const { return steps_; }

    bool is_uniform(double rel_tol = 1e-12) const {
        double h = nodes_.back() / static_cast<double>(size());
        for (double s : steps_)
            if (std::abs(s - h) > rel_tol * nodes_.back()) return false;
        return true;
    }

private:
    explicit Mesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
        steps_.resize(nodes_.size() - 1);
        for (std::size_t k = 1; k < nodes_.size(); ++k)
            steps_[k - 1] = nodes_[k] - nodes_[k - 1];
    }

    std::vector<double> nodes_;
    std::vector<double> steps_;
};

} // namespace fracquad
