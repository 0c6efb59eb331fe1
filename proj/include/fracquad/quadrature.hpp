#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracquad/weights.hpp"

namespace fracquad {

/// Dot product of collapsed weights with integrand samples at t_0..t_n:
/// approximates int_0^{t_n} K(t_n - s) f(s) ds.
inline double convolve(std::span<const double> f_samples, std::span<const double> collapsed) {
    if (f_samples.size() != collapsed.size())
        throw std::invalid_argument("convolve: sample count must equal n+1 weights");
    double acc = 0.0;
    for (std::size_t k = 0; k < collapsed.size(); ++k) acc += collapsed[k] * f_samples[k];
    return acc;
}

inline double convolve(std::span<const double> f_samples, const WeightTable& table) {
    return convolve(f_samples, std::span<const double>(table.collapsed));
}

/// Running convolution along the mesh: entry n holds the order-gamma
/// approximation of int_0^{t_n} K(t_n - s) f(s) ds (entry 0 is 0).
template <class F>
inline std::vector<double> convolve_series(const F& f, const Mesh& mesh, const Kernel& kernel,
                                           const WeightAssembler& assembler) {
    const std::size_t N = mesh.size();
    std::vector<double> samples(N + 1);
    for (std::size_t k = 0; k <= N; ++k) samples[k] = f(mesh.node(k));
    std::vector<double> out(N + 1, 0.0);
    std::vector<double> w;
    for (std::size_t n = 1; n <= N; ++n) {
        assembler.collapsed(mesh, kernel, n, w);
        double acc = 0.0;
        for (std::size_t k = 0; k <= n; ++k) acc += w[k] * samples[k];
        out[n] = acc;
    }
    return out;
}

} // namespace fracquad
