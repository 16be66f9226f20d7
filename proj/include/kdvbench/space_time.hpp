#pragma once

#include "kdvbench/fourier_field.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kdvbench {

/// Uniform grid tau_i = i * dtau, i = -half_count() .. half_count().
/// Requires 2 tau_max / dtau to be an even integer so tau = 0 is a node and
/// sums tau_1 + tau_2 of nodes are nodes.
struct TauGrid {
    double tau_max = 1.0;
    double dtau = 0.5;

    std::int64_t half_count() const;
    double tau(std::int64_t index) const { return static_cast<double>(index) * dtau; }
    void validate() const;

    friend bool operator==(const TauGrid&, const TauGrid&) = default;
};

/// Contiguous run of grid values starting at index `first`.
struct Segment {
    std::int64_t first = 0;
    std::vector<Complex> values;

    std::int64_t last() const { return first + static_cast<std::int64_t>(values.size()) - 1; }
};

/// f(n, tau) for 0 < |n| <= N on a TauGrid, stored per mode as sorted,
/// disjoint segments; everything outside the segments is zero. No Hermitian
/// symmetry is assumed.
class SpaceTimeCoeffs {
public:
    SpaceTimeCoeffs(int cutoff, TauGrid grid);

    /// Dense lattice with f(n, tau_i) = profile(n, tau_i).
    static SpaceTimeCoeffs dense(int cutoff, TauGrid grid, const std::function<Complex(int, double)>& profile);

    int cutoff() const noexcept { return cutoff_; }
    const TauGrid& grid() const noexcept { return grid_; }

    const std::vector<Segment>& segments(int n) const;

    /// Adds values[k] at index first + k; the part outside the grid is dropped.
    void add(int n, std::int64_t first, std::span<const Complex> values);
    void add(int n, std::int64_t index, Complex value) { add(n, index, std::span<const Complex>(&value, 1)); }

    Complex at(int n, std::int64_t index) const;

    bool same_lattice(const SpaceTimeCoeffs& other) const
    {
        return cutoff_ == other.cutoff_ && grid_ == other.grid_;
    }

    SpaceTimeCoeffs scaled(double alpha) const;

    /// Multiplies every stored value by weight(n, tau).
    SpaceTimeCoeffs multiplied(const std::function<double(int, double)>& weight) const;

    /// Number of stored grid values (including explicit zeros inside segments).
    std::size_t stored() const;

    template <class Fn>
    void for_each(Fn&& fn) const
    {
        for (int n = -cutoff_; n <= cutoff_; ++n) {
            if (n == 0) continue;
            for (const Segment& seg : segments(n)) {
                for (std::size_t k = 0; k < seg.values.size(); ++k) {
                    fn(n, seg.first + static_cast<std::int64_t>(k), seg.values[k]);
                }
            }
        }
    }

private:
    std::size_t slot(int n) const;

    int cutoff_;
    TauGrid grid_;
    std::vector<std::vector<Segment>> modes_;
};

}  // namespace kdvbench
