#include "kdvbench/space_time.hpp"

#include "kdvbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kdvbench {

std::int64_t TauGrid::half_count() const
{
    return std::llround(tau_max / dtau);
}

void TauGrid::validate() const
{
    if (!(tau_max > 0.0) || !(dtau > 0.0) || !std::isfinite(tau_max) || !std::isfinite(dtau)) {
        throw PreconditionError("tau grid: tau_max and dtau must be positive");
    }
    const double ratio = tau_max / dtau;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
        throw PreconditionError("tau grid: dtau must divide tau_max");
    }
}

SpaceTimeCoeffs::SpaceTimeCoeffs(int cutoff, TauGrid grid)
    : cutoff_(cutoff), grid_(grid), modes_(static_cast<std::size_t>(2 * std::max(cutoff, 0)))
{
    if (cutoff < 1) throw PreconditionError("space-time lattice: cutoff must be >= 1");
    grid_.validate();
}

SpaceTimeCoeffs SpaceTimeCoeffs::dense(int cutoff, TauGrid grid, const std::function<Complex(int, double)>& profile)
{
    SpaceTimeCoeffs out(cutoff, grid);
    const std::int64_t h = out.grid_.half_count();
    std::vector<Complex> values(static_cast<std::size_t>(2 * h + 1));
    for (int n = -cutoff; n <= cutoff; ++n) {
        if (n == 0) continue;
        for (std::int64_t i = -h; i <= h; ++i) values[static_cast<std::size_t>(i + h)] = profile(n, out.grid_.tau(i));
        out.add(n, -h, values);
    }
    return out;
}

std::size_t SpaceTimeCoeffs::slot(int n) const
{
    if (n == 0 || std::abs(n) > cutoff_) {
        throw PreconditionError("space-time lattice: mode " + std::to_string(n) + " outside 0 < |n| <= " +
                                std::to_string(cutoff_));
    }
    return static_cast<std::size_t>(n < 0 ? n + cutoff_ : n + cutoff_ - 1);
}

const std::vector<Segment>& SpaceTimeCoeffs::segments(int n) const
{
    return modes_[slot(n)];
}

void SpaceTimeCoeffs::add(int n, std::int64_t first, std::span<const Complex> values)
{
    auto& segs = modes_[slot(n)];
    const std::int64_t h = grid_.half_count();
    std::int64_t lo = std::max(first, -h);
    std::int64_t hi = std::min(first + static_cast<std::int64_t>(values.size()) - 1, h);
    if (lo > hi) return;
    for (std::int64_t i = lo; i <= hi; ++i) {
        const Complex v = values[static_cast<std::size_t>(i - first)];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw PreconditionError("space-time lattice: non-finite value");
        }
    }

    // Merge with every segment overlapping or touching [lo, hi].
    auto begin = std::lower_bound(segs.begin(), segs.end(), lo,
                                  [](const Segment& s, std::int64_t x) { return s.last() + 1 < x; });
    auto end = begin;
    while (end != segs.end() && end->first <= hi + 1) ++end;
    if (begin != end) {
        lo = std::min(lo, begin->first);
        hi = std::max(hi, std::prev(end)->last());
    }
    Segment merged{lo, std::vector<Complex>(static_cast<std::size_t>(hi - lo + 1))};
    for (auto it = begin; it != end; ++it) {
        std::copy(it->values.begin(), it->values.end(), merged.values.begin() + (it->first - lo));
    }
    for (std::int64_t i = std::max(first, -h); i <= std::min(first + static_cast<std::int64_t>(values.size()) - 1, h); ++i) {
        merged.values[static_cast<std::size_t>(i - lo)] += values[static_cast<std::size_t>(i - first)];
    }
    auto pos = segs.erase(begin, end);
    segs.insert(pos, std::move(merged));
}

Complex SpaceTimeCoeffs::at(int n, std::int64_t index) const
{
    const auto& segs = segments(n);
    auto it = std::lower_bound(segs.begin(), segs.end(), index,
                               [](const Segment& s, std::int64_t x) { return s.last() < x; });
    if (it == segs.end() || it->first > index) return {};
    return it->values[static_cast<std::size_t>(index - it->first)];
}

SpaceTimeCoeffs SpaceTimeCoeffs::scaled(double alpha) const
{
    SpaceTimeCoeffs out(*this);
    for (auto& segs : out.modes_) {
        for (auto& seg : segs) {
            for (auto& v : seg.values) v *= alpha;
        }
    }
    return out;
}

SpaceTimeCoeffs SpaceTimeCoeffs::multiplied(const std::function<double(int, double)>& weight) const
{
    SpaceTimeCoeffs out(*this);
    for (int n = -cutoff_; n <= cutoff_; ++n) {
        if (n == 0) continue;
        for (auto& seg : out.modes_[slot(n)]) {
            for (std::size_t k = 0; k < seg.values.size(); ++k) {
                seg.values[k] *= weight(n, grid_.tau(seg.first + static_cast<std::int64_t>(k)));
            }
        }
    }
    return out;
}

std::size_t SpaceTimeCoeffs::stored() const
{
    std::size_t total = 0;
    for (const auto& segs : modes_) {
        for (const auto& seg : segs) total += seg.values.size();
    }
    return total;
}

}  // namespace kdvbench
