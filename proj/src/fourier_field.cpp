#include "kdvbench/fourier_field.hpp"

#include "kdvbench/error.hpp"

#include <cmath>
#include <string>

namespace kdvbench {

FourierField::FourierField(int cutoff)
{
    if (cutoff < 1) throw PreconditionError("cutoff must be >= 1, got " + std::to_string(cutoff));
    modes_.assign(static_cast<std::size_t>(cutoff), Complex{});
}

FourierField::FourierField(std::vector<Complex> positive_modes) : modes_(std::move(positive_modes))
{
    if (modes_.empty()) throw PreconditionError("cutoff must be >= 1");
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        if (!std::isfinite(modes_[k].real()) || !std::isfinite(modes_[k].imag())) {
            throw PreconditionError("non-finite coefficient at mode " + std::to_string(k + 1));
        }
    }
}

FourierField FourierField::single_mode(int cutoff, int n, Complex a)
{
    if (n == 0 || std::abs(n) > cutoff) {
        throw PreconditionError("mode " + std::to_string(n) + " outside 1..cutoff");
    }
    std::vector<Complex> modes(static_cast<std::size_t>(cutoff), Complex{});
    modes[static_cast<std::size_t>(std::abs(n) - 1)] = n > 0 ? a : std::conj(a);
    return FourierField(std::move(modes));
}

FourierField FourierField::scaled(double alpha) const
{
    std::vector<Complex> out(modes_);
    for (auto& c : out) c *= alpha;
    return FourierField(std::move(out));
}

void NormSpec::validate() const
{
    if (!(p >= 1.0)) throw PreconditionError("norm exponent p must be >= 1");
    if (!(q >= 1.0)) throw PreconditionError("norm exponent q must be >= 1");
}

}  // namespace kdvbench
