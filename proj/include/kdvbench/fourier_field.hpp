#pragma once

#include <complex>
#include <span>
#include <vector>

namespace kdvbench {

using Complex = std::complex<double>;

/// Japanese bracket <x> = 1 + |x|.
inline double bracket(double x) { return 1.0 + (x < 0 ? -x : x); }

/// Mean-zero real function on the torus, truncated to |n| <= N.
///
/// Only the modes n = 1..N are stored; coefficient(-n) is returned as the
/// conjugate of coefficient(n) and coefficient(0) is identically zero, so
/// Hermitian symmetry and the mean-zero condition hold by construction.
/// Instances are immutable.
class FourierField {
public:
    /// Zero field with the given cutoff (cutoff >= 1).
    explicit FourierField(int cutoff);

    /// Field from the positive modes a_1..a_N (size defines the cutoff).
    explicit FourierField(std::vector<Complex> positive_modes);

    /// Field whose only non-zero pair is (n, -n) with coefficient(n) = a.
    static FourierField single_mode(int cutoff, int n, Complex a);

    int cutoff() const noexcept { return static_cast<int>(modes_.size()); }

    /// Coefficient for any integer n; zero for n = 0 and |n| > N.
    Complex operator[](int n) const noexcept
    {
        if (n > 0) return n <= cutoff() ? modes_[n - 1] : Complex{};
        if (n < 0) return -n <= cutoff() ? std::conj(modes_[-n - 1]) : Complex{};
        return {};
    }

    /// Modes n = 1..N, element k holds coefficient(k + 1).
    std::span<const Complex> positive() const noexcept { return modes_; }

    FourierField scaled(double alpha) const;

    friend bool operator==(const FourierField&, const FourierField&) = default;

private:
    std::vector<Complex> modes_;
};

/// Selects a b^s_{p,q} norm. q = infinity gives the sup-over-blocks norm,
/// q = p coincides with the FL^{s,p} norm.
struct NormSpec {
    double s = 0.0;
    double p = 2.0;
    double q = 2.0;

    /// Throws PreconditionError unless p >= 1 and q >= 1.
    void validate() const;
};

}  // namespace kdvbench
