#pragma once

#include "kdvbench/fourier_field.hpp"

#include <memory>
#include <span>

namespace kdvbench {

// All norms drop the 2*pi counting-measure normalization: sums over Fourier
// modes are plain sums, so l2_mass(f) = (1/2pi) * integral of f^2 over [0, 2pi).

enum class ConvolutionPath { Automatic, Direct, Transform };

/// P_N(fg) on modes 1..N; the n = 0 output is discarded.
/// Throws CutoffMismatch if the cutoffs differ.
FourierField convolve(const FourierField& f, const FourierField& g,
                      ConvolutionPath path = ConvolutionPath::Automatic);

/// Dealiased pseudospectral product of two truncated Hermitian spectra.
///
/// Inputs and output are the positive modes 1..N. The transform grid has
/// M > 3N points so the truncated product is exact up to rounding. A product
/// transform owns FFTW buffers and plans; one instance per thread.
class ProductTransform {
public:
    explicit ProductTransform(int cutoff);
    ~ProductTransform();
    ProductTransform(const ProductTransform&) = delete;
    ProductTransform& operator=(const ProductTransform&) = delete;

    int cutoff() const noexcept { return cutoff_; }
    int grid_size() const noexcept { return grid_; }

    void multiply(std::span<const Complex> f, std::span<const Complex> g, std::span<Complex> out);
    void square(std::span<const Complex> f, std::span<Complex> out);

    /// Grid values f(x_j), x_j = 2 pi j / M, of the last forward transform input.
    void to_grid(std::span<const Complex> f, std::span<double> values);

private:
    struct Impl;
    int cutoff_;
    int grid_;
    std::unique_ptr<Impl> impl_;
};

/// Direct O(N^2) convolution on positive modes, out[k] = (fg)^(k + 1).
void convolve_direct(std::span<const Complex> f, std::span<const Complex> g, std::span<Complex> out);

/// || || <n>^s f(n) ||_{L^p(2^j <= |n| < 2^{j+1})} ||_{l^q_j}. p, q may be infinite.
double besov_norm(const FourierField& f, const NormSpec& spec);

/// || <n>^s f(n) ||_{L^p_n}.
double fl_norm(const FourierField& f, double s, double p);

double sobolev_norm(const FourierField& f, double s);

/// sum_n |f(n)|^2 over n != 0.
double l2_mass(const FourierField& f);

/// sum_n n^2 |u(n)|^2 / 2 - (1/6) sum_{n1+n2+n3=0} u(n1) u(n2) u(n3), all |n_i| <= N.
double hamiltonian(const FourierField& f);

}  // namespace kdvbench
