#include "kdvbench/spectral.hpp"

#include "kdvbench/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <vector>

namespace kdvbench {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

bool is_smooth(int m)
{
    for (int p : {2, 3, 5}) {
        while (m % p == 0) m /= p;
    }
    return m == 1;
}

int product_grid_size(int cutoff)
{
    int m = 3 * cutoff + 1;
    while (m % 2 != 0 || !is_smooth(m)) ++m;
    return m;
}

void require_same_cutoff(const FourierField& f, const FourierField& g)
{
    if (f.cutoff() != g.cutoff()) {
        throw CutoffMismatch("cutoffs differ: " + std::to_string(f.cutoff()) + " vs " +
                             std::to_string(g.cutoff()));
    }
}

double block_lp(double sum_or_max, double p) { return std::isinf(p) ? sum_or_max : std::pow(sum_or_max, 1.0 / p); }

}  // namespace

struct ProductTransform::Impl {
    int grid;
    double* a;
    double* b;
    fftw_complex* spectrum;
    fftw_plan to_grid;
    fftw_plan to_spectrum;

    explicit Impl(int m) : grid(m)
    {
        std::lock_guard lock(planner_mutex());
        a = fftw_alloc_real(static_cast<std::size_t>(m));
        b = fftw_alloc_real(static_cast<std::size_t>(m));
        spectrum = fftw_alloc_complex(static_cast<std::size_t>(m / 2 + 1));
        to_grid = fftw_plan_dft_c2r_1d(m, spectrum, a, FFTW_ESTIMATE);
        to_spectrum = fftw_plan_dft_r2c_1d(m, a, spectrum, FFTW_ESTIMATE);
    }

    ~Impl()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(to_spectrum);
        fftw_destroy_plan(to_grid);
        fftw_free(spectrum);
        fftw_free(b);
        fftw_free(a);
    }

    void load(std::span<const Complex> f)
    {
        const int half = grid / 2;
        spectrum[0][0] = spectrum[0][1] = 0.0;
        for (int k = 1; k <= half; ++k) {
            const std::size_t idx = static_cast<std::size_t>(k - 1);
            const Complex c = idx < f.size() ? f[idx] : Complex{};
            spectrum[k][0] = c.real();
            spectrum[k][1] = c.imag();
        }
    }

    void unload(std::span<Complex> out) const
    {
        const double scale = 1.0 / grid;
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] = Complex(spectrum[k + 1][0], spectrum[k + 1][1]) * scale;
        }
    }
};

ProductTransform::ProductTransform(int cutoff)
    : cutoff_(cutoff), grid_(product_grid_size(cutoff)), impl_(std::make_unique<Impl>(grid_))
{
}

ProductTransform::~ProductTransform() = default;

void ProductTransform::multiply(std::span<const Complex> f, std::span<const Complex> g, std::span<Complex> out)
{
    Impl& w = *impl_;
    w.load(f);
    fftw_execute_dft_c2r(w.to_grid, w.spectrum, w.a);
    w.load(g);
    fftw_execute_dft_c2r(w.to_grid, w.spectrum, w.b);
    for (int j = 0; j < grid_; ++j) w.a[j] *= w.b[j];
    fftw_execute_dft_r2c(w.to_spectrum, w.a, w.spectrum);
    w.unload(out);
}

void ProductTransform::square(std::span<const Complex> f, std::span<Complex> out)
{
    Impl& w = *impl_;
    w.load(f);
    fftw_execute_dft_c2r(w.to_grid, w.spectrum, w.a);
    for (int j = 0; j < grid_; ++j) w.a[j] *= w.a[j];
    fftw_execute_dft_r2c(w.to_spectrum, w.a, w.spectrum);
    w.unload(out);
}

void ProductTransform::to_grid(std::span<const Complex> f, std::span<double> values)
{
    Impl& w = *impl_;
    w.load(f);
    fftw_execute_dft_c2r(w.to_grid, w.spectrum, w.a);
    std::copy_n(w.a, std::min<std::size_t>(values.size(), static_cast<std::size_t>(grid_)), values.begin());
}

void convolve_direct(std::span<const Complex> f, std::span<const Complex> g, std::span<Complex> out)
{
    const int n_max = static_cast<int>(f.size());
    auto at = [](std::span<const Complex> h, int n) -> Complex {
        if (n > 0) return h[static_cast<std::size_t>(n - 1)];
        if (n < 0) return std::conj(h[static_cast<std::size_t>(-n - 1)]);
        return {};
    };
    for (int n = 1; n <= static_cast<int>(out.size()); ++n) {
        Complex acc{};
        for (int n1 = std::max(-n_max, n - n_max); n1 <= std::min(n_max, n + n_max); ++n1) {
            if (n1 == 0 || n1 == n) continue;
            acc += at(f, n1) * at(g, n - n1);
        }
        out[static_cast<std::size_t>(n - 1)] = acc;
    }
}

FourierField convolve(const FourierField& f, const FourierField& g, ConvolutionPath path)
{
    require_same_cutoff(f, g);
    const int n = f.cutoff();
    if (path == ConvolutionPath::Automatic) {
        path = n <= 48 ? ConvolutionPath::Direct : ConvolutionPath::Transform;
    }
    std::vector<Complex> out(static_cast<std::size_t>(n));
    if (path == ConvolutionPath::Direct) {
        convolve_direct(f.positive(), g.positive(), out);
    } else {
        ProductTransform transform(n);
        transform.multiply(f.positive(), g.positive(), out);
    }
    return FourierField(std::move(out));
}

double besov_norm(const FourierField& f, const NormSpec& spec)
{
    spec.validate();
    const int n_max = f.cutoff();
    const bool p_inf = std::isinf(spec.p);
    const bool q_inf = std::isinf(spec.q);
    double outer = 0.0;
    for (int lo = 1; lo <= n_max; lo *= 2) {
        const int hi = std::min(2 * lo - 1, n_max);
        double block = 0.0;
        for (int n = lo; n <= hi; ++n) {
            const double v = std::pow(bracket(n), spec.s) * std::abs(f[n]);
            // +n and -n carry equal magnitudes.
            block = p_inf ? std::max(block, v) : block + 2.0 * std::pow(v, spec.p);
        }
        block = block_lp(block, spec.p);
        if (q_inf) {
            outer = std::max(outer, block);
        } else {
            outer += std::pow(block, spec.q);
        }
    }
    return q_inf ? outer : std::pow(outer, 1.0 / spec.q);
}

double fl_norm(const FourierField& f, double s, double p)
{
    NormSpec{s, p, p}.validate();
    double acc = 0.0;
    for (int n = 1; n <= f.cutoff(); ++n) {
        const double v = std::pow(bracket(n), s) * std::abs(f[n]);
        acc = std::isinf(p) ? std::max(acc, v) : acc + 2.0 * std::pow(v, p);
    }
    return block_lp(acc, p);
}

double sobolev_norm(const FourierField& f, double s)
{
    double acc = 0.0;
    for (int n = 1; n <= f.cutoff(); ++n) acc += 2.0 * std::pow(bracket(n), 2.0 * s) * std::norm(f[n]);
    return std::sqrt(acc);
}

double l2_mass(const FourierField& f)
{
    double acc = 0.0;
    for (const Complex& c : f.positive()) acc += std::norm(c);
    return 2.0 * acc;
}

double hamiltonian(const FourierField& f)
{
    double quadratic = 0.0;
    for (int n = 1; n <= f.cutoff(); ++n) quadratic += static_cast<double>(n) * n * std::norm(f[n]);
    const FourierField sq = convolve(f, f);
    double cubic = 0.0;
    for (int n = 1; n <= f.cutoff(); ++n) cubic += 2.0 * (sq[n] * std::conj(f[n])).real();
    return quadratic - cubic / 6.0;
}

}  // namespace kdvbench
