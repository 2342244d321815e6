#include "aggro/convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>

#include "aggro/error.hpp"

namespace aggro {

namespace {

bool smooth(int n) {
    for (int p : {2, 3, 5, 7})
        while (n % p == 0) n /= p;
    return n == 1;
}

template <class T>
T* fft_alloc(std::size_t n) {
    void* p = fftw_malloc(sizeof(T) * n);
    if (!p) fail(Errc::internal, "fftw_malloc failed");
    return static_cast<T*>(p);
}

}  // namespace

int fft_size(int n) {
    int L = std::max(n, 1);
    while (!smooth(L)) ++L;
    return L;
}

struct Convolver1D::Impl {
    int L = 0, H = 0;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_complex* kspec = nullptr;
    fftw_plan fwd = nullptr, bwd = nullptr;

    ~Impl() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        fftw_free(real);
        fftw_free(spec);
        fftw_free(kspec);
    }
};

Convolver1D::Convolver1D(int m, const std::function<double(int)>& kernel) : m_(m), impl_(std::make_unique<Impl>()) {
    if (m < 1) fail(Errc::invalid_argument, "convolution size must be positive");
    Impl& s = *impl_;
    s.L = fft_size(2 * m - 1);
    s.H = s.L / 2 + 1;
    s.real = fft_alloc<double>(std::size_t(s.L));
    s.spec = fft_alloc<fftw_complex>(std::size_t(s.H));
    s.kspec = fft_alloc<fftw_complex>(std::size_t(s.H));
    s.fwd = fftw_plan_dft_r2c_1d(s.L, s.real, s.spec, FFTW_ESTIMATE);
    s.bwd = fftw_plan_dft_c2r_1d(s.L, s.spec, s.real, FFTW_ESTIMATE);
    std::fill(s.real, s.real + s.L, 0.0);
    for (int d = -(m - 1); d <= m - 1; ++d) s.real[(d + s.L) % s.L] = kernel(d);
    fftw_execute(s.fwd);
    const double scale = 1.0 / s.L;
    for (int k = 0; k < s.H; ++k) {
        s.kspec[k][0] = s.spec[k][0] * scale;
        s.kspec[k][1] = s.spec[k][1] * scale;
    }
}

Convolver1D::~Convolver1D() = default;

void Convolver1D::apply(const double* in, double* out) {
    Impl& s = *impl_;
    std::copy(in, in + m_, s.real);
    std::fill(s.real + m_, s.real + s.L, 0.0);
    fftw_execute(s.fwd);
    for (int k = 0; k < s.H; ++k) {
        const double a = s.spec[k][0], b = s.spec[k][1];
        const double c = s.kspec[k][0], d = s.kspec[k][1];
        s.spec[k][0] = a * c - b * d;
        s.spec[k][1] = a * d + b * c;
    }
    fftw_execute(s.bwd);
    std::copy(s.real, s.real + m_, out);
}

struct Convolver2D::Impl {
    int Lx = 0, Ly = 0, Hy = 0;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_complex* kspec = nullptr;
    fftw_plan fwd = nullptr, bwd = nullptr;

    std::size_t rsize() const { return std::size_t(Lx) * std::size_t(Ly); }
    std::size_t csize() const { return std::size_t(Lx) * std::size_t(Hy); }

    ~Impl() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        fftw_free(real);
        fftw_free(spec);
        fftw_free(kspec);
    }
};

Convolver2D::Convolver2D(int sx, int sy, const std::function<double(int, int)>& kernel)
    : sx_(sx), sy_(sy), impl_(std::make_unique<Impl>()) {
    if (sx < 1 || sy < 1) fail(Errc::invalid_argument, "convolution size must be positive");
    Impl& s = *impl_;
    s.Lx = fft_size(2 * sx - 1);
    s.Ly = fft_size(2 * sy - 1);
    s.Hy = s.Ly / 2 + 1;
    s.real = fft_alloc<double>(s.rsize());
    s.spec = fft_alloc<fftw_complex>(s.csize());
    s.kspec = fft_alloc<fftw_complex>(s.csize());
    s.fwd = fftw_plan_dft_r2c_2d(s.Lx, s.Ly, s.real, s.spec, FFTW_ESTIMATE);
    s.bwd = fftw_plan_dft_c2r_2d(s.Lx, s.Ly, s.spec, s.real, FFTW_ESTIMATE);
    std::fill(s.real, s.real + s.rsize(), 0.0);
    for (int d = -(sx - 1); d <= sx - 1; ++d) {
        const std::size_t row = std::size_t((d + s.Lx) % s.Lx) * std::size_t(s.Ly);
        for (int e = -(sy - 1); e <= sy - 1; ++e) s.real[row + std::size_t((e + s.Ly) % s.Ly)] = kernel(d, e);
    }
    fftw_execute(s.fwd);
    const double scale = 1.0 / (double(s.Lx) * double(s.Ly));
    for (std::size_t k = 0; k < s.csize(); ++k) {
        s.kspec[k][0] = s.spec[k][0] * scale;
        s.kspec[k][1] = s.spec[k][1] * scale;
    }
}

Convolver2D::~Convolver2D() = default;

void Convolver2D::apply(const double* in, double* out) {
    Impl& s = *impl_;
    std::fill(s.real, s.real + s.rsize(), 0.0);
    for (int i = 0; i < sx_; ++i)
        std::copy(in + std::size_t(i) * sy_, in + std::size_t(i + 1) * sy_, s.real + std::size_t(i) * s.Ly);
    fftw_execute(s.fwd);
    for (std::size_t k = 0; k < s.csize(); ++k) {
        const double a = s.spec[k][0], b = s.spec[k][1];
        const double c = s.kspec[k][0], d = s.kspec[k][1];
        s.spec[k][0] = a * c - b * d;
        s.spec[k][1] = a * d + b * c;
    }
    fftw_execute(s.bwd);
    for (int i = 0; i < sx_; ++i)
        std::copy(s.real + std::size_t(i) * s.Ly, s.real + std::size_t(i) * s.Ly + sy_, out + std::size_t(i) * sy_);
}

}  // namespace aggro
