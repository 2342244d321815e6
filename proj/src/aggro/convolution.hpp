#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace aggro {

// smallest L >= n of the form 2^a 3^b 5^c 7^d
int fft_size(int n);

// out[i] = sum_j K(i-j) in[j] for i, j in [0, m), evaluated by zero-padded FFT
class Convolver1D {
public:
    Convolver1D(int m, const std::function<double(int)>& kernel);
    ~Convolver1D();
    Convolver1D(const Convolver1D&) = delete;
    Convolver1D& operator=(const Convolver1D&) = delete;

    void apply(const double* in, double* out);
    int size() const { return m_; }

private:
    struct Impl;
    int m_;
    std::unique_ptr<Impl> impl_;
};

// out[i,j] = sum_{k,l} K(i-k, j-l) in[k,l] on an sx-by-sy row-major array
class Convolver2D {
public:
    Convolver2D(int sx, int sy, const std::function<double(int, int)>& kernel);
    ~Convolver2D();
    Convolver2D(const Convolver2D&) = delete;
    Convolver2D& operator=(const Convolver2D&) = delete;

    void apply(const double* in, double* out);

private:
    struct Impl;
    int sx_, sy_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace aggro
