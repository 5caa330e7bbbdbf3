#include "toeplitz.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace fracrd::detail {

namespace {

// Planning is not thread safe in FFTW; execution on fresh arrays is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

struct Buffers {
    double* real;
    fftw_complex* spec;
    Buffers(std::size_t nr, std::size_t nc)
        : real(fftw_alloc_real(nr)), spec(fftw_alloc_complex(nc)) {}
    ~Buffers() {
        fftw_free(real);
        fftw_free(spec);
    }
    Buffers(const Buffers&) = delete;
    Buffers& operator=(const Buffers&) = delete;
};

fftw_plan make_plan(int dim, int m, Buffers& b, bool forward) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (dim == 1) {
        return forward ? fftw_plan_dft_r2c_1d(m, b.real, b.spec, FFTW_ESTIMATE)
                       : fftw_plan_dft_c2r_1d(m, b.spec, b.real, FFTW_ESTIMATE);
    }
    return forward ? fftw_plan_dft_r2c_2d(m, m, b.real, b.spec, FFTW_ESTIMATE)
                   : fftw_plan_dft_c2r_2d(m, m, b.spec, b.real, FFTW_ESTIMATE);
}

void destroy(fftw_plan p) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(p);
}

}  // namespace

void ToeplitzConv::init(std::vector<double>& k) {
    Buffers b(padded_size(), spectrum_size());
    fftw_plan plan = make_plan(dim_, m_, b, true);
    std::copy(k.begin(), k.end(), b.real);
    fftw_execute(plan);
    destroy(plan);
    kernel_hat_.resize(spectrum_size());
    for (std::size_t i = 0; i < kernel_hat_.size(); ++i) {
        kernel_hat_[i] = {b.spec[i][0], b.spec[i][1]};
    }
}

void ToeplitzConv::apply(std::span<const double> u, std::span<double> out) const {
    Buffers b(padded_size(), spectrum_size());
    fftw_plan fwd = make_plan(dim_, m_, b, true);
    fftw_plan inv = make_plan(dim_, m_, b, false);
    std::fill(b.real, b.real + padded_size(), 0.0);
    if (dim_ == 1) {
        std::copy(u.begin(), u.end(), b.real);
    } else {
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                b.real[std::size_t(i) * m_ + j] = u[std::size_t(i) * n_ + j];
            }
        }
    }
    fftw_execute(fwd);
    for (std::size_t i = 0; i < kernel_hat_.size(); ++i) {
        const std::complex<double> z(b.spec[i][0], b.spec[i][1]);
        const auto w = z * kernel_hat_[i];
        b.spec[i][0] = w.real();
        b.spec[i][1] = w.imag();
    }
    fftw_execute(inv);
    const double scale = 1.0 / static_cast<double>(padded_size());
    if (dim_ == 1) {
        for (int i = 0; i < n_; ++i) {
            out[i] = b.real[i] * scale;
        }
    } else {
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                out[std::size_t(i) * n_ + j] = b.real[std::size_t(i) * m_ + j] * scale;
            }
        }
    }
    destroy(fwd);
    destroy(inv);
}

}  // namespace fracrd::detail
