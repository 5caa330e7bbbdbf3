#pragma once

#include <complex>
#include <span>
#include <vector>

namespace fracrd::detail {

// Linear convolution out_i = sum_j K(i - j) u_j on an n-point (or n x n) grid,
// done as a circular convolution of length 2n-1 per axis. K is given on the
// offsets -(n-1)..(n-1) per axis through a callback at construction.
class ToeplitzConv {
public:
    template <class F>
    ToeplitzConv(int dim, int n, F&& kernel) : dim_(dim), n_(n), m_(2 * n - 1) {
        std::vector<double> k(padded_size(), 0.0);
        for (int a = -(n - 1); a <= n - 1; ++a) {
            const int ia = a < 0 ? a + m_ : a;
            if (dim == 1) {
                k[ia] = kernel(a, 0);
                continue;
            }
            for (int b = -(n - 1); b <= n - 1; ++b) {
                const int ib = b < 0 ? b + m_ : b;
                k[std::size_t(ia) * m_ + ib] = kernel(a, b);
            }
        }
        init(k);
    }

    void apply(std::span<const double> u, std::span<double> out) const;

private:
    std::size_t padded_size() const { return dim_ == 1 ? std::size_t(m_) : std::size_t(m_) * m_; }
    std::size_t spectrum_size() const {
        return dim_ == 1 ? std::size_t(m_ / 2 + 1) : std::size_t(m_) * (m_ / 2 + 1);
    }
    void init(std::vector<double>& k);

    int dim_;
    int n_;
    int m_;
    std::vector<std::complex<double>> kernel_hat_;
};

}  // namespace fracrd::detail
