#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fracrd {

/// Uniform grid on [-L, L]^dim with n nodes per axis (n odd, so 0 is a node).
struct Grid {
    int dim = 1;
    double L = 1.0;
    int n = 65;
    double h = 2.0 / 64.0;

    static Grid make(int dim, double L, int n);
    void validate() const;

    std::size_t size() const { return dim == 1 ? std::size_t(n) : std::size_t(n) * n; }
    double coord(int i) const { return -L + i * h; }
    /// Node volume h^dim.
    double cell() const { return dim == 1 ? h : h * h; }
    /// Per-axis indices of a flat index (second entry 0 in 1D).
    std::array<int, 2> index(std::size_t flat) const;
    std::size_t flat(int i, int j = 0) const { return dim == 1 ? i : std::size_t(i) * n + j; }
    double radius(std::size_t flat) const;

    bool operator==(const Grid& o) const {
        return dim == o.dim && L == o.L && n == o.n;
    }
};

/// Sub-box of node indices [lo, hi] per axis, inclusive.
struct Region {
    std::array<int, 2> lo{0, 0};
    std::array<int, 2> hi{0, 0};

    static Region full(const Grid& g);
    /// Nodes with |x_k - c_k| <= half_width on every axis.
    static Region box(const Grid& g, std::array<double, 2> center, double half_width);
    bool contains(const Grid& g, std::size_t flat) const;
    std::vector<std::size_t> nodes(const Grid& g) const;
};

/// Samples of a real function on a grid; zero outside the box.
struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    Field(const Grid& g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    /// Throws DataError on non-finite samples.
    void check_finite(const char* who) const;
    double sup_norm() const;
    /// Quadrature of int |u|^q.
    double lp_power(double q) const;
    double integral() const;

    void write_csv(std::ostream& os) const;
    static Field read_csv(std::istream& is, const Grid& grid);
    /// Header: dim, n (int64) and L (float64), little endian; then row-major float64.
    void write_binary(std::ostream& os) const;
    static Field read_binary(std::istream& is);
};

}  // namespace fracrd
