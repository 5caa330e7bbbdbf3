#include "fracrd/spatial_operators.hpp"

#include "fracrd/errors.hpp"
#include "toeplitz.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace fracrd {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

double gk(const std::function<double(double)>& f, double a, double b) {
    if (!(b > a)) {
        return 0.0;
    }
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
}

// (1/sp) int_0^{2pi} R(theta)^{-sp} dtheta, R the distance from (x, y) to the
// boundary of [-Lp, Lp]^2 along theta.
double tail_2d(double x, double y, double Lp, double sp) {
    const double d[4] = {Lp - x, Lp - y, Lp + x, Lp + y};  // right, top, left, bottom
    double corners[4] = {
        std::atan2(d[1], d[0]),
        kPi - std::atan2(d[1], d[2]),
        kPi + std::atan2(d[3], d[2]),
        2.0 * kPi - std::atan2(d[3], d[0]),
    };
    auto wall = [&](int k, double th) {
        switch (k) {
            case 0: return std::pow(std::max(std::cos(th), 0.0) / d[0], sp);
            case 1: return std::pow(std::max(std::sin(th), 0.0) / d[1], sp);
            case 2: return std::pow(std::max(-std::cos(th), 0.0) / d[2], sp);
            default: return std::pow(std::max(-std::sin(th), 0.0) / d[3], sp);
        }
    };
    double acc = gk([&](double t) { return wall(0, t); }, corners[3] - 2.0 * kPi, corners[0]);
    for (int k = 1; k < 4; ++k) {
        acc += gk([&, k](double t) { return wall(k, t); }, corners[k - 1], corners[k]);
    }
    return acc / sp;
}

std::vector<std::size_t> all_nodes(const Grid& g) {
    std::vector<std::size_t> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = i;
    }
    return v;
}

}  // namespace

void OperatorParams::validate(int dim) const {
    if (!(s > 0.0 && s < 1.0)) {
        throw ParameterError("operator: s must lie in (0, 1)");
    }
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw ParameterError("operator: p must exceed 1");
    }
    if (!(s * p < dim + p)) {
        throw ParameterError("operator: s p must be below N + p");
    }
    if (dim == 2 && tail_mode == TailMode::analytic_1d) {
        throw ParameterError("operator: analytic tail is one-dimensional; use numeric in 2D");
    }
    if (dim == 2 && singular_mode == SingularMode::local_correction && p != 2.0) {
        throw ParameterError("operator: 2D local correction is implemented for p = 2 only");
    }
    if (porous_regime && !(p > 1.0 && p < 4.0 / 3.0 && s * p < 1.0)) {
        throw ParameterError("operator: porous regime needs 1 < p < 4/3 and s p < 1");
    }
}

std::vector<double> exterior_tail(const Grid& g, double sp, TailMode mode) {
    if (g.dim == 2 && mode == TailMode::analytic_1d) {
        throw ParameterError("exterior_tail: analytic tail is one-dimensional");
    }
    const double Lp = g.L + 0.5 * g.h;
    std::vector<double> t(g.size());
    for (std::size_t f = 0; f < t.size(); ++f) {
        const auto ij = g.index(f);
        const double x = g.coord(ij[0]);
        if (g.dim == 1) {
            t[f] = (std::pow(Lp - x, -sp) + std::pow(Lp + x, -sp)) / sp;
        } else {
            t[f] = tail_2d(x, g.coord(ij[1]), Lp, sp);
        }
    }
    return t;
}

struct FracPLaplacian::FftPlan {
    detail::ToeplitzConv conv;
};

FracPLaplacian::FracPLaplacian(const Grid& grid, const OperatorParams& params)
    : grid_(grid), params_(params) {
    grid_.validate();
    params_.validate(grid_.dim);
    const double sp = params_.s * params_.p;
    const int n = grid_.n;
    const double h = grid_.h;
    tail_ = exterior_tail(grid_, sp, params_.tail_mode);

    if (grid_.dim == 1) {
        offset_weight_.assign(n, 0.0);
        for (int d = 1; d < n; ++d) {
            offset_weight_[d] = h * std::pow(d * h, -(1.0 + sp));
        }
        cell_singular_ = 2.0 * std::pow(0.5 * h, 2.0 - sp) / (2.0 - sp);
    } else {
        offset_weight_.assign(std::size_t(n) * n, 0.0);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a == 0 && b == 0) {
                    continue;
                }
                const double r2 = h * h * (double(a) * a + double(b) * b);
                offset_weight_[std::size_t(a) * n + b] = h * h * std::pow(r2, -(2.0 + sp) / 2.0);
            }
        }
        cell_singular_ = 4.0 * gk([&](double th) {
            return std::pow(0.5 * h / std::cos(th), 2.0 - sp) / (2.0 - sp);
        }, 0.0, 0.25 * kPi);
    }

    const std::size_t N = grid_.size();
    diagonal_.assign(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            if (j != i) {
                acc += pair_weight(i, j);
            }
        }
        diagonal_[i] = acc + tail_[i];
    }

    if (params_.p == 2.0) {
        const auto& w = offset_weight_;
        fft_ = std::make_shared<FftPlan>(FftPlan{detail::ToeplitzConv(
            grid_.dim, n, [&](int a, int b) {
                return grid_.dim == 1 ? w[std::abs(a)]
                                      : w[std::size_t(std::abs(a)) * n + std::abs(b)];
            })});
    }
}

double FracPLaplacian::pair_weight(std::size_t i, std::size_t j) const {
    if (i == j) {
        return 0.0;
    }
    if (grid_.dim == 1) {
        return offset_weight_[i > j ? i - j : j - i];
    }
    const auto a = grid_.index(i);
    const auto b = grid_.index(j);
    return offset_weight_[std::size_t(std::abs(a[0] - b[0])) * grid_.n + std::abs(a[1] - b[1])];
}

Field FracPLaplacian::apply(const Field& u) const {
    if (!(u.grid == grid_)) {
        throw DataError("frac_p_laplacian: field lives on a different grid");
    }
    u.check_finite("frac_p_laplacian");
    Field out(grid_);
    apply(u.values, out.values);
    return out;
}

void FracPLaplacian::apply(std::span<const double> u, std::span<double> out) const {
    if (use_fft_ && fft_) {
        apply_fft(u, out);
    } else {
        apply_dense(u, out);
    }
}

void FracPLaplacian::apply_dense(std::span<const double> u, std::span<double> out) const {
    const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(grid_.size());
    if (u.size() != std::size_t(N) || out.size() != std::size_t(N)) {
        throw DataError("frac_p_laplacian: size mismatch");
    }
    const double p = params_.p;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < N; ++i) {
        const double ui = u[i];
        double acc = 0.0;
        for (std::ptrdiff_t j = 0; j < N; ++j) {
            if (j != i) {
                acc += pair_weight(i, j) * phi_p(ui - u[j], p);
            }
        }
        out[i] = acc + phi_p(ui, p) * tail_[i];
    }
    if (params_.singular_mode == SingularMode::local_correction) {
        local_correction(u, out);
    }
}

void FracPLaplacian::apply_fft(std::span<const double> u, std::span<double> out) const {
    if (!fft_) {
        throw ParameterError("frac_p_laplacian: the FFT path needs p = 2");
    }
    const std::size_t N = grid_.size();
    if (u.size() != N || out.size() != N) {
        throw DataError("frac_p_laplacian: size mismatch");
    }
    std::vector<double> conv(N);
    fft_->conv.apply(u, conv);
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = diagonal_[i] * u[i] - conv[i];
    }
    if (params_.singular_mode == SingularMode::local_correction) {
        local_correction(u, out);
    }
}

// Excluded cell: u(x) - u(x + z) from a quadratic fit through the neighbours
// (zero outside the box), integrated against |z|^{-(N+sp)} over the cell.
void FracPLaplacian::local_correction(std::span<const double> u, std::span<double> out) const {
    const int n = grid_.n;
    const double h = grid_.h;
    const double p = params_.p;
    const double sp = params_.s * params_.p;
    auto at = [&](int i, int j) {
        if (i < 0 || i >= n || j < 0 || j >= n) {
            return 0.0;
        }
        return u[grid_.flat(i, grid_.dim == 1 ? 0 : j)];
    };
    for (std::size_t f = 0; f < grid_.size(); ++f) {
        const auto ij = grid_.index(f);
        const int i = ij[0];
        const int j = ij[1];
        if (grid_.dim == 2) {
            const double lap = (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) -
                                4.0 * u[f]) / (h * h);
            out[f] += -0.5 * lap * cell_singular_;
            continue;
        }
        const double c = (at(i + 1, 0) - 2.0 * u[f] + at(i - 1, 0)) / (h * h);
        if (p == 2.0) {
            out[f] += -0.5 * c * cell_singular_;
            continue;
        }
        const double g = (at(i + 1, 0) - at(i - 1, 0)) / (2.0 * h);
        if (g == 0.0 && c == 0.0) {
            continue;
        }
        thread_local boost::math::quadrature::tanh_sinh<double> rule(10);
        auto integrand = [&](double z, double) {
            if (!(z > 1e-14 * h)) {
                return 0.0;
            }
            const double q = 0.5 * c * z * z;
            return (phi_p(-g * z - q, p) + phi_p(g * z - q, p)) * std::pow(z, -1.0 - sp);
        };
        out[f] += rule.integrate(integrand, 0.0, 0.5 * h, 1e-12);
    }
}

Eigen::MatrixXd FracPLaplacian::matrix() const {
    if (params_.p != 2.0) {
        throw ParameterError("frac_p_laplacian: matrix form exists for p = 2 only");
    }
    const std::size_t N = grid_.size();
    Eigen::MatrixXd A(N, N);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            A(i, j) = i == j ? diagonal_[i] : -pair_weight(i, j);
        }
    }
    if (params_.singular_mode == SingularMode::local_correction) {
        const double k = 0.5 * cell_singular_ / (grid_.h * grid_.h);
        const int n = grid_.n;
        for (std::size_t f = 0; f < N; ++f) {
            const auto ij = grid_.index(f);
            const int axes = grid_.dim;
            A(f, f) += 2.0 * axes * k;
            for (int ax = 0; ax < axes; ++ax) {
                for (int sgn : {-1, 1}) {
                    int a = ij[0], b = ij[1];
                    (ax == 0 ? a : b) += sgn;
                    if (a >= 0 && a < n && b >= 0 && b < n) {
                        A(f, grid_.flat(a, b)) -= k;
                    }
                }
            }
        }
    }
    return A;
}

Field frac_p_laplacian(const Field& u, const OperatorParams& params) {
    params.validate(u.grid.dim);
    u.check_finite("frac_p_laplacian");
    FracPLaplacian op(u.grid, params);
    if (params.p == 2.0) {
        op.set_use_fft(false);
    }
    return op.apply(u);
}

namespace {

void check_seminorm_args(const Field& u, double s, double p) {
    if (!(s > 0.0 && s < 1.0) || !(p > 1.0)) {
        throw ParameterError("seminorm: need 0 < s < 1 and p > 1");
    }
    u.check_finite("seminorm");
}

// sum_{i != j in nodes} |u_i - u_j|^p K_ij h^{2N}
double double_sum(const Field& u, double s, double p, const std::vector<std::size_t>& nodes) {
    const Grid& g = u.grid;
    const double sp = s * p;
    const double cell = g.cell();
    const std::ptrdiff_t M = static_cast<std::ptrdiff_t>(nodes.size());
    double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
    for (std::ptrdiff_t a = 0; a < M; ++a) {
        const auto ia = g.index(nodes[a]);
        const double ua = u.values[nodes[a]];
        double row = 0.0;
        for (std::ptrdiff_t b = 0; b < M; ++b) {
            if (a == b) {
                continue;
            }
            const auto ib = g.index(nodes[b]);
            const double dx = (ia[0] - ib[0]) * g.h;
            const double dy = (ia[1] - ib[1]) * g.h;
            const double r2 = dx * dx + dy * dy;
            row += std::pow(std::fabs(ua - u.values[nodes[b]]), p) *
                   std::pow(r2, -(g.dim + sp) / 2.0);
        }
        acc += row;
    }
    return acc * cell * cell;
}

}  // namespace

double gagliardo_seminorm(const Field& u, double s, double p, const Region& region) {
    check_seminorm_args(u, s, p);
    return double_sum(u, s, p, region.nodes(u.grid));
}

double gagliardo_seminorm_extended(const Field& u, double s, double p) {
    check_seminorm_args(u, s, p);
    const auto tail = exterior_tail(u.grid, s * p, u.grid.dim == 1 ? TailMode::analytic_1d
                                                                  : TailMode::numeric);
    double cross = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cross += std::pow(std::fabs(u.values[i]), p) * tail[i];
    }
    return double_sum(u, s, p, all_nodes(u.grid)) + 2.0 * cross * u.grid.cell();
}

PairingReport pairing_identity(const Field& u, double s, double p, const Region& region) {
    check_seminorm_args(u, s, p);
    const Grid& g = u.grid;
    const auto nodes = region.nodes(g);
    const double sp = s * p;
    const std::ptrdiff_t M = static_cast<std::ptrdiff_t>(nodes.size());
    double pairing = 0.0;
#pragma omp parallel for reduction(+ : pairing) schedule(static)
    for (std::ptrdiff_t a = 0; a < M; ++a) {
        const auto ia = g.index(nodes[a]);
        const double ua = u.values[nodes[a]];
        double op = 0.0;
        for (std::ptrdiff_t b = 0; b < M; ++b) {
            if (a == b) {
                continue;
            }
            const auto ib = g.index(nodes[b]);
            const double dx = (ia[0] - ib[0]) * g.h;
            const double dy = (ia[1] - ib[1]) * g.h;
            op += phi_p(ua - u.values[nodes[b]], p) *
                  std::pow(dx * dx + dy * dy, -(g.dim + sp) / 2.0) * g.cell();
        }
        pairing += ua * op * g.cell();
    }
    PairingReport r;
    r.pairing = pairing;
    r.half_seminorm = 0.5 * double_sum(u, s, p, nodes);
    r.residual = std::fabs(r.pairing - r.half_seminorm);
    r.relative = r.half_seminorm > 0.0 ? r.residual / r.half_seminorm : r.residual;
    return r;
}

double pairing_identity_residual(const Field& u, double s, double p, const Region& region) {
    return pairing_identity(u, s, p, region).residual;
}

Kernel Kernel::make(const Grid& g, KernelShape shape, double width, double delta0, double eta) {
    g.validate();
    if (!(delta0 > 0.0) || !(eta > 0.0)) {
        throw ParameterError("kernel: delta0 and eta must be positive");
    }
    if (shape != KernelShape::delta && !(width > 0.0)) {
        throw ParameterError("kernel: width must be positive");
    }
    Kernel k;
    k.grid = g;
    k.shape = shape;
    k.width = width;
    k.delta0 = delta0;
    k.eta = eta;
    k.samples.assign(g.size(), 0.0);
    const int c = (g.n - 1) / 2;
    for (std::size_t f = 0; f < g.size(); ++f) {
        const auto ij = g.index(f);
        const double x = (ij[0] - c) * g.h;
        const double y = g.dim == 2 ? (ij[1] - c) * g.h : 0.0;
        const double r = std::hypot(x, y);
        switch (shape) {
            case KernelShape::box:
                k.samples[f] = r <= width * (1.0 + 1e-12) ? 1.0 : 0.0;
                break;
            case KernelShape::gaussian:
                k.samples[f] = std::exp(-0.5 * r * r / (width * width));
                break;
            case KernelShape::delta:
                k.samples[f] = (ij[0] == c && (g.dim == 1 || ij[1] == c)) ? 1.0 : 0.0;
                break;
        }
    }
    const double m = k.mass();
    if (!(m > 0.0)) {
        throw ParameterError("kernel: no grid node inside the support");
    }
    double floor = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < g.size(); ++f) {
        k.samples[f] /= m;
        const auto ij = g.index(f);
        const double x = (ij[0] - c) * g.h;
        const double y = g.dim == 2 ? (ij[1] - c) * g.h : 0.0;
        if (std::hypot(x, y) <= delta0) {
            floor = std::min(floor, k.samples[f]);
        }
    }
    if (!(floor > eta)) {
        std::ostringstream os;
        os << "kernel: min over B(0, delta0) is " << floor << ", not above eta = " << eta;
        throw ParameterError(os.str());
    }
    return k;
}

double Kernel::mass() const {
    double acc = 0.0;
    for (double v : samples) {
        acc += v;
    }
    return acc * grid.cell();
}

KernelShape parse_kernel_shape(const std::string& name) {
    if (name == "box") return KernelShape::box;
    if (name == "gaussian") return KernelShape::gaussian;
    if (name == "delta") return KernelShape::delta;
    throw ParameterError("unknown kernel shape '" + name + "'");
}

std::string to_string(KernelShape shape) {
    switch (shape) {
        case KernelShape::box: return "box";
        case KernelShape::gaussian: return "gaussian";
        case KernelShape::delta: return "delta";
    }
    return "?";
}

namespace {

// J sample for an index offset (a, b); zero beyond the sampled half width.
double kernel_at(const Kernel& J, int a, int b) {
    const int c = (J.grid.n - 1) / 2;
    if (std::abs(a) > c || std::abs(b) > c) {
        return 0.0;
    }
    return J.samples[J.grid.flat(a + c, J.grid.dim == 2 ? b + c : 0)];
}

void check_conv(const Field& u, const Kernel& J) {
    if (!(u.grid == J.grid) || J.samples.size() != u.size()) {
        throw DataError("convolve: kernel and field grids differ");
    }
    u.check_finite("convolve");
}

}  // namespace

Field convolve(const Field& u, const Kernel& J) {
    check_conv(u, J);
    detail::ToeplitzConv conv(u.grid.dim, u.grid.n,
                              [&](int a, int b) { return kernel_at(J, a, b) * J.grid.cell(); });
    Field out(u.grid);
    conv.apply(u.values, out.values);
    return out;
}

Field convolve_direct(const Field& u, const Kernel& J) {
    check_conv(u, J);
    const Grid& g = u.grid;
    Field out(g);
    const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < N; ++i) {
        const auto a = g.index(i);
        double acc = 0.0;
        for (std::ptrdiff_t j = 0; j < N; ++j) {
            const auto b = g.index(j);
            acc += kernel_at(J, a[0] - b[0], a[1] - b[1]) * u.values[j];
        }
        out.values[i] = acc * g.cell();
    }
    return out;
}

Field reaction(const Field& u, const Field& conv, double mu, double k, double gamma) {
    if (!(u.grid == conv.grid) || u.size() != conv.size()) {
        throw DataError("reaction: field and convolution grids differ");
    }
    Field out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double v = u.values[i];
        out.values[i] = mu * v * v * (1.0 - k * conv.values[i]) - gamma * v;
    }
    return out;
}

}  // namespace fracrd
