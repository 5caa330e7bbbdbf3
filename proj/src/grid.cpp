#include "fracrd/grid.hpp"

#include "fracrd/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace fracrd {

namespace {

static_assert(std::endian::native == std::endian::little, "binary layout assumes little endian");

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
        throw DataError("field: truncated binary input");
    }
    return v;
}

}  // namespace

Grid Grid::make(int dim, double L, int n) {
    Grid g;
    g.dim = dim;
    g.L = L;
    g.n = n;
    g.h = (n > 1) ? 2.0 * L / (n - 1) : 0.0;
    g.validate();
    return g;
}

void Grid::validate() const {
    if (dim != 1 && dim != 2) {
        throw ParameterError("grid: dim must be 1 or 2");
    }
    if (!(L > 0.0) || !std::isfinite(L)) {
        throw ParameterError("grid: half width must be positive");
    }
    if (n < 9 || n % 2 == 0) {
        throw ParameterError("grid: n must be odd and at least 9");
    }
}

std::array<int, 2> Grid::index(std::size_t flat) const {
    if (dim == 1) {
        return {static_cast<int>(flat), 0};
    }
    return {static_cast<int>(flat / n), static_cast<int>(flat % n)};
}

double Grid::radius(std::size_t f) const {
    const auto ij = index(f);
    const double x = coord(ij[0]);
    if (dim == 1) {
        return std::fabs(x);
    }
    const double y = coord(ij[1]);
    return std::hypot(x, y);
}

Region Region::full(const Grid& g) {
    Region r;
    r.lo = {0, 0};
    r.hi = {g.n - 1, g.dim == 2 ? g.n - 1 : 0};
    return r;
}

Region Region::box(const Grid& g, std::array<double, 2> c, double hw) {
    Region r;
    for (int k = 0; k < g.dim; ++k) {
        const double lo = (c[k] - hw + g.L) / g.h;
        const double hi = (c[k] + hw + g.L) / g.h;
        r.lo[k] = static_cast<int>(std::ceil(lo - 1e-9));
        r.hi[k] = static_cast<int>(std::floor(hi + 1e-9));
        if (r.lo[k] < 0 || r.hi[k] > g.n - 1 || r.lo[k] > r.hi[k]) {
            throw DomainError("region: box exceeds the grid");
        }
    }
    if (g.dim == 1) {
        r.lo[1] = r.hi[1] = 0;
    }
    return r;
}

bool Region::contains(const Grid& g, std::size_t f) const {
    const auto ij = g.index(f);
    return ij[0] >= lo[0] && ij[0] <= hi[0] && ij[1] >= lo[1] && ij[1] <= hi[1];
}

std::vector<std::size_t> Region::nodes(const Grid& g) const {
    std::vector<std::size_t> out;
    for (int i = lo[0]; i <= hi[0]; ++i) {
        for (int j = lo[1]; j <= hi[1]; ++j) {
            out.push_back(g.flat(i, j));
        }
    }
    return out;
}

Field::Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != g.size()) {
        throw DataError("field: sample count does not match the grid");
    }
}

void Field::check_finite(const char* who) const {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw DataError(std::string(who) + ": non-finite value in field");
        }
    }
}

double Field::sup_norm() const {
    double m = 0.0;
    for (double v : values) {
        m = std::max(m, std::fabs(v));
    }
    return m;
}

double Field::lp_power(double q) const {
    double acc = 0.0;
    for (double v : values) {
        acc += std::pow(std::fabs(v), q);
    }
    return acc * grid.cell();
}

double Field::integral() const {
    double acc = 0.0;
    for (double v : values) {
        acc += v;
    }
    return acc * grid.cell();
}

void Field::write_csv(std::ostream& os) const {
    const auto old = os.precision(17);
    os << (grid.dim == 1 ? "x,value\n" : "x,y,value\n");
    for (std::size_t f = 0; f < values.size(); ++f) {
        const auto ij = grid.index(f);
        os << grid.coord(ij[0]) << ',';
        if (grid.dim == 2) {
            os << grid.coord(ij[1]) << ',';
        }
        os << values[f] << '\n';
    }
    os.precision(old);
}

Field Field::read_csv(std::istream& is, const Grid& grid) {
    std::string line;
    if (!std::getline(is, line)) {
        throw DataError("field csv: empty input");
    }
    Field out(grid);
    std::size_t count = 0;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x = 0.0, y = 0.0, v = 0.0;
        ls >> x;
        if (grid.dim == 2) {
            ls >> y;
        }
        ls >> v;
        if (!ls) {
            throw DataError("field csv: malformed line " + std::to_string(line_no));
        }
        const int i = static_cast<int>(std::lround((x + grid.L) / grid.h));
        const int j = grid.dim == 2 ? static_cast<int>(std::lround((y + grid.L) / grid.h)) : 0;
        if (i < 0 || i >= grid.n || j < 0 || j >= grid.n ||
            std::fabs(grid.coord(i) - x) > 1e-9 * std::max(1.0, grid.L)) {
            throw DataError("field csv: point off the grid at line " + std::to_string(line_no));
        }
        out.values[grid.flat(i, j)] = v;
        ++count;
    }
    if (count != grid.size()) {
        throw DataError("field csv: expected " + std::to_string(grid.size()) + " samples");
    }
    out.check_finite("field csv");
    return out;
}

void Field::write_binary(std::ostream& os) const {
    put<std::int64_t>(os, grid.dim);
    put<std::int64_t>(os, grid.n);
    put<double>(os, grid.L);
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size() * sizeof(double)));
}

Field Field::read_binary(std::istream& is) {
    const auto dim = get<std::int64_t>(is);
    const auto n = get<std::int64_t>(is);
    const auto L = get<double>(is);
    const Grid g = Grid::make(static_cast<int>(dim), L, static_cast<int>(n));
    Field out(g);
    if (!is.read(reinterpret_cast<char*>(out.values.data()),
                 static_cast<std::streamsize>(out.values.size() * sizeof(double)))) {
        throw DataError("field: truncated binary payload");
    }
    return out;
}

}  // namespace fracrd
