#include "fracrd/cli_io.hpp"

#include "fracrd/errors.hpp"

#include <cctype>
#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fracrd {

std::string to_string(RunMode m) {
    switch (m) {
    case RunMode::run: return "run";
    case RunMode::porous: return "porous";
    case RunMode::spectral: return "spectral";
    }
    return "?";
}

std::string to_string(InitialPreset p) {
    switch (p) {
    case InitialPreset::gaussian_bump: return "gaussian_bump";
    case InitialPreset::scaled_eigen: return "scaled_eigen";
    case InitialPreset::constant: return "constant";
    case InitialPreset::file: return "file";
    }
    return "?";
}

namespace {

// Thrown by the value parsers; the caller adds the line number.
struct BadValue {
    std::string what;
};

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
        throw BadValue{"expected a number, got '" + s + "'"};
    }
    return v;
}

long long to_int(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
        throw BadValue{"expected an integer, got '" + s + "'"};
    }
    return v;
}

int to_int32(const std::string& s) {
    const long long v = to_int(s);
    if (v < INT32_MIN || v > INT32_MAX) {
        throw BadValue{"integer out of range: " + s};
    }
    return static_cast<int>(v);
}

bool to_bool(const std::string& s) {
    if (s == "true") {
        return true;
    }
    if (s == "false") {
        return false;
    }
    throw BadValue{"expected true or false, got '" + s + "'"};
}

std::string to_string(TailMode m) { return m == TailMode::numeric ? "numeric" : "analytic_1d"; }
std::string to_string(SingularMode m) {
    return m == SingularMode::local_correction ? "local_correction" : "skip_diagonal";
}
std::string to_string(bool b) { return b ? "true" : "false"; }

template <class E>
E to_enum(const std::string& s, std::initializer_list<E> options) {
    std::string names;
    for (E e : options) {
        if (to_string(e) == s) {
            return e;
        }
        names += (names.empty() ? "" : ", ") + to_string(e);
    }
    throw BadValue{"expected one of " + names + ", got '" + s + "'"};
}

struct Key {
    const char* name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define FRACRD_DOUBLE(key, member)                                                         \
    Key {                                                                                  \
        key, [](RunConfig& c, const std::string& v) { c.member = to_double(v); },          \
            [](const RunConfig& c) { return g17(c.member); }                               \
    }
#define FRACRD_INT(key, member)                                                            \
    Key {                                                                                  \
        key, [](RunConfig& c, const std::string& v) { c.member = to_int32(v); },           \
            [](const RunConfig& c) { return std::to_string(c.member); }                    \
    }

const std::vector<Key>& keys() {
    static const std::vector<Key> k = {
        {"mode",
         [](RunConfig& c, const std::string& v) {
             c.mode = to_enum(v, {RunMode::run, RunMode::porous, RunMode::spectral});
         },
         [](const RunConfig& c) { return to_string(c.mode); }},
        FRACRD_INT("dim", dim),
        FRACRD_DOUBLE("L", L),
        FRACRD_INT("n", n),
        FRACRD_DOUBLE("alpha", sim.alpha),
        FRACRD_DOUBLE("s", sim.op.s),
        FRACRD_DOUBLE("p", sim.op.p),
        {"tail_mode",
         [](RunConfig& c, const std::string& v) {
             c.sim.op.tail_mode = to_enum(v, {TailMode::analytic_1d, TailMode::numeric});
         },
         [](const RunConfig& c) { return to_string(c.sim.op.tail_mode); }},
        {"singular_mode",
         [](RunConfig& c, const std::string& v) {
             c.sim.op.singular_mode =
                 to_enum(v, {SingularMode::skip_diagonal, SingularMode::local_correction});
         },
         [](const RunConfig& c) { return to_string(c.sim.op.singular_mode); }},
        FRACRD_DOUBLE("mu", sim.mu),
        FRACRD_DOUBLE("k", sim.k),
        FRACRD_DOUBLE("gamma", sim.gamma),
        FRACRD_DOUBLE("m", sim.m),
        FRACRD_DOUBLE("dt", sim.dt),
        FRACRD_DOUBLE("t_end", sim.t_end),
        FRACRD_DOUBLE("blowup_threshold", sim.blowup_threshold),
        FRACRD_DOUBLE("stability_factor", sim.stability_factor),
        {"diffusion", [](RunConfig& c, const std::string& v) { c.sim.diffusion = to_bool(v); },
         [](const RunConfig& c) { return to_string(c.sim.diffusion); }},
        FRACRD_INT("store_stride", sim.store_stride),
        {"kernel",
         [](RunConfig& c, const std::string& v) {
             c.kernel = to_enum(v, {KernelShape::box, KernelShape::gaussian, KernelShape::delta});
         },
         [](const RunConfig& c) { return to_string(c.kernel); }},
        FRACRD_DOUBLE("kernel_width", kernel_width),
        FRACRD_DOUBLE("kernel_delta0", kernel_delta0),
        FRACRD_DOUBLE("kernel_eta", kernel_eta),
        {"initial",
         [](RunConfig& c, const std::string& v) {
             c.initial = to_enum(v, {InitialPreset::gaussian_bump, InitialPreset::scaled_eigen,
                                     InitialPreset::constant, InitialPreset::file});
         },
         [](const RunConfig& c) { return to_string(c.initial); }},
        FRACRD_DOUBLE("initial_amplitude", initial_amplitude),
        FRACRD_DOUBLE("initial_width", initial_width),
        FRACRD_DOUBLE("initial_center", initial_center),
        FRACRD_DOUBLE("h0_factor", h0_factor),
        {"initial_file", [](RunConfig& c, const std::string& v) { c.initial_file = v; },
         [](const RunConfig& c) { return c.initial_file; }},
        {"seed",
         [](RunConfig& c, const std::string& v) {
             if (v.empty() || v[0] == '-') {
                 throw BadValue{"seed must be a nonnegative integer"};
             }
             errno = 0;
             char* end = nullptr;
             const unsigned long long s = std::strtoull(v.c_str(), &end, 10);
             if (end != v.c_str() + v.size() || errno == ERANGE) {
                 throw BadValue{"expected an integer, got '" + v + "'"};
             }
             c.seed = s;
         },
         [](const RunConfig& c) { return std::to_string(c.seed); }},
    };
    return k;
}

#undef FRACRD_DOUBLE
#undef FRACRD_INT

const Key* find_key(const std::string& name) {
    for (const Key& k : keys()) {
        if (name == k.name) {
            return &k;
        }
    }
    return nullptr;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Line of the first config key named in a validation message, else 0.
int blame(const std::string& message, const std::map<std::string, int>& lines) {
    std::string token;
    for (std::size_t i = 0; i <= message.size(); ++i) {
        const char ch = i < message.size() ? message[i] : ' ';
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') {
            token += ch;
            continue;
        }
        if (auto it = lines.find(token); it != lines.end()) {
            return it->second;
        }
        token.clear();
    }
    return 0;
}

void validate(RunConfig& c, const std::map<std::string, int>& lines) {
    auto fail = [&](const std::string& what, const std::string& key) {
        const auto it = lines.find(key);
        throw ConfigError(what, it == lines.end() ? 0 : it->second);
    };
    if (c.sim.gamma < 1.0) {
        fail("gamma >= 1 required by the model (got " + g17(c.sim.gamma) + ")", "gamma");
    }
    if (c.mode == RunMode::spectral && (c.sim.op.p != 2.0 || c.sim.m != 1.0)) {
        fail("spectral mode needs p = 2 and m = 1", c.sim.op.p != 2.0 ? "p" : "m");
    }
    c.sim.op.porous_regime = c.mode == RunMode::porous;
    try {
        c.grid().validate();
        if (c.mode == RunMode::porous) {
            c.sim.validate_porous(c.dim);
        } else {
            c.sim.validate(c.dim);
        }
        if (c.mode != RunMode::porous) {
            make_kernel(c);
        }
    } catch (const ParameterError& e) {
        throw ConfigError(e.what(), blame(e.what(), lines));
    }
    if (c.initial == InitialPreset::file && !std::filesystem::is_regular_file(c.initial_file)) {
        fail("initial_file does not exist: " + c.initial_file,
             lines.count("initial_file") ? "initial_file" : "initial");
    }
    if (c.initial_width <= 0.0 || c.h0_factor <= 0.0) {
        fail("initial_width and h0_factor must be positive",
             c.initial_width <= 0.0 ? "initial_width" : "h0_factor");
    }
}

}  // namespace

const std::vector<std::string>& required_config_keys() {
    static const std::vector<std::string> k{"mode", "n", "L", "dt", "t_end"};
    return k;
}

std::string RunConfig::echo() const {
    std::string out;
    for (const Key& k : keys()) {
        out += k.name;
        out += " = ";
        out += k.get(*this);
        out += '\n';
    }
    return out;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    const Key* k = find_key(key);
    if (!k) {
        throw ConfigError("unknown key '" + key + "'", 0);
    }
    try {
        k->set(cfg, value);
    } catch (const BadValue& b) {
        throw ConfigError(key + ": " + b.what, 0);
    }
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    RunConfig c;
    std::map<std::string, int> lines;
    bool tail_given = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const std::string body = trim(line);
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value'", line_no);
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        const Key* k = find_key(key);
        if (!k) {
            throw ConfigError("unknown key '" + key + "'", line_no);
        }
        if (lines.count(key)) {
            throw ConfigError("duplicate key '" + key + "' (first on line " +
                                  std::to_string(lines[key]) + ")",
                              line_no);
        }
        lines[key] = line_no;
        try {
            k->set(c, value);
        } catch (const BadValue& b) {
            throw ConfigError(key + ": " + b.what, line_no);
        }
        if (key == "initial_file" && !value.empty()) {
            const std::filesystem::path p(value);
            if (p.is_relative() && !base_dir.empty()) {
                c.initial_file = (base_dir / p).lexically_normal().string();
            }
        }
        tail_given = tail_given || key == "tail_mode";
    }
    for (const std::string& r : required_config_keys()) {
        if (!lines.count(r)) {
            throw ConfigError("missing required key '" + r + "'", line_no);
        }
    }
    if (c.dim == 2 && !tail_given) {
        c.sim.op.tail_mode = TailMode::numeric;
    }
    validate(c, lines);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config " + path.string(), 0);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

Field make_initial(const RunConfig& cfg) {
    const Grid g = cfg.grid();
    Field u(g);
    switch (cfg.initial) {
    case InitialPreset::gaussian_bump:
        for (std::size_t f = 0; f < g.size(); ++f) {
            const auto ij = g.index(f);
            const double x = g.coord(ij[0]) - cfg.initial_center;
            const double y = g.dim == 2 ? g.coord(ij[1]) : 0.0;
            const double w2 = cfg.initial_width * cfg.initial_width;
            u[f] = cfg.initial_amplitude * std::exp(-(x * x + y * y) / w2);
        }
        break;
    case InitialPreset::constant:
        u = Field(g, cfg.initial_amplitude);
        break;
    case InitialPreset::scaled_eigen: {
        const EigenPair ep = cfg.sim.op.p == 2.0 ? first_eigenpair_linear(g, cfg.sim.op.s)
                                                 : first_eigenpair_plap(g, cfg.sim.op.s, cfg.sim.op.p);
        const double e2 = ep.e1.lp_power(2.0);
        const double c = cfg.h0_factor * (1.0 + ep.lambda1) / e2;
        u = ep.e1;
        for (double& v : u.values) {
            v *= c;
        }
        break;
    }
    case InitialPreset::file: {
        std::ifstream in(cfg.initial_file);
        if (!in) {
            throw DataError("cannot open initial_file " + cfg.initial_file);
        }
        u = Field::read_csv(in, g);
        break;
    }
    }
    u.check_finite("make_initial");
    return u;
}

Kernel make_kernel(const RunConfig& cfg) {
    return Kernel::make(cfg.grid(), cfg.kernel, cfg.kernel_width, cfg.kernel_delta0, cfg.kernel_eta);
}

}  // namespace fracrd
