#include <doctest.h>

#include "fracrd/cli_io.hpp"
#include "fracrd/diagnostics.hpp"
#include "fracrd/errors.hpp"
#include "fracrd/verify.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace fracrd;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = "mode = run\nn = 33\nL = 2\ndt = 1e-3\nt_end = 0.05\n";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fracrd_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_CASE("minimal config takes the documented defaults") {
    const RunConfig c = parse_config(kMinimal);
    RunConfig d;
    d.n = 33;
    d.L = 2.0;
    d.sim.t_end = 0.05;
    CHECK(c == d);
    CHECK(c.sim.alpha == 0.5);
    CHECK(c.sim.gamma == 1.0);
    CHECK(c.kernel == KernelShape::box);
    CHECK(c.echo().find("alpha = 0.5\n") != std::string::npos);
    CHECK(c.echo().find("initial = gaussian_bump\n") != std::string::npos);
}

TEST_CASE("echo round-trips") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        RunConfig c = parse_config(kMinimal);
        c.sim.alpha = 0.05 + 0.9 * U(rng);
        c.sim.op.s = 0.1 + 0.8 * U(rng);
        c.sim.mu = 3.0 * U(rng);
        c.sim.k = U(rng);
        c.sim.gamma = 1.0 + U(rng);
        c.initial_amplitude = U(rng) / 3.0;
        c.initial_center = 0.1 * (U(rng) - 0.5);
        c.kernel_eta = 0.01 + 0.1 * U(rng);
        c.seed = rng();
        c.sim.store_stride = 1 + t;
        const RunConfig back = parse_config(c.echo());
        CHECK(back == c);
        CHECK(back.echo() == c.echo());
    }
}

TEST_CASE("config errors carry line numbers") {
    CHECK(error_line(std::string(kMinimal) + "\nbogus = 1\n") == 7);
    CHECK(error_line(std::string(kMinimal) + "n = 17\n") == 6);
    CHECK(error_line("mode = run\nn = 33\nL = 2\ndt = 1e-3\n") > 0);
    CHECK(error_line("mode = run\nn = thirty\nL = 2\ndt = 1e-3\nt_end = 1\n") == 2);
    CHECK(error_line("mode = run\nn = 33.5\nL = 2\ndt = 1e-3\nt_end = 1\n") == 2);
    CHECK(error_line("mode = walk\nn = 33\nL = 2\ndt = 1e-3\nt_end = 1\n") == 1);
    CHECK(error_line(std::string(kMinimal) + "diffusion = yes\n") == 6);
    CHECK(error_line(std::string(kMinimal) + "no equals sign\n") == 6);
    try {
        parse_config(std::string(kMinimal) + "# comment\ngamma = 0.5  # sublinear\n");
        FAIL("gamma accepted");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 7);
        CHECK(std::string(e.what()).find("gamma >= 1 required") != std::string::npos);
    }
    try {
        parse_config("mode = porous\nn = 33\nL = 2\ndt = 1e-4\nt_end = 0.01\ns = 0.5\np = 1.5\nm = 2\n");
        FAIL("porous p = 1.5 accepted");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 7);
        CHECK(std::string(e.what()).find("1 < p < 4/3") != std::string::npos);
    }
    CHECK(error_line(std::string(kMinimal) + "mode2 = run\n") == 6);
    CHECK(error_line(std::string(kMinimal) + "initial = file\ninitial_file = /no/such/file.csv\n") == 7);
    CHECK_THROWS_AS(parse_config("mode = spectral\nn = 33\nL = 2\ndt = 1e-3\nt_end = 1\np = 3\n"),
                    ConfigError);
}

TEST_CASE("set_config_value and the initial presets") {
    RunConfig c = parse_config(kMinimal);
    set_config_value(c, "mu", "0.25");
    CHECK(c.sim.mu == 0.25);
    CHECK_THROWS_AS(set_config_value(c, "nope", "1"), ConfigError);
    CHECK_THROWS_AS(set_config_value(c, "mu", "x"), ConfigError);

    c.initial = InitialPreset::constant;
    c.initial_amplitude = 0.2;
    CHECK(make_initial(c).sup_norm() == 0.2);

    c.initial = InitialPreset::scaled_eigen;
    c.L = 1.0;
    const Field u0 = make_initial(c);
    const EigenPair ep = first_eigenpair_linear(c.grid(), c.sim.op.s);
    CHECK(blowup_functional(u0, ep).H0 ==
          doctest::Approx(c.h0_factor * (1.0 + ep.lambda1)).epsilon(1e-10));

    const fs::path dir = scratch("initial");
    std::ofstream(dir / "u0.csv") << [] {
        std::ostringstream os;
        Field f(Grid::make(1, 2.0, 33), 0.125);
        f.write_csv(os);
        return os.str();
    }();
    const RunConfig fc =
        parse_config(std::string(kMinimal) + "initial = file\ninitial_file = u0.csv\n", dir);
    CHECK(fs::path(fc.initial_file).is_absolute());
    CHECK(make_initial(fc).sup_norm() == 0.125);
}

TEST_CASE("atomic writes and the trajectory directory") {
    const fs::path dir = scratch("traj");
    write_file_atomic(dir / "a.txt", "first");
    write_file_atomic(dir / "a.txt", "second");
    CHECK(slurp(dir / "a.txt") == "second");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) {
        ++entries;
    }
    CHECK(entries == 1);

    RunConfig c = parse_config(kMinimal);
    c.sim.store_stride = 25;
    CliOptions opt;
    opt.out = dir / "r1";
    REQUIRE(cmd_run(c, opt) == 0);
    opt.out = dir / "r2";
    REQUIRE(cmd_run(c, opt) == 0);
    CHECK(slurp(dir / "r1" / "scalars.csv") == slurp(dir / "r2" / "scalars.csv"));
    CHECK(fs::exists(dir / "r1" / "field_0002.bin"));
    const std::string meta = slurp(dir / "r1" / "meta");
    CHECK(meta.find(c.echo()) != std::string::npos);
    CHECK(meta.find("status = completed") != std::string::npos);
    std::ifstream bin(dir / "r1" / "field_0002.bin", std::ios::binary);
    CHECK(Field::read_binary(bin).size() == 33);
}

TEST_CASE("command exit codes") {
    const fs::path dir = scratch("cmds");
    CliOptions opt;
    opt.out = dir / "blow";
    RunConfig c = parse_config(
        "mode = run\nn = 33\nL = 1\ndt = 1e-4\nt_end = 0.5\nk = 1e-6\ninitial = constant\n"
        "initial_amplitude = 30\nstore_stride = 1000\n");
    CHECK(cmd_run(c, opt) == 2);
    CHECK(slurp(dir / "blow" / "scalars.csv").find(",blowup\n") != std::string::npos);

    c = parse_config("mode = run\nn = 65\nL = 1\ndt = 0.05\nt_end = 1\n");
    opt.out = dir / "unstable";
    CHECK(cmd_run(c, opt) == 1);

    c = parse_config(kMinimal);
    opt.out = dir / "sweep";
    opt.threads = 2;
    CHECK(cmd_sweep(c, opt, "mu", {0.5, 1.0, 2.0}) == 0);
    const std::string sweep = slurp(dir / "sweep" / "sweep.csv");
    CHECK(sweep.rfind("index,mu,status,", 0) == 0);
    CHECK(sweep.find("2,2,completed") != std::string::npos);
    CHECK(cmd_sweep(c, opt, "gamma", {0.5}) == 1);

    opt.out = dir / "verify";
    CHECK(cmd_verify("1,4", opt) == 0);
    CHECK(slurp(dir / "verify" / "check_matrix.csv").rfind("theorem,check,regime", 0) == 0);
    CHECK(cmd_verify("99", opt) == 1);
}

TEST_CASE("suite ids") {
    CHECK(suite_ids("all").size() == 12);
    CHECK(suite_ids("3,1") == std::vector<int>{3, 1});
    CHECK_THROWS_AS(suite_ids("x"), ParameterError);
    CHECK_THROWS_AS(suite_ids("0"), ParameterError);
    CHECK(criterion_names().size() == 12);
}
