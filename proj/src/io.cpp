#include "fracrd/cli_io.hpp"

#include "fracrd/diagnostics.hpp"
#include "fracrd/errors.hpp"
#include "fracrd/verify.hpp"

#include <Eigen/Core>
#include <fftw3.h>
#include <omp.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#ifndef FRACRD_VERSION
#define FRACRD_VERSION "dev"
#endif

namespace fracrd {

namespace fs = std::filesystem;

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Trajectory simulate(const RunConfig& cfg) {
    const Field u0 = make_initial(cfg);
    switch (cfg.mode) {
    case RunMode::porous: return run_porous(u0, cfg.sim);
    case RunMode::spectral: return spectral_duhamel_run(u0, cfg.sim, make_kernel(cfg));
    case RunMode::run: break;
    }
    return run(u0, cfg.sim, make_kernel(cfg));
}

int status_code(RunStatus s) { return s == RunStatus::completed ? 0 : 2; }

RunConfig with_seed(RunConfig cfg, const CliOptions& opt) {
    if (opt.seed_set) {
        cfg.seed = opt.seed;
    }
    return cfg;
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view content) {
    static std::atomic<unsigned> counter{0};
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000) +
           "_" + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw DataError("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

void write_trajectory(const fs::path& dir, const Trajectory& traj, const RunConfig& cfg) {
    fs::create_directories(dir);
    std::ostringstream scalars;
    traj.write_scalars_csv(scalars);
    write_file_atomic(dir / "scalars.csv", scalars.str());
    for (std::size_t i = 0; i < traj.fields.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "field_%04zu.bin", i);
        std::ostringstream bin(std::ios::binary);
        traj.fields[i].write_binary(bin);
        write_file_atomic(dir / name, bin.str());
    }
    std::ostringstream meta;
    meta << "# config\n" << cfg.echo();
    meta << "# run\n";
    meta << "scheme = " << traj.scheme << '\n';
    meta << "status = " << to_string(traj.status) << '\n';
    meta << "t_star = " << g17(traj.t_star) << '\n';
    meta << "negative_steps = " << traj.negative_steps << '\n';
    meta << "min_value = " << g17(traj.min_value) << '\n';
    meta << "field_times =";
    for (double t : traj.field_times) {
        meta << ' ' << g17(t);
    }
    meta << '\n';
    for (const std::string& w : traj.warnings) {
        meta << "warning = " << w << '\n';
    }
    meta << "# versions\n";
    meta << "fracrd = " << FRACRD_VERSION << '\n';
    meta << "eigen = " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
         << EIGEN_MINOR_VERSION << '\n';
    meta << "fftw = " << fftw_version << '\n';
    write_file_atomic(dir / "meta", meta.str());
}

int cmd_run(const RunConfig& config, const CliOptions& opt) {
    const RunConfig cfg = with_seed(config, opt);
    try {
        const Trajectory t = simulate(cfg);
        write_trajectory(opt.out, t, cfg);
        std::cout << "status " << to_string(t.status) << " t_end " << g17(t.times.back())
                  << " sup " << g17(t.sup_norm.back());
        if (t.status != RunStatus::completed) {
            std::cout << " t* " << g17(t.t_star);
        }
        std::cout << '\n';
        if (t.negative_steps > 0) {
            std::cout << "negative undershoot on " << t.negative_steps << " steps, min "
                      << g17(t.min_value) << '\n';
        }
        return status_code(t.status);
    } catch (const StabilityError& e) {
        std::cerr << "error: " << e.what() << " (try dt <= " << g17(e.advisory_dt()) << ")\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_eigen(const RunConfig& cfg, const CliOptions& opt) {
    try {
        const Grid g = cfg.grid();
        const double s = cfg.sim.op.s, p = cfg.sim.op.p;
        std::vector<EigenPair> pairs;
        if (p == 2.0) {
            pairs.push_back(first_eigenpair_linear(g, s));
        }
        pairs.push_back(first_eigenpair_plap(g, s, p));
        std::ostringstream summary;
        summary << "method,s,p,lambda1,iterations,residual\n";
        for (const EigenPair& ep : pairs) {
            summary << ep.method << ',' << g17(s) << ',' << g17(p) << ',' << g17(ep.lambda1) << ','
                    << ep.iterations << ',' << g17(ep.residual) << '\n';
            std::cout << ep.method << " lambda1 " << g17(ep.lambda1) << '\n';
        }
        std::ostringstream field;
        pairs.front().write_csv(field);
        write_file_atomic(opt.out / "eigen.csv", field.str());
        write_file_atomic(opt.out / "eigen_summary.csv", summary.str());
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_blowup(const RunConfig& config, const CliOptions& opt) {
    const RunConfig cfg = with_seed(config, opt);
    try {
        if (cfg.mode == RunMode::porous) {
            throw ParameterError("blowup needs mode run or spectral");
        }
        const Grid g = cfg.grid();
        const EigenPair ep = cfg.sim.op.p == 2.0 ? first_eigenpair_linear(g, cfg.sim.op.s)
                                                 : first_eigenpair_plap(g, cfg.sim.op.s, cfg.sim.op.p);
        const Field u0 = make_initial(cfg);
        const BlowupFunctional bf = blowup_functional(u0, ep);
        const BlowupWindow w = blowup_window(cfg.sim.alpha, bf.H0);
        const Trajectory t = cfg.mode == RunMode::spectral
                                 ? spectral_duhamel_run(u0, cfg.sim, make_kernel(cfg))
                                 : run(u0, cfg.sim, make_kernel(cfg));
        write_trajectory(opt.out, t, cfg);
        const bool blew = t.status == RunStatus::blowup;
        const bool inside = blew && t.t_star >= 0.5 * w.t_lo && t.t_star <= 2.0 * w.t_hi;
        std::ostringstream csv;
        csv << "alpha,lambda1,H0,triggered,t_lo,t_hi,t_star,status,in_window\n";
        csv << g17(cfg.sim.alpha) << ',' << g17(ep.lambda1) << ',' << g17(bf.H0) << ','
            << (bf.triggered ? "true" : "false") << ',' << g17(w.t_lo) << ',' << g17(w.t_hi) << ','
            << g17(t.t_star) << ',' << to_string(t.status) << ',' << (inside ? "true" : "false")
            << '\n';
        write_file_atomic(opt.out / "blowup.csv", csv.str());
        std::cout << "H0 " << g17(bf.H0) << " window [" << g17(w.t_lo) << ", " << g17(w.t_hi)
                  << "] t* " << g17(t.t_star) << " (" << to_string(t.status) << ") "
                  << (inside ? "inside" : "outside") << " [t_lo/2, 2 t_hi]\n";
        if (!bf.triggered) {
            std::cout << "H0 is below the blow-up threshold 1 + lambda1\n";
        }
        return inside ? 0 : 1;
    } catch (const StabilityError& e) {
        std::cerr << "error: " << e.what() << " (try dt <= " << g17(e.advisory_dt()) << ")\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_sweep(const RunConfig& config, const CliOptions& opt, const std::string& axis,
              const std::vector<double>& values) {
    const RunConfig base = with_seed(config, opt);
    struct Outcome {
        std::string status = "error";
        double t_star = NAN;
        double final_sup = NAN;
        int code = 1;
        std::string error;
    };
    std::vector<Outcome> out(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        omp_set_num_threads(1);
        for (std::size_t i = next++; i < values.size(); i = next++) {
            Outcome& o = out[i];
            try {
                RunConfig c = base;
                set_config_value(c, axis, g17(values[i]));
                // Re-parse so the swept value passes the same gates as a config file.
                c = parse_config(c.echo());
                const Trajectory t = simulate(c);
                char name[64];
                std::snprintf(name, sizeof name, "%s_%03zu", axis.c_str(), i);
                write_trajectory(opt.out / name, t, c);
                o.status = to_string(t.status);
                o.t_star = t.t_star;
                o.final_sup = t.sup_norm.back();
                o.code = status_code(t.status);
            } catch (const StabilityError& e) {
                o.error = std::string(e.what()) + " (try dt <= " + g17(e.advisory_dt()) + ")";
            } catch (const std::exception& e) {
                o.error = e.what();
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(opt.threads, static_cast<int>(values.size())));
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) {
        pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
        t.join();
    }
    std::ostringstream csv;
    csv << "index," << axis << ",status,t_star,final_sup,exit_code,error\n";
    bool any_error = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Outcome& o = out[i];
        std::string err = o.error;
        for (char& ch : err) {
            if (ch == ',' || ch == '\n') {
                ch = ';';
            }
        }
        csv << i << ',' << g17(values[i]) << ',' << o.status << ',' << g17(o.t_star) << ','
            << g17(o.final_sup) << ',' << o.code << ',' << err << '\n';
        any_error = any_error || o.code == 1;
        std::cout << axis << " = " << g17(values[i]) << ": " << o.status
                  << (o.error.empty() ? "" : " (" + o.error + ")") << '\n';
    }
    write_file_atomic(opt.out / "sweep.csv", csv.str());
    return any_error ? 1 : 0;
}

int cmd_verify(const std::string& suite, const CliOptions& opt) {
    std::vector<int> ids;
    try {
        ids = suite_ids(suite);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    const std::uint64_t seed = opt.seed_set ? opt.seed : 7;
    std::vector<CheckRow> rows;
    bool all = true;
    for (int id : ids) {
        const CriterionResult r = run_criterion(id, seed);
        char head[160];
        std::snprintf(head, sizeof head, "[%s] criterion %d (%s, %.2f s of %.0f s): ",
                      r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds, r.budget);
        std::cout << head << r.detail << std::endl;
        rows.insert(rows.end(), r.rows.begin(), r.rows.end());
        all = all && r.pass;
    }
    std::ostringstream csv;
    write_check_matrix(csv, rows);
    write_file_atomic(opt.out / "check_matrix.csv", csv.str());
    return all ? 0 : 1;
}

}  // namespace fracrd
