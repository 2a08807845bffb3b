#include "fracwave/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"

#include "fracwave/adjoint.hpp"
#include "fracwave/harness.hpp"
#include "fracwave/io.hpp"
#include "fracwave/kernels.hpp"
#include "fracwave/oracle.hpp"
#include "fracwave/prior.hpp"
#include "fracwave/rng.hpp"

namespace fracwave::cli {

using json = nlohmann::json;

namespace {

constexpr double kAllAlphas = -1.0;

std::string join(const std::vector<std::string>& parts, const char* sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

std::string num(double v) { return io::format_number(v); }

// ---- JSON readers -------------------------------------------------------

double read_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path + ": expected a number");
    return v.get<double>();
}

int read_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
    return v.get<int>();
}

std::uint64_t read_seed(const json& v, const std::string& path) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw ConfigError(path + ": expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

bool read_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError(path + ": expected true or false");
    return v.get<bool>();
}

std::string read_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path + ": expected a string");
    return v.get<std::string>();
}

std::vector<double> read_numbers(const json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError(path + ": expected a number or an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Point read_point(const json& v, const std::string& path) {
    const auto xs = read_numbers(v, path);
    if (xs.size() != 2) throw ConfigError(path + ": expected [x, y]");
    return {xs[0], xs[1]};
}

template <class F>
auto parse_enum(F&& from_string, const json& v, const std::string& path) {
    try {
        return from_string(read_string(v, path));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

json point_json(Point p) { return json::array({p.x, p.y}); }

FieldFunction box_mode(const Box& b) {
    return [b](double x, double y) {
        return std::sin(std::numbers::pi * (x - b.x0) / (b.x1 - b.x0)) *
               std::sin(std::numbers::pi * (y - b.y0) / (b.y1 - b.y0));
    };
}

double mode_eigenvalue(const Box& b) {
    const double lx = b.x1 - b.x0, ly = b.y1 - b.y0;
    return std::numbers::pi * std::numbers::pi * (1.0 / (lx * lx) + 1.0 / (ly * ly));
}

FieldFunction initial_function(const RunConfig& cfg) {
    if (cfg.initial == "inclusion") return cfg.inclusion;
    return box_mode(cfg.box);
}

std::size_t step_count(const RunConfig& cfg) {
    return static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
}

// ---- Manifest -----------------------------------------------------------

class Manifest {
public:
    explicit Manifest(const RunConfig& cfg) : path_(cfg.out_dir / "manifest.json") {
        doc_["status"] = "running";
        doc_["subcommand"] = to_string(cfg.subcommand);
        doc_["preset"] = cfg.preset;
        doc_["config"] = cfg.to_json();
        doc_["rng"] = {{"algorithm", NormalRng::kAlgorithm}, {"seed", cfg.seed}};
        doc_["noise_convention"] = "sigma = delta * max|clean trace|";
        doc_["threads"] = kernels::max_threads();
        doc_["outputs"] = json::array();
        doc_["results"] = json::object();
        write();
    }

    void output(const std::filesystem::path& rel) {
        doc_["outputs"].push_back(rel.generic_string());
        write();
    }
    json& results() { return doc_["results"]; }

    void finish(const std::string& status, double seconds) {
        doc_["status"] = status;
        doc_["elapsed_seconds"] = seconds;
        write();
    }
    void fail(const std::string& kind, const std::string& message, long step, double seconds) {
        doc_["status"] = "error";
        doc_["error"] = {{"type", kind}, {"message", message}};
        if (step >= 0) doc_["error"]["step"] = step;
        doc_["elapsed_seconds"] = seconds;
        write();
    }

private:
    void write() const {
        const auto tmp = std::filesystem::path(path_).concat(".tmp");
        {
            auto os = io::open_output(tmp);
            os << doc_.dump(2) << '\n';
        }
        std::filesystem::rename(tmp, path_);
    }

    std::filesystem::path path_;
    json doc_;
};

// Output files for one alpha of a sweep live in a subdirectory.
std::filesystem::path alpha_dir(const RunConfig& cfg, double alpha) {
    if (cfg.alphas.size() == 1) return {};
    return "alpha_" + num(alpha);
}

WavePhysics physics_for(const RunConfig& cfg, double alpha) { return {Alpha(alpha), cfg.c2, cfg.b}; }

// ---- forward ------------------------------------------------------------

json run_forward_one(const RunConfig& cfg, double alpha, Manifest& manifest) {
    const auto sub = alpha_dir(cfg, alpha);
    const StructuredMesh mesh(cfg.box, cfg.nx, cfg.ny);
    const WavePhysics phys = physics_for(cfg, alpha);
    const SemidiscreteSystem sys = wave_system(mesh, phys);
    const TimeGrid grid(cfg.dt, step_count(cfg));
    Vector u0 = interpolate(mesh, initial_function(cfg));
    for (int b : mesh.boundary_nodes()) u0[b] = 0.0;
    RunOptions opts;
    opts.formulation = cfg.formulation;
    opts.forcing_rule = cfg.forcing_rule;
    const StateHistory h = run_forward(sys, cfg.newmark, cfg.scheme, phys.alpha, grid, u0, Vector::Zero(u0.size()), opts);

    json res;
    const SurfaceSampler sampler = SurfaceSampler::circle(mesh, cfg.sigma_center, cfg.sigma_radius);
    Matrix trace(static_cast<Eigen::Index>(sampler.size()), h.d.cols());
    for (Eigen::Index n = 0; n < h.d.cols(); ++n)
        for (std::size_t k = 0; k < sampler.size(); ++k) trace(static_cast<Eigen::Index>(k), n) = h.d(sampler.nodes()[k], n);
    io::write_wide_series(cfg.out_dir / sub / "trace.csv", grid, trace, "sigma");
    manifest.output(sub / "trace.csv");

    std::vector<std::vector<double>> energy;
    for (Eigen::Index n = 0; n < h.d.cols(); ++n) {
        const Vector v = h.v.col(n), d = h.d.col(n);
        energy.push_back({grid.t(static_cast<std::size_t>(n)), 0.5 * v.dot(kernels::spmv(sys.mass, v)),
                          0.5 * d.dot(kernels::spmv(sys.stiffness, d))});
    }
    io::write_csv(cfg.out_dir / sub / "energy.csv", {"t", "kinetic", "potential"}, energy);
    manifest.output(sub / "energy.csv");

    // The first box eigenmode has a closed form when it reduces to the
    // scalar relaxation problem.
    const auto rp = oracle::RelaxationParams::closed_form();
    const double lambda = mode_eigenvalue(cfg.box);
    const bool exact = cfg.initial == "mode" && alpha == 0.5 && std::abs(cfg.c2 * lambda - rp.B) <= 1e-12 &&
                       std::abs(cfg.b * lambda - rp.A) <= 1e-12 * rp.A;
    const Vector psi = exact ? interpolate(mesh, box_mode(cfg.box)) : Vector();
    std::vector<std::vector<double>> index_rows, error_rows;
    for (std::size_t k = 0; k < cfg.snapshots.size(); ++k) {
        const auto n = static_cast<Eigen::Index>(std::llround(cfg.snapshots[k] / cfg.dt));
        const std::string name = "snapshot_" + std::to_string(k);
        write_field_csv(cfg.out_dir / sub / (name + ".csv"), mesh, h.d.col(n));
        manifest.output(sub / (name + ".csv"));
        if (cfg.write_vtk) {
            write_field_vtk(cfg.out_dir / sub / (name + ".vtk"), mesh, h.d.col(n), "u");
            manifest.output(sub / (name + ".vtk"));
        }
        index_rows.push_back({static_cast<double>(k), grid.t(static_cast<std::size_t>(n)), static_cast<double>(n)});
        if (exact) {
            const Vector ref = oracle::exact_w_half(grid.t(static_cast<std::size_t>(n))) * psi;
            const Vector e = h.d.col(n) - ref;
            const double err = std::sqrt(e.dot(kernels::spmv(sys.mass, e)) / ref.dot(kernels::spmv(sys.mass, ref)));
            error_rows.push_back({grid.t(static_cast<std::size_t>(n)), err});
        }
    }
    if (!index_rows.empty()) {
        io::write_csv(cfg.out_dir / sub / "snapshots.csv", {"index", "t", "step"}, index_rows);
        manifest.output(sub / "snapshots.csv");
    }
    if (!error_rows.empty()) {
        io::write_csv(cfg.out_dir / sub / "snapshot_errors.csv", {"t", "rel_error"}, error_rows);
        manifest.output(sub / "snapshot_errors.csv");
        double worst = 0.0;
        for (const auto& r : error_rows) worst = std::max(worst, r[1]);
        res["max_snapshot_rel_error"] = worst;
    }
    const DiscreteEnergy en = discrete_energy(h, sys);
    res["alpha"] = alpha;
    res["sigma_nodes"] = sampler.size();
    res["final_kinetic"] = en.kinetic_last;
    res["final_potential"] = en.potential;
    return res;
}

int run_forward_cmd(const RunConfig& cfg, Manifest& manifest) {
    json all = json::array();
    for (double a : cfg.alphas) all.push_back(run_forward_one(cfg, a, manifest));
    manifest.results()["runs"] = all;
    return 0;
}

// ---- oracle-compare -------------------------------------------------------

int run_oracle_compare(const RunConfig& cfg, Manifest& manifest) {
    const auto rp = oracle::RelaxationParams::closed_form();
    SemidiscreteSystem sys;
    auto scalar = [](double v) {
        SparseMatrix m(1, 1);
        m.insert(0, 0) = v;
        m.makeCompressed();
        return m;
    };
    sys.mass = scalar(1.0);
    sys.damping = scalar(rp.A);
    sys.stiffness = scalar(rp.B);
    const TimeGrid grid(cfg.dt, step_count(cfg));
    RunOptions opts;
    opts.formulation = cfg.formulation;
    const StateHistory h =
        run_forward(sys, cfg.newmark, cfg.scheme, Alpha(rp.alpha), grid, Vector::Ones(1), Vector::Zero(1), opts);
    std::vector<std::vector<double>> rows;
    double worst = 0.0;
    for (std::size_t n = 0; n < grid.n_nodes(); ++n) {
        const double exact = oracle::exact_w_half(grid.t(n));
        const double numeric = h.d(0, static_cast<Eigen::Index>(n));
        const double err = std::abs(numeric - exact);
        worst = std::max(worst, err);
        rows.push_back({grid.t(n), exact, numeric, err});
    }
    io::write_csv(cfg.out_dir / "oracle_compare.csv", {"t", "w_exact", "w_numeric", "error"}, rows);
    manifest.output("oracle_compare.csv");
    manifest.results()["alpha"] = rp.alpha;
    manifest.results()["max_abs_error"] = worst;
    std::cout << "oracle-compare: dt = " << num(cfg.dt) << ", T = " << num(grid.horizon())
              << ", max |w_numeric - w_exact| = " << num(worst) << '\n';
    return 0;
}

// ---- gradient-check -------------------------------------------------------

constexpr double kGradientTolerance = 1e-3;

int run_gradient_check(const RunConfig& cfg, Manifest& manifest) {
    bool all_pass = true;
    json runs = json::array();
    for (double alpha : cfg.alphas) {
        const auto sub = alpha_dir(cfg, alpha);
        const StructuredMesh mesh(cfg.box, cfg.nx, cfg.ny);
        const WaveModel model(mesh, SurfaceSampler::circle(mesh, cfg.sigma_center, cfg.sigma_radius),
                              TimeGrid(cfg.dt, step_count(cfg)), physics_for(cfg, alpha), cfg.scheme, cfg.newmark,
                              cfg.formulation);
        const SyntheticData data = generate_data(model, initial_function(cfg), cfg.fine_factor, cfg.noise_delta, cfg.seed);
        const PriorPair pp = cfg.prior_for(alpha);
        ReconProblem problem(model, data.noisy, NoiseModel{data.sigma},
                             BiLaplacianPrior(model.mass(), model.laplacian(), pp.gamma, pp.rho),
                             Vector::Zero(static_cast<Eigen::Index>(model.dofs())));
        problem.adjoint = cfg.adjoint.value_or(default_adjoint(model));

        NormalRng rng(cfg.seed + 1);
        auto random_field = [&] {
            Vector v(static_cast<Eigen::Index>(model.dofs()));
            for (auto& x : v) x = rng.normal();
            v = model.restrict_interior(v);
            return Vector(v / v.cwiseAbs().maxCoeff());
        };
        const Vector u = random_field();
        std::vector<Vector> dirs;
        for (int k = 0; k < cfg.directions; ++k) dirs.push_back(random_field());
        const GradientResult g = gradient(problem, u);  // also builds the cached step solvers

        const std::vector<double> hs{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
        std::vector<std::vector<std::vector<double>>> tables(dirs.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(dirs.size()); ++i) {
            const Vector& d = dirs[static_cast<std::size_t>(i)];
            const double ad = g.derivative.dot(d);
            for (double h : hs) {
                const double fd = (cost(problem, u + h * d).total - cost(problem, u - h * d).total) / (2.0 * h);
                tables[static_cast<std::size_t>(i)].push_back({h, fd, ad, std::abs(fd - ad) / std::max(std::abs(fd), 1e-300)});
            }
        }
        std::vector<std::vector<double>> summary;
        for (std::size_t k = 0; k < tables.size(); ++k) {
            const std::string name = "gradient_check_" + std::to_string(k) + ".csv";
            io::write_csv(cfg.out_dir / sub / name, {"h", "fd_value", "adjoint_value", "rel_error"}, tables[k]);
            manifest.output(sub / name);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& r : tables[k]) best = std::min(best, r[3]);
            const bool pass = best <= kGradientTolerance;
            all_pass = all_pass && pass;
            summary.push_back({static_cast<double>(k), best, pass ? 1.0 : 0.0});
            std::cout << "direction " << k << ": min rel error " << num(best) << (pass ? "  PASS" : "  FAIL") << '\n';
        }
        io::write_csv(cfg.out_dir / sub / "gradient_summary.csv", {"direction", "min_rel_error", "passed"}, summary);
        manifest.output(sub / "gradient_summary.csv");
        runs.push_back({{"alpha", alpha}, {"adjoint", to_string(problem.adjoint)}, {"tolerance", kGradientTolerance}});
    }

    const auto levels = harness::adjoint_identity_study(cfg.nx, step_count(cfg), cfg.horizon, 2, cfg.alphas.front());
    std::vector<std::vector<double>> rows;
    for (const auto& l : levels) rows.push_back({static_cast<double>(l.cells), l.dt, l.lhs, l.rhs, l.gap});
    io::write_csv(cfg.out_dir / "identity_gap.csv", {"cells", "dt", "lhs", "rhs", "gap"}, rows);
    manifest.output("identity_gap.csv");
    const double order = harness::identity_orders(levels).front();
    std::cout << "continuous-adjoint identity gap order " << num(order) << (order >= 1.0 ? "  PASS" : "  FAIL") << '\n';
    all_pass = all_pass && order >= 1.0;
    manifest.results()["runs"] = runs;
    manifest.results()["identity_gap_order"] = order;
    manifest.results()["all_passed"] = all_pass;
    return all_pass ? 0 : 1;
}

// ---- reconstruct -------------------------------------------------------------

struct ReconSummary {
    double alpha = 0.0;
    PriorPair prior;
    double sigma = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string message;
    double cost = 0.0, misfit = 0.0, truth_misfit = 0.0, rel_error = 0.0;
};

ReconSummary reconstruct_one(const RunConfig& cfg, double alpha, std::vector<std::filesystem::path>& outputs) {
    const auto sub = alpha_dir(cfg, alpha);
    const StructuredMesh mesh(cfg.box, cfg.nx, cfg.ny);
    const WaveModel model(mesh, SurfaceSampler::circle(mesh, cfg.sigma_center, cfg.sigma_radius),
                          TimeGrid(cfg.dt, step_count(cfg)), physics_for(cfg, alpha), cfg.scheme, cfg.newmark,
                          cfg.formulation);
    const FieldFunction truth_fn = initial_function(cfg);
    const SyntheticData data = generate_data(model, truth_fn, cfg.fine_factor, cfg.noise_delta, cfg.seed);
    const PriorPair pp = cfg.prior_for(alpha);
    ReconProblem problem(model, data.noisy, NoiseModel{data.sigma},
                         BiLaplacianPrior(model.mass(), model.laplacian(), pp.gamma, pp.rho),
                         Vector::Zero(static_cast<Eigen::Index>(model.dofs())));
    problem.adjoint = cfg.adjoint.value_or(default_adjoint(model));

    const Vector truth = model.restrict_interior(interpolate(mesh, truth_fn));
    write_field_csv(cfg.out_dir / sub / "u0_true.csv", mesh, truth);
    outputs.push_back(sub / "u0_true.csv");

    auto iter_os = io::open_output(cfg.out_dir / sub / "iterations.csv");
    iter_os << "iteration,cost,misfit,gradient_norm,step\n";
    const MinimizeResult r = minimize(problem, Vector::Zero(static_cast<Eigen::Index>(model.dofs())), cfg.optimizer,
                                      [&](const IterationRecord& rec) {
                                          iter_os << rec.iteration << ',' << num(rec.cost) << ',' << num(rec.misfit)
                                                  << ',' << num(rec.gradient_norm) << ',' << num(rec.step) << '\n';
                                          iter_os.flush();
                                      });
    iter_os.close();
    outputs.push_back(sub / "iterations.csv");
    write_field_csv(cfg.out_dir / sub / "u0_rec.csv", mesh, r.u0);
    outputs.push_back(sub / "u0_rec.csv");
    if (cfg.write_vtk) {
        write_field_vtk(cfg.out_dir / sub / "u0_true.vtk", mesh, truth, "u0_true");
        write_field_vtk(cfg.out_dir / sub / "u0_rec.vtk", mesh, r.u0, "u0_rec");
        outputs.push_back(sub / "u0_true.vtk");
        outputs.push_back(sub / "u0_rec.vtk");
    }
    io::write_wide_series(cfg.out_dir / sub / "trace.csv", model.grid(), data.noisy.values, "sigma");
    outputs.push_back(sub / "trace.csv");
    io::write_wide_series(cfg.out_dir / sub / "trace_rec.csv", model.grid(), model.observe(r.u0), "sigma");
    outputs.push_back(sub / "trace_rec.csv");

    ReconSummary s;
    s.alpha = alpha;
    s.prior = pp;
    s.sigma = data.sigma;
    s.iterations = static_cast<int>(r.log.size()) - 1;
    s.converged = r.converged;
    s.message = r.message;
    s.cost = r.log.back().cost;
    s.misfit = r.log.back().misfit;
    s.truth_misfit = cost(problem, truth).misfit;
    const Vector e = r.u0 - truth;
    s.rel_error = std::sqrt(e.dot(kernels::spmv(model.mass(), e)) / truth.dot(kernels::spmv(model.mass(), truth)));
    return s;
}

int run_reconstruct(const RunConfig& cfg, Manifest& manifest) {
    const std::size_t count = cfg.alphas.size();
    std::vector<ReconSummary> summaries(count);
    std::vector<std::vector<std::filesystem::path>> outputs(count);
    std::vector<std::string> errors(count);
#pragma omp parallel for schedule(dynamic) if (count > 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            summaries[k] = reconstruct_one(cfg, cfg.alphas[k], outputs[k]);
        } catch (const std::exception& e) {
            errors[k] = "alpha " + num(cfg.alphas[k]) + ": " + e.what();
        }
    }
    for (const auto& o : outputs)
        for (const auto& p : o) manifest.output(p);
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error(e);

    std::vector<std::vector<double>> trend;
    json runs = json::array();
    for (const auto& s : summaries) {
        trend.push_back({s.alpha, s.prior.gamma, s.prior.rho, static_cast<double>(s.iterations), s.converged ? 1.0 : 0.0,
                         s.cost, s.misfit, s.truth_misfit, s.rel_error});
        runs.push_back({{"alpha", s.alpha},
                        {"gamma", s.prior.gamma},
                        {"rho", s.prior.rho},
                        {"noise_sigma", s.sigma},
                        {"iterations", s.iterations},
                        {"converged", s.converged},
                        {"message", s.message},
                        {"final_cost", s.cost},
                        {"final_misfit", s.misfit},
                        {"truth_misfit", s.truth_misfit},
                        {"rel_l2_error", s.rel_error}});
        std::cout << "alpha " << num(s.alpha) << ": " << s.iterations << " iterations (" << s.message << "), misfit "
                  << num(s.misfit) << " vs truth " << num(s.truth_misfit) << ", rel L2 error " << num(s.rel_error)
                  << '\n';
    }
    io::write_csv(cfg.out_dir / "alpha_trend.csv",
                  {"alpha", "gamma", "rho", "iterations", "converged", "final_cost", "final_misfit", "truth_misfit",
                   "rel_l2_error"},
                  trend);
    manifest.output("alpha_trend.csv");
    manifest.results()["runs"] = runs;
    return 0;
}

// ---- convergence --------------------------------------------------------------

constexpr double kMinOrder = 1.7;

int run_convergence(const RunConfig& cfg, Manifest& manifest) {
    std::vector<double> dts;
    for (int k = 0; k < cfg.levels; ++k) dts.push_back(cfg.dt / std::pow(2.0, k));
    bool all_pass = true;
    std::vector<std::vector<std::string>> summary_rows;
    json reports = json::array();
    for (const auto& name : cfg.families) {
        const harness::Family fam = harness::family_from_string(name);
        const auto rep = harness::convergence_study(fam, dts, cfg.scheme, cfg.horizon, cfg.nx);
        std::vector<std::vector<double>> rows;
        for (const auto& l : rep.levels) rows.push_back({l.dt, l.kinetic, l.potential, l.max_displacement});
        const std::string file = "convergence_" + name + ".csv";
        io::write_csv(cfg.out_dir / file, {"dt", "kinetic", "potential", "max_displacement"}, rows);
        manifest.output(file);
        const bool pass = rep.energy_order() >= kMinOrder;
        all_pass = all_pass && pass;
        std::cout << name << ": orders kinetic " << num(rep.order_kinetic) << ", potential " << num(rep.order_potential)
                  << ", max " << num(rep.order_max) << (pass ? "  PASS" : "  FAIL") << '\n';
        reports.push_back({{"family", name},
                           {"norm", rep.norm},
                           {"order_kinetic", rep.order_kinetic},
                           {"order_potential", rep.order_potential},
                           {"order_max", rep.order_max},
                           {"min_order", kMinOrder},
                           {"passed", pass}});
        summary_rows.push_back({name, num(rep.order_kinetic), num(rep.order_potential), num(rep.order_max),
                                pass ? "1" : "0"});
    }
    {
        auto os = io::open_output(cfg.out_dir / "convergence_summary.csv");
        os << "family,order_kinetic,order_potential,order_max,passed\n";
        for (const auto& r : summary_rows) os << join(r, ",") << '\n';
    }
    manifest.output("convergence_summary.csv");
    manifest.results()["families"] = reports;
    manifest.results()["all_passed"] = all_pass;
    return all_pass ? 0 : 1;
}

// ---- lemmas --------------------------------------------------------------------

int run_lemmas(const RunConfig& cfg, Manifest& manifest) {
    std::vector<harness::CheckResult> checks = harness::lemma_suite(cfg.trials, cfg.seed);
    for (auto& c : harness::coercivity_suite()) checks.push_back(std::move(c));
    checks.push_back(harness::three_stage_check());
    bool all_pass = true;
    auto os = io::open_output(cfg.out_dir / "lemmas.csv");
    os << "check,value,tolerance,passed\n";
    std::size_t width = 0;
    for (const auto& c : checks) width = std::max(width, c.name.size());
    for (const auto& c : checks) {
        all_pass = all_pass && c.passed;
        os << '"' << c.name << "\"," << num(c.value) << ',' << num(c.tolerance) << ',' << (c.passed ? 1 : 0) << '\n';
        std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << std::string(width - c.name.size() + 2, ' ')
                  << num(c.value) << " (tol " << num(c.tolerance) << ")\n";
    }
    os.close();
    manifest.output("lemmas.csv");
    manifest.results()["checks"] = checks.size();
    manifest.results()["all_passed"] = all_pass;
    return all_pass ? 0 : 1;
}

// ---- presets --------------------------------------------------------------------

void example_preset(RunConfig& cfg, int example) {
    cfg.nx = cfg.ny = 32;
    cfg.horizon = 1.0;
    cfg.dt = 0.2;
    cfg.alphas = {0.1, 0.5, 0.9};
    cfg.initial = "inclusion";
    switch (example) {
        case 1:
            cfg.inclusion = {{0.0, 0.55}, 0.15, 1.0};
            cfg.prior_table = {{0.1, {10.0, 0.03}}, {0.5, {10.0, 0.03}}, {0.9, {15.0, 0.1}}};
            break;
        case 2:
            cfg.inclusion = {{0.25, 0.25}, 0.15, 1.0};
            cfg.prior_table = {{0.1, {10.0, 0.01}}, {0.5, {15.0, 0.01}}, {0.9, {15.0, 0.01}}};
            break;
        default:
            cfg.inclusion = {{0.05, 0.05}, 0.15, 1.0};
            cfg.prior_table = {{kAllAlphas, {15.0, 0.1}}};
            break;
    }
}

}  // namespace

// ---- public API ------------------------------------------------------------------

const char* to_string(Subcommand s) noexcept {
    switch (s) {
        case Subcommand::Forward: return "forward";
        case Subcommand::OracleCompare: return "oracle-compare";
        case Subcommand::GradientCheck: return "gradient-check";
        case Subcommand::Reconstruct: return "reconstruct";
        case Subcommand::Convergence: return "convergence";
        case Subcommand::Lemmas: return "lemmas";
    }
    return "?";
}

Subcommand subcommand_from_string(const std::string& name) {
    for (auto s : {Subcommand::Forward, Subcommand::OracleCompare, Subcommand::GradientCheck, Subcommand::Reconstruct,
                   Subcommand::Convergence, Subcommand::Lemmas})
        if (name == to_string(s)) return s;
    throw ConfigError("unknown subcommand '" + name + "'");
}

PriorPair RunConfig::prior_for(double alpha) const {
    for (const auto& [key, pair] : prior_table)
        if (key != kAllAlphas && std::abs(key - alpha) <= 1e-12) return pair;
    if (auto it = prior_table.find(kAllAlphas); it != prior_table.end()) return it->second;
    throw ConfigError("no prior (gamma, rho) configured for alpha = " + num(alpha));
}

void RunConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(box.x1 > box.x0 && box.y1 > box.y0, "mesh.box: need x0 < x1 and y0 < y1");
    require(nx >= 1 && nx <= 4096, "mesh.nx = " + std::to_string(nx) + " outside the valid range [1, 4096]");
    require(ny >= 1 && ny <= 4096, "mesh.ny = " + std::to_string(ny) + " outside the valid range [1, 4096]");
    require(sigma_radius > 0.0, "sigma.radius must be positive");
    require(sigma_center.x - sigma_radius > box.x0 && sigma_center.x + sigma_radius < box.x1 &&
                sigma_center.y - sigma_radius > box.y0 && sigma_center.y + sigma_radius < box.y1,
            "sigma: the observation circle must lie strictly inside the box");
    require(horizon > 0.0, "time.horizon must be positive");
    require(dt > 0.0 && dt <= horizon, "time.dt = " + num(dt) + " outside the valid range (0, horizon]");
    const double steps = horizon / dt;
    require(std::abs(steps - std::round(steps)) <= 1e-9 * steps, "time.horizon must be an integer multiple of time.dt");
    require(!alphas.empty(), "physics.alpha: at least one value required");
    for (double a : alphas)
        require(a > 0.0 && a < 1.0, "physics.alpha = " + num(a) + " outside the valid range (0, 1)");
    require(c2 > 0.0, "physics.c2 = " + num(c2) + " outside the valid range (0, inf)");
    require(b >= 0.0, "physics.b = " + num(b) + " outside the valid range [0, inf)");
    try {
        newmark.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("discretization.newmark: ") + e.what());
    }
    for (const auto& [a, p] : prior_table) {
        require(a == kAllAlphas || (a > 0.0 && a < 1.0), "prior.table: alpha keys must lie in (0, 1)");
        require(p.gamma > 0.0 && p.rho >= 0.0, "prior: need gamma > 0 and rho >= 0");
    }
    if (subcommand == Subcommand::Reconstruct || subcommand == Subcommand::GradientCheck)
        for (double a : alphas) (void)prior_for(a);
    require(noise_delta > 0.0 && noise_delta < 1.0, "noise.delta = " + num(noise_delta) + " outside the valid range (0, 1)");
    require(fine_factor >= 2 && fine_factor <= 8, "data.fine_factor outside the valid range [2, 8]");
    require(initial == "mode" || initial == "inclusion", "initial.kind must be \"mode\" or \"inclusion\"");
    require(inclusion.radius > 0.0, "initial.inclusion.radius must be positive");
    require(optimizer.max_iterations >= 0, "optimizer.max_iterations must be nonnegative");
    require(optimizer.gradient_tolerance > 0.0 && optimizer.gradient_tolerance < 1.0,
            "optimizer.gradient_tolerance outside the valid range (0, 1)");
    require(optimizer.armijo > 0.0 && optimizer.armijo < 0.5, "optimizer.armijo outside the valid range (0, 0.5)");
    require(optimizer.backtrack > 0.0 && optimizer.backtrack < 1.0, "optimizer.backtrack outside the valid range (0, 1)");
    require(optimizer.max_backtracks >= 1, "optimizer.max_backtracks must be at least 1");
    require(optimizer.memory >= 1 && optimizer.memory <= 100, "optimizer.memory outside the valid range [1, 100]");
    for (double t : snapshots) {
        require(t >= 0.0 && t <= horizon * (1.0 + 1e-12), "output.snapshots: time " + num(t) + " outside [0, horizon]");
        require(std::abs(t / dt - std::round(t / dt)) <= 1e-9 * std::max(1.0, t / dt),
                "output.snapshots: time " + num(t) + " is not a multiple of dt");
    }
    require(levels >= 3 && levels <= 10, "convergence.levels = " + std::to_string(levels) + " outside the valid range [3, 10]");
    require(!families.empty(), "convergence.families: at least one family required");
    for (const auto& f : families) {
        try {
            (void)harness::family_from_string(f);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("convergence.families: ") + e.what());
        }
    }
    require(trials >= 1 && trials <= 100000, "lemmas.trials outside the valid range [1, 100000]");
    require(directions >= 1 && directions <= 100, "gradient_check.directions outside the valid range [1, 100]");
    if (adjoint == AdjointDiscretization::Consistent)
        require(scheme == Scheme::Galerkin && newmark.is_average_acceleration(),
                "adjoint = consistent needs scheme galerkin with beta = 1/4, gamma = 1/2");
}

json RunConfig::to_json() const {
    json table = json::array();
    for (const auto& [a, p] : prior_table)
        table.push_back({{"alpha", a == kAllAlphas ? json(nullptr) : json(a)}, {"gamma", p.gamma}, {"rho", p.rho}});
    return {
        {"subcommand", to_string(subcommand)},
        {"preset", preset},
        {"mesh", {{"box", {box.x0, box.y0, box.x1, box.y1}}, {"nx", nx}, {"ny", ny}}},
        {"sigma", {{"center", point_json(sigma_center)}, {"radius", sigma_radius}}},
        {"time", {{"horizon", horizon}, {"dt", dt}}},
        {"physics", {{"alpha", alphas}, {"c2", c2}, {"b", b}}},
        {"discretization",
         {{"scheme", fracwave::to_string(scheme)},
          {"formulation", fracwave::to_string(formulation)},
          {"forcing_rule", fracwave::to_string(forcing_rule)},
          {"newmark", {{"beta", newmark.beta}, {"gamma", newmark.gamma}}}}},
        {"prior", {{"table", table}}},
        {"noise", {{"delta", noise_delta}}},
        {"seed", seed},
        {"data", {{"fine_factor", fine_factor}}},
        {"initial",
         {{"kind", initial},
          {"inclusion",
           {{"center", point_json(inclusion.center)}, {"radius", inclusion.radius}, {"amplitude", inclusion.amplitude}}}}},
        {"optimizer",
         {{"kind", fracwave::to_string(optimizer.kind)},
          {"metric", fracwave::to_string(optimizer.metric)},
          {"max_iterations", optimizer.max_iterations},
          {"gradient_tolerance", optimizer.gradient_tolerance},
          {"armijo", optimizer.armijo},
          {"backtrack", optimizer.backtrack},
          {"max_backtracks", optimizer.max_backtracks},
          {"memory", optimizer.memory}}},
        {"adjoint", adjoint ? fracwave::to_string(*adjoint) : "auto"},
        {"output", {{"dir", out_dir.generic_string()}, {"snapshots", snapshots}, {"vtk", write_vtk}}},
        {"convergence", {{"levels", levels}, {"families", families}}},
        {"lemmas", {{"trials", trials}}},
        {"gradient_check", {{"directions", directions}}},
    };
}

std::vector<std::string> preset_names() {
    return {"default", "example-1", "example-2", "example-3", "single-mode", "gradient-check"};
}

std::string default_preset(Subcommand s) {
    switch (s) {
        case Subcommand::Forward:
        case Subcommand::OracleCompare:
        case Subcommand::Convergence: return "single-mode";
        case Subcommand::GradientCheck: return "gradient-check";
        case Subcommand::Reconstruct:
        case Subcommand::Lemmas: return "default";
    }
    return "default";
}

void apply_preset(RunConfig& cfg, const std::string& name) {
    const Subcommand sub = cfg.subcommand;
    const auto out = cfg.out_dir;
    if (name == "default") {
        cfg = RunConfig{};
    } else if (name == "example-1" || name == "example-2" || name == "example-3") {
        cfg = RunConfig{};
        example_preset(cfg, name.back() - '0');
    } else if (name == "single-mode") {
        cfg = RunConfig{};
        const auto coef = oracle::unit_square_mode_coefficients();
        cfg.box = {0.0, 0.0, 1.0, 1.0};
        cfg.nx = cfg.ny = 32;
        cfg.sigma_center = {0.5, 0.5};
        cfg.sigma_radius = 0.3;
        cfg.horizon = 4.0;
        cfg.dt = 0.08;
        cfg.c2 = coef.c2;
        cfg.b = coef.b;
        cfg.initial = "mode";
        cfg.snapshots = {0.0, 0.8, 1.6, 2.4, 3.2, 4.0};
    } else if (name == "gradient-check") {
        cfg = RunConfig{};
        cfg.nx = cfg.ny = 8;
        cfg.dt = 0.05;
    } else {
        throw ConfigError("unknown preset '" + name + "' (available: " + join(preset_names()) + ")");
    }
    cfg.subcommand = sub;
    cfg.preset = name;
    cfg.out_dir = out;
}

void apply_json(RunConfig& cfg, const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    std::vector<std::string> unknown;
    // Calls handle(key, value, path) for every member; false marks the key unknown.
    auto section = [&](const json& obj, const std::string& path, auto&& handle) {
        if (!obj.is_object()) throw ConfigError(path + ": expected an object");
        for (const auto& [k, v] : obj.items())
            if (!handle(k, v, path + "." + k)) unknown.push_back(path + "." + k);
    };
    for (const auto& [key, v] : doc.items()) {
        const std::string& p = key;
        if (key == "preset") {
            cfg.preset = read_string(v, p);
        } else if (key == "subcommand") {
            if (read_string(v, p) != to_string(cfg.subcommand))
                throw ConfigError("subcommand: config is for '" + v.get<std::string>() + "', running '" +
                                  to_string(cfg.subcommand) + "'");
        } else if (key == "mesh") {
            section(v, p, [&](const std::string& k, const json& x, const std::string& q) {
                if (k == "box") {
                    const auto b = read_numbers(x, q);
                    if (b.size() != 4) throw ConfigError(q + ": expected [x0, y0, x1, y1]");
                    cfg.box = {b[0], b[1], b[2], b[3]};
                } else if (k == "nx") {
                    cfg.nx = read_int(x, q);
                } else if (k == "ny") {
                    cfg.ny = read_int(x, q);
                } else {
                    return false;
                }
                return true;
            });
        } else if (key == "sigma") {
            section(v, p, [&](const std::string& k, const json& x, const std::string& q) {
                if (k == "center") cfg.sigma_center = read_point(x, q);
                else if (k == "radius") cfg.sigma_radius = read_number(x, q);
                else return false;
                return true;
            });
        } else if (key == "time") {
            section(v, p, [&](const std::string& k, const json& x, const std::string& q) {
                if (k == "horizon") cfg.horizon = read_number(x, q);
                else if (k == "dt") cfg.dt = read_number(x, q);
                else return false;
                return true;
            });
        } else if (key == "physics") {
            section(v, p, [&](const std::string& k, const json& x, const std::string& q) {
                if (k == "alpha") cfg.alphas = read_numbers(x, q);
                else if (k == "c2") cfg.c2 = read_number(x, q);
                else if (k == "b") cfg.b = read_number(x, q);
                else return false;
                return true;
            });
        } else if (key == "discretization") {
            section(v, p, [&](const std::string& k, const json& x, const std::string& q) {
                if (k == "scheme") {
                    cfg.scheme = parse_enum(scheme_from_string, x, q);
                } else if (k == "formulation") {
                    cfg.formulation = parse_enum(formulation_from_string, x, q);
                } else if (k == "forcing_rule") {
                    cfg.forcing_rule = parse_enum(forcing_rule_from_string, x, q);
                } else if (k == "newmark") {
                    section(x, q, [&](const std::string& kk, const json& y, const std::string& qq) {
                        if (kk == "beta") cfg.newmark.beta = read_number(y, qq);
                        else if (kk == "gamma") cfg.newmark.gamma = read_number(y, qq);
                        else return false;
                        return true;
                    });
                } else {
                    return false;
                }
                return true;
            });
        } else if (key == "prior") {
            if (!v.is_object()) throw ConfigError(p + ": expected an object");
            if (v.contains("table")) {
                std::map<double, PriorPair> table;
                const json& t = v["table"];
                if (!t.is_array()) throw ConfigError(p + ".table: expected an array");
                for (std::size_t i = 0; i < t.size(); ++i) {
                    const std::string q = p + ".table[" + std::to_string(i) + "]";
                    double a = kAllAlphas;
                    PriorPair pp;
                    section(t[i], q, [&](const std::string& k, const json& x, const std::string& qq) {
                        if (k == "alpha") a = x.is_null() ? kAllAlphas : read_number(x, qq);
                        else if (k == "gamma") pp.gamma = read_number(x, qq);
                        else if (k == "rho") pp.rho = read_number(x, qq);
                        else return false;
                        return true;
                    });
                    table[a] = pp;
                }
                cfg.prior_table = table;
                for (const auto& [k, x] : v.items())
                    if (k != "table") unknown.push_back(p + "." + k + " (not allowed together with table)");
            } else {
                PriorPair pp;
                section(v, p, [&](const std::string& k, const json& x, const std::string& q) {
                    if (k == "gamma") pp.gamma = read_number(x, q);
                    else if (k == "rho") pp.rho = read_number(x, q);
                    else return false;
                    return true;
                });
                cfg.prior_table = {{kAllAlphas, pp}};
            }
        } else if (key == "noise") {
            section(v, p, [&](const std::string& k, const json& x, const std::string& q) {
                if (k == "delta") cfg.noise_delta = read_number(x, q);
                else if (k == "seed") cfg.seed = read_seed(x, q);
                else return false;
                return true;
            });
        } else if (key == "seed") {
            cfg.seed = read_seed(v, p);
        } else if (key == "data") {
            section(v, p, [&](const std::string& k, const json& x, const std::string& q) {
                if (k == "fine_factor") cfg.fine_factor = read_int(x, q);
                else return false;
                return true;
            });
        } else if (key == "initial") {
            section(v, p, [&](const std::string& k, const json& x, const std::string& q) {
                if (k == "kind") {
                    cfg.initial = read_string(x, q);
                } else if (k == "inclusion") {
                    section(x, q, [&](const std::string& kk, const json& y, const std::string& qq) {
                        if (kk == "center") cfg.inclusion.center = read_point(y, qq);
                        else if (kk == "radius") cfg.inclusion.radius = read_number(y, qq);
                        else if (kk == "amplitude") cfg.inclusion.amplitude = read_number(y, qq);
                        else return false;
                        return true;
                    });
                } else {
                    return false;
                }
                return true;
            });
        } else if (key == "optimizer") {
            section(v, p, [&](const std::string& k, const json& x, const std::string& q) {
                auto& o = cfg.optimizer;
                if (k == "kind") o.kind = parse_enum(optimizer_from_string, x, q);
                else if (k == "metric") o.metric = parse_enum(metric_from_string, x, q);
                else if (k == "max_iterations") o.max_iterations = read_int(x, q);
                else if (k == "gradient_tolerance") o.gradient_tolerance = read_number(x, q);
                else if (k == "armijo") o.armijo = read_number(x, q);
                else if (k == "backtrack") o.backtrack = read_number(x, q);
                else if (k == "max_backtracks") o.max_backtracks = read_int(x, q);
                else if (k == "memory") o.memory = read_int(x, q);
                else return false;
                return true;
            });
        } else if (key == "adjoint") {
            const std::string s = read_string(v, p);
            if (s == "auto") cfg.adjoint.reset();
            else cfg.adjoint = parse_enum(adjoint_discretization_from_string, v, p);
        } else if (key == "output") {
            section(v, p, [&](const std::string& k, const json& x, const std::string& q) {
                if (k == "dir") cfg.out_dir = read_string(x, q);
                else if (k == "snapshots") cfg.snapshots = read_numbers(x, q);
                else if (k == "vtk") cfg.write_vtk = read_bool(x, q);
                else return false;
                return true;
            });
        } else if (key == "convergence") {
            section(v, p, [&](const std::string& k, const json& x, const std::string& q) {
                if (k == "levels") {
                    cfg.levels = read_int(x, q);
                } else if (k == "families") {
                    if (!x.is_array()) throw ConfigError(q + ": expected an array of names");
                    cfg.families.clear();
                    for (std::size_t i = 0; i < x.size(); ++i)
                        cfg.families.push_back(read_string(x[i], q + "[" + std::to_string(i) + "]"));
                } else {
                    return false;
                }
                return true;
            });
        } else if (key == "lemmas") {
            section(v, p, [&](const std::string& k, const json& x, const std::string& q) {
                if (k == "trials") cfg.trials = read_int(x, q);
                else return false;
                return true;
            });
        } else if (key == "gradient_check") {
            section(v, p, [&](const std::string& k, const json& x, const std::string& q) {
                if (k == "directions") cfg.directions = read_int(x, q);
                else return false;
                return true;
            });
        } else {
            unknown.push_back(key);
        }
    }
    if (!unknown.empty()) throw ConfigError("unknown config keys: " + join(unknown));
}

RunConfig parse_config(Subcommand sub, const FlagOverrides& flags) {
    json doc = json::object();
    if (flags.config) {
        std::ifstream is(*flags.config);
        if (!is) throw ConfigError("cannot read config file " + flags.config->string());
        try {
            doc = json::parse(is);
        } catch (const json::parse_error& e) {
            throw ConfigError("config file " + flags.config->string() + ": " + e.what());
        }
        if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    }
    std::string preset = default_preset(sub);
    if (flags.preset) preset = *flags.preset;
    else if (doc.contains("preset")) preset = read_string(doc["preset"], "preset");

    RunConfig cfg;
    cfg.subcommand = sub;
    apply_preset(cfg, preset);
    apply_json(cfg, doc);
    if (flags.out) cfg.out_dir = *flags.out;
    if (flags.alpha) cfg.alphas = {*flags.alpha};
    if (flags.dt) cfg.dt = *flags.dt;
    if (flags.horizon) cfg.horizon = *flags.horizon;
    if (flags.levels) cfg.levels = *flags.levels;
    if (flags.trials) cfg.trials = *flags.trials;
    if (flags.seed) cfg.seed = *flags.seed;
    cfg.validate();
    return cfg;
}

int run(const RunConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    std::filesystem::create_directories(cfg.out_dir);
    Manifest manifest(cfg);
    try {
        int status = 0;
        switch (cfg.subcommand) {
            case Subcommand::Forward: status = run_forward_cmd(cfg, manifest); break;
            case Subcommand::OracleCompare: status = run_oracle_compare(cfg, manifest); break;
            case Subcommand::GradientCheck: status = run_gradient_check(cfg, manifest); break;
            case Subcommand::Reconstruct: status = run_reconstruct(cfg, manifest); break;
            case Subcommand::Convergence: status = run_convergence(cfg, manifest); break;
            case Subcommand::Lemmas: status = run_lemmas(cfg, manifest); break;
        }
        manifest.finish(status == 0 ? "ok" : "checks-failed", elapsed());
        return status;
    } catch (const SolveError& e) {
        manifest.fail("solve", e.what(), e.step(), elapsed());
        std::cerr << "error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        manifest.fail("runtime", e.what(), -1, elapsed());
        std::cerr << "error: " << e.what() << '\n';
    }
    return 3;
}

int main(int argc, char** argv) {
    try {
        kernels::configure_threads_from_env();
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    CLI::App app{"Fractionally damped wave equation: forward solves, checks and reconstructions"};
    app.require_subcommand(1);
    FlagOverrides flags;
    std::string config, out, preset;
    double alpha = 0.0, dt = 0.0, horizon = 0.0;
    int levels = 0, trials = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<Subcommand, CLI::App*>> subs;
    for (auto s : {Subcommand::Forward, Subcommand::OracleCompare, Subcommand::GradientCheck, Subcommand::Reconstruct,
                   Subcommand::Convergence, Subcommand::Lemmas}) {
        CLI::App* c = app.add_subcommand(to_string(s));
        c->add_option("--config", config, "JSON config file");
        c->add_option("--out", out, "output directory");
        c->add_option("--preset", preset, "named preset (" + join(preset_names()) + ")");
        c->add_option("--alpha", alpha, "fractional order in (0, 1)");
        c->add_option("--dt", dt, "time step");
        c->add_option("--T,--horizon", horizon, "final time");
        c->add_option("--levels", levels, "refinement levels");
        c->add_option("--trials", trials, "random sequences per lemma");
        c->add_option("--seed", seed, "random seed");
        subs.emplace_back(s, c);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    for (const auto& [s, c] : subs) {
        if (!c->parsed()) continue;
        auto given = [c](const char* name) { return c->count(name) > 0; };
        if (given("--config")) flags.config = config;
        if (given("--out")) flags.out = out;
        if (given("--preset")) flags.preset = preset;
        if (given("--alpha")) flags.alpha = alpha;
        if (given("--dt")) flags.dt = dt;
        if (given("--T")) flags.horizon = horizon;
        if (given("--levels")) flags.levels = levels;
        if (given("--trials")) flags.trials = trials;
        if (given("--seed")) flags.seed = seed;
        try {
            return run(parse_config(s, flags));
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return 2;
        }
    }
    return 2;
}

}  // namespace fracwave::cli
