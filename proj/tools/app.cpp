#include "app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "cli_config.hpp"
#include "sstokes/projection.hpp"
#include "sstokes/semigroup_checks.hpp"
#include "svg_plot.hpp"

namespace sstokes::cli {

namespace {

namespace fs = std::filesystem;

struct Flags {
    std::string config_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> values;
    std::map<std::string, std::vector<CLI::Option*>> options;
    int levels = 0;
    bool show_config = false;
    bool resume = false;
};

// Flag spelling of a configuration key.
std::string flag_for(const std::string& key)
{
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    return flag;
}

void add_common_options(CLI::App& sub, Flags& flags)
{
    sub.add_option("--config", flags.config_path, "key=value configuration file")->check(CLI::ExistingFile);
    sub.add_option("--set", flags.sets, "override as key=value (repeatable)");
    for (const auto& key : config_keys()) {
        flags.options[key].push_back(sub.add_option(flag_for(key), flags.values[key], "override '" + key + "'"));
    }
    sub.add_option("--levels", flags.levels, "keep only the first K tested levels")->check(CLI::PositiveNumber);
    sub.add_flag("--show-config", flags.show_config, "print the effective configuration and exit");
    sub.add_flag("--resume", flags.resume, "reuse completed samples from an earlier run");
}

KeyValues flag_layer(const Flags& flags)
{
    KeyValues kv;
    for (const auto& item : flags.sets) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw UsageError("--set expects key=value, got '" + item + "'");
        }
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    for (const auto& [key, options] : flags.options) {
        for (const CLI::Option* option : options) {
            if (option->count() > 0) {
                kv[key] = flags.values.at(key);
            }
        }
    }
    return kv;
}

std::string path_in(const Settings& s, const std::string& name)
{
    return (fs::path(s.out_dir) / name).string();
}

void print_table(std::ostream& out, const ConvergenceTable& table)
{
    for (const auto& r : table.rows) {
        out << "level case=" << r.case_label << " n=" << r.n << " tau=" << format_double(r.tau) << " M=" << r.samples
            << " rms_u=" << format_double(std::sqrt(r.err_u_ms)) << " rms_pint=" << format_double(std::sqrt(r.err_pint_ms))
            << '\n';
    }
    for (const auto& s : table.slopes) {
        out << "slope " << s.quantity << '=' << format_double(s.slope) << " residual=" << format_double(s.residual)
            << '\n';
    }
    for (const auto& w : table.warnings) {
        out << "warning " << w << '\n';
    }
}

ConvergenceTable run_study(const Settings& s, const ExperimentConfig& config, const std::string& prefix,
                           bool resume)
{
    const std::string samples = path_in(s, prefix + "_samples.csv");
    if (!resume) {
        fs::remove(samples);
    }
    StudyOptions options;
    options.sample_file = samples;
    StudyResult result = run_convergence_study(config, options);
    persist_results(result.table, path_in(s, prefix + "_results.csv"), path_in(s, prefix + "_slopes.csv"));
    return std::move(result.table);
}

void add_series(LogLogPlot& plot, const ConvergenceTable& table, RefinementAxis axis, const std::string& suffix)
{
    PlotSeries u{"velocity" + suffix, {}, {}};
    PlotSeries p{"pressure integral" + suffix, {}, {}};
    for (const auto& r : table.rows) {
        const double x = axis == RefinementAxis::Time ? r.tau : r.h;
        u.x.push_back(x);
        u.y.push_back(std::sqrt(r.err_u_ms));
        p.x.push_back(x);
        p.y.push_back(std::sqrt(r.err_pint_ms));
    }
    plot.series.push_back(std::move(u));
    plot.series.push_back(std::move(p));
}

int converge(const Settings& s, RefinementAxis axis, bool resume, std::ostream& out)
{
    const bool time = axis == RefinementAxis::Time;
    const std::string prefix = time ? "time" : "space";
    const ExperimentConfig config = experiment_config(s, s.cases.front(), axis);
    const ConvergenceTable table = run_study(s, config, prefix, resume);
    print_table(out, table);

    LogLogPlot plot;
    plot.title = std::string(time ? "Temporal" : "Spatial") + " convergence, case " + s.cases.front();
    plot.x_label = time ? "tau" : "h";
    plot.y_label = "RMS error at T";
    add_series(plot, table, axis, "");
    write_svg(plot, path_in(s, prefix + "_convergence.svg"));
    return kExitOk;
}

int case_compare(const Settings& s, bool resume, std::ostream& out)
{
    ConvergenceTable combined;
    LogLogPlot plot;
    plot.title = "Spatial convergence by noise case";
    plot.x_label = "h";
    plot.y_label = "RMS error at T";
    std::map<std::string, double> velocity_slopes;
    for (const auto& label : s.cases) {
        const ExperimentConfig config = experiment_config(s, label, RefinementAxis::Space);
        const ConvergenceTable table = run_study(s, config, "case_compare_" + label, resume);
        combined.rows.insert(combined.rows.end(), table.rows.begin(), table.rows.end());
        for (auto slope : table.slopes) {
            if (slope.quantity == "velocity") {
                velocity_slopes[label] = slope.slope;
            }
            slope.quantity = label + ":" + slope.quantity;
            combined.slopes.push_back(slope);
        }
        for (const auto& w : table.warnings) {
            combined.warnings.push_back(label + ": " + w);
        }
        add_series(plot, table, RefinementAxis::Space, " (" + label + ")");
    }
    persist_results(combined, path_in(s, "case_compare_results.csv"), path_in(s, "case_compare_slopes.csv"));
    write_svg(plot, path_in(s, "case_compare_convergence.svg"));
    print_table(out, combined);
    if (velocity_slopes.count("I")) {
        for (const auto& [label, slope] : velocity_slopes) {
            if (label != "I") {
                out << "slope_drop velocity I-" << label << '=' << format_double(velocity_slopes["I"] - slope) << '\n';
            }
        }
    }
    return kExitOk;
}

int deterministic(const Settings& s, bool resume, std::ostream& out)
{
    for (const RefinementAxis axis : {RefinementAxis::Space, RefinementAxis::Time}) {
        const bool time = axis == RefinementAxis::Time;
        const std::string prefix = time ? "deterministic_time" : "deterministic_space";
        const ConvergenceTable table = run_study(s, experiment_config(s, s.cases.front(), axis), prefix, resume);
        out << (time ? "# time refinement\n" : "# space refinement\n");
        print_table(out, table);
        LogLogPlot plot;
        plot.title = std::string("Zero-noise ") + (time ? "temporal" : "spatial") + " self-convergence";
        plot.x_label = time ? "tau" : "h";
        plot.y_label = "error at T";
        add_series(plot, table, axis, "");
        write_svg(plot, path_in(s, prefix + "_convergence.svg"));
    }
    return kExitOk;
}

int stability(const Settings& s, std::ostream& out)
{
    const ExperimentConfig config = experiment_config(s, s.cases.front(), RefinementAxis::Time);
    const StabilityTable table = stability_audit(config);
    persist_stability(table, path_in(s, "stability.csv"));
    std::ofstream report(path_in(s, "stability_report.txt"), std::ios::trunc);
    for (const auto& r : table.rows) {
        out << "tau=" << format_double(r.tau) << " max_l2_sq=" << format_double(r.max_l2_sq)
            << " sum_increment_sq=" << format_double(r.sum_increment_sq)
            << " tau_sum_h1_sq=" << format_double(r.tau_sum_h1_sq) << '\n';
    }
    for (std::size_t i = 0; i < table.ratios.size(); ++i) {
        report << "ratio" << i << '=' << format_double(table.ratios[i]) << '\n';
        out << "ratio" << i << '=' << format_double(table.ratios[i]) << '\n';
    }
    report << "passed=" << (table.passed ? "true" : "false") << '\n';
    out << "passed=" << (table.passed ? "true" : "false") << '\n';
    return kExitOk;
}

int semigroup_check(const Settings& s, std::ostream& out)
{
    std::vector<InequalityReport> reports;
    const auto grid = standard_lambda_grid();
    for (double tau : s.tau_list) {
        const int steps = exact_ratio(s.final_time, tau, "tau_list");
        for (double gamma : {0.0, 0.5, 1.0}) {
            reports.push_back(check_rational_stability(gamma, tau, grid, steps));
        }
        reports.push_back(check_Fn_bounds(tau, grid, steps));
    }
    reports.push_back(check_projection_stability(s.n_list, s.samples, s.base_seed));

    auto mesh = std::make_shared<const Mesh>(s.ref_n);
    auto space = std::make_shared<const MiniSpace>(mesh);
    auto ops = std::make_shared<const AssembledOperators>(assemble_operators(space));
    std::mt19937_64 rng(s.base_seed);
    std::uniform_real_distribution<double> coefficient(-1.0, 1.0);
    Eigen::VectorXd c(space->num_velocity_dofs());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        c[i] = coefficient(rng);
    }
    const FEFunction v = project_Xh(ops, FEFunction(space, Role::Velocity, c));
    reports.push_back(
        check_discrete_energy_decay(ops, s.ref_tau, v, exact_ratio(s.final_time, s.ref_tau, "ref_tau")));

    fs::create_directories(s.out_dir);
    std::ofstream report(path_in(s, "semigroup_report.txt"), std::ios::trunc);
    bool all = true;
    for (const auto& r : reports) {
        report << r.to_text() << '\n';
        out << "check " << r.name << " constant=" << format_double(r.constant)
            << " threshold=" << format_double(r.threshold) << " passed=" << (r.passed ? "true" : "false") << '\n';
        all = all && r.passed;
    }
    out << "all_passed=" << (all ? "true" : "false") << '\n';
    return kExitOk;
}

int single_run(const Settings& s, std::ostream& out)
{
    const std::string& label = s.cases.front();
    auto mesh = std::make_shared<const Mesh>(s.n_list.front());
    auto space = std::make_shared<const MiniSpace>(mesh);
    auto ops = std::make_shared<const AssembledOperators>(assemble_operators(space));
    const double tau = s.tau_list.front();
    const StepSystem system(ops, tau);
    const NoiseModel noise(effective_r(s, label), effective_truncation(s, label), s.basis, mesh);
    const int steps = exact_ratio(s.final_time, tau, "tau_list");
    const BrownianTableau path(noise.truncation(), tau, steps, s.base_seed, 0);

    std::vector<double> l2_sq;
    TrajectoryOptions options;
    options.observer = [&](const StepRecord& rec) { l2_sq.push_back(rec.u->dot(ops->mass * *rec.u)); };
    const Trajectory traj = run_trajectory(system, noise, s.final_time, constant_source({1.0, 1.0}), path, options);

    fs::create_directories(s.out_dir);
    std::ofstream csv(path_in(s, "single_run.csv"), std::ios::trunc);
    csv << "step,time,l2_sq,energy_residual,divergence_residual\n";
    for (int n = 0; n < traj.num_steps; ++n) {
        const auto k = static_cast<std::size_t>(n);
        csv << n + 1 << ',' << format_double((n + 1) * tau) << ',' << format_double(l2_sq[k]) << ','
            << format_double(traj.energy_residuals[k]) << ',' << format_double(traj.divergence_residuals[k]) << '\n';
    }
    const FEFunction u(space, Role::Velocity, traj.final_velocity());
    out << "steps=" << traj.num_steps << '\n'
        << "final_l2=" << format_double(norm(u, *ops, NormKind::L2)) << '\n'
        << "max_l2_sq=" << format_double(traj.max_l2_sq) << '\n'
        << "sum_increment_sq=" << format_double(traj.sum_increment_sq) << '\n'
        << "tau_sum_h1_sq=" << format_double(traj.tau_sum_h1_sq) << '\n'
        << "max_energy_residual="
        << format_double(*std::max_element(traj.energy_residuals.begin(), traj.energy_residuals.end())) << '\n'
        << "max_divergence_residual="
        << format_double(*std::max_element(traj.divergence_residuals.begin(), traj.divergence_residuals.end()))
        << '\n';
    return kExitOk;
}

void diagnose(std::ostream& err, const char* kind, const std::string& message)
{
    std::string flat = message;
    std::replace(flat.begin(), flat.end(), '\n', ' ');
    std::replace(flat.begin(), flat.end(), '"', '\'');
    err << "sstokes: error kind=" << kind << " message=\"" << flat << "\"\n";
}

}  // namespace

int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Stochastic Stokes solver and Monte Carlo convergence harness", "sstokes"};
    app.require_subcommand(0, 1);
    Flags flags;
    app.add_flag("--show-config", flags.show_config, "print the default configuration and exit");

    const std::vector<std::pair<Command, const char*>> commands{
        {Command::ConvergeTime, "temporal strong convergence study"},
        {Command::ConvergeSpace, "spatial strong convergence study"},
        {Command::CaseCompare, "spatial study for several noise cases"},
        {Command::Deterministic, "zero-noise self-convergence in space and time"},
        {Command::Stability, "energy-bound audit under step halving"},
        {Command::SemigroupCheck, "discrete semigroup and projection inequality audits"},
        {Command::SingleRun, "one trajectory with per-step diagnostics"},
    };
    for (const auto& [command, description] : commands) {
        add_common_options(*app.add_subcommand(command_name(command), description), flags);
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        diagnose(err, "usage", e.what());
        return kExitConfig;
    }

    try {
        const auto chosen = app.get_subcommands();
        const Command command = chosen.empty() ? Command::ConvergeTime : parse_command(chosen.front()->get_name());
        std::vector<KeyValues> layers{default_settings(command)};
        if (!flags.config_path.empty()) {
            layers.push_back(read_config_file(flags.config_path));
        }
        layers.push_back(flag_layer(flags));
        Settings settings = resolve_settings(command, merge_settings(layers));
        if (flags.levels > 0) {
            truncate_levels(settings, flags.levels);
        }
        if (flags.show_config) {
            out << show_config(settings);
            return kExitOk;
        }
        if (chosen.empty()) {
            diagnose(err, "usage", "a subcommand is required (see --help)");
            return kExitConfig;
        }
        switch (command) {
        case Command::ConvergeTime:
            return converge(settings, RefinementAxis::Time, flags.resume, out);
        case Command::ConvergeSpace:
            return converge(settings, RefinementAxis::Space, flags.resume, out);
        case Command::CaseCompare:
            return case_compare(settings, flags.resume, out);
        case Command::Deterministic:
            return deterministic(settings, flags.resume, out);
        case Command::Stability:
            return stability(settings, out);
        case Command::SemigroupCheck:
            return semigroup_check(settings, out);
        case Command::SingleRun:
            return single_run(settings, out);
        }
    } catch (const ParseError& e) {
        diagnose(err, "config", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        diagnose(err, "config", e.what());
        return kExitConfig;
    } catch (const NumericalError& e) {
        diagnose(err, "numerical", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        diagnose(err, "runtime", e.what());
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace sstokes::cli
