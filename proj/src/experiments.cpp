#include "sstokes/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>
#include <utility>

namespace sstokes {

ParseError::ParseError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
{
}

std::string to_string(StudyKind kind)
{
    switch (kind) {
    case StudyKind::Time:
        return "time";
    case StudyKind::Space:
        return "space";
    case StudyKind::CaseCompare:
        return "case-compare";
    case StudyKind::Deterministic:
        return "deterministic";
    case StudyKind::Stability:
        return "stability";
    }
    return "unknown";
}

double case_regularity(const std::string& label)
{
    if (label == "I") {
        return 2.0;
    }
    if (label == "II") {
        return 1.0;
    }
    if (label == "III") {
        return 0.5;
    }
    throw UsageError("unknown case '" + label + "' (expected I, II or III)");
}

std::vector<Level> study_levels(const ExperimentConfig& config)
{
    std::vector<Level> levels;
    if (config.axis == RefinementAxis::Time) {
        if (config.n_list.size() != 1) {
            throw UsageError("a time-refinement study takes exactly one mesh size in n_list");
        }
        for (double tau : config.tau_list) {
            levels.push_back({config.n_list.front(), tau});
        }
    } else {
        if (config.tau_list.size() != 1) {
            throw UsageError("a space-refinement study takes exactly one step in tau_list");
        }
        for (int n : config.n_list) {
            levels.push_back({n, config.tau_list.front()});
        }
    }
    return levels;
}

void validate_config(const ExperimentConfig& config, bool strict)
{
    if (config.samples < 1) {
        throw UsageError("samples must be at least 1");
    }
    if (!(config.final_time > 0.0) || !std::isfinite(config.final_time)) {
        throw UsageError("final time T must be positive");
    }
    if (!(config.r > 0.0 && config.r <= 2.0)) {
        throw UsageError("noise regularity r must lie in (0, 2]");
    }
    if (config.truncation < 1) {
        throw UsageError("truncation L must be at least 1");
    }
    if (config.n_list.empty() || config.tau_list.empty()) {
        throw UsageError("n_list and tau_list must be non-empty");
    }
    if (config.ref_n < 1) {
        throw UsageError("ref_n must be at least 1");
    }
    exact_ratio(config.final_time, config.ref_tau, "ref_tau");
    for (const Level& level : study_levels(config)) {
        if (level.n < 1) {
            throw UsageError("mesh sizes must be at least 1");
        }
        if (config.ref_n % level.n != 0) {
            throw UsageError("n=" + std::to_string(level.n) + " does not divide ref_n=" + std::to_string(config.ref_n));
        }
        exact_ratio(config.final_time, level.tau, "tau_list");
        exact_ratio(level.tau, config.ref_tau, "tau_list vs ref_tau");
        if (strict && level.n == config.ref_n && level.tau == config.ref_tau) {
            throw UsageError("the reference must be strictly finer than every tested level");
        }
    }
}

// ---------------------------------------------------------------------------
// Study context

struct StudyContext::Spatial {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const MiniSpace> space;
    std::shared_ptr<const AssembledOperators> ops;
    std::unique_ptr<NoiseModel> noise;
    std::unique_ptr<QuadratureTransfer> to_reference;
};

struct StudyContext::Discretization {
    Level level;
    const Spatial* spatial = nullptr;
    std::unique_ptr<StepSystem> system;
};

struct StudyContext::Evaluated {
    Eigen::MatrixXd velocity;
    Eigen::MatrixXd pressure_integral;
};

StudyContext::StudyContext(ExperimentConfig config) : config_(std::move(config))
{
    validate_config(config_, false);
    levels_ = study_levels(config_);
    const auto reference_mesh = std::make_shared<const Mesh>(config_.ref_n);

    auto build = [&](Level level) {
        auto d = std::make_unique<Discretization>();
        d->level = level;
        auto& slot = spatial_[level.n];
        if (!slot) {
            slot = std::make_unique<Spatial>();
            slot->mesh = level.n == config_.ref_n ? reference_mesh : std::make_shared<const Mesh>(level.n);
            slot->space = std::make_shared<const MiniSpace>(slot->mesh);
            slot->ops = std::make_shared<const AssembledOperators>(assemble_operators(slot->space));
            slot->noise = std::make_unique<NoiseModel>(config_.r, config_.truncation, config_.basis, slot->mesh,
                                                       config_.zero_noise);
            slot->to_reference = std::make_unique<QuadratureTransfer>(slot->space, reference_mesh);
        }
        d->spatial = slot.get();
        d->system = build_step_system(slot->ops, level.tau);
        return d;
    };

    reference_ = build(reference());
    for (const Level& level : levels_) {
        discretizations_.push_back(build(level));
    }
}

StudyContext::~StudyContext() = default;

BrownianTableau StudyContext::tableau(std::uint64_t sample_index) const
{
    const int fine_steps = exact_ratio(config_.final_time, config_.ref_tau, "ref_tau");
    return BrownianTableau(config_.truncation, config_.ref_tau, fine_steps, config_.base_seed, sample_index);
}

StudyContext::Evaluated StudyContext::evaluate(const Discretization& d, const BrownianTableau& tableau) const
{
    const Spatial& s = *d.spatial;
    Trajectory traj =
        run_trajectory(*d.system, *s.noise, config_.final_time, constant_source(config_.source), tableau);
    Evaluated out;
    out.velocity = s.to_reference->evaluate(FEFunction(s.space, Role::Velocity, traj.final_velocity()));
    out.pressure_integral =
        s.to_reference->evaluate(FEFunction(s.space, Role::Pressure, std::move(traj.pressure_integral)));
    return out;
}

std::vector<SampleErrors> StudyContext::run_sample(std::uint64_t sample_index) const
{
    const BrownianTableau path = tableau(sample_index);
    const Evaluated ref = evaluate(*reference_, path);
    const Eigen::VectorXd& w = reference_->spatial->to_reference->weights();

    std::vector<SampleErrors> errors;
    errors.reserve(discretizations_.size());
    for (const auto& d : discretizations_) {
        const Evaluated coarse = evaluate(*d, path);
        errors.push_back({weighted_l2_distance_sq(w, ref.velocity, coarse.velocity),
                          weighted_l2_distance_sq(w, ref.pressure_integral, coarse.pressure_integral)});
    }
    return errors;
}

SampleErrors StudyContext::run_level(int level, std::uint64_t sample_index) const
{
    if (level < 0 || level >= num_levels()) {
        throw UsageError("level index " + std::to_string(level) + " out of range");
    }
    const Discretization& d = *discretizations_[static_cast<std::size_t>(level)];
    const BrownianTableau path = tableau(sample_index);
    const Evaluated ref = evaluate(*reference_, path);
    const Evaluated coarse = evaluate(d, path);
    const Eigen::VectorXd& w = reference_->spatial->to_reference->weights();
    return {weighted_l2_distance_sq(w, ref.velocity, coarse.velocity),
            weighted_l2_distance_sq(w, ref.pressure_integral, coarse.pressure_integral)};
}

SampleErrors estimate_strong_error(const StudyContext& context, int level, std::uint64_t sample_index)
{
    return context.run_level(level, sample_index);
}

// ---------------------------------------------------------------------------
// Rates and aggregation

const SlopeRow* ConvergenceTable::slope(const std::string& quantity) const
{
    for (const auto& s : slopes) {
        if (s.quantity == quantity) {
            return &s;
        }
    }
    return nullptr;
}

RateFit fit_rate(const std::vector<double>& errors, const std::vector<double>& scales)
{
    if (errors.size() != scales.size() || errors.size() < 3) {
        throw UsageError("fit_rate: need at least three (error, scale) pairs of equal length");
    }
    const auto count = static_cast<double>(errors.size());
    std::vector<double> x(errors.size());
    std::vector<double> y(errors.size());
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(errors[i] > 0.0) || !(scales[i] > 0.0) || !std::isfinite(errors[i]) || !std::isfinite(scales[i])) {
            throw UsageError("fit_rate: errors and scales must be positive and finite");
        }
        x[i] = std::log2(scales[i]);
        y[i] = std::log2(errors[i]);
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= count;
    my /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw UsageError("fit_rate: scales must not all be equal");
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (my + fit.slope * (x[i] - mx));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / count);
    return fit;
}

namespace {

struct MeanAndError {
    double mean = 0.0;
    double standard_error = 0.0;
};

MeanAndError mean_and_error(const std::vector<double>& values)
{
    MeanAndError out;
    if (values.empty()) {
        return out;
    }
    const auto m = static_cast<double>(values.size());
    for (double v : values) {
        out.mean += v;
    }
    out.mean /= m;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - out.mean) * (v - out.mean);
        }
        out.standard_error = std::sqrt(ss / (m - 1.0) / m);
    }
    return out;
}

}  // namespace

ConvergenceTable summarize(const ExperimentConfig& config, const std::vector<Level>& levels,
                           const std::vector<SampleRecord>& records)
{
    ConvergenceTable table;
    const auto nl = levels.size();
    std::vector<std::vector<double>> eu(nl);
    std::vector<std::vector<double>> ep(nl);

    std::vector<SampleRecord> sorted = records;
    std::sort(sorted.begin(), sorted.end(), [](const SampleRecord& a, const SampleRecord& b) {
        return std::tie(a.sample_index, a.level) < std::tie(b.sample_index, b.level);
    });
    for (const auto& rec : sorted) {
        if (rec.level < 0 || static_cast<std::size_t>(rec.level) >= nl) {
            throw UsageError("sample record refers to level " + std::to_string(rec.level) + " outside the study");
        }
        eu[static_cast<std::size_t>(rec.level)].push_back(rec.err_u_sq);
        ep[static_cast<std::size_t>(rec.level)].push_back(rec.err_pint_sq);
    }

    for (std::size_t i = 0; i < nl; ++i) {
        const auto u = mean_and_error(eu[i]);
        const auto p = mean_and_error(ep[i]);
        table.rows.push_back({to_string(config.study), config.case_label, levels[i].n, levels[i].h(), levels[i].tau,
                              static_cast<int>(eu[i].size()), u.mean, u.standard_error, p.mean,
                              p.standard_error});
    }

    if (nl < 3) {
        table.warnings.push_back("slope omitted: fewer than 3 levels");
        return table;
    }
    std::vector<double> scales;
    for (const auto& level : levels) {
        scales.push_back(config.axis == RefinementAxis::Time ? level.tau : level.h());
    }
    auto add_slope = [&](const std::string& name, auto pick) {
        std::vector<double> rms;
        for (const auto& row : table.rows) {
            rms.push_back(std::sqrt(pick(row)));
        }
        try {
            const RateFit fit = fit_rate(rms, scales);
            table.slopes.push_back({name, fit.slope, fit.residual});
        } catch (const UsageError& e) {
            table.warnings.push_back("slope '" + name + "' omitted: " + e.what());
        }
    };
    add_slope("velocity", [](const LevelRow& r) { return r.err_u_ms; });
    add_slope("pressure_integral", [](const LevelRow& r) { return r.err_pint_ms; });
    return table;
}

// ---------------------------------------------------------------------------
// Parallel execution

int default_worker_count()
{
    if (const char* env = std::getenv(kWorkersEnv)) {
        int value = 0;
        const char* end = env + std::char_traits<char>::length(env);
        const auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec == std::errc() && ptr == end && value > 0) {
            return value;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int count, int workers, const std::function<void(int)>& body)
{
    if (count <= 0) {
        return;
    }
    workers = std::clamp(workers, 1, count);
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (int i = next++; i < count && !failed; i = next++) {
            try {
                body(i);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                failed = true;
            }
        }
    };
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    pool.clear();
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

StudyResult run_convergence_study(const ExperimentConfig& config, const StudyOptions& options)
{
    validate_config(config, true);
    const StudyContext context(config);
    const int nl = context.num_levels();
    const auto samples = static_cast<std::uint64_t>(config.samples);

    std::map<std::pair<int, std::uint64_t>, SampleRecord> known;
    const bool have_file = !options.sample_file.empty() && std::filesystem::exists(options.sample_file);
    if (have_file) {
        for (const auto& rec : read_sample_records(options.sample_file)) {
            if (rec.seed != config.base_seed) {
                throw UsageError("sample file " + options.sample_file + " was produced with a different base_seed");
            }
            if (rec.level < nl && rec.sample_index < samples) {
                known[{rec.level, rec.sample_index}] = rec;
            }
        }
    }

    std::vector<std::uint64_t> todo;
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (int l = 0; l < nl; ++l) {
            if (!known.count({l, s})) {
                todo.push_back(s);
                break;
            }
        }
    }

    std::mutex mutex;
    std::ofstream journal;
    if (!options.sample_file.empty()) {
        if (const auto parent = std::filesystem::path(options.sample_file).parent_path(); !parent.empty()) {
            std::filesystem::create_directories(parent);
        }
        journal.open(options.sample_file, std::ios::app);
        if (!journal) {
            throw UsageError("cannot open sample file " + options.sample_file);
        }
        if (!have_file) {
            journal << kSamplesHeader << '\n';
        }
    }

    int done = 0;
    const int total = static_cast<int>(todo.size());
    const int workers = options.workers > 0 ? options.workers : default_worker_count();
    parallel_for(total, workers, [&](int i) {
        const std::uint64_t s = todo[static_cast<std::size_t>(i)];
        const auto errors = context.run_sample(s);
        const std::lock_guard lock(mutex);
        for (int l = 0; l < nl; ++l) {
            const SampleRecord rec{l, s, errors[static_cast<std::size_t>(l)].velocity_sq,
                                   errors[static_cast<std::size_t>(l)].pressure_integral_sq, config.base_seed};
            known[{l, s}] = rec;
            if (journal) {
                journal << rec.level << ',' << rec.sample_index << ',' << format_double(rec.err_u_sq) << ','
                        << format_double(rec.err_pint_sq) << ',' << rec.seed << '\n';
            }
        }
        journal.flush();
        ++done;
        if (options.progress) {
            options.progress(done, total);
        }
    });
    journal.close();

    StudyResult result;
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (int l = 0; l < nl; ++l) {
            result.samples.push_back(known.at({l, s}));
        }
    }
    result.computed_samples = total;
    result.table = summarize(config, context.levels(), result.samples);
    if (!options.sample_file.empty()) {
        write_sample_records(options.sample_file, result.samples);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Stability audit

StabilityTable stability_audit(const ExperimentConfig& config, int workers)
{
    if (config.n_list.empty() || config.tau_list.empty() || config.samples < 1) {
        throw UsageError("stability audit needs n_list, tau_list and samples >= 1");
    }
    const int n = config.n_list.front();
    const double finest = *std::min_element(config.tau_list.begin(), config.tau_list.end());
    const int fine_steps = exact_ratio(config.final_time, finest, "stability tau");
    for (double tau : config.tau_list) {
        exact_ratio(config.final_time, tau, "stability tau");
        exact_ratio(tau, finest, "stability tau");
    }

    auto mesh = std::make_shared<const Mesh>(n);
    auto space = std::make_shared<const MiniSpace>(mesh);
    auto ops = std::make_shared<const AssembledOperators>(assemble_operators(space));
    const NoiseModel noise(config.r, config.truncation, config.basis, mesh, config.zero_noise);
    std::vector<std::unique_ptr<StepSystem>> systems;
    for (double tau : config.tau_list) {
        systems.push_back(build_step_system(ops, tau));
    }

    const auto nt = config.tau_list.size();
    using Triple = std::array<double, 3>;
    std::vector<std::vector<Triple>> values(static_cast<std::size_t>(config.samples), std::vector<Triple>(nt));
    parallel_for(config.samples, workers > 0 ? workers : default_worker_count(), [&](int s) {
        const BrownianTableau path(config.truncation, finest, fine_steps, config.base_seed,
                                   static_cast<std::uint64_t>(s));
        for (std::size_t k = 0; k < nt; ++k) {
            const Trajectory traj =
                run_trajectory(*systems[k], noise, config.final_time, constant_source(config.source), path);
            values[static_cast<std::size_t>(s)][k] = {traj.max_l2_sq, traj.sum_increment_sq, traj.tau_sum_h1_sq};
        }
    });

    StabilityTable table;
    table.n = n;
    for (std::size_t k = 0; k < nt; ++k) {
        std::array<MeanAndError, 3> stats;
        for (std::size_t q = 0; q < 3; ++q) {
            std::vector<double> column;
            for (const auto& per_sample : values) {
                column.push_back(per_sample[k][q]);
            }
            stats[q] = mean_and_error(column);
        }
        table.rows.push_back({config.tau_list[k], config.samples, stats[0].mean, stats[0].standard_error,
                              stats[1].mean, stats[1].standard_error, stats[2].mean, stats[2].standard_error});
    }

    table.passed = true;
    for (std::size_t k = 1; k < nt; ++k) {
        const auto& a = table.rows[k - 1];
        const auto& b = table.rows[k];
        const std::array<std::pair<double, double>, 3> pairs{
            {{a.max_l2_sq, b.max_l2_sq}, {a.sum_increment_sq, b.sum_increment_sq}, {a.tau_sum_h1_sq, b.tau_sum_h1_sq}}};
        for (const auto& [before, after] : pairs) {
            double ratio = 1.0;
            if (before > 0.0) {
                ratio = after / before;
            } else if (after > 0.0) {
                ratio = std::numeric_limits<double>::infinity();
            }
            table.ratios.push_back(ratio);
            table.passed = table.passed && ratio >= 0.5 && ratio <= 2.0;
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Persistence

std::string format_double(double value)
{
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return {buf.data(), ptr};
}

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

template <typename T>
T parse_field(const std::string& text, const char* name, int line)
{
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw ParseError(std::string("invalid ") + name + " '" + text + "'", line);
    }
    return value;
}

// Reads a CSV file with a fixed header; returns the data rows with their line numbers.
std::vector<std::pair<int, std::vector<std::string>>> read_csv(const std::string& path, const char* header,
                                                               std::size_t columns)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path, 0);
    }
    std::string line;
    int number = 0;
    if (!std::getline(in, line)) {
        throw ParseError(path + ": missing header", 1);
    }
    ++number;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != header) {
        throw ParseError(path + ": unexpected header '" + line + "'", number);
    }
    std::vector<std::pair<int, std::vector<std::string>>> rows;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto fields = split_csv(line);
        if (fields.size() != columns) {
            throw ParseError(path + ": expected " + std::to_string(columns) + " fields, found " +
                                 std::to_string(fields.size()),
                             number);
        }
        rows.emplace_back(number, std::move(fields));
    }
    return rows;
}

std::ofstream open_for_write(const std::string& path)
{
    if (const auto parent = std::filesystem::path(path).parent_path(); !parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw UsageError("cannot write " + path);
    }
    return out;
}

}  // namespace

void persist_results(const ConvergenceTable& table, const std::string& results_path, const std::string& slopes_path)
{
    auto out = open_for_write(results_path);
    out << kResultsHeader << '\n';
    for (const auto& r : table.rows) {
        out << r.study << ',' << r.case_label << ',' << r.n << ',' << format_double(r.h) << ','
            << format_double(r.tau) << ',' << r.samples << ',' << format_double(r.err_u_ms) << ','
            << format_double(r.err_u_se) << ',' << format_double(r.err_pint_ms) << ','
            << format_double(r.err_pint_se) << '\n';
    }
    auto slopes = open_for_write(slopes_path);
    slopes << kSlopesHeader << '\n';
    for (const auto& s : table.slopes) {
        slopes << s.quantity << ',' << format_double(s.slope) << ',' << format_double(s.residual) << '\n';
    }
}

ConvergenceTable load_results(const std::string& results_path, const std::string& slopes_path)
{
    ConvergenceTable table;
    for (const auto& [line, f] : read_csv(results_path, kResultsHeader, 10)) {
        LevelRow r;
        r.study = f[0];
        r.case_label = f[1];
        r.n = parse_field<int>(f[2], "n", line);
        r.h = parse_field<double>(f[3], "h", line);
        r.tau = parse_field<double>(f[4], "tau", line);
        r.samples = parse_field<int>(f[5], "M", line);
        r.err_u_ms = parse_field<double>(f[6], "err_u_ms", line);
        r.err_u_se = parse_field<double>(f[7], "err_u_se", line);
        r.err_pint_ms = parse_field<double>(f[8], "err_pint_ms", line);
        r.err_pint_se = parse_field<double>(f[9], "err_pint_se", line);
        if (r.err_u_ms < 0.0 || r.err_pint_ms < 0.0) {
            throw ParseError("negative mean-square error", line);
        }
        table.rows.push_back(std::move(r));
    }
    for (const auto& [line, f] : read_csv(slopes_path, kSlopesHeader, 3)) {
        table.slopes.push_back(
            {f[0], parse_field<double>(f[1], "slope", line), parse_field<double>(f[2], "residual", line)});
    }
    return table;
}

void write_sample_records(const std::string& path, const std::vector<SampleRecord>& records)
{
    auto out = open_for_write(path);
    out << kSamplesHeader << '\n';
    for (const auto& r : records) {
        out << r.level << ',' << r.sample_index << ',' << format_double(r.err_u_sq) << ','
            << format_double(r.err_pint_sq) << ',' << r.seed << '\n';
    }
}

std::vector<SampleRecord> read_sample_records(const std::string& path)
{
    std::vector<SampleRecord> records;
    for (const auto& [line, f] : read_csv(path, kSamplesHeader, 5)) {
        records.push_back({parse_field<int>(f[0], "level", line), parse_field<std::uint64_t>(f[1], "sample_index", line),
                           parse_field<double>(f[2], "err_u_sq", line), parse_field<double>(f[3], "err_pint_sq", line),
                           parse_field<std::uint64_t>(f[4], "seed", line)});
    }
    return records;
}

void persist_stability(const StabilityTable& table, const std::string& path)
{
    auto out = open_for_write(path);
    out << kStabilityHeader << '\n';
    for (const auto& r : table.rows) {
        out << table.n << ',' << format_double(r.tau) << ',' << r.samples << ',' << format_double(r.max_l2_sq) << ','
            << format_double(r.max_l2_sq_se) << ',' << format_double(r.sum_increment_sq) << ','
            << format_double(r.sum_increment_sq_se) << ',' << format_double(r.tau_sum_h1_sq) << ','
            << format_double(r.tau_sum_h1_sq_se) << '\n';
    }
}

}  // namespace sstokes
