#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "sstokes/noise.hpp"
#include "sstokes/solver.hpp"
#include "sstokes/transfer.hpp"

namespace sstokes {

/// Malformed results or configuration text. `line()` is 1-based, 0 if unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line);
    [[nodiscard]] int line() const { return line_; }

private:
    int line_;
};

enum class StudyKind { Time, Space, CaseCompare, Deterministic, Stability };

[[nodiscard]] std::string to_string(StudyKind kind);

/// Which discretization parameter varies across the levels of a study.
enum class RefinementAxis { Time, Space };

struct ExperimentConfig {
    StudyKind study = StudyKind::Time;
    RefinementAxis axis = RefinementAxis::Time;
    std::string case_label = "I";
    double r = 2.0;
    int truncation = 32;
    BasisKind basis = BasisKind::Cosine;
    bool zero_noise = false;
    std::vector<int> n_list{32};
    std::vector<double> tau_list{0.25, 0.125, 0.0625, 0.03125, 0.015625};
    int ref_n = 32;
    double ref_tau = 1.0 / 512.0;
    double final_time = 1.0;
    Vec2 source{1.0, 1.0};
    int samples = 128;
    std::uint64_t base_seed = 20240601;
    std::string out_dir = "results";
};

/// Noise regularity of the named cases: I -> 2, II -> 1, III -> 0.5.
[[nodiscard]] double case_regularity(const std::string& label);

struct Level {
    int n = 0;
    double tau = 0.0;

    [[nodiscard]] double h() const { return 1.0 / n; }
    friend bool operator==(const Level&, const Level&) = default;
};

/// Tested levels, coarsest first: tau_list at n_list[0] or n_list at tau_list[0].
[[nodiscard]] std::vector<Level> study_levels(const ExperimentConfig& config);

/**
 * Throws UsageError unless the configuration is consistent: nested meshes,
 * tau multiples of ref_tau dividing T, and (when `strict`) a reference that
 * is strictly finer than every tested level.
 */
void validate_config(const ExperimentConfig& config, bool strict = true);

struct SampleErrors {
    double velocity_sq = 0.0;
    double pressure_integral_sq = 0.0;
};

/**
 * Shared read-only state of a study: one discretization per tested level and
 * one for the reference, with factorizations, noise models and transfers to
 * the reference quadrature. Samples may be evaluated concurrently.
 */
class StudyContext {
public:
    explicit StudyContext(ExperimentConfig config);
    ~StudyContext();
    StudyContext(const StudyContext&) = delete;
    StudyContext& operator=(const StudyContext&) = delete;

    [[nodiscard]] const ExperimentConfig& config() const { return config_; }
    [[nodiscard]] const std::vector<Level>& levels() const { return levels_; }
    [[nodiscard]] int num_levels() const { return static_cast<int>(levels_.size()); }
    [[nodiscard]] Level reference() const { return {config_.ref_n, config_.ref_tau}; }

    /// Errors of every level for one coupled sample path.
    [[nodiscard]] std::vector<SampleErrors> run_sample(std::uint64_t sample_index) const;

    /// Errors of one level; reruns the reference for that sample.
    [[nodiscard]] SampleErrors run_level(int level, std::uint64_t sample_index) const;

private:
    struct Spatial;
    struct Discretization;

    const Spatial& spatial(int n);
    struct Evaluated;
    [[nodiscard]] Evaluated evaluate(const Discretization& d, const BrownianTableau& tableau) const;
    [[nodiscard]] BrownianTableau tableau(std::uint64_t sample_index) const;

    ExperimentConfig config_;
    std::vector<Level> levels_;
    std::map<int, std::unique_ptr<Spatial>> spatial_;
    std::vector<std::unique_ptr<Discretization>> discretizations_;
    std::unique_ptr<Discretization> reference_;
};

/// Squared errors of `level` against the reference for one sample path.
[[nodiscard]] SampleErrors estimate_strong_error(const StudyContext& context, int level, std::uint64_t sample_index);

struct LevelRow {
    std::string study;
    std::string case_label;
    int n = 0;
    double h = 0.0;
    double tau = 0.0;
    int samples = 0;
    double err_u_ms = 0.0;
    double err_u_se = 0.0;
    double err_pint_ms = 0.0;
    double err_pint_se = 0.0;

    friend bool operator==(const LevelRow&, const LevelRow&) = default;
};

struct SlopeRow {
    std::string quantity;
    double slope = 0.0;
    double residual = 0.0;

    friend bool operator==(const SlopeRow&, const SlopeRow&) = default;
};

struct ConvergenceTable {
    std::vector<LevelRow> rows;
    std::vector<SlopeRow> slopes;
    /// Not persisted: notes such as omitted slopes.
    std::vector<std::string> warnings;

    [[nodiscard]] const SlopeRow* slope(const std::string& quantity) const;
};

struct SampleRecord {
    int level = 0;
    std::uint64_t sample_index = 0;
    double err_u_sq = 0.0;
    double err_pint_sq = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct RateFit {
    double slope = 0.0;
    /// Root-mean-square deviation of the log2 data from the fitted line.
    double residual = 0.0;
};

/// Least-squares slope of log2(error) against log2(scale).
[[nodiscard]] RateFit fit_rate(const std::vector<double>& errors, const std::vector<double>& scales);

/// Worker count: SSTOKES_WORKERS if set and positive, else hardware concurrency.
[[nodiscard]] int default_worker_count();

inline constexpr const char* kWorkersEnv = "SSTOKES_WORKERS";

/// Calls body(index) for index in [0, count) on `workers` threads. Rethrows the first failure.
void parallel_for(int count, int workers, const std::function<void(int)>& body);

struct StudyOptions {
    /// Per-sample sidecar; existing complete samples are reused (resume).
    std::string sample_file;
    int workers = 0;  // 0: default_worker_count()
    std::function<void(int done, int total)> progress;
};

struct StudyResult {
    ConvergenceTable table;
    std::vector<SampleRecord> samples;
    int computed_samples = 0;
};

[[nodiscard]] StudyResult run_convergence_study(const ExperimentConfig& config, const StudyOptions& options = {});

/// Mean-square table and slopes from per-sample records (ascending sample order).
[[nodiscard]] ConvergenceTable summarize(const ExperimentConfig& config, const std::vector<Level>& levels,
                                         const std::vector<SampleRecord>& records);

struct StabilityRow {
    double tau = 0.0;
    int samples = 0;
    double max_l2_sq = 0.0;
    double max_l2_sq_se = 0.0;
    double sum_increment_sq = 0.0;
    double sum_increment_sq_se = 0.0;
    double tau_sum_h1_sq = 0.0;
    double tau_sum_h1_sq_se = 0.0;
};

struct StabilityTable {
    int n = 0;
    std::vector<StabilityRow> rows;
    /// For consecutive rows, value(next) / value(previous) per quantity (1 when both vanish).
    std::vector<double> ratios;
    bool passed = false;
};

/// Monte Carlo averages of the energy-bound quantities at every tau of tau_list (n = n_list[0]).
[[nodiscard]] StabilityTable stability_audit(const ExperimentConfig& config, int workers = 0);

// Persistence. Numbers are written with 17 significant digits, so loading is exact.
inline constexpr const char* kResultsHeader = "study,case,n,h,tau,M,err_u_ms,err_u_se,err_pint_ms,err_pint_se";
inline constexpr const char* kSlopesHeader = "quantity,slope,residual";
inline constexpr const char* kSamplesHeader = "level,sample_index,err_u_sq,err_pint_sq,seed";
inline constexpr const char* kStabilityHeader =
    "n,tau,M,max_l2_sq,max_l2_sq_se,sum_increment_sq,sum_increment_sq_se,tau_sum_h1_sq,tau_sum_h1_sq_se";

void persist_results(const ConvergenceTable& table, const std::string& results_path, const std::string& slopes_path);
[[nodiscard]] ConvergenceTable load_results(const std::string& results_path, const std::string& slopes_path);

void write_sample_records(const std::string& path, const std::vector<SampleRecord>& records);
[[nodiscard]] std::vector<SampleRecord> read_sample_records(const std::string& path);

void persist_stability(const StabilityTable& table, const std::string& path);

/// Shortest round-trip text for a double.
[[nodiscard]] std::string format_double(double value);

}  // namespace sstokes
