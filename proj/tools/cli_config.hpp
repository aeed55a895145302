#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sstokes/experiments.hpp"

namespace sstokes::cli {

enum class Command { ConvergeTime, ConvergeSpace, CaseCompare, Deterministic, Stability, SemigroupCheck, SingleRun };

[[nodiscard]] std::string command_name(Command c);
[[nodiscard]] Command parse_command(const std::string& name);

/// Recognised configuration keys, in display order.
[[nodiscard]] const std::vector<std::string>& config_keys();

using KeyValues = std::map<std::string, std::string>;

/// Built-in defaults of a subcommand (r and L are derived unless set).
[[nodiscard]] KeyValues default_settings(Command c);

/// Parses flat `key = value` text; `#` starts a comment. Unknown keys are a ParseError.
[[nodiscard]] KeyValues parse_config_text(const std::string& text, const std::string& origin = "config");
[[nodiscard]] KeyValues read_config_file(const std::string& path);

/// Layers later maps over earlier ones after checking that every key is known.
[[nodiscard]] KeyValues merge_settings(const std::vector<KeyValues>& layers);

/// Parsed, typed view of a merged key set.
struct Settings {
    Command command = Command::ConvergeTime;
    std::vector<std::string> cases;
    /// Explicit values; otherwise derived per case (r) and from r (L).
    std::optional<double> r;
    std::optional<int> truncation;
    BasisKind basis = BasisKind::Cosine;
    double final_time = 1.0;
    std::vector<double> tau_list;
    std::vector<int> n_list;
    double ref_tau = 0.0;
    int ref_n = 0;
    int samples = 0;
    std::uint64_t base_seed = 0;
    std::string out_dir;
};

[[nodiscard]] double effective_r(const Settings& s, const std::string& case_label);
[[nodiscard]] int effective_truncation(const Settings& s, const std::string& case_label);

/// Typed settings; throws UsageError naming the offending key.
[[nodiscard]] Settings resolve_settings(Command c, const KeyValues& merged);

/// Keeps the first `levels` entries of the refined list(s) of the subcommand.
void truncate_levels(Settings& s, int levels);

/// `key=value` lines of the effective configuration and the fixed model data.
[[nodiscard]] std::string show_config(const Settings& s);

/// Study configuration for one case of a convergence subcommand.
[[nodiscard]] ExperimentConfig experiment_config(const Settings& s, const std::string& case_label,
                                                 RefinementAxis axis);

/// Parses "0.25", "1/128" or "2^-7".
[[nodiscard]] double parse_real(const std::string& text, const std::string& key);
[[nodiscard]] std::vector<double> parse_real_list(const std::string& text, const std::string& key);
[[nodiscard]] std::vector<int> parse_int_list(const std::string& text, const std::string& key);

[[nodiscard]] std::string format_real_list(const std::vector<double>& values);

}  // namespace sstokes::cli
