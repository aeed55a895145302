#include "cli_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sstokes::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::string part;
    std::istringstream is(text);
    while (std::getline(is, part, sep)) {
        parts.push_back(trim(part));
    }
    return parts;
}

template <typename T>
T parse_number(const std::string& text, const std::string& key)
{
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw UsageError("invalid value '" + text + "' for " + key);
    }
    return value;
}

bool is_known_key(const std::string& key)
{
    const auto& keys = config_keys();
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

}  // namespace

std::string command_name(Command c)
{
    switch (c) {
    case Command::ConvergeTime:
        return "converge-time";
    case Command::ConvergeSpace:
        return "converge-space";
    case Command::CaseCompare:
        return "case-compare";
    case Command::Deterministic:
        return "deterministic";
    case Command::Stability:
        return "stability";
    case Command::SemigroupCheck:
        return "semigroup-check";
    case Command::SingleRun:
        return "single-run";
    }
    return "unknown";
}

Command parse_command(const std::string& name)
{
    for (Command c : {Command::ConvergeTime, Command::ConvergeSpace, Command::CaseCompare, Command::Deterministic,
                      Command::Stability, Command::SemigroupCheck, Command::SingleRun}) {
        if (command_name(c) == name) {
            return c;
        }
    }
    throw UsageError("unknown subcommand '" + name + "'");
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys{"case",  "r",      "L",       "basis",   "T",         "tau_list",
                                               "n_list", "ref_tau", "ref_n", "samples", "base_seed", "out_dir"};
    return keys;
}

KeyValues default_settings(Command c)
{
    KeyValues kv{{"case", "I"},          {"basis", "cos"},  {"T", "1"},
                 {"base_seed", "20240601"}, {"out_dir", "results"}};
    switch (c) {
    case Command::ConvergeTime:
        kv.insert({{"n_list", "32"}, {"tau_list", "2^-2,2^-3,2^-4,2^-5,2^-6"}, {"ref_n", "32"}, {"ref_tau", "2^-9"},
                   {"samples", "128"}});
        break;
    case Command::ConvergeSpace:
        kv.insert({{"n_list", "2,4,8,16"}, {"tau_list", "2^-7"}, {"ref_n", "64"}, {"ref_tau", "2^-7"},
                   {"samples", "128"}});
        break;
    case Command::CaseCompare:
        kv["case"] = "I,II,III";
        kv.insert({{"n_list", "2,4,8,16"}, {"tau_list", "2^-7"}, {"ref_n", "64"}, {"ref_tau", "2^-7"},
                   {"samples", "128"}});
        break;
    case Command::Deterministic:
        kv.insert({{"n_list", "2,4,8,16"}, {"tau_list", "2^-2,2^-3,2^-4,2^-5,2^-6"}, {"ref_n", "64"},
                   {"ref_tau", "2^-10"}, {"samples", "1"}});
        break;
    case Command::Stability:
        kv.insert({{"n_list", "16"}, {"tau_list", "2^-4,2^-5"}, {"ref_n", "16"}, {"ref_tau", "2^-5"},
                   {"samples", "32"}});
        break;
    case Command::SemigroupCheck:
        kv.insert({{"n_list", "4,8,16,32"}, {"tau_list", "2^-4,2^-6"}, {"ref_n", "8"}, {"ref_tau", "2^-6"},
                   {"samples", "20"}});
        break;
    case Command::SingleRun:
        kv.insert({{"n_list", "16"}, {"tau_list", "2^-6"}, {"ref_n", "16"}, {"ref_tau", "2^-6"}, {"samples", "1"}});
        break;
    }
    return kv;
}

KeyValues parse_config_text(const std::string& text, const std::string& origin)
{
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(origin + ": expected key=value", number);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!is_known_key(key)) {
            throw ParseError(origin + ": unknown key '" + key + "'", number);
        }
        if (value.empty()) {
            throw ParseError(origin + ": empty value for '" + key + "'", number);
        }
        kv[key] = value;
    }
    return kv;
}

KeyValues read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read config file " + path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path);
}

KeyValues merge_settings(const std::vector<KeyValues>& layers)
{
    KeyValues merged;
    for (const auto& layer : layers) {
        for (const auto& [key, value] : layer) {
            if (!is_known_key(key)) {
                throw UsageError("unknown configuration key '" + key + "'");
            }
            merged[key] = value;
        }
    }
    return merged;
}

double parse_real(const std::string& text, const std::string& key)
{
    const std::string t = trim(text);
    if (const auto caret = t.find('^'); caret != std::string::npos) {
        const double base = parse_number<double>(t.substr(0, caret), key);
        const double exponent = parse_number<double>(t.substr(caret + 1), key);
        return std::pow(base, exponent);
    }
    if (const auto slash = t.find('/'); slash != std::string::npos) {
        const double num = parse_number<double>(t.substr(0, slash), key);
        const double den = parse_number<double>(t.substr(slash + 1), key);
        if (den == 0.0) {
            throw UsageError("division by zero in " + key);
        }
        return num / den;
    }
    return parse_number<double>(t, key);
}

std::vector<double> parse_real_list(const std::string& text, const std::string& key)
{
    std::vector<double> values;
    for (const auto& part : split(text, ',')) {
        values.push_back(parse_real(part, key));
    }
    if (values.empty()) {
        throw UsageError(key + " must not be empty");
    }
    return values;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& key)
{
    std::vector<int> values;
    for (const auto& part : split(text, ',')) {
        values.push_back(parse_number<int>(part, key));
    }
    if (values.empty()) {
        throw UsageError(key + " must not be empty");
    }
    return values;
}

std::string format_real_list(const std::vector<double>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? "," : "") + format_double(values[i]);
    }
    return out;
}

double effective_r(const Settings& s, const std::string& case_label)
{
    return s.r ? *s.r : case_regularity(case_label);
}

int effective_truncation(const Settings& s, const std::string& case_label)
{
    return s.truncation ? *s.truncation : default_truncation(effective_r(s, case_label));
}

Settings resolve_settings(Command c, const KeyValues& merged)
{
    auto get = [&merged](const std::string& key) -> const std::string& {
        const auto it = merged.find(key);
        if (it == merged.end()) {
            throw UsageError("missing configuration key '" + key + "'");
        }
        return it->second;
    };

    Settings s;
    s.command = c;
    s.cases = split(get("case"), ',');
    for (const auto& label : s.cases) {
        (void)case_regularity(label);
    }
    if (s.cases.empty()) {
        throw UsageError("case must not be empty");
    }
    if (s.cases.size() > 1 && c != Command::CaseCompare) {
        throw UsageError("only case-compare accepts several cases");
    }
    if (merged.count("r")) {
        s.r = parse_real(get("r"), "r");
        if (!(*s.r > 0.0 && *s.r <= 2.0)) {
            throw UsageError("r must lie in (0, 2]");
        }
    }
    if (merged.count("L")) {
        s.truncation = parse_number<int>(get("L"), "L");
        if (*s.truncation < 1) {
            throw UsageError("L must be at least 1");
        }
    }
    const std::string& basis = get("basis");
    if (basis == "cos" || basis == "cosine") {
        s.basis = BasisKind::Cosine;
    } else if (basis == "sin" || basis == "sine") {
        s.basis = BasisKind::Sine;
    } else {
        throw UsageError("basis must be cos or sin, got '" + basis + "'");
    }
    s.final_time = parse_real(get("T"), "T");
    s.tau_list = parse_real_list(get("tau_list"), "tau_list");
    s.n_list = parse_int_list(get("n_list"), "n_list");
    s.ref_tau = parse_real(get("ref_tau"), "ref_tau");
    s.ref_n = parse_number<int>(get("ref_n"), "ref_n");
    s.samples = parse_number<int>(get("samples"), "samples");
    s.base_seed = parse_number<std::uint64_t>(get("base_seed"), "base_seed");
    s.out_dir = get("out_dir");
    if (s.samples < 1) {
        throw UsageError("samples must be at least 1");
    }
    if (!(s.final_time > 0.0)) {
        throw UsageError("T must be positive");
    }
    for (double tau : s.tau_list) {
        if (!(tau > 0.0)) {
            throw UsageError("tau_list entries must be positive");
        }
    }
    for (int n : s.n_list) {
        if (n < 1) {
            throw UsageError("n_list entries must be at least 1");
        }
    }
    return s;
}

void truncate_levels(Settings& s, int levels)
{
    if (levels < 1) {
        throw UsageError("--levels must be at least 1");
    }
    auto keep = [levels](auto& list) {
        if (static_cast<int>(list.size()) > levels) {
            list.resize(static_cast<std::size_t>(levels));
        }
    };
    switch (s.command) {
    case Command::ConvergeTime:
    case Command::Stability:
        keep(s.tau_list);
        break;
    case Command::ConvergeSpace:
    case Command::CaseCompare:
    case Command::SemigroupCheck:
        keep(s.n_list);
        break;
    case Command::Deterministic:
        keep(s.tau_list);
        keep(s.n_list);
        break;
    case Command::SingleRun:
        break;
    }
}

std::string show_config(const Settings& s)
{
    std::ostringstream os;
    std::string cases;
    std::string rs;
    std::string ls;
    for (std::size_t i = 0; i < s.cases.size(); ++i) {
        cases += (i ? "," : "") + s.cases[i];
        rs += (i ? "," : "") + format_double(effective_r(s, s.cases[i]));
        ls += (i ? "," : "") + std::to_string(effective_truncation(s, s.cases[i]));
    }
    std::string ns;
    for (std::size_t i = 0; i < s.n_list.size(); ++i) {
        ns += (i ? "," : "") + std::to_string(s.n_list[i]);
    }
    os << "subcommand=" << command_name(s.command) << '\n'
       << "case=" << cases << '\n'
       << "r=" << rs << '\n'
       << "L=" << ls << '\n'
       << "basis=" << (s.basis == BasisKind::Cosine ? "cos" : "sin") << '\n'
       << "T=" << format_double(s.final_time) << '\n'
       << "tau_list=" << format_real_list(s.tau_list) << '\n'
       << "n_list=" << ns << '\n'
       << "ref_tau=" << format_double(s.ref_tau) << '\n'
       << "ref_n=" << s.ref_n << '\n'
       << "samples=" << s.samples << '\n'
       << "base_seed=" << s.base_seed << '\n'
       << "out_dir=" << s.out_dir << '\n'
       << "f=(1,1)\n"
       << "u0=0\n"
       << "domain=[0,1]^2\n"
       << "epsilon=" << format_double(NoiseModel::kEpsilon) << '\n';
    return os.str();
}

ExperimentConfig experiment_config(const Settings& s, const std::string& case_label, RefinementAxis axis)
{
    ExperimentConfig c;
    c.axis = axis;
    c.case_label = case_label;
    c.r = effective_r(s, case_label);
    c.truncation = effective_truncation(s, case_label);
    c.basis = s.basis;
    c.final_time = s.final_time;
    c.n_list = s.n_list;
    c.tau_list = s.tau_list;
    c.ref_n = s.ref_n;
    c.ref_tau = s.ref_tau;
    c.samples = s.samples;
    c.base_seed = s.base_seed;
    c.out_dir = s.out_dir;
    switch (s.command) {
    case Command::ConvergeTime:
        c.study = StudyKind::Time;
        break;
    case Command::ConvergeSpace:
        c.study = StudyKind::Space;
        break;
    case Command::CaseCompare:
        c.study = StudyKind::CaseCompare;
        break;
    case Command::Deterministic:
        c.study = StudyKind::Deterministic;
        c.zero_noise = true;
        c.case_label = "none";
        if (axis == RefinementAxis::Space) {
            c.tau_list = {s.ref_tau};
        } else {
            c.n_list = {s.ref_n};
        }
        break;
    case Command::Stability:
        c.study = StudyKind::Stability;
        break;
    case Command::SemigroupCheck:
    case Command::SingleRun:
        break;
    }
    return c;
}

}  // namespace sstokes::cli
