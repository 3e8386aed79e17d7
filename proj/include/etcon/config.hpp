#pragma once

#include "etcon/engine.hpp"
#include "etcon/graph.hpp"
#include "etcon/linear_et.hpp"
#include "etcon/triggers.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace etcon {

/// Sectioned key=value text:
///
///   # comment
///   [section]
///   key = value
///
/// Keys may repeat (the graph section lists one `edge` per line).
class ConfigFile {
public:
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
    };

    static ConfigFile parse(std::istream& in);
    static ConfigFile parse_text(const std::string& text);
    static ConfigFile load(const std::filesystem::path& path);

    [[nodiscard]] bool has_section(const std::string& section) const;
    [[nodiscard]] const std::vector<Entry>& entries(const std::string& section) const;
    /// Last value of key, if any.
    [[nodiscard]] std::optional<std::string> get(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::vector<std::string> sections() const;

private:
    std::map<std::string, std::vector<Entry>> sections_;
    std::vector<std::string> order_;
};

/// "random(seed, lo, hi)" draws x0_i = lo + (hi - lo) * u_i from XorShift64Star(seed).
struct InitialCondition {
    std::optional<Vector> values;
    std::uint64_t seed = 0;
    double lo = -1.0;
    double hi = 1.0;

    [[nodiscard]] Vector realize(int n) const;
};

struct SweepAxis {
    std::string parameter;  ///< "law.<field>" or "sim.<field>"
    std::vector<double> values;
};

struct ExperimentConfig {
    WeightedDigraph graph = path_graph(2);
    TriggerLaw law = IdealLaw{};
    InitialCondition x0;
    SimConfig sim;
    std::string output_dir = "out";
    std::vector<SweepAxis> sweep;
};

struct LinearEtConfig {
    LinearEtSystem system;
    Vector x0;
    double horizon = 10.0;
    double t_max = 0.0;  ///< 0: default scan window
    int grid_points = kDefaultGridPoints;
    int samples_per_interval = 32;
    std::string output_dir = "out";
};

/// Comma-separated numbers.
[[nodiscard]] std::vector<double> parse_number_list(const std::string& text, const std::string& field);

/// Throws Error(ParseError | InvalidParameter | InvalidGraph ...) whose message
/// names the offending section.key. Relative graph file paths are resolved
/// against `base_dir`.
[[nodiscard]] ExperimentConfig parse_experiment(const ConfigFile& file, const std::filesystem::path& base_dir = {});
[[nodiscard]] ExperimentConfig load_experiment(const std::filesystem::path& path);

[[nodiscard]] LinearEtConfig parse_linear_et(const ConfigFile& file);
[[nodiscard]] LinearEtConfig load_linear_et(const std::filesystem::path& path);

/// Sets one law/sim field by its sweep name. Throws InvalidParameter when the
/// field does not exist for the configured law.
void apply_parameter(TriggerLaw& law, SimConfig& sim, const std::string& name, double value);

/// Cartesian product of the sweep axes, first axis varying slowest.
[[nodiscard]] std::vector<std::vector<double>> sweep_points(const std::vector<SweepAxis>& sweep);

}  // namespace etcon
