#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sigkit::cli {

// Flat key=value job description. Keys match the long flag names without dashes.
class JobConfig {
public:
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) > 0; }
    std::string str(const std::string& key, const std::string& fallback) const;
    std::string required(const std::string& key) const;
    long integer(const std::string& key, long fallback) const;
    double real(const std::string& key, double fallback) const;
    std::optional<double> maybe_real(const std::string& key) const;
    bool flag(const std::string& key, bool fallback = false) const;

    // Merges lines of the form key=value; '#' starts a comment. Existing keys are kept.
    void merge_file(const std::string& path);
};

int cmd_features(JobConfig cfg);
int cmd_gram(JobConfig cfg);
int cmd_graph(JobConfig cfg);
int cmd_fit(JobConfig cfg);
int cmd_synth(JobConfig cfg);

// Writes output + ".meta".
void write_metadata(const std::string& output, const JobConfig& cfg);

// Full entry point; returns the process exit code.
int run(int argc, char** argv);

} // namespace sigkit::cli
