#pragma once

#include "textray/codec.hpp"
#include "textray/training_math.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace textray::cli {

enum ExitStatus : int { kSuccess = 0, kValidationFailure = 1, kParseFailure = 2 };

struct RunConfig {
    std::filesystem::path corpus;
    std::filesystem::path out;
    std::filesystem::path detections;
    std::filesystem::path predictions;
    std::size_t n_rays = kDefaultRays;
    int degree = kLineLevelDegree;
    std::vector<int> degrees;
    std::vector<LevelRange> levels = default_level_ranges();
    double neg_thresh = 0.1;
    double pos_thresh = 0.4;
    double score_thresh = 0.95;
    double iou_thresh = 0.5;
    double sigma = 0.5;
    std::uint64_t seed = 0;
    std::size_t workers = 0;  // 0: hardware concurrency
    bool lenient = false;
    bool per_image = false;

    // synth
    std::size_t instances = 200;
    bool spiral = false;
    // targets
    double stride = 8.0;
    // gradcheck
    std::size_t pairs = 100;
    bool inject_sign_error = false;
};

/// Throws std::invalid_argument naming the first bad setting.
void validate_config(const RunConfig& config);

/// Parses "11,22,33" into degrees.
std::vector<int> parse_degree_list(const std::string& text);

/// Parses "0:0.3,0.2:0.55,0.7:inf" into closed level ranges.
std::vector<LevelRange> parse_level_list(const std::string& text);

/// Runs body(i) for i in [0, count) on `workers` threads. Results must be
/// written to slot i so the output order is independent of scheduling.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

struct EncodeSummary {
    std::size_t instances = 0;
    double mean_iou = 0.0;
    double median_iou = 0.0;
    double mean_radial_error = 0.0;
    std::size_t low_fidelity = 0;
};

struct GradcheckSummary {
    std::size_t pairs = 0;
    double max_relative_error = 0.0;
    bool passed = false;
};

/// Each command prints a human summary to `log` and returns an exit status.
int cmd_encode(const RunConfig& config, std::ostream& log, EncodeSummary* summary = nullptr);
int cmd_sweep(const RunConfig& config, std::ostream& log);
int cmd_eval(const RunConfig& config, std::ostream& log);
int cmd_gradcheck(const RunConfig& config, std::ostream& log, GradcheckSummary* summary = nullptr);
int cmd_synth(const RunConfig& config, std::ostream& log);
int cmd_postprocess(const RunConfig& config, std::ostream& log);
int cmd_targets(const RunConfig& config, std::ostream& log);

}  // namespace textray::cli
