#pragma once

#include "painmine/corpus.hpp"
#include "painmine/itm.hpp"
#include "painmine/painpoint.hpp"
#include "painmine/topics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace painmine {

struct PipelineConfig {
    // [paths]
    std::string input;
    std::string format = "auto"; // jsonl | csv | auto (by extension)
    std::string stopwords_path;
    std::string normalization_path; // optional
    std::string annotations_path;   // optional
    std::string output_dir = "out";
    // [filter]
    FilterConfig filter;
    int min_negative_freq = 5;
    // [sentiment]
    TrainConfig sentiment;
    // [topics]
    int k = 0; // 0 = pick by silhouette over {8, 12, 16, 20, 24}
    double outlier_quantile = 0.2;
    int svd_dim = 64;
    MergeConfig merge;
    // [itm]
    ItmConfig itm;
    // [extract]
    ExtractConfig extract;
    // [run]
    uint64_t seed = 0;

    std::string config_text; // verbatim file content, hashed into the manifest
};

// Key-value sections; unknown sections or keys are ConfigErrors naming the
// line. See default_config_text() for every key and default.
PipelineConfig parse_pipeline_config(const std::string& text);
PipelineConfig load_pipeline_config(const std::string& path);
std::string default_config_text();

// The built-in English stopword list shipped with the CLI.
std::string default_stopwords_text();

struct StageResult {
    std::string name;
    double millis = 0.0;
    std::vector<std::string> artifacts;
};

struct RunManifest {
    std::string config_hash;
    std::string version;
    std::vector<StageResult> stages;
    std::string failed_stage; // empty on success
    std::string error;        // empty on success
};

// Stage names in execution order for `run`.
const std::vector<std::string>& pipeline_stage_names();

// Runs one named stage (ingest, preprocess, train-sent, topics-init,
// topics-merge, itm, extract, evaluate, report) against the artifacts in
// config.output_dir.
StageResult run_stage(const std::string& name, const PipelineConfig& config);

// All stages in order; a stage failure stops the run, and the manifest
// (written to output_dir/manifest.json in both cases) records it.
RunManifest run_pipeline(const PipelineConfig& config);

std::string manifest_to_json(const RunManifest& manifest);

} // namespace painmine
