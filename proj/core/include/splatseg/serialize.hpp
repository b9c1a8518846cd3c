#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "splatseg/augment.hpp"
#include "splatseg/fit.hpp"
#include "splatseg/levelset.hpp"
#include "splatseg/loss.hpp"
#include "splatseg/metrics.hpp"
#include "splatseg/splat.hpp"
#include "splatseg/synth.hpp"

namespace splatseg {

using json = nlohmann::ordered_json;

// Flat config files: a JSON object, or TOML restricted to top-level
// `key = value` lines (numbers, booleans, quoted strings, # comments).
// The format is picked by extension (.toml) or by a leading '{'.
// Throws DataError for unreadable or malformed files.
json load_config_file(const std::filesystem::path& path);
json parse_flat_toml(const std::string& text);

// Every key is optional; missing keys keep the value from `base`. Unknown
// keys are ignored so one flat file can configure several components.
// Throws UsageError for a key with the wrong type.
LossWeights loss_weights_from(const json& config, LossWeights base = {});
FitOptions fit_options_from(const json& config, FitOptions base = {});
AugmentationConfig augmentation_from(const json& config, AugmentationConfig base = {});

json to_json(const LossWeights& weights);
json to_json(const FitOptions& options);
json to_json(const AugmentationConfig& cfg);
json to_json(const GaussianSplat& splat);
json to_json(const LossBreakdown& breakdown);
json to_json(const FitResult& result);
json to_json(const ConfusionCounts& counts);
json to_json(const EvalReport& report);
json to_json(const ShapeSpec& spec);
json to_json(const UnitMapping& mapping);

// Splat records: {"mu_x", "mu_y", "s_x", "s_y", "r"} or the CSV row
// "mu_x,mu_y,s_x,s_y,r" (an optional header line is skipped).
GaussianSplat splat_from_json(const json& record);
GaussianSplat splat_from_csv(const std::string& text);
std::string splat_to_csv(const GaussianSplat& splat);
// Dispatches on extension: .json or .csv.
GaussianSplat load_splat(const std::filesystem::path& path);

UnitMapping unit_mapping_from_json(const json& record);

// Pretty-printed with a trailing newline; byte-stable for equal inputs.
std::string dump(const json& value);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace splatseg
