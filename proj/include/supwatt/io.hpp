#pragma once

#include "supwatt/classification.hpp"
#include "supwatt/detection.hpp"
#include "supwatt/evaluation.hpp"
#include "supwatt/simulator.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace supwatt::io {

using Json = nlohmann::ordered_json;

// {appliance, mode, phases:[{rep_lower, rep_upper, cycles:[{duration_s, watts, duration_jitter}]}]}
Supro supro_from_json(const Json& j);
Json to_json(const Supro& supro);
Supro load_supro(const std::filesystem::path& path);

// Appliance manifest:
//   {appliance, modes:{<mode>: <supro path>}, mode_ranking:[...], turn_on_seconds:[...]}
// SUPRO paths resolve relative to the manifest.
ApplianceConfig load_appliance(const std::filesystem::path& path);

Json to_json(const std::vector<GroundTruthEvent>& truth);
std::vector<GroundTruthEvent> truth_from_json(const Json& j);

Json to_json(const DetectionResult& result);
DetectionResult detection_from_json(const Json& j);

Json to_json(const ClassifiedEvent& event);
ClassifiedEvent classified_from_json(const Json& j);

Json to_json(const Recommendation& rec);

// {intervals:[{start, end, tier}]}
TariffSchedule tariff_from_json(const Json& j);

// Multi-channel meter CSV (RAE-style): a header naming a `unix_ts` column and
// one column per channel. Returns `column` resampled to 1 Hz from the first
// timestamp; missing seconds repeat the previous reading and negative
// readings are clamped to 0.
PowerSeries parse_channel_csv(const std::string& text, const std::string& column);
PowerSeries load_channel_csv(const std::filesystem::path& path, const std::string& column);

// "heavy=0.6,light=0.2,medium=0.2"
UsageIntensity parse_intensity(const std::string& text);

// n,mean_detections,std_detections
std::string format_sweep_csv(const SweepReport& report);
// appliance,mode,precision,recall,f1
std::string format_metrics_csv(const ClassificationReport& report);

Json parse_json(const std::string& text, const std::string& origin);
Json load_json(const std::filesystem::path& path);

} // namespace supwatt::io
