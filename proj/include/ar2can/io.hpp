#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ar2can/geometry.hpp"
#include "ar2can/rewards.hpp"
#include "ar2can/token_plan.hpp"

namespace ar2can {

using json = nlohmann::json;

// Structural problems (bad JSON, missing fields, wrong types) raise
// InputError; well-formed values that break a domain invariant raise
// DomainError.

json read_json_file(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

// {"boxes": [{"x":f,"y":f,"w":f,"h":f}, ...]}
Layout layout_from_json(const json& j);
json layout_to_json(const Layout& l);

// {"faces": [{"box":{...}, "confidence":f, "landmarks":[[x,y] x5], "embedding":[f x D]}]}
// Embeddings are normalized to unit length on ingestion.
std::vector<FaceObservation> detections_from_json(const json& j);
json detections_to_json(std::span<const FaceObservation> faces);

// {"refs": [{"id":s, "embedding":[f x D]}]}
std::vector<ReferenceIdentity> refs_from_json(const json& j);
json refs_to_json(std::span<const ReferenceIdentity> refs);

// {"persons": [{"keypoints":[[x,y,visible] x17], "area":f}]}
std::vector<PoseSkeleton> poses_from_json(const json& j);
json poses_to_json(std::span<const PoseSkeleton> persons);

json token_plan_to_json(const TokenPlan& plan);
json assignment_to_json(const Assignment& a);
json breakdown_to_json(const RewardBreakdown& b);

// "a,b,z,e" -> weights. Throws InputError on anything else.
RewardWeights parse_weights(std::string_view text);
std::vector<double> parse_csv_doubles(std::string_view text);

// Integer coordinate bins used by the layout-token embedding path: [0, 1] -> [0, 1024].
inline constexpr int kCoordinateBins = 1024;
int quantize_coordinate(double v);
double dequantize_coordinate(int q);

}  // namespace ar2can
