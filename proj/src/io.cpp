#include "ar2can/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ar2can/error.hpp"

namespace ar2can {

namespace {

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(where + " is missing \"" + key + "\"");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + " must be a number");
  return j.get<double>();
}

const json& array(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + " must be an array");
  return j;
}

std::vector<double> number_array(const json& j, const std::string& where) {
  std::vector<double> out;
  for (std::size_t k = 0; k < array(j, where).size(); ++k)
    out.push_back(number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

BBox box_from_json(const json& j, const std::string& where) {
  BBox b{number(field(j, "x", where), where + ".x"), number(field(j, "y", where), where + ".y"),
         number(field(j, "w", where), where + ".w"), number(field(j, "h", where), where + ".h")};
  validate_box(b);
  return b;
}

json box_to_json(const BBox& b) { return {{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}}; }

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path.string());
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw InputError("failed writing " + path.string());
}

Layout layout_from_json(const json& j) {
  const json& boxes = array(field(j, "boxes", "layout"), "layout.boxes");
  Layout l;
  for (std::size_t i = 0; i < boxes.size(); ++i)
    l.boxes.push_back(box_from_json(boxes[i], "layout.boxes[" + std::to_string(i) + "]"));
  return l;
}

json layout_to_json(const Layout& l) {
  json boxes = json::array();
  for (const auto& b : l.boxes) boxes.push_back(box_to_json(b));
  return {{"boxes", boxes}};
}

std::vector<FaceObservation> detections_from_json(const json& j) {
  const json& faces = array(field(j, "faces", "detections"), "detections.faces");
  std::vector<FaceObservation> out;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const std::string where = "detections.faces[" + std::to_string(i) + "]";
    const json& f = faces[i];
    FaceObservation o;
    o.box = box_from_json(field(f, "box", where), where + ".box");
    o.confidence = f.contains("confidence") ? number(f["confidence"], where + ".confidence") : 1.0;
    if (f.contains("landmarks")) {
      const json& lm = array(f["landmarks"], where + ".landmarks");
      if (lm.size() != kNumLandmarks) throw InputError(where + ".landmarks must hold 5 points");
      for (std::size_t k = 0; k < kNumLandmarks; ++k) {
        const auto xy = number_array(lm[k], where + ".landmarks[" + std::to_string(k) + "]");
        if (xy.size() != 2) throw InputError(where + ".landmarks entries must be [x, y]");
        o.landmarks[k] = {xy[0], xy[1]};
      }
    }
    if (f.contains("embedding") && !f["embedding"].is_null())
      o.embedding = normalized(number_array(f["embedding"], where + ".embedding"));
    out.push_back(std::move(o));
  }
  return out;
}

json detections_to_json(std::span<const FaceObservation> faces) {
  json arr = json::array();
  for (const auto& o : faces) {
    json lm = json::array();
    for (const auto& p : o.landmarks) lm.push_back({p.cx, p.cy});
    json f{{"box", box_to_json(o.box)}, {"confidence", o.confidence}, {"landmarks", lm}};
    if (o.embedding) f["embedding"] = *o.embedding;
    arr.push_back(std::move(f));
  }
  return {{"faces", arr}};
}

std::vector<ReferenceIdentity> refs_from_json(const json& j) {
  const json& refs = array(field(j, "refs", "references"), "references.refs");
  std::vector<ReferenceIdentity> out;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const std::string where = "references.refs[" + std::to_string(i) + "]";
    ReferenceIdentity r;
    const json& id = field(refs[i], "id", where);
    r.id = id.is_string() ? id.get<std::string>() : id.dump();
    r.embedding = normalized(number_array(field(refs[i], "embedding", where), where + ".embedding"));
    out.push_back(std::move(r));
  }
  return out;
}

json refs_to_json(std::span<const ReferenceIdentity> refs) {
  json arr = json::array();
  for (const auto& r : refs) arr.push_back({{"id", r.id}, {"embedding", r.embedding}});
  return {{"refs", arr}};
}

std::vector<PoseSkeleton> poses_from_json(const json& j) {
  const json& persons = array(field(j, "persons", "poses"), "poses.persons");
  std::vector<PoseSkeleton> out;
  for (std::size_t i = 0; i < persons.size(); ++i) {
    const std::string where = "poses.persons[" + std::to_string(i) + "]";
    const json& kps = array(field(persons[i], "keypoints", where), where + ".keypoints");
    if (kps.size() != kNumKeypoints) throw InputError(where + ".keypoints must hold 17 triplets");
    PoseSkeleton p;
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
      const auto t = number_array(kps[k], where + ".keypoints[" + std::to_string(k) + "]");
      if (t.size() != 3) throw InputError(where + ".keypoints entries must be [x, y, visible]");
      p.keypoints.push_back({{t[0], t[1]}, t[2] > 0.0});
    }
    p.area = number(field(persons[i], "area", where), where + ".area");
    if (!(p.area > 0.0)) throw DomainError(where + ".area must be positive");
    out.push_back(std::move(p));
  }
  return out;
}

json poses_to_json(std::span<const PoseSkeleton> persons) {
  json arr = json::array();
  for (const auto& p : persons) {
    json kps = json::array();
    for (const auto& k : p.keypoints) kps.push_back({k.position.cx, k.position.cy, k.visible ? 1 : 0});
    arr.push_back({{"keypoints", kps}, {"area", p.area}});
  }
  return {{"persons", arr}};
}

json token_plan_to_json(const TokenPlan& plan) {
  json canvases = json::array();
  for (const auto& tokens : plan.kept) {
    json kept = json::array(), ids = json::array();
    for (const auto& t : tokens) {
      kept.push_back(t.patch);
      ids.push_back({t.id.plane, t.id.row, t.id.col});
    }
    canvases.push_back({{"kept", kept}, {"ids", ids}});
  }
  json groups = json::array();
  for (const auto& g : plan.shared_groups) {
    json members = json::array();
    for (const auto& [canvas, patch] : g) members.push_back({canvas, patch});
    groups.push_back(members);
  }
  return {{"grid",
           {{"patch_size", plan.grid.patch_size},
            {"width", plan.grid.width},
            {"height", plan.grid.height},
            {"cols", plan.grid.cols},
            {"rows", plan.grid.rows}}},
          {"canvases", canvases},
          {"shared_groups", groups},
          {"total_kept", plan.total_kept()}};
}

json assignment_to_json(const Assignment& a) {
  json pairs = json::array();
  for (const auto& [i, j] : a.pairs) pairs.push_back({i, j});
  return {{"pairs", pairs},
          {"unmatched_rows", a.unmatched_rows},
          {"unmatched_cols", a.unmatched_cols},
          {"total_cost", a.total_cost}};
}

json breakdown_to_json(const RewardBreakdown& b) {
  return {{"count", b.count},
          {"quality", b.quality},
          {"face", b.face},
          {"pose", b.pose},
          {"composite", b.composite}};
}

std::vector<double> parse_csv_doubles(std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::istringstream is{std::string(text)};
  while (std::getline(is, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InputError("not a number: \"" + item + "\"");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw InputError("not a number: \"" + item + "\"");
    out.push_back(v);
  }
  return out;
}

RewardWeights parse_weights(std::string_view text) {
  const auto v = parse_csv_doubles(text);
  if (v.size() != 4) throw InputError("weights must be four comma-separated numbers a,b,z,e");
  RewardWeights w{v[0], v[1], v[2], v[3]};
  w.validate();
  return w;
}

int quantize_coordinate(double v) {
  if (!std::isfinite(v)) throw DomainError("cannot quantize a non-finite coordinate");
  const long q = std::lround(std::clamp(v, 0.0, 1.0) * kCoordinateBins);
  return static_cast<int>(q);
}

double dequantize_coordinate(int q) { return static_cast<double>(q) / kCoordinateBins; }

}  // namespace ar2can
