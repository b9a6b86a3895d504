#include "scenekg/scene_ir.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace scenekg {

using nlohmann::json;

namespace {

constexpr std::string_view kDividerNames[] = {"NoMarking",   "SingleDashed", "DoubleDashed", "SingleSolid",
                                              "DoubleSolid", "SolidDashed",  "DashedSolid",  "RoadEdge"};
constexpr std::string_view kStopNames[] = {"PedCrossing", "TrafficLight", "Yield", "StopSign", "Turn"};
constexpr std::string_view kCategoryNames[] = {
    "human.pedestrian.adult",
    "human.pedestrian.child",
    "human.pedestrian.wheelchair",
    "human.pedestrian.stroller",
    "human.pedestrian.personal_mobility",
    "human.pedestrian.police_officer",
    "human.pedestrian.construction_worker",
    "animal",
    "vehicle.car",
    "vehicle.motorcycle",
    "vehicle.bicycle",
    "vehicle.bus.bendy",
    "vehicle.bus.rigid",
    "vehicle.truck",
    "vehicle.construction",
    "vehicle.emergency.ambulance",
    "vehicle.emergency.police",
    "vehicle.trailer",
    "movable_object.barrier",
    "movable_object.trafficcone",
    "movable_object.pushable_pullable",
    "movable_object.debris",
    "static_object.bicycle_rack",
};
constexpr std::string_view kSplitNames[] = {"train", "val", "test"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::string_view (&names)[N], std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(std::string_view text, std::size_t line_offset) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the failure point.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    auto [line, col] = line_column(text, byte);
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError(msg, line + line_offset, col, "");
  }
}

// Walks a json value while tracking the path for error messages.
class Reader {
 public:
  Reader(const json& v, std::string path, std::size_t line) : v_(v), path_(std::move(path)), line_(line) {}

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line_, 0, path_); }

  const json& value() const { return v_; }
  const std::string& path() const { return path_; }

  Reader at(std::string_view key) const {
    require_object();
    const auto it = v_.find(key);
    if (it == v_.end()) fail("missing key '" + std::string(key) + "'");
    return Reader(*it, child(key), line_);
  }

  std::optional<Reader> maybe(std::string_view key) const {
    require_object();
    const auto it = v_.find(key);
    if (it == v_.end() || it->is_null()) return std::nullopt;
    return Reader(*it, child(key), line_);
  }

  Reader index(std::size_t i) const { return Reader(v_[i], path_ + "[" + std::to_string(i) + "]", line_); }

  std::size_t array_size() const {
    if (!v_.is_array()) fail("expected an array");
    return v_.size();
  }

  std::string string() const {
    if (!v_.is_string()) fail("expected a string");
    return v_.get<std::string>();
  }

  std::string id() const {
    std::string s = string();
    if (s.empty()) fail("empty id");
    return s;
  }

  double number() const {
    if (!v_.is_number()) fail("expected a number");
    const double d = v_.get<double>();
    if (!std::isfinite(d)) fail("non-finite number");
    return d;
  }

  std::int64_t integer() const {
    if (!v_.is_number_integer()) fail("expected an integer");
    return v_.get<std::int64_t>();
  }

  bool boolean() const {
    if (!v_.is_boolean()) fail("expected a boolean");
    return v_.get<bool>();
  }

  Vec2 point() const {
    if (!v_.is_array() || v_.size() != 2) fail("expected an [x, y] pair");
    return {index(0).number(), index(1).number()};
  }

  std::vector<Vec2> points() const {
    std::vector<Vec2> out;
    const std::size_t n = array_size();
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(index(i).point());
    return out;
  }

  Polyline polyline() const {
    try {
      return Polyline(points());
    } catch (const geom::GeometryError& e) {
      fail(e.what());
    }
  }

  Polygon polygon() const {
    try {
      Polygon poly(points());
      if (!poly.is_simple()) fail("polygon is not simple");
      return poly;
    } catch (const geom::GeometryError& e) {
      fail(e.what());
    }
  }

  Pose2D pose() const {
    if (!v_.is_array() || v_.size() != 3) fail("expected an [x, y, yaw] triple");
    return {index(0).number(), index(1).number(), geom::normalize_angle(index(2).number())};
  }

  template <typename E>
  E enumerated(std::optional<E> (*from)(std::string_view), std::string_view what) const {
    const std::string s = string();
    const auto e = from(s);
    if (!e) fail("unknown " + std::string(what) + " '" + s + "'");
    return *e;
  }

 private:
  void require_object() const {
    if (!v_.is_object()) fail("expected an object");
  }
  std::string child(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json& v_;
  std::string path_;
  std::size_t line_;
};

RawLocation read_location(const Reader& r) {
  RawLocation loc;
  loc.id = r.at("id").id();
  if (auto n = r.maybe("name")) loc.name = n->string();
  if (auto rh = r.maybe("right_hand_traffic")) loc.right_hand_traffic = rh->boolean();
  if (auto geo = r.maybe("geo_origin")) {
    const Vec2 p = geo->point();
    if (std::abs(p.x) > 90.0 || std::abs(p.y) > 180.0) geo->fail("geo_origin out of range");
    loc.geo_origin = geom::LatLon{p.x, p.y};
  }
  return loc;
}

std::vector<BorderSegment> read_border(const Reader& r) {
  std::vector<BorderSegment> out;
  const std::size_t n = r.array_size();
  for (std::size_t i = 0; i < n; ++i) {
    const Reader seg = r.index(i);
    out.push_back({seg.at("line").polyline(), seg.at("divider").enumerated(divider_from_string, "divider type")});
  }
  return out;
}

RawArea read_area(const Reader& r, AreaKind kind) {
  RawArea a{r.at("id").id(), kind, r.at("polygon").polygon(), false};
  if (kind == AreaKind::RoadSegment) {
    if (auto flag = r.maybe("is_intersection")) a.is_intersection = flag->boolean();
  }
  return a;
}

template <typename F>
void for_each_item(const Reader& root, std::string_view key, F&& f) {
  const auto list = root.maybe(key);
  if (!list) return;
  const std::size_t n = list->array_size();
  for (std::size_t i = 0; i < n; ++i) f(list->index(i));
}

json point_json(Vec2 p) { return json::array({p.x, p.y}); }

json points_json(std::span<const Vec2> pts) {
  json a = json::array();
  for (const Vec2& p : pts) a.push_back(point_json(p));
  return a;
}

json pose_json(const Pose2D& p) { return json::array({p.x, p.y, p.yaw}); }

json location_json(const RawLocation& loc) {
  json j = {{"id", loc.id}, {"name", loc.name}, {"right_hand_traffic", loc.right_hand_traffic}};
  if (loc.geo_origin) j["geo_origin"] = json::array({loc.geo_origin->lat, loc.geo_origin->lon});
  return j;
}

json border_json(const std::vector<BorderSegment>& border) {
  json a = json::array();
  for (const auto& seg : border) {
    a.push_back({{"line", points_json(seg.line.points())}, {"divider", to_string(seg.divider)}});
  }
  return a;
}

json area_list(const std::vector<RawArea>& areas) {
  json a = json::array();
  for (const auto& area : areas) {
    json j = {{"id", area.id}, {"polygon", points_json(area.polygon.vertices())}};
    if (area.kind == AreaKind::RoadSegment) j["is_intersection"] = area.is_intersection;
    a.push_back(std::move(j));
  }
  return a;
}

}  // namespace

std::string_view to_string(DividerType v) { return kDividerNames[static_cast<int>(v)]; }
std::string_view to_string(StopType v) { return kStopNames[static_cast<int>(v)]; }
std::string_view to_string(TrafficLightType v) { return v == TrafficLightType::Horizontal ? "H" : "V"; }
std::string_view to_string(Category v) { return kCategoryNames[static_cast<int>(v)]; }
std::string_view to_string(Split v) { return kSplitNames[static_cast<int>(v)]; }

std::optional<DividerType> divider_from_string(std::string_view s) { return lookup<DividerType>(kDividerNames, s); }
std::optional<StopType> stop_type_from_string(std::string_view s) { return lookup<StopType>(kStopNames, s); }
std::optional<TrafficLightType> tl_type_from_string(std::string_view s) {
  if (s == "H") return TrafficLightType::Horizontal;
  if (s == "V") return TrafficLightType::Vertical;
  return std::nullopt;
}
std::optional<Category> category_from_string(std::string_view s) { return lookup<Category>(kCategoryNames, s); }
std::optional<Split> split_from_string(std::string_view s) { return lookup<Split>(kSplitNames, s); }

bool is_vehicle(Category c) { return to_string(c).starts_with("vehicle."); }

ParseError::ParseError(std::string message, std::size_t line, std::size_t column, std::string path)
    : std::runtime_error([&] {
        std::string where;
        if (line > 0) where = "line " + std::to_string(line);
        if (column > 0) where += ", column " + std::to_string(column);
        if (!path.empty()) where += (where.empty() ? "at " : " at ") + path;
        return where.empty() ? message : where + ": " + message;
      }()),
      line_(line),
      column_(column),
      path_(std::move(path)),
      detail_(std::move(message)) {}

ReferenceError::ReferenceError(std::vector<std::string> ids)
    : std::runtime_error([&] {
        std::string msg = "dangling reference(s):";
        for (const auto& id : ids) msg += " " + id;
        return msg;
      }()),
      ids_(std::move(ids)) {}

std::optional<geom::LatLon> RawMapBundle::geo_origin() const {
  for (const auto& loc : locations) {
    if (loc.geo_origin) return loc.geo_origin;
  }
  return std::nullopt;
}

geom::BoundingBox RawMapBundle::bounds() const {
  geom::BoundingBox box;
  for (const auto& l : lanes) box.extend(l.polygon.bounds());
  for (const auto& c : connectors) box.extend(c.centerline.bounds());
  for (const auto* list : {&walkways, &ped_crossings, &road_segments, &carpark_areas}) {
    for (const auto& a : *list) box.extend(a.polygon.bounds());
  }
  for (const auto& s : stop_lines) box.extend(s.polygon.bounds());
  for (const auto& t : traffic_lights) box.extend(t.pose.position());
  return box;
}

RawMapBundle parse_map_bundle(std::string_view text) {
  const json doc = parse_json(text, 0);
  const Reader root(doc, "", 0);
  if (!doc.is_object()) root.fail("map bundle must be a JSON object");
  const Reader version = root.at("format_version");
  if (version.string() != "1") version.fail("unsupported format_version '" + version.string() + "'");

  RawMapBundle map;
  for_each_item(root, "locations", [&](const Reader& r) { map.locations.push_back(read_location(r)); });
  for_each_item(root, "lanes", [&](const Reader& r) {
    RawLane lane{r.at("id").id(), r.at("centerline").polyline(), read_border(r.at("left_border")),
                 read_border(r.at("right_border")), r.at("polygon").polygon(), std::nullopt};
    if (lane.left_border.empty() || lane.right_border.empty()) r.fail("lane needs both borders");
    if (auto seg = r.maybe("road_segment_id")) lane.road_segment_id = seg->id();
    map.lanes.push_back(std::move(lane));
  });
  for_each_item(root, "lane_connectors", [&](const Reader& r) {
    RawConnector c{r.at("id").id(), r.at("incoming_lane").id(), r.at("outgoing_lane").id(),
                   r.at("centerline").polyline()};
    if (c.incoming_lane == c.outgoing_lane) r.fail("connector joins a lane to itself");
    map.connectors.push_back(std::move(c));
  });
  for_each_item(root, "walkways", [&](const Reader& r) { map.walkways.push_back(read_area(r, AreaKind::Walkway)); });
  for_each_item(root, "ped_crossings",
                [&](const Reader& r) { map.ped_crossings.push_back(read_area(r, AreaKind::PedCrossing)); });
  for_each_item(root, "stop_lines", [&](const Reader& r) {
    RawStopLine s{r.at("id").id(), r.at("polygon").polygon(), r.at("stop_type").enumerated(stop_type_from_string, "stop type"),
                  std::nullopt};
    if (auto cause = r.maybe("cause_ref")) s.cause_ref = cause->id();
    map.stop_lines.push_back(std::move(s));
  });
  for_each_item(root, "traffic_lights", [&](const Reader& r) {
    map.traffic_lights.push_back(
        {r.at("id").id(), r.at("pose").pose(), r.at("tl_type").enumerated(tl_type_from_string, "traffic light type")});
  });
  for_each_item(root, "road_segments",
                [&](const Reader& r) { map.road_segments.push_back(read_area(r, AreaKind::RoadSegment)); });
  for_each_item(root, "carpark_areas",
                [&](const Reader& r) { map.carpark_areas.push_back(read_area(r, AreaKind::CarparkArea)); });

  std::unordered_set<std::string> ids;
  std::vector<std::string> duplicates;
  auto claim = [&](const std::string& id) {
    if (!ids.insert(id).second) duplicates.push_back(id);
  };
  for (const auto& l : map.lanes) claim(l.id);
  for (const auto& c : map.connectors) claim(c.id);
  for (const auto* list : {&map.walkways, &map.ped_crossings, &map.road_segments, &map.carpark_areas}) {
    for (const auto& a : *list) claim(a.id);
  }
  for (const auto& s : map.stop_lines) claim(s.id);
  for (const auto& t : map.traffic_lights) claim(t.id);
  if (!duplicates.empty()) throw ParseError("duplicate map record id '" + duplicates.front() + "'", 0, 0, "");

  std::unordered_set<std::string> lane_ids;
  for (const auto& l : map.lanes) lane_ids.insert(l.id);
  std::unordered_set<std::string> segment_ids;
  for (const auto& s : map.road_segments) segment_ids.insert(s.id);
  std::set<std::string> dangling;
  for (const auto& c : map.connectors) {
    if (!lane_ids.count(c.incoming_lane)) dangling.insert(c.incoming_lane);
    if (!lane_ids.count(c.outgoing_lane)) dangling.insert(c.outgoing_lane);
  }
  for (const auto& l : map.lanes) {
    if (l.road_segment_id && !segment_ids.count(*l.road_segment_id)) dangling.insert(*l.road_segment_id);
  }
  if (!dangling.empty()) throw ReferenceError({dangling.begin(), dangling.end()});
  for (const auto& s : map.stop_lines) {
    if (s.cause_ref && !ids.count(*s.cause_ref)) {
      map.warnings.push_back("stop line " + s.id + " references unknown cause '" + *s.cause_ref + "'");
    }
  }
  return map;
}

RawTripSet parse_trip_log(std::string_view text) {
  RawTripSet set;
  std::size_t line_no = 0;
  std::size_t start = 0;
  std::unordered_set<std::string> trip_ids;
  std::unordered_set<std::string> sequence_ids;
  struct AgentIdentity {
    Category category;
    Size3 size;
  };
  std::unordered_map<std::string, AgentIdentity> agents;

  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    const json doc = parse_json(line, line_no - 1);
    const Reader root(doc, "", line_no);
    if (!doc.is_object()) root.fail("each line must be a JSON object");
    if (auto loc = root.maybe("location")) {
      set.locations.push_back(read_location(*loc));
      continue;
    }

    RawTrip trip;
    trip.id = root.at("id").id();
    if (!trip_ids.insert(trip.id).second) root.at("id").fail("duplicate trip id '" + trip.id + "'");
    trip.location_id = root.at("location_id").id();
    const Reader seqs = root.at("sequences");
    for (std::size_t si = 0; si < seqs.array_size(); ++si) {
      const Reader sr = seqs.index(si);
      RawSequence seq;
      seq.id = sr.at("id").id();
      if (!sequence_ids.insert(seq.id).second) sr.at("id").fail("duplicate sequence id '" + seq.id + "'");
      const Reader scenes = sr.at("scenes");
      if (scenes.array_size() == 0) scenes.fail("sequence has no scenes");
      for (std::size_t k = 0; k < scenes.array_size(); ++k) {
        const Reader sc = scenes.index(k);
        RawScene scene;
        scene.timestamp_us = sc.at("timestamp").integer();
        if (!seq.scenes.empty() && scene.timestamp_us <= seq.scenes.back().timestamp_us) {
          sc.at("timestamp").fail("non-monotone timestamp at scene index " + std::to_string(k));
        }
        scene.ego_pose = sc.at("ego_pose").pose();
        const Reader anns = sc.at("annotations");
        std::size_t ego_count = 0;
        std::unordered_set<std::string> seen;
        for (std::size_t ai = 0; ai < anns.array_size(); ++ai) {
          const Reader ar = anns.index(ai);
          RawAnnotation a;
          a.agent_id = ar.at("agent_id").id();
          if (!seen.insert(a.agent_id).second) ar.fail("agent '" + a.agent_id + "' annotated twice in one scene");
          if (auto ego = ar.maybe("is_ego")) a.is_ego = ego->boolean();
          if (auto cat = ar.maybe("category")) {
            a.category = cat->enumerated(category_from_string, "category");
          } else if (!a.is_ego) {
            ar.fail("missing key 'category'");
          }
          a.pose = ar.at("pose").pose();
          const Reader size = ar.at("size");
          if (!size.value().is_array() || size.value().size() != 3) size.fail("expected [length, width, height]");
          a.size = {size.index(0).number(), size.index(1).number(), size.index(2).number()};
          if (a.size.length <= 0 || a.size.width <= 0 || a.size.height <= 0) size.fail("size components must be > 0");
          if (a.is_ego) {
            ++ego_count;
            const Pose2D& e = scene.ego_pose;
            if (geom::distance(e.position(), a.pose.position()) > 1e-6 ||
                std::abs(geom::normalize_angle(e.yaw - a.pose.yaw)) > 1e-6) {
              ar.fail("ego annotation disagrees with ego_pose");
            }
          }
          const auto [it, inserted] = agents.try_emplace(a.agent_id, AgentIdentity{a.category, a.size});
          if (!inserted) {
            const auto& known = it->second;
            if (known.category != a.category) ar.fail("agent '" + a.agent_id + "' changes category");
            if (std::abs(known.size.length - a.size.length) > 1e-9 || std::abs(known.size.width - a.size.width) > 1e-9 ||
                std::abs(known.size.height - a.size.height) > 1e-9) {
              ar.fail("agent '" + a.agent_id + "' changes size");
            }
          }
          scene.annotations.push_back(std::move(a));
        }
        if (ego_count != 1) sc.fail("scene must contain exactly one ego annotation, found " + std::to_string(ego_count));
        seq.scenes.push_back(std::move(scene));
      }
      trip.sequences.push_back(std::move(seq));
    }
    set.trips.push_back(std::move(trip));
    if (end == text.size()) break;
  }
  return set;
}

SplitTable parse_splits(std::string_view text) {
  const json doc = parse_json(text, 0);
  const Reader root(doc, "", 0);
  if (!doc.is_object()) root.fail("splits must be a JSON object");
  SplitTable table;
  for (const auto& [key, value] : doc.items()) {
    const Reader r(value, key, 0);
    table[key] = r.enumerated(split_from_string, "split");
  }
  return table;
}

std::string serialize_map_bundle(const RawMapBundle& map) {
  json doc;
  doc["format_version"] = "1";
  doc["locations"] = json::array();
  for (const auto& loc : map.locations) doc["locations"].push_back(location_json(loc));
  doc["lanes"] = json::array();
  for (const auto& l : map.lanes) {
    json j = {{"id", l.id},
              {"centerline", points_json(l.centerline.points())},
              {"left_border", border_json(l.left_border)},
              {"right_border", border_json(l.right_border)},
              {"polygon", points_json(l.polygon.vertices())}};
    if (l.road_segment_id) j["road_segment_id"] = *l.road_segment_id;
    doc["lanes"].push_back(std::move(j));
  }
  doc["lane_connectors"] = json::array();
  for (const auto& c : map.connectors) {
    doc["lane_connectors"].push_back({{"id", c.id},
                                      {"incoming_lane", c.incoming_lane},
                                      {"outgoing_lane", c.outgoing_lane},
                                      {"centerline", points_json(c.centerline.points())}});
  }
  doc["walkways"] = area_list(map.walkways);
  doc["ped_crossings"] = area_list(map.ped_crossings);
  doc["stop_lines"] = json::array();
  for (const auto& s : map.stop_lines) {
    json j = {{"id", s.id}, {"polygon", points_json(s.polygon.vertices())}, {"stop_type", to_string(s.stop_type)}};
    if (s.cause_ref) j["cause_ref"] = *s.cause_ref;
    doc["stop_lines"].push_back(std::move(j));
  }
  doc["traffic_lights"] = json::array();
  for (const auto& t : map.traffic_lights) {
    doc["traffic_lights"].push_back({{"id", t.id}, {"pose", pose_json(t.pose)}, {"tl_type", to_string(t.tl_type)}});
  }
  doc["road_segments"] = area_list(map.road_segments);
  doc["carpark_areas"] = area_list(map.carpark_areas);
  return doc.dump() + "\n";
}

std::string serialize_trip_log(const RawTripSet& trips) {
  std::string out;
  for (const auto& loc : trips.locations) out += json{{"location", location_json(loc)}}.dump() + "\n";
  for (const auto& trip : trips.trips) {
    json t = {{"id", trip.id}, {"location_id", trip.location_id}, {"sequences", json::array()}};
    for (const auto& seq : trip.sequences) {
      json s = {{"id", seq.id}, {"scenes", json::array()}};
      for (const auto& scene : seq.scenes) {
        json sc = {{"timestamp", scene.timestamp_us}, {"ego_pose", pose_json(scene.ego_pose)}, {"annotations", json::array()}};
        for (const auto& a : scene.annotations) {
          sc["annotations"].push_back({{"agent_id", a.agent_id},
                                       {"category", to_string(a.category)},
                                       {"pose", pose_json(a.pose)},
                                       {"size", json::array({a.size.length, a.size.width, a.size.height})},
                                       {"is_ego", a.is_ego}});
        }
        s["scenes"].push_back(std::move(sc));
      }
      t["sequences"].push_back(std::move(s));
    }
    out += t.dump() + "\n";
  }
  return out;
}

std::string serialize_splits(const SplitTable& splits) {
  json doc = json::object();
  for (const auto& [seq, split] : splits) doc[seq] = to_string(split);
  return doc.dump(2) + "\n";
}

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(issues.begin(), issues.end(), [](const ValidationIssue& i) {
    return i.severity == ValidationIssue::Severity::Error;
  }));
}

ValidationReport validate_raw(const RawMapBundle& map, const RawTripSet& trips) {
  ValidationReport report;
  std::unordered_set<std::string> locations;
  for (const auto& loc : map.locations) locations.insert(loc.id);
  for (const auto& loc : trips.locations) locations.insert(loc.id);

  const geom::BoundingBox extent = map.bounds();
  const geom::BoundingBox allowed = extent.inflated(kMapExtentMarginM);
  for (const auto& trip : trips.trips) {
    if (!locations.count(trip.location_id)) {
      report.issues.push_back({ValidationIssue::Severity::Error, "unknown-location",
                               "trip " + trip.id + " references unknown location '" + trip.location_id + "'"});
    }
    if (extent.empty()) continue;
    std::set<std::string> reported;
    for (const auto& seq : trip.sequences) {
      for (std::size_t k = 0; k < seq.scenes.size(); ++k) {
        for (const auto& a : seq.scenes[k].annotations) {
          if (allowed.contains(a.pose.position()) || reported.count(a.agent_id)) continue;
          reported.insert(a.agent_id);
          report.issues.push_back({ValidationIssue::Severity::Warning, "outside-map-extent",
                                   "agent " + a.agent_id + " in sequence " + seq.id + " scene " + std::to_string(k) +
                                       " is outside map extent"});
        }
      }
    }
  }
  return report;
}

}  // namespace scenekg
