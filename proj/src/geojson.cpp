#include "stacc/geojson.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "stacc/csv.hpp"

namespace stacc {

using nlohmann::json;

namespace {

Ring parse_ring(const json& coords, const std::string& where)
{
  if (!coords.is_array()) throw std::runtime_error(where + ": ring is not an array");
  Ring ring;
  ring.reserve(coords.size());
  for (const json& c : coords) {
    if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
      throw std::runtime_error(where + ": malformed coordinate");
    }
    ring.push_back({c[0].get<double>(), c[1].get<double>()});
  }
  return ring;
}

Polygon parse_polygon(const json& rings, const std::string& where)
{
  if (!rings.is_array() || rings.empty()) throw std::runtime_error(where + ": polygon has no rings");
  Polygon p;
  p.exterior = parse_ring(rings[0], where);
  for (std::size_t i = 1; i < rings.size(); ++i) p.holes.push_back(parse_ring(rings[i], where));
  try {
    validate_polygon(p);
  } catch (const GeometryError& e) {
    throw GeometryError(where + ": " + e.what());
  }
  return p;
}

std::string property_string(const json& v)
{
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return v.dump();
}

std::string crs_name(const json& doc)
{
  const auto it = doc.find("crs");
  if (it == doc.end() || !it->is_object()) return {};
  const json& props = it->value("properties", json::object());
  if (props.contains("name") && props["name"].is_string()) return props["name"].get<std::string>();
  return {};
}

}  // namespace

bool is_geographic_crs(const std::string& crs)
{
  std::string lower = crs;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  const bool epsg4326 = lower.find("epsg::4326") != std::string::npos ||
                        lower.find("epsg:4326") != std::string::npos;
  const bool crs84 = lower.find("crs84") != std::string::npos;
  return epsg4326 || crs84;
}

FeatureLayer parse_feature_layer(const std::string& text, const std::string& source)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(source + ": " + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features")) {
    throw std::runtime_error(source + ": not a GeoJSON FeatureCollection");
  }

  FeatureLayer layer;
  layer.crs = crs_name(doc);
  if (is_geographic_crs(layer.crs)) {
    throw std::runtime_error(source + ": geographic CRS '" + layer.crs +
                             "' is not supported; reproject to a planar CRS in meters");
  }

  std::size_t index = 0;
  for (const json& f : doc["features"]) {
    const std::string where = source + " feature #" + std::to_string(index++);
    Feature feature;
    const json props = f.value("properties", json::object());
    if (props.is_object()) {
      for (const auto& [key, value] : props.items()) {
        if (!value.is_null()) feature.properties[key] = property_string(value);
      }
    }
    if (props.is_object() && props.contains("id") && !props["id"].is_null()) {
      feature.id = property_string(props["id"]);
    } else if (f.contains("id") && !f["id"].is_null()) {
      feature.id = property_string(f["id"]);
    } else {
      throw std::runtime_error(where + ": missing id property");
    }

    const json& geom = f.at("geometry");
    const std::string type = geom.value("type", "");
    if (type == "Polygon") {
      feature.geometry.push_back(parse_polygon(geom.at("coordinates"), where));
    } else if (type == "MultiPolygon") {
      for (const json& poly : geom.at("coordinates")) {
        feature.geometry.push_back(parse_polygon(poly, where));
      }
    } else {
      throw std::runtime_error(where + ": unsupported geometry type '" + type + "'");
    }
    layer.features.push_back(std::move(feature));
  }
  return layer;
}

FeatureLayer read_feature_layer(const std::filesystem::path& path)
{
  std::ifstream in = csv::open_input(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_feature_layer(buf.str(), path.string());
}

bool looks_like_degrees(const FeatureLayer& layer)
{
  bool any = false;
  for (const Feature& f : layer.features) {
    for (const Polygon& p : f.geometry) {
      for (const Point& q : p.exterior) {
        any = true;
        if (std::abs(q.x) > 180.0 || std::abs(q.y) > 90.0) return false;
      }
    }
  }
  return any;
}

}  // namespace stacc
