// GeoJSON feature ingestion for zone and parcel layers.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stacc/geometry.hpp"

namespace stacc {

struct Feature {
  std::string id;
  MultiPolygon geometry;
  std::map<std::string, std::string> properties;  // string-valued properties only
};

struct FeatureLayer {
  std::vector<Feature> features;
  std::string crs;  // declared CRS name, empty when absent
};

/// Reads a FeatureCollection of Polygon/MultiPolygon features. Each feature
/// needs a string (or integer) `id` property. Layers that declare a
/// geographic CRS (EPSG:4326, CRS84) are refused: coordinates must be
/// projected meters.
FeatureLayer read_feature_layer(const std::filesystem::path& path);

FeatureLayer parse_feature_layer(const std::string& text, const std::string& source);

bool is_geographic_crs(const std::string& crs);

/// True when every coordinate lies in [-180,180]x[-90,90].
bool looks_like_degrees(const FeatureLayer& layer);

}  // namespace stacc
