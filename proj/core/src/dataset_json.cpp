#include "guardrail/dataset_json.hpp"

#include <fstream>

#include "guardrail/error.hpp"

namespace guardrail {

Json to_json(const TransformDescriptor& d) {
  Json params = Json::object();
  for (const auto& [k, v] : d.params) params[k] = v;
  return {{"kind", std::string(to_string(d.kind))}, {"params", params}};
}

Json to_json(const TimeSeriesDataset& ds) {
  Json timesteps = Json::array();
  for (const auto& d : ds.timesteps()) timesteps.push_back(d.iso());
  Json log = Json::array();
  for (const auto& d : ds.transform_log()) log.push_back(to_json(d));
  Json items = Json::array();
  for (const auto& item : ds.items()) {
    Json values = Json::array();
    for (std::size_t t = 0; t < item.values.size(); ++t) {
      if (item.is_missing(t)) {
        values.push_back(nullptr);
      } else {
        values.push_back(item.values[t]);
      }
    }
    Json j = {{"id", item.id}, {"name", item.display_name}, {"values", std::move(values)}};
    if (item.population) j["population"] = *item.population;
    items.push_back(std::move(j));
  }
  return {{"dataset_id", ds.id()},
          {"direction", std::string(to_string(ds.direction()))},
          {"timesteps", std::move(timesteps)},
          {"transform_log", std::move(log)},
          {"items", std::move(items)}};
}

TimeSeriesDataset dataset_from_json(const Json& j) {
  try {
    std::vector<Date> timesteps;
    for (const auto& t : j.at("timesteps")) timesteps.push_back(Date::parse_or_throw(t.get<std::string>()));
    std::vector<TransformDescriptor> log;
    if (j.contains("transform_log")) {
      for (const auto& d : j.at("transform_log")) {
        TransformDescriptor desc{parse_transform_kind(d.at("kind").get<std::string>()), {}};
        if (d.contains("params")) {
          for (const auto& [k, v] : d.at("params").items()) desc.params[k] = v.get<std::string>();
        }
        log.push_back(std::move(desc));
      }
    }
    std::vector<ItemSeries> items;
    for (const auto& ji : j.at("items")) {
      ItemSeries s;
      s.id = ji.at("id").get<std::string>();
      s.display_name = ji.value("name", s.id);
      for (const auto& v : ji.at("values")) {
        if (v.is_null()) {
          s.values.push_back(0.0);
          s.missing.push_back(1);
        } else {
          s.values.push_back(v.get<double>());
          s.missing.push_back(0);
        }
      }
      if (ji.contains("population")) s.population = ji.at("population").get<double>();
      items.push_back(std::move(s));
    }
    return TimeSeriesDataset(j.at("dataset_id").get<std::string>(),
                             parse_direction(j.value("direction", "higher_is_better")),
                             std::move(timesteps), std::move(items), std::move(log));
  } catch (const Json::exception& e) {
    fail(ErrorKind::invalid_input, std::string("malformed dataset JSON: ") + e.what());
  }
}

TimeSeriesDataset load_dataset(const std::string& path) {
  return dataset_from_json(read_json_file(path));
}

void save_dataset(const TimeSeriesDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write '" + path + "'");
  out << canonical_dump(to_json(ds)) << '\n';
}

std::string dataset_digest(const TimeSeriesDataset& ds) {
  return sha256_hex(canonical_dump(to_json(ds)));
}

}  // namespace guardrail
