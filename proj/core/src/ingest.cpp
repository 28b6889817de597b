#include "guardrail/ingest.hpp"

#include <charconv>
#include <map>
#include <set>
#include <string_view>
#include <vector>

#include "guardrail/csv.hpp"
#include "guardrail/error.hpp"

namespace guardrail {

namespace {

struct Observation {
  std::string item;
  Date date;
  std::optional<double> value;
};

struct ItemMeta {
  std::string display_name;
  std::optional<double> population;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

[[noreturn]] void malformed(std::size_t row, std::size_t line, const std::string& why) {
  fail(ErrorKind::invalid_input, "malformed row " + std::to_string(row) + " (line " +
                                     std::to_string(line) + "): " + why);
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) return i;
  }
  fail(ErrorKind::invalid_input, "CSV header has no column '" + name + "'");
}

class Builder {
 public:
  void add(std::size_t row, std::size_t line, Observation obs, ItemMeta meta) {
    auto key = std::make_pair(obs.item, obs.date);
    if (!seen_.insert(key).second) {
      fail(ErrorKind::invalid_input, "duplicate observation for (" + obs.item + ", " +
                                         obs.date.iso() + ") at row " + std::to_string(row) +
                                         " (line " + std::to_string(line) + ")");
    }
    auto& m = meta_[obs.item];
    if (!meta.display_name.empty()) m.display_name = meta.display_name;
    if (meta.population) m.population = meta.population;
    if (obs.value) dates_.insert(obs.date);
    observations_.push_back(std::move(obs));
  }

  TimeSeriesDataset build(const DatasetMeta& meta) {
    if (observations_.empty()) fail(ErrorKind::invalid_input, "CSV input has no data rows");
    if (dates_.empty()) fail(ErrorKind::invalid_input, "CSV input has no observed values");
    std::vector<Date> timesteps(dates_.begin(), dates_.end());
    std::map<Date, std::size_t> date_index;
    for (std::size_t t = 0; t < timesteps.size(); ++t) date_index[timesteps[t]] = t;

    std::map<std::string, ItemSeries> items;
    for (const auto& [id, m] : meta_) {
      ItemSeries s;
      s.id = id;
      s.display_name = m.display_name.empty() ? id : m.display_name;
      s.values.assign(timesteps.size(), 0.0);
      s.missing.assign(timesteps.size(), 1);
      s.population = m.population;
      items.emplace(id, std::move(s));
    }
    for (const auto& obs : observations_) {
      if (!obs.value) continue;
      auto& s = items.at(obs.item);
      auto t = date_index.at(obs.date);
      s.values[t] = *obs.value;
      s.missing[t] = 0;
    }
    std::vector<ItemSeries> ordered;
    ordered.reserve(items.size());
    for (auto& [id, s] : items) ordered.push_back(std::move(s));
    return TimeSeriesDataset(meta.dataset_id, meta.direction, std::move(timesteps),
                             std::move(ordered), {});
  }

 private:
  std::vector<Observation> observations_;
  std::set<std::pair<std::string, Date>> seen_;
  std::set<Date> dates_;
  std::map<std::string, ItemMeta> meta_;
};

}  // namespace

TimeSeriesDataset ingest_long_csv(std::istream& source, const LongSchema& schema,
                                  const DatasetMeta& meta) {
  csv::Reader reader(source);
  auto header = reader.next();
  if (!header) fail(ErrorKind::invalid_input, "CSV input is empty");

  const auto c_item = column_index(*header, schema.item_id);
  const auto c_date = column_index(*header, schema.date);
  const auto c_value = column_index(*header, schema.value);
  std::optional<std::size_t> c_pop, c_name;
  if (schema.population) c_pop = column_index(*header, *schema.population);
  if (schema.display_name) c_name = column_index(*header, *schema.display_name);

  Builder builder;
  std::size_t row = 0;
  while (auto rec = reader.next()) {
    ++row;
    const auto line = reader.line();
    if (rec->size() == 1 && trim((*rec)[0]).empty()) continue;  // blank line
    if (rec->size() != header->size()) {
      malformed(row, line, "expected " + std::to_string(header->size()) + " fields, got " +
                               std::to_string(rec->size()));
    }
    Observation obs;
    obs.item = std::string(trim((*rec)[c_item]));
    if (obs.item.empty()) malformed(row, line, "empty item id");
    auto date = Date::parse(trim((*rec)[c_date]));
    if (!date) malformed(row, line, "bad date '" + (*rec)[c_date] + "'");
    obs.date = *date;
    auto raw_value = trim((*rec)[c_value]);
    if (!raw_value.empty()) {
      obs.value = parse_number(raw_value);
      if (!obs.value) malformed(row, line, "bad value '" + std::string(raw_value) + "'");
    }
    ItemMeta m;
    if (c_name) m.display_name = std::string(trim((*rec)[*c_name]));
    if (c_pop) {
      auto raw_pop = trim((*rec)[*c_pop]);
      if (!raw_pop.empty()) {
        m.population = parse_number(raw_pop);
        if (!m.population || *m.population <= 0) {
          malformed(row, line, "bad population '" + std::string(raw_pop) + "'");
        }
      }
    }
    builder.add(row, line, std::move(obs), std::move(m));
  }
  return builder.build(meta);
}

TimeSeriesDataset ingest_wide_csv(std::istream& source, const WideSchema& schema,
                                  const DatasetMeta& meta) {
  csv::Reader reader(source);
  auto header = reader.next();
  if (!header) fail(ErrorKind::invalid_input, "CSV input is empty");
  const auto c_date = column_index(*header, schema.date);

  Builder builder;
  std::size_t row = 0;
  while (auto rec = reader.next()) {
    ++row;
    const auto line = reader.line();
    if (rec->size() == 1 && trim((*rec)[0]).empty()) continue;
    if (rec->size() != header->size()) {
      malformed(row, line, "expected " + std::to_string(header->size()) + " fields, got " +
                               std::to_string(rec->size()));
    }
    auto date = Date::parse(trim((*rec)[c_date]));
    if (!date) malformed(row, line, "bad date '" + (*rec)[c_date] + "'");
    for (std::size_t c = 0; c < header->size(); ++c) {
      if (c == c_date) continue;
      Observation obs{std::string(trim((*header)[c])), *date, std::nullopt};
      auto raw = trim((*rec)[c]);
      if (!raw.empty()) {
        obs.value = parse_number(raw);
        if (!obs.value) malformed(row, line, "bad value '" + std::string(raw) + "'");
      }
      builder.add(row, line, std::move(obs), {});
    }
  }
  return builder.build(meta);
}

}  // namespace guardrail
