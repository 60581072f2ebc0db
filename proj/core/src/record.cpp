#include "tablemine/record.hpp"

#include <algorithm>

#include "tablemine/error.hpp"
#include "tablemine/text.hpp"

namespace tablemine {

bool is_property_key(std::string_view key) {
  return std::find(kPropertyKeys.begin(), kPropertyKeys.end(), key) != kPropertyKeys.end();
}

std::vector<std::string> validate(const ExtractionRecord& record) {
  std::vector<std::string> problems;
  for (const auto& [catalyst, performances] : record.catalysts) {
    if (catalyst.empty()) problems.push_back("empty catalyst name");
    for (const auto& [performance, properties] : performances) {
      if (performance.empty()) problems.push_back("empty performance name under '" + catalyst + "'");
      for (const auto& [key, value] : properties) {
        const std::string where = "'" + catalyst + "/" + performance + "/" + key + "'";
        if (!is_property_key(key)) problems.push_back("unknown property key " + where);
        if (value.empty()) problems.push_back("empty value at " + where);
      }
    }
  }
  return problems;
}

nlohmann::json catalysts_to_json(const CatalystMap& catalysts) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [catalyst, performances] : catalysts) {
    nlohmann::json jp = nlohmann::json::object();
    for (const auto& [performance, properties] : performances) {
      jp[performance] = properties;
    }
    j[catalyst] = std::move(jp);
  }
  return j;
}

nlohmann::json to_json(const ExtractionRecord& record) {
  return {{"source_id", record.provenance.source_id},
          {"table_index", record.provenance.table_index},
          {"row", record.provenance.row},
          {"catalysts", catalysts_to_json(record.catalysts)}};
}

std::string to_canonical_text(const ExtractionRecord& record) { return to_json(record).dump(2, ' ', false) + "\n"; }

namespace {

[[noreturn]] void reject(const std::string& why) { throw Error(ErrorCode::InvalidRecord, why); }

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return text::collapse_whitespace(v.get<std::string>());
  if (v.is_null()) return {};
  return v.dump(-1, ' ', false);
}

void parse_properties(const nlohmann::json& jp, PropertyMap& out, ParseMode mode, const std::string& where) {
  for (const auto& [raw_key, v] : jp.items()) {
    const std::string key = text::collapse_whitespace(raw_key);
    if (!is_property_key(key)) {
      if (mode == ParseMode::Strict) reject("unknown property key '" + raw_key + "' at " + where);
      continue;
    }
    if (mode == ParseMode::Strict && !v.is_string()) reject("non-string value at " + where + "/" + key);
    if (!v.is_primitive()) continue;
    std::string value = scalar_text(v);
    if (value.empty()) {
      if (mode == ParseMode::Strict) reject("empty value at " + where + "/" + key);
      continue;
    }
    out[key] = std::move(value);
  }
}

PerformanceMap parse_performances(const nlohmann::json& jc, ParseMode mode, const std::string& catalyst) {
  PerformanceMap out;
  if (!jc.is_object()) {
    if (mode == ParseMode::Strict) reject("catalyst '" + catalyst + "' must map to an object");
    return out;
  }
  for (const auto& [raw_name, jp] : jc.items()) {
    const std::string name = text::collapse_whitespace(raw_name);
    if (name.empty()) {
      if (mode == ParseMode::Strict) reject("empty performance name under '" + catalyst + "'");
      continue;
    }
    const std::string where = catalyst + "/" + name;
    if (jp.is_object()) {
      parse_properties(jp, out[name], mode, where);
    } else if (mode == ParseMode::Strict) {
      reject("performance '" + where + "' must map to an object");
    } else if (jp.is_array()) {
      int n = 0;
      for (const auto& item : jp) {
        if (!item.is_object()) continue;
        ++n;
        const std::string indexed = n == 1 ? name : name + " (" + std::to_string(n) + ")";
        parse_properties(item, out[indexed], mode, where);
      }
    } else if (jp.is_primitive() && !jp.is_null()) {
      if (std::string value = scalar_text(jp); !value.empty()) out[name]["value"] = std::move(value);
    }
  }
  return out;
}

}  // namespace

ExtractionRecord record_from_json(const nlohmann::json& j, ParseMode mode) {
  if (!j.is_object()) reject("record must be a JSON object");
  ExtractionRecord record;
  const nlohmann::json* catalysts = &j;
  if (j.contains("catalysts") && j["catalysts"].is_object()) {
    catalysts = &j["catalysts"];
    record.provenance.source_id = j.value("source_id", std::string{});
    record.provenance.table_index = j.value("table_index", 0);
    record.provenance.row = j.value("row", 0);
  }
  for (const auto& [raw_name, jc] : catalysts->items()) {
    const std::string name = text::collapse_whitespace(raw_name);
    if (name.empty()) {
      if (mode == ParseMode::Strict) reject("empty catalyst name");
      continue;
    }
    PerformanceMap performances = parse_performances(jc, mode, name);
    auto& slot = record.catalysts[name];
    for (auto& [k, v] : performances) slot[k] = std::move(v);
  }
  return record;
}

CatalystMap parse_model_output(std::string_view reply) {
  const std::size_t open = reply.find('{');
  const std::size_t close = reply.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw Error(ErrorCode::UnparseableOutput, "no JSON object in model reply");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(reply.substr(open, close - open + 1));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::UnparseableOutput, e.what());
  }
  try {
    return record_from_json(j, ParseMode::Lenient).catalysts;
  } catch (const Error& e) {
    throw Error(ErrorCode::UnparseableOutput, e.what());
  }
}

}  // namespace tablemine
