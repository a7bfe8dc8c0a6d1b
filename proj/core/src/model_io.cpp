#include "gsd/model_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "gsd/error.hpp"

namespace gsd {
namespace {

using nlohmann::json;

json to_json(const GaussianClassParams& p) {
  return {{"mean", p.mean}, {"std_dev", p.std_dev}, {"proportion", p.proportion}};
}

GaussianClassParams class_params(const json& j) {
  return {j.at("mean").get<double>(), j.at("std_dev").get<double>(),
          j.at("proportion").get<double>()};
}

}  // namespace

std::string serialize_model(const GsdModel& model) {
  json splits = json::array();
  for (const auto& s : model.splits) {
    splits.push_back({{"feature_index", s.feature_index},
                      {"alpha", s.alpha},
                      {"error", s.error},
                      {"class0", to_json(s.class0)},
                      {"class1", to_json(s.class1)}});
  }
  json beta = json::object();
  for (const auto& [feature, value] : model.calibration.beta) {
    beta[std::to_string(feature)] = value;
  }
  json doc = {
      {"schema_version", kModelSchemaVersion},
      {"seed", model.seed},
      {"tau", model.tau},
      {"em_config",
       {{"max_iterations", model.em_config.max_iterations},
        {"tolerance", model.em_config.tolerance},
        {"variance_floor", model.em_config.variance_floor}}},
      {"feature_names", model.feature_names},
      {"splits", std::move(splits)},
      {"beta", std::move(beta)},
      {"calibration_fallback", model.calibration.fallback},
      {"calibration_rounds", model.calibration.rounds},
  };
  return doc.dump(2) + "\n";
}

GsdModel deserialize_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(ErrorCode::parse_error,
                     fmt::format("malformed model document at byte {}: {}",
                                 e.byte, e.what()),
                     0, e.byte);
  }

  try {
    const json& version = doc.at("schema_version");
    const bool known =
        (version.is_number_integer() && version.get<int>() == kModelSchemaVersion) ||
        (version.is_string() &&
         version.get<std::string>() == std::to_string(kModelSchemaVersion));
    if (!known) {
      throw Error(ErrorCode::unsupported_version,
                  fmt::format("unsupported model schema_version {}", version.dump()));
    }

    GsdModel model;
    model.seed = doc.at("seed").get<std::uint64_t>();
    model.tau = doc.at("tau").get<double>();
    const json& em = doc.at("em_config");
    model.em_config.max_iterations = em.at("max_iterations").get<int>();
    model.em_config.tolerance = em.at("tolerance").get<double>();
    model.em_config.variance_floor = em.at("variance_floor").get<double>();
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    for (const json& s : doc.at("splits")) {
      model.splits.push_back({s.at("feature_index").get<std::size_t>(),
                              s.at("alpha").get<double>(),
                              s.at("error").get<double>(),
                              class_params(s.at("class0")),
                              class_params(s.at("class1"))});
    }
    for (const auto& [key, value] : doc.at("beta").items()) {
      model.calibration.beta[std::stoul(key)] = value.get<double>();
    }
    model.calibration.fallback =
        doc.at("calibration_fallback").get<std::set<std::size_t>>();
    model.calibration.rounds = doc.at("calibration_rounds").get<int>();
    model.validate();
    return model;
  } catch (const json::exception& e) {
    throw ParseError(ErrorCode::parse_error,
                     fmt::format("invalid model document: {}", e.what()), 0, 0);
  } catch (const std::invalid_argument&) {
    throw ParseError(ErrorCode::parse_error,
                     "invalid model document: non-numeric beta key", 0, 0);
  }
}

void save_model(const GsdModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::io_error,
                fmt::format("cannot open '{}' for writing", path.string()));
  }
  out << serialize_model(model);
}

GsdModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_error,
                fmt::format("cannot open '{}' for reading", path.string()));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace gsd
