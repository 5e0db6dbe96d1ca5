#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "steam/active.hpp"
#include "steam/efficacy.hpp"
#include "steam/model.hpp"
#include "steam/search.hpp"

namespace steam {

using json = nlohmann::json;

/// Malformed document; path() is a JSON pointer to the offending field.
class SchemaError : public std::runtime_error {
public:
  SchemaError(std::string path, const std::string &what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string &path() const { return path_; }

private:
  std::string path_;
};

json save_instance(const ProblemDomain &domain);
/// Throws SchemaError.
ProblemDomain load_instance(const json &document);
ProblemDomain load_instance_text(std::string_view text);

json efficacy_to_json(const EfficacyModel &model);
EfficacyModel efficacy_from_json(const json &document, const std::string &path = "/efficacy");

/// {"allocation", "starts", "makespan", "efficacy", "bounds", "stats"}.
/// Infeasible reports carry "infeasible": true and null solution fields.
json solution_to_json(const SearchReport &report);

json config_to_json(const LearnerConfig &config);
LearnerConfig config_from_json(const json &document);

} // namespace steam
