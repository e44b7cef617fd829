#pragma once

#include "wayfind/config.hpp"
#include "wayfind/environment.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace wayfind {

struct Scenario {
  Environment environment;
  Task task;
  SimulationConfig config;
};

/// One problem found in a scenario document; `path` locates the offending element,
/// e.g. `signs[3].entries[0].goal_point`.
struct Issue {
  std::string path;
  std::string message;
};

std::string to_string(const Issue& issue);

/// Malformed document (not JSON).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed document that breaks the schema or a data-model invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Issue> issues);
  const std::vector<Issue>& issues() const { return issues_; }

 private:
  std::vector<Issue> issues_;
};

/// The scenario file could not be read.
class ScenarioIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses and validates a scenario document; throws ParseError or ValidationError.
Scenario load_scenario(const std::string& document);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Invariant checks on an already-parsed scenario; empty when clean.
std::vector<Issue> validate_scenario(const Scenario& scenario);

/// Serializes a scenario back to a document that `load_scenario` accepts.
std::string write_scenario(const Scenario& scenario);

}  // namespace wayfind
