#pragma once

#include <map>
#include <string>

#include <boost/property_tree/ptree.hpp>

#include "nfloc/harness.hpp"

namespace nfloc::cli {

/// Raised for anything wrong with the configuration file or a flag value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  ExperimentConfig experiment;
  double heatmap_resolution_m = 1.0;
};

/// Every recognised key with its default, in file order ("section.key" -> text).
const std::vector<std::pair<std::string, std::string>>& default_keys();

/// Reads an INI file (empty path: defaults only) and applies `overrides`
/// ("section.key" -> value) on top. Unknown keys are rejected.
boost::property_tree::ptree load_tree(const std::string& path,
                                      const std::map<std::string, std::string>& overrides);

CliConfig from_tree(const boost::property_tree::ptree& tree);

/// Writes the fully resolved tree back out in INI form.
void write_tree(const std::string& path, const boost::property_tree::ptree& tree);

}  // namespace nfloc::cli
