#pragma once

#include <CLI11.hpp>

namespace wfmgf::cli {

/// Reads a flat JSON object whose keys are long option names of the active
/// subcommand (or of the top-level app). Arrays become repeated values.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;

 private:
  const CLI::App* root_;
};

}  // namespace wfmgf::cli
