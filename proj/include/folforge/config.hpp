#pragma once

// Run configuration read from a TOML-style file:
//
//   # comment
//   [reasoner]
//   max_ground_clauses = 100000
//   [verify]
//   mode = "on-on"
//   [perturb]
//   kinds = ["OmitLastBracket", "SwapOperators"]
//
// Sections: reasoner, tokens, verify, endpoint, run, pipeline, perturb.
// Values are integers, decimals, true/false, double-quoted strings with the
// usual backslash escapes, or one-line arrays of strings. Unknown sections and keys
// are errors. Command-line flags override file values.

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "folforge/perturb.hpp"
#include "folforge/reasoner.hpp"
#include "folforge/verify.hpp"

namespace folforge {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  reasoner::Budget budget;
  bool strict_premises = false;  // [reasoner] strict

  verify::TokenPolicy tokens;

  verify::Mode mode = verify::Mode::None;
  verify::Instructions instructions;
  std::string corrector = "rule";  // rule | endpoint

  // [endpoint]; url/token fall back to FOLFORGE_GEN_URL / FOLFORGE_GEN_TOKEN.
  verify::EndpointConfig endpoint = verify::EndpointConfig::from_env();
  std::string corrector_url;  // empty: same URL as the generator

  std::optional<std::uint64_t> seed;  // [run]
  std::size_t workers = 1;

  bool strict_lints = false;  // [pipeline]

  double perturbed_fraction = 0.6;  // [perturb]
  std::vector<perturb::PerturbKind> kinds;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Applies `text` on top of `base`. Errors carry "line N: ".
Config parse_config(std::string_view text, Config base = {});
Config load_config(const std::string& path, Config base = {});

}  // namespace folforge
