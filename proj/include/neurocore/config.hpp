#pragma once

// Sectioned key-value run configuration:
//
//   [simulation]            seed, duration_ms, transient_ms, backend, ...
//   [population NAME]       a, b, c, d, i_const, beta, v_peak
//   [generator NAME]        rate_hz, size
//   [connections]           PRE -> POST = weight, probability
//
// '#' starts a comment line.

#include <filesystem>
#include <string>
#include <string_view>

#include "neurocore/bg.hpp"

namespace neurocore {

/// Throws Error(parse) with "<source>:<line>: message", then validates.
BgConfig parse_config(std::string_view text, const std::string& source = "config");
BgConfig load_config(const std::filesystem::path& path);
std::string_view default_config_text() noexcept;

}  // namespace neurocore
