#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mvp/market.hpp"

namespace mvp {

/// Market definition documents are JSON objects:
///
///   {"horizon": T, "breakpoints": [0, ..., T], "rate": [r_k],
///    "mu": [[mu_1k, ..., mu_mk]], "sigma": [[[row], ...]], "delta": d}
///
/// with one rate / mu / sigma entry per interval. `delta` is optional.
/// Doubles are written in shortest round-trip form, so parse(dump(m))
/// reproduces every number bit for bit.
MarketModel parse_market(std::string_view text);
std::string dump_market(const MarketModel& model);

MarketModel load_market(const std::filesystem::path& path);
void save_market(const std::filesystem::path& path, const MarketModel& model);

}  // namespace mvp
