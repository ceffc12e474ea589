#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "landscape/oracle.hpp"

namespace landscape {

// Named test functions:
//   quadratic                 diag(5, 2, 1)
//   quadratic-diag-a-b-...    diag(a, b, ...)
//   double-well               (x^2 - 1)^2
//   rosenbrock                params: dim (default 2)
//   gaussian-mixture          params: dim (2), basins (6), seed (0), spread (1)
//   mlp                       params: checkpoint (path, required), dataset (path,
//                             optional when the checkpoint sidecar embeds one)
// Unknown names raise UsageError listing the available ones.
std::unique_ptr<LossOracle> make_builtin(const std::string& name,
                                         const nlohmann::json& params = nlohmann::json::object());

std::vector<std::string> builtin_names();

}  // namespace landscape
