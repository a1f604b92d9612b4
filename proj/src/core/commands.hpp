#pragma once

#include "core/json_io.hpp"
#include "core/persist.hpp"

namespace magweyl {

// JSON-in, JSON-out entry points shared by the C API and the CLI. Options are
// validated strictly (unknown keys are errors, field paths name the command:
// "count.mu", "scenario.name", "sweep.h_list[2]").
//
// Every command reads the scenario from
//   "scenario": "<name>" | {"name": "<name>", "overrides": {key: number}}
Json run_analyze(const Json& options);
Json run_weyl(const Json& options);
Json run_count(const Json& options);
Json run_reduce(const Json& options);
// {"sweep": {...}, "out": "<dir>" (optional), "workers": k}
Json run_sweep(const Json& options);

}  // namespace magweyl
