#ifndef COEA_PRESETS_HPP
#define COEA_PRESETS_HPP

#include <json.hpp>

namespace coea::presets {

// Desk-scale defaults for the canned subcommands. A user config is merged on
// top of these (top-level keys replace the preset's).

inline nlohmann::json chi_sweep() {
    return {
        {"name", "chi-sweep"},
        {"algorithm", "CoEA"},
        {"game", {{"kind", "Diagonal"}}},
        {"grid",
         {{"n", {100}}, {"lambda", {"n"}}, {"chi", {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2}}, {"eps", {"exact"}}}},
        {"replicates", 30},
        {"budget", 10'000'000},
        {"init", "uniform"},
        {"master_seed", 2024},
        {"telemetry", "summary"},
        {"output_dir", "out/chi-sweep"},
    };
}

inline nlohmann::json scale_n() {
    return {
        {"name", "scale-n"},
        {"algorithm", "CoEA"},
        {"game", {{"kind", "Diagonal"}}},
        {"grid", {{"n", {100, 200}}, {"lambda", {"n"}}, {"chi", {0.6}}, {"eps", {"exact"}}}},
        {"replicates", 50},
        {"budget", 10'000'000},
        {"init", "uniform"},
        {"master_seed", 2024},
        {"telemetry", "summary"},
        {"output_dir", "out/scale-n"},
    };
}

/// Shared grid for the EA/CoEA comparison; `algorithm` is set per leg.
inline nlohmann::json ea_vs_coea() {
    return {
        {"name", "ea-vs-coea"},
        {"game", {{"kind", "Diagonal"}}},
        {"grid", {{"n", {200}}, {"lambda", {100}}, {"chi", {1.0}}, {"eps", {0.2}}}},
        {"replicates", 30},
        {"budget", 10'000'000},
        {"init", "uniform"},
        {"master_seed", 2024},
        {"telemetry", "summary"},
        {"output_dir", "out/ea-vs-coea"},
    };
}

}  // namespace coea::presets

#endif  // COEA_PRESETS_HPP
