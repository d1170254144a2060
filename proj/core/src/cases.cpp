#include "impdde/cases.hpp"

#include "impdde/error.hpp"

namespace impdde::cases {

namespace {

// Kept identical to data/example56.json and data/example1.json.
constexpr std::string_view kExample56 = R"json({
  "name": "example56",
  "a": "5 + abs(sin(sqrt(2)*t))",
  "T": 1,
  "terms": [
    {
      "b": "0.1*(1 + abs(sin(sqrt(3)*t)))",
      "alpha": 2,
      "tau": "sin(sqrt(3)/2*t)^2",
      "c": "0.1*(1 + abs(cos(sqrt(3)*t)))",
      "beta": 2,
      "v": "1",
      "harvest": "(1/20)*sin(sqrt(3)*t)^2*abs(x)/(10 + abs(x))",
      "harvest_lipschitz": 0.5,
      "sigma": "cos(sqrt(3)/2*t)^2"
    }
  ],
  "impulses": {
    "t0": 0,
    "period_count": 2,
    "period_length": 2,
    "offsets": [0, 1],
    "gamma": [-0.5, 1],
    "delta": [1, 0.5]
  },
  "declared_bounds": {
    "a": [5, 6],
    "b1": [0.1, 0.2],
    "c1": [0.1, 0.2],
    "tau1": [0, 1],
    "sigma1": [0, 1],
    "harvest1": [0, 0.05]
  }
}
)json";

constexpr std::string_view kExample1 = R"json({
  "name": "example1",
  "a": "1",
  "T": 1,
  "impulses": {
    "t0": 0,
    "period_count": 1,
    "period_length": 1,
    "offsets": [0],
    "gamma": [0],
    "delta": [-1]
  }
}
)json";

}  // namespace

std::vector<std::string> names() { return {"example1", "example56"}; }

std::string_view config_text(std::string_view name) {
  if (name == "example56") return kExample56;
  if (name == "example1") return kExample1;
  throw ConfigError("unknown case '" + std::string(name) + "' (expected example1 or example56)");
}

ModelSpec load(std::string_view name, const BoundOptions& options) { return load_model(config_text(name), options); }

}  // namespace impdde::cases
