#include "svam/types.hpp"

#include <cmath>

namespace svam {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::rr: return "rr";
    case Task::me: return "me";
    case Task::gamma: return "gamma";
    case Task::lr: return "lr";
  }
  return "?";
}

Task parse_task(std::string_view name) {
  if (name == "rr") return Task::rr;
  if (name == "me") return Task::me;
  if (name == "gamma") return Task::gamma;
  if (name == "lr") return Task::lr;
  throw ParameterError("unknown task '" + std::string(name) + "' (expected rr|me|gamma|lr)");
}

Scale::Scale(double beta) : beta_(beta) {
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw DomainError("scale beta must be finite and > 0, got " + std::to_string(beta));
  }
}

}  // namespace svam
