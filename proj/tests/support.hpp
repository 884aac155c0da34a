#pragma once

#include <string>

#include "errml/composer.hpp"
#include "errml/dsl.hpp"
#include "errml/instance.hpp"

namespace support {

inline std::string fixture(const std::string& name) {
  return std::string(ERRML_MODELS_DIR) + "/" + name;
}

inline errml::Model load(const std::string& name) {
  auto r = errml::dsl::parse_file(fixture(name));
  if (!r.ok()) throw std::runtime_error("fixture " + name + " does not parse");
  return r.model;
}

inline errml::InstanceModel instance(const std::string& name, int iteration,
                                     const errml::ParameterMap& params = {}) {
  return errml::instantiate(load(name), iteration, params);
}

inline errml::Ctmc chain(const std::string& name, int iteration,
                         const errml::ParameterMap& params = {}) {
  return errml::compose::compose(instance(name, iteration, params));
}

/// "EFR"-style code of a pipeline state, one letter per compute thread.
inline std::string triple(const errml::InstanceModel& inst, const errml::GlobalState& s) {
  std::string out;
  for (const char* name : {"Pipeline.Compute1", "Pipeline.Compute2", "Pipeline.Compute3"}) {
    auto a = *inst.find(name);
    const std::string& local = inst.automata[a].states[s[a]];
    out += local == "Error_Free" ? 'E' : local == "Failed" ? 'F' : 'R';
  }
  return out;
}

}  // namespace support
