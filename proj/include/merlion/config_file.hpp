#pragma once

#include "merlion/synth.hpp"
#include "merlion/types.hpp"

#include <map>
#include <string>

namespace merlion {

// key = value text files, '#' comments, blank lines ignored.
std::map<std::string, std::string> read_key_values(const std::string& path);

SamplerConfig sampler_config_from(const std::map<std::string, std::string>& kv);
SamplerConfig read_sampler_config(const std::string& path);
void write_sampler_config(const SamplerConfig& config, const std::string& path);

SynthSpec synth_spec_from(const std::map<std::string, std::string>& kv);
SynthSpec read_synth_spec(const std::string& path);
void write_synth_spec(const SynthSpec& spec, const std::string& path);

}  // namespace merlion
