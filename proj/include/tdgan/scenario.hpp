#pragma once

#include <string>

#include "tdgan/federation.hpp"

namespace tdgan {

// Scenario text format: line-oriented `key = value` pairs under bracketed
// sections, `#` comments. Sections:
//
//   [scenario]   vocab_size, data_dim, seed, noise_dim, lambda, lr, beta1,
//                beta2, eps, m, n, d_iters, g_hidden, d_hidden, lr_schedule,
//                nonsaturating
//   [label <id>] one `component = w; mu = v,..; var = v,..` line per
//                mixture component of p(x|y)
//   [task <t>]   iterations, optional lambda/m/n/d_iters overrides, and one
//                `center = <name>; n = <count>; labels = <id>:<count>,...`
//                line per center online at step t
//
// Syntax problems throw ParseError with the line number; semantic problems
// throw ConfigError naming the offending key.
Scenario parse_scenario(const std::string& text);

Scenario load_scenario_file(const std::string& path);

// Canonical re-emission; parse(serialize(s)) reproduces s exactly (doubles
// are printed with round-trip precision).
std::string serialize_scenario(const Scenario& s);

}  // namespace tdgan
