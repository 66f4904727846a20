// SPDX-License-Identifier: Apache-2.0
#ifndef EFFCAP_JSON_IO_HPP
#define EFFCAP_JSON_IO_HPP

#include <string>

#include "effcap/channels.hpp"
#include "effcap/mixfit.hpp"

namespace effcap::json_io {

// Serialization keeps every double value-exact across a round trip
// (shortest correctly-rounded decimal).
//
// Channel object: {"alpha","eta","mu","b","omega","format"},
//   format in {"format1","format2"}.
// Models are tagged: {"type":"mg","terms":[{"phi","vartheta","xi"},...]}
//   and {"type":"mog","gamma_bar":..,"comps":[{"rho","upsilon","psi"},...]}.

std::string to_json(const channels::ChannelParams& params);
std::string to_json(const mixfit::MGModel& model);
std::string to_json(const mixfit::MoGModel& model);

/// Throw effcap::parse_error on malformed JSON, missing/mistyped keys,
/// or values outside the type's documented domain.
channels::ChannelParams channel_from_json(const std::string& text);
mixfit::MGModel mg_from_json(const std::string& text);
mixfit::MoGModel mog_from_json(const std::string& text);

}  // namespace effcap::json_io

#endif
