#ifndef SKMAC_SCHEMA_HPP
#define SKMAC_SCHEMA_HPP

#include <string>

#include <json.hpp>

#include "core/ctproto.hpp"
#include "core/dist.hpp"
#include "core/iproto.hpp"

namespace skmac {

using Json = nlohmann::json;

// File schemas (field names are fixed):
//   channel       {"in1": k, "in2": k, "out": k, "w": [[[...]]]}   w[x1][x2][x3]
//   distribution  {"probs": [...]}
//   law           {"arity": [...], "table": [...]}                 row-major, last variable fastest
//   interactive protocol
//                 {"m": m, "obs": [...], "messages": [{"sender": 1-based, "alphabet": a, "table": [...]}]}
//   ct protocol   {"n":., "u":[.,.,.], "in1":., "in2":., "out":., "restriction": "general|se|nic",
//                  "comm": [{"msgs":[...]} x (n+1)], "inputs1": [[...] x n], "inputs2": [[...] x n],
//                  "keys": {"alphabet":., "target":., "k1":[...], "k2":[...], "k3":[...]}}

Json load_json_file(const std::string& path);

MacChannel channel_from_json(const Json& j);
Json channel_to_json(const MacChannel& ch);
FiniteDist dist_from_json(const Json& j);
JointDist law_from_json(const Json& j);
InteractiveProtocol iproto_from_json(const Json& j);
CtProtocol ct_from_json(const Json& j);

// Partition spec strings: "lp", "all", or blocks like "1|2,3" (1-based terminals).
Partition partition_from_spec(const std::string& spec, int m);

// Report envelope {report_version, command, params, results, provenance, status}.
Json make_report(const std::string& command, const Json& params, const Json& results,
                 std::uint64_t seed, const Json& status = Json::array());

}  // namespace skmac

#endif
