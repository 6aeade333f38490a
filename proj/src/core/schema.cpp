#include "core/schema.hpp"

#include <chrono>
#include <fstream>

namespace skmac {

namespace {

const Json& need(const Json& j, const char* field) {
  if (!j.is_object() || !j.contains(field))
    throw SchemaError(std::string("missing field '") + field + "'");
  return j.at(field);
}

int need_int(const Json& j, const char* field) {
  const Json& v = need(j, field);
  if (!v.is_number_integer()) throw SchemaError(std::string("field '") + field + "' must be an integer");
  return v.get<int>();
}

std::vector<int> need_int_array(const Json& j, const char* field) {
  const Json& v = need(j, field);
  if (!v.is_array()) throw SchemaError(std::string("field '") + field + "' must be an array");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) throw SchemaError(std::string("field '") + field + "' must hold integers");
    out.push_back(e.get<int>());
  }
  return out;
}

std::vector<double> need_double_array(const Json& v, const std::string& what) {
  if (!v.is_array()) throw SchemaError(what + " must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw SchemaError(what + " must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw IoError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw SchemaError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

MacChannel channel_from_json(const Json& j) {
  int in1 = need_int(j, "in1");
  int in2 = need_int(j, "in2");
  int out = need_int(j, "out");
  if (in1 < 1 || in2 < 1 || out < 1) throw SchemaError("channel alphabets must be positive");
  const Json& w = need(j, "w");
  if (!w.is_array() || static_cast<int>(w.size()) != in1) throw SchemaError("'w' must have in1 rows");
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(in1) * in2 * out);
  for (const auto& r1 : w) {
    if (!r1.is_array() || static_cast<int>(r1.size()) != in2) throw SchemaError("'w' rows must have in2 entries");
    for (const auto& r2 : r1) {
      std::vector<double> row = need_double_array(r2, "'w' innermost");
      if (static_cast<int>(row.size()) != out) throw SchemaError("'w' innermost must have out entries");
      flat.insert(flat.end(), row.begin(), row.end());
    }
  }
  try {
    return MacChannel(in1, in2, out, std::move(flat));
  } catch (const InvalidArgumentError& e) {
    throw SchemaError(std::string("invalid channel: ") + e.what());
  }
}

Json channel_to_json(const MacChannel& ch) {
  Json w = Json::array();
  for (int x1 = 0; x1 < ch.in1_size(); ++x1) {
    Json r1 = Json::array();
    for (int x2 = 0; x2 < ch.in2_size(); ++x2) {
      Json r2 = Json::array();
      for (int x3 = 0; x3 < ch.out_size(); ++x3) r2.push_back(ch.w(x1, x2, x3));
      r1.push_back(std::move(r2));
    }
    w.push_back(std::move(r1));
  }
  return Json{{"in1", ch.in1_size()}, {"in2", ch.in2_size()}, {"out", ch.out_size()}, {"w", std::move(w)}};
}

FiniteDist dist_from_json(const Json& j) {
  std::vector<double> p = need_double_array(need(j, "probs"), "'probs'");
  try {
    return FiniteDist(std::move(p));
  } catch (const InvalidArgumentError& e) {
    throw SchemaError(std::string("invalid distribution: ") + e.what());
  }
}

JointDist law_from_json(const Json& j) {
  std::vector<int> arity = need_int_array(j, "arity");
  std::vector<double> table = need_double_array(need(j, "table"), "'table'");
  try {
    return JointDist(std::move(arity), std::move(table));
  } catch (const InvalidArgumentError& e) {
    throw SchemaError(std::string("invalid law: ") + e.what());
  }
}

InteractiveProtocol iproto_from_json(const Json& j) {
  int m = need_int(j, "m");
  std::vector<int> obs = need_int_array(j, "obs");
  const Json& msgs = need(j, "messages");
  if (!msgs.is_array()) throw SchemaError("'messages' must be an array");
  std::vector<IMsg> out;
  for (const auto& mj : msgs) {
    IMsg msg;
    msg.sender = need_int(mj, "sender") - 1;  // JSON uses 1-based terminals
    msg.alphabet = need_int(mj, "alphabet");
    msg.table = need_int_array(mj, "table");
    out.push_back(std::move(msg));
  }
  try {
    return InteractiveProtocol(m, std::move(obs), std::move(out));
  } catch (const InvalidArgumentError& e) {
    throw SchemaError(std::string("invalid interactive protocol: ") + e.what());
  }
}

CtProtocol ct_from_json(const Json& j) {
  int n = need_int(j, "n");
  std::vector<int> u = need_int_array(j, "u");
  if (u.size() != 3) throw SchemaError("'u' must have three alphabets");
  int in1 = need_int(j, "in1");
  int in2 = need_int(j, "in2");
  int out = need_int(j, "out");
  const Json& restr = need(j, "restriction");
  if (!restr.is_string()) throw SchemaError("'restriction' must be a string");
  const Json& comm = need(j, "comm");
  if (!comm.is_array()) throw SchemaError("'comm' must be an array");
  std::vector<CtSlotComm> rounds;
  for (const auto& cj : comm) {
    CtSlotComm slot;
    const Json& ms = need(cj, "msgs");
    if (!ms.is_array()) throw SchemaError("'msgs' must be an array");
    for (const auto& mj : ms) {
      CtMsg msg;
      msg.sender = need_int(mj, "sender");
      msg.alphabet = need_int(mj, "alphabet");
      msg.table = need_int_array(mj, "table");
      slot.msgs.push_back(std::move(msg));
    }
    rounds.push_back(std::move(slot));
  }
  auto int_tables = [&](const char* field) {
    const Json& v = need(j, field);
    if (!v.is_array()) throw SchemaError(std::string("'") + field + "' must be an array");
    std::vector<std::vector<int>> tabs;
    for (const auto& t : v) {
      if (!t.is_array()) throw SchemaError(std::string("'") + field + "' must hold arrays");
      std::vector<int> tab;
      for (const auto& e : t) {
        if (!e.is_number_integer()) throw SchemaError(std::string("'") + field + "' must hold integers");
        tab.push_back(e.get<int>());
      }
      tabs.push_back(std::move(tab));
    }
    return tabs;
  };
  std::vector<std::vector<int>> in1_maps = int_tables("inputs1");
  std::vector<std::vector<int>> in2_maps = int_tables("inputs2");
  const Json& kj = need(j, "keys");
  CtKeyMaps keys;
  keys.alphabet = need_int(kj, "alphabet");
  keys.target = kj.contains("target") ? need_int(kj, "target") : 1;
  keys.k1 = need_int_array(kj, "k1");
  keys.k2 = need_int_array(kj, "k2");
  keys.k3 = need_int_array(kj, "k3");
  try {
    return CtProtocol(n, {u[0], u[1], u[2]}, in1, in2, out, restriction_from_name(restr.get<std::string>()),
                      std::move(rounds), std::move(in1_maps), std::move(in2_maps), std::move(keys));
  } catch (const InvalidArgumentError& e) {
    throw SchemaError(std::string("invalid ct protocol: ") + e.what());
  }
}

Partition partition_from_spec(const std::string& spec, int m) {
  Partition p;
  p.m = m;
  std::uint32_t seen = 0;
  std::uint32_t block = 0;
  auto flush = [&]() {
    if (block == 0) throw SchemaError("partition spec: empty block");
    p.blocks.push_back(block);
    block = 0;
  };
  for (char c : spec) {
    if (c == '|') {
      flush();
    } else if (c == ',') {
      continue;
    } else if (c >= '1' && c <= '9') {
      int t = c - '1';
      if (t >= m) throw SchemaError("partition spec: terminal out of range");
      std::uint32_t bit = 1u << t;
      if (seen & bit) throw SchemaError("partition spec: repeated terminal");
      seen |= bit;
      block |= bit;
    } else {
      throw SchemaError("partition spec: unexpected character");
    }
  }
  flush();
  if (seen != (1u << m) - 1) throw SchemaError("partition spec: blocks must cover all terminals");
  if (!p.valid()) throw SchemaError("partition spec: need at least two blocks");
  return p;
}

Json make_report(const std::string& command, const Json& params, const Json& results, std::uint64_t seed,
                 const Json& status) {
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  Json rep;
  rep["report_version"] = 1;
  rep["command"] = command;
  rep["params"] = params;
  rep["results"] = results;
  rep["provenance"] = Json{{"build", "skmac (git describe unavailable)"}, {"seed", seed}, {"timestamp", buf}};
  rep["status"] = status;
  return rep;
}

}  // namespace skmac
