#pragma once

#include <string>
#include <string_view>

#include "memkin/network.hpp"

namespace memkin {

/// Parse the line-based netlist format into a validated Netlist.
///
///   MODEL <id> POISSON tau0=<s> v0=<V> tau1=<s> v1=<V> ron=<ohm> roff=<ohm>
///   MODEL <id> APTM kon=<Hz> koff=<Hz> von=<V> voff=<V> aon=<x> aoff=<x> ron=<ohm> roff=<ohm>
///   V <id> <node+> <node-> DC <volts>
///   V <id> <node+> <node-> SIN <amp> <freq> [<phase>]
///   R <id> <n1> <n2> <ohms>
///   M <id> <node+> <node-> model=<id> [state=off|on] [spread_tau0=<lo>,<hi>] [spread_v0=<lo>,<hi>]
///
/// '#' starts a comment; keywords and attribute names are case-insensitive;
/// node "0" is ground. Errors carry the 1-based line number.
Netlist parse_netlist(std::string_view text);

/// Canonical serialization; parse_netlist(render(n)) is structurally
/// identical to n.
std::string render(const Netlist& netlist);

}  // namespace memkin
