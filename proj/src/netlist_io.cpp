#include "memkin/netlist_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <vector>

#include "memkin/errors.hpp"

namespace memkin {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : line) {
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

double parse_number(const std::string& token, int line, const std::string& what) {
    const char* begin = token.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + token.size() || token.empty())
        throw parse_error(line, "expected a number for " + what + ", got '" + token + "'");
    return v;
}

/// key=value attribute list with case-insensitive keys.
class Attributes {
  public:
    Attributes(const std::vector<std::string>& tokens, std::size_t first, int line)
        : line_(line) {
        for (std::size_t k = first; k < tokens.size(); ++k) {
            auto eq = tokens[k].find('=');
            if (eq == std::string::npos || eq == 0)
                throw parse_error(line, "expected key=value, got '" + tokens[k] + "'");
            std::string key = lower(tokens[k].substr(0, eq));
            if (!values_.emplace(key, tokens[k].substr(eq + 1)).second)
                throw parse_error(line, "duplicate attribute '" + key + "'");
        }
    }

    double number(const std::string& key) const {
        return parse_number(raw(key), line_, key);
    }
    const std::string& raw(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw parse_error(line_, "missing attribute '" + key + "'");
        return it->second;
    }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::array<double, 2> interval(const std::string& key) const {
        const std::string& v = raw(key);
        auto comma = v.find(',');
        if (comma == std::string::npos)
            throw parse_error(line_, "attribute '" + key + "' expects <lo>,<hi>");
        return {parse_number(v.substr(0, comma), line_, key),
                parse_number(v.substr(comma + 1), line_, key)};
    }

    void allow_only(std::initializer_list<const char*> keys) const {
        for (const auto& [key, value] : values_) {
            bool known = std::any_of(keys.begin(), keys.end(),
                                     [&](const char* k) { return key == k; });
            if (!known) throw parse_error(line_, "unknown attribute '" + key + "'");
        }
    }

  private:
    std::map<std::string, std::string> values_;
    int line_;
};

void expect_argc(const std::vector<std::string>& tokens, std::size_t n, int line,
                 const std::string& usage) {
    if (tokens.size() < n) throw parse_error(line, "expected " + usage);
}

}  // namespace

Netlist parse_netlist(std::string_view text) {
    Netlist nl;
    std::istringstream in{std::string(text)};
    std::string raw_line;
    int line = 0;

    while (std::getline(in, raw_line)) {
        ++line;
        std::vector<std::string> tok = tokenize(raw_line);
        if (tok.empty()) continue;
        std::string kind = lower(tok[0]);

        if (kind == "model") {
            expect_argc(tok, 3, line, "MODEL <id> POISSON|APTM key=value...");
            std::string id = tok[1];
            std::string family = lower(tok[2]);
            Attributes attrs(tok, 3, line);
            if (family == "poisson") {
                attrs.allow_only({"tau0", "v0", "tau1", "v1", "ron", "roff"});
                PoissonExpModel m{attrs.number("tau0"), attrs.number("v0"),
                                  attrs.number("tau1"), attrs.number("v1"),
                                  attrs.number("ron"),  attrs.number("roff")};
                try {
                    m.validate();
                } catch (const std::invalid_argument& e) {
                    throw parse_error(line, e.what());
                }
                nl.models.emplace_back(id, m);
            } else if (family == "aptm") {
                attrs.allow_only({"kon", "koff", "von", "voff", "aon", "aoff", "ron", "roff"});
                AptmModel m{attrs.number("kon"),  attrs.number("koff"), attrs.number("von"),
                            attrs.number("voff"), attrs.number("aon"),  attrs.number("aoff"),
                            attrs.number("ron"),  attrs.number("roff")};
                try {
                    m.validate();
                } catch (const std::invalid_argument& e) {
                    throw parse_error(line, e.what());
                }
                nl.models.emplace_back(id, m);
            } else {
                throw parse_error(line, "unknown model family '" + tok[2] +
                                            "' (expected POISSON or APTM)");
            }
        } else if (kind == "v") {
            expect_argc(tok, 6, line, "V <id> <node+> <node-> DC <volts> | SIN <amp> <freq> [<phase>]");
            std::string wave = lower(tok[4]);
            DriveSpec drive;
            if (wave == "dc") {
                drive = DriveDC{parse_number(tok[5], line, "DC voltage")};
                if (tok.size() > 6) throw parse_error(line, "unexpected token '" + tok[6] + "'");
            } else if (wave == "sin") {
                expect_argc(tok, 7, line, "SIN <amp> <freq> [<phase>]");
                double phase = tok.size() > 7 ? parse_number(tok[7], line, "phase") : 0.0;
                if (tok.size() > 8) throw parse_error(line, "unexpected token '" + tok[8] + "'");
                drive = DriveSine{parse_number(tok[5], line, "amplitude"),
                                  parse_number(tok[6], line, "frequency"), phase};
            } else {
                throw parse_error(line, "unknown source kind '" + tok[4] +
                                            "' (expected DC or SIN)");
            }
            nl.sources.push_back({tok[1], tok[2], tok[3], drive, line});
        } else if (kind == "r") {
            expect_argc(tok, 5, line, "R <id> <n1> <n2> <ohms>");
            if (tok.size() > 5) throw parse_error(line, "unexpected token '" + tok[5] + "'");
            nl.resistors.push_back(
                {tok[1], tok[2], tok[3], parse_number(tok[4], line, "resistance"), line});
        } else if (kind == "m") {
            expect_argc(tok, 5, line, "M <id> <node+> <node-> model=<id> [state=...] [spread_...]");
            Attributes attrs(tok, 4, line);
            attrs.allow_only({"model", "state", "spread_tau0", "spread_v0"});
            Netlist::Memristor m;
            m.name = tok[1];
            m.node_pos = tok[2];
            m.node_neg = tok[3];
            m.model_id = attrs.raw("model");
            m.line = line;
            if (attrs.has("state")) {
                std::string s = lower(attrs.raw("state"));
                if (s == "off") m.initial = DeviceState::Off;
                else if (s == "on") m.initial = DeviceState::On;
                else throw parse_error(line, "state must be 'off' or 'on'");
            }
            if (attrs.has("spread_tau0") != attrs.has("spread_v0"))
                throw parse_error(line, "spread_tau0 and spread_v0 must be given together");
            if (attrs.has("spread_tau0")) {
                ParamSpread spread{attrs.interval("spread_tau0"), attrs.interval("spread_v0")};
                try {
                    spread.validate();
                } catch (const std::invalid_argument& e) {
                    throw parse_error(line, e.what());
                }
                m.spread = spread;
            }
            nl.memristors.push_back(std::move(m));
        } else {
            throw parse_error(line, "unknown element '" + tok[0] +
                                        "' (expected MODEL, V, R or M)");
        }
    }

    nl.validate();
    return nl;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string render(const Netlist& netlist) {
    std::string out;
    for (const auto& [id, model] : netlist.models) {
        if (const auto* p = std::get_if<PoissonExpModel>(&model)) {
            out += "MODEL " + id + " POISSON tau0=" + num(p->tau0) + " v0=" + num(p->v0) +
                   " tau1=" + num(p->tau1) + " v1=" + num(p->v1) + " ron=" + num(p->r_on) +
                   " roff=" + num(p->r_off) + "\n";
        } else {
            const auto& a = std::get<AptmModel>(model);
            out += "MODEL " + id + " APTM kon=" + num(a.k_on) + " koff=" + num(a.k_off) +
                   " von=" + num(a.v_on) + " voff=" + num(a.v_off) + " aon=" + num(a.alpha_on) +
                   " aoff=" + num(a.alpha_off) + " ron=" + num(a.r_on) +
                   " roff=" + num(a.r_off) + "\n";
        }
    }
    for (const auto& s : netlist.sources) {
        out += "V " + s.name + " " + s.node_pos + " " + s.node_neg;
        if (const auto* dc = std::get_if<DriveDC>(&s.drive)) {
            out += " DC " + num(dc->v_a) + "\n";
        } else {
            const auto& sine = std::get<DriveSine>(s.drive);
            out += " SIN " + num(sine.amplitude) + " " + num(sine.frequency) + " " +
                   num(sine.phase) + "\n";
        }
    }
    for (const auto& r : netlist.resistors)
        out += "R " + r.name + " " + r.node_a + " " + r.node_b + " " + num(r.ohms) + "\n";
    for (const auto& m : netlist.memristors) {
        out += "M " + m.name + " " + m.node_pos + " " + m.node_neg + " model=" + m.model_id +
               " state=" + (m.initial == DeviceState::On ? "on" : "off");
        if (m.spread) {
            out += " spread_tau0=" + num(m.spread->tau0_range[0]) + "," +
                   num(m.spread->tau0_range[1]) + " spread_v0=" + num(m.spread->v0_range[0]) +
                   "," + num(m.spread->v0_range[1]);
        }
        out += "\n";
    }
    return out;
}

}  // namespace memkin
