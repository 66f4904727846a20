// SPDX-License-Identifier: Apache-2.0
#include "effcap/json_io.hpp"

#include "json.hpp"

#include "effcap/error.hpp"

namespace effcap::json_io {

using nlohmann::ordered_json;

namespace {

ordered_json parse(const std::string& text, const char* what) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw parse_error(std::string(what) + ": malformed JSON");
    return j;
}

double need_number(const ordered_json& j, const char* key, const char* what) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number())
        throw parse_error(std::string(what) + ": missing or non-numeric \"" + key + "\"");
    return it->get<double>();
}

const ordered_json& need_array(const ordered_json& j, const char* key, const char* what) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_array() || it->empty())
        throw parse_error(std::string(what) + ": missing or empty array \"" + key + "\"");
    return *it;
}

}  // namespace

std::string to_json(const channels::ChannelParams& params) {
    ordered_json j;
    j["alpha"] = params.alpha;
    j["eta"] = params.eta;
    j["mu"] = params.mu;
    j["b"] = params.b;
    j["omega"] = params.omega;
    j["format"] = params.format == channels::Format::format1 ? "format1" : "format2";
    return j.dump();
}

std::string to_json(const mixfit::MGModel& model) {
    ordered_json j;
    j["type"] = "mg";
    auto& terms = j["terms"] = ordered_json::array();
    for (const auto& t : model.terms)
        terms.push_back({{"phi", t.phi}, {"vartheta", t.vartheta}, {"xi", t.xi}});
    return j.dump();
}

std::string to_json(const mixfit::MoGModel& model) {
    ordered_json j;
    j["type"] = "mog";
    j["gamma_bar"] = model.gamma_bar;
    auto& comps = j["comps"] = ordered_json::array();
    for (const auto& c : model.comps)
        comps.push_back({{"rho", c.rho}, {"upsilon", c.upsilon}, {"psi", c.psi}});
    return j.dump();
}

channels::ChannelParams channel_from_json(const std::string& text) {
    ordered_json j = parse(text, "channel");
    channels::ChannelParams p;
    p.alpha = need_number(j, "alpha", "channel");
    p.eta = need_number(j, "eta", "channel");
    p.mu = need_number(j, "mu", "channel");
    p.b = need_number(j, "b", "channel");
    p.omega = need_number(j, "omega", "channel");
    auto it = j.find("format");
    if (it == j.end() || !it->is_string())
        throw parse_error("channel: missing or non-string \"format\"");
    const std::string f = it->get<std::string>();
    if (f == "format1")
        p.format = channels::Format::format1;
    else if (f == "format2")
        p.format = channels::Format::format2;
    else
        throw parse_error("channel: format must be \"format1\" or \"format2\", got \"" + f + "\"");
    try {
        channels::validate(p);
    } catch (const std::domain_error& e) {
        throw parse_error(std::string("channel: ") + e.what());
    }
    return p;
}

mixfit::MGModel mg_from_json(const std::string& text) {
    ordered_json j = parse(text, "mg model");
    if (j.value("type", "") != "mg") throw parse_error("mg model: \"type\" must be \"mg\"");
    mixfit::MGModel m;
    for (const auto& t : need_array(j, "terms", "mg model")) {
        mixfit::MGTerm term;
        term.phi = need_number(t, "phi", "mg term");
        term.vartheta = need_number(t, "vartheta", "mg term");
        term.xi = need_number(t, "xi", "mg term");
        if (!(term.phi > 0) || !(term.vartheta > 0) || !(term.xi > 0))
            throw parse_error("mg term: phi, vartheta, xi must all be positive");
        m.terms.push_back(term);
    }
    return m;
}

mixfit::MoGModel mog_from_json(const std::string& text) {
    ordered_json j = parse(text, "mog model");
    if (j.value("type", "") != "mog") throw parse_error("mog model: \"type\" must be \"mog\"");
    mixfit::MoGModel m;
    m.gamma_bar = need_number(j, "gamma_bar", "mog model");
    if (!(m.gamma_bar > 0)) throw parse_error("mog model: gamma_bar must be positive");
    for (const auto& c : need_array(j, "comps", "mog model")) {
        mixfit::MoGComp comp;
        comp.rho = need_number(c, "rho", "mog comp");
        comp.upsilon = need_number(c, "upsilon", "mog comp");
        comp.psi = need_number(c, "psi", "mog comp");
        if (!(comp.rho > 0) || !(comp.psi > 0))
            throw parse_error("mog comp: rho and psi must be positive");
        m.comps.push_back(comp);
    }
    return m;
}

}  // namespace effcap::json_io
