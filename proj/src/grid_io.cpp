#include "gridlat/grid_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gridlat/error.hpp"

namespace gridlat {

namespace {

using nlohmann::json;

NodeKind kind_from_text(const std::string& text) {
    if (text == "generator") return NodeKind::Generator;
    if (text == "load") return NodeKind::Load;
    if (text == "reference") return NodeKind::Reference;
    throw Error("parse", "unknown node kind \"" + text + "\"");
}

std::string kind_to_text(NodeKind kind) {
    switch (kind) {
        case NodeKind::Generator: return "generator";
        case NodeKind::Load: return "load";
        case NodeKind::Reference: return "reference";
    }
    throw Error("io", "unhandled node kind");
}

double number_field(const json& obj, const char* key, double fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) throw Error("parse", std::string("missing field ") + key);
        return fallback;
    }
    if (!obj[key].is_number()) throw Error("parse", std::string("field ") + key + " must be a number");
    return obj[key].get<double>();
}

std::string text_field(const json& obj, const char* key, bool required) {
    if (!obj.contains(key)) {
        if (required) throw Error("parse", std::string("missing field ") + key);
        return {};
    }
    if (!obj[key].is_string()) throw Error("parse", std::string("field ") + key + " must be a string");
    return obj[key].get<std::string>();
}

void parse_profile_array(const json& arr, const char* key, std::array<std::array<double, 24>, 7>& out) {
    if (!arr.is_array() || arr.size() != 7)
        throw Error("parse", std::string(key) + " must hold 7 day rows");
    for (int d = 0; d < 7; ++d) {
        const json& day = arr[d];
        if (!day.is_array() || day.size() != 24)
            throw Error("parse", std::string(key) + " day " + std::to_string(d) + " must hold 24 hours");
        for (int h = 0; h < 24; ++h) {
            if (!day[h].is_number())
                throw Error("parse", std::string(key) + " entries must be numbers");
            out[d][h] = day[h].get<double>();
        }
    }
}

EvcsProfile parse_profile(const json& obj) {
    EvcsProfile profile;
    profile.max_kw = number_field(obj, "max_kw", 0.0, true);
    parse_profile_array(obj.at("mean_kw"), "mean_kw", profile.mean_kw);
    parse_profile_array(obj.at("stdev_kw"), "stdev_kw", profile.stdev_kw);
    return profile;
}

json profile_to_json(const EvcsProfile& profile) {
    json mean = json::array();
    json stdev = json::array();
    for (int d = 0; d < 7; ++d) {
        json mrow = json::array(), srow = json::array();
        for (int h = 0; h < 24; ++h) {
            mrow.push_back(profile.mean_kw[d][h]);
            srow.push_back(profile.stdev_kw[d][h]);
        }
        mean.push_back(mrow);
        stdev.push_back(srow);
    }
    return json{{"max_kw", profile.max_kw}, {"mean_kw", mean}, {"stdev_kw", stdev}};
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        // trim surrounding whitespace
        const auto first = field.find_first_not_of(" \t\r");
        const auto last = field.find_last_not_of(" \t\r");
        fields.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double csv_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error("parse", "bad numeric value \"" + text + "\" in " + what);
    }
}

}  // namespace

GridSpec parse_grid_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error("parse", e.what());
    }
    if (!doc.is_object()) throw Error("parse", "top level must be an object");

    GridSpec spec;
    spec.base_mva = number_field(doc, "base_mva", 100.0);
    spec.f_s_hz = number_field(doc, "f_s_hz", 60.0);
    spec.description = text_field(doc, "description", false);

    for (const json& n : doc.value("nodes", json::array())) {
        NodeRecord rec;
        rec.id = text_field(n, "id", true);
        rec.kind = kind_from_text(text_field(n, "kind", true));
        rec.base_kv = number_field(n, "base_kv", 0.0);
        rec.note = text_field(n, "note", false);
        spec.nodes.push_back(rec);
    }
    for (const json& b : doc.value("branches", json::array())) {
        Branch br;
        br.from = text_field(b, "from", true);
        br.to = text_field(b, "to", true);
        br.susceptance_pu = number_field(b, "susceptance_pu", 0.0, true);
        br.length_mi = number_field(b, "length_mi", 0.0);
        br.note = text_field(b, "note", false);
        spec.branches.push_back(br);
    }
    for (const json& g : doc.value("generators", json::array())) {
        GeneratorParams gp;
        gp.node = text_field(g, "node", true);
        gp.m_pu_s2_per_rad = number_field(g, "m_pu_s2_per_rad", 0.0, true);
        gp.d_g_pu_s_per_rad = number_field(g, "d_g_pu_s_per_rad", 0.0, true);
        gp.k_p_pu_s_per_rad = number_field(g, "k_p_pu_s_per_rad", 0.0, true);
        gp.k_i_pu_per_rad = number_field(g, "k_i_pu_per_rad", 0.0, true);
        gp.p_mw = number_field(g, "p_mw", 0.0);
        gp.note = text_field(g, "note", false);
        spec.generators.push_back(gp);
    }
    for (const json& l : doc.value("loads", json::array())) {
        LoadParams lp;
        lp.node = text_field(l, "node", true);
        lp.p_mw = number_field(l, "p_mw", 0.0, true);
        if (l.contains("d_l_pct")) lp.d_l_pct = number_field(l, "d_l_pct", 0.0);
        if (l.contains("d_l_pu_s_per_rad")) lp.d_l_pu_s_per_rad = number_field(l, "d_l_pu_s_per_rad", 0.0);
        if (l.contains("evcs")) lp.evcs = parse_profile(l["evcs"]);
        lp.note = text_field(l, "note", false);
        spec.loads.push_back(lp);
    }

    validate(spec);
    return spec;
}

GridSpec load_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open grid file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_grid_json(buf.str());
}

std::string grid_to_json(const GridSpec& spec) {
    json doc;
    doc["base_mva"] = spec.base_mva;
    doc["f_s_hz"] = spec.f_s_hz;
    if (!spec.description.empty()) doc["description"] = spec.description;

    doc["nodes"] = json::array();
    for (const auto& n : spec.nodes) {
        json rec{{"id", n.id}, {"kind", kind_to_text(n.kind)}, {"base_kv", n.base_kv}};
        if (!n.note.empty()) rec["note"] = n.note;
        doc["nodes"].push_back(rec);
    }
    doc["branches"] = json::array();
    for (const auto& b : spec.branches) {
        json rec{{"from", b.from}, {"to", b.to}, {"susceptance_pu", b.susceptance_pu}};
        if (b.length_mi != 0.0) rec["length_mi"] = b.length_mi;
        if (!b.note.empty()) rec["note"] = b.note;
        doc["branches"].push_back(rec);
    }
    doc["generators"] = json::array();
    for (const auto& g : spec.generators) {
        json rec{{"node", g.node},
                 {"m_pu_s2_per_rad", g.m_pu_s2_per_rad},
                 {"d_g_pu_s_per_rad", g.d_g_pu_s_per_rad},
                 {"k_p_pu_s_per_rad", g.k_p_pu_s_per_rad},
                 {"k_i_pu_per_rad", g.k_i_pu_per_rad},
                 {"p_mw", g.p_mw}};
        if (!g.note.empty()) rec["note"] = g.note;
        doc["generators"].push_back(rec);
    }
    doc["loads"] = json::array();
    for (const auto& l : spec.loads) {
        json rec{{"node", l.node}, {"p_mw", l.p_mw}};
        if (l.d_l_pct) rec["d_l_pct"] = *l.d_l_pct;
        if (l.d_l_pu_s_per_rad) rec["d_l_pu_s_per_rad"] = *l.d_l_pu_s_per_rad;
        if (!l.evcs.empty()) rec["evcs"] = profile_to_json(l.evcs);
        if (!l.note.empty()) rec["note"] = l.note;
        doc["loads"].push_back(rec);
    }
    return doc.dump(2) + "\n";
}

void save_grid(const GridSpec& spec, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot write grid file " + path.string());
    out << grid_to_json(spec);
}

std::vector<Branch> parse_branches_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<Branch> out;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (header) {
            if (fields.size() < 3 || fields[0] != "from")
                throw Error("parse", "branch CSV must start with header from,to,susceptance_pu");
            header = false;
            continue;
        }
        if (fields.size() < 3) throw Error("parse", "branch row needs from,to,susceptance_pu");
        Branch b;
        b.from = fields[0];
        b.to = fields[1];
        b.susceptance_pu = csv_number(fields[2], "branch susceptance");
        if (fields.size() > 3 && !fields[3].empty()) b.length_mi = csv_number(fields[3], "branch length");
        out.push_back(b);
    }
    return out;
}

std::vector<LoadParams> parse_loads_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<LoadParams> out;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (header) {
            if (fields.size() < 2 || fields[0] != "node")
                throw Error("parse", "load CSV must start with header node,p_mw");
            header = false;
            continue;
        }
        if (fields.size() < 2) throw Error("parse", "load row needs node,p_mw");
        LoadParams l;
        l.node = fields[0];
        l.p_mw = csv_number(fields[1], "load demand");
        if (fields.size() > 2 && !fields[2].empty()) l.d_l_pct = csv_number(fields[2], "load damping");
        if (fields.size() > 3 && !fields[3].empty())
            l.evcs.max_kw = csv_number(fields[3], "charging capacity");
        out.push_back(l);
    }
    return out;
}

}  // namespace gridlat
