#pragma once

// Model-file ingestion and report emission. One JSON file carries named
// models, lattice maps, GW/log tables, Z models and cut models; all
// cross-references are by name and all rational literals are exact "p/q"
// strings. Serialization is canonical: sorted object keys, entries in key
// order, two-space indent - a parsed file re-serializes byte-identically.

#include "gwsurgery/gluing.hpp"
#include "gwsurgery/surgery.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <string>

namespace gws {

using json = nlohmann::json;

// Input rejection with the offending field spelled out.
struct ModelError : std::runtime_error {
    std::string field;
    ModelError(std::string f, const std::string& message)
        : std::runtime_error(message), field(std::move(f)) {}
};

struct MapPayload {
    std::string source_model;
    std::string target_model;
    MapKind kind = MapKind::iso;
    IntMat matrix;
    std::optional<RatMat> right_inverse;
    std::vector<FlopLocusPair> locus_pairs;
};

struct LogTablePayload {
    std::string model;  // side model the classes/z_star refer to
    LogGWTable table;
};

struct CutModelPayload {
    std::string plus_model;
    std::string minus_model;
    IntVec z_star_plus;
    IntVec z_star_minus;
    IntMat assembly;
    std::vector<IntVec> kernel_basis;
    int n = 2;
    std::optional<std::string> glued_model;
};

struct ModelFile {
    std::string schema_version = "1";
    std::map<std::string, ThreefoldModel> models;
    std::map<std::string, MapPayload> maps;
    std::map<std::string, GWTable> gw_tables;
    std::map<std::string, LogTablePayload> log_tables;
    std::map<std::string, ZModel> z_models;
    std::map<std::string, CutModelPayload> cut_models;
};

namespace io_detail {

inline const json& need(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw ModelError(path, path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ModelError(path + "." + key, path + ": missing field '" + key + "'");
    return *it;
}

inline long long as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ModelError(path, path + ": expected an integer");
    return j.get<long long>();
}

inline std::string as_str(const json& j, const std::string& path) {
    if (!j.is_string()) throw ModelError(path, path + ": expected a string");
    return j.get<std::string>();
}

inline Rational as_rational(const json& j, const std::string& path) {
    if (!j.is_string()) throw ModelError(path, path + ": rationals must be exact strings");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const std::exception& e) {
        throw ModelError(path, path + ": " + e.what());
    }
}

inline IntVec as_int_vec(const json& j, const std::string& path) {
    if (!j.is_array()) throw ModelError(path, path + ": expected an array");
    IntVec v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as_int(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

inline RatVec as_rat_vec(const json& j, const std::string& path) {
    if (!j.is_array()) throw ModelError(path, path + ": expected an array");
    RatVec v;
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(as_rational(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

inline IntMat as_int_mat(const json& j, const std::string& path) {
    if (!j.is_array()) throw ModelError(path, path + ": expected an array of rows");
    std::vector<IntVec> rows;
    for (std::size_t i = 0; i < j.size(); ++i)
        rows.push_back(as_int_vec(j[i], path + "[" + std::to_string(i) + "]"));
    try {
        return int_mat_from_rows(rows);
    } catch (const std::exception& e) {
        throw ModelError(path, path + ": " + e.what());
    }
}

inline RatMat as_rat_mat(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ModelError(path, path + ": expected an array of rows");
    RatMat m(j.size(), j[0].size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        RatVec row = as_rat_vec(j[i], path + "[" + std::to_string(i) + "]");
        if (row.size() != m.cols) throw ModelError(path, path + ": ragged matrix");
        for (std::size_t k = 0; k < m.cols; ++k) m(i, k) = row[k];
    }
    return m;
}

inline json vec_json(const IntVec& v) {
    json a = json::array();
    for (long long x : v) a.push_back(x);
    return a;
}

inline json rat_vec_json(const RatVec& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(rational_to_string(x));
    return a;
}

inline json int_mat_json(const IntMat& m) {
    json a = json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols; ++j) row.push_back(m(i, j));
        a.push_back(row);
    }
    return a;
}

inline json rat_mat_json(const RatMat& m) {
    json a = json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols; ++j) row.push_back(rational_to_string(m(i, j)));
        a.push_back(row);
    }
    return a;
}

}  // namespace io_detail

// ---- model ----------------------------------------------------------------

inline ThreefoldModel model_from_json(const std::string& name, const json& j) {
    using namespace io_detail;
    const std::string path = "models." + name;
    ThreefoldModel m;
    m.name = name;
    m.n = static_cast<int>(j.count("n") ? as_int(j.at("n"), path + ".n") : 2);
    const json& lat = need(j, "lattice", path);
    m.lattice.rank = as_int(need(lat, "rank", path + ".lattice"), path + ".lattice.rank");
    for (const auto& b : need(lat, "basis", path + ".lattice"))
        m.lattice.basis_labels.push_back(as_str(b, path + ".lattice.basis"));
    if (lat.count("exceptional"))
        for (const auto& e : lat.at("exceptional"))
            m.lattice.exceptional_classes.push_back(as_int_vec(e, path + ".lattice.exceptional"));
    m.h4_rank = j.count("h4_rank") ? as_int(j.at("h4_rank"), path + ".h4_rank") : m.lattice.rank;

    const json& triple = need(j, "triple", path);
    const std::size_t r = static_cast<std::size_t>(m.lattice.rank);
    m.triple.assign(r * r * r, Rational(0));
    if (!triple.is_array() || triple.size() != r) throw ModelError(path + ".triple", path + ".triple: expected an r x r x r array");
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t jj = 0; jj < r; ++jj)
            for (std::size_t k = 0; k < r; ++k)
                m.triple[(i * r + jj) * r + k] =
                    as_rational(triple[i][jj][k], path + ".triple");

    m.c1 = as_int_vec(need(j, "c1", path), path + ".c1");
    m.area = as_rat_vec(need(j, "area", path), path + ".area");
    for (const auto& g : need(j, "effective_cone", path))
        m.effective_cone.push_back(as_int_vec(g, path + ".effective_cone"));
    if (j.count("flop_loci"))
        for (const auto& l : j.at("flop_loci"))
            m.flop_loci.push_back(FlopLocus{as_int_vec(need(l, "class", path + ".flop_loci"), path + ".flop_loci.class"),
                                            as_int(need(l, "count", path + ".flop_loci"), path + ".flop_loci.count")});
    if (j.count("classes"))
        for (auto it = j.at("classes").begin(); it != j.at("classes").end(); ++it) {
            const std::string cpath = path + ".classes." + it.key();
            CohClass c;
            c.degree = static_cast<int>(as_int(need(*it, "degree", cpath), cpath + ".degree"));
            c.coords = as_rat_vec(need(*it, "coords", cpath), cpath + ".coords");
            m.classes.emplace(it.key(), std::move(c));
        }
    try {
        validate_model(m);
    } catch (const std::exception& e) {
        throw ModelError(path, path + ": " + e.what());
    }
    return m;
}

inline json model_to_json(const ThreefoldModel& m) {
    using namespace io_detail;
    json j;
    j["n"] = m.n;
    json lat;
    lat["rank"] = m.lattice.rank;
    lat["basis"] = m.lattice.basis_labels;
    json exc = json::array();
    for (const auto& e : m.lattice.exceptional_classes) exc.push_back(vec_json(e));
    lat["exceptional"] = exc;
    j["lattice"] = lat;
    j["h4_rank"] = m.h4_rank;
    const std::size_t r = m.rank();
    json triple = json::array();
    for (std::size_t i = 0; i < r; ++i) {
        json plane = json::array();
        for (std::size_t jj = 0; jj < r; ++jj) {
            json row = json::array();
            for (std::size_t k = 0; k < r; ++k) row.push_back(rational_to_string(m.triple_at(i, jj, k)));
            plane.push_back(row);
        }
        triple.push_back(plane);
    }
    j["triple"] = triple;
    j["c1"] = vec_json(m.c1);
    j["area"] = rat_vec_json(m.area);
    json cone = json::array();
    for (const auto& g : m.effective_cone) cone.push_back(vec_json(g));
    j["effective_cone"] = cone;
    json loci = json::array();
    for (const auto& l : m.flop_loci) loci.push_back(json{{"class", vec_json(l.cls)}, {"count", l.count}});
    j["flop_loci"] = loci;
    json classes;
    for (const auto& [name, c] : m.classes)
        classes[name] = json{{"degree", c.degree}, {"coords", rat_vec_json(c.coords)}};
    j["classes"] = classes.is_null() ? json::object() : classes;
    return j;
}

// ---- tables ---------------------------------------------------------------

inline GWTable gw_table_from_json(const std::string& name, const json& j) {
    using namespace io_detail;
    const std::string path = "gw_tables." + name;
    GWTable t;
    t.model_name = as_str(need(j, "model", path), path + ".model");
    if (j.count("entries"))
        for (const auto& row : j.at("entries")) {
            GWKey key;
            key.cls = as_int_vec(need(row, "class", path), path + ".entries.class");
            key.genus = static_cast<int>(as_int(need(row, "genus", path), path + ".entries.genus"));
            for (const auto& s : need(row, "insertions", path))
                key.insertions.push_back(as_str(s, path + ".entries.insertions"));
            Rational value = as_rational(need(row, "value", path), path + ".entries.value");
            try {
                gw_table_insert(t, std::move(key), value);
            } catch (const std::exception& e) {
                throw ModelError(path + ".entries", path + ": " + e.what());
            }
        }
    return t;
}

inline json gw_table_to_json(const GWTable& t) {
    using namespace io_detail;
    json j;
    j["model"] = t.model_name;
    json entries = json::array();
    for (const auto& [key, value] : t.entries) {
        json row;
        row["class"] = vec_json(key.cls);
        row["genus"] = key.genus;
        row["insertions"] = key.insertions;
        row["value"] = rational_to_string(value);
        entries.push_back(row);
    }
    j["entries"] = entries;
    return j;
}

inline LogTablePayload log_table_from_json(const std::string& name, const json& j) {
    using namespace io_detail;
    const std::string path = "log_tables." + name;
    LogTablePayload p;
    p.model = as_str(need(j, "model", path), path + ".model");
    p.table.pair_name = as_str(need(j, "pair", path), path + ".pair");
    p.table.z_star = as_int_vec(need(j, "z_star", path), path + ".z_star");
    if (j.count("entries"))
        for (const auto& row : j.at("entries")) {
            LogKey key;
            key.cls = as_int_vec(need(row, "class", path), path + ".entries.class");
            key.genus = static_cast<int>(as_int(need(row, "genus", path), path + ".entries.genus"));
            IntVec tangency = as_int_vec(need(row, "tangency", path), path + ".entries.tangency");
            IntVec z_ins = as_int_vec(need(row, "z_insertions", path), path + ".entries.z_insertions");
            if (tangency.size() != z_ins.size())
                throw ModelError(path + ".entries", path + ": tangency/z_insertions length mismatch");
            for (std::size_t i = 0; i < tangency.size(); ++i)
                key.ends.push_back(LogEnd{static_cast<int>(tangency[i]), static_cast<int>(z_ins[i])});
            if (row.count("insertions"))
                for (const auto& s : row.at("insertions"))
                    key.interior.push_back(as_str(s, path + ".entries.insertions"));
            Rational value = as_rational(need(row, "value", path), path + ".entries.value");
            try {
                log_table_insert(p.table, std::move(key), value);
            } catch (const std::exception& e) {
                throw ModelError(path + ".entries", path + ": " + e.what());
            }
        }
    try {
        validate_log_table(p.table);
    } catch (const std::exception& e) {
        throw ModelError(path, path + ": " + e.what());
    }
    return p;
}

inline json log_table_to_json(const LogTablePayload& p) {
    using namespace io_detail;
    json j;
    j["model"] = p.model;
    j["pair"] = p.table.pair_name;
    j["z_star"] = vec_json(p.table.z_star);
    json entries = json::array();
    for (const auto& [key, value] : p.table.entries) {
        json row;
        row["class"] = vec_json(key.cls);
        row["genus"] = key.genus;
        json tangency = json::array(), z_ins = json::array();
        for (const auto& e : key.ends) {
            tangency.push_back(e.multiplicity);
            z_ins.push_back(e.z_class);
        }
        row["tangency"] = tangency;
        row["z_insertions"] = z_ins;
        row["insertions"] = key.interior;
        row["value"] = rational_to_string(value);
        entries.push_back(row);
    }
    j["entries"] = entries;
    return j;
}

// ---- maps, z models, cut models --------------------------------------------

inline MapPayload map_from_json(const std::string& name, const json& j) {
    using namespace io_detail;
    const std::string path = "maps." + name;
    MapPayload p;
    p.source_model = as_str(need(j, "source", path), path + ".source");
    p.target_model = as_str(need(j, "target", path), path + ".target");
    std::string kind = as_str(need(j, "kind", path), path + ".kind");
    if (kind == "iso")
        p.kind = MapKind::iso;
    else if (kind == "surjection")
        p.kind = MapKind::surjection;
    else if (kind == "injection")
        p.kind = MapKind::injection;
    else
        throw ModelError(path + ".kind", path + ": unknown map kind '" + kind + "'");
    p.matrix = as_int_mat(need(j, "matrix", path), path + ".matrix");
    if (j.count("right_inverse")) p.right_inverse = as_rat_mat(j.at("right_inverse"), path + ".right_inverse");
    if (j.count("locus_pairs"))
        for (const auto& lp : j.at("locus_pairs"))
            p.locus_pairs.push_back(FlopLocusPair{
                as_int_vec(need(lp, "source_class", path + ".locus_pairs"), path + ".locus_pairs.source_class"),
                as_int_vec(need(lp, "target_class", path + ".locus_pairs"), path + ".locus_pairs.target_class"),
                as_int(need(lp, "count", path + ".locus_pairs"), path + ".locus_pairs.count")});
    return p;
}

inline json map_to_json(const MapPayload& p) {
    using namespace io_detail;
    json j;
    j["source"] = p.source_model;
    j["target"] = p.target_model;
    j["kind"] = p.kind == MapKind::iso ? "iso" : (p.kind == MapKind::surjection ? "surjection" : "injection");
    j["matrix"] = int_mat_json(p.matrix);
    if (p.right_inverse) j["right_inverse"] = rat_mat_json(*p.right_inverse);
    if (!p.locus_pairs.empty()) {
        json lps = json::array();
        for (const auto& lp : p.locus_pairs)
            lps.push_back(json{{"count", lp.count},
                               {"source_class", vec_json(lp.source_cls)},
                               {"target_class", vec_json(lp.target_cls)}});
        j["locus_pairs"] = lps;
    }
    return j;
}

inline ZModel z_model_from_json(const std::string& name, const json& j) {
    using namespace io_detail;
    const std::string path = "z_models." + name;
    ZModel z;
    for (const auto& b : need(j, "basis", path)) z.basis.push_back(as_str(b, path + ".basis"));
    z.pairing = as_rat_mat(need(j, "pairing", path), path + ".pairing");
    z.inverse_pairing = as_rat_mat(need(j, "inverse_pairing", path), path + ".inverse_pairing");
    try {
        validate_z_model(z);
    } catch (const std::exception& e) {
        throw ModelError(path, path + ": " + e.what());
    }
    return z;
}

inline json z_model_to_json(const ZModel& z) {
    using namespace io_detail;
    json j;
    j["basis"] = z.basis;
    j["pairing"] = rat_mat_json(z.pairing);
    j["inverse_pairing"] = rat_mat_json(z.inverse_pairing);
    return j;
}

inline CutModelPayload cut_model_from_json(const std::string& name, const json& j) {
    using namespace io_detail;
    const std::string path = "cut_models." + name;
    CutModelPayload p;
    p.plus_model = as_str(need(j, "plus_model", path), path + ".plus_model");
    p.minus_model = as_str(need(j, "minus_model", path), path + ".minus_model");
    p.z_star_plus = as_int_vec(need(j, "z_star_plus", path), path + ".z_star_plus");
    p.z_star_minus = as_int_vec(need(j, "z_star_minus", path), path + ".z_star_minus");
    p.assembly = as_int_mat(need(j, "assembly", path), path + ".assembly");
    if (j.count("kernel_basis"))
        for (const auto& k : j.at("kernel_basis"))
            p.kernel_basis.push_back(as_int_vec(k, path + ".kernel_basis"));
    p.n = static_cast<int>(j.count("n") ? as_int(j.at("n"), path + ".n") : 2);
    if (j.count("glued_model")) p.glued_model = as_str(j.at("glued_model"), path + ".glued_model");
    return p;
}

inline json cut_model_to_json(const CutModelPayload& p) {
    using namespace io_detail;
    json j;
    j["plus_model"] = p.plus_model;
    j["minus_model"] = p.minus_model;
    j["z_star_plus"] = vec_json(p.z_star_plus);
    j["z_star_minus"] = vec_json(p.z_star_minus);
    j["assembly"] = int_mat_json(p.assembly);
    json kb = json::array();
    for (const auto& k : p.kernel_basis) kb.push_back(vec_json(k));
    j["kernel_basis"] = kb;
    j["n"] = p.n;
    if (p.glued_model) j["glued_model"] = *p.glued_model;
    return j;
}

// ---- the whole file ---------------------------------------------------------

inline ModelFile model_file_from_json(const json& j) {
    using namespace io_detail;
    ModelFile f;
    f.schema_version = j.count("schema_version") ? as_str(j.at("schema_version"), "schema_version") : "1";
    if (j.count("models"))
        for (auto it = j.at("models").begin(); it != j.at("models").end(); ++it)
            f.models.emplace(it.key(), model_from_json(it.key(), *it));
    if (j.count("maps"))
        for (auto it = j.at("maps").begin(); it != j.at("maps").end(); ++it)
            f.maps.emplace(it.key(), map_from_json(it.key(), *it));
    if (j.count("gw_tables"))
        for (auto it = j.at("gw_tables").begin(); it != j.at("gw_tables").end(); ++it)
            f.gw_tables.emplace(it.key(), gw_table_from_json(it.key(), *it));
    if (j.count("log_tables"))
        for (auto it = j.at("log_tables").begin(); it != j.at("log_tables").end(); ++it)
            f.log_tables.emplace(it.key(), log_table_from_json(it.key(), *it));
    if (j.count("z_models"))
        for (auto it = j.at("z_models").begin(); it != j.at("z_models").end(); ++it)
            f.z_models.emplace(it.key(), z_model_from_json(it.key(), *it));
    if (j.count("cut_models"))
        for (auto it = j.at("cut_models").begin(); it != j.at("cut_models").end(); ++it)
            f.cut_models.emplace(it.key(), cut_model_from_json(it.key(), *it));

    // Cross-reference resolution.
    auto need_model = [&](const std::string& name, const std::string& path) -> const ThreefoldModel& {
        auto it = f.models.find(name);
        if (it == f.models.end()) throw ModelError(path, path + ": unresolved model reference '" + name + "'");
        return it->second;
    };
    for (const auto& [name, p] : f.maps) {
        const auto& src = need_model(p.source_model, "maps." + name + ".source");
        const auto& tgt = need_model(p.target_model, "maps." + name + ".target");
        LatticeMap m{src.lattice, tgt.lattice, p.matrix, p.kind};
        try {
            validate_map(m);
        } catch (const std::exception& e) {
            throw ModelError("maps." + name, "maps." + name + ": " + e.what());
        }
    }
    for (const auto& [name, t] : f.gw_tables) {
        const auto& m = need_model(t.model_name, "gw_tables." + name + ".model");
        try {
            validate_gw_table(m, t);
        } catch (const std::exception& e) {
            throw ModelError("gw_tables." + name, "gw_tables." + name + ": " + e.what());
        }
    }
    for (const auto& [name, p] : f.log_tables) {
        const auto& m = need_model(p.model, "log_tables." + name + ".model");
        if (p.table.z_star.size() != m.rank())
            throw ModelError("log_tables." + name, "log_tables." + name + ": z_star length != model rank");
    }
    for (const auto& [name, p] : f.cut_models) {
        need_model(p.plus_model, "cut_models." + name + ".plus_model");
        need_model(p.minus_model, "cut_models." + name + ".minus_model");
        if (p.glued_model) need_model(*p.glued_model, "cut_models." + name + ".glued_model");
    }
    return f;
}

inline json model_file_to_json(const ModelFile& f) {
    json j;
    j["schema_version"] = f.schema_version;
    json models = json::object();
    for (const auto& [name, m] : f.models) models[name] = model_to_json(m);
    j["models"] = models;
    json maps = json::object();
    for (const auto& [name, m] : f.maps) maps[name] = map_to_json(m);
    j["maps"] = maps;
    json tables = json::object();
    for (const auto& [name, t] : f.gw_tables) tables[name] = gw_table_to_json(t);
    j["gw_tables"] = tables;
    json logs = json::object();
    for (const auto& [name, t] : f.log_tables) logs[name] = log_table_to_json(t);
    j["log_tables"] = logs;
    json zs = json::object();
    for (const auto& [name, z] : f.z_models) zs[name] = z_model_to_json(z);
    j["z_models"] = zs;
    json cuts = json::object();
    for (const auto& [name, c] : f.cut_models) cuts[name] = cut_model_to_json(c);
    j["cut_models"] = cuts;
    return j;
}

inline std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

inline ModelFile load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("file", "cannot open model file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ModelError("file", std::string("malformed JSON: ") + e.what());
    }
    return model_file_from_json(j);
}

// ---- derived objects --------------------------------------------------------

inline SurgerySetup build_surgery_setup(const ModelFile& f, const std::string& map_name) {
    auto it = f.maps.find(map_name);
    if (it == f.maps.end()) throw ModelError("maps", "no map named '" + map_name + "'");
    const MapPayload& p = it->second;
    const ThreefoldModel& src = f.models.at(p.source_model);
    const ThreefoldModel& tgt = f.models.at(p.target_model);
    SurgerySetup s;
    s.kind = (p.kind == MapKind::iso) ? SurgeryKind::flop : SurgeryKind::transition;
    s.source = src;
    s.target = tgt;
    s.h2_map = LatticeMap{src.lattice, tgt.lattice, p.matrix, p.kind};
    validate_map(s.h2_map);
    s.pullback = make_pullback(s.h2_map, p.right_inverse);
    s.locus_pairs = p.locus_pairs;
    validate_setup(s);
    return s;
}

inline CutModel build_cut_model(const ModelFile& f, const std::string& cut_name) {
    auto it = f.cut_models.find(cut_name);
    if (it == f.cut_models.end()) throw ModelError("cut_models", "no cut model named '" + cut_name + "'");
    const CutModelPayload& p = it->second;
    CutModel c;
    c.plus_model = f.models.at(p.plus_model);
    c.minus_model = f.models.at(p.minus_model);
    c.z_star_plus = p.z_star_plus;
    c.z_star_minus = p.z_star_minus;
    HomologyLattice joint;
    joint.rank = c.plus_model.lattice.rank + c.minus_model.lattice.rank;
    for (const auto& b : c.plus_model.lattice.basis_labels) joint.basis_labels.push_back("+" + b);
    for (const auto& b : c.minus_model.lattice.basis_labels) joint.basis_labels.push_back("-" + b);
    HomologyLattice glued;
    glued.rank = static_cast<long long>(p.assembly.rows);
    for (long long i = 0; i < glued.rank; ++i) glued.basis_labels.push_back("g" + std::to_string(i));
    c.assembly = LatticeMap{joint, glued, p.assembly, MapKind::surjection};
    c.kernel_basis = p.kernel_basis;
    c.n = p.n;
    try {
        validate_cut_model(c);
    } catch (const std::exception& e) {
        throw ModelError("cut_models." + cut_name, e.what());
    }
    return c;
}

// ---- reports ----------------------------------------------------------------

inline json report_to_json(const VerificationReport& r) {
    json j;
    j["verdict"] = r.verdict;
    j["checked_order"] = rational_to_string(r.checked_order);
    j["w_order"] = r.w_order;
    j["mode"] = r.mode;
    json ws = json::array();
    for (const auto& w : r.witnesses) {
        json wj;
        wj["insertions"] = json::array({w.insertions[0], w.insertions[1], w.insertions[2]});
        wj["lhs"] = w.lhs;
        wj["rhs"] = w.rhs;
        wj["equal"] = w.equal;
        ws.push_back(wj);
    }
    j["witnesses"] = ws;
    j["absent_flags"] = r.absent_flags;
    j["notes"] = r.notes;
    return j;
}

inline json splitting_type_to_json(const SplittingType& t) {
    auto comp_json = [](const SplittingComponent& c) {
        json j;
        j["class"] = io_detail::vec_json(c.cls);
        j["genus"] = c.genus;
        j["marks"] = c.marks;
        json ends = json::array();
        for (int k : c.ends) ends.push_back(k);
        j["ends"] = ends;
        return j;
    };
    json j;
    json plus = json::array(), minus = json::array();
    for (const auto& c : t.plus_components) plus.push_back(comp_json(c));
    for (const auto& c : t.minus_components) minus.push_back(comp_json(c));
    j["plus_components"] = plus;
    j["minus_components"] = minus;
    json edges = json::array();
    for (const auto& [edge, count] : t.matching)
        edges.push_back(json{{"plus", std::get<0>(edge)},
                             {"minus", std::get<1>(edge)},
                             {"multiplicity", std::get<2>(edge)},
                             {"count", count}});
    j["matching"] = edges;
    j["genus"] = t.total_genus();
    j["marks"] = t.total_marks();
    return j;
}

}  // namespace gws
