// Command-line front end: ingest a model file, run a surgery transform,
// verification, gluing evaluation or series expansion, and emit canonical
// JSON reports. Exit codes: 0 success (and verdict true for verify), 1
// verdict false, 2 input error.

#include "gwsurgery/model_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace gws;

void write_output(const std::optional<std::string>& out_path, const std::string& text) {
    if (out_path) {
        std::ofstream out(*out_path);
        if (!out) throw ModelError("out", "cannot open output file '" + *out_path + "'");
        out << text;
    } else {
        std::cout << text;
    }
}

const GWTable& find_gw_table(const ModelFile& f, const std::string& name) {
    auto it = f.gw_tables.find(name);
    if (it == f.gw_tables.end()) throw ModelError("gw_tables", "no GW table named '" + name + "'");
    return it->second;
}

const LogTablePayload& find_log_table(const ModelFile& f, const std::string& name) {
    auto it = f.log_tables.find(name);
    if (it == f.log_tables.end()) throw ModelError("log_tables", "no log table named '" + name + "'");
    return it->second;
}

int run_transform(const std::string& model_path, const std::string& map_name,
                  const std::string& table_name, const std::string& order,
                  const std::optional<std::string>& out, SurgeryKind kind) {
    ModelFile f = load_model_file(model_path);
    SurgerySetup s = build_surgery_setup(f, map_name);
    if (s.kind != kind) throw ModelError("maps." + map_name, "map kind does not match the subcommand");
    const GWTable& t = find_gw_table(f, table_name);
    if (t.model_name != s.source.name)
        throw ModelError("gw_tables." + table_name, "table is not attached to the source model");
    Rational bound = parse_rational(order);
    TransformResult r = (kind == SurgeryKind::flop) ? flop_transform(t, s, bound)
                                                    : transition_transform(t, s, bound);
    json j;
    j["table"] = gw_table_to_json(r.table);
    j["notes"] = r.notes;
    write_output(out, canonical_dump(j));
    return 0;
}

int run_verify(const std::string& model_path, const std::string& map_name,
               const std::string& table_name, const std::optional<std::string>& target_table_name,
               const std::string& order, int w_order, const std::optional<std::string>& w_name,
               const std::string& mode, const std::optional<std::string>& out, SurgeryKind kind) {
    ModelFile f = load_model_file(model_path);
    SurgerySetup s = build_surgery_setup(f, map_name);
    if (s.kind != kind) throw ModelError("maps." + map_name, "map kind does not match the subcommand");
    const GWTable& t = find_gw_table(f, table_name);
    if (t.model_name != s.source.name)
        throw ModelError("gw_tables." + table_name, "table is not attached to the source model");
    VerifyOptions opt;
    opt.area_bound = parse_rational(order);
    opt.w_order = w_order;
    opt.w_name = w_name;
    if (mode == "generate") {
        opt.generate_target = true;
    } else if (mode != "check") {
        throw ModelError("mode", "mode must be 'check' or 'generate'");
    }
    const GWTable* target = nullptr;
    if (!opt.generate_target) {
        if (!target_table_name) throw ModelError("target-table", "check mode requires --target-table");
        target = &find_gw_table(f, *target_table_name);
        if (target->model_name != s.target.name)
            throw ModelError("gw_tables." + *target_table_name,
                             "target table is not attached to the target model");
    }
    VerificationReport rep = (kind == SurgeryKind::flop)
                                 ? verify_flop_qc(s, t, target, opt)
                                 : verify_transition_qc(s, t, target, opt);
    write_output(out, canonical_dump(report_to_json(rep)));
    return rep.verdict ? 0 : 1;
}

ClassCoset target_coset(const ModelFile& f, const std::string& cut_name, const IntVec& rep) {
    const CutModelPayload& p = f.cut_models.at(cut_name);
    if (rep.size() != p.assembly.rows) throw ModelError("target", "target class length mismatch");
    return ClassCoset{rep, p.kernel_basis};
}

int run_enumerate(const std::string& model_path, const std::string& cut_name, const IntVec& target,
                  int genus, int marks, const std::string& order,
                  const std::optional<std::string>& out) {
    ModelFile f = load_model_file(model_path);
    CutModel cut = build_cut_model(f, cut_name);
    auto types = enumerate_splittings(cut, target_coset(f, cut_name, target), genus, marks,
                                      parse_rational(order));
    json j;
    json arr = json::array();
    for (const auto& t : types) arr.push_back(splitting_type_to_json(t));
    j["count"] = types.size();
    j["types"] = arr;
    write_output(out, canonical_dump(j));
    return 0;
}

int run_glue(const std::string& model_path, const std::string& cut_name, const std::string& z_name,
             const std::string& plus_table, const std::string& minus_table, const IntVec& target,
             int genus, const std::vector<std::string>& plus_ins,
             const std::vector<std::string>& minus_ins, const std::string& order,
             const std::optional<std::string>& absolute_table, const std::optional<std::string>& out) {
    ModelFile f = load_model_file(model_path);
    CutModel cut = build_cut_model(f, cut_name);
    auto zit = f.z_models.find(z_name);
    if (zit == f.z_models.end()) throw ModelError("z_models", "no Z model named '" + z_name + "'");
    const LogTablePayload& pt = find_log_table(f, plus_table);
    const LogTablePayload& mt = find_log_table(f, minus_table);
    if (pt.model != cut.plus_model.name || mt.model != cut.minus_model.name)
        throw ModelError("log_tables", "log tables must be attached to the cut sides");
    Rational bound = parse_rational(order);
    ClassCoset coset = target_coset(f, cut_name, target);
    TotalInvariantResult res = total_invariant(cut, zit->second, coset, genus, pt.table, mt.table,
                                               SideInsertions{plus_ins, minus_ins}, bound);
    json j;
    j["total"] = rational_to_string(res.total);
    json types = json::array();
    for (const auto& b : res.breakdown) {
        json tj = splitting_type_to_json(b.type);
        tj["value"] = rational_to_string(b.value);
        types.push_back(tj);
    }
    j["types"] = types;
    json absent = json::array();
    for (const auto& k : res.absent_keys) {
        json a;
        a["class"] = io_detail::vec_json(k.cls);
        a["genus"] = k.genus;
        json tangency = json::array(), z_ins = json::array();
        for (const auto& e : k.ends) {
            tangency.push_back(e.multiplicity);
            z_ins.push_back(e.z_class);
        }
        a["tangency"] = tangency;
        a["z_insertions"] = z_ins;
        a["insertions"] = k.interior;
        absent.push_back(a);
    }
    j["absent"] = absent;
    if (absolute_table) {
        const CutModelPayload& p = f.cut_models.at(cut_name);
        if (!p.glued_model)
            throw ModelError("cut_models." + cut_name, "absolute check needs a glued_model reference");
        const GWTable& abs_table = find_gw_table(f, *absolute_table);
        std::vector<std::string> glued_ins = plus_ins;
        glued_ins.insert(glued_ins.end(), minus_ins.begin(), minus_ins.end());
        AbsoluteConsistency ac = check_absolute_consistency(
            f.models.at(*p.glued_model), abs_table, coset, genus, glued_ins, bound, res.total);
        j["absolute_check"] = json{{"glued_sum", rational_to_string(ac.glued_sum)},
                                   {"total", rational_to_string(ac.total)},
                                   {"equal", ac.equal},
                                   {"any_entry", ac.any_entry}};
    }
    write_output(out, canonical_dump(j));
    return 0;
}

int run_expand(const std::string& series_text, const std::string& order,
               const std::optional<std::string>& area_arg) {
    // Infer the rank from the first bracketed exponent in the text.
    std::size_t open = series_text.find('[');
    if (open == std::string::npos) throw ModelError("series", "series has no exponent to infer rank");
    std::size_t close = series_text.find(']', open);
    if (close == std::string::npos) throw ModelError("series", "unbalanced exponent bracket");
    std::size_t rank = 1;
    for (std::size_t i = open; i < close; ++i)
        if (series_text[i] == ',') ++rank;
    NovikovSeries s = nv_parse(series_text, rank);
    RatVec area(rank, Rational(1));
    if (area_arg) {
        area.clear();
        std::string spec = *area_arg;
        std::size_t pos = 0;
        while (pos <= spec.size()) {
            std::size_t comma = spec.find(',', pos);
            std::string tok = spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            area.push_back(parse_rational(tok));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (area.size() != rank) throw ModelError("area", "area functional length != series rank");
    }
    NovikovSeries expanded = nv_expand(s, Truncation{area, parse_rational(order)});
    std::cout << nv_render(expanded) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact quantum-cohomology surgery calculator"};
    app.require_subcommand(1);

    std::string model_path, map_name, table_name, order = "10", mode = "check";
    std::string cut_name, z_name, plus_table, minus_table, series_text;
    std::optional<std::string> target_table, out_path, w_name, absolute_table, area_arg;
    std::vector<long long> target_class;
    std::vector<std::string> plus_ins, minus_ins;
    int w_order = 0, genus = 0, marks = 0;

    auto add_model = [&](CLI::App* cmd) {
        cmd->add_option("--model", model_path, "model file (JSON)")->required();
    };

    CLI::App* flop = app.add_subcommand("flop", "transport a GW table through a flop");
    add_model(flop);
    flop->add_option("--map", map_name)->required();
    flop->add_option("--table", table_name)->required();
    flop->add_option("--order", order, "area bound (rational)");
    flop->add_option("--out", out_path);

    CLI::App* transition = app.add_subcommand("transition", "push a GW table through a small transition");
    add_model(transition);
    transition->add_option("--map", map_name)->required();
    transition->add_option("--table", table_name)->required();
    transition->add_option("--order", order);
    transition->add_option("--out", out_path);

    CLI::App* vflop = app.add_subcommand("verify-flop", "check 3-point naturality across a flop");
    add_model(vflop);
    vflop->add_option("--map", map_name)->required();
    vflop->add_option("--table", table_name)->required();
    vflop->add_option("--target-table", target_table);
    vflop->add_option("--order", order);
    vflop->add_option("--mode", mode, "check|generate");
    vflop->add_option("--out", out_path);

    CLI::App* vtrans = app.add_subcommand("verify-transition", "check big-quantum naturality across a transition");
    add_model(vtrans);
    vtrans->add_option("--map", map_name)->required();
    vtrans->add_option("--table", table_name)->required();
    vtrans->add_option("--target-table", target_table);
    vtrans->add_option("--order", order);
    vtrans->add_option("--w-order", w_order, "maximum number of w insertions");
    vtrans->add_option("--w", w_name, "deformation class name on the target model");
    vtrans->add_option("--mode", mode, "check|generate");
    vtrans->add_option("--out", out_path);

    CLI::App* glue = app.add_subcommand("glue", "evaluate the gluing sum for a target coset");
    add_model(glue);
    glue->add_option("--cut", cut_name)->required();
    glue->add_option("--z", z_name)->required();
    glue->add_option("--plus-table", plus_table)->required();
    glue->add_option("--minus-table", minus_table)->required();
    glue->add_option("--target", target_class, "target class in the glued lattice")->required();
    glue->add_option("--genus", genus);
    glue->add_option("--insertions-plus", plus_ins, "interior insertion names on the plus side");
    glue->add_option("--insertions-minus", minus_ins, "interior insertion names on the minus side");
    glue->add_option("--order", order);
    glue->add_option("--absolute", absolute_table, "absolute table for the consistency check");
    glue->add_option("--out", out_path);

    CLI::App* enumerate = app.add_subcommand("enumerate", "list splitting types for a target coset");
    add_model(enumerate);
    enumerate->add_option("--cut", cut_name)->required();
    enumerate->add_option("--target", target_class)->required();
    enumerate->add_option("--genus", genus);
    enumerate->add_option("--marks", marks);
    enumerate->add_option("--order", order);
    enumerate->add_option("--out", out_path);

    CLI::App* expand = app.add_subcommand("expand", "print a truncated series expansion");
    expand->add_option("--series", series_text)->required();
    expand->add_option("--order", order, "area bound (rational)");
    expand->add_option("--area", area_arg, "comma-separated area functional (default all ones)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(flop))
            return run_transform(model_path, map_name, table_name, order, out_path, gws::SurgeryKind::flop);
        if (app.got_subcommand(transition))
            return run_transform(model_path, map_name, table_name, order, out_path,
                                 gws::SurgeryKind::transition);
        if (app.got_subcommand(vflop))
            return run_verify(model_path, map_name, table_name, target_table, order, 0, std::nullopt,
                              mode, out_path, gws::SurgeryKind::flop);
        if (app.got_subcommand(vtrans))
            return run_verify(model_path, map_name, table_name, target_table, order, w_order, w_name,
                              mode, out_path, gws::SurgeryKind::transition);
        if (app.got_subcommand(glue)) {
            IntVec target(target_class.begin(), target_class.end());
            return run_glue(model_path, cut_name, z_name, plus_table, minus_table, target, genus,
                            plus_ins, minus_ins, order, absolute_table, out_path);
        }
        if (app.got_subcommand(enumerate)) {
            IntVec target(target_class.begin(), target_class.end());
            return run_enumerate(model_path, cut_name, target, genus, marks, order, out_path);
        }
        if (app.got_subcommand(expand)) return run_expand(series_text, order, area_arg);
    } catch (const gws::ModelError& e) {
        gws::json err;
        err["error"] = {{"field", e.field}, {"message", e.what()}};
        std::cerr << err.dump(2) << "\n";
        return 2;
    } catch (const std::exception& e) {
        gws::json err;
        err["error"] = {{"field", "input"}, {"message", e.what()}};
        std::cerr << err.dump(2) << "\n";
        return 2;
    }
    return 2;
}
