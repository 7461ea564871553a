#include "gwsurgery/model_io.hpp"
#include "support/toys.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gws;

namespace {

ModelFile toy_file() {
    toys::FlopToy flop = toys::make_flop_toy();
    ModelFile f;
    f.models.emplace("M", flop.source);
    f.models.emplace("Mf", flop.target);
    MapPayload phi;
    phi.source_model = "M";
    phi.target_model = "Mf";
    phi.kind = MapKind::iso;
    phi.matrix = flop.setup.h2_map.matrix;
    phi.locus_pairs = flop.setup.locus_pairs;
    f.maps.emplace("phi", phi);
    f.gw_tables.emplace("t", flop.source_table);
    f.gw_tables.emplace("tf", flop.target_table);

    toys::CutToy cut = toys::make_flop_cut();
    f.models.emplace("P", cut.cut.plus_model);
    f.models.emplace("Mb", cut.cut.minus_model);
    CutModelPayload cp;
    cp.plus_model = "P";
    cp.minus_model = "Mb";
    cp.z_star_plus = cut.cut.z_star_plus;
    cp.z_star_minus = cut.cut.z_star_minus;
    cp.assembly = cut.cut.assembly.matrix;
    cp.kernel_basis = cut.cut.kernel_basis;
    f.cut_models.emplace("cut", cp);
    f.z_models.emplace("Z", cut.z);
    LogTablePayload lt;
    lt.model = "Mb";
    lt.table = cut.minus_table;
    f.log_tables.emplace("lmb", lt);
    LogTablePayload pt;
    pt.model = "P";
    pt.table = cut.plus_table;
    f.log_tables.emplace("lp", pt);
    return f;
}

}  // namespace

TEST_CASE("model file round trips byte-identically") {
    ModelFile f = toy_file();
    std::string once = canonical_dump(model_file_to_json(f));
    ModelFile parsed = model_file_from_json(json::parse(once));
    std::string twice = canonical_dump(model_file_to_json(parsed));
    CHECK(once == twice);
}

TEST_CASE("parsed objects reproduce the in-memory toys") {
    ModelFile f = toy_file();
    std::string text = canonical_dump(model_file_to_json(f));
    ModelFile parsed = model_file_from_json(json::parse(text));

    toys::FlopToy flop = toys::make_flop_toy();
    CHECK(parsed.models.at("M").triple == flop.source.triple);
    CHECK(parsed.models.at("M").area == flop.source.area);
    CHECK(parsed.gw_tables.at("t").entries == flop.source_table.entries);
    CHECK(parsed.maps.at("phi").matrix == flop.setup.h2_map.matrix);

    SurgerySetup setup = build_surgery_setup(parsed, "phi");
    CHECK(setup.kind == SurgeryKind::flop);
    VerifyOptions opt;
    opt.area_bound = Rational(10);
    VerificationReport rep =
        verify_flop_qc(setup, parsed.gw_tables.at("t"), &parsed.gw_tables.at("tf"), opt);
    CHECK(rep.verdict);

    CutModel cut = build_cut_model(parsed, "cut");
    CHECK(cut.plus_model.name == "P");
}

TEST_CASE("unresolved references are structured errors") {
    ModelFile f = toy_file();
    json j = model_file_to_json(f);
    SECTION("map to a missing model") {
        j["maps"]["phi"]["target"] = "nope";
        try {
            model_file_from_json(j);
            FAIL("expected ModelError");
        } catch (const ModelError& e) {
            CHECK(e.field.find("maps.phi") != std::string::npos);
        }
    }
    SECTION("table on a missing model") {
        j["gw_tables"]["t"]["model"] = "nope";
        CHECK_THROWS_AS(model_file_from_json(j), ModelError);
    }
    SECTION("malformed rational") {
        j["models"]["M"]["area"][0] = "1.5";
        try {
            model_file_from_json(j);
            FAIL("expected ModelError");
        } catch (const ModelError& e) {
            CHECK(e.field.find("area") != std::string::npos);
        }
    }
    SECTION("violated invariant names the field") {
        j["models"]["M"]["triple"][0][0][1] = "99";  // breaks symmetry
        try {
            model_file_from_json(j);
            FAIL("expected ModelError");
        } catch (const ModelError& e) {
            CHECK(e.field.find("models.M") != std::string::npos);
        }
    }
    SECTION("bad z model inverse") {
        j["z_models"]["Z"]["inverse_pairing"][0][0] = "5";
        CHECK_THROWS_AS(model_file_from_json(j), ModelError);
    }
}

TEST_CASE("verification reports serialize with canonical series text") {
    toys::FlopToy flop = toys::make_flop_toy();
    VerifyOptions opt;
    opt.area_bound = Rational(10);
    opt.generate_target = true;
    VerificationReport rep = verify_flop_qc(flop.setup, flop.source_table, nullptr, opt);
    json j = report_to_json(rep);
    CHECK(j["verdict"] == true);
    CHECK(j["checked_order"] == "10");
    bool found_atom = false;
    for (const auto& w : j["witnesses"])
        if (w["lhs"].get<std::string>().find("G([0,1])") != std::string::npos) found_atom = true;
    CHECK(found_atom);
    // deterministic double render
    CHECK(canonical_dump(j) == canonical_dump(report_to_json(rep)));
}

TEST_CASE("splitting types serialize") {
    toys::CutToy toy = toys::make_flop_cut();
    ClassCoset target{{1, 0}, {}};
    auto types = enumerate_splittings(toy.cut, target, 0, 0, Rational(6));
    REQUIRE_FALSE(types.empty());
    json j = splitting_type_to_json(types.front());
    CHECK(j.contains("plus_components"));
    CHECK(j.contains("matching"));
    CHECK(j["genus"] == 0);
}
