#include "varkit/dsl/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int emit(const varkit::dsl::ReportDocument& rep, bool json) {
    if (json)
        std::cout << rep.to_json().dump(2) << "\n";
    else
        std::cout << rep.to_text();
    return rep.exit_code;
}

std::vector<double> parse_csv_doubles(const std::string& csv) {
    std::vector<double> out;
    std::string piece;
    std::istringstream ss(csv);
    while (std::getline(ss, piece, ',')) {
        if (piece.empty()) continue;
        out.push_back(std::stod(piece));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"varkit - symbolic analysis of variational structure, symmetries and\n"
                 "conservation laws of second-order PDE systems"};
    app.require_subcommand(1);
    bool json = false;
    app.add_flag("--json", json, "emit the report as JSON");

    varkit::dsl::Options opt;
    std::string points_csv, domain_csv;

    auto* check = app.add_subcommand("check-variational", "test the Helmholtz conditions");
    check->add_option("file", opt.file, "model file")->required();

    auto* lagr = app.add_subcommand("lagrangian", "construct and verify the canonical Lagrangian");
    lagr->add_option("file", opt.file, "model file")->required();

    auto* sym = app.add_subcommand("symmetry", "test whether a field is a symmetry of the source form");
    sym->add_option("file", opt.file, "model file")->required();
    sym->add_option("--field", opt.field, "vector field name")->required();

    auto* cons = app.add_subcommand("conservation", "test the continuity equation of a field");
    cons->add_option("file", opt.file, "model file")->required();
    cons->add_option("--field", opt.field, "vector field name")->required();
    cons->add_option("--current", opt.current, "verify this declared current instead of constructing one");

    auto* ecs = app.add_subcommand("ecs", "evaluate the continuity-and-symmetry constraint of a field");
    ecs->add_option("file", opt.file, "model file")->required();
    ecs->add_option("--field", opt.field, "vector field name")->required();

    auto* tak = app.add_subcommand("takens", "check symmetry, continuity and span hypotheses and decide variationality");
    tak->add_option("file", opt.file, "model file")->required();
    tak->add_option("--points", points_csv, "sample points, base coordinates comma-separated");
    tak->add_flag("--trace", opt.trace, "restate the staged Helmholtz conclusions on this instance");

    auto* weak = app.add_subcommand("weak-check", "numerically compare the first variation with the weak-form pairing");
    weak->add_option("file", opt.file, "model file")->required();
    weak->add_option("--section", opt.section_expr, "polynomial section, one component per fiber")->required();
    weak->add_option("--test", opt.test_expr, "boundary-vanishing test polynomial(s)")->required();
    weak->add_option("--domain", domain_csv, "integration bounds a,b or ax,bx,ay,by")->required();
    weak->add_option("--epsilon", opt.epsilon, "finite-difference step (default 1e-4)");

    auto* count = app.add_subcommand("count", "independent Helmholtz expression count for dimensions n m");
    count->add_option("n", opt.count_n, "base dimension")->required();
    count->add_option("m", opt.count_m, "fiber dimension")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (!points_csv.empty()) opt.points = parse_csv_doubles(points_csv);
        if (!domain_csv.empty()) opt.domain = parse_csv_doubles(domain_csv);
    } catch (const std::exception& e) {
        std::cerr << "varkit: invalid numeric list: " << e.what() << "\n";
        return 2;
    }

    if (check->parsed()) opt.command = "check-variational";
    else if (lagr->parsed()) opt.command = "lagrangian";
    else if (sym->parsed()) opt.command = "symmetry";
    else if (cons->parsed()) opt.command = "conservation";
    else if (ecs->parsed()) opt.command = "ecs";
    else if (tak->parsed()) opt.command = "takens";
    else if (weak->parsed()) opt.command = "weak-check";
    else if (count->parsed()) opt.command = "count";

    return emit(varkit::dsl::run(opt), json);
}
