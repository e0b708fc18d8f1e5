#include "qform/cli.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
    using namespace qform;
    CLI::App app{"qform: quadratic forms, formations and the l-monoid over Z and small fields"};
    app.require_subcommand(1, 1);

    cli::Options opt;
    std::uint64_t budget = opt.budget.nodes;
    std::string format = "json";
    app.add_option("--budget", budget, "search node budget")->capture_default_str();
    app.add_option("--stab-cap", opt.stab_cap, "largest stabilisation tried")->capture_default_str();
    app.add_option("--order-cap", opt.order_cap, "largest linking group enumerated")->capture_default_str();
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"json"}));

    std::string input = "-";
    for (auto& name : cli::commands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("input", input, "document path, '-' for stdin");
        sub->fallthrough();
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : cli::Invalid;
    }
    opt.budget.nodes = budget;

    std::stringstream text;
    if (input == "-") {
        text << std::cin.rdbuf();
    } else {
        std::ifstream f(input);
        if (!f) {
            std::cout << cli::render({{"error", "cannot read '" + input + "'"}, {"path", ""}});
            return cli::Invalid;
        }
        text << f.rdbuf();
    }
    cli::Outcome r;
    try {
        r = cli::run_text(app.get_subcommands().front()->get_name(), text.str(), opt);
    } catch (const std::exception& e) {
        std::cerr << "qform: internal error: " << e.what() << "\n";
        return 70;
    }
    std::cout << cli::render(r.out);
    return r.exit;
}
