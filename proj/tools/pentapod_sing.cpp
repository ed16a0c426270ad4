#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pentasing/cli.hpp"
#include "pentasing/errors.hpp"

namespace cli = pentasing::cli;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string mode;
    std::string format;
    std::string out_path;
    std::uint64_t seed = 0;
    int starts = 0;
    double tol = 0;
    double box = -1;
    bool has_seed = false, has_starts = false, has_tol = false, has_box = false;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--config", f.config_path, "job config (JSON)")->required();
    sub->add_option("--mode", f.mode,
                    "fixed-orientation | fixed-position | general | equiform");
    sub->add_option("--seed", f.seed, "multistart seed")->each([&](const std::string&) {
        f.has_seed = true;
    });
    sub->add_option("--starts", f.starts, "multistart count")->each([&](const std::string&) {
        f.has_starts = true;
    });
    sub->add_option("--tol", f.tol, "residual acceptance tolerance")
        ->each([&](const std::string&) { f.has_tol = true; });
    sub->add_option("--box", f.box, "position sampling half-width")
        ->each([&](const std::string&) { f.has_box = true; });
    sub->add_option("--format", f.format, "csv | json");
    sub->add_option("--out", f.out_path, "write records to a file instead of stdout");
}

int apply_overrides(cli::JobConfig& cfg, const CommonFlags& f) {
    if (!f.mode.empty()) {
        auto m = cli::mode_from(f.mode);
        if (!m) {
            std::cerr << "error: unknown mode \"" << f.mode << "\"\n";
            return 2;
        }
        cfg.mode = *m;
    }
    if (!f.format.empty()) {
        if (f.format != "csv" && f.format != "json") {
            std::cerr << "error: format must be \"csv\" or \"json\"\n";
            return 2;
        }
        cfg.format = f.format;
    }
    if (f.has_seed) cfg.seed = f.seed;
    if (f.has_starts) {
        if (f.starts < 0) {
            std::cerr << "error: starts must be nonnegative\n";
            return 2;
        }
        cfg.starts = f.starts;
    }
    if (f.has_tol) {
        if (!(f.tol > 0)) {
            std::cerr << "error: tol must be positive\n";
            return 2;
        }
        cfg.tol = f.tol;
    }
    if (f.has_box) {
        if (f.box < 0) {
            std::cerr << "error: box must be nonnegative\n";
            return 2;
        }
        cfg.box = f.box;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linear pentapod singularity tools"};
    app.require_subcommand(1);

    CommonFlags flags[4];
    CLI::App* subs[4] = {
        app.add_subcommand("check", "evaluate F and the Jacobian at the pose"),
        app.add_subcommand("param", "sample the rational parametrization"),
        app.add_subcommand("dist", "closest singular configurations"),
        app.add_subcommand("mesh", "export quadric mesh and spherical curve samples"),
    };
    for (int k = 0; k < 4; ++k) add_common(subs[k], flags[k]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    int which = 0;
    for (int k = 0; k < 4; ++k)
        if (subs[k]->parsed()) which = k;
    const CommonFlags& f = flags[which];

    try {
        cli::JobConfig cfg = cli::load_config(f.config_path);
        if (int rc = apply_overrides(cfg, f); rc != 0) return rc;

        std::ofstream file;
        std::ostream* out = &std::cout;
        if (!f.out_path.empty()) {
            file.open(f.out_path);
            if (!file) {
                std::cerr << "error: cannot write " << f.out_path << "\n";
                return 3;
            }
            out = &file;
        }
        switch (which) {
            case 0: return cli::cmd_check(cfg, *out, std::cerr);
            case 1: return cli::cmd_param(cfg, *out, std::cerr);
            case 2: return cli::cmd_dist(cfg, *out, std::cerr);
            default: return cli::cmd_mesh(cfg, *out, std::cerr);
        }
    } catch (const pentasing::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const pentasing::solver_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const pentasing::degenerate_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
