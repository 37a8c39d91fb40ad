// svarma: batch front end for simulation, order selection, estimation,
// residual diagnostics and impulse responses. Each run reads a JSON config,
// writes its results into --out, and reports failures as a JSON object on
// stderr with an exit code that identifies the failure class.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "svarma/diagnostics.hpp"
#include "svarma/error.hpp"
#include "svarma/estimate.hpp"
#include "svarma/filter.hpp"
#include "svarma/io.hpp"
#include "svarma/irf.hpp"
#include "svarma/parallel.hpp"

namespace fs = std::filesystem;
using svarma::Error;
using svarma::ErrorKind;
using svarma::io::json;

namespace {

enum Exit : int { ok = 0, internal = 1, usage = 2, parse = 3, io_failure = 4, invalid = 5 };

struct Flags {
    std::string command;
    std::string config;
    std::optional<std::string> data;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> scheme;
    std::optional<int> bootstrap;
    std::optional<int> horizon;
};

struct Context {
    Flags flags;
    json config;
    fs::path base;  // directory of the config file; relative paths resolve here
    svarma::EstimateOptions options;
    unsigned threads = 1;
};

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument:
            return usage;
        case ErrorKind::parse:
            return parse;
        case ErrorKind::io:
            return io_failure;
        default:
            return invalid;
    }
}

void report(std::string_view kind, const std::string& message) {
    json err = {{"error", std::string(kind)}, {"message", message}};
    std::cerr << err.dump() << '\n';
}

fs::path resolve(const Context& ctx, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : ctx.base / path;
}

const json& section(const Context& ctx, const char* key) {
    static const json empty = json::object();
    return ctx.config.contains(key) ? ctx.config.at(key) : empty;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    try {
        return j.contains(key) ? j.at(key).get<T>() : fallback;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::parse, std::string("config key '") + key + "': " + e.what());
    }
}

// Writes all files or none: contents go to hidden temporaries first and are
// renamed into place once every temporary is complete.
void write_outputs(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create '" + dir.string() + "': " + ec.message());
    std::vector<std::pair<fs::path, fs::path>> staged;
    auto cleanup = [&] {
        for (const auto& s : staged) fs::remove(s.first, ec);
    };
    for (const auto& [name, content] : files) {
        const fs::path tmp = dir / ("." + name + ".tmp");
        staged.emplace_back(tmp, dir / name);
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) {
            cleanup();
            throw Error(ErrorKind::io, "cannot write '" + tmp.string() + "'");
        }
    }
    for (const auto& [tmp, dest] : staged) {
        fs::rename(tmp, dest, ec);
        if (ec) {
            cleanup();
            throw Error(ErrorKind::io, "cannot move output into '" + dest.string() + "': " + ec.message());
        }
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

svarma::io::CsvTable load_data(const Context& ctx) {
    const json& data = section(ctx, "data");
    std::string path;
    if (ctx.flags.data) {
        path = *ctx.flags.data;
    } else if (data.contains("path")) {
        path = resolve(ctx, get_or<std::string>(data, "path", "")).string();
    } else {
        throw Error(ErrorKind::invalid_argument, "no data: pass --data or set data.path in the config");
    }
    const svarma::io::CsvTable raw = svarma::io::read_csv(path);
    const auto columns = get_or<std::vector<std::string>>(data, "columns", {});
    const json transforms = data.contains("transforms") ? data.at("transforms") : json(nullptr);
    if (transforms.is_null() && columns.empty()) return raw;
    return svarma::io::apply_transforms(raw, transforms, columns);
}

svarma::SvarmaSpec model_spec(const Context& ctx) {
    if (!ctx.config.contains("model")) throw Error(ErrorKind::parse, "config has no 'model' section");
    svarma::SvarmaSpec spec = svarma::io::spec_from_json(ctx.config.at("model"));
    const json& model = ctx.config.at("model");
    if (model.contains("orders_from")) {
        const json sel = svarma::io::read_json(resolve(ctx, get_or<std::string>(model, "orders_from", "")));
        spec = svarma::SvarmaSpec(spec.n, get_or<int>(sel, "p", 0), get_or<int>(sel, "q", 0), spec.families);
    }
    return spec;
}

void check_width(const svarma::SvarmaSpec& spec, const svarma::io::CsvTable& table) {
    if (table.data.cols() != spec.n) {
        throw Error(ErrorKind::validation, "data has " + std::to_string(table.data.cols()) + " columns but the model has n = " +
                                               std::to_string(spec.n));
    }
}

struct Fitted {
    svarma::SvarmaSpec spec;
    svarma::ThetaVector theta;
    svarma::io::CsvTable data;
};

// The estimate comes from config.estimate_file when present, otherwise it is
// fitted here with the config's model and options.
Fitted fitted_model(const Context& ctx) {
    Fitted f;
    f.data = load_data(ctx);
    if (ctx.config.contains("estimate_file")) {
        const json est = svarma::io::read_json(resolve(ctx, get_or<std::string>(ctx.config, "estimate_file", "")));
        if (!est.contains("model")) throw Error(ErrorKind::parse, "estimate file has no 'model' section");
        f.spec = svarma::io::spec_from_json(est.at("model"));
        f.theta = svarma::io::theta_from_json(f.spec, est.at("model"));
    } else {
        const svarma::SvarmaSpec spec = model_spec(ctx);
        check_width(spec, f.data);
        const svarma::EstimationResult r = svarma::fit(f.data.data, spec, ctx.options);
        if (!r.converged) throw Error(ErrorKind::validation, "estimation did not converge (" + r.termination + ")");
        f.spec = r.spec;
        f.theta = r.theta;
    }
    check_width(f.spec, f.data);
    return f;
}

int cmd_simulate(const Context& ctx) {
    const svarma::SvarmaSpec spec = model_spec(ctx);
    const svarma::ThetaVector theta = svarma::io::theta_from_json(spec, ctx.config.at("model"));
    const json& sim = section(ctx, "simulate");
    const int T = get_or<int>(sim, "T", 500);
    const int burnin = get_or<int>(sim, "burnin", 500);
    svarma::Rng rng(ctx.options.seed);
    const svarma::SamplePath path = svarma::simulate(spec, theta, T, rng, burnin);
    svarma::io::CsvTable table;
    table.names = get_or<std::vector<std::string>>(sim, "names", {});
    if (table.names.empty()) {
        for (int i = 0; i < spec.n; ++i) table.names.push_back("y" + std::to_string(i + 1));
    }
    if (static_cast<int>(table.names.size()) != spec.n) throw Error(ErrorKind::validation, "simulate.names must have n entries");
    table.data = path.y;
    write_outputs(ctx.flags.out, {{"simulated.csv", svarma::io::format_csv(table)}});
    return ok;
}

int cmd_select_order(const Context& ctx) {
    const svarma::SvarmaSpec tmpl = model_spec(ctx);
    const svarma::io::CsvTable data = load_data(ctx);
    check_width(tmpl, data);
    const json& sel = section(ctx, "select_order");
    const int p_max = get_or<int>(sel, "p_max", 2);
    const int q_max = get_or<int>(sel, "q_max", 2);
    svarma::EstimateOptions o = ctx.options;
    o.covariance = false;
    const svarma::OrderSelection s = svarma::select_order(data.data, tmpl, p_max, q_max, o, ctx.threads);
    json out = svarma::io::to_json(s);
    out["variables"] = data.names;
    write_outputs(ctx.flags.out, {{"select_order.json", dump(out)}});
    return ok;
}

int cmd_estimate(const Context& ctx) {
    const svarma::SvarmaSpec spec = model_spec(ctx);
    const svarma::io::CsvTable data = load_data(ctx);
    check_width(spec, data);
    const svarma::EstimationResult r = svarma::fit(data.data, spec, ctx.options);
    json out = svarma::io::to_json(r);
    out["variables"] = data.names;
    write_outputs(ctx.flags.out, {{"estimate.json", dump(out)}});
    return ok;
}

int cmd_diagnose(const Context& ctx) {
    const Fitted f = fitted_model(ctx);
    const int lags = get_or<int>(section(ctx, "diagnose"), "lags", 10);
    const Eigen::MatrixXd e = svarma::structural_shocks(f.spec, f.theta, f.data.data).standardized;
    std::vector<std::string> names;
    for (int i = 0; i < f.spec.n; ++i) names.push_back("shock" + std::to_string(i + 1));
    const json out = svarma::io::to_json(svarma::diagnostics(e, lags), names, lags);
    write_outputs(ctx.flags.out, {{"diagnostics.json", dump(out)}});
    return ok;
}

int cmd_irf(const Context& ctx) {
    const Fitted f = fitted_model(ctx);
    const json& cfg = section(ctx, "irf");
    const int H = ctx.flags.horizon ? *ctx.flags.horizon : get_or<int>(cfg, "horizon", 20);
    const int R = ctx.flags.bootstrap ? *ctx.flags.bootstrap : get_or<int>(cfg, "bootstrap", 0);
    const svarma::ShockSize size = svarma::shock_size_from_string(get_or<std::string>(cfg, "shock_size", "one-sd"));
    svarma::IrfResult res;
    if (R > 0) {
        svarma::BootstrapOptions b;
        b.replications = R;
        b.level = get_or<double>(cfg, "level", 0.95);
        b.seed = ctx.options.seed;
        b.threads = ctx.threads;
        b.shock_size = size;
        b.estimate = ctx.options;
        res = svarma::bootstrap_irf(f.spec, f.theta, f.data.data, H, b);
    } else {
        res = svarma::irf(f.spec, f.theta, H, size);
    }
    write_outputs(ctx.flags.out, {{"irf.json", dump(svarma::io::to_json(res, f.data.names))},
                                  {"irf.csv", svarma::io::irf_long_csv(res, f.data.names)}});
    return ok;
}

int run(const Flags& flags) {
    Context ctx;
    ctx.flags = flags;
    ctx.config = svarma::io::read_json(flags.config);
    ctx.base = fs::absolute(flags.config).parent_path();
    const int version = get_or<int>(ctx.config, "schema_version", svarma::io::kSchemaVersion);
    if (version != svarma::io::kSchemaVersion) {
        throw Error(ErrorKind::parse, "unsupported schema_version " + std::to_string(version));
    }
    ctx.options = svarma::io::options_from_json(section(ctx, "options"));
    if (flags.seed) ctx.options.seed = *flags.seed;
    if (flags.scheme) ctx.options.scheme = svarma::scheme_from_string(*flags.scheme);
    ctx.threads = flags.threads ? *flags.threads : svarma::default_threads();
    if (ctx.threads == 0) ctx.threads = svarma::default_threads();

    if (flags.command == "simulate") return cmd_simulate(ctx);
    if (flags.command == "select-order") return cmd_select_order(ctx);
    if (flags.command == "estimate") return cmd_estimate(ctx);
    if (flags.command == "diagnose") return cmd_diagnose(ctx);
    if (flags.command == "irf") return cmd_irf(ctx);
    throw Error(ErrorKind::invalid_argument, "unknown command '" + flags.command + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural VARMA simulation, estimation and impulse responses"};
    app.require_subcommand(1);
    Flags flags;
    const std::vector<std::pair<const char*, const char*>> commands{
        {"simulate", "simulate a panel from the configured model"},
        {"select-order", "fit a (p, q) grid and pick the AIC minimizer"},
        {"estimate", "conditional maximum likelihood fit"},
        {"diagnose", "Ljung-Box, McLeod-Li and Jarque-Bera tests on structural residuals"},
        {"irf", "impulse responses, variance decompositions and bootstrap bands"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--data", flags.data, "input CSV (overrides data.path)");
        sub->add_option("--out", flags.out, "output directory")->required();
        sub->add_option("--seed", flags.seed, "master random seed");
        sub->add_option("--threads", flags.threads, "worker threads (default: all cores)");
        sub->add_option("--scheme", flags.scheme, "identification scheme for reported B")->check(CLI::IsMember({"A", "B", "C"}));
        sub->add_option("--bootstrap", flags.bootstrap, "bootstrap replications for irf");
        sub->add_option("--horizon", flags.horizon, "impulse response horizon");
        sub->callback([&flags, n = std::string(name)] { flags.command = n; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report("usage", e.what());
        return usage;
    }
    try {
        return run(flags);
    } catch (const Error& e) {
        report(svarma::to_string(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        report("internal", e.what());
        return internal;
    }
}
