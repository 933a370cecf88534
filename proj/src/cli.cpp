#include "pcag/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "pcag/config.hpp"
#include "pcag/experiments.hpp"
#include "pcag/runtime.hpp"

namespace pcag {

namespace {

namespace fs = std::filesystem;

struct RunContext {
    Config cfg;
    fs::path out_dir;
};

SensorField load_field(const Config& cfg) {
    const fs::path path = cfg.get_string("positions");
    const auto root = static_cast<SensorId>(cfg.get_int("root_id"));
    return load_positions(path, root);
}

EpochTrace load_dataset(const Config& cfg, const SensorField& field) {
    if (cfg.has("trace")) {
        std::vector<SensorId> exclude;
        if (cfg.has("exclude"))
            for (int id : cfg.get_int_list("exclude")) exclude.push_back(id);
        EpochTrace trace =
            load_trace(cfg.get_string("trace"), cfg.get_double("epoch_seconds", 30.0), exclude,
                       bucket_stat_from_string(cfg.get_string("bucket_stat", "last")));
        for (SensorId id : trace.dropped_sensors)
            std::cerr << "warning: sensor " << id << " had no usable readings and was dropped\n";
        if (trace.sensor_ids != [&field] {
                std::vector<SensorId> ids;
                for (const auto& s : field.sensors()) ids.push_back(s.id);
                return ids;
            }())
            throw std::invalid_argument("trace sensors do not match the positions file");
        return trace;
    }
    SynthSpec spec;
    spec.p = field.size();
    spec.T = static_cast<std::size_t>(cfg.get_int("synth_T", 2880));
    spec.correlation_length = cfg.get_double("synth_corr_length", 12.0);
    spec.noise = cfg.get_double("synth_noise", 0.05);
    spec.seed = cfg.get_seed("seed", 1);
    spec.sources = static_cast<int>(cfg.get_int("synth_sources", 3));
    spec.amplitude_decay = cfg.get_double("synth_amp_decay", 0.7);
    return generate_synthetic(spec, field);
}

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

void validate_common(const Config& cfg, const SensorField& field, const EpochTrace* trace) {
    if (cfg.has("q"))
        require(cfg.get_int("q") >= 1 && cfg.get_int("q") <= static_cast<long long>(field.size()),
                "q must be in [1, p]");
    if (cfg.has("q_list"))
        for (int q : cfg.get_int_list("q_list"))
            require(q >= 1 && q <= static_cast<int>(field.size()), "q_list entries must be in [1, p]");
    if (cfg.has("epsilon")) require(cfg.get_double("epsilon") >= 0.0, "epsilon must be >= 0");
    if (trace && cfg.has("folds"))
        require(cfg.get_int("folds") <= static_cast<long long>(trace->T()),
                "folds must not exceed the number of epochs");
}

int cmd_tree(const RunContext& ctx) {
    SensorField field = load_field(ctx.cfg);
    const double range = ctx.cfg.get_double("radio_range");
    RoutingTree tree = build_routing_tree(field, range, field.root_id());
    TreeStats stats = tree_stats(tree);
    fs::create_directories(ctx.out_dir);
    save_tree(tree, ctx.out_dir / "tree.csv");
    analytic_loads(tree, NetworkOp::d()).save(ctx.out_dir / "tree_default_loads.csv");
    std::cout << "tree: p=" << field.size() << " range=" << range << " depth=" << stats.depth
              << " c_max=" << stats.max_children << " root=" << field.root_id() << "\n";
    return 0;
}

int cmd_synth(const RunContext& ctx) {
    SensorField field = load_field(ctx.cfg);
    const Config& cfg = ctx.cfg;
    // synth always generates, even when a trace key is present
    SynthSpec spec;
    spec.p = field.size();
    spec.T = static_cast<std::size_t>(cfg.get_int("synth_T", 2880));
    spec.correlation_length = cfg.get_double("synth_corr_length", 12.0);
    spec.noise = cfg.get_double("synth_noise", 0.05);
    spec.seed = cfg.get_seed("seed", 1);
    spec.sources = static_cast<int>(cfg.get_int("synth_sources", 3));
    spec.amplitude_decay = cfg.get_double("synth_amp_decay", 0.7);
    EpochTrace trace = generate_synthetic(spec, field);
    fs::create_directories(ctx.out_dir);
    save_trace(trace, ctx.out_dir / "synthetic_trace.csv");
    std::cout << "synth: p=" << trace.p() << " T=" << trace.T() << " sources=" << spec.sources
              << " seed=" << spec.seed << "\n";
    return 0;
}

std::size_t train_epoch_count(const Config& cfg, std::size_t T) {
    const auto n = static_cast<std::size_t>(
        cfg.get_int("train_epochs", static_cast<long long>(T)));
    require(n >= 2 && n <= T, "train_epochs must be in [2, T]");
    return n;
}

int cmd_cov(const RunContext& ctx) {
    SensorField field = load_field(ctx.cfg);
    EpochTrace trace = load_dataset(ctx.cfg, field);
    validate_common(ctx.cfg, field, &trace);
    const double range = ctx.cfg.get_double("radio_range");
    Neighborhoods nbh = build_neighborhoods(field, range);
    const std::size_t epochs = train_epoch_count(ctx.cfg, trace.T());

    auto network = make_cov_network(nbh);
    LoadReport cumulative(nbh.ids());
    for (std::size_t t = 0; t < epochs; ++t)
        cumulative += run_cov_round(network, nbh, trace.epoch_vector(t)).loads;
    MaskedCovariance cov = assemble_masked(network, nbh);

    fs::create_directories(ctx.out_dir);
    save_masked(cov, nbh.ids(), ctx.out_dir / "cov_snapshot.csv");
    cumulative.save(ctx.out_dir / "cov_loads.csv");
    std::cout << "cov: epochs=" << epochs << " range=" << range
              << " max_node_load=" << cumulative.max_node_load() << "\n";
    return 0;
}

int cmd_basis(const RunContext& ctx) {
    SensorField field = load_field(ctx.cfg);
    EpochTrace trace = load_dataset(ctx.cfg, field);
    validate_common(ctx.cfg, field, &trace);
    const auto q = static_cast<int>(ctx.cfg.get_int("q"));
    const BasisMethod method =
        basis_method_from_string(ctx.cfg.get_string("basis_method", "reference"));
    require(method != BasisMethod::Distributed, "use the pim subcommand for the distributed path");
    const std::size_t epochs = train_epoch_count(ctx.cfg, trace.T());

    Dataset data = dataset_from_trace(trace);
    std::vector<Vector> train(data.epochs.begin(),
                              data.epochs.begin() + static_cast<std::ptrdiff_t>(epochs));
    PcaBasis basis = train_basis(train, q, method, ctx.cfg.get_double("delta", 1e-3),
                                 static_cast<int>(ctx.cfg.get_int("t_max", 100)),
                                 InitPolicy::random(ctx.cfg.get_seed("seed", 1)));

    fs::create_directories(ctx.out_dir);
    Table basis_table;
    basis_table.header = {"sensor_id", "mean"};
    for (std::size_t k = 1; k <= basis.q(); ++k)
        basis_table.header.push_back("w_" + std::to_string(k));
    for (std::size_t i = 0; i < basis.p(); ++i) {
        std::vector<std::string> row{std::to_string(trace.sensor_ids[i]),
                                     format_value(basis.mean[i])};
        for (std::size_t k = 0; k < basis.q(); ++k)
            row.push_back(format_value(basis.pairs[k].vector[i]));
        basis_table.add_row(std::move(row));
    }
    basis_table.write(ctx.out_dir / "basis.csv");
    Table ev;
    ev.header = {"component", "eigenvalue"};
    for (std::size_t k = 0; k < basis.q(); ++k)
        ev.add_row({std::to_string(k + 1), format_value(basis.pairs[k].value)});
    ev.write(ctx.out_dir / "eigenvalues.csv");
    std::cout << "basis: accepted=" << basis.q() << " of q=" << q << " epochs=" << epochs
              << "\n";
    return 0;
}

int cmd_pim(const RunContext& ctx) {
    SensorField field = load_field(ctx.cfg);
    EpochTrace trace = load_dataset(ctx.cfg, field);
    validate_common(ctx.cfg, field, &trace);
    const double range = ctx.cfg.get_double("radio_range");
    Neighborhoods nbh = build_neighborhoods(field, range);
    RoutingTree tree = build_routing_tree(field, nbh, field.root_id());
    const auto q = static_cast<int>(ctx.cfg.get_int("q"));
    const std::size_t epochs = train_epoch_count(ctx.cfg, trace.T());

    auto cov_network = make_cov_network(nbh);
    LoadReport cov_loads(nbh.ids());
    Vector mean(field.size(), 0.0);
    for (std::size_t t = 0; t < epochs; ++t) {
        const Vector x = trace.epoch_vector(t);
        cov_loads += run_cov_round(cov_network, nbh, x).loads;
        for (std::size_t i = 0; i < x.size(); ++i) mean[i] += x[i];
    }
    for (double& m : mean) m /= static_cast<double>(epochs);
    MaskedCovariance cov = assemble_masked(cov_network, nbh);

    PimNetwork network(cov);
    PimConfig pim_cfg;
    pim_cfg.q_target = q;
    pim_cfg.delta = ctx.cfg.get_double("delta", 1e-3);
    pim_cfg.t_max = static_cast<int>(ctx.cfg.get_int("t_max", 50));
    DistPimResult result = run_distributed_pim(network, tree, pim_cfg, mean);

    fs::create_directories(ctx.out_dir);
    cov_loads.save(ctx.out_dir / "cov_loads.csv");
    result.cumulative_loads.save(ctx.out_dir / "pim_loads.csv");
    save_iteration_log(result.log, ctx.out_dir / "pim_iterations.csv");
    Table ev;
    ev.header = {"component", "eigenvalue", "iterations"};
    for (int k = 0; k < result.accepted; ++k)
        ev.add_row({std::to_string(k + 1), format_value(result.eigenvalues[k]),
                    std::to_string(result.iterations[k])});
    ev.write(ctx.out_dir / "eigenvalues.csv");
    std::cout << "pim: accepted=" << result.accepted << " of q=" << q
              << " total_load=" << result.cumulative_loads.total()
              << (result.stopped_by_sign ? " (stopped by sign test)" : "")
              << (result.stopped_by_zero_norm ? " (stopped by zero norm)" : "") << "\n";
    return 0;
}

int cmd_score(const RunContext& ctx) {
    SensorField field = load_field(ctx.cfg);
    EpochTrace trace = load_dataset(ctx.cfg, field);
    validate_common(ctx.cfg, field, &trace);
    const double range = ctx.cfg.get_double("radio_range");
    RoutingTree tree = build_routing_tree(field, range, field.root_id());
    const auto q = static_cast<int>(ctx.cfg.get_int("q"));
    const std::size_t train_n = train_epoch_count(ctx.cfg, trace.T());
    require(train_n < trace.T(), "score: train_epochs must leave epochs to score");

    Dataset data = dataset_from_trace(trace);
    std::vector<Vector> train(data.epochs.begin(),
                              data.epochs.begin() + static_cast<std::ptrdiff_t>(train_n));
    PcaBasis basis = train_basis(train, q, BasisMethod::Reference, 1e-3, 1,
                                 InitPolicy::random(ctx.cfg.get_seed("seed", 1)));
    std::optional<double> epsilon;
    if (ctx.cfg.has("epsilon")) epsilon = ctx.cfg.get_double("epsilon");
    auto rows = make_basis_rows(basis, data.ids, epsilon);

    fs::create_directories(ctx.out_dir);
    Table scores;
    scores.header = {"epoch"};
    for (std::size_t k = 1; k <= basis.q(); ++k)
        scores.header.push_back("z_" + std::to_string(k));
    Table recon;
    recon.header = {"epoch", "sensor_id", "x", "x_hat"};
    LoadReport loads(tree.ids());
    std::size_t violation_count = 0;

    for (std::size_t t = train_n; t < trace.T(); ++t) {
        const Vector x = data.epochs[t];
        Vector z;
        Vector recon_x;
        if (epsilon) {
            SupervisedEpochResult epoch = run_supervised_epoch(tree, rows, basis, x);
            z = std::move(epoch.z);
            recon_x = std::move(epoch.sink_view);
            violation_count += epoch.violations.size();
            loads += epoch.loads;
        } else {
            ScoreEpochResult epoch = score_epoch(tree, rows, x);
            z = std::move(epoch.z);
            recon_x = sink_reconstruct(basis, z);
            loads += epoch.loads;
        }
        std::vector<std::string> row{std::to_string(t)};
        for (double v : z) row.push_back(format_value(v));
        scores.add_row(std::move(row));
        for (std::size_t i = 0; i < x.size(); ++i)
            recon.add_row({std::to_string(t), std::to_string(data.ids[i]), format_value(x[i]),
                           format_value(recon_x[i])});
    }
    scores.write(ctx.out_dir / "scores.csv");
    recon.write(ctx.out_dir / "reconstruction.csv");
    loads.save(ctx.out_dir / "score_loads.csv");
    std::cout << "score: epochs=" << trace.T() - train_n << " q=" << basis.q()
              << " violations=" << violation_count << "\n";
    return 0;
}

int cmd_xval(const RunContext& ctx) {
    SensorField field = load_field(ctx.cfg);
    EpochTrace trace = load_dataset(ctx.cfg, field);
    validate_common(ctx.cfg, field, &trace);
    Dataset data = dataset_from_trace(trace);

    XvalOptions opt;
    opt.folds = static_cast<int>(ctx.cfg.get_int("folds", 10));
    opt.components = ctx.cfg.has("q_list")
                         ? ctx.cfg.get_int_list("q_list")
                         : std::vector<int>{static_cast<int>(ctx.cfg.get_int("q", 10))};
    opt.method = basis_method_from_string(ctx.cfg.get_string("basis_method", "reference"));
    opt.delta = ctx.cfg.get_double("delta", 1e-3);
    opt.t_max = static_cast<int>(ctx.cfg.get_int("t_max", 100));
    opt.seed = ctx.cfg.get_seed("seed", 1);
    opt.field = &field;
    opt.root_id = field.root_id();
    if (ctx.cfg.has("masked_ranges")) opt.masked_ranges = ctx.cfg.get_double_list("masked_ranges");
    if (ctx.cfg.has("fold_sweep")) opt.fold_sweep = ctx.cfg.get_int_list("fold_sweep");

    MetricsReport report = xval_retained_variance(data, opt);
    report.write_all(ctx.out_dir);
    std::cout << "xval: folds=" << opt.folds << " qs=" << opt.components.size()
              << " tables=" << report.tables.size() << "\n";
    return 0;
}

int cmd_loads(const RunContext& ctx) {
    SensorField field = load_field(ctx.cfg);
    EpochTrace trace = load_dataset(ctx.cfg, field);
    validate_common(ctx.cfg, field, &trace);
    Dataset data = dataset_from_trace(trace);

    LoadStudyOptions opt;
    opt.ranges = ctx.cfg.get_double_list("ranges");
    if (ctx.cfg.has("q_list")) opt.components = ctx.cfg.get_int_list("q_list");
    opt.root_id = field.root_id();
    opt.pim_range = ctx.cfg.get_double("pim_range", 10.0);
    opt.pim_q = static_cast<int>(ctx.cfg.get_int("pim_q", 15));
    opt.pim.delta = ctx.cfg.get_double("delta", 1e-3);
    opt.pim.t_max = static_cast<int>(ctx.cfg.get_int("t_max", 50));
    opt.cov_epochs = static_cast<std::size_t>(ctx.cfg.get_int("train_epochs", 0));
    require(opt.pim_q <= static_cast<int>(field.size()), "pim_q must be <= p");

    MetricsReport report = load_study(field, data, opt);
    report.write_all(ctx.out_dir);
    std::cout << "loads: ranges=" << opt.ranges.size() << " tables=" << report.tables.size()
              << "\n";
    return 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args) {
    CLI::App app{"pcag: principal component aggregation for sensor networks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_flag;
    std::vector<std::string> overrides;
    std::optional<double> range_flag;
    std::optional<long long> q_flag;
    std::optional<long long> seed_flag;

    const std::vector<std::string> names{"tree", "cov", "basis", "pim",
                                         "score", "xval", "loads", "synth"};
    std::map<std::string, CLI::App*> subs;
    for (const auto& name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key-value configuration file");
        sub->add_option("--out", out_flag, "output directory (overrides config and env)");
        sub->add_option("--range", range_flag, "radio range in meters (overrides config)");
        sub->add_option("--q", q_flag, "component count (overrides config)");
        sub->add_option("--seed", seed_flag, "random seed (overrides config)");
        sub->add_option("--set", overrides, "extra key=value overrides")->take_all();
        subs[name] = sub;
    }

    try {
        std::vector<const char*> argv;
        argv.push_back("pcag");
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        RunContext ctx;
        if (!config_path.empty()) ctx.cfg = Config::load(config_path);
        for (const auto& kv : overrides) {
            auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
            ctx.cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (range_flag) ctx.cfg.set("radio_range", format_value(*range_flag));
        if (q_flag) ctx.cfg.set("q", std::to_string(*q_flag));
        if (seed_flag) ctx.cfg.set("seed", std::to_string(*seed_flag));

        std::string out = ctx.cfg.get_string("out_dir", "out");
        if (const char* env = std::getenv("PCAG_OUT_DIR")) out = env;
        if (!out_flag.empty()) out = out_flag;
        ctx.out_dir = out;

        for (const auto& name : names) {
            if (!subs[name]->parsed()) continue;
            if (name == "tree") return cmd_tree(ctx);
            if (name == "cov") return cmd_cov(ctx);
            if (name == "basis") return cmd_basis(ctx);
            if (name == "pim") return cmd_pim(ctx);
            if (name == "score") return cmd_score(ctx);
            if (name == "xval") return cmd_xval(ctx);
            if (name == "loads") return cmd_loads(ctx);
            if (name == "synth") return cmd_synth(ctx);
        }
        std::cerr << "no subcommand given\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cli_dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_dispatch(args);
}

}  // namespace pcag
