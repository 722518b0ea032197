// Command-line front end: chains the library modules into the two
// dataset -> train -> design -> verify workflows.
#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <string>

#include "lvae/checkpoint.hpp"
#include "lvae/config.hpp"
#include "lvae/datagen.hpp"
#include "lvae/design.hpp"
#include "lvae/evaluate.hpp"
#include "lvae/io.hpp"
#include "lvae/litho.hpp"
#include "lvae/nn.hpp"
#include "lvae/phase_field.hpp"
#include "lvae/threading.hpp"

using namespace lvae;

namespace {

// exit codes: 0 ok, 1 runtime, 2 usage/config, 3 file I/O, 4 dimensions,
// 5 solver divergence
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitDims = 4;
constexpr int kExitSolver = 5;

struct Common {
    std::string config_path;
    int threads = default_thread_count();
};

Config load_config(const Common& common) {
    Config cfg;
    if (!common.config_path.empty()) cfg.apply_file(common.config_path);
    return cfg;
}

void emit_snapshot(const Config& cfg, const std::string& next_to) {
    write_text_file(next_to + ".config", cfg.snapshot());
}

std::string stem_of(const std::string& path) {
    std::filesystem::path p(path);
    return (p.parent_path() / p.stem()).string();
}

MatrixX<float> records_to_matrix(const std::vector<Field2D>& records) {
    const Eigen::Index dim = static_cast<Eigen::Index>(records.front().size());
    MatrixX<float> data(dim, static_cast<Eigen::Index>(records.size()));
    for (size_t j = 0; j < records.size(); ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            data(i, static_cast<Eigen::Index>(j)) =
                static_cast<float>(records[j].data[static_cast<size_t>(i)]);
        }
    }
    return data;
}

Field2D column_to_field(const MatrixX<float>& m, Eigen::Index col, int width, int height) {
    Field2D out(width, height);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out.data[static_cast<size_t>(i)] = m(i, col);
    }
    return out;
}

Field2D stack_rows(const Field2D& top, const Field2D& bottom) {
    Field2D out(top.width, top.height + bottom.height);
    for (int r = 0; r < top.height; ++r)
        for (int c = 0; c < top.width; ++c) out.at(r, c) = top.at(r, c);
    for (int r = 0; r < bottom.height; ++r)
        for (int c = 0; c < bottom.width; ++c) out.at(r + top.height, c) = bottom.at(r, c);
    return out;
}

int run_gen_data(const Common& common, Config& cfg, const std::string& problem,
                 const std::string& out) {
    const int count = static_cast<int>(cfg.get_int("datagen.count"));
    const int train_count =
        std::min<int>(count, static_cast<int>(cfg.get_int("datagen.train_count")));
    const uint64_t seed = static_cast<uint64_t>(cfg.get_int("vae.seed"));
    std::fprintf(stderr, "gen-data: problem=%s count=%d train=%d seed=%llu threads=%d\n",
                 problem.c_str(), count, train_count,
                 static_cast<unsigned long long>(seed), common.threads);

    GenStats stats;
    Dataset ds;
    if (problem == "diffusion") {
        const TrenchConfig trench = TrenchConfig::from_config(cfg);
        PhaseParams params = PhaseParams::from_config(cfg, trench.cell_width, trench.cell_height);
        ds = generate_diffusion_dataset(count, seed, params, trench, train_count, common.threads,
                                        &stats);
    } else if (problem == "litho") {
        const MaskConfig masks = MaskConfig::from_config(cfg);
        const LithoParams litho = LithoParams::from_config(cfg).resolved(masks.canvas);
        ds = generate_litho_dataset(count, seed, litho, masks, train_count, common.threads,
                                    &stats);
    } else {
        throw ConfigError("gen-data: unknown problem '" + problem + "'");
    }

    write_dataset(out, dataset_records(ds));
    emit_snapshot(cfg, out);

    std::string manifest;
    manifest += "problem = " + problem + "\n";
    manifest += "config_hash = " + std::to_string(cfg.hash()) + "\n";
    manifest += "seed = " + std::to_string(seed) + "\n";
    manifest += "count = " + std::to_string(count) + "\n";
    manifest += "train_count = " + std::to_string(train_count) + "\n";
    manifest += "solver_steps = " + std::to_string(stats.solver_steps) + "\n";
    manifest += "solver_retries = " + std::to_string(stats.solver_retries) + "\n";
    manifest += "unconverged = " + std::to_string(stats.unconverged) + "\n";
    manifest += "duplicates = " + std::to_string(stats.duplicates) + "\n";
    write_text_file(out + ".manifest", manifest);
    std::fprintf(stderr, "gen-data: wrote %zu records to %s\n", ds.samples.size(), out.c_str());
    return 0;
}

int run_train(Config& cfg, const std::string& data_path, const std::string& out, bool verbose) {
    const std::vector<Field2D> records = read_dataset(data_path);
    const int n = static_cast<int>(records.size());
    const int train_count =
        std::min<int>(n, static_cast<int>(cfg.get_int("datagen.train_count")));
    const MatrixX<float> all = records_to_matrix(records);
    const MatrixX<float> data = all.leftCols(train_count);

    const int input_dim = static_cast<int>(all.rows());
    const int latent = static_cast<int>(cfg.get_int("vae.latent_dim"));
    const int hidden = static_cast<int>(cfg.get_int("vae.hidden_width"));
    const int depth = static_cast<int>(cfg.get_int("vae.hidden_layers"));
    const uint64_t seed = static_cast<uint64_t>(cfg.get_int("vae.seed"));

    TrainOptions opt;
    opt.epochs = static_cast<int>(cfg.get_int("vae.epochs"));
    opt.batch_size = static_cast<int>(cfg.get_int("vae.batch_size"));
    opt.seed = seed;
    opt.lr = cfg.get_real("vae.lr");
    opt.plateau_window = static_cast<int>(cfg.get_int("vae.plateau_window"));
    opt.plateau_tol = cfg.get_real("vae.plateau_tol");
    opt.checkpoint_path = out;
    opt.verbose = verbose;

    std::fprintf(stderr,
                 "train: %d samples (of %d), input %d, latent %d, hidden %dx%d, seed %llu\n",
                 train_count, n, input_dim, latent, hidden, depth,
                 static_cast<unsigned long long>(seed));

    Vae<float> model = Vae<float>::init(input_dim, latent, hidden, depth, seed);
    AdamState<float> adam = AdamState<float>::init(model, static_cast<float>(opt.lr));
    const TrainResult result = train(model, adam, data, opt);
    save_checkpoint(out, model, &adam);
    emit_snapshot(cfg, out);

    std::string history = "epoch,loss\n";
    for (size_t e = 0; e < result.epoch_loss.size(); ++e) {
        history += std::to_string(e) + "," + std::to_string(result.epoch_loss[e]) + "\n";
    }
    write_text_file(stem_of(out) + "_loss.csv", history);
    std::fprintf(stderr, "train: %d epochs%s, final loss %.6f -> %s\n", result.epochs_run,
                 result.early_stopped ? " (early stop)" : "", result.epoch_loss.back(),
                 out.c_str());
    return 0;
}

int run_reconstruct(Config& cfg, const std::string& model_path, const std::string& data_path,
                    const std::string& out_dir, int count) {
    const LoadedCheckpoint loaded = load_checkpoint(model_path);
    const std::vector<Field2D> records = read_dataset(data_path);
    const int n = static_cast<int>(records.size());
    const int train_count =
        std::min<int>(n, static_cast<int>(cfg.get_int("datagen.train_count")));
    const int first = train_count < n ? train_count : 0;  // prefer test samples
    const int take = std::min(count, n - first);
    const double threshold = cfg.get_real("fields.binarize_threshold");

    std::filesystem::create_directories(out_dir);
    const MatrixX<float> all = records_to_matrix(records);
    if (all.rows() != loaded.model.input_dim) {
        throw DimensionError("reconstruct: dataset pixels (" + std::to_string(all.rows()) +
                             ") do not match the model input (" +
                             std::to_string(loaded.model.input_dim) + ")");
    }

    long matched = 0, total = 0;
    for (int k = 0; k < take; ++k) {
        const int idx = first + k;
        const MatrixX<float> x = all.col(idx);
        const MatrixX<float> rec = reconstruct(loaded.model, x);
        const Field2D input = column_to_field(all, idx, records[idx].width, records[idx].height);
        Field2D output(records[idx].width, records[idx].height);
        for (Eigen::Index i = 0; i < rec.rows(); ++i) {
            output.data[static_cast<size_t>(i)] = rec(i, 0);
        }
        const AccuracyReport acc =
            binary_accuracy(binarize(output, threshold), binarize(input, threshold));
        matched += acc.matched;
        total += acc.total;

        char name[64];
        std::snprintf(name, sizeof(name), "recon_%04d.pgm", idx);
        write_pgm((std::filesystem::path(out_dir) / name).string(), stack_rows(input, output));
    }
    const double accuracy = total > 0 ? static_cast<double>(matched) / total : 0.0;
    std::printf("reconstruct: %d samples, binary accuracy %.4f\n", take, accuracy);
    emit_snapshot(cfg, (std::filesystem::path(out_dir) / "reconstruct").string());
    return 0;
}

int run_design(const Common& common, Config& cfg, const std::string& model_path,
               const std::string& target_path, const std::string& out) {
    const LoadedCheckpoint loaded = load_checkpoint(model_path);
    const Vae<double> model = to_double(loaded.model);
    const Field2D target = read_pgm(target_path);

    DesignProblem problem = DesignProblem::from_config(cfg, target);
    std::fprintf(stderr, "design: target %dx%d alpha=%g beta=%g bound=%g restarts=%d seed=%llu\n",
                 target.width, target.height, problem.alpha, problem.beta, problem.bound,
                 problem.restarts, static_cast<unsigned long long>(problem.seed));

    const DesignResult result = design(problem, model, common.threads);
    const double threshold = cfg.get_real("fields.binarize_threshold");

    write_pgm(out, result.design);
    const std::string stem = stem_of(out);
    write_pgm(stem + "_binary.pgm", binarize(result.design, threshold).to_field());
    write_pgm(stem + "_final.pgm", result.generated_final);
    emit_snapshot(cfg, out);

    std::string report;
    report += "objective_total = " + std::to_string(result.objective.total) + "\n";
    report += "objective_match = " + std::to_string(result.objective.match) + "\n";
    report += "objective_volume = " + std::to_string(result.objective.volume) + "\n";
    report += "objective_tv = " + std::to_string(result.objective.tv) + "\n";
    report += "z_hat =";
    for (Eigen::Index i = 0; i < result.z_hat.size(); ++i) {
        report += " " + std::to_string(result.z_hat(i));
    }
    report += "\n";
    for (const RestartLog& log : result.restarts_log) {
        report += "restart " + std::to_string(log.index) + ": value " +
                  std::to_string(log.value) + ", iterations " + std::to_string(log.iterations) +
                  (log.converged ? ", converged" : ", max-iter") + "\n";
    }
    write_text_file(stem + "_report.txt", report);
    std::printf("design: objective %.6f (match %.6f, volume %.6f, tv %.6f) -> %s\n",
                result.objective.total, result.objective.match, result.objective.volume,
                result.objective.tv, out.c_str());
    return 0;
}

int run_simulate(Config& cfg, const std::string& initial_path, const std::string& prefix) {
    const Field2D initial = read_pgm(initial_path);
    const double threshold = cfg.get_real("fields.binarize_threshold");
    const BinaryImage binary = binarize(initial, threshold);

    PhaseParams params = PhaseParams::from_config(cfg, initial.width, initial.height);
    params = params.resolved();
    PhaseFieldSolver solver(params);
    const Field2D phi0 = solver.smooth_constant_mobility(
        binary.to_field(), params.smooth_iters, params.dt * params.smooth_dt_factor);
    const EvolveResult run = solver.evolve_to_steady(phi0);

    write_pgm(prefix + "_final.pgm", phase_to_gray(run.phi));
    write_pgm(prefix + "_binary.pgm", binarize(phase_to_gray(run.phi), threshold).to_field());
    write_dataset(prefix + "_phi.lvae", {run.phi});
    emit_snapshot(cfg, prefix + "_phi.lvae");

    std::string csv = "step,time,mass,energy\n";
    for (const TimePoint& point : run.series) {
        char line[128];
        std::snprintf(line, sizeof(line), "%ld,%.12g,%.12g,%.12g\n", point.step, point.time,
                      point.mass, point.energy);
        csv += line;
    }
    write_text_file(prefix + "_series.csv", csv);
    std::printf("simulate: %ld steps%s, %d escalations -> %s_*\n", run.steps,
                run.converged ? "" : " (max-steps cap)", run.escalations, prefix.c_str());
    return 0;
}

int run_litho(Config& cfg, const std::string& mask_path, const std::string& prefix) {
    const Field2D mask = read_pgm(mask_path);
    const LithoParams params = LithoParams::from_config(cfg).resolved(mask.width);
    const Field2D aerial = aerial_image(mask, params);
    const BinaryImage pattern = resist_threshold(aerial, params.threshold);
    write_pgm(prefix + "_aerial.pgm", aerial);
    write_pgm(prefix + "_pattern.pgm", pattern.to_field());
    emit_snapshot(cfg, prefix + "_aerial.pgm");
    std::printf("litho: sigma %.3f px, radius %d -> %s_*\n", params.sigma, params.kernel_radius,
                prefix.c_str());
    return 0;
}

int run_evaluate(const Common& common, Config& cfg, const std::string& model_path,
                 const std::string& data_path, const std::string& report_path, int count) {
    const LoadedCheckpoint loaded = load_checkpoint(model_path);
    const Vae<double> model = to_double(loaded.model);
    const std::vector<Field2D> records = read_dataset(data_path);
    const int n = static_cast<int>(records.size());
    const int train_count =
        std::min<int>(n, static_cast<int>(cfg.get_int("datagen.train_count")));
    const int first = train_count < n ? train_count : 0;
    const int take = count > 0 ? std::min(count, n - first) : n - first;
    const double threshold = cfg.get_real("fields.binarize_threshold");

    const int height = records.front().height;
    const int half_w = records.front().width / 2;
    const PhaseParams params = PhaseParams::from_config(cfg, half_w, height).resolved();
    const int smooth_iters = static_cast<int>(cfg.get_int("eval.smooth_iters"));
    const double smooth_factor = cfg.get_real("eval.smooth_dt_factor");

    std::fprintf(stderr, "evaluate: %d test targets (of %d records), threads=%d\n", take, n,
                 common.threads);

    struct Row {
        int sample_id;
        double accuracy;
        ObjectiveBreakdown objective;
        long solver_steps;
    };
    std::vector<Row> rows(take);

    parallel_for(take, common.threads, [&](int k) {
        const int idx = first + k;
        const PairedSample pair = PairedSample::from_combined(records[idx]);
        DesignProblem problem = DesignProblem::from_config(cfg, pair.final_shape());
        problem.seed += static_cast<uint64_t>(idx);  // independent restarts per target
        const DesignResult result = design(problem, model, 1);
        const BinaryImage design_binary = binarize(result.design, threshold);
        const BinaryImage target_binary = binarize(pair.final_shape(), threshold);
        const RoundtripResult round =
            roundtrip_evaluate(design_binary, target_binary, params, smooth_iters, smooth_factor);
        rows[k] = {idx, round.accuracy.accuracy, result.objective, round.solver_steps};
    });

    std::string csv = "sample_id,accuracy,objective_total,objective_match,objective_volume,"
                      "objective_tv,solver_steps\n";
    double mean = 0.0;
    for (const Row& row : rows) {
        char line[256];
        std::snprintf(line, sizeof(line), "%d,%.6f,%.6g,%.6g,%.6g,%.6g,%ld\n", row.sample_id,
                      row.accuracy, row.objective.total, row.objective.match,
                      row.objective.volume, row.objective.tv, row.solver_steps);
        csv += line;
        mean += row.accuracy;
    }
    mean /= std::max(1, take);
    write_text_file(report_path, csv);
    emit_snapshot(cfg, report_path);
    // per-sample mean and pooled-over-pixels accuracy coincide here: all
    // samples share one grid size
    std::printf("evaluate: mean accuracy %.4f (per-sample mean = pooled) over %d targets -> %s\n",
                mean, take, report_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"layoutvae: VAE-based inverse layout design toolkit"};
    app.require_subcommand(1);

    Common common;
    app.add_option("--config", common.config_path, "configuration file (key = value lines)");
    app.add_option("--threads", common.threads, "worker thread cap");

    auto* gen = app.add_subcommand("gen-data", "generate a paired training dataset");
    std::string gen_problem, gen_out;
    long gen_count = -1, gen_seed = -1, gen_train = -1;
    gen->add_option("--problem", gen_problem, "diffusion | litho")->required();
    gen->add_option("--count", gen_count, "number of samples");
    gen->add_option("--seed", gen_seed, "base RNG seed");
    gen->add_option("--train-count", gen_train, "samples reserved for training");
    gen->add_option("--out", gen_out, "output dataset file")->required();

    auto* tr = app.add_subcommand("train", "train the VAE on a dataset");
    std::string tr_data, tr_out;
    long tr_latent = -1, tr_epochs = -1, tr_seed = -1, tr_train = -1, tr_batch = -1;
    double tr_lr = -1.0;
    bool tr_verbose = false;
    tr->add_option("--data", tr_data, "dataset file")->required();
    tr->add_option("--latent-dim", tr_latent, "latent dimension");
    tr->add_option("--epochs", tr_epochs, "training epochs");
    tr->add_option("--seed", tr_seed, "RNG seed");
    tr->add_option("--train-count", tr_train, "training split size");
    tr->add_option("--batch", tr_batch, "batch size");
    tr->add_option("--lr", tr_lr, "learning rate");
    tr->add_flag("--verbose", tr_verbose, "per-epoch loss on stderr");
    tr->add_option("--out", tr_out, "output checkpoint")->required();

    auto* rec = app.add_subcommand("reconstruct", "reconstruct samples through the VAE");
    std::string rec_model, rec_data, rec_dir = ".";
    long rec_count = 8, rec_train = -1;
    rec->add_option("--model", rec_model, "checkpoint")->required();
    rec->add_option("--data", rec_data, "dataset file")->required();
    rec->add_option("--count", rec_count, "samples to reconstruct");
    rec->add_option("--train-count", rec_train, "training split size (test starts after)");
    rec->add_option("--out-dir", rec_dir, "output directory");

    auto* des = app.add_subcommand("design", "latent-space inverse design for a target");
    std::string des_model, des_target, des_out;
    double des_alpha = -1.0, des_beta = -1.0, des_bounds = -1.0;
    long des_restarts = -1, des_seed = -1;
    des->add_option("--model", des_model, "checkpoint")->required();
    des->add_option("--target", des_target, "target final-shape PGM (one half)")->required();
    des->add_option("--alpha", des_alpha, "volume-term weight");
    des->add_option("--beta", des_beta, "total-variation weight");
    des->add_option("--bounds", des_bounds, "symmetric latent bound");
    des->add_option("--restarts", des_restarts, "optimizer restarts");
    des->add_option("--seed", des_seed, "restart RNG seed");
    des->add_option("--out", des_out, "output design PGM")->required();

    auto* sim = app.add_subcommand("simulate", "surface-diffusion evolution of an initial image");
    std::string sim_initial, sim_prefix;
    sim->add_option("--initial", sim_initial, "initial binary PGM")->required();
    sim->add_option("--out-prefix", sim_prefix, "output path prefix")->required();

    auto* lit = app.add_subcommand("litho", "Gaussian aerial image + resist threshold");
    std::string lit_mask, lit_prefix;
    lit->add_option("--mask", lit_mask, "mask PGM")->required();
    lit->add_option("--out-prefix", lit_prefix, "output path prefix")->required();

    auto* ev = app.add_subcommand("evaluate", "design->smooth->simulate accuracy on a test set");
    std::string ev_model, ev_data, ev_report, ev_phase_config;
    long ev_count = 0, ev_train = -1;
    ev->add_option("--model", ev_model, "checkpoint")->required();
    ev->add_option("--data", ev_data, "dataset with test targets")->required();
    ev->add_option("--phase-config", ev_phase_config, "extra config applied on top of --config");
    ev->add_option("--report", ev_report, "output CSV")->required();
    ev->add_option("--count", ev_count, "number of test targets (0 = all)");
    ev->add_option("--train-count", ev_train, "training split size (test starts after)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        Config cfg = load_config(common);
        auto set_if = [&cfg](bool given, const std::string& key, const std::string& value) {
            if (given) cfg.set(key, value);
        };

        if (gen->parsed()) {
            set_if(gen_count >= 0, "datagen.count", std::to_string(gen_count));
            set_if(gen_seed >= 0, "vae.seed", std::to_string(gen_seed));
            set_if(gen_train >= 0, "datagen.train_count", std::to_string(gen_train));
            return run_gen_data(common, cfg, gen_problem, gen_out);
        }
        if (tr->parsed()) {
            set_if(tr_latent > 0, "vae.latent_dim", std::to_string(tr_latent));
            set_if(tr_epochs > 0, "vae.epochs", std::to_string(tr_epochs));
            set_if(tr_seed >= 0, "vae.seed", std::to_string(tr_seed));
            set_if(tr_train >= 0, "datagen.train_count", std::to_string(tr_train));
            set_if(tr_batch > 0, "vae.batch_size", std::to_string(tr_batch));
            set_if(tr_lr > 0, "vae.lr", std::to_string(tr_lr));
            return run_train(cfg, tr_data, tr_out, tr_verbose);
        }
        if (rec->parsed()) {
            set_if(rec_train >= 0, "datagen.train_count", std::to_string(rec_train));
            return run_reconstruct(cfg, rec_model, rec_data, rec_dir,
                                   static_cast<int>(rec_count));
        }
        if (des->parsed()) {
            set_if(des_alpha >= 0, "design.alpha", std::to_string(des_alpha));
            set_if(des_beta >= 0, "design.beta", std::to_string(des_beta));
            set_if(des_bounds > 0, "design.bound", std::to_string(des_bounds));
            set_if(des_restarts > 0, "design.restarts", std::to_string(des_restarts));
            set_if(des_seed >= 0, "design.seed", std::to_string(des_seed));
            return run_design(common, cfg, des_model, des_target, des_out);
        }
        if (sim->parsed()) return run_simulate(cfg, sim_initial, sim_prefix);
        if (lit->parsed()) return run_litho(cfg, lit_mask, lit_prefix);
        if (ev->parsed()) {
            if (!ev_phase_config.empty()) cfg.apply_file(ev_phase_config);
            set_if(ev_train >= 0, "datagen.train_count", std::to_string(ev_train));
            return run_evaluate(common, cfg, ev_model, ev_data, ev_report,
                                static_cast<int>(ev_count));
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const DimensionError& e) {
        std::fprintf(stderr, "dimension error: %s\n", e.what());
        return kExitDims;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return 0;
}
