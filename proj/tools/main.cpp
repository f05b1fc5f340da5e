#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eetsne/affinity.hpp"
#include "eetsne/diagnostics.hpp"
#include "eetsne/dynsys.hpp"
#include "eetsne/errors.hpp"
#include "eetsne/generators.hpp"
#include "eetsne/io.hpp"
#include "eetsne/rng.hpp"
#include "eetsne/spectral.hpp"
#include "eetsne/svg.hpp"
#include "eetsne/tsne.hpp"

namespace fs = std::filesystem;
using namespace eetsne;

namespace {

// ---------------------------------------------------------------------------
// Option bundles

struct InputOptions {
    std::string input;        // CSV dataset
    std::string labels_mode = "auto";
    std::string gen_kind;     // built-in generator instead of a file
    int gen_n = 400;
    std::uint64_t gen_seed = 7;
    int k = 4;
    int dim = 25;
    double cluster_std = 1.0;
    double separation = 20.0;
    double turns = 1.5;
    double noise = 0.0;
    std::string idx_images;   // IDX pair instead of CSV
    std::string idx_labels;
    std::string digits;       // comma list filtering IDX labels
    int subsample = 0;        // keep the first N after filtering (0 = all)
    std::string affinities;   // precomputed affinity CSV, skips calibration
    std::string labels_csv;   // label sidecar for --affinities
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("--input", in.input, "dataset CSV (rows = points)");
    cmd->add_option("--labels", in.labels_mode,
                    "label column handling for --input: auto, last, none")
        ->check(CLI::IsMember({"auto", "last", "none"}));
    cmd->add_option("--gen", in.gen_kind,
                    "generate the dataset: line3d, swiss_roll, gaussian_mixture, circle");
    cmd->add_option("--gen-n", in.gen_n, "generator point count");
    cmd->add_option("--gen-seed", in.gen_seed, "generator seed");
    cmd->add_option("--k", in.k, "gaussian_mixture cluster count");
    cmd->add_option("--dim", in.dim, "gaussian_mixture ambient dimension");
    cmd->add_option("--cluster-std", in.cluster_std, "gaussian_mixture cluster std");
    cmd->add_option("--separation", in.separation, "gaussian_mixture center separation");
    cmd->add_option("--turns", in.turns, "swiss_roll turns");
    cmd->add_option("--noise", in.noise, "swiss_roll noise std");
    cmd->add_option("--idx-images", in.idx_images, "IDX image file");
    cmd->add_option("--idx-labels", in.idx_labels, "IDX label file");
    cmd->add_option("--digits", in.digits, "comma list of IDX labels to keep, e.g. 0,1,2,3");
    cmd->add_option("--subsample", in.subsample, "keep only the first N points");
    cmd->add_option("--affinities", in.affinities, "precomputed affinity CSV (sum-one)");
    cmd->add_option("--labels-csv", in.labels_csv, "label file (one integer per line)");
}

struct LoadedInput {
    Points data;               // empty (n = 0) when --affinities was used
    std::vector<int> labels;
    std::optional<AffinityMatrix> preloaded;
    std::string source;        // human-readable provenance for the config echo
};

std::vector<int> parse_digit_list(const std::string& csv) {
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t comma = csv.find(',', start);
        const std::string token =
            csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            out.push_back(std::stoi(token));
        } catch (const std::exception&) {
            throw ParseError("bad --digits entry '" + token + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

LoadedInput resolve_input(const InputOptions& in) {
    const int sources = (!in.input.empty() ? 1 : 0) + (!in.gen_kind.empty() ? 1 : 0) +
                        (!in.idx_images.empty() ? 1 : 0) + (!in.affinities.empty() ? 1 : 0);
    if (sources != 1) {
        throw InvalidSpec("exactly one of --input, --gen, --idx-images, --affinities is required");
    }

    LoadedInput out;
    if (!in.input.empty()) {
        LabelMode mode = LabelMode::Auto;
        if (in.labels_mode == "last") mode = LabelMode::LastColumn;
        if (in.labels_mode == "none") mode = LabelMode::None;
        LoadedCsv csv = load_csv(in.input, mode);
        out.data = std::move(csv.data);
        out.labels = std::move(csv.labels);
        out.source = "csv:" + in.input;
    } else if (!in.gen_kind.empty()) {
        GeneratorSpec spec;
        spec.kind = parse_generator_kind(in.gen_kind);
        spec.n = in.gen_n;
        spec.seed = in.gen_seed;
        spec.k = in.k;
        spec.d = in.dim;
        spec.cluster_std = in.cluster_std;
        spec.separation = in.separation;
        spec.turns = in.turns;
        spec.noise = in.noise;
        GeneratedData gen = generate(spec);
        out.data = std::move(gen.data);
        out.labels = std::move(gen.labels);
        out.source = "gen:" + in.gen_kind;
    } else if (!in.idx_images.empty()) {
        out.data = load_idx_images(in.idx_images);
        if (!in.idx_labels.empty()) {
            out.labels = load_idx_labels(in.idx_labels);
            if (out.labels.size() != static_cast<std::size_t>(out.data.n)) {
                throw InvalidDataset("IDX image and label counts disagree");
            }
        } else if (!in.digits.empty()) {
            throw InvalidSpec("--digits needs --idx-labels");
        }
        if (!in.digits.empty()) {
            const std::vector<int> keep = parse_digit_list(in.digits);
            Points filtered(0, out.data.dim);
            std::vector<int> flabels;
            std::vector<double> coords;
            for (int i = 0; i < out.data.n; ++i) {
                if (std::find(keep.begin(), keep.end(), out.labels[i]) == keep.end()) continue;
                coords.insert(coords.end(), out.data[i], out.data[i] + out.data.dim);
                flabels.push_back(out.labels[i]);
            }
            filtered.n = static_cast<int>(flabels.size());
            filtered.xs = std::move(coords);
            out.data = std::move(filtered);
            out.labels = std::move(flabels);
        }
        out.source = "idx:" + in.idx_images;
    } else {
        Matrix m = load_matrix_csv(in.affinities);
        out.preloaded = load_affinities(std::move(m), Normalization::TsneSumOne);
        if (!in.labels_csv.empty()) out.labels = load_labels_file(in.labels_csv);
        out.source = "affinities:" + in.affinities;
        return out;
    }

    if (in.subsample > 0 && in.subsample < out.data.n) {
        Points trimmed(in.subsample, out.data.dim);
        std::copy(out.data.xs.begin(),
                  out.data.xs.begin() + static_cast<std::size_t>(in.subsample) * out.data.dim,
                  trimmed.xs.begin());
        out.data = std::move(trimmed);
        if (!out.labels.empty()) out.labels.resize(in.subsample);
    }
    if (!in.labels_csv.empty()) {
        out.labels = load_labels_file(in.labels_csv);
        if (out.labels.size() != static_cast<std::size_t>(out.data.n)) {
            throw InvalidDataset("--labels-csv row count does not match the dataset");
        }
    }
    return out;
}

std::string default_out(const std::string& given, const char* name) {
    if (!given.empty()) return given;
    if (const char* root = std::getenv("EETSNE_OUT")) {
        return (fs::path(root) / (std::string(name) + "-run")).string();
    }
    return std::string(name) + "-run";
}

// ---------------------------------------------------------------------------
// Exaggeration parameter resolution

struct StrengthOptions {
    double alpha = 12.0;
    std::string alpha_h;  // number, or "guideline"
    double h = 1.0;
};

void add_strength_options(CLI::App* cmd, StrengthOptions& st) {
    auto* a = cmd->add_option("--alpha", st.alpha, "exaggeration factor (default 12)");
    cmd->add_option("--alpha-h", st.alpha_h,
                    "combined strength alpha*h; a number or 'guideline' (needs labels)")
        ->excludes(a);
    cmd->add_option("--step", st.h, "gradient step size h (default 1)");
}

double resolve_alpha(const StrengthOptions& st, const AffinityMatrix& p,
                     const ClusterAssignment* ca, double* guideline_out) {
    if (st.alpha_h.empty()) return st.alpha;
    if (!(st.h > 0.0)) throw InvalidSpec("--h must be positive");
    if (st.alpha_h == "guideline") {
        if (ca == nullptr) {
            throw InvalidSpec("--alpha-h guideline needs cluster labels");
        }
        const GuidelineResult g = guideline_alpha_h(p, *ca);
        if (guideline_out) *guideline_out = g.alpha_h;
        return g.alpha_h / st.h;
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(st.alpha_h, &used);
        if (used != st.alpha_h.size()) throw std::invalid_argument("trailing");
        if (!(v > 0.0)) throw InvalidSpec("--alpha-h must be positive");
        return v / st.h;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("--alpha-h expects a number or 'guideline', got '" + st.alpha_h + "'");
    }
}

// ---------------------------------------------------------------------------
// Report writing

void write_report(RunDir& dir, const DiagnosticsReport& rep, const DiameterSeries* series,
                  bool init_in_box, bool diverged, int diverged_iteration) {
    {
        KeyValueWriter kv(dir.create("report.kv"));
        kv.put("n", rep.n);
        kv.put("k", rep.k);
        kv.put("alpha", rep.alpha);
        kv.put("h", rep.h);
        kv.put("alpha_h", rep.alpha * rep.h);
        kv.put("c", rep.c);
        kv.put("kappa", rep.kappa);
        kv.put("assumption1_pass", rep.a1.pass);
        for (int cidx = 0; cidx < rep.k; ++cidx) {
            const std::string tag = "_c" + std::to_string(cidx + 1);
            kv.put("assumption1_margin" + tag, rep.a1.min_margin[cidx]);
            kv.put("assumption1_worst_i" + tag, rep.a1.worst_pair[cidx].first);
            kv.put("assumption1_worst_j" + tag, rep.a1.worst_pair[cidx].second);
        }
        kv.put("assumption2_pass", rep.a2.pass);
        kv.put("assumption2_min", rep.a2.min_mass);
        kv.put("assumption2_max", rep.a2.max_mass);
        int below = 0, above = 0;
        for (const auto v : rep.a2.verdict) {
            if (v == Assumption2Verdict::BelowRange) ++below;
            if (v == Assumption2Verdict::AboveRange) ++above;
        }
        kv.put("assumption2_below_count", below);
        kv.put("assumption2_above_count", above);
        kv.put("assumption3_init_in_box", init_in_box);
        kv.put("guideline_alpha_h", rep.guideline.alpha_h);
        kv.put("guideline_argmax", rep.guideline.argmax);
        for (int cidx = 0; cidx < rep.k; ++cidx) {
            const std::string tag = "_c" + std::to_string(cidx + 1);
            kv.put("theorem_bound" + tag, rep.bounds[cidx]);
            kv.put("lemma_delta" + tag, rep.lemma_delta[cidx]);
            kv.put("lemma_factor" + tag, rep.lemma_factor[cidx]);
        }
        if (series != nullptr && !series->bound.empty()) {
            const int rows = series->by_cluster.rows();
            for (int cidx = 0; cidx < rep.k; ++cidx) {
                const std::string tag = "_c" + std::to_string(cidx + 1);
                kv.put("first_below" + tag, series->first_below[cidx]);
                kv.put("stays_below" + tag, series->stays_below[cidx] != 0);
                kv.put("rate" + tag, series->rate[cidx]);
                kv.put("peak_after_arrival" + tag, series->peak_after_arrival[cidx]);
                kv.put("sufficient_c" + tag, series->sufficient_c[cidx]);
                if (rows > 0) kv.put("final_diam" + tag, series->by_cluster(rows - 1, cidx));
            }
        }
        kv.put("diverged", diverged);
        if (diverged) kv.put("diverged_iteration", diverged_iteration);
    }

    std::ofstream txt = dir.create("report.txt");
    txt << "n = " << rep.n << ", k = " << rep.k << ", alpha = " << format_double(rep.alpha)
        << ", h = " << format_double(rep.h) << ", alpha*h = " << format_double(rep.alpha * rep.h)
        << ", c = " << format_double(rep.c) << "\n";
    txt << "assumption 1 (affinity floor):    " << (rep.a1.pass ? "pass" : "FAIL");
    txt << "  [per-cluster min margin:";
    for (double m : rep.a1.min_margin) txt << ' ' << format_double(m);
    txt << "]\n";
    txt << "assumption 2 (exaggerated mass):  " << (rep.a2.pass ? "pass" : "FAIL")
        << "  [range " << format_double(rep.a2.min_mass) << " .. "
        << format_double(rep.a2.max_mass) << ", required 0.01 .. 0.9]\n";
    txt << "assumption 3 (init in box):       " << (init_in_box ? "pass" : "FAIL") << "\n";
    txt << "guideline alpha*h = " << format_double(rep.guideline.alpha_h)
        << " (attained at point " << rep.guideline.argmax << ")\n";
    txt << "single-cluster rate kappa = " << format_double(rep.kappa) << "\n";
    for (int cidx = 0; cidx < rep.k; ++cidx) {
        txt << "cluster " << (cidx + 1) << ": bound " << format_double(rep.bounds[cidx])
            << ", lemma delta " << format_double(rep.lemma_delta[cidx]) << ", lemma factor "
            << format_double(rep.lemma_factor[cidx]);
        if (series != nullptr && !series->bound.empty()) {
            txt << ", first below at step " << series->first_below[cidx] << ", stays below "
                << (series->stays_below[cidx] ? "yes" : "no") << ", fitted rate "
                << format_double(series->rate[cidx]);
        }
        txt << "\n";
    }
    if (diverged) {
        txt << "RUN DIVERGED at iteration " << diverged_iteration << "\n";
    }
}

// ---------------------------------------------------------------------------
// Subcommands

struct GenOptions {
    std::string kind = "gaussian_mixture";
    int n = 400;
    std::uint64_t seed = 7;
    int k = 4;
    int dim = 25;
    double cluster_std = 1.0;
    double separation = 20.0;
    double turns = 1.5;
    double noise = 0.0;
    std::string out;
};

int run_gen(const GenOptions& g) {
    GeneratorSpec spec;
    spec.kind = parse_generator_kind(g.kind);
    spec.n = g.n;
    spec.seed = g.seed;
    spec.k = g.k;
    spec.d = g.dim;
    spec.cluster_std = g.cluster_std;
    spec.separation = g.separation;
    spec.turns = g.turns;
    spec.noise = g.noise;
    const GeneratedData data = generate(spec);
    std::string out = g.out;
    if (out.empty()) out = g.kind + ".csv";
    save_points_csv(out, data.data, data.labels);
    std::printf("wrote %s (n=%d, d=%d%s)\n", out.c_str(), data.data.n, data.data.dim,
                data.labels.empty() ? "" : ", labelled");
    return 0;
}

struct EmbedOptions {
    InputOptions in;
    StrengthOptions strength;
    double perplexity = 30.0;
    int ee_iters = 250;
    int post_iters = 0;
    int stride = 10;
    int s = 2;
    std::uint64_t seed = 1;
    double c = 10.0;
    std::string engine = "tsne";
    std::string out;
};

AffinityMatrix affinities_for(const LoadedInput& loaded, double perplexity) {
    if (loaded.preloaded) return *loaded.preloaded;
    return symmetrize(conditional_affinities(loaded.data, perplexity));
}

int run_embed(const EmbedOptions& opt) {
    const LoadedInput loaded = resolve_input(opt.in);
    const AffinityMatrix p = affinities_for(loaded, opt.perplexity);
    const int n = p.n();

    std::optional<ClusterAssignment> ca;
    if (!loaded.labels.empty()) ca = ClusterAssignment::from_labels(loaded.labels);

    const double alpha = resolve_alpha(opt.strength, p, ca ? &*ca : nullptr, nullptr);
    const double h = opt.strength.h;

    if (opt.engine != "tsne" && opt.engine != "spectral") {
        throw InvalidSpec("--engine must be tsne or spectral");
    }
    if (opt.engine == "spectral" && opt.post_iters > 0) {
        throw InvalidSpec("--post-iters applies to the tsne engine only");
    }

    RunDir dir(default_out(opt.out, "embed"));
    {
        KeyValueWriter kv(dir.create("resolved_config.txt"));
        kv.put("command", std::string("embed"));
        kv.put("source", loaded.source);
        kv.put("engine", opt.engine);
        kv.put("n", n);
        kv.put("s", opt.s);
        if (!loaded.preloaded) kv.put("perplexity", opt.perplexity);
        kv.put("alpha", alpha);
        kv.put("h", h);
        kv.put("alpha_h", alpha * h);
        kv.put("ee_iterations", opt.ee_iters);
        kv.put("post_iterations", opt.post_iters);
        kv.put("stride", opt.stride);
        kv.put("seed", static_cast<int>(opt.seed));
        kv.put("c", opt.c);
        kv.put("labelled", ca.has_value());
    }

    // Diagnostics that do not depend on the run come first so they survive
    // a divergent trajectory.
    std::optional<DiagnosticsReport> rep;
    std::optional<DiameterTracker> tracker;
    if (ca) {
        rep = diagnostics_report(p, *ca, alpha, h, opt.c);
        tracker.emplace(*ca, rep->bounds);
    }

    fs::create_directories(dir.path("snapshots"));
    std::ofstream diam_stream;
    if (ca) {
        diam_stream = dir.create("diameters.csv");
        diam_stream << "step";
        for (int cidx = 1; cidx <= ca->k; ++cidx) diam_stream << ",diam_c" << cidx;
        diam_stream << "\n";
    }

    Points last_state;
    int last_step = -1;
    const SnapshotSink sink = [&](int step, const Points& y) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshots/step_%06d.csv", step);
        save_points_csv(dir.path(name), y, loaded.labels);
        dir.add(name);
        if (ca) {
            const std::vector<double> diams = cluster_diameters(y, *ca);
            diam_stream << step;
            for (double d : diams) diam_stream << ',' << format_double(d);
            diam_stream << "\n";
            tracker->push_row(step, diams);
        }
        last_state = y;
        last_step = step;
    };

    const Points y0 = random_embedding(n, opt.s, opt.seed);
    bool diverged = false;
    int diverged_iteration = -1;
    std::optional<RunResult> result;
    try {
        if (opt.engine == "spectral") {
            const AffinityMatrix limit = rescale_for_limit(p, alpha * h);
            const TransitionMatrix a = build_transition_matrix(limit);
            result = spectral_iterate(a, y0, opt.ee_iters, opt.stride, sink);
        } else {
            ExaggerationConfig cfg;
            cfg.alpha = alpha;
            cfg.h = h;
            cfg.iterations = opt.ee_iters;
            cfg.capture_every = opt.stride;
            PostPhaseConfig post;
            post.h = h;
            post.iterations = opt.post_iters;
            if (opt.post_iters > 0) {
                result = run_full_tsne(y0, p, cfg, post, sink);
            } else {
                result = run_early_exaggeration(y0, p, cfg, sink);
            }
        }
    } catch (const NonFiniteUpdate& e) {
        diverged = true;
        diverged_iteration = e.iteration;
    }

    if (result) {
        save_points_csv(dir.path("embedding.csv"), result->y, loaded.labels);
        dir.add("embedding.csv");
        if (opt.s == 2) {
            plot_svg(dir.path("embedding.svg"), result->y, loaded.labels, "final embedding");
            dir.add("embedding.svg");
        }
    } else if (last_step >= 0) {
        save_points_csv(dir.path("last_state.csv"), last_state, loaded.labels);
        dir.add("last_state.csv");
    }

    if (ca) {
        diam_stream.flush();
        const DiameterSeries series = tracker->series(opt.c);
        const bool init_in_box = result ? result->init_in_default_box : true;
        write_report(dir, *rep, &series, init_in_box, diverged, diverged_iteration);
    }
    dir.write_manifest();

    if (diverged) {
        throw NonFiniteUpdate(diverged_iteration,
                              "run diverged at iteration " + std::to_string(diverged_iteration) +
                                  "; partial outputs in " + dir.root());
    }
    std::printf("wrote %s (n=%d, %s engine, %d iterations)\n", dir.path("embedding.csv").c_str(),
                n, opt.engine.c_str(), opt.ee_iters + opt.post_iters);
    if (ca) std::printf("report: %s\n", dir.path("report.kv").c_str());
    return 0;
}

struct DiagnoseOptions {
    InputOptions in;
    StrengthOptions strength;
    double perplexity = 30.0;
    double c = 10.0;
    std::string out;
};

int run_diagnose(const DiagnoseOptions& opt) {
    const LoadedInput loaded = resolve_input(opt.in);
    const AffinityMatrix p = affinities_for(loaded, opt.perplexity);
    if (loaded.labels.empty()) {
        throw InvalidSpec("diagnose needs cluster labels (labelled input or --labels-csv)");
    }
    const ClusterAssignment ca = ClusterAssignment::from_labels(loaded.labels);
    const double alpha = resolve_alpha(opt.strength, p, &ca, nullptr);
    const DiagnosticsReport rep = diagnostics_report(p, ca, alpha, opt.strength.h, opt.c);

    RunDir dir(default_out(opt.out, "diagnose"));
    {
        KeyValueWriter kv(dir.create("resolved_config.txt"));
        kv.put("command", std::string("diagnose"));
        kv.put("source", loaded.source);
        kv.put("n", rep.n);
        if (!loaded.preloaded) kv.put("perplexity", opt.perplexity);
        kv.put("alpha", alpha);
        kv.put("h", opt.strength.h);
        kv.put("alpha_h", alpha * opt.strength.h);
        kv.put("c", opt.c);
    }
    write_report(dir, rep, nullptr, true, false, -1);
    dir.write_manifest();
    std::printf("report: %s\n", dir.path("report.kv").c_str());
    std::printf("assumption1 %s, assumption2 %s, guideline alpha*h = %s\n",
                rep.a1.pass ? "pass" : "FAIL", rep.a2.pass ? "pass" : "FAIL",
                format_double(rep.guideline.alpha_h).c_str());
    return 0;
}

struct DynsysOptions {
    int n = 12;
    int s = 2;
    double delta = 0.02;
    double eps = 0.0;
    int steps = 200;
    int trials = 10;
    std::uint64_t seed = 1;
    std::string init = "circle";
    std::string out;
};

int run_dynsys_cmd(const DynsysOptions& opt) {
    if (opt.init != "circle" && opt.init != "random") {
        throw InvalidSpec("--init must be circle or random");
    }
    if (opt.init == "circle" && opt.s != 2) {
        throw InvalidSpec("--init circle needs --s 2");
    }
    if (opt.trials < 1) {
        throw InvalidSpec("--trials must be >= 1");
    }

    RunDir dir(default_out(opt.out, "dynsys"));
    {
        KeyValueWriter kv(dir.create("resolved_config.txt"));
        kv.put("command", std::string("dynsys"));
        kv.put("n", opt.n);
        kv.put("s", opt.s);
        kv.put("delta", opt.delta);
        kv.put("eps", opt.eps);
        kv.put("steps", opt.steps);
        kv.put("trials", opt.trials);
        kv.put("seed", static_cast<int>(opt.seed));
        kv.put("init", opt.init);
    }

    std::ofstream trials_csv = dir.create("trials.csv");
    trials_csv << "trial,n,s,delta,eps,steps,hull_failures,contraction_violations,"
                  "final_diameter\n";

    int total_hull = 0;
    int total_contraction = 0;
    for (int trial = 1; trial <= opt.trials; ++trial) {
        const std::uint64_t trial_seed = opt.seed + 0x9e3779b9ull * static_cast<std::uint64_t>(trial);
        DynState z0;
        if (opt.init == "circle") {
            GeneratorSpec spec;
            spec.kind = GeneratorKind::Circle;
            spec.n = opt.n;
            z0.z = generate(spec).data;
        } else {
            Rng rng(trial_seed ^ 0xabcdefull);
            z0.z = Points(opt.n, opt.s);
            for (std::size_t i = 0; i < z0.z.xs.size(); ++i) z0.z.xs[i] = rng.uniform(-1.0, 1.0);
        }
        const CoefficientRegime regime = random_regime(opt.n, opt.s, opt.delta, opt.eps, trial_seed);
        const DynTrajectory traj = run_dynsys(z0, regime, opt.steps);
        total_hull += traj.hull_failures;
        total_contraction += traj.contraction_violations;
        trials_csv << trial << ',' << opt.n << ',' << opt.s << ',' << format_double(opt.delta)
                   << ',' << format_double(opt.eps) << ',' << opt.steps << ','
                   << traj.hull_failures << ',' << traj.contraction_violations << ','
                   << format_double(traj.diameters.back()) << "\n";

        if (trial == 1) {
            std::ofstream diam = dir.create("diameters_trial1.csv");
            diam << "step,diameter\n";
            for (std::size_t t = 0; t < traj.diameters.size(); ++t) {
                diam << t << ',' << format_double(traj.diameters[t]) << "\n";
            }
            if (opt.s == 2) {
                plot_svg(dir.path("final_state_trial1.svg"), traj.states.back().z, {},
                         "dynsys final state");
                dir.add("final_state_trial1.svg");
            }
        }
    }
    dir.write_manifest();
    std::printf("%d trials, %d steps each: %d hull failures, %d contraction violations\n",
                opt.trials, opt.steps, total_hull, total_contraction);
    std::printf("wrote %s\n", dir.path("trials.csv").c_str());
    return 0;
}

struct CompareOptions {
    InputOptions in;
    StrengthOptions strength;
    double perplexity = 30.0;
    int steps = 100;
    std::uint64_t seed = 1;
    std::string out;
};

int run_compare(const CompareOptions& opt) {
    const LoadedInput loaded = resolve_input(opt.in);
    const AffinityMatrix p = affinities_for(loaded, opt.perplexity);
    std::optional<ClusterAssignment> ca;
    if (!loaded.labels.empty()) ca = ClusterAssignment::from_labels(loaded.labels);
    const double alpha = resolve_alpha(opt.strength, p, ca ? &*ca : nullptr, nullptr);
    const double h = opt.strength.h;

    const std::vector<double> dev = compare_trajectories(p, alpha, h, opt.steps, opt.seed);

    RunDir dir(default_out(opt.out, "compare"));
    {
        KeyValueWriter kv(dir.create("resolved_config.txt"));
        kv.put("command", std::string("compare"));
        kv.put("source", loaded.source);
        kv.put("n", p.n());
        if (!loaded.preloaded) kv.put("perplexity", opt.perplexity);
        kv.put("alpha", alpha);
        kv.put("h", h);
        kv.put("alpha_h", alpha * h);
        kv.put("steps", opt.steps);
        kv.put("seed", static_cast<int>(opt.seed));
    }
    std::ofstream csv = dir.create("deviation.csv");
    csv << "step,deviation\n";
    for (std::size_t t = 0; t < dev.size(); ++t) {
        csv << t << ',' << format_double(dev[t]) << "\n";
    }
    dir.write_manifest();
    std::printf("deviation after %d steps: %s (wrote %s)\n", opt.steps,
                format_double(dev.back()).c_str(), dir.path("deviation.csv").c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"early-exaggeration t-SNE: embedding, spectral limit, and diagnostics"};
    app.require_subcommand(1);

    GenOptions gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "write a synthetic dataset CSV");
    gen_cmd->add_option("--kind", gen.kind,
                        "line3d, swiss_roll, gaussian_mixture, or circle");
    gen_cmd->add_option("--n", gen.n, "point count");
    gen_cmd->add_option("--seed", gen.seed, "generator seed");
    gen_cmd->add_option("--k", gen.k, "gaussian_mixture cluster count");
    gen_cmd->add_option("--dim", gen.dim, "gaussian_mixture ambient dimension");
    gen_cmd->add_option("--cluster-std", gen.cluster_std, "gaussian_mixture cluster std");
    gen_cmd->add_option("--separation", gen.separation, "gaussian_mixture center separation");
    gen_cmd->add_option("--turns", gen.turns, "swiss_roll turns");
    gen_cmd->add_option("--noise", gen.noise, "swiss_roll noise std");
    gen_cmd->add_option("--out", gen.out, "output CSV path (default <kind>.csv)");

    EmbedOptions embed;
    CLI::App* embed_cmd = app.add_subcommand("embed", "run the exaggerated embedding");
    add_input_options(embed_cmd, embed.in);
    add_strength_options(embed_cmd, embed.strength);
    embed_cmd->add_option("--perplexity", embed.perplexity, "calibration target (default 30)");
    embed_cmd->add_option("--ee-iters", embed.ee_iters, "exaggerated iterations (default 250)");
    embed_cmd->add_option("--post-iters", embed.post_iters,
                          "plain (alpha=1) iterations afterwards (default 0)");
    embed_cmd->add_option("--stride", embed.stride, "snapshot stride (default 10; 0 = endpoints)");
    embed_cmd->add_option("--s", embed.s, "embedding dimension (default 2)");
    embed_cmd->add_option("--seed", embed.seed, "embedding init seed (default 1)");
    embed_cmd->add_option("--c", embed.c, "theorem bound constant (default 10)");
    embed_cmd->add_option("--engine", embed.engine, "tsne or spectral (default tsne)");
    embed_cmd->add_option("--out", embed.out, "run directory (default $EETSNE_OUT/embed-run)");

    DiagnoseOptions diag;
    CLI::App* diag_cmd = app.add_subcommand("diagnose", "assumption checks without a run");
    add_input_options(diag_cmd, diag.in);
    add_strength_options(diag_cmd, diag.strength);
    diag_cmd->add_option("--perplexity", diag.perplexity, "calibration target (default 30)");
    diag_cmd->add_option("--c", diag.c, "theorem bound constant (default 10)");
    diag_cmd->add_option("--out", diag.out, "run directory (default $EETSNE_OUT/diagnose-run)");

    DynsysOptions dyn;
    CLI::App* dyn_cmd = app.add_subcommand("dynsys", "abstract contraction system trials");
    dyn_cmd->add_option("--n", dyn.n, "points (default 12)");
    dyn_cmd->add_option("--s", dyn.s, "dimension (default 2)");
    dyn_cmd->add_option("--delta", dyn.delta, "coefficient floor (default 0.02)");
    dyn_cmd->add_option("--eps", dyn.eps, "perturbation radius (default 0)");
    dyn_cmd->add_option("--steps", dyn.steps, "steps per trial (default 200)");
    dyn_cmd->add_option("--trials", dyn.trials, "trial count (default 10)");
    dyn_cmd->add_option("--seed", dyn.seed, "base seed (default 1)");
    dyn_cmd->add_option("--init", dyn.init, "initial state: circle or random (default circle)");
    dyn_cmd->add_option("--out", dyn.out, "run directory (default $EETSNE_OUT/dynsys-run)");

    CompareOptions cmp;
    CLI::App* cmp_cmd = app.add_subcommand("compare", "gradient vs spectral deviation");
    add_input_options(cmp_cmd, cmp.in);
    add_strength_options(cmp_cmd, cmp.strength);
    cmp_cmd->add_option("--perplexity", cmp.perplexity, "calibration target (default 30)");
    cmp_cmd->add_option("--steps", cmp.steps, "iterations to compare (default 100)");
    cmp_cmd->add_option("--seed", cmp.seed, "shared init seed (default 1)");
    cmp_cmd->add_option("--out", cmp.out, "run directory (default $EETSNE_OUT/compare-run)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen_cmd->parsed()) return run_gen(gen);
        if (embed_cmd->parsed()) return run_embed(embed);
        if (diag_cmd->parsed()) return run_diagnose(diag);
        if (dyn_cmd->parsed()) return run_dynsys_cmd(dyn);
        if (cmp_cmd->parsed()) return run_compare(cmp);
        std::fprintf(stderr, "error: no subcommand selected\n");
        return 2;
    } catch (const NonFiniteUpdate& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
