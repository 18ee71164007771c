// huefuse command-line front end.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "huefuse/color_core.hpp"
#include "huefuse/error.hpp"
#include "huefuse/fusion.hpp"
#include "huefuse/io.hpp"
#include "huefuse/metrics.hpp"
#include "huefuse/parallel.hpp"
#include "huefuse/pipeline.hpp"
#include "huefuse/response.hpp"
#include "huefuse/ssla.hpp"
#include "huefuse/synth.hpp"

namespace fs = std::filesystem;
using namespace huefuse;

namespace {

enum Exit : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kIo = 3,
    kEstimation = 4,
    kSegmentation = 5,
};

// Flags shared by every command that runs part of the pipeline. Unset
// optionals leave the config-file (or default) value alone.
struct PipelineFlags {
    std::string config;
    std::optional<int> ssla_m;
    std::optional<double> sigma_frac;
    std::optional<std::uint64_t> seed;
    std::optional<double> key_value;
    std::optional<int> levels;
    std::optional<double> wc, ws, we;
    std::optional<std::string> crf;
    std::optional<int> degree;
    std::optional<int> samples;
    std::optional<double> lambda;
    std::optional<std::string> domain;
    std::optional<double> gamma;
    bool no_ssla = false;

    void add_ssla(CLI::App* c) {
        c->add_option("--m", ssla_m, "number of SSLA areas (0 = one per input)");
        c->add_option("--sigma-frac", sigma_frac, "local-average sigma as a fraction of min(H, W)");
        c->add_option("--seed", seed, "GMM seed");
        c->add_option("--key-value", key_value, "SSLA key value");
    }
    void add_fusion(CLI::App* c) {
        c->add_option("--levels", levels, "pyramid levels (0 = automatic)");
        c->add_option("--wc", wc, "contrast exponent");
        c->add_option("--ws", ws, "saturation exponent");
        c->add_option("--we", we, "well-exposedness exponent");
    }
    void add_crf(CLI::App* c) {
        c->add_option("--crf", crf, "response estimator")->check(CLI::IsMember({"mitsunaga", "debevec"}));
        c->add_option("--degree", degree, "Mitsunaga polynomial degree (0 = select 3..7)");
        c->add_option("--samples", samples, "samples per channel");
        c->add_option("--lambda", lambda, "Debevec smoothness weight");
    }
    void add_config(CLI::App* c) {
        c->add_option("--config", config, "key=value settings file; flags take precedence")->check(CLI::ExistingFile);
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg;
        if (!config.empty()) apply_settings(read_settings(config), cfg);
        Settings s;
        auto set = [&](const char* key, const auto& opt) {
            if (opt) {
                std::ostringstream os;
                os << std::setprecision(17) << *opt;
                s[key] = os.str();
            }
        };
        set("ssla.m", ssla_m);
        set("ssla.sigma_frac", sigma_frac);
        set("ssla.seed", seed);
        set("ssla.key_value", key_value);
        set("fusion.levels", levels);
        set("fusion.wc", wc);
        set("fusion.ws", ws);
        set("fusion.we", we);
        set("crf.method", crf);
        set("crf.degree", degree);
        set("crf.samples", samples);
        set("debevec.samples", samples);
        set("debevec.lambda", lambda);
        set("correct.domain", domain);
        set("gamma", gamma);
        apply_settings(s, cfg);
        if (no_ssla) cfg.use_ssla = false;
        return cfg;
    }
};

std::vector<double> parse_ev_list(const std::string& csv) { return parse_condition(csv).ev; }

std::string indexed(const std::string& stem, std::size_t i, const std::string& ext) {
    std::ostringstream os;
    os << stem << '_' << std::setw(2) << std::setfill('0') << i << ext;
    return os.str();
}

// Writes every image next to a manifest so the set can be fed back in.
void write_stack_dir(const std::vector<RgbImage>& images, const std::vector<double>& ev, double gamma,
                     const fs::path& dir, const std::string& stem) {
    fs::create_directories(dir);
    io::StackManifest m;
    m.ev = ev;
    m.gamma = gamma;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const std::string name = indexed(stem, i, ".png");
        io::write_png8(images[i], (dir / name).string());
        m.files.push_back(name);
    }
    io::write_manifest(m, (dir / "stack.json").string());
}

void print_mse(const std::array<double, 3>& mse) {
    std::cout << std::setprecision(6) << "mse_r=" << mse[0] << " mse_g=" << mse[1] << " mse_b=" << mse[2] << '\n';
}

std::vector<NamedHdr> load_corpus(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto ext = e.path().extension().string();
        if (ext == ".hdr" || ext == ".pic" || ext == ".pfm") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<NamedHdr> out;
    for (const auto& f : files) {
        RgbImage img = io::read_image(f.string());
        img.set_transfer(Transfer::Linear);
        out.push_back({f.stem().string(), std::move(img)});
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hue-corrected multi-exposure fusion"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: HUEFUSE_THREADS or hardware)");

    PipelineFlags pf;

    // synth
    auto* synth = app.add_subcommand("synth", "expose an HDR image into an 8-bit gamma-encoded stack");
    std::string synth_hdr, synth_out, synth_ev = "-4,-2,0,2,4";
    double synth_gamma = 2.2;
    synth->add_option("--hdr", synth_hdr, "source radiance map (.hdr or .pfm)")->required()->check(CLI::ExistingFile);
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--ev", synth_ev, "comma-separated exposure values");
    synth->add_option("--gamma", synth_gamma, "camera gamma");

    // scenes
    auto* scenes = app.add_subcommand("scenes", "write a procedural HDR test corpus");
    std::string scenes_out;
    int scenes_count = 10, scenes_size = 256;
    std::uint64_t scenes_seed = 0;
    scenes->add_option("--out", scenes_out, "output directory")->required();
    scenes->add_option("--count", scenes_count, "number of scenes")->check(CLI::PositiveNumber);
    scenes->add_option("--size", scenes_size, "width and height")->check(CLI::PositiveNumber);
    scenes->add_option("--seed", scenes_seed, "first scene seed");

    // crf
    auto* crf = app.add_subcommand("crf", "estimate the camera response from a stack");
    std::string crf_stack, crf_out;
    std::optional<double> crf_truth;
    crf->add_option("--stack", crf_stack, "stack manifest")->required()->check(CLI::ExistingFile);
    crf->add_option("--method", pf.crf, "mitsunaga or debevec")->check(CLI::IsMember({"mitsunaga", "debevec"}));
    crf->add_option("--degree", pf.degree, "Mitsunaga polynomial degree (0 = select 3..7)");
    crf->add_option("--samples", pf.samples, "samples per channel");
    crf->add_option("--lambda", pf.lambda, "Debevec smoothness weight");
    crf->add_option("--out", crf_out, "curve file to write");
    crf->add_option("--truth-gamma", crf_truth, "print per-channel MSE against z^gamma");
    pf.add_config(crf);

    // merge
    auto* merge = app.add_subcommand("merge", "merge a stack into a radiance map");
    std::string merge_stack, merge_curve, merge_out;
    std::optional<double> merge_gamma;
    merge->add_option("--stack", merge_stack, "stack manifest")->required()->check(CLI::ExistingFile);
    auto* merge_curve_opt = merge->add_option("--curve", merge_curve, "response curve file")->check(CLI::ExistingFile);
    merge->add_option("--true-gamma", merge_gamma, "use the exact z^gamma response")->excludes(merge_curve_opt);
    merge->add_option("--out", merge_out, "output radiance map (.pfm or .hdr)")->required();

    // ssla
    auto* ssla_cmd = app.add_subcommand("ssla", "scene-segmentation-based luminance adjustment");
    std::string ssla_stack, ssla_out;
    ssla_cmd->add_option("--stack", ssla_stack, "stack manifest")->required()->check(CLI::ExistingFile);
    ssla_cmd->add_option("--out", ssla_out, "output directory")->required();
    pf.add_ssla(ssla_cmd);
    pf.add_config(ssla_cmd);

    // fuse
    auto* fuse_cmd = app.add_subcommand("fuse", "Mertens exposure fusion");
    std::string fuse_stack, fuse_out;
    std::vector<std::string> fuse_inputs;
    auto* fs_opt = fuse_cmd->add_option("--stack", fuse_stack, "stack manifest")->check(CLI::ExistingFile);
    fuse_cmd->add_option("--inputs", fuse_inputs, "input images")->excludes(fs_opt)->check(CLI::ExistingFile);
    fuse_cmd->add_option("--out", fuse_out, "fused image")->required();
    pf.add_fusion(fuse_cmd);
    pf.add_config(fuse_cmd);

    // correct
    auto* correct = app.add_subcommand("correct", "replace fused hue with the radiance map's hue");
    std::string corr_fused, corr_hdr, corr_out;
    correct->add_option("--fused", corr_fused, "fused display image")->required()->check(CLI::ExistingFile);
    correct->add_option("--hdr", corr_hdr, "radiance map")->required()->check(CLI::ExistingFile);
    correct->add_option("--out", corr_out, "corrected image")->required();
    correct->add_option("--domain", pf.domain, "display or linear")->check(CLI::IsMember({"display", "linear"}));
    correct->add_option("--gamma", pf.gamma, "decoding gamma for the linear domain");

    // metrics
    auto* metrics = app.add_subcommand("metrics", "mean CIEDE2000 hue difference and TMQI");
    std::string met_fused, met_ref, met_curve;
    double met_gamma = 2.2;
    metrics->add_option("--fused", met_fused, "fused display image")->required()->check(CLI::ExistingFile);
    metrics->add_option("--ref", met_ref, "reference radiance map")->required()->check(CLI::ExistingFile);
    metrics->add_option("--gamma", met_gamma, "display gamma of the fused image");
    metrics->add_option("--curve", met_curve, "also report the curve's MSE against z^gamma")->check(CLI::ExistingFile);

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "SSLA, fusion, response estimation, merge and hue correction");
    std::string pipe_stack, pipe_out;
    pipe->add_option("--stack", pipe_stack, "stack manifest")->required();
    pipe->add_option("--out", pipe_out, "output directory")->required();
    pipe->add_flag("--no-ssla", pf.no_ssla, "fuse the inputs directly");
    pipe->add_option("--domain", pf.domain, "hue correction domain: display or linear")
        ->check(CLI::IsMember({"display", "linear"}));
    pipe->add_option("--gamma", pf.gamma, "decoding gamma for the linear domain");
    pf.add_ssla(pipe);
    pf.add_fusion(pipe);
    pf.add_crf(pipe);
    pf.add_config(pipe);

    // eval
    auto* eval = app.add_subcommand("eval", "run every method under every exposure condition over a corpus");
    std::string eval_corpus, eval_out;
    std::vector<std::string> eval_conditions, eval_methods;
    double eval_gamma = 2.2;
    eval->add_option("--corpus", eval_corpus, "directory of .hdr/.pfm radiance maps")->required()->check(
        CLI::ExistingDirectory);
    eval->add_option("--out", eval_out, "output directory")->required();
    eval->add_option("--condition", eval_conditions, "EV list such as -4,-2,0 (repeatable)");
    eval->add_option("--method", eval_methods, "method subset (repeatable)")
        ->check(CLI::IsMember({"mertens", "tm-global", "ssla-only", "proposed"}));
    eval->add_option("--synth-gamma", eval_gamma, "camera gamma used to synthesize stacks");
    eval->add_option("--domain", pf.domain, "hue correction domain: display or linear")
        ->check(CLI::IsMember({"display", "linear"}));
    pf.add_ssla(eval);
    pf.add_fusion(eval);
    pf.add_crf(eval);
    pf.add_config(eval);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (threads > 0) set_thread_count(threads);

    try {
        if (*synth) {
            SynthConfig sc;
            sc.ev_list = parse_ev_list(synth_ev);
            sc.gamma = synth_gamma;
            sc.validate();
            RgbImage hdr = io::read_image(synth_hdr);
            const ExposureStack st = generate_stack(hdr, sc);
            write_stack_dir(st.images, sc.ev_list, sc.gamma, synth_out, "exposure");
        } else if (*scenes) {
            fs::create_directories(scenes_out);
            for (int i = 0; i < scenes_count; ++i) {
                const RgbImage img = make_scene(scenes_seed + static_cast<std::uint64_t>(i), scenes_size, scenes_size);
                io::write_pfm(img, (fs::path(scenes_out) / indexed("scene", static_cast<std::size_t>(i), ".pfm")).string());
            }
        } else if (*crf) {
            const PipelineConfig cfg = pf.resolve();
            const ExposureStack st = io::load_stack(crf_stack);
            const ResponseCurve curve = estimate_crf(st, cfg);
            if (!crf_out.empty()) curve.save(crf_out);
            if (crf_truth) print_mse(crf_mse(curve, *crf_truth));
        } else if (*merge) {
            const ExposureStack st = io::load_stack(merge_stack);
            ResponseCurve curve;
            if (!merge_curve.empty()) curve = ResponseCurve::load(merge_curve);
            else if (merge_gamma) curve = ResponseCurve::gamma(*merge_gamma);
            else curve = estimate_crf(st, PipelineConfig{});
            io::write_image(merge_hdr(st, curve).image, merge_out);
        } else if (*ssla_cmd) {
            const PipelineConfig cfg = pf.resolve();
            const io::StackManifest man = io::read_manifest(ssla_stack);
            const ExposureStack st = io::load_stack(ssla_stack);
            const AdjustedSet adj = ssla(st, cfg.ssla);
            std::vector<double> ev;
            for (std::size_t s : adj.source) ev.push_back(man.ev[s]);
            write_stack_dir(adj.images, ev, man.gamma, ssla_out, "adjusted");
        } else if (*fuse_cmd) {
            const PipelineConfig cfg = pf.resolve();
            std::vector<RgbImage> imgs;
            if (!fuse_stack.empty()) imgs = io::load_stack(fuse_stack).images;
            else
                for (const auto& f : fuse_inputs) imgs.push_back(io::read_image(f));
            if (imgs.empty()) throw InvalidArgument("fuse: give --stack or --inputs");
            io::write_image(fuse(imgs, cfg.fusion), fuse_out);
        } else if (*correct) {
            const PipelineConfig cfg = pf.resolve();
            const RgbImage fused = io::read_image(corr_fused);
            const RgbImage hdr = io::read_image(corr_hdr);
            io::write_image(apply_hue_correction(fused, hdr, cfg.hue_domain, cfg.gamma), corr_out);
        } else if (*metrics) {
            const RgbImage fused = io::read_image(met_fused);
            const RgbImage ref = io::read_image(met_ref);
            MetricsConfig mc;
            mc.gamma = met_gamma;
            const MetricsReport r = evaluate(fused, ref, mc);
            std::cout << std::setprecision(10) << "mean_dh=" << r.mean_dh << " tmqi_q=" << r.tmqi_q
                      << " tmqi_s=" << r.tmqi_s << " tmqi_n=" << r.tmqi_n << '\n';
            if (!met_curve.empty()) print_mse(crf_mse(ResponseCurve::load(met_curve), met_gamma));
        } else if (*pipe) {
            const PipelineConfig cfg = pf.resolve();
            const ExposureStack st = io::load_stack(pipe_stack);
            const PipelineResult r = run_pipeline(st, cfg);
            const fs::path out(pipe_out);
            fs::create_directories(out);
            io::write_png8(r.fused, (out / "fused.png").string());
            io::write_png8(r.corrected, (out / "corrected.png").string());
            io::write_pfm(r.hdr.image, (out / "hdr.pfm").string());
            r.curve.save((out / "curve.txt").string());
        } else if (*eval) {
            EvalConfig ec;
            ec.pipeline = pf.resolve();
            ec.synth.gamma = eval_gamma;
            if (!eval_conditions.empty()) {
                ec.conditions.clear();
                for (const auto& c : eval_conditions) ec.conditions.push_back(parse_condition(c));
            }
            if (!eval_methods.empty()) {
                ec.methods.clear();
                for (const auto& m : eval_methods) ec.methods.push_back(parse_method(m));
            }
            const auto corpus = load_corpus(eval_corpus);
            if (corpus.empty()) throw InvalidArgument("eval: no .hdr or .pfm files in " + eval_corpus);
            const EvalResult res = run_eval(corpus, ec);
            for (const auto& f : res.failures)
                std::cerr << "eval: " << f.image << " [" << f.condition << "]: " << f.message << '\n';

            const fs::path out(eval_out);
            fs::create_directories(out);
            for (std::size_t i = 0; i < ec.conditions.size(); ++i) {
                std::ofstream os(out / indexed("report", i, ".csv"));
                write_report_csv(os, res.rows, ec.conditions[i].name);
            }
            {
                std::ofstream os(out / "long.csv");
                write_long_csv(os, res.rows);
            }
            {
                std::ofstream os(out / "summary.csv");
                write_summary_csv(os, res.rows, ec.conditions, ec.methods);
            }
            {
                std::ofstream os(out / "conditions.txt");
                for (std::size_t i = 0; i < ec.conditions.size(); ++i)
                    os << indexed("report", i, ".csv") << ' ' << ec.conditions[i].name << '\n';
            }
            if (res.rows.empty()) {
                std::cerr << "eval: every image failed\n";
                return kFailure;
            }
        }
    } catch (const DecodeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const EncodeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const EstimationFailed& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEstimation;
    } catch (const SegmentationFailed& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSegmentation;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}
