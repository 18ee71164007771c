#include "huefuse/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "huefuse/color_core.hpp"
#include "huefuse/error.hpp"
#include "huefuse/parallel.hpp"
#include "huefuse/synth.hpp"

namespace huefuse {

CrfMethod parse_crf_method(const std::string& name) {
    if (name == "mitsunaga") return CrfMethod::Mitsunaga;
    if (name == "debevec") return CrfMethod::Debevec;
    throw InvalidArgument("unknown CRF method: " + name);
}

std::string to_string(CrfMethod m) { return m == CrfMethod::Debevec ? "debevec" : "mitsunaga"; }

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos == v.size() && std::isfinite(d)) return d;
    } catch (const std::exception&) {
    }
    throw InvalidArgument("setting " + key + ": not a number: " + v);
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos == v.size()) return i;
    } catch (const std::exception&) {
    }
    throw InvalidArgument("setting " + key + ": not an integer: " + v);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw InvalidArgument("setting " + key + ": not a boolean: " + v);
}

}  // namespace

Settings parse_settings(std::istream& is) {
    Settings out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("settings line " + std::to_string(lineno) + ": expected key=value");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

Settings read_settings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open settings file: " + path);
    return parse_settings(in);
}

void apply_settings(const Settings& s, PipelineConfig& cfg) {
    for (const auto& [k, v] : s) {
        if (k == "ssla.m") cfg.ssla.m = static_cast<int>(to_int(k, v));
        else if (k == "ssla.sigma_frac") cfg.ssla.sigma_frac = to_double(k, v);
        else if (k == "ssla.seed") cfg.ssla.seed = static_cast<std::uint64_t>(to_int(k, v));
        else if (k == "ssla.key_value") cfg.ssla.key_value = to_double(k, v);
        else if (k == "ssla.enabled") cfg.use_ssla = to_bool(k, v);
        else if (k == "fusion.levels") cfg.fusion.levels = static_cast<int>(to_int(k, v));
        else if (k == "fusion.wc") cfg.fusion.wc = to_double(k, v);
        else if (k == "fusion.ws") cfg.fusion.ws = to_double(k, v);
        else if (k == "fusion.we") cfg.fusion.we = to_double(k, v);
        else if (k == "crf.method") cfg.crf = parse_crf_method(v);
        else if (k == "crf.degree") cfg.mitsunaga.degree = static_cast<int>(to_int(k, v));
        else if (k == "crf.samples") cfg.mitsunaga.samples = static_cast<int>(to_int(k, v));
        else if (k == "debevec.samples") cfg.debevec.samples = static_cast<int>(to_int(k, v));
        else if (k == "debevec.lambda") cfg.debevec.smoothness = to_double(k, v);
        else if (k == "correct.domain") {
            if (v == "display") cfg.hue_domain = HueDomain::Display;
            else if (v == "linear") cfg.hue_domain = HueDomain::Linear;
            else throw InvalidArgument("setting correct.domain: expected display or linear");
        } else if (k == "gamma") cfg.gamma = to_double(k, v);
        else throw InvalidArgument("unknown setting: " + k);
    }
}

RgbImage apply_hue_correction(const RgbImage& fused, const RgbImage& hdr, HueDomain domain, double gamma) {
    if (domain == HueDomain::Display) return correct_hue_image(fused, hdr);
    if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
    auto power = [](RgbImage img, double e) {
        for (Rgb& p : img.pixels())
            for (int c = 0; c < 3; ++c) p[c] = std::pow(std::clamp(p[c], 0.0, 1.0), e);
        return img;
    };
    RgbImage out = power(correct_hue_image(power(fused, gamma), hdr), 1.0 / gamma);
    out.set_transfer(Transfer::Display);
    return out;
}

ResponseCurve estimate_crf(const ExposureStack& stack, const PipelineConfig& cfg) {
    return cfg.crf == CrfMethod::Debevec ? estimate_crf_debevec(stack, cfg.debevec)
                                         : estimate_crf_mitsunaga(stack, cfg.mitsunaga);
}

PipelineResult run_pipeline(const ExposureStack& stack, const PipelineConfig& cfg) {
    stack.validate(2);
    PipelineResult r;
    if (cfg.use_ssla) {
        r.adjusted = ssla(stack, cfg.ssla);
        r.fused = fuse(r.adjusted->images, cfg.fusion);
    } else {
        r.fused = fuse(stack.images, cfg.fusion);
    }
    r.curve = estimate_crf(stack, cfg);
    r.hdr = merge_hdr(stack, r.curve);
    r.hdr.estimator = to_string(cfg.crf);
    r.corrected = apply_hue_correction(r.fused, r.hdr.image, cfg.hue_domain, cfg.gamma);
    return r;
}

RgbImage tone_map_global(const RgbImage& hdr, double key, double gamma) {
    if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
    const LuminancePlane lum = luminance(hdr);
    const double g = geometric_mean(lum);
    if (!(g > kGeoMeanEpsilon)) throw InvalidArgument("radiance map is black");
    const double alpha = key / g;
    double l_max = 0.0;
    for (double v : lum.pixels()) l_max = std::max(l_max, alpha * v);

    RgbImage out(hdr.width(), hdr.height(), Transfer::Display);
    parallel_rows(hdr.height(), [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < hdr.width(); ++x) {
                const double l = lum.at(x, y);
                Rgb p{};
                if (l >= 1e-12) {
                    const double ratio = tone_curve(alpha * l, l_max) / l;
                    const Rgb& h = hdr.at(x, y);
                    for (int c = 0; c < 3; ++c)
                        p[c] = std::pow(std::clamp(ratio * h[c], 0.0, 1.0), 1.0 / gamma);
                }
                out.at(x, y) = p;
            }
    });
    return out;
}

RgbImage quantize_display(const RgbImage& img) {
    RgbImage out = img;
    for (Rgb& p : out.pixels())
        for (int c = 0; c < 3; ++c) p[c] = std::round(std::clamp(p[c], 0.0, 1.0) * 255.0) / 255.0;
    return out;
}

// ------------------------------------------------------------ evaluation

std::string to_string(Method m) {
    switch (m) {
        case Method::Mertens: return "mertens";
        case Method::TmGlobal: return "tm-global";
        case Method::SslaOnly: return "ssla-only";
        case Method::Proposed: return "proposed";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    for (Method m : all_methods())
        if (to_string(m) == name) return m;
    throw InvalidArgument("unknown method: " + name);
}

std::vector<EvalCondition> default_conditions() {
    return {{"-4,-2,0,2,4", {-4, -2, 0, 2, 4}}, {"-4,-2,0", {-4, -2, 0}}, {"0,2,4", {0, 2, 4}}};
}

EvalCondition parse_condition(const std::string& ev_csv) {
    EvalCondition c;
    std::stringstream ss(ev_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) c.ev.push_back(to_double("ev", trim(tok)));
    if (c.ev.empty()) throw InvalidArgument("empty EV list");
    std::ostringstream name;
    for (std::size_t i = 0; i < c.ev.size(); ++i) name << (i ? "," : "") << c.ev[i];
    c.name = name.str();
    return c;
}

std::map<Method, RgbImage> render_methods(const ExposureStack& stack, const std::vector<Method>& methods,
                                          const PipelineConfig& cfg) {
    auto wants = [&](Method m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };
    std::map<Method, RgbImage> out;
    if (wants(Method::Mertens)) out[Method::Mertens] = quantize_display(fuse(stack.images, cfg.fusion));

    std::optional<RadianceMap> hdr;
    if (wants(Method::TmGlobal) || wants(Method::Proposed)) hdr = merge_hdr(stack, estimate_crf(stack, cfg));
    if (wants(Method::TmGlobal))
        out[Method::TmGlobal] = quantize_display(tone_map_global(hdr->image, cfg.ssla.key_value, cfg.gamma));

    if (wants(Method::SslaOnly) || wants(Method::Proposed)) {
        const RgbImage fused = fuse(ssla(stack, cfg.ssla).images, cfg.fusion);
        if (wants(Method::SslaOnly)) out[Method::SslaOnly] = quantize_display(fused);
        if (wants(Method::Proposed))
            out[Method::Proposed] =
                quantize_display(apply_hue_correction(fused, hdr->image, cfg.hue_domain, cfg.gamma));
    }
    return out;
}

std::vector<EvalRow> evaluate_scene(const std::string& name, const RgbImage& hdr, const EvalConfig& cfg) {
    std::vector<EvalRow> rows;
    for (const auto& cond : cfg.conditions) {
        SynthConfig sc = cfg.synth;
        sc.ev_list = cond.ev;
        const ExposureStack stack = generate_stack(hdr, sc);
        MetricsConfig mc;
        mc.gamma = sc.gamma;
        mc.key = sc.key;
        const auto outputs = render_methods(stack, cfg.methods, cfg.pipeline);
        for (Method m : cfg.methods) rows.push_back({name, cond.name, to_string(m), evaluate(outputs.at(m), hdr, mc)});
    }
    return rows;
}

EvalResult run_eval(const std::vector<NamedHdr>& corpus, const EvalConfig& cfg) {
    std::vector<const NamedHdr*> order;
    for (const auto& s : corpus) order.push_back(&s);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->name < b->name; });

    EvalResult res;
    for (const auto& cond : cfg.conditions) {
        EvalConfig one = cfg;
        one.conditions = {cond};
        for (const NamedHdr* s : order) {
            try {
                auto rows = evaluate_scene(s->name, s->image, one);
                res.rows.insert(res.rows.end(), rows.begin(), rows.end());
            } catch (const std::exception& e) {
                res.failures.push_back({s->name, cond.name, e.what()});
            }
        }
    }
    return res;
}

namespace {

void put(std::ostream& os, double v) { os << std::setprecision(10) << v; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

const char* const kMetricNames[] = {"mean_dh", "tmqi_q", "tmqi_s", "tmqi_n"};

double metric(const MetricsReport& r, int i) {
    switch (i) {
        case 0: return r.mean_dh;
        case 1: return r.tmqi_q;
        case 2: return r.tmqi_s;
        default: return r.tmqi_n;
    }
}

}  // namespace

void write_report_csv(std::ostream& os, const std::vector<EvalRow>& rows, const std::string& condition) {
    os << "image,method,mean_dh,tmqi_q,tmqi_s,tmqi_n\n";
    for (const auto& r : rows) {
        if (r.condition != condition) continue;
        os << csv_field(r.image) << ',' << r.method;
        for (int i = 0; i < 4; ++i) {
            os << ',';
            put(os, metric(r.metrics, i));
        }
        os << '\n';
    }
}

void write_long_csv(std::ostream& os, const std::vector<EvalRow>& rows) {
    os << "image,condition,method,metric,value\n";
    for (const auto& r : rows)
        for (int i = 0; i < 4; ++i) {
            os << csv_field(r.image) << ',' << csv_field(r.condition) << ',' << r.method << ',' << kMetricNames[i]
               << ',';
            put(os, metric(r.metrics, i));
            os << '\n';
        }
}

BoxStats box_stats(std::vector<double> v) {
    BoxStats b;
    b.n = v.size();
    if (v.empty()) return b;
    std::sort(v.begin(), v.end());
    auto quantile = [&](double p) {
        const double h = p * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    b.min = v.front();
    b.max = v.back();
    b.q1 = quantile(0.25);
    b.median = quantile(0.5);
    b.q3 = quantile(0.75);
    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr, hi_fence = b.q3 + 1.5 * iqr;
    b.whisker_low = *std::find_if(v.begin(), v.end(), [&](double x) { return x >= lo_fence; });
    b.whisker_high = *std::find_if(v.rbegin(), v.rend(), [&](double x) { return x <= hi_fence; });
    double sum = 0.0;
    for (double x : v) sum += x;
    b.mean = sum / static_cast<double>(v.size());
    return b;
}

void write_summary_csv(std::ostream& os, const std::vector<EvalRow>& rows, const std::vector<EvalCondition>& conds,
                       const std::vector<Method>& methods) {
    os << "condition,method,metric,n,min,whisker_low,q1,median,q3,whisker_high,max,mean\n";
    for (const auto& c : conds)
        for (Method m : methods)
            for (int i = 0; i < 4; ++i) {
                std::vector<double> vals;
                for (const auto& r : rows)
                    if (r.condition == c.name && r.method == to_string(m)) vals.push_back(metric(r.metrics, i));
                const BoxStats b = box_stats(vals);
                os << csv_field(c.name) << ',' << to_string(m) << ',' << kMetricNames[i] << ',' << b.n;
                for (double x : {b.min, b.whisker_low, b.q1, b.median, b.q3, b.whisker_high, b.max, b.mean}) {
                    os << ',';
                    put(os, x);
                }
                os << '\n';
            }
}

}  // namespace huefuse
