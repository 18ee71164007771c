#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "huefuse/fusion.hpp"
#include "huefuse/metrics.hpp"
#include "huefuse/response.hpp"
#include "huefuse/ssla.hpp"
#include "huefuse/synth.hpp"

namespace huefuse {

enum class CrfMethod { Mitsunaga, Debevec };

/// Where the hue substitution happens. Display applies it to the fused
/// pixel values as they are; Linear decodes the fused image with `gamma`
/// first and re-encodes afterwards.
enum class HueDomain { Display, Linear };

CrfMethod parse_crf_method(const std::string& name);
std::string to_string(CrfMethod m);

struct PipelineConfig {
    bool use_ssla = true;
    SslaConfig ssla;
    FusionConfig fusion;
    CrfMethod crf = CrfMethod::Mitsunaga;
    MitsunagaConfig mitsunaga;
    DebevecConfig debevec;
    HueDomain hue_domain = HueDomain::Display;
    double gamma = 2.2;  // display encoding for the linear hue domain and the tone-map baseline
};

/// key=value settings (one per line, '#' comments). Unknown keys throw.
using Settings = std::map<std::string, std::string>;
Settings read_settings(const std::string& path);
Settings parse_settings(std::istream& is);
void apply_settings(const Settings& s, PipelineConfig& cfg);

/// Hue correction of a display-referred fused image in the configured domain.
RgbImage apply_hue_correction(const RgbImage& fused, const RgbImage& hdr, HueDomain domain, double gamma);

ResponseCurve estimate_crf(const ExposureStack& stack, const PipelineConfig& cfg);

struct PipelineResult {
    RgbImage fused;      // MEF output (SSLA + Mertens, or plain Mertens)
    RgbImage corrected;  // hue-corrected fused image
    ResponseCurve curve;
    RadianceMap hdr;
    std::optional<AdjustedSet> adjusted;
};

/// Fuse, estimate the response, merge the radiance map, correct hue.
PipelineResult run_pipeline(const ExposureStack& stack, const PipelineConfig& cfg = {});

/// Global photographic operator: key-scale the whole radiance map, apply
/// t/(1+t)(1+t/l^2) to luminance with l its maximum, rescale RGB by the
/// luminance ratio, encode with 1/gamma. A stand-in baseline only; this is
/// not a gradient-domain operator.
RgbImage tone_map_global(const RgbImage& hdr, double key = 0.18, double gamma = 2.2);

/// round(x*255)/255 per channel, as written to an 8-bit PNG.
RgbImage quantize_display(const RgbImage& img);

// ------------------------------------------------------------ evaluation

enum class Method { Mertens, TmGlobal, SslaOnly, Proposed };
std::string to_string(Method m);
Method parse_method(const std::string& name);
inline const std::vector<Method>& all_methods() {
    static const std::vector<Method> m{Method::Mertens, Method::TmGlobal, Method::SslaOnly, Method::Proposed};
    return m;
}

struct EvalCondition {
    std::string name;
    std::vector<double> ev;
};
/// {-4,-2,0,2,4}, {-4,-2,0} and {0,2,4}.
std::vector<EvalCondition> default_conditions();
EvalCondition parse_condition(const std::string& ev_csv);

struct EvalConfig {
    std::vector<EvalCondition> conditions = default_conditions();
    std::vector<Method> methods = all_methods();
    PipelineConfig pipeline;
    SynthConfig synth;  // ev_list is taken from each condition
};

struct EvalRow {
    std::string image;
    std::string condition;
    std::string method;
    MetricsReport metrics;
};

/// Every method's output for one scene under one condition, 8-bit quantized.
std::map<Method, RgbImage> render_methods(const ExposureStack& stack, const std::vector<Method>& methods,
                                          const PipelineConfig& cfg);

std::vector<EvalRow> evaluate_scene(const std::string& name, const RgbImage& hdr, const EvalConfig& cfg);

struct EvalFailure {
    std::string image;
    std::string condition;
    std::string message;
};

struct EvalResult {
    std::vector<EvalRow> rows;  // sorted by condition order, image, method order
    std::vector<EvalFailure> failures;
};

struct NamedHdr {
    std::string name;
    RgbImage image;
};

/// Failures are recorded per (image, condition) and skipped.
EvalResult run_eval(const std::vector<NamedHdr>& corpus, const EvalConfig& cfg);

/// `image,method,mean_dh,tmqi_q,tmqi_s,tmqi_n` for one condition.
void write_report_csv(std::ostream& os, const std::vector<EvalRow>& rows, const std::string& condition);
/// `image,condition,method,metric,value`.
void write_long_csv(std::ostream& os, const std::vector<EvalRow>& rows);

/// Box-plot statistics: quartiles by linear interpolation, whiskers at the
/// most extreme samples within [Q1 - 1.5 IQR, Q3 + 1.5 IQR].
struct BoxStats {
    std::size_t n = 0;
    double min = 0, whisker_low = 0, q1 = 0, median = 0, q3 = 0, whisker_high = 0, max = 0, mean = 0;
};
BoxStats box_stats(std::vector<double> values);

/// `condition,method,metric,n,min,whisker_low,q1,median,q3,whisker_high,max,mean`.
void write_summary_csv(std::ostream& os, const std::vector<EvalRow>& rows, const std::vector<EvalCondition>& conds,
                       const std::vector<Method>& methods);

}  // namespace huefuse
