#include "qus/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "qus/burr.hpp"
#include "qus/detail/fft.hpp"
#include "qus/detail/parallel.hpp"
#include "qus/error.hpp"
#include "qus/frame_io.hpp"
#include "qus/hscan.hpp"
#include "qus/random.hpp"

namespace qus {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Band-limited complex Gaussian speckle with E|z|^2 = 2, so |z| is Rayleigh
// with unit scale and exp(-|z|^2 / 2) is uniform on (0, 1].
class SpeckleField {
public:
    SpeckleField(std::size_t n, double fs_hz, double bandwidth_hz) : plan_(n), shape_(n), buf_(n) {
        double power = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double f = detail::bin_frequency(k, n, fs_hz);
            shape_[k] = std::exp(-f * f / (2.0 * bandwidth_hz * bandwidth_hz));
            power += shape_[k] * shape_[k];
        }
        const double scale = std::sqrt(static_cast<double>(n) / power);
        for (auto& h : shape_) {
            h *= scale;
        }
    }

    const std::vector<detail::cplx>& draw(Rng& rng) {
        for (auto& v : buf_) {
            const double re = rng.normal();
            const double im = rng.normal();
            v = {re, im};
        }
        plan_.forward(buf_);
        for (std::size_t k = 0; k < buf_.size(); ++k) {
            buf_[k] *= shape_[k];
        }
        plan_.inverse(buf_);
        return buf_;
    }

private:
    detail::FftPlan plan_;
    std::vector<double> shape_;
    std::vector<detail::cplx> buf_;
};

json spec_to_json(const LesionSpec& s) {
    return {
        {"label", to_string(s.label)},
        {"center_line", s.center_line},
        {"center_sample", s.center_sample},
        {"semi_axis_lines", s.semi_axis_lines},
        {"semi_axis_samples", s.semi_axis_samples},
        {"roughness_amp", s.roughness_amp},
        {"roughness_lobes", s.roughness_lobes},
        {"roughness_phase", s.roughness_phase},
        {"scatterer_freq_hz", s.scatterer_freq_hz},
        {"burr_lambda", s.burr_lambda},
        {"burr_b", s.burr_b},
        {"contrast_db", s.contrast_db},
    };
}

LesionSpec spec_from_json(const json& j) {
    LesionSpec s;
    s.label = parse_label(j.at("label").get<std::string>());
    s.center_line = j.at("center_line").get<double>();
    s.center_sample = j.at("center_sample").get<double>();
    s.semi_axis_lines = j.at("semi_axis_lines").get<double>();
    s.semi_axis_samples = j.at("semi_axis_samples").get<double>();
    s.roughness_amp = j.at("roughness_amp").get<double>();
    s.roughness_lobes = j.at("roughness_lobes").get<int>();
    s.roughness_phase = j.at("roughness_phase").get<double>();
    s.scatterer_freq_hz = j.at("scatterer_freq_hz").get<double>();
    s.burr_lambda = j.at("burr_lambda").get<double>();
    s.burr_b = j.at("burr_b").get<double>();
    s.contrast_db = j.at("contrast_db").get<double>();
    return s;
}

double blend(double own, double other, double pull) {
    return own + pull * (other - own);
}

}  // namespace

std::string_view to_string(Label label) {
    return label == Label::benign ? "benign" : "malignant";
}

std::string_view to_string(Category category) {
    switch (category) {
        case Category::major: return "major";
        case Category::common: return "common";
        case Category::uncommon: return "uncommon";
    }
    return "major";
}

Label parse_label(std::string_view text) {
    if (text == "benign") {
        return Label::benign;
    }
    if (text == "malignant") {
        return Label::malignant;
    }
    fail(ErrorCode::invalid_argument, "unknown label '" + std::string(text) + "'");
}

Category parse_category(std::string_view text) {
    if (text == "major") {
        return Category::major;
    }
    if (text == "common") {
        return Category::common;
    }
    if (text == "uncommon") {
        return Category::uncommon;
    }
    fail(ErrorCode::invalid_argument, "unknown category '" + std::string(text) + "'");
}

void LesionSpec::validate() const {
    require(semi_axis_lines > 0.0 && semi_axis_samples > 0.0, ErrorCode::invalid_argument,
            "lesion axes must be positive");
    require(roughness_amp >= 0.0 && roughness_amp <= 0.5, ErrorCode::invalid_argument,
            "roughness_amp must be in [0, 0.5]");
    require(roughness_lobes >= 3, ErrorCode::invalid_argument, "roughness_lobes must be >= 3");
    require(scatterer_freq_hz > 0.0, ErrorCode::invalid_argument, "scatterer frequency must be positive");
    require(burr_lambda > 0.0, ErrorCode::invalid_argument, "burr_lambda must be positive");
    require(burr_b > 1.0, ErrorCode::non_normalizable_burr, "non-normalizable Burr exponent: b must exceed 1");
}

std::vector<double> sample_burr(double lambda, double b, std::size_t n, std::uint64_t seed) {
    require(lambda > 0.0, ErrorCode::invalid_argument, "Burr lambda must be positive");
    require(b > 1.0, ErrorCode::non_normalizable_burr, "non-normalizable Burr exponent: b must exceed 1");
    require(n >= 1, ErrorCode::invalid_argument, "need at least one sample");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& a : out) {
        a = burr_quantile(rng.uniform(), lambda, b);
    }
    return out;
}

BinaryImage rasterize_lesion(const LesionSpec& spec, std::size_t n_lines, std::size_t n_depth) {
    spec.validate();
    const double reach = 1.0 + spec.roughness_amp;
    const double l_lo = spec.center_line - spec.semi_axis_lines * reach;
    const double l_hi = spec.center_line + spec.semi_axis_lines * reach;
    const double s_lo = spec.center_sample - spec.semi_axis_samples * reach;
    const double s_hi = spec.center_sample + spec.semi_axis_samples * reach;
    require(l_lo >= 0.0 && s_lo >= 0.0 && l_hi <= static_cast<double>(n_lines - 1) &&
                s_hi <= static_cast<double>(n_depth - 1),
            ErrorCode::lesion_out_of_bounds, "lesion out of bounds");

    BinaryImage bits(n_lines, n_depth, 0);
    const auto l0 = static_cast<std::size_t>(std::floor(l_lo));
    const auto l1 = static_cast<std::size_t>(std::ceil(l_hi));
    const auto s0 = static_cast<std::size_t>(std::floor(s_lo));
    const auto s1 = static_cast<std::size_t>(std::ceil(s_hi));
    for (std::size_t l = l0; l <= l1; ++l) {
        for (std::size_t s = s0; s <= s1; ++s) {
            const double u = (static_cast<double>(l) - spec.center_line) / spec.semi_axis_lines;
            const double v = (static_cast<double>(s) - spec.center_sample) / spec.semi_axis_samples;
            const double rho = std::hypot(u, v);
            const double theta = std::atan2(v, u);
            const double edge =
                1.0 + spec.roughness_amp * std::sin(spec.roughness_lobes * theta + spec.roughness_phase);
            bits(l, s) = rho <= edge ? 1 : 0;
        }
    }
    bits = largest_component(bits);
    require(count_set(bits) > 0, ErrorCode::empty_mask, "lesion rasterized to an empty mask");
    return bits;
}

PhantomFrame synth_lesion_frame(const LesionSpec& spec, const PhantomGeometry& pg, double alpha_db_mhz_cm,
                                std::uint64_t seed) {
    spec.validate();
    const auto& g = pg.geometry;
    require(pg.n_depth >= kMinDepthSamples && pg.n_lines >= 1, ErrorCode::invalid_argument,
            "phantom frame too small");
    require(g.fs_hz > 2.0 * g.f0_hz && g.fs_hz > 2.0 * spec.scatterer_freq_hz, ErrorCode::undersampled_frame,
            "undersampled frame: fs must exceed twice every carrier");
    require(pg.background_b > 1.0, ErrorCode::non_normalizable_burr, "background Burr b must exceed 1");

    auto mask = LesionMask::from_bits(rasterize_lesion(spec, pg.n_lines, pg.n_depth), g.axial_spacing_m,
                                      g.lateral_spacing_m);

    RfFrame rf{Grid<double>(pg.n_lines, pg.n_depth, 0.0), g};
    Rng rng(seed);
    SpeckleField field(pg.n_depth, g.fs_hz, pg.speckle_bandwidth_hz);
    const double lesion_lambda = spec.burr_lambda * std::pow(10.0, spec.contrast_db / 20.0);
    const double w_bg = 2.0 * std::numbers::pi * g.f0_hz / g.fs_hz;
    const double w_lesion = 2.0 * std::numbers::pi * spec.scatterer_freq_hz / g.fs_hz;

    std::vector<detail::cplx> background(pg.n_depth);
    for (std::size_t l = 0; l < pg.n_lines; ++l) {
        background = field.draw(rng);
        const auto& lesion = field.draw(rng);
        auto line = rf.samples.line(l);
        for (std::size_t s = 0; s < pg.n_depth; ++s) {
            const bool inside = mask.contains(l, s);
            const auto& z = inside ? lesion[s] : background[s];
            const double u = std::exp(-0.5 * std::norm(z));
            const double amp = inside ? burr_quantile(u, lesion_lambda, spec.burr_b)
                                      : burr_quantile(u, pg.background_lambda, pg.background_b);
            const double w = inside ? w_lesion : w_bg;
            line[s] = amp * std::cos(w * static_cast<double>(s) + std::arg(z));
        }
    }

    if (alpha_db_mhz_cm > 0.0) {
        rf = apply_attenuation(rf, {alpha_db_mhz_cm, pg.attenuation_zones, g.f0_hz});
    }
    for (auto& v : rf.samples.data()) {
        v = static_cast<double>(static_cast<float>(v));
    }
    return {std::move(rf), std::move(mask)};
}

void CohortConfig::validate() const {
    require(n_benign + n_malignant >= 1, ErrorCode::config_error, "cohort needs at least one lesion");
    require(min_area_cm2 > 0.0 && min_area_cm2 <= max_area_cm2, ErrorCode::config_error,
            "need 0 < min_area_cm2 <= max_area_cm2");
    require(size_noise >= 0.0, ErrorCode::config_error, "size_noise must be >= 0");
    require(common_fraction >= 0.0 && uncommon_fraction >= 0.0 && common_fraction + uncommon_fraction <= 1.0,
            ErrorCode::config_error, "category fractions must be non-negative and sum to <= 1");
    require(alpha_db_mhz_cm >= 0.0, ErrorCode::config_error, "alpha must be >= 0");
}

std::vector<CohortEntry> plan_cohort(const CohortConfig& config, std::uint64_t seed) {
    config.validate();
    const auto& pg = config.geometry;
    const auto& g = pg.geometry;
    std::vector<CohortEntry> entries;

    auto make_entry = [&](Label label, std::size_t index) {
        CohortEntry e;
        e.id = std::string(label == Label::benign ? "b" : "m") + (index < 10 ? "00" : index < 100 ? "0" : "") +
               std::to_string(index);
        e.label = label;
        Rng rng(derive_seed(seed, hash_string(e.id)));

        const double u = rng.uniform();
        e.category = u < config.uncommon_fraction                            ? Category::uncommon
                     : u < config.uncommon_fraction + config.common_fraction ? Category::common
                                                                             : Category::major;
        const double pull = e.category == Category::major ? 0.0 : e.category == Category::common ? 0.25 : 0.5;

        const double area_cm2 = rng.uniform(config.min_area_cm2, config.max_area_cm2);
        const double aspect = rng.uniform(1.0, 1.6);
        const double noise = 1.0 + config.size_noise * 0.5 / area_cm2;

        const auto& own = label == Label::benign ? config.benign : config.malignant;
        const auto& other = label == Label::benign ? config.malignant : config.benign;
        const auto& jit = config.jitter;

        LesionSpec& s = e.truth;
        s.label = label;
        s.roughness_amp = std::clamp(
            blend(own.roughness_amp, other.roughness_amp, pull) + noise * jit.roughness_amp * rng.normal(), 0.0,
            0.45);
        s.roughness_lobes = static_cast<int>(rng.uniform_int(3, 7));
        s.roughness_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        s.scatterer_freq_hz =
            1e6 * std::clamp(blend(own.scatterer_freq_mhz, other.scatterer_freq_mhz, pull) +
                                 noise * jit.scatterer_freq_mhz * rng.normal(),
                             5.6, 12.0);
        s.burr_b = std::clamp(blend(own.burr_b, other.burr_b, pull) + noise * jit.burr_b * rng.normal(), 1.3, 20.0);
        s.contrast_db =
            blend(own.contrast_db, other.contrast_db, pull) + noise * jit.contrast_db * rng.normal();
        s.burr_lambda = 1.0;

        // physical semi-axes (m): width = aspect * height
        const double area_m2 = area_cm2 * 1e-4;
        const double half_height = std::sqrt(area_m2 / (std::numbers::pi * aspect));
        const double half_width = aspect * half_height;
        const double reach = 1.0 + s.roughness_amp;
        const double max_l = (static_cast<double>(pg.n_lines - 1) / 2.0 - 1.0) / reach;
        const double max_s = (static_cast<double>(pg.n_depth - 1) / 2.0 - 1.0) / reach;
        s.semi_axis_lines = std::min(half_width / g.lateral_spacing_m, max_l);
        s.semi_axis_samples = std::min(half_height / g.axial_spacing_m, max_s);

        const double slack_l = static_cast<double>(pg.n_lines - 1) / 2.0 - s.semi_axis_lines * reach - 1.0;
        const double slack_s = static_cast<double>(pg.n_depth - 1) / 2.0 - s.semi_axis_samples * reach - 1.0;
        s.center_line = static_cast<double>(pg.n_lines - 1) / 2.0 + rng.uniform(-0.5, 0.5) * slack_l;
        s.center_sample = static_cast<double>(pg.n_depth - 1) / 2.0 + rng.uniform(-0.5, 0.5) * slack_s;

        e.rf_path = e.id + ".rf";
        e.mask_path = e.id + ".pgm";
        return e;
    };

    for (std::size_t i = 0; i < config.n_benign; ++i) {
        entries.push_back(make_entry(Label::benign, i));
    }
    for (std::size_t i = 0; i < config.n_malignant; ++i) {
        entries.push_back(make_entry(Label::malignant, i));
    }
    return entries;
}

CohortManifest synth_cohort(const CohortConfig& config, std::uint64_t seed, const fs::path& out_dir,
                            std::size_t jobs) {
    CohortManifest manifest;
    manifest.seed = seed;
    manifest.directory = out_dir;
    manifest.entries = plan_cohort(config, seed);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    require(!ec && fs::is_directory(out_dir), ErrorCode::io_error,
            "cannot write cohort: " + out_dir.string());

    detail::parallel_for(manifest.entries.size(), jobs, [&](std::size_t i) {
        auto& e = manifest.entries[i];
        const auto frame = synth_lesion_frame(e.truth, config.geometry, config.alpha_db_mhz_cm,
                                              derive_seed(seed, hash_string(e.id) ^ 0xF7A3E5ull));
        e.area_cm2 = frame.mask.area_cm2();
        write_frame(frame.rf, out_dir / e.rf_path);
        write_mask(frame.mask.bits(), out_dir / e.mask_path);
    });
    write_manifest(manifest, out_dir / "manifest.jsonl");
    return manifest;
}

void write_manifest(const CohortManifest& manifest, const fs::path& path) {
    std::ostringstream os;
    for (const auto& e : manifest.entries) {
        json j = {
            {"schema", kCohortSchema},
            {"id", e.id},
            {"rf_path", e.rf_path},
            {"mask_path", e.mask_path},
            {"label", to_string(e.label)},
            {"category", to_string(e.category)},
            {"area_cm2", e.area_cm2},
            {"seed", manifest.seed},
            {"truth", spec_to_json(e.truth)},
        };
        os << j.dump() << '\n';
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::io_error, "cannot write cohort manifest " + path.string());
    out << os.str();
    require(static_cast<bool>(out), ErrorCode::io_error, "short write to " + path.string());
}

CohortManifest read_manifest(const fs::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::io_error, "cannot open manifest " + path.string());
    CohortManifest manifest;
    manifest.directory = path.parent_path();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const auto j = json::parse(line);
            require(j.value("schema", "") == kCohortSchema, ErrorCode::bad_schema,
                    "manifest line " + std::to_string(lineno) + " is not cohort-v1");
            CohortEntry e;
            e.id = j.at("id").get<std::string>();
            e.rf_path = j.at("rf_path").get<std::string>();
            e.mask_path = j.at("mask_path").get<std::string>();
            e.label = parse_label(j.at("label").get<std::string>());
            e.category = parse_category(j.value("category", "major"));
            e.area_cm2 = j.value("area_cm2", 0.0);
            manifest.seed = j.value("seed", std::uint64_t{0});
            if (j.contains("truth")) {
                e.truth = spec_from_json(j.at("truth"));
            }
            for (const auto& other : manifest.entries) {
                require(other.id != e.id, ErrorCode::bad_schema, "duplicate manifest id " + e.id);
            }
            manifest.entries.push_back(std::move(e));
        } catch (const json::exception& ex) {
            fail(ErrorCode::bad_schema, "malformed manifest line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return manifest;
}

}  // namespace qus
