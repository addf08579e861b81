#include "lumisep/cli.hpp"

#include <iostream>

#include <CLI11.hpp>

#include "lumisep/io.hpp"
#include "lumisep/pipeline.hpp"

namespace lumisep {

namespace {

struct ModelOptions {
    std::string response;
    std::string refl_basis;
    std::string illum_basis;

    void add(CLI::App* app)
    {
        app->add_option("--response", response, "camera response CSV (wavelength_nm,r,g,b)")->check(CLI::ExistingFile);
        app->add_option("--refl-basis", refl_basis, "reflectance basis CSV")->check(CLI::ExistingFile);
        app->add_option("--illum-basis", illum_basis, "illumination basis CSV")->check(CLI::ExistingFile);
    }

    SpectralModel load() const
    {
        const int given = !response.empty() + !refl_basis.empty() + !illum_basis.empty();
        if (given == 0) return load_default_model();
        if (given != 3) {
            throw Error(ErrorCode::InvalidArgument, "--response, --refl-basis and --illum-basis go together");
        }
        return load_model(response, refl_basis, illum_basis);
    }
};

struct SeparateOptions {
    std::string flash;
    std::string noflash;
    std::string pure_flash;
    std::string lights;
    std::string out;
    std::string bundle;
    double exposure = 1.0;
    bool unnormalized = false;
    PipelineConfig cfg;
    ModelOptions model;

    void add(CLI::App* app, bool needs_out)
    {
        app->add_option("--noflash", noflash, "no-flash image (PFM)")->required();
        app->add_option("--flash", flash, "flash image (PFM)");
        app->add_option("--pure-flash-image", pure_flash, "pure flash image used instead of flash − noflash");
        app->add_option("--n", cfg.n, "number of scene illuminants (1-3)")->required();
        app->add_option("--bins", cfg.bins, "histogram bins per axis");
        app->add_option("--min-bin-count", cfg.min_bin_count, "pixels a histogram bin needs to survive pruning");
        app->add_option("--inlier-deg", cfg.ransac.inlier_angle_deg, "RANSAC inlier angle in degrees");
        app->add_option("--iterations", cfg.ransac.iterations, "RANSAC iterations");
        app->add_option("--seed", cfg.ransac.seed, "RANSAC seed");
        app->add_option("--dark-threshold", cfg.dark_threshold, "fraction of the pure-flash max below which pixels are dropped");
        app->add_option("--cond-limit", cfg.cond_limit, "condition-number limit for the per-pixel β solve");
        model.add(app);
        auto* o = app->add_option("--out", out, needs_out ? "output directory" : "output JSON (stdout if omitted)");
        if (needs_out) o->required();
    }

    void inputs(LinearImage& nf, LinearImage& pf)
    {
        if (flash.empty() == pure_flash.empty()) {
            throw StageError("input", Error(ErrorCode::InvalidArgument, "give exactly one of --flash or --pure-flash-image"));
        }
        try {
            nf = read_pfm(noflash);
            if (!pure_flash.empty()) {
                pf = read_pfm(pure_flash);
                cfg.paths.pure_flash = pure_flash;
            } else {
                pf = lumisep::pure_flash(ImagePair(read_pfm(flash), nf));
            }
        } catch (const Error& e) {
            throw StageError("input", e);
        }
        cfg.paths.flash = flash;
        cfg.paths.noflash = noflash;
        cfg.paths.output = out;
        cfg.alpha_convention = unnormalized ? AlphaConvention::Unnormalized : AlphaConvention::Normalized;
    }
};

SpectralModel load_model_stage(const ModelOptions& m)
{
    try {
        return m.load();
    } catch (const Error& e) {
        throw StageError("model", e);
    }
}

void run_separate(SeparateOptions& o)
{
    LinearImage nf, pf;
    o.inputs(nf, pf);
    const SpectralModel model = load_model_stage(o.model);
    std::optional<LightEstimate> known;
    if (!o.lights.empty()) known = lights_from_json(read_json(o.lights));
    const auto result = run_pipeline(nf, pf, model, o.cfg, known);
    write_separation(result, model, o.cfg, o.exposure);
    if (!o.bundle.empty()) {
        write_bundle(result.alpha, result.gamma, result.separation.shading, result.separation.lights, model.coupling,
                     o.bundle);
    }
    std::cout << "separated " << result.separation.lights.count() << " layers into " << o.out << '\n';
}

void run_estimate(SeparateOptions& o)
{
    LinearImage nf, pf;
    o.inputs(nf, pf);
    const SpectralModel model = load_model_stage(o.model);
    const auto lights = estimate_from_images(nf, pf, model, o.cfg);
    const auto j = lights_to_json(lights);
    if (o.out.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json(j, o.out);
    }
}

struct RelightOptions {
    std::string bundle;
    std::string edit;
    std::string out;
    std::string png;
    double exposure = 1.0;
    ModelOptions model;
};

void write_image_outputs(const LinearImage& img, const RelightOptions& o)
{
    write_pfm(img, o.out);
    if (!o.png.empty()) write_preview_png(img, o.png, o.exposure);
}

struct PsOptions {
    std::vector<std::string> shading;
    std::string lights;
    std::string flash_shading;
    std::string out;
    double shadow_fraction = 0.01;
};

void run_ps(const PsOptions& o)
{
    const auto j = read_json(o.lights);
    std::vector<Vec3> dirs;
    PhotometricOptions opts;
    opts.shadow_fraction = o.shadow_fraction;
    try {
        for (const auto& d : j.at("directions")) dirs.push_back(vec_from_json(d).normalized());
        if (j.contains("intensities")) opts.intensities = j["intensities"].get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("light directions JSON: ") + e.what());
    }
    std::vector<Field<double>> maps;
    for (const auto& path : o.shading) {
        const auto v = read_pfm_vectors(path);
        Field<double> f(v.width, v.height, 0.0);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = v[i][0];
        maps.push_back(std::move(f));
    }
    if (!o.flash_shading.empty()) {
        const auto v = read_pfm_vectors(o.flash_shading);
        Field<double> f(v.width, v.height, 0.0);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = v[i][0];
        maps.push_back(std::move(f));
        dirs.push_back(Vec3::UnitZ());
        if (!opts.intensities.empty()) opts.intensities.push_back(1.0);
    }
    if (maps.size() != dirs.size()) throw Error(ErrorCode::CountMismatch, "one direction per shading map");
    const auto normals = photometric_stereo(maps, dirs, opts);
    std::filesystem::create_directories(o.out);
    write_pfm(normals.normals, std::filesystem::path(o.out) / "normals.pfm");
    write_pfm(normals.albedo, std::filesystem::path(o.out) / "albedo.pfm");
    write_normals_png(normals.normals, normals.mask, std::filesystem::path(o.out) / "normals.png");
}

struct SynthOptions {
    std::string kind = "pure";
    int n = 0;  // 0: 2 for pure scenes, 3 for the sphere
    double separation = 30.0;
    int size = 256;
    std::uint64_t seed = 1;
    double noise = 0.0;
    std::string out;
    ModelOptions model;
};

void run_synth(const SynthOptions& o)
{
    const SpectralModel model = load_model_stage(o.model);
    SceneSpec scene;
    const int n = o.n > 0 ? o.n : (o.kind == "pure" ? 2 : 3);
    if (o.kind == "pure") {
        scene = make_pure_pixel_scene(n, o.separation, o.size, o.seed, model);
    } else {
        std::vector<SceneLight> lights;
        const auto coeffs = place_coefficients(model.flash.f.normalized(), n, o.separation, 0.0);
        for (int i = 0; i < n; ++i) {
            const double az = 2.0 * M_PI * i / n;
            const double polar = 35.0 * M_PI / 180.0;
            lights.push_back({Vec3(std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az), std::cos(polar)),
                              coeffs[i], 1.0});
        }
        scene = make_sphere_scene(lights, 0.8, o.size, o.seed, model).scene;
    }
    const auto truth = render(scene, model);
    const std::filesystem::path out(o.out);
    write_scene(scene, out / "scene");
    if (o.noise > 0) {
        const auto noisy = add_noise(truth, o.noise, o.seed);
        write_pfm(noisy.flash, out / "flash.pfm");
        write_pfm(noisy.noflash, out / "noflash.pfm");
    } else {
        write_pfm(truth.flash, out / "flash.pfm");
        write_pfm(truth.noflash, out / "noflash.pfm");
    }
    for (std::size_t i = 0; i < truth.layers.size(); ++i) {
        write_pfm(truth.layers[i], out / ("truth_layer_" + std::to_string(i) + ".pfm"));
        write_pfm(truth.shading[i], out / ("truth_shading_" + std::to_string(i) + ".pfm"));
    }
    LightEstimate lights;
    lights.method = "ground-truth";
    nlohmann::json dirs = nlohmann::json::array();
    for (const auto& l : scene.lights) {
        lights.coefficients.push_back(l.coefficients);
        dirs.push_back(vec_to_json(l.direction));
    }
    write_json(lights_to_json(lights), out / "truth_lights.json");
    write_json({{"directions", dirs}}, out / "truth_directions.json");
}

int exit_code_for(ErrorCode code) { return is_estimation_failure(code) ? kExitEstimation : kExitInput; }

}  // namespace

int cli_main(int argc, char** argv)
{
    CLI::App app{"lumisep: flash/no-flash separation of mixed illumination"};
    app.require_subcommand(1);

    std::string db, role = "reflectance", basis_out;
    ModelOptions basis_model;
    auto* basis = app.add_subcommand("basis", "learn a 3-vector spectral basis from a CSV database");
    basis->add_option("--database", db, "directory of wavelength_nm,value CSVs")->required()->check(CLI::ExistingDirectory);
    basis->add_option("--role", role, "reflectance or illumination")->check(CLI::IsMember({"reflectance", "illumination"}));
    basis->add_option("--response", basis_model.response, "camera response CSV")->check(CLI::ExistingFile);
    basis->add_option("--out", basis_out, "output basis CSV (sidecar JSON written next to it)")->required();

    SeparateOptions sep;
    auto* separate = app.add_subcommand("separate", "separate a flash/no-flash pair into per-light layers");
    sep.add(separate, true);
    separate->add_option("--lights", sep.lights, "use these light coefficients instead of estimating them");
    separate->add_option("--bundle", sep.bundle, "also write a relight bundle to this directory");
    separate->add_option("--exposure", sep.exposure, "preview exposure")->check(CLI::PositiveNumber);
    separate->add_flag("--unnormalized-alpha", sep.unnormalized, "use the unnormalized α in the layer synthesis");

    SeparateOptions est;
    auto* estimate = app.add_subcommand("estimate-lights", "estimate illuminant coefficients only");
    est.add(estimate, false);

    SeparateOptions bun;
    auto* bundle = app.add_subcommand("bundle", "run the separation and write only the relight bundle");
    bun.add(bundle, true);
    bundle->add_option("--lights", bun.lights, "use these light coefficients instead of estimating them");

    RelightOptions rel;
    auto* relight_cmd = app.add_subcommand("relight", "recolor and rescale lights from a bundle");
    relight_cmd->add_option("--bundle", rel.bundle, "bundle directory")->required()->check(CLI::ExistingDirectory);
    relight_cmd->add_option("--edit", rel.edit, "edit JSON; identity if omitted")->check(CLI::ExistingFile);
    relight_cmd->add_option("--out", rel.out, "output PFM")->required();
    relight_cmd->add_option("--png", rel.png, "optional preview PNG");
    relight_cmd->add_option("--exposure", rel.exposure, "preview exposure")->check(CLI::PositiveNumber);

    RelightOptions wbo;
    auto* wb = app.add_subcommand("wb", "white balance every light to the flash spectrum");
    wb->add_option("--bundle", wbo.bundle, "bundle directory")->required()->check(CLI::ExistingDirectory);
    wb->add_option("--out", wbo.out, "output PFM")->required();
    wb->add_option("--png", wbo.png, "optional preview PNG");
    wb->add_option("--exposure", wbo.exposure, "preview exposure")->check(CLI::PositiveNumber);
    wbo.model.add(wb);

    PsOptions pso;
    auto* ps = app.add_subcommand("ps", "photometric stereo from per-light shading maps");
    ps->add_option("--shading", pso.shading, "shading PFMs, one per light")->required()->expected(1, -1);
    ps->add_option("--directions", pso.lights, "JSON with \"directions\" (and optional \"intensities\")")->required();
    ps->add_option("--flash-shading", pso.flash_shading, "flash shading PFM added as a light along +z");
    ps->add_option("--shadow-fraction", pso.shadow_fraction, "shadow threshold as a fraction of each map's max");
    ps->add_option("--out", pso.out, "output directory")->required();

    SynthOptions syn;
    auto* synth = app.add_subcommand("synth", "render a synthetic flash/no-flash scene with ground truth");
    synth->add_option("--kind", syn.kind, "pure or sphere")->check(CLI::IsMember({"pure", "sphere"}));
    synth->add_option("--n", syn.n, "number of lights (default 2 for pure, 3 for sphere)")->check(CLI::Range(1, 3));
    synth->add_option("--separation", syn.separation, "pairwise light-coefficient separation in degrees");
    synth->add_option("--size", syn.size, "image side in pixels")->check(CLI::PositiveNumber);
    synth->add_option("--seed", syn.seed, "scene seed");
    synth->add_option("--noise", syn.noise, "Gaussian noise sigma")->check(CLI::NonNegativeNumber);
    synth->add_option("--out", syn.out, "output directory")->required();
    syn.model.add(synth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*basis) {
            CameraResponse response = basis_model.response.empty()
                                          ? read_response_csv(data_dir() / "response_default.csv")
                                          : read_response_csv(basis_model.response);
            const auto curves = read_spectrum_database(db);
            write_basis(weighted_pca(curves, response, parse_role(role)), basis_out);
        } else if (*separate) {
            run_separate(sep);
        } else if (*estimate) {
            run_estimate(est);
        } else if (*bundle) {
            LinearImage nf, pf;
            bun.inputs(nf, pf);
            const SpectralModel model = load_model_stage(bun.model);
            std::optional<LightEstimate> known;
            if (!bun.lights.empty()) known = lights_from_json(read_json(bun.lights));
            const auto r = run_pipeline(nf, pf, model, bun.cfg, known);
            write_bundle(r.alpha, r.gamma, r.separation.shading, r.separation.lights, model.coupling, bun.out);
        } else if (*relight_cmd) {
            const auto b = read_bundle(rel.bundle);
            const RelightEdit edit = rel.edit.empty() ? identity_edit(b) : edit_from_json(read_json(rel.edit));
            write_image_outputs(relight(b, edit), rel);
        } else if (*wb) {
            const auto b = read_bundle(wbo.bundle);
            const SpectralModel model = load_model_stage(wbo.model);
            write_image_outputs(white_balance(b, model.flash), wbo);
        } else if (*ps) {
            run_ps(pso);
        } else if (*synth) {
            run_synth(syn);
        }
    } catch (const StageError& e) {
        std::cerr << "lumisep: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const Error& e) {
        std::cerr << "lumisep: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "lumisep: Io: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "lumisep: internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitOk;
}

}  // namespace lumisep
