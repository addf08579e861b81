#include "lumisep/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <png.h>

namespace lumisep {

namespace {

float to_little_endian(float v)
{
    if constexpr (std::endian::native == std::endian::big) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        bits = __builtin_bswap32(bits);
        std::memcpy(&v, &bits, 4);
    }
    return v;
}

float swap_float(float v)
{
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    bits = __builtin_bswap32(bits);
    std::memcpy(&v, &bits, 4);
    return v;
}

std::ofstream open_out(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    return out;
}

std::ifstream open_in(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    return in;
}

struct RawPfm {
    int width = 0;
    int height = 0;
    std::vector<double> rgb;  // top-down, interleaved
};

void write_pfm_raw(int width, int height, const std::vector<double>& rgb, const fs::path& path)
{
    auto out = open_out(path);
    out << "PF\n" << width << ' ' << height << "\n-1.0\n";
    std::vector<float> row(static_cast<std::size_t>(width) * 3);
    for (int y = height - 1; y >= 0; --y) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            row[i] = to_little_endian(static_cast<float>(rgb[static_cast<std::size_t>(y) * width * 3 + i]));
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
    }
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

std::string read_token(std::istream& in)
{
    std::string tok;
    int c = in.get();
    while (c != EOF && std::isspace(c)) c = in.get();
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    // The single whitespace after the token has been consumed.
    return tok;
}

RawPfm read_pfm_raw(const fs::path& path)
{
    auto in = open_in(path);
    const std::string magic = read_token(in);
    if (magic != "PF") throw Error(ErrorCode::MalformedHeader, path.string() + ": expected color PFM 'PF'");
    RawPfm pfm;
    double scale = 0.0;
    try {
        std::size_t used = 0;
        const std::string ws = read_token(in);
        pfm.width = std::stoi(ws, &used);
        if (used != ws.size()) throw std::invalid_argument(ws);
        const std::string hs = read_token(in);
        pfm.height = std::stoi(hs, &used);
        if (used != hs.size()) throw std::invalid_argument(hs);
        const std::string ss = read_token(in);
        scale = std::stod(ss, &used);
        if (used != ss.size()) throw std::invalid_argument(ss);
    } catch (const std::exception&) {
        throw Error(ErrorCode::MalformedHeader, path.string() + ": bad PFM dimensions or scale");
    }
    if (pfm.width <= 0 || pfm.height <= 0 || scale == 0.0 || !std::isfinite(scale)) {
        throw Error(ErrorCode::MalformedHeader, path.string() + ": bad PFM dimensions or scale");
    }
    const bool little = scale < 0;
    const bool swap = little != (std::endian::native == std::endian::little);
    const std::size_t count = static_cast<std::size_t>(pfm.width) * pfm.height * 3;
    std::vector<float> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * 4));
    if (static_cast<std::size_t>(in.gcount()) != count * 4) {
        throw Error(ErrorCode::TruncatedData, path.string() + ": PFM pixel data is truncated");
    }
    pfm.rgb.resize(count);
    const std::size_t stride = static_cast<std::size_t>(pfm.width) * 3;
    for (int y = 0; y < pfm.height; ++y) {
        const std::size_t src = static_cast<std::size_t>(pfm.height - 1 - y) * stride;
        for (std::size_t i = 0; i < stride; ++i) {
            const float v = swap ? swap_float(raw[src + i]) : raw[src + i];
            pfm.rgb[static_cast<std::size_t>(y) * stride + i] = v;
        }
    }
    return pfm;
}

}  // namespace

LinearImage read_pfm(const fs::path& path)
{
    RawPfm raw = read_pfm_raw(path);
    LinearImage img(raw.width, raw.height);
    img.data() = std::move(raw.rgb);
    return img;
}

void write_pfm(const LinearImage& image, const fs::path& path)
{
    write_pfm_raw(image.width(), image.height(), image.data(), path);
}

void write_pfm(const Field<Vec3>& field, const fs::path& path)
{
    std::vector<double> rgb(field.size() * 3);
    for (std::size_t i = 0; i < field.size(); ++i) {
        for (int c = 0; c < 3; ++c) rgb[3 * i + c] = field[i][c];
    }
    write_pfm_raw(field.width, field.height, rgb, path);
}

void write_pfm(const Field<double>& field, const fs::path& path)
{
    std::vector<double> rgb(field.size() * 3);
    for (std::size_t i = 0; i < field.size(); ++i) rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = field[i];
    write_pfm_raw(field.width, field.height, rgb, path);
}

Field<Vec3> read_pfm_vectors(const fs::path& path)
{
    RawPfm raw = read_pfm_raw(path);
    Field<Vec3> out(raw.width, raw.height);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = Vec3(raw.rgb[3 * i], raw.rgb[3 * i + 1], raw.rgb[3 * i + 2]);
    return out;
}

double srgb_encode(double linear)
{
    if (linear <= 0.0031308) return 12.92 * linear;
    return 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

std::uint8_t preview_byte(double value, double exposure)
{
    const double v = std::clamp(value * exposure, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * srgb_encode(v)));
}

namespace {

void write_png_rgb8(int width, int height, const std::vector<std::uint8_t>& pixels, const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw Error(ErrorCode::Io, "cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw Error(ErrorCode::Io, "libpng failed writing " + path.string());
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_sRGB(png, info, PNG_sRGB_INTENT_PERCEPTUAL);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y) {
        png_write_row(png, const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * width * 3));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace

void write_preview_png(const LinearImage& image, const fs::path& path, double exposure)
{
    if (!(exposure > 0)) throw Error(ErrorCode::InvalidArgument, "exposure must be positive");
    std::vector<std::uint8_t> px(image.data().size());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = preview_byte(image.data()[i], exposure);
    write_png_rgb8(image.width(), image.height(), px, path);
}

void write_normals_png(const Field<Vec3>& normals, const Mask& mask, const fs::path& path)
{
    std::vector<std::uint8_t> px(normals.size() * 3, 0);
    for (std::size_t i = 0; i < normals.size(); ++i) {
        if (!mask[i]) continue;
        for (int c = 0; c < 3; ++c) {
            px[3 * i + c] = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(0.5 * (normals[i][c] + 1.0), 0.0, 1.0)));
        }
    }
    write_png_rgb8(normals.width, normals.height, px, path);
}

namespace {

std::vector<std::vector<double>> read_csv_columns(const fs::path& path, const std::vector<std::string>& header)
{
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::MalformedHeader, path.string() + ": empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    if (cols != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw Error(ErrorCode::MalformedHeader, path.string() + ": expected header '" + expected + "'");
    }
    std::vector<std::vector<double>> data(header.size());
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            if (c >= header.size()) throw Error(ErrorCode::MalformedHeader, path.string() + ": too many columns");
            try {
                data[c].push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw Error(ErrorCode::MalformedHeader, path.string() + ": bad number '" + cell + "'");
            }
            ++c;
        }
        if (c != header.size()) throw Error(ErrorCode::MalformedHeader, path.string() + ": missing columns");
    }
    return data;
}

void write_csv_columns(const fs::path& path, const std::vector<std::string>& header,
                       const std::vector<const std::vector<double>*>& columns)
{
    auto out = open_out(path);
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    out.precision(17);
    for (std::size_t r = 0; r < columns[0]->size(); ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << (*columns[c])[r];
        out << '\n';
    }
}

}  // namespace

SpectralCurve read_spectrum_csv(const fs::path& path)
{
    auto cols = read_csv_columns(path, {"wavelength_nm", "value"});
    return SpectralCurve(std::move(cols[0]), std::move(cols[1]));
}

void write_spectrum_csv(const SpectralCurve& curve, const fs::path& path)
{
    write_csv_columns(path, {"wavelength_nm", "value"}, {&curve.wavelengths(), &curve.values()});
}

std::vector<SpectralCurve> read_spectrum_database(const fs::path& dir)
{
    if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<SpectralCurve> out;
    for (const auto& f : files) out.push_back(read_spectrum_csv(f));
    return out;
}

CameraResponse read_response_csv(const fs::path& path)
{
    auto cols = read_csv_columns(path, {"wavelength_nm", "r", "g", "b"});
    return CameraResponse({SpectralCurve(cols[0], cols[1]), SpectralCurve(cols[0], cols[2]),
                           SpectralCurve(cols[0], cols[3])});
}

void write_response_csv(const CameraResponse& response, const fs::path& path)
{
    write_csv_columns(path, {"wavelength_nm", "r", "g", "b"},
                      {&response.grid(), &response.channels[0].values(), &response.channels[1].values(),
                       &response.channels[2].values()});
}

void write_basis(const SpectralBasis& basis, const fs::path& csv_path)
{
    write_csv_columns(csv_path, {"wavelength_nm", "b1", "b2", "b3"},
                      {&basis.grid(), &basis.vectors[0].values(), &basis.vectors[1].values(),
                       &basis.vectors[2].values()});
    nlohmann::json side;
    side["role"] = role_name(basis.role);
    side["weight_provenance"] = basis.weight_provenance;
    side["weight"] = basis.weight.values();
    auto sidecar = csv_path;
    sidecar.replace_extension(".json");
    write_json(side, sidecar);
}

SpectralBasis read_basis(const fs::path& csv_path)
{
    auto cols = read_csv_columns(csv_path, {"wavelength_nm", "b1", "b2", "b3"});
    auto sidecar = csv_path;
    sidecar.replace_extension(".json");
    const auto side = read_json(sidecar);
    SpectralBasis basis;
    try {
        basis.role = parse_role(side.at("role").get<std::string>());
        basis.weight_provenance = side.value("weight_provenance", std::string{});
        basis.weight = SpectralCurve(cols[0], side.at("weight").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedHeader, sidecar.string() + ": " + e.what());
    }
    for (int i = 0; i < 3; ++i) basis.vectors[i] = SpectralCurve(cols[0], cols[i + 1]);
    return basis;
}

fs::path data_dir()
{
    if (const char* env = std::getenv("LUMISEP_DATA_DIR")) return fs::path(env);
    return fs::path(LUMISEP_DEFAULT_DATA_DIR);
}

SpectralModel load_default_model()
{
    const fs::path dir = data_dir();
    CameraResponse response = read_response_csv(dir / "response_default.csv");
    const auto refl_db = read_spectrum_database(dir / "reflectance");
    const auto illum_db = read_spectrum_database(dir / "illuminants");
    SpectralBasis refl = weighted_pca(refl_db, response, SpectralRole::Reflectance);
    SpectralBasis illum = weighted_pca(illum_db, response, SpectralRole::Illumination);
    return SpectralModel::from_bases(std::move(response), std::move(refl), std::move(illum));
}

SpectralModel load_model(const fs::path& response_csv, const fs::path& refl_basis_csv,
                         const fs::path& illum_basis_csv)
{
    CameraResponse response = read_response_csv(response_csv);
    SpectralBasis refl = read_basis(refl_basis_csv);
    SpectralBasis illum = read_basis(illum_basis_csv);
    if (refl.role != SpectralRole::Reflectance || illum.role != SpectralRole::Illumination) {
        throw Error(ErrorCode::InvalidArgument, "basis roles do not match their slots");
    }
    return SpectralModel::from_bases(std::move(response), std::move(refl), std::move(illum));
}

nlohmann::json vec_to_json(const Vec3& v) { return nlohmann::json::array({v[0], v[1], v[2]}); }

Vec3 vec_from_json(const nlohmann::json& j)
{
    if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::InvalidArgument, "expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json lights_to_json(const LightEstimate& lights)
{
    nlohmann::json j;
    j["n"] = lights.count();
    j["coefficients"] = nlohmann::json::array();
    for (const auto& b : lights.coefficients) j["coefficients"].push_back(vec_to_json(b));
    j["method"] = lights.method;
    if (lights.seed) j["seed"] = *lights.seed;
    return j;
}

LightEstimate lights_from_json(const nlohmann::json& j)
{
    LightEstimate est;
    try {
        for (const auto& c : j.at("coefficients")) est.coefficients.push_back(vec_from_json(c));
        est.method = j.value("method", std::string{});
        if (j.contains("seed") && !j["seed"].is_null()) est.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("n") && j["n"].get<int>() != est.count()) {
            throw Error(ErrorCode::CountMismatch, "'n' disagrees with the coefficient list");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("light estimate JSON: ") + e.what());
    }
    return est;
}

RelightEdit edit_from_json(const nlohmann::json& j)
{
    RelightEdit edit;
    try {
        for (const auto& l : j.at("lights")) {
            edit.push_back(LightEdit{l.value("mu", 1.0), vec_from_json(l.at("coefficients"))});
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("edit JSON: ") + e.what());
    }
    return edit;
}

nlohmann::json edit_to_json(const RelightEdit& edit)
{
    nlohmann::json j;
    j["lights"] = nlohmann::json::array();
    for (const auto& e : edit) j["lights"].push_back({{"mu", e.brightness}, {"coefficients", vec_to_json(e.coefficients)}});
    return j;
}

nlohmann::json read_json(const fs::path& path)
{
    auto in = open_in(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedHeader, path.string() + ": " + e.what());
    }
}

void write_json(const nlohmann::json& j, const fs::path& path)
{
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

namespace {

void write_bundle_manifest(int width, int height, const std::vector<Vec3>& lights, const fs::path& dir)
{
    nlohmann::json m;
    m["format"] = kBundleFormat;
    m["width"] = width;
    m["height"] = height;
    m["n"] = lights.size();
    m["lights"] = nlohmann::json::array();
    m["blobs"] = nlohmann::json::array();
    for (std::size_t j = 0; j < lights.size(); ++j) {
        m["lights"].push_back(vec_to_json(lights[j]));
        m["blobs"].push_back("light_" + std::to_string(j) + ".bin");
    }
    m["sample"] = "float32-le";
    m["layout"] = "row-major pixels, 9 values per pixel: M[0,0..2], M[1,0..2], M[2,0..2]";
    write_json(m, dir / "manifest.json");
}

void append_matrices(std::ofstream& out, const std::vector<Mat3>& row)
{
    std::vector<float> buf(row.size() * 9);
    for (std::size_t x = 0; x < row.size(); ++x) {
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) buf[x * 9 + r * 3 + c] = to_little_endian(static_cast<float>(row[x](r, c)));
        }
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
}

}  // namespace

void write_bundle(const RelightBundle& bundle, const fs::path& dir)
{
    fs::create_directories(dir);
    write_bundle_manifest(bundle.width, bundle.height, bundle.lights, dir);
    for (int j = 0; j < bundle.count(); ++j) {
        auto out = open_out(dir / ("light_" + std::to_string(j) + ".bin"));
        std::vector<Mat3> row(bundle.width);
        for (int y = 0; y < bundle.height; ++y) {
            for (int x = 0; x < bundle.width; ++x) row[x] = bundle.mixing[j].at(x, y);
            append_matrices(out, row);
        }
    }
}

void write_bundle(const AlphaField& alpha, const GammaField& gamma, const ShadingField& shading,
                  const LightEstimate& lights, const CouplingTensor& coupling, const fs::path& dir)
{
    fs::create_directories(dir);
    write_bundle_manifest(alpha.alpha.width, alpha.alpha.height, lights.coefficients, dir);
    std::vector<Mat3> row;
    for (int j = 0; j < lights.count(); ++j) {
        auto out = open_out(dir / ("light_" + std::to_string(j) + ".bin"));
        for (int y = 0; y < alpha.alpha.height; ++y) {
            relight_bundle_row(alpha, gamma, shading, lights, coupling, j, y, row);
            append_matrices(out, row);
        }
    }
}

RelightBundle read_bundle(const fs::path& dir)
{
    const auto m = read_json(dir / "manifest.json");
    RelightBundle bundle;
    std::vector<std::string> blobs;
    try {
        if (m.at("format").get<std::string>() != kBundleFormat) {
            throw Error(ErrorCode::MalformedHeader, "unsupported bundle format '" + m["format"].get<std::string>() + "'");
        }
        bundle.width = m.at("width").get<int>();
        bundle.height = m.at("height").get<int>();
        for (const auto& l : m.at("lights")) bundle.lights.push_back(vec_from_json(l));
        blobs = m.at("blobs").get<std::vector<std::string>>();
        if (m.at("n").get<std::size_t>() != bundle.lights.size() || blobs.size() != bundle.lights.size()) {
            throw Error(ErrorCode::CountMismatch, "bundle manifest light/blob counts disagree");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedHeader, std::string("bundle manifest: ") + e.what());
    }
    const std::size_t pixels = static_cast<std::size_t>(bundle.width) * bundle.height;
    for (const auto& name : blobs) {
        const fs::path blob = dir / name;
        if (!fs::exists(blob) || fs::file_size(blob) != pixels * 9 * 4) {
            throw Error(ErrorCode::TruncatedData, blob.string() + ": expected " + std::to_string(pixels * 36) + " bytes");
        }
        auto in = open_in(blob);
        std::vector<float> buf(pixels * 9);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
        Field<Mat3> field(bundle.width, bundle.height, Mat3::Zero());
        for (std::size_t p = 0; p < pixels; ++p) {
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) field[p](r, c) = to_little_endian(buf[p * 9 + r * 3 + c]);
            }
        }
        bundle.mixing.push_back(std::move(field));
    }
    return bundle;
}

void write_scene(const SceneSpec& scene, const fs::path& dir)
{
    scene.validate();
    fs::create_directories(dir);
    nlohmann::json j;
    j["width"] = scene.width;
    j["height"] = scene.height;
    j["lights"] = nlohmann::json::array();
    for (const auto& l : scene.lights) {
        j["lights"].push_back({{"direction", vec_to_json(l.direction)},
                               {"coefficients", vec_to_json(l.coefficients)},
                               {"intensity", l.intensity}});
    }
    j["flash"] = {{"mode", scene.flash.mode == FlashMode::Uniform ? "uniform" : "collocated-directional"},
                  {"intensity", scene.flash.intensity}};
    j["normals"] = "normals.pfm";
    j["reflectance"] = "reflectance.pfm";
    j["mask"] = "mask.pfm";
    j["occlusion"] = nlohmann::json::array();
    write_pfm(scene.normals, dir / "normals.pfm");
    write_pfm(scene.reflectance, dir / "reflectance.pfm");
    Field<double> mask(scene.width, scene.height, 0.0);
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = scene.mask[i] ? 1.0 : 0.0;
    write_pfm(mask, dir / "mask.pfm");
    for (std::size_t i = 0; i < scene.occlusion.size(); ++i) {
        const std::string name = "occlusion_" + std::to_string(i) + ".pfm";
        write_pfm(scene.occlusion[i], dir / name);
        j["occlusion"].push_back(name);
    }
    write_json(j, dir / "scene.json");
}

SceneSpec read_scene(const fs::path& dir)
{
    const auto j = read_json(dir / "scene.json");
    SceneSpec scene;
    try {
        scene.width = j.at("width").get<int>();
        scene.height = j.at("height").get<int>();
        for (const auto& l : j.at("lights")) {
            scene.lights.push_back(SceneLight{vec_from_json(l.at("direction")), vec_from_json(l.at("coefficients")),
                                              l.value("intensity", 1.0)});
        }
        const auto& flash = j.at("flash");
        const std::string mode = flash.value("mode", std::string("collocated-directional"));
        if (mode != "uniform" && mode != "collocated-directional") {
            throw Error(ErrorCode::InvalidArgument, "unknown flash mode '" + mode + "'");
        }
        scene.flash.mode = mode == "uniform" ? FlashMode::Uniform : FlashMode::CollocatedDirectional;
        scene.flash.intensity = flash.value("intensity", 1.0);
        scene.normals = read_pfm_vectors(dir / j.at("normals").get<std::string>());
        // PFM stores float32; re-normalize so the unit-norm invariant holds in double precision.
        for (auto& n : scene.normals.values) {
            if (n.norm() > 0) n.normalize();
        }
        scene.reflectance = read_pfm_vectors(dir / j.at("reflectance").get<std::string>());
        const auto mask = read_pfm_vectors(dir / j.at("mask").get<std::string>());
        scene.mask = Mask(mask.width, mask.height, 0);
        for (std::size_t i = 0; i < mask.size(); ++i) scene.mask[i] = mask[i][0] > 0.5 ? 1 : 0;
        for (const auto& name : j.at("occlusion")) {
            const auto occ = read_pfm_vectors(dir / name.get<std::string>());
            Field<double> f(occ.width, occ.height, 0.0);
            for (std::size_t i = 0; i < f.size(); ++i) f[i] = occ[i][0];
            scene.occlusion.push_back(std::move(f));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedHeader, std::string("scene.json: ") + e.what());
    }
    for (auto& l : scene.lights) {
        l.direction.normalize();
        l.coefficients.normalize();
    }
    scene.validate();
    return scene;
}

}  // namespace lumisep
