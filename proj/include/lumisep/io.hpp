#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lumisep/apps.hpp"
#include "lumisep/synth.hpp"

namespace lumisep {

namespace fs = std::filesystem;

// --- PFM -------------------------------------------------------------------

/// Reads a color ("PF") PFM. A negative scale means little-endian samples.
/// Rows are stored bottom-up on disk and returned top-down.
LinearImage read_pfm(const fs::path& path);
/// Writes a little-endian color PFM of 32-bit floats.
void write_pfm(const LinearImage& image, const fs::path& path);
void write_pfm(const Field<Vec3>& field, const fs::path& path);
void write_pfm(const Field<double>& field, const fs::path& path);  // replicated to three channels
Field<Vec3> read_pfm_vectors(const fs::path& path);

// --- previews --------------------------------------------------------------

/// IEC 61966-2-1 encoding of a linear value in [0, 1].
double srgb_encode(double linear);
/// clamp(v·exposure, 0, 1) → sRGB → round to 8 bits.
std::uint8_t preview_byte(double value, double exposure);
void write_preview_png(const LinearImage& image, const fs::path& path, double exposure);
/// Normal map preview with (n + 1)/2 in each channel; masked pixels black.
void write_normals_png(const Field<Vec3>& normals, const Mask& mask, const fs::path& path);

// --- spectra ---------------------------------------------------------------

SpectralCurve read_spectrum_csv(const fs::path& path);
void write_spectrum_csv(const SpectralCurve& curve, const fs::path& path);
/// All *.csv files in a directory, in file-name order.
std::vector<SpectralCurve> read_spectrum_database(const fs::path& dir);
CameraResponse read_response_csv(const fs::path& path);
void write_response_csv(const CameraResponse& response, const fs::path& path);
/// `wavelength_nm,b1,b2,b3` plus a sidecar `<stem>.json` holding role and weight.
void write_basis(const SpectralBasis& basis, const fs::path& csv_path);
SpectralBasis read_basis(const fs::path& csv_path);

/// Bundled sample data: LUMISEP_DATA_DIR if set, otherwise the source tree's data/.
fs::path data_dir();
/// Shipped response and bases learned from the bundled databases.
SpectralModel load_default_model();
SpectralModel load_model(const fs::path& response_csv, const fs::path& refl_basis_csv,
                         const fs::path& illum_basis_csv);

// --- JSON ------------------------------------------------------------------

nlohmann::json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const nlohmann::json& j);

/// `{"n": 2, "coefficients": [[...],[...]], "method": "ransac-arc", "seed": 7}`
nlohmann::json lights_to_json(const LightEstimate& lights);
LightEstimate lights_from_json(const nlohmann::json& j);

/// `{"lights": [{"mu": 1.0, "coefficients": [..]}, ...]}`
RelightEdit edit_from_json(const nlohmann::json& j);
nlohmann::json edit_to_json(const RelightEdit& edit);

nlohmann::json read_json(const fs::path& path);
void write_json(const nlohmann::json& j, const fs::path& path);

// --- relight bundle ("lsrb-1") ---------------------------------------------

inline constexpr const char* kBundleFormat = "lsrb-1";

void write_bundle(const RelightBundle& bundle, const fs::path& dir);
/// Streams the mixing matrices to disk one row at a time.
void write_bundle(const AlphaField& alpha, const GammaField& gamma, const ShadingField& shading,
                  const LightEstimate& lights, const CouplingTensor& coupling, const fs::path& dir);
RelightBundle read_bundle(const fs::path& dir);

// --- scenes ----------------------------------------------------------------

void write_scene(const SceneSpec& scene, const fs::path& dir);
SceneSpec read_scene(const fs::path& dir);

}  // namespace lumisep
