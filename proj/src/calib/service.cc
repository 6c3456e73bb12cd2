#include "uqbench/calib/service.h"

#include <charconv>
#include <numeric>

#include "uqbench/core/digest.h"
#include "uqbench/core/jsonl.h"
#include "uqbench/core/random.h"
#include "uqbench/cross/mask_provider.h"
#include "uqbench/runner/apply.h"
#include "uqbench/visual/raster.h"

namespace uqbench::calib {
namespace fs = std::filesystem;

namespace {

ApiResult error(int status, const std::string& message, Json extra = Json::object()) {
  extra["error"] = message;
  return {status, extra};
}

template <typename T>
std::optional<T> parse_number(const std::string& s) {
  T v{};
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

std::string png_b64(const visual::RasterImage& img) {
  return base64_encode(visual::encode_png(img));
}

}  // namespace

std::vector<std::size_t> sample_indices(std::size_t size, std::size_t n,
                                        std::uint64_t seed) {
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  n = std::min(n, size);
  Rng rng(seed);
  // partial Fisher-Yates
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + rng.index(size - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return idx;
}

CalibService::CalibService(ServiceOptions options)
    : options_(std::move(options)), store_(options_.calibration) {
  for (const auto& [name, path] : options_.datasets) {
    Dataset d;
    d.instances = read_jsonl<VqaInstance>(path);
    for (std::size_t i = 0; i < d.instances.size(); ++i) {
      d.index.emplace(d.instances[i].id, i);
    }
    auto root = options_.image_roots.find(name);
    d.image_dir = root != options_.image_roots.end() ? root->second : path.parent_path();
    datasets_.emplace(name, std::move(d));
  }
}

const CalibService::Dataset* CalibService::find(const std::string& name) const {
  auto it = datasets_.find(name);
  return it == datasets_.end() ? nullptr : &it->second;
}

ApiResult CalibService::datasets() const {
  Json out = Json::array();
  for (const auto& [name, d] : datasets_) {
    out.push_back({{"name", name}, {"size", d.instances.size()}});
  }
  return {200, out};
}

ApiResult CalibService::samples(const std::string& dataset, const std::string& n_text,
                                const std::string& seed_text) const {
  const auto* d = find(dataset);
  if (!d) return error(404, "unknown dataset: " + dataset);
  const auto n = parse_number<long long>(n_text);
  if (!n || *n < 0) return error(400, "n must be a non-negative integer");
  std::uint64_t seed = 0;
  if (!seed_text.empty()) {
    const auto s = parse_number<std::uint64_t>(seed_text);
    if (!s) return error(400, "seed must be a non-negative integer");
    seed = *s;
  }
  const auto requested = static_cast<std::size_t>(*n);
  Json items = Json::array();
  for (auto i : sample_indices(d->instances.size(), requested, seed)) {
    const auto& inst = d->instances[i];
    Json item{{"instance_id", inst.id}, {"question", inst.question}};
    try {
      item["thumbnail_b64"] =
          png_b64(visual::thumbnail(visual::read_image(d->image_dir / inst.image_ref),
                                    kThumbnailSide));
    } catch (const std::exception&) {
      item["thumbnail_b64"] = nullptr;
    }
    items.push_back(std::move(item));
  }
  Json body{{"dataset", dataset}, {"seed", seed}, {"n", items.size()}, {"items", items}};
  if (requested > d->instances.size()) {
    body["warning"] = "requested " + std::to_string(requested) + " but dataset has " +
                      std::to_string(d->instances.size()) + "; clamped";
  }
  return {200, body};
}

ApiResult CalibService::preview(const Json& request) {
  if (!request.is_object()) return error(400, "body must be a JSON object");
  if (!request.contains("kind") || !request["kind"].is_string()) {
    return error(400, "missing kind");
  }
  const auto kind = parse_kind(request["kind"].get<std::string>());
  if (!kind) return error(400, "unknown kind: " + request["kind"].get<std::string>());
  if (!runner::is_deterministic(*kind)) {
    return error(409, "discrete perturbation types have no strength preview",
                 {{"reason", "discrete perturbation types"}});
  }
  if (!request.contains("strength") || !request["strength"].is_number()) {
    return error(400, "missing strength");
  }
  const double strength = request["strength"].get<double>();
  try {
    validate_strength(*kind, strength);
  } catch (const ParameterError& e) {
    return error(422, e.what(), {{"range", kind_info(*kind).range.describe()}});
  }
  std::uint64_t seed = 0;
  if (request.contains("seed")) {
    const auto& sj = request["seed"];
    if (!sj.is_number_integer() || (!sj.is_number_unsigned() && sj.get<long long>() < 0)) {
      return error(400, "seed must be a non-negative integer");
    }
    seed = request["seed"].get<std::uint64_t>();
  }
  if (!request.contains("instance_ids") || !request["instance_ids"].is_array()) {
    return error(400, "missing instance_ids");
  }
  const std::string dataset = request.value("dataset", std::string());

  Json out = Json::array();
  for (const auto& id_json : request["instance_ids"]) {
    if (!id_json.is_string()) return error(400, "instance_ids must be strings");
    const auto id = id_json.get<std::string>();
    const Dataset* d = nullptr;
    std::string dname;
    for (const auto& [name, candidate] : datasets_) {
      if ((dataset.empty() || name == dataset) && candidate.index.count(id)) {
        d = &candidate;
        dname = name;
        break;
      }
    }
    if (!d) return error(404, "unknown instance: " + id);
    const auto& inst = d->instances[d->index.at(id)];
    const auto key = sha256_hex(
        Json{dname, id, kind_name(*kind), strength, seed, options_.mask_sigma}.dump());
    {
      std::lock_guard lock(cache_mu_);
      if (auto it = cache_.find(key); it != cache_.end()) {
        out.push_back(it->second);
        continue;
      }
    }
    const auto path = d->image_dir / inst.image_ref;
    std::optional<std::vector<std::uint8_t>> bytes;
    std::optional<visual::RasterImage> image;
    auto need_image = [&]() -> const visual::RasterImage& {
      if (!bytes) bytes = visual::read_bytes(path);
      if (!image) image = visual::decode_image(*bytes);
      return *image;
    };
    Json item{{"instance_id", id}};
    try {
      const auto applied = runner::apply_deterministic(
          *kind, strength, derive_seed(seed, id, kind_name(*kind)), inst.question,
          need_image,
          [&] {
            cross::SidecarMaskProvider masks;
            return masks.relevance(id, path, *bytes, inst.question);
          },
          options_.mask_sigma);
      if (applied.image) item["image_b64"] = png_b64(*applied.image);
      if (applied.question) item["text"] = *applied.question;
    } catch (const std::exception& e) {
      return error(500, id + ": " + e.what());
    }
    {
      std::lock_guard lock(cache_mu_);
      cache_.emplace(key, item);
    }
    out.push_back(std::move(item));
  }
  return {200, out};
}

ApiResult CalibService::get_calibration() const { return {200, Json(store_.get())}; }

ApiResult CalibService::put_calibration(const Json& request) {
  const Json* entries = &request;
  if (request.is_object()) {
    if (!request.contains("entries")) return error(400, "missing entries");
    entries = &request["entries"];
  }
  if (!entries->is_array()) return error(400, "entries must be an array");
  std::vector<CalibrationEntry> parsed;
  for (const auto& e : *entries) {
    try {
      parsed.push_back(e.get<CalibrationEntry>());
    } catch (const ParameterError& ex) {
      Json extra = Json::object();
      if (e.contains("kind") && e["kind"].is_string()) {
        if (auto k = parse_kind(e["kind"].get<std::string>())) {
          extra["range"] = kind_info(*k).range.describe();
        }
      }
      return error(422, ex.what(), extra);
    } catch (const Json::exception& ex) {
      return error(400, std::string("malformed entry: ") + ex.what());
    }
  }
  try {
    return {200, Json(store_.save(std::move(parsed)))};
  } catch (const ParameterError& ex) {
    return error(422, ex.what());
  }
}

}  // namespace uqbench::calib
