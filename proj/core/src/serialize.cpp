#include "splatseg/serialize.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include "splatseg/error.hpp"

namespace splatseg {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

std::string dump(const json& value) { return value.dump(2) + "\n"; }

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

json parse_flat_toml(const std::string& text) {
  json out = json::object();
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const std::string where = "config line " + std::to_string(lineno);
    std::string body = line;
    // Strip a comment unless the '#' sits inside a quoted string.
    bool quoted = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '"') quoted = !quoted;
      if (body[i] == '#' && !quoted) {
        body.resize(i);
        break;
      }
    }
    body = trim(body);
    if (body.empty()) continue;
    if (body.front() == '[') throw DataError(where + ": tables are not supported in flat configs");
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw DataError(where + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) throw DataError(where + ": expected key = value");
    if (value == "true" || value == "false") {
      out[key] = value == "true";
    } else if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') throw DataError(where + ": unterminated string");
      out[key] = value.substr(1, value.size() - 2);
    } else {
      try {
        out[key] = json::parse(value);
      } catch (const json::exception&) {
        throw DataError(where + ": cannot parse value '" + value + "'");
      }
      if (!out[key].is_number() && !out[key].is_array()) {
        throw DataError(where + ": unsupported value '" + value + "'");
      }
    }
  }
  return out;
}

json load_config_file(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  const std::string head = trim(text);
  const bool toml = path.extension() == ".toml" || (!head.empty() && head.front() != '{');
  if (toml) return parse_flat_toml(text);
  try {
    json parsed = json::parse(text);
    if (!parsed.is_object()) throw DataError("config '" + path.string() + "' is not an object");
    return parsed;
  } catch (const json::parse_error& e) {
    throw DataError("config '" + path.string() + "': " + e.what());
  }
}

namespace {

template <typename T>
void read_key(const json& config, const char* key, T& into) {
  const auto it = config.find(key);
  if (it == config.end()) return;
  try {
    into = it->get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

LossWeights loss_weights_from(const json& config, LossWeights w) {
  read_key(config, "lambda_m", w.lambda_m);
  read_key(config, "lambda_l", w.lambda_l);
  read_key(config, "lambda_dice", w.lambda_dice);
  read_key(config, "lambda_dtc", w.lambda_dtc);
  read_key(config, "focal_gamma", w.focal_gamma);
  read_key(config, "focal_alpha", w.focal_alpha);
  read_key(config, "k_sigmoid", w.k_sigmoid);
  read_key(config, "dtc_sign", w.dtc_sign);
  w.validate();
  return w;
}

FitOptions fit_options_from(const json& config, FitOptions o) {
  read_key(config, "epochs", o.epochs);
  read_key(config, "lr", o.adam.lr);
  read_key(config, "beta1", o.adam.beta1);
  read_key(config, "beta2", o.adam.beta2);
  read_key(config, "eps", o.adam.eps);
  read_key(config, "weight_decay", o.adam.weight_decay);
  read_key(config, "lsf_lr", o.lsf_lr);
  read_key(config, "mask_sharpness", o.mask_sharpness);
  read_key(config, "plateau_patience", o.plateau_patience);
  read_key(config, "plateau_min_delta", o.plateau_min_delta);
  read_key(config, "plateau_decay", o.plateau_decay);
  read_key(config, "max_decays", o.max_decays);
  read_key(config, "mask_tolerance", o.mask_tolerance);
  read_key(config, "lsf_clip", o.lsf_clip);
  read_key(config, "ramp_dtc", o.ramp_dtc);
  o.validate();
  return o;
}

AugmentationConfig augmentation_from(const json& config, AugmentationConfig a) {
  read_key(config, "p_flip_h", a.p_flip_h);
  read_key(config, "p_flip_v", a.p_flip_v);
  read_key(config, "p_rotate", a.p_rotate);
  read_key(config, "p_noise", a.p_noise);
  read_key(config, "p_resize_crop", a.p_resize_crop);
  read_key(config, "noise_sigma", a.noise_sigma);
  read_key(config, "rotations", a.rotations);
  read_key(config, "scale_min", a.scale_min);
  read_key(config, "scale_max", a.scale_max);
  read_key(config, "target_size", a.target_size);
  a.validate();
  return a;
}

json to_json(const LossWeights& w) {
  return {{"lambda_m", w.lambda_m},       {"lambda_l", w.lambda_l},
          {"lambda_dice", w.lambda_dice}, {"lambda_dtc", w.lambda_dtc},
          {"focal_gamma", w.focal_gamma}, {"focal_alpha", w.focal_alpha},
          {"k_sigmoid", w.k_sigmoid},     {"dtc_sign", w.dtc_sign}};
}

json to_json(const FitOptions& o) {
  return {{"epochs", o.epochs},
          {"lr", o.adam.lr},
          {"beta1", o.adam.beta1},
          {"beta2", o.adam.beta2},
          {"eps", o.adam.eps},
          {"weight_decay", o.adam.weight_decay},
          {"lsf_lr", o.lsf_lr},
          {"mask_sharpness", o.mask_sharpness},
          {"plateau_patience", o.plateau_patience},
          {"plateau_min_delta", o.plateau_min_delta},
          {"plateau_decay", o.plateau_decay},
          {"max_decays", o.max_decays},
          {"mask_tolerance", o.mask_tolerance},
          {"lsf_clip", o.lsf_clip},
          {"ramp_dtc", o.ramp_dtc}};
}

json to_json(const AugmentationConfig& a) {
  return {{"p_flip_h", a.p_flip_h},       {"p_flip_v", a.p_flip_v},
          {"p_rotate", a.p_rotate},       {"p_noise", a.p_noise},
          {"p_resize_crop", a.p_resize_crop}, {"noise_sigma", a.noise_sigma},
          {"rotations", a.rotations},     {"scale_min", a.scale_min},
          {"scale_max", a.scale_max},     {"target_size", a.target_size}};
}

json to_json(const GaussianSplat& s) {
  return {{"mu_x", s.mu_x}, {"mu_y", s.mu_y}, {"s_x", s.s_x}, {"s_y", s.s_y}, {"r", s.r}};
}

json to_json(const LossBreakdown& b) {
  return {{"class_loss", b.class_loss}, {"mask_loss", b.mask_loss}, {"lsf_loss", b.lsf_loss},
          {"dtc_loss", b.dtc_loss},     {"dice_loss", b.dice_loss}, {"total", b.total}};
}

json to_json(const FitResult& r) {
  json out = {{"splat", to_json(r.splat)},
              {"epochs_run", r.epochs_run},
              {"converged", r.converged},
              {"final_loss", r.loss_trace.empty() ? 0.0 : r.loss_trace.back()},
              {"final_breakdown", to_json(r.final_breakdown)},
              {"loss_trace", r.loss_trace}};
  if (!r.dtc_trace.empty()) out["dtc_trace"] = r.dtc_trace;
  if (r.initial_agreement) out["initial_agreement"] = *r.initial_agreement;
  if (r.final_agreement) out["final_agreement"] = *r.final_agreement;
  return out;
}

json to_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

json to_json(const EvalReport& r) {
  json out = {{"jaccard", r.jaccard},         {"dice", r.dice},
              {"accuracy", r.accuracy},       {"sensitivity", r.sensitivity},
              {"specificity", r.specificity}, {"counts", to_json(r.counts)}};
  out["auc"] = r.auc ? json(*r.auc) : json(nullptr);
  out["average_precision"] = r.average_precision ? json(*r.average_precision) : json(nullptr);
  return out;
}

json to_json(const ShapeSpec& s) {
  json out = {{"kind", to_string(s.kind)},
              {"seed", s.seed},
              {"threshold", s.threshold},
              {"primary", to_json(s.primary)}};
  if (s.kind == ShapeKind::crescent) out["secondary"] = to_json(s.secondary);
  if (s.kind == ShapeKind::blob) {
    out["noise_amplitude"] = s.noise_amplitude;
    out["harmonics"] = s.harmonics;
  }
  return out;
}

json to_json(const UnitMapping& m) { return {{"offset", m.offset}, {"scale", m.scale}}; }

UnitMapping unit_mapping_from_json(const json& record) {
  try {
    return {record.at("offset").get<double>(), record.at("scale").get<double>()};
  } catch (const json::exception& e) {
    throw DataError(std::string("bad level-set mapping record: ") + e.what());
  }
}

GaussianSplat splat_from_json(const json& record) {
  try {
    return {record.at("mu_x").get<double>(), record.at("mu_y").get<double>(),
            record.at("s_x").get<double>(),  record.at("s_y").get<double>(),
            record.at("r").get<double>(),    1.0};
  } catch (const json::exception& e) {
    throw DataError(std::string("bad splat record: ") + e.what());
  }
}

GaussianSplat splat_from_csv(const std::string& text) {
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (std::isalpha(static_cast<unsigned char>(line.front()))) continue;  // header
    std::array<double, kSplatParamCount> p{};
    std::istringstream fields(line);
    std::string cell;
    std::size_t n = 0;
    while (std::getline(fields, cell, ',')) {
      if (n == p.size()) throw DataError("splat CSV row has more than 5 fields");
      try {
        std::size_t used = 0;
        const std::string t = trim(cell);
        p[n] = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
      } catch (const std::exception&) {
        throw DataError("splat CSV: cannot parse '" + cell + "'");
      }
      ++n;
    }
    if (n != p.size()) throw DataError("splat CSV row needs 5 fields: mu_x,mu_y,s_x,s_y,r");
    return GaussianSplat::from_params(p);
  }
  throw DataError("splat CSV holds no data row");
}

std::string splat_to_csv(const GaussianSplat& s) {
  std::ostringstream out;
  out.precision(17);
  out << "mu_x,mu_y,s_x,s_y,r\n"
      << s.mu_x << ',' << s.mu_y << ',' << s.s_x << ',' << s.s_y << ',' << s.r << '\n';
  return out.str();
}

GaussianSplat load_splat(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  if (path.extension() == ".json") {
    try {
      return splat_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
      throw DataError("splat file '" + path.string() + "': " + e.what());
    }
  }
  return splat_from_csv(text);
}

}  // namespace splatseg
