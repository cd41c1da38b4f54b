#include "anisobound/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "anisobound/format.hpp"

namespace anisobound {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

const std::set<std::string> kWeightFields{"kind", "value", "amplitude", "center", "exponent"};

bool known_key(const std::string& key) {
  static const std::set<std::string> fixed{
      "name",
      "grid.box", "grid.h",
      "exponents.n", "exponents.p", "exponents.q", "exponents.gamma", "exponents.r",
      "exponents.s",
      "weights.u_coeff",
      "boundary.kind", "boundary.c0", "boundary.a", "boundary.center", "boundary.amplitude",
      "boundary.exponent", "boundary.offset", "boundary.initial",
      "solver.max_iters", "solver.grad_tol", "solver.initial_step", "solver.shrink",
      "solver.armijo", "solver.smoothing_eps", "solver.descent", "solver.perturbations",
      "solver.seed", "solver.perturbation_amplitude",
      "certify.x0", "certify.R", "certify.H", "certify.C_cal", "certify.holder_constant",
      "verify.x0", "verify.k", "verify.R", "verify.rho_fraction", "verify.subbox",
      "output.dir"};
  if (fixed.count(key)) return true;
  // weights.<name>.<field> with name lambda<i>, mu or upper_override.
  if (key.rfind("weights.", 0) != 0) return false;
  const std::string rest = key.substr(8);
  const std::size_t dot = rest.find('.');
  if (dot == std::string::npos || !kWeightFields.count(rest.substr(dot + 1))) return false;
  const std::string name = rest.substr(0, dot);
  if (name == "mu" || name == "upper_override") return true;
  if (name.rfind("lambda", 0) != 0 || name.size() == 6) return false;
  return std::all_of(name.begin() + 6, name.end(), [](char c) { return std::isdigit(c); });
}

[[noreturn]] void fail(const std::string& key, const ConfigFile::Entry& e, const std::string& msg) {
  throw ConfigError("line " + std::to_string(e.line) + ": field '" + key + "': " + msg);
}

double as_double(const std::string& key, const ConfigFile::Entry& e) {
  try {
    return parse_double(e.value);
  } catch (const std::invalid_argument&) {
    fail(key, e, "expected a number, got '" + e.value + "'");
  }
}

std::vector<double> as_list(const std::string& key, const ConfigFile::Entry& e) {
  std::vector<double> out;
  for (const std::string& item : split(e.value, ',')) {
    try {
      out.push_back(parse_double(item));
    } catch (const std::invalid_argument&) {
      fail(key, e, "expected a comma-separated list of numbers, got '" + e.value + "'");
    }
  }
  if (out.empty()) fail(key, e, "empty list");
  return out;
}

int as_int(const std::string& key, const ConfigFile::Entry& e) {
  const double v = as_double(key, e);
  if (v != std::floor(v) || std::abs(v) > 2e9) fail(key, e, "expected an integer");
  return static_cast<int>(v);
}

Exponent as_exponent(const std::string& key, const ConfigFile::Entry& e, const std::string& text) {
  try {
    return Exponent::parse(text);
  } catch (const std::exception& ex) {
    fail(key, e, ex.what());
  }
}

std::vector<Interval> as_box(const std::string& key, const ConfigFile::Entry& e) {
  std::vector<Interval> box;
  for (const std::string& item : split(e.value, ',')) {
    const auto ends = split(item, ':');
    if (ends.size() != 2) fail(key, e, "expected lo:hi pairs separated by commas");
    try {
      box.push_back({parse_double(ends[0]), parse_double(ends[1])});
    } catch (const std::invalid_argument&) {
      fail(key, e, "expected lo:hi pairs separated by commas");
    }
  }
  return box;
}

template <class F>
auto with_field(const std::string& key, const ConfigFile::Entry& e, F&& build) {
  try {
    return build();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    fail(key, e, ex.what());
  }
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in) {
  ConfigFile cfg;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!known_key(full)) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown field '" + full + "'");
    }
    if (cfg.entries_.count(full)) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate field '" + full + "'");
    }
    cfg.entries_[full] = {value, line_no};
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse(in);
}

const ConfigFile::Entry* ConfigFile::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

const ConfigFile::Entry& ConfigFile::require(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError("missing field '" + key + "'");
  return *e;
}

RunConfig parse_config(std::istream& in) {
  RunConfig rc;
  rc.file = ConfigFile::parse(in);
  if (const auto* e = rc.file.find("name")) rc.name = e->value;
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

Exponents RunConfig::exponents() const {
  const auto& ne = file.require("exponents.n");
  const int n = as_int("exponents.n", ne);
  if (n < 1) fail("exponents.n", ne, "dimension must be >= 1");

  // A single value is broadcast to every axis.
  auto per_axis = [&](const std::string& key, auto parse_one) {
    const auto& e = file.require(key);
    const auto items = split(e.value, ',');
    using T = decltype(parse_one(std::string{}));
    std::vector<T> out;
    for (const std::string& it : items) out.push_back(parse_one(it));
    if (out.size() == 1) out.assign(static_cast<std::size_t>(n), out.front());
    if (static_cast<int>(out.size()) != n) {
      fail(key, e, "expected " + std::to_string(n) + " values, got " + std::to_string(items.size()));
    }
    return out;
  };
  const auto p = per_axis("exponents.p", [&](const std::string& t) {
    try {
      return parse_double(t);
    } catch (const std::invalid_argument&) {
      fail("exponents.p", file.require("exponents.p"), "expected numbers, got '" + t + "'");
    }
  });
  const auto r = per_axis("exponents.r", [&](const std::string& t) {
    return as_exponent("exponents.r", file.require("exponents.r"), t);
  });
  const double q = as_double("exponents.q", file.require("exponents.q"));
  const double gamma = as_double("exponents.gamma", file.require("exponents.gamma"));
  const auto& se = file.require("exponents.s");
  const Exponent s = as_exponent("exponents.s", se, se.value);
  return with_field("exponents", ne, [&] { return Exponents(n, p, q, gamma, r, s); });
}

Grid RunConfig::grid() const {
  const auto& be = file.require("grid.box");
  const auto& he = file.require("grid.h");
  const auto box = as_box("grid.box", be);
  const double h = as_double("grid.h", he);
  return with_field("grid.h", he, [&] { return make_grid(box, h); });
}

namespace {

WeightField read_weight(const ConfigFile& f, const std::string& name, const WeightField& fallback) {
  const std::string prefix = "weights." + name + ".";
  const auto* kind = f.find(prefix + "kind");
  if (!kind) {
    for (const std::string& fld : kWeightFields) {
      if (const auto* e = f.find(prefix + fld)) fail(prefix + fld, *e, "weight has no kind");
    }
    return fallback;
  }
  if (kind->value == "constant") {
    const auto& v = f.require(prefix + "value");
    const double value = as_double(prefix + "value", v);
    return with_field(prefix + "value", v, [&] { return WeightField::constant(value); });
  }
  if (kind->value == "power") {
    const auto& a = f.require(prefix + "amplitude");
    const auto& c = f.require(prefix + "center");
    const auto& x = f.require(prefix + "exponent");
    const double amp = as_double(prefix + "amplitude", a);
    const auto center = as_list(prefix + "center", c);
    const double ex = as_double(prefix + "exponent", x);
    return with_field(prefix + "amplitude", a, [&] { return WeightField::power(amp, center, ex); });
  }
  fail(prefix + "kind", *kind, "expected 'constant' or 'power'");
}

}  // namespace

ModelIntegrand RunConfig::model() const {
  const Exponents e = exponents();
  const WeightField one = WeightField::constant(1.0);
  for (const auto& [key, entry] : file.entries()) {
    if (key.rfind("weights.lambda", 0) != 0) continue;
    const std::string name = key.substr(8, key.find('.', 8) - 8);
    const int index = std::stoi(name.substr(6));
    if (index < 1 || index > e.n()) fail(key, entry, "weight index outside 1.." + std::to_string(e.n()));
  }
  std::vector<WeightField> lambdas;
  for (int i = 1; i <= e.n(); ++i) lambdas.push_back(read_weight(file, "lambda" + std::to_string(i), one));
  const WeightField mu = read_weight(file, "mu", one);
  double u_coeff = 0.0;
  const ConfigFile::Entry* ue = file.find("weights.u_coeff");
  if (ue) u_coeff = as_double("weights.u_coeff", *ue);
  const ConfigFile::Entry anchor = ue ? *ue : file.require("exponents.n");
  ModelIntegrand m = with_field("weights", anchor, [&] { return ModelIntegrand(e, lambdas, mu, u_coeff); });
  if (file.find("weights.upper_override.kind")) {
    m = m.with_upper_weight_override(read_weight(file, "upper_override", one));
  }
  return m;
}

BoundaryFunction RunConfig::boundary() const {
  const int n = exponents().n();
  const auto& ke = file.require("boundary.kind");
  auto num = [&](const std::string& key, double fallback) {
    const auto* e = file.find("boundary." + key);
    return e ? as_double("boundary." + key, *e) : fallback;
  };
  auto point = [&](const std::string& key) {
    const auto& e = file.require("boundary." + key);
    auto v = as_list("boundary." + key, e);
    if (static_cast<int>(v.size()) != n) fail("boundary." + key, e, "expected " + std::to_string(n) + " values");
    return v;
  };
  if (ke.value == "affine") return BoundaryFunction::affine(num("c0", 0.0), point("a"));
  if (ke.value == "radial") {
    return BoundaryFunction::radial(point("center"), num("amplitude", 1.0), num("exponent", 1.0),
                                    num("offset", 0.0));
  }
  if (ke.value == "product") {
    return BoundaryFunction::product(point("center"), num("amplitude", 1.0), num("offset", 0.0));
  }
  fail("boundary.kind", ke, "expected 'affine', 'radial' or 'product'");
}

InitialGuess RunConfig::initial_guess() const {
  const auto* e = file.find("boundary.initial");
  if (!e || e->value == "zero") return InitialGuess::zero;
  if (e->value == "extension") return InitialGuess::extension;
  fail("boundary.initial", *e, "expected 'zero' or 'extension'");
}

SolveConfig RunConfig::solver() const {
  SolveConfig cfg;
  auto get = [&](const std::string& key) { return file.find("solver." + key); };
  if (const auto* e = get("max_iters")) cfg.max_iters = as_int("solver.max_iters", *e);
  if (const auto* e = get("grad_tol")) cfg.grad_tol = as_double("solver.grad_tol", *e);
  if (const auto* e = get("initial_step")) cfg.step.initial_step = as_double("solver.initial_step", *e);
  if (const auto* e = get("shrink")) cfg.step.shrink = as_double("solver.shrink", *e);
  if (const auto* e = get("armijo")) cfg.step.armijo = as_double("solver.armijo", *e);
  if (const auto* e = get("smoothing_eps")) cfg.smoothing_eps = as_double("solver.smoothing_eps", *e);
  if (const auto* e = get("descent")) {
    if (e->value == "cg") {
      cfg.descent = Descent::conjugate_gradient;
    } else if (e->value == "steepest") {
      cfg.descent = Descent::steepest;
    } else {
      fail("solver.descent", *e, "expected 'cg' or 'steepest'");
    }
  }
  try {
    validate(cfg);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("[solver]: ") + ex.what());
  }
  return cfg;
}

QuasiminimalitySettings RunConfig::quasiminimality() const {
  QuasiminimalitySettings s;
  if (const auto* e = file.find("solver.perturbations")) {
    const int c = as_int("solver.perturbations", *e);
    if (c < 0) fail("solver.perturbations", *e, "must be >= 0");
    s.count = static_cast<std::size_t>(c);
  }
  if (const auto* e = file.find("solver.seed")) {
    const int v = as_int("solver.seed", *e);
    if (v < 0) fail("solver.seed", *e, "must be >= 0");
    s.seed = static_cast<std::uint64_t>(v);
  }
  if (const auto* e = file.find("solver.perturbation_amplitude")) {
    s.amplitude = as_double("solver.perturbation_amplitude", *e);
    if (!(s.amplitude > 0.0)) fail("solver.perturbation_amplitude", *e, "must be > 0");
  }
  return s;
}

CertifySettings RunConfig::certify() const {
  CertifySettings s;
  const auto& xe = file.require("certify.x0");
  s.x0 = as_list("certify.x0", xe);
  s.R = as_double("certify.R", file.require("certify.R"));
  if (const auto* e = file.find("certify.H")) {
    s.H = as_int("certify.H", *e);
    if (s.H < 1) fail("certify.H", *e, "must be >= 1");
  }
  if (const auto* e = file.find("certify.C_cal")) {
    if (e->value == "calibrate") {
      s.C_cal.reset();
    } else {
      s.C_cal = as_double("certify.C_cal", *e);
      if (!(*s.C_cal > 0.0)) fail("certify.C_cal", *e, "must be > 0 or 'calibrate'");
    }
  }
  if (const auto* e = file.find("certify.holder_constant")) {
    s.holder_constant = as_double("certify.holder_constant", *e);
    if (!(*s.holder_constant > 0.0)) fail("certify.holder_constant", *e, "must be > 0");
  }
  return s;
}

VerifySettings RunConfig::verify() const {
  VerifySettings s;
  const Grid g = grid();
  if (const auto* e = file.find("verify.x0")) {
    s.x0 = as_list("verify.x0", *e);
  } else if (const auto* c = file.find("certify.x0")) {
    s.x0 = as_list("certify.x0", *c);
  } else {
    for (const Interval& iv : g.box()) s.x0.push_back(0.5 * (iv.lo + iv.hi));
  }
  if (const auto* e = file.find("verify.k")) s.k = as_list("verify.k", *e);
  if (const auto* e = file.find("verify.R")) {
    s.R = as_list("verify.R", *e);
  } else if (const auto* c = file.find("certify.R")) {
    s.R = {as_double("certify.R", *c)};
  } else {
    throw ConfigError("missing field 'verify.R'");
  }
  if (const auto* e = file.find("verify.rho_fraction")) {
    s.rho_fraction = as_list("verify.rho_fraction", *e);
    for (double f : s.rho_fraction) {
      if (!(f > 0.0 && f < 1.0)) fail("verify.rho_fraction", *e, "fractions must lie in (0, 1)");
    }
  }
  if (const auto* e = file.find("verify.subbox")) {
    s.sub_box = as_box("verify.subbox", *e);
  } else {
    for (const Interval& iv : g.box()) {
      const double q = 0.25 * (iv.hi - iv.lo);
      s.sub_box.push_back({iv.lo + q, iv.hi - q});
    }
  }
  return s;
}

std::filesystem::path RunConfig::output_dir() const {
  const auto* e = file.find("output.dir");
  return e ? std::filesystem::path(e->value) : std::filesystem::path(".");
}

}  // namespace anisobound
