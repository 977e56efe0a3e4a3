#include "topp/conic_program.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace topp {

using nlohmann::json;

double AffineExpr::evaluate(const VectorX& x) const {
  double v = constant;
  for (const auto& t : terms) v += t.coef * x(t.var);
  return v;
}

double LinearRow::evaluate(const VectorX& x) const {
  double v = 0.0;
  for (const auto& t : terms) v += t.coef * x(t.var);
  return v;
}

VariableSlice ConicProgram::add_slice(const std::string& name, int size) {
  if (size < 0) throw std::invalid_argument("negative slice size");
  if (has_slice(name)) throw std::invalid_argument("duplicate slice '" + name + "'");
  VariableSlice s{name, num_vars_, size};
  slices_.push_back(s);
  num_vars_ += size;
  VectorX grown = VectorX::Zero(num_vars_);
  grown.head(objective_.size()) = objective_;
  objective_ = grown;
  return s;
}

const VariableSlice& ConicProgram::slice(const std::string& name) const {
  for (const auto& s : slices_) {
    if (s.name == name) return s;
  }
  throw std::out_of_range("no slice named '" + name + "'");
}

bool ConicProgram::has_slice(const std::string& name) const {
  for (const auto& s : slices_) {
    if (s.name == name) return true;
  }
  return false;
}

void ConicProgram::check_var(int var) const {
  if (var < 0 || var >= num_vars_) throw std::out_of_range("variable index " + std::to_string(var) + " out of range");
}

void ConicProgram::set_objective(int var, double coef) {
  check_var(var);
  objective_(var) = coef;
}

void ConicProgram::add_row(LinearRow row) {
  for (const auto& t : row.terms) check_var(t.var);
  if (row.lower > row.upper) throw std::invalid_argument("row lower bound exceeds upper bound");
  rows_.push_back(std::move(row));
}

void ConicProgram::add_cone(SocBlock cone) {
  if (cone.entries.size() < 2) throw std::invalid_argument("second-order cone needs at least two entries");
  for (const auto& e : cone.entries) {
    for (const auto& t : e.terms) check_var(t.var);
  }
  cones_.push_back(std::move(cone));
}

void ConicProgram::fix(int var, double value) {
  check_var(var);
  fixed_.push_back({var, value});
}

void ConicProgram::pin(int var) {
  check_var(var);
  pinned_.push_back(var);
}

int ConicProgram::free_scalar_count() const {
  return num_vars_ - static_cast<int>(fixed_.size()) - static_cast<int>(pinned_.size());
}

std::map<std::string, VectorX> ConicProgram::unpack(const VectorX& x) const {
  if (x.size() != num_vars_) throw std::invalid_argument("unpack: wrong vector length");
  std::map<std::string, VectorX> out;
  for (const auto& s : slices_) out[s.name] = x.segment(s.offset, s.size);
  return out;
}

VectorX ConicProgram::pack(const std::map<std::string, VectorX>& values) const {
  VectorX x = VectorX::Zero(num_vars_);
  for (const auto& s : slices_) {
    const auto it = values.find(s.name);
    if (it == values.end()) throw std::invalid_argument("pack: missing slice '" + s.name + "'");
    if (it->second.size() != s.size) throw std::invalid_argument("pack: slice '" + s.name + "' has wrong length");
    x.segment(s.offset, s.size) = it->second;
  }
  return x;
}

namespace {

// JSON has no infinities; encode them as null.
json bound_to_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double bound_from_json(const json& j, double infinite) { return j.is_null() ? infinite : j.get<double>(); }

json terms_to_json(const std::vector<LinearTerm>& terms) {
  json out = json::array();
  for (const auto& t : terms) out.push_back({t.var, t.coef});
  return out;
}

std::vector<LinearTerm> terms_from_json(const json& j) {
  std::vector<LinearTerm> out;
  for (const auto& t : j) out.push_back({t.at(0).get<int>(), t.at(1).get<double>()});
  return out;
}

json tag_to_json(const RowTag& tag) { return {{"family", tag.family}, {"interval", tag.interval}}; }

RowTag tag_from_json(const json& j) { return {j.at("family").get<std::string>(), j.at("interval").get<int>()}; }

}  // namespace

std::string ConicProgram::dump() const {
  json j;
  j["format"] = "topp-conic-program";
  j["version"] = kDumpVersion;
  j["num_variables"] = num_vars_;
  j["slices"] = json::array();
  for (const auto& s : slices_) j["slices"].push_back({{"name", s.name}, {"offset", s.offset}, {"size", s.size}});
  json obj = json::array();
  for (int i = 0; i < num_vars_; ++i) {
    if (objective_(i) != 0.0) obj.push_back({i, objective_(i)});
  }
  j["objective"] = obj;
  j["rows"] = json::array();
  for (const auto& r : rows_) {
    j["rows"].push_back({{"terms", terms_to_json(r.terms)},
                         {"lower", bound_to_json(r.lower)},
                         {"upper", bound_to_json(r.upper)},
                         {"tag", tag_to_json(r.tag)}});
  }
  j["cones"] = json::array();
  for (const auto& c : cones_) {
    json entries = json::array();
    for (const auto& e : c.entries) entries.push_back({{"terms", terms_to_json(e.terms)}, {"constant", e.constant}});
    j["cones"].push_back({{"entries", entries}, {"tag", tag_to_json(c.tag)}});
  }
  j["fixed"] = json::array();
  for (const auto& f : fixed_) j["fixed"].push_back({f.var, f.value});
  j["pinned"] = pinned_;
  return j.dump();
}

ConicProgram ConicProgram::load(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("format", "") != "topp-conic-program") throw std::invalid_argument("not a topp conic program dump");
  const int version = j.at("version").get<int>();
  if (version != kDumpVersion) throw std::invalid_argument("unsupported dump version " + std::to_string(version));
  constexpr double inf = std::numeric_limits<double>::infinity();
  ConicProgram p;
  for (const auto& s : j.at("slices")) {
    const auto added = p.add_slice(s.at("name").get<std::string>(), s.at("size").get<int>());
    if (added.offset != s.at("offset").get<int>()) throw std::invalid_argument("slice offsets are not contiguous");
  }
  for (const auto& t : j.at("objective")) p.set_objective(t.at(0).get<int>(), t.at(1).get<double>());
  for (const auto& r : j.at("rows")) {
    p.add_row({terms_from_json(r.at("terms")), bound_from_json(r.at("lower"), -inf), bound_from_json(r.at("upper"), inf),
               tag_from_json(r.at("tag"))});
  }
  for (const auto& c : j.at("cones")) {
    SocBlock block;
    for (const auto& e : c.at("entries")) block.entries.push_back({terms_from_json(e.at("terms")), e.at("constant").get<double>()});
    block.tag = tag_from_json(c.at("tag"));
    p.add_cone(std::move(block));
  }
  for (const auto& f : j.at("fixed")) p.fix(f.at(0).get<int>(), f.at(1).get<double>());
  for (const auto& v : j.at("pinned")) p.pin(v.get<int>());
  return p;
}

}  // namespace topp
