#include "ptspec/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ptspec/matrix_io.hpp"

namespace ptspec::io {

namespace {

std::uint64_t fnv1a_text(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Entry {
  std::string value;
  int line;
  bool consumed = false;
};

class Sections {
 public:
  void add(const std::string& section, const std::string& key,
           const std::string& value, int line) {
    const std::string full = section + "." + key;
    auto it = entries_.find(full);
    if (it != entries_.end())
      throw ConfigError(line, "duplicate key '" + key + "' (first set on line " +
                                  std::to_string(it->second.line) + ")");
    entries_[full] = Entry{value, line, false};
  }

  std::optional<std::string> take(const std::string& full) {
    auto it = entries_.find(full);
    if (it == entries_.end()) return std::nullopt;
    it->second.consumed = true;
    return it->second.value;
  }

  std::string require(const std::string& full) {
    auto v = take(full);
    if (!v) throw ConfigError(0, "missing required key '" + full + "'");
    return *v;
  }

  int line_of(const std::string& full) const {
    auto it = entries_.find(full);
    return it == entries_.end() ? 0 : it->second.line;
  }

  void reject_unconsumed() const {
    for (const auto& [full, e] : entries_)
      if (!e.consumed)
        throw ConfigError(e.line, "unknown key '" + full + "'");
  }

 private:
  std::map<std::string, Entry> entries_;
};

double parse_real(const Sections& sections, const std::string& full,
                  const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(sections.line_of(full), "expected a real number for '" +
                                                  full + "', got '" + text + "'");
  }
}

int parse_int(const Sections& sections, const std::string& full,
              const std::string& text) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(sections.line_of(full), "expected an integer for '" +
                                                  full + "', got '" + text + "'");
  }
}

std::vector<double> parse_real_list(const Sections& sections, const std::string& full,
                                    const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigError(sections.line_of(full), "empty element in list '" + full + "'");
    out.push_back(parse_real(sections, full, item));
  }
  if (out.empty())
    throw ConfigError(sections.line_of(full), "empty list for '" + full + "'");
  return out;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open '" + path + "'");
  std::ostringstream whole;
  whole << in.rdbuf();

  RunConfig cfg;
  cfg.path = path;
  cfg.raw_text = whole.str();
  cfg.content_hash = fnv1a_text(cfg.raw_text);

  Sections sections;
  {
    std::istringstream stream(cfg.raw_text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(stream, line)) {
      ++line_no;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      if (t.front() == '[') {
        if (t.back() != ']')
          throw ConfigError(line_no, "malformed section header '" + t + "'");
        section = trim(t.substr(1, t.size() - 2));
        if (section != "problem" && section != "task" && section != "output")
          throw ConfigError(line_no, "unknown section '" + section + "'");
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError(line_no, "expected 'key = value', got '" + t + "'");
      if (section.empty())
        throw ConfigError(line_no, "key before any [section] header");
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError(line_no, "empty key");
      if (value.empty()) throw ConfigError(line_no, "empty value for '" + key + "'");
      sections.add(section, key, value, line_no);
    }
  }

  cfg.task = sections.require("task.task");
  const bool is_fit = cfg.task == "doublewell-fit";
  if (cfg.task != "spectrum" && cfg.task != "classify" && cfg.task != "reality" &&
      cfg.task != "sweep" && !is_fit)
    throw ConfigError(sections.line_of("task.task"), "unknown task '" + cfg.task + "'");

  // ---- [problem] ----
  if (auto dim = sections.take("problem.dimension"))
    cfg.problem.dimension = parse_int(sections, "problem.dimension", *dim);
  cfg.problem.basis.dimension = cfg.problem.dimension;

  if (auto n = sections.take("problem.basis_size"))
    cfg.problem.basis.modes_per_dim = parse_int(sections, "problem.basis_size", *n);
  if (auto q = sections.take("problem.quadrature_order"))
    cfg.problem.quadrature_order = parse_int(sections, "problem.quadrature_order", *q);
  if (auto k = sections.take("problem.kinetic_coefficient"))
    cfg.problem.basis.kinetic_coefficient =
        parse_real(sections, "problem.kinetic_coefficient", *k);
  if (auto l = sections.take("problem.length_scale")) {
    const auto scales = parse_real_list(sections, "problem.length_scale", *l);
    if (static_cast<int>(scales.size()) != 1 &&
        static_cast<int>(scales.size()) != cfg.problem.dimension)
      throw ConfigError(sections.line_of("problem.length_scale"),
                        "length_scale needs 1 value or one per dimension");
    cfg.problem.basis.length_scale[0] = scales[0];
    cfg.problem.basis.length_scale[1] = scales.size() > 1 ? scales[1] : scales[0];
  }
  if (auto r = sections.take("problem.reflection")) {
    std::stringstream ss(*r);
    std::string item;
    int i = 0;
    cfg.problem.reflection = {0, 0};
    while (std::getline(ss, item, ',')) {
      if (i >= cfg.problem.dimension)
        throw ConfigError(sections.line_of("problem.reflection"),
                          "more reflection flags than dimensions");
      const int flag = parse_int(sections, "problem.reflection", trim(item));
      if (flag != 0 && flag != 1)
        throw ConfigError(sections.line_of("problem.reflection"),
                          "reflection flags are 0 or 1");
      cfg.problem.reflection[static_cast<std::size_t>(i++)] = flag;
    }
    if (i != cfg.problem.dimension)
      throw ConfigError(sections.line_of("problem.reflection"),
                        "reflection needs one flag per dimension");
  }

  const auto base_dir = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base_dir / fp).string();
  };

  std::string form = "pt";
  if (auto f = sections.take("problem.perturbation_form")) form = *f;
  if (form == "pt") {
    cfg.problem.form = family::PerturbationForm::PTPotential;
  } else if (form == "matrix") {
    cfg.problem.form = family::PerturbationForm::UserMatrix;
  } else {
    throw ConfigError(sections.line_of("problem.perturbation_form"),
                      "perturbation_form is 'pt' or 'matrix'");
  }

  const auto v_text = sections.take("problem.potential");
  const auto w_text = sections.take("problem.perturbation");
  if (!is_fit) {
    if (!v_text)
      throw ConfigError(0, "missing required key 'problem.potential'");
    try {
      cfg.problem.potential = expr::Expr::parse(*v_text, cfg.problem.dimension);
    } catch (const Error& e) {
      throw ConfigError(sections.line_of("problem.potential"),
                        std::string("potential: ") + e.what());
    }
    if (cfg.problem.form == family::PerturbationForm::PTPotential) {
      if (!w_text)
        throw ConfigError(0, "missing required key 'problem.perturbation'");
      try {
        cfg.problem.perturbation = expr::Expr::parse(*w_text, cfg.problem.dimension);
      } catch (const Error& e) {
        throw ConfigError(sections.line_of("problem.perturbation"),
                          std::string("perturbation: ") + e.what());
      }
    } else if (w_text) {
      throw ConfigError(sections.line_of("problem.perturbation"),
                        "perturbation expression unused in matrix form");
    }
    cfg.has_problem = true;
  } else if (v_text || w_text) {
    throw ConfigError(sections.line_of(v_text ? "problem.potential" : "problem.perturbation"),
                      "doublewell-fit generates its own potentials");
  }

  if (auto p = sections.take("problem.h1_matrix")) cfg.h1_matrix_path = resolve(*p);
  if (auto p = sections.take("problem.j_matrix")) cfg.j_matrix_path = resolve(*p);
  if (cfg.problem.form == family::PerturbationForm::UserMatrix) {
    if (cfg.h1_matrix_path.empty())
      throw ConfigError(0, "matrix form requires 'problem.h1_matrix'");
    cfg.problem.user_h1 = read_matrix(cfg.h1_matrix_path);
    if (!cfg.j_matrix_path.empty()) {
      const Eigen::MatrixXcd j = read_matrix(cfg.j_matrix_path);
      if (j.imag().cwiseAbs().maxCoeff() > 0.0)
        throw ConfigError(0, "J matrix must be real");
      cfg.problem.user_j = j.real();
    }
  } else if (!cfg.h1_matrix_path.empty() || !cfg.j_matrix_path.empty()) {
    throw ConfigError(0, "matrix paths are only used with perturbation_form = matrix");
  }

  // ---- [task] ----
  if (auto e = sections.take("task.epsilon"))
    cfg.epsilons = parse_real_list(sections, "task.epsilon", *e);
  if (auto l = sections.take("task.level"))
    cfg.level = parse_real(sections, "task.level", *l);
  if (auto l = sections.take("task.level2"))
    cfg.level2 = parse_real(sections, "task.level2", *l);
  if (auto c = sections.take("task.cluster_tolerance"))
    cfg.cluster_tolerance = parse_real(sections, "task.cluster_tolerance", *c);
  if (auto t = sections.take("task.trusted_count"))
    cfg.trusted_count = parse_int(sections, "task.trusted_count", *t);
  if (auto t = sections.take("task.epsilon_min"))
    cfg.eps_min = parse_real(sections, "task.epsilon_min", *t);
  if (auto t = sections.take("task.epsilon_max"))
    cfg.eps_max = parse_real(sections, "task.epsilon_max", *t);
  if (auto t = sections.take("task.epsilon_count"))
    cfg.eps_count = parse_int(sections, "task.epsilon_count", *t);
  if (auto w = sections.take("task.window_count")) {
    cfg.window_is_interval = false;
    cfg.window_count = parse_int(sections, "task.window_count", *w);
  }
  if (auto w = sections.take("task.window_interval")) {
    const auto v = parse_real_list(sections, "task.window_interval", *w);
    if (v.size() != 2)
      throw ConfigError(sections.line_of("task.window_interval"),
                        "window_interval needs 'lo,hi'");
    cfg.window_is_interval = true;
    cfg.window_lo = v[0];
    cfg.window_hi = v[1];
  }
  if (auto b = sections.take("task.bracket")) {
    const auto v = parse_real_list(sections, "task.bracket", *b);
    if (v.size() != 2)
      throw ConfigError(sections.line_of("task.bracket"), "bracket needs 'lo,hi'");
    cfg.bracket = std::make_pair(v[0], v[1]);
  }
  if (auto f = sections.take("task.family")) cfg.dw_family = *f;
  if (auto v = sections.take("task.values"))
    cfg.dw_values = parse_real_list(sections, "task.values", *v);

  // ---- [output] ----
  if (auto d = sections.take("output.directory")) cfg.out_dir = resolve(*d);

  sections.reject_unconsumed();

  // task-parameter completeness
  if (cfg.task == "classify" && !cfg.level)
    throw ConfigError(0, "classify requires 'task.level'");
  if (cfg.task == "reality" && cfg.trusted_count < 2)
    throw ConfigError(0, "reality requires 'task.trusted_count' >= 2");
  if (cfg.task == "sweep") {
    if (cfg.eps_count < 2 || !(cfg.eps_max > cfg.eps_min))
      throw ConfigError(0, "sweep requires epsilon_min < epsilon_max and epsilon_count >= 2");
    if (cfg.bracket && !cfg.level)
      throw ConfigError(0, "sweep with a bracket requires 'task.level' as the pair location");
  }
  if (is_fit) {
    if (cfg.dw_family != "hbar" && cfg.dw_family != "g")
      throw ConfigError(0, "doublewell-fit requires 'task.family' = hbar or g");
    if (cfg.dw_values.size() < 5)
      throw ConfigError(0, "doublewell-fit requires at least 5 'task.values'");
  }
  return cfg;
}

}  // namespace ptspec::io
