#include "cpd/problem_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cpd/errors.hpp"

namespace cpd {

namespace {

std::string trim(std::string_view s) {
  auto b = s.begin();
  auto e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return std::string(b, e);
}

struct Entry {
  std::string value;
  int line = 0;
};

std::map<std::string, Entry> parse_pairs(std::string_view text) {
  std::map<std::string, Entry> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty key");
    if (out.contains(key)) throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    out.emplace(std::move(key), Entry{std::move(value), line_no});
  }
  return out;
}

std::vector<double> parse_reals(const std::string& key, const Entry& e) {
  std::string s = e.value;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    double d = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(d)) {
      throw ParseError("line " + std::to_string(e.line) + ": '" + key + "' has non-numeric value '" + tok + "'");
    }
    out.push_back(d);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> pairs) : pairs_(std::move(pairs)) {}

  bool has(const std::string& key) const { return pairs_.contains(key); }

  std::string text(const std::string& key) {
    used_.insert(key);
    auto it = pairs_.find(key);
    if (it == pairs_.end()) throw InvalidParameter("missing required key '" + key + "'");
    return it->second.value;
  }

  std::vector<double> reals(const std::string& key, std::size_t count) {
    used_.insert(key);
    auto it = pairs_.find(key);
    if (it == pairs_.end()) throw InvalidParameter("missing required key '" + key + "'");
    auto v = parse_reals(key, it->second);
    if (v.size() != count) {
      throw ParseError("line " + std::to_string(it->second.line) + ": '" + key + "' expects " +
                       std::to_string(count) + " values, got " + std::to_string(v.size()));
    }
    return v;
  }

  double real(const std::string& key) { return reals(key, 1).front(); }

  Vec3 vec3(const std::string& key) {
    auto v = reals(key, 3);
    return {v[0], v[1], v[2]};
  }

  Mat3 mat3(const std::string& key) {
    auto v = reals(key, 9);
    Mat3 m;
    std::copy(v.begin(), v.end(), m.a.begin());
    return m;
  }

  /// Keys that are present but were never consumed, i.e. do not belong to the
  /// declared kinds.
  void reject_unused() const {
    for (const auto& [key, entry] : pairs_) {
      if (!used_.contains(key)) {
        throw InvalidParameter("line " + std::to_string(entry.line) + ": key '" + key +
                               "' is not valid for the declared potential/field kinds");
      }
    }
  }

 private:
  std::map<std::string, Entry> pairs_;
  std::set<std::string> used_;
};

std::string builtin_target(const std::string& kind) {
  constexpr std::string_view prefix = "builtin:";
  if (kind.rfind(prefix, 0) != 0) return {};
  return kind.substr(prefix.size());
}

}  // namespace

ProblemSpec parse_problem(std::string_view text) {
  Reader r(parse_pairs(text));

  const std::string name = r.text("name");
  if (name.empty()) throw InvalidParameter("'name' must not be empty");
  const double epsilon = r.real("epsilon");
  if (!(epsilon > 0.0)) throw InvalidParameter("'epsilon' must be positive");

  std::shared_ptr<const ScalarPotential> potential;
  const std::string pkind = r.text("potential.kind");
  if (pkind == "quadratic") {
    QuadraticPotential qp;
    qp.Q = r.mat3("potential.Q");
    if (r.has("potential.q")) qp.q = r.vec3("potential.q");
    if (!is_symmetric(qp.Q)) throw InvalidParameter("'potential.Q' must be symmetric");
    potential = std::make_shared<QuadraticScalarPotential>(qp);
  } else if (pkind == "inverse_radius") {
    const double c = r.has("potential.coefficient") ? r.real("potential.coefficient") : 0.01;
    potential = std::make_shared<InverseRadiusPotential>(c);
  } else if (auto target = builtin_target(pkind); !target.empty()) {
    potential = builtin_problem(target, epsilon).field.potential();
  } else {
    throw InvalidParameter("unknown potential.kind '" + pkind + "'");
  }

  std::shared_ptr<const MagneticField> magnetic;
  const std::string fkind = r.text("field.kind");
  if (fkind == "constant") {
    magnetic = std::make_shared<ConstantMagneticField>(r.vec3("field.B") / epsilon);
  } else if (auto target = builtin_target(fkind); !target.empty()) {
    magnetic = builtin_problem(target, epsilon).field.magnetic();
  } else {
    throw InvalidParameter("unknown field.kind '" + fkind + "'");
  }

  const Vec3 x0 = r.vec3("x0");
  const Vec3 v0 = r.vec3("v0");
  SkewMatrix3 S = default_momentum_matrix();
  if (r.has("S")) {
    const Mat3 m = r.mat3("S");
    if (!is_skew(m)) throw InvalidParameter("'S' must be skew-symmetric");
    S = SkewMatrix3(m);
  }
  r.reject_unused();

  return ProblemSpec{name, FieldModel(std::move(potential), std::move(magnetic)), x0, v0, epsilon, S};
}

ProblemSpec load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open problem file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

}  // namespace cpd
