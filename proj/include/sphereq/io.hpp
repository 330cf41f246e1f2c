#pragma once

#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sphereq/agwp.hpp"
#include "sphereq/equations.hpp"
#include "sphereq/hashing.hpp"
#include "sphereq/reductions.hpp"

namespace sphereq {

// Line-oriented instance files. First line: "sphereq v1 <kind>" with kind in
// {spherical, cise, ssp, sis, isis, agwp} (plus "witness" for assignments).
// '#' starts a comment; blank lines are ignored; all numbers decimal.

using ParsedInstance =
    std::variant<SphericalInstance, CiseInstance, SspInstance, SisInstance, IsisInstance,
                 AgwpInstance>;

namespace detail {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

class FileCursor {
 public:
  explicit FileCursor(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
      ++number;
      if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      Line line{number, {}};
      std::istringstream ls(raw);
      std::string tok;
      while (ls >> tok) line.tokens.push_back(tok);
      if (!line.tokens.empty()) lines_.push_back(std::move(line));
    }
  }

  bool at_end() const { return pos_ >= lines_.size(); }

  int last_line() const { return lines_.empty() ? 0 : lines_.back().number; }

  const Line& next() {
    if (at_end()) throw SyntaxError(last_line(), "unexpected end of file");
    return lines_[pos_++];
  }

  const Line& expect(std::string_view key) {
    const Line& line = next();
    if (line.tokens.front() != key)
      throw SyntaxError(line.number,
                        "expected '" + std::string(key) + "', got '" + line.tokens.front() + "'");
    return line;
  }

  void expect_end() {
    if (!at_end())
      throw SyntaxError(lines_[pos_].number, "trailing content after the instance body");
  }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

inline std::uint64_t parse_u64(const std::string& tok, int line) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw SyntaxError(line, "expected a decimal number, got '" + tok + "'");
  return value;
}

/// n+1 tokens starting at `from`: vector digits then unit.
inline GroupElement parse_element(const Line& line, std::size_t from, const GroupParams& params) {
  if (line.tokens.size() != from + params.n + 1)
    throw SyntaxError(line.number, "expected " + std::to_string(params.n + 1) + " components");
  VectorZpn vec(params.n);
  for (std::size_t k = 0; k < params.n; ++k) vec[k] = parse_u64(line.tokens[from + k], line.number);
  const Unit unit = parse_u64(line.tokens[from + params.n], line.number);
  return make_element(params, std::move(vec), unit);
}

inline VectorZpn parse_vector(const Line& line, std::size_t from, std::size_t n) {
  if (line.tokens.size() != from + n)
    throw SyntaxError(line.number, "expected " + std::to_string(n) + " components");
  VectorZpn vec(n);
  for (std::size_t k = 0; k < n; ++k) vec[k] = parse_u64(line.tokens[from + k], line.number);
  return vec;
}

inline std::uint64_t keyed_u64(FileCursor& cur, std::string_view key) {
  const Line& line = cur.expect(key);
  if (line.tokens.size() != 2)
    throw SyntaxError(line.number, "expected '" + std::string(key) + " <number>'");
  return parse_u64(line.tokens[1], line.number);
}

inline std::pair<GroupParams, std::size_t> parse_common(FileCursor& cur) {
  const std::uint64_t p = keyed_u64(cur, "p");
  const std::uint64_t n = keyed_u64(cur, "n");
  const std::uint64_t m = keyed_u64(cur, "m");
  return {make_params(p, static_cast<std::size_t>(n)), static_cast<std::size_t>(m)};
}

inline SphericalInstance parse_spherical_body(FileCursor& cur) {
  const auto [params, m] = parse_common(cur);
  std::vector<GroupElement> coefficients;
  coefficients.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    coefficients.push_back(parse_element(cur.expect("c"), 1, params));
  GroupElement rhs = parse_element(cur.expect("rhs"), 1, params);
  return make_spherical(params, std::move(coefficients), std::move(rhs));
}

inline VariableConstraint parse_constraint(const Line& line, const GroupParams& params) {
  if (line.tokens.size() < 2) throw SyntaxError(line.number, "expected a constraint kind");
  const std::string& kind = line.tokens[1];
  if (kind == "free") return VariableConstraint::free();
  if (kind == "preset12") return VariableConstraint::preset12();
  if (kind == "preset123") return VariableConstraint::preset123();
  if (kind != "set") throw SyntaxError(line.number, "unknown constraint kind '" + kind + "'");
  if (line.tokens.size() < 3) throw SyntaxError(line.number, "expected 'set <count> <elements>'");
  const std::uint64_t count = parse_u64(line.tokens[2], line.number);
  const std::size_t stride = params.n + 1;
  if (line.tokens.size() != 3 + count * stride)
    throw SyntaxError(line.number, "expected " + std::to_string(count * stride) +
                                       " components after the count");
  std::vector<GroupElement> elements;
  elements.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    VectorZpn vec(params.n);
    for (std::size_t k = 0; k < params.n; ++k)
      vec[k] = parse_u64(line.tokens[3 + i * stride + k], line.number);
    const Unit unit = parse_u64(line.tokens[3 + i * stride + params.n], line.number);
    elements.push_back(make_element(params, std::move(vec), unit));
  }
  return VariableConstraint::explicit_set(std::move(elements));
}

inline CiseInstance parse_cise_body(FileCursor& cur) {
  SphericalInstance base = parse_spherical_body(cur);
  std::vector<VariableConstraint> constraints;
  constraints.reserve(base.coefficients.size());
  for (std::size_t i = 0; i < base.coefficients.size(); ++i)
    constraints.push_back(parse_constraint(cur.expect("constraint"), base.params));
  return make_cise(std::move(base), std::move(constraints));
}

inline SspInstance parse_ssp_body(FileCursor& cur) {
  const auto [params, m] = parse_common(cur);
  std::vector<VectorZpn> vectors;
  vectors.reserve(m);
  for (std::size_t i = 0; i < m; ++i) vectors.push_back(parse_vector(cur.expect("v"), 1, params.n));
  VectorZpn target = parse_vector(cur.expect("target"), 1, params.n);
  return make_ssp(params, std::move(vectors), std::move(target));
}

inline SisInstance parse_sis_body(FileCursor& cur) {
  const std::uint64_t p = keyed_u64(cur, "p");
  const std::size_t n = static_cast<std::size_t>(keyed_u64(cur, "n"));
  const std::size_t m = static_cast<std::size_t>(keyed_u64(cur, "m"));
  const Line& variant_line = cur.expect("variant");
  if (variant_line.tokens.size() != 2)
    throw SyntaxError(variant_line.number, "expected 'variant 01' or 'variant pm1'");
  SisVariant variant;
  if (variant_line.tokens[1] == "01")
    variant = SisVariant::ZeroOne;
  else if (variant_line.tokens[1] == "pm1")
    variant = SisVariant::PlusMinusOne;
  else
    throw SyntaxError(variant_line.number,
                      "unknown variant '" + variant_line.tokens[1] + "'");
  cur.expect("matrix");
  std::vector<VectorZpn> columns(m, VectorZpn(n));
  for (std::size_t k = 0; k < n && m > 0; ++k) {
    const Line& row = cur.next();
    if (row.tokens.size() != m)
      throw SyntaxError(row.number, "expected a row of " + std::to_string(m) + " entries");
    for (std::size_t j = 0; j < m; ++j) columns[j][k] = parse_u64(row.tokens[j], row.number);
  }
  return make_sis(p, n, std::move(columns), variant);
}

inline IsisInstance parse_isis_body(FileCursor& cur) {
  SisInstance base = parse_sis_body(cur);
  VectorZpn target = parse_vector(cur.expect("target"), 1, base.n);
  return make_isis(std::move(base), std::move(target));
}

inline AgwpInstance parse_agwp_body(FileCursor& cur) {
  const std::uint64_t p = keyed_u64(cur, "p");
  const std::size_t n = static_cast<std::size_t>(keyed_u64(cur, "n"));
  const GroupParams params = make_params(p, n);
  AgwpInstance inst;
  inst.params = params;
  inst.vertex_count = static_cast<std::size_t>(keyed_u64(cur, "vertices"));
  inst.alpha = static_cast<std::size_t>(keyed_u64(cur, "alpha"));
  inst.omega = static_cast<std::size_t>(keyed_u64(cur, "omega"));
  while (!cur.at_end()) {
    const Line& line = cur.expect("edge");
    if (line.tokens.size() != 3 + params.n + 1)
      throw SyntaxError(line.number, "expected 'edge <from> <to> <label components>'");
    AgwpEdge e;
    e.from = static_cast<std::size_t>(parse_u64(line.tokens[1], line.number));
    e.to = static_cast<std::size_t>(parse_u64(line.tokens[2], line.number));
    e.label = parse_element(line, 3, params);
    inst.edges.push_back(std::move(e));
  }
  validate_dag(inst);  // endpoints in range, acyclic
  return inst;
}

}  // namespace detail

inline ParsedInstance parse_instance(const std::string& text) {
  detail::FileCursor cur(text);
  const detail::Line& header = cur.next();
  if (header.tokens.size() != 3 || header.tokens[0] != "sphereq" || header.tokens[1] != "v1")
    throw SyntaxError(header.number, "expected header 'sphereq v1 <kind>'");
  const std::string& kind = header.tokens[2];
  ParsedInstance out = [&]() -> ParsedInstance {
    if (kind == "spherical") return detail::parse_spherical_body(cur);
    if (kind == "cise") return detail::parse_cise_body(cur);
    if (kind == "ssp") return detail::parse_ssp_body(cur);
    if (kind == "sis") return detail::parse_sis_body(cur);
    if (kind == "isis") return detail::parse_isis_body(cur);
    if (kind == "agwp") return detail::parse_agwp_body(cur);
    throw SyntaxError(header.number, "unknown instance kind '" + kind + "'");
  }();
  cur.expect_end();
  return out;
}

inline std::string instance_kind(const ParsedInstance& inst) {
  struct Visitor {
    std::string operator()(const SphericalInstance&) const { return "spherical"; }
    std::string operator()(const CiseInstance&) const { return "cise"; }
    std::string operator()(const SspInstance&) const { return "ssp"; }
    std::string operator()(const SisInstance&) const { return "sis"; }
    std::string operator()(const IsisInstance&) const { return "isis"; }
    std::string operator()(const AgwpInstance&) const { return "agwp"; }
  };
  return std::visit(Visitor{}, inst);
}

// ---------------------------------------------------------------------------
// Canonical serialization (no comments, fields in the documented order).

namespace detail {

inline void emit_common(std::ostringstream& out, const GroupParams& params, std::size_t m) {
  out << "p " << params.p << "\n";
  out << "n " << params.n << "\n";
  out << "m " << m << "\n";
}

}  // namespace detail

inline std::string serialize(const SphericalInstance& inst) {
  std::ostringstream out;
  out << "sphereq v1 spherical\n";
  detail::emit_common(out, inst.params, inst.coefficients.size());
  for (const auto& c : inst.coefficients) out << "c " << to_string(c) << "\n";
  out << "rhs " << to_string(inst.rhs) << "\n";
  return out.str();
}

inline std::string serialize(const CiseInstance& inst) {
  std::ostringstream out;
  out << "sphereq v1 cise\n";
  detail::emit_common(out, inst.base.params, inst.base.coefficients.size());
  for (const auto& c : inst.base.coefficients) out << "c " << to_string(c) << "\n";
  out << "rhs " << to_string(inst.base.rhs) << "\n";
  for (const auto& z : inst.constraints) {
    switch (z.kind()) {
      case VariableConstraint::Kind::Free:
        out << "constraint free\n";
        break;
      case VariableConstraint::Kind::Preset12:
        out << "constraint preset12\n";
        break;
      case VariableConstraint::Kind::Preset123:
        out << "constraint preset123\n";
        break;
      case VariableConstraint::Kind::Explicit: {
        out << "constraint set " << z.explicit_elements().size();
        for (const auto& g : z.explicit_elements()) out << ' ' << to_string(g);
        out << "\n";
        break;
      }
    }
  }
  return out.str();
}

inline std::string serialize(const SspInstance& inst) {
  std::ostringstream out;
  out << "sphereq v1 ssp\n";
  detail::emit_common(out, inst.params, inst.vectors.size());
  for (const auto& v : inst.vectors) out << "v " << to_string(v) << "\n";
  out << "target " << to_string(inst.target) << "\n";
  return out.str();
}

namespace detail {

inline void emit_sis_body(std::ostringstream& out, const SisInstance& inst) {
  out << "p " << inst.p << "\n";
  out << "n " << inst.n << "\n";
  out << "m " << inst.columns.size() << "\n";
  out << "variant " << (inst.variant == SisVariant::ZeroOne ? "01" : "pm1") << "\n";
  out << "matrix\n";
  if (!inst.columns.empty())
    for (std::size_t k = 0; k < inst.n; ++k) {
      for (std::size_t j = 0; j < inst.columns.size(); ++j) {
        if (j) out << ' ';
        out << inst.columns[j][k];
      }
      out << "\n";
    }
}

}  // namespace detail

inline std::string serialize(const SisInstance& inst) {
  std::ostringstream out;
  out << "sphereq v1 sis\n";
  detail::emit_sis_body(out, inst);
  return out.str();
}

inline std::string serialize(const IsisInstance& inst) {
  std::ostringstream out;
  out << "sphereq v1 isis\n";
  detail::emit_sis_body(out, inst.base);
  out << "target " << to_string(inst.target) << "\n";
  return out.str();
}

inline std::string serialize(const AgwpInstance& inst) {
  std::ostringstream out;
  out << "sphereq v1 agwp\n";
  out << "p " << inst.params.p << "\n";
  out << "n " << inst.params.n << "\n";
  out << "vertices " << inst.vertex_count << "\n";
  out << "alpha " << inst.alpha << "\n";
  out << "omega " << inst.omega << "\n";
  for (const auto& e : inst.edges)
    out << "edge " << e.from << ' ' << e.to << ' ' << to_string(e.label) << "\n";
  return out.str();
}

inline std::string serialize(const ParsedInstance& inst) {
  return std::visit([](const auto& x) { return serialize(x); }, inst);
}

// ---------------------------------------------------------------------------
// Witness files ("sphereq v1 witness"): one "z" line per variable.

inline std::string serialize_witness(const GroupParams& params, const Assignment& a) {
  std::ostringstream out;
  out << "sphereq v1 witness\n";
  detail::emit_common(out, params, a.values.size());
  for (const auto& z : a.values) out << "z " << to_string(z) << "\n";
  return out.str();
}

inline std::pair<GroupParams, Assignment> parse_witness(const std::string& text) {
  detail::FileCursor cur(text);
  const detail::Line& header = cur.next();
  if (header.tokens.size() != 3 || header.tokens[0] != "sphereq" || header.tokens[1] != "v1" ||
      header.tokens[2] != "witness")
    throw SyntaxError(header.number, "expected header 'sphereq v1 witness'");
  const auto [params, m] = detail::parse_common(cur);
  Assignment a;
  a.values.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    a.values.push_back(detail::parse_element(cur.expect("z"), 1, params));
  cur.expect_end();
  return {params, std::move(a)};
}

// ---------------------------------------------------------------------------
// Small inline parsers for command-line values.

inline BitString parse_bits(const std::string& text) {
  if (text.empty()) throw InvariantViolation("empty bit string");
  BitString out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw InvariantViolation("bit string must be over {0,1}");
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return out;
}

inline GroupElement parse_element_text(const std::string& text, const GroupParams& params) {
  detail::Line line{0, {}};
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) line.tokens.push_back(tok);
  return detail::parse_element(line, 0, params);
}

inline std::string to_string(const ShortVector& x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(static_cast<int>(x[i]));
  }
  return out;
}

inline std::string to_string(const BitString& bits) {
  std::string out;
  out.reserve(bits.size());
  for (std::uint8_t b : bits) out += static_cast<char>('0' + b);
  return out;
}

}  // namespace sphereq
