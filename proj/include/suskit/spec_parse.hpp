#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "suskit/graph.hpp"
#include "suskit/kernel.hpp"
#include "suskit/typespace.hpp"

namespace suskit {

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse " + what + " from '" + s + "'");
  }
}

inline std::size_t parse_size(const std::string& s, const std::string& what) {
  const double v = parse_double(s, what);
  if (v < 0 || v != std::floor(v)) throw std::invalid_argument(what + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

/// Kernel catalog lookup by spec string:
///   constant:<c> | chkns | dubins | rank1:psi=<one|linear|one_plus_x>
///   | max:phi=<one|one_minus_x|inv> | finite:2,eps=<e>
/// The rank-1 psis other than `one` carry no boundedness metadata (the
/// sup depends on the space they are paired with), so graph sampling
/// for them falls back to the exact pair loop.
inline Kernel parse_kernel(const std::string& spec) {
  const auto parts = detail::split(spec, ':');
  const std::string& head = parts[0];
  if (head == "constant") {
    if (parts.size() != 2) throw std::invalid_argument("constant kernel spec: constant:<c>");
    return constant_kernel(detail::parse_double(parts[1], "constant level"));
  }
  if (head == "chkns") return chkns_kernel();
  if (head == "dubins") return dubins_kernel();
  if (head == "rank1") {
    if (parts.size() != 2 || parts[1].rfind("psi=", 0) != 0)
      throw std::invalid_argument("rank1 kernel spec: rank1:psi=<name>");
    const std::string psi = parts[1].substr(4);
    if (psi == "one") return rank1_kernel([](double) { return 1.0; }, "one", 1.0);
    if (psi == "linear") return rank1_kernel([](double x) { return x; }, "linear");
    if (psi == "one_plus_x") return rank1_kernel([](double x) { return 1.0 + x; }, "one_plus_x");
    throw std::invalid_argument("unknown rank1 psi '" + psi + "'");
  }
  if (head == "max") {
    if (parts.size() != 2 || parts[1].rfind("phi=", 0) != 0)
      throw std::invalid_argument("max kernel spec: max:phi=<name>");
    const std::string phi = parts[1].substr(4);
    if (phi == "one") return max_kernel([](double) { return 1.0; }, "one", 1.0);
    if (phi == "one_minus_x") return max_kernel([](double x) { return 1.0 - x; }, "one_minus_x", 1.0);
    if (phi == "inv") return dubins_kernel();
    throw std::invalid_argument("unknown max-kernel phi '" + phi + "'");
  }
  if (head == "finite") {
    // Example-E2 family: finite:2,eps=<e> gives [[2, e], [e, 1]].
    if (parts.size() != 2) throw std::invalid_argument("finite kernel spec: finite:2,eps=<e>");
    const auto args = detail::split(parts[1], ',');
    if (args.size() != 2 || args[0] != "2" || args[1].rfind("eps=", 0) != 0)
      throw std::invalid_argument("finite kernel spec: finite:2,eps=<e>");
    const double eps = detail::parse_double(args[1].substr(4), "eps");
    if (eps < 0.0) throw std::invalid_argument("finite kernel: eps must be >= 0");
    return finite_kernel({{2.0, eps}, {eps, 1.0}});
  }
  throw std::invalid_argument("unknown kernel spec '" + spec + "'");
}

/// Mesh catalog:
///   atom | uniform:<m> | graded:<m>:<gamma> | powerlaw:<q>:<xmax>:<m>
///   | finite:<w1>,<w2>,...
inline TypeSpace parse_mesh(const std::string& spec) {
  const auto parts = detail::split(spec, ':');
  const std::string& head = parts[0];
  if (head == "atom") {
    if (parts.size() != 1) throw std::invalid_argument("atom mesh spec takes no arguments");
    return build_finite_space({1.0});
  }
  if (head == "uniform") {
    if (parts.size() != 2) throw std::invalid_argument("uniform mesh spec: uniform:<m>");
    return build_uniform_mesh(detail::parse_size(parts[1], "mesh size"));
  }
  if (head == "graded") {
    if (parts.size() != 3) throw std::invalid_argument("graded mesh spec: graded:<m>:<gamma>");
    return build_graded_mesh(detail::parse_size(parts[1], "mesh size"),
                             detail::parse_double(parts[2], "gamma"));
  }
  if (head == "powerlaw") {
    if (parts.size() != 4)
      throw std::invalid_argument("powerlaw mesh spec: powerlaw:<q>:<xmax>:<m>");
    return build_powerlaw_space(detail::parse_double(parts[1], "q"),
                                detail::parse_double(parts[2], "x_max"),
                                detail::parse_size(parts[3], "mesh size"));
  }
  if (head == "finite") {
    if (parts.size() != 2) throw std::invalid_argument("finite mesh spec: finite:<w1>,<w2>,...");
    std::vector<double> masses;
    for (const auto& tok : detail::split(parts[1], ','))
      masses.push_back(detail::parse_double(tok, "mass"));
    return build_finite_space(masses);
  }
  throw std::invalid_argument("unknown mesh spec '" + spec + "'");
}

/// Vertex-space catalog for graph sampling:
///   atom | uniform | grid | powerlaw:<q>:<xmax> | finite:<w1>,...
inline VertexSpec parse_vertex_spec(const std::string& spec) {
  const auto parts = detail::split(spec, ':');
  const std::string& head = parts[0];
  if (head == "atom") return VertexSpec::iid(TypeDistribution::single_atom());
  if (head == "uniform") return VertexSpec::iid(TypeDistribution::uniform());
  if (head == "grid") return VertexSpec::grid();
  if (head == "powerlaw") {
    if (parts.size() != 3) throw std::invalid_argument("powerlaw space spec: powerlaw:<q>:<xmax>");
    return VertexSpec::iid(TypeDistribution::powerlaw(detail::parse_double(parts[1], "q"),
                                                      detail::parse_double(parts[2], "x_max")));
  }
  if (head == "finite") {
    if (parts.size() != 2) throw std::invalid_argument("finite space spec: finite:<w1>,<w2>,...");
    std::vector<double> masses;
    for (const auto& tok : detail::split(parts[1], ','))
      masses.push_back(detail::parse_double(tok, "mass"));
    return VertexSpec::iid(TypeDistribution::finite(masses));
  }
  throw std::invalid_argument("unknown vertex space spec '" + spec + "'");
}

/// Lambda grid "a:b:steps" -> inclusive linspace.
inline std::vector<double> parse_lambda_grid(const std::string& spec) {
  const auto parts = detail::split(spec, ':');
  if (parts.size() != 3) throw std::invalid_argument("lambda grid spec: <a>:<b>:<steps>");
  const double a = detail::parse_double(parts[0], "grid start");
  const double b = detail::parse_double(parts[1], "grid end");
  const std::size_t steps = detail::parse_size(parts[2], "grid steps");
  if (steps < 1) throw std::invalid_argument("lambda grid needs at least one step");
  std::vector<double> out;
  if (steps == 1) {
    out.push_back(a);
    return out;
  }
  for (std::size_t i = 0; i < steps; ++i)
    out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(steps - 1));
  return out;
}

}  // namespace suskit
