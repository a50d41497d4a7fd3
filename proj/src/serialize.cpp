#include "sisctl/serialize.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>

#include "sisctl/error.hpp"

namespace sisctl {

void to_json(json& j, const ModelParams& p) {
  j = json{{"alpha", p.alpha}, {"beta", p.beta},   {"gamma", p.gamma},
           {"sigma", p.sigma}, {"delta", p.delta}};
}

void from_json(const json& j, ModelParams& p) {
  j.at("alpha").get_to(p.alpha);
  j.at("beta").get_to(p.beta);
  j.at("gamma").get_to(p.gamma);
  j.at("sigma").get_to(p.sigma);
  j.at("delta").get_to(p.delta);
}

void to_json(json& j, const CostParams& k) {
  j = json{{"a0", k.a0},   {"aI", k.aI}, {"amI", k.amI},
           {"amS", k.amS}, {"ar", k.ar}};
}

void from_json(const json& j, CostParams& k) {
  j.at("a0").get_to(k.a0);
  j.at("aI").get_to(k.aI);
  j.at("amI").get_to(k.amI);
  j.at("amS").get_to(k.amS);
  j.at("ar").get_to(k.ar);
}

void to_json(json& j, const Grid& g) {
  j = json{{"x_lo", g.x_lo}, {"x_hi", g.x_hi}, {"n", g.n}};
}

void from_json(const json& j, Grid& g) {
  j.at("x_lo").get_to(g.x_lo);
  j.at("x_hi").get_to(g.x_hi);
  j.at("n").get_to(g.n);
}

void to_json(json& j, const McConfig& c) {
  j = json{{"dt", c.dt},
           {"horizon", c.horizon},
           {"n_paths", c.n_paths},
           {"seed", c.seed},
           {"clamp_eps", c.clamp_eps},
           {"batch_size", c.batch_size},
           {"quadrature", to_string(c.quadrature)},
           {"tail_tolerance", c.tail_tolerance},
           {"tail_closure", c.tail_closure},
           {"neumann_warn_fraction", c.neumann_warn_fraction}};
}

void from_json(const json& j, McConfig& c) {
  j.at("dt").get_to(c.dt);
  j.at("horizon").get_to(c.horizon);
  j.at("n_paths").get_to(c.n_paths);
  j.at("seed").get_to(c.seed);
  j.at("clamp_eps").get_to(c.clamp_eps);
  j.at("batch_size").get_to(c.batch_size);
  c.quadrature = quadrature_from_string(j.at("quadrature").get<std::string>());
  j.at("tail_tolerance").get_to(c.tail_tolerance);
  j.at("tail_closure").get_to(c.tail_closure);
  j.at("neumann_warn_fraction").get_to(c.neumann_warn_fraction);
}

void to_json(json& j, const PiaConfig& c) {
  j = json{{"eps", c.eps},
           {"max_iter", c.max_iter},
           {"mode", to_string(c.mode)},
           {"refresh_boundary", c.refresh_boundary},
           {"rho_max", c.rho_max},
           {"boundary_step_nodes", c.boundary_step_nodes},
           {"boundary_step_min", c.boundary_step_min},
           {"residual_edge_fraction", c.residual_edge_fraction},
           {"edge_controls", to_string(c.edge_controls)}};
}

void from_json(const json& j, PiaConfig& c) {
  j.at("eps").get_to(c.eps);
  j.at("max_iter").get_to(c.max_iter);
  c.mode = update_mode_from_string(j.at("mode").get<std::string>().c_str());
  j.at("refresh_boundary").get_to(c.refresh_boundary);
  j.at("rho_max").get_to(c.rho_max);
  j.at("boundary_step_nodes").get_to(c.boundary_step_nodes);
  j.at("boundary_step_min").get_to(c.boundary_step_min);
  j.at("residual_edge_fraction").get_to(c.residual_edge_fraction);
  c.edge_controls =
      edge_controls_from_string(j.at("edge_controls").get<std::string>());
}

std::string content_hash(std::string_view text) {
  const std::string blob =
      "blob " + std::to_string(text.size()) + std::string(1, '\0') +
      std::string(text);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(),
                 nullptr) != 1) {
    throw Error(ErrorKind::Io, "content_hash: SHA-1 digest failed");
  }
  static const char* const hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string format_number(double v) {
  char buf[40];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace sisctl
