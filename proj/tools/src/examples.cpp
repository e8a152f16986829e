#include <string>

#include "kemweb_cli/cli.hpp"

namespace kemweb::cli {

namespace {

std::string euclidean(int n) {
  std::string s = "# Cartesian coordinates on E^" + std::to_string(n) + "\n";
  s += "dim " + std::to_string(n) + "\ncoords";
  for (int i = 1; i <= n; ++i) s += " x" + std::to_string(i);
  s += "\n";
  for (int i = 1; i <= n; ++i) s += "domain x" + std::to_string(i) + " (-1) 1\n";
  for (int i = 1; i <= n; ++i) s += "sign x" + std::to_string(i) + " +\n";
  s += "mode sigma\n";
  for (int i = 1; i <= n; ++i) s += "phi x" + std::to_string(i) + " : 1\n";
  return s;
}

const char* kSphericalE3 = R"(# Spherical coordinates on E^3 in sigma form
dim 3
coords r theta phi
domain r 1 3
domain theta 0.3 2.8
domain phi 0 6
sign r +
sign theta +
sign phi +
mode sigma
phi r : r^-4
phi theta : 1/sin(theta)^2
phi phi : 1
sigma r theta : r^2
sigma r phi : r^2
sigma theta phi : sin(theta)^2
)";

const char* kEllipticE2 = R"(# Elliptic coordinates on E^2
dim 2
coords u v
domain u 0.5 1.5
domain v 0.2 1.0
sign u +
sign v +
mode raw
gii u : cosh(u)^2 - cos(v)^2
gii v : cosh(u)^2 - cos(v)^2
)";

const char* kSphereS2 = R"(# Unit sphere S^2
dim 2
coords theta phi
domain theta 0.3 2.8
domain phi 0 6
sign theta +
sign phi +
mode raw
gii theta : 1
gii phi : sin(theta)^2
)";

const char* kWarpedDemo = R"(# Warped product: base {x1, x2}, two one-dimensional blocks
dim 4
coords x1 x2 x3 x4
domain x1 3 4
domain x2 1 2
domain x3 0 1
domain x4 0 1
sign x1 +
sign x2 +
sign x3 +
sign x4 +
mode family
family warped
eigen x1 : x1
eigen x2 : x2
phi x1 : 1
phi x2 : -1
block x3 : 5
block x4 : 7
)";

const char* kIrregularDemo = R"(# Irregular metric with one connecting coordinate and two blocks
dim 3
coords r u v
domain r 1 2
domain u 0 1
domain v 0 1
sign r +
sign u +
sign v +
mode family
family irregular
base r
phi r : 1
block u : r^2
block v : exp(r)
)";

const char* kWarpedS3 = R"(# S^3 as a warped product over a one-dimensional base
dim 3
coords r u v
domain r 0.2 1.3
domain u 0 1
domain v 0 1
sign r +
sign u +
sign v +
mode warped
base r
gii r : 1
gii u : 1
gii v : 1
fiber u : cos(r)
fiber v : sin(r)
)";

}  // namespace

std::vector<std::string> example_names() {
  return {"euclidean-N", "spherical-e3", "elliptic-e2", "sphere-s2", "warped-demo", "irregular-demo", "warped-s3"};
}

std::optional<std::string> example_text(const std::string& name) {
  const std::string prefix = "euclidean-";
  if (name.rfind(prefix, 0) == 0 && name.size() == prefix.size() + 1) {
    const char d = name.back();
    if (d >= '1' && d <= '9') return euclidean(d - '0');
    return std::nullopt;
  }
  if (name == "spherical-e3") return kSphericalE3;
  if (name == "elliptic-e2") return kEllipticE2;
  if (name == "sphere-s2") return kSphereS2;
  if (name == "warped-demo") return kWarpedDemo;
  if (name == "irregular-demo") return kIrregularDemo;
  if (name == "warped-s3") return kWarpedS3;
  return std::nullopt;
}

}  // namespace kemweb::cli
