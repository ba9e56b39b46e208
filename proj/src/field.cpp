#include "lightcone/field.hpp"

#include <cstring>
#include <fstream>

namespace lightcone {

SampledField zero_field(const GridSpec& spec) {
  spec.validate();
  return SampledField{spec, Array::Zero(spec.node_count())};
}

void validate_field(const SampledField& f) {
  f.spec.validate();
  if (f.values.size() != f.spec.node_count())
    throw std::invalid_argument("SampledField: value count does not match grid");
  if (!f.values.isFinite().all())
    throw std::invalid_argument("SampledField: values must be finite");
  if ((f.values < 0.0).any())
    throw std::invalid_argument("SampledField: values must be non-negative");
}

Real lp_norm(const SampledField& f, Real p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const Real sum = f.values.pow(p).sum() * f.spec.cell_volume();
  return std::pow(sum, 1.0 / p);
}

SampledField dilate(const SampledField& f, Real lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("dilate: lambda must be positive");
  GridSpec out_spec = f.spec;
  out_spec.L = f.spec.L / lambda;
  out_spec.T = f.spec.T / lambda;
  SampledField out = zero_field(out_spec);

  const std::int64_t spn = out_spec.spatial_count();
  const int m = out_spec.m;
  std::int64_t idx[kMaxDim];
  Real pos[kMaxDim];
  for (std::int64_t sp = 0; sp < spn; ++sp) {
    decode_spatial(out_spec, sp, idx);
    for (int d = 0; d < out_spec.n; ++d)
      pos[d] = lambda * out_spec.x_coord(idx[d]);
    for (int it = 0; it < m; ++it) {
      const Real tpos = lambda * out_spec.t_coord(it);
      out.values[sp * m + it] = sample_nearest(f, pos, tpos);
    }
  }
  return out;
}

TestFieldKind parse_field_kind(const std::string& name) {
  if (name == "gaussian") return TestFieldKind::gaussian;
  if (name == "ball" || name == "ball_indicator")
    return TestFieldKind::ball_indicator;
  if (name == "cone-bump" || name == "cone_bump")
    return TestFieldKind::cone_bump;
  if (name == "checkerboard") return TestFieldKind::checkerboard;
  throw std::invalid_argument("unknown test field kind: " + name);
}

std::string field_kind_name(TestFieldKind kind) {
  switch (kind) {
    case TestFieldKind::gaussian: return "gaussian";
    case TestFieldKind::ball_indicator: return "ball";
    case TestFieldKind::cone_bump: return "cone-bump";
    case TestFieldKind::checkerboard: return "checkerboard";
  }
  return "unknown";
}

SampledField make_test_field(TestFieldKind kind, const GridSpec& spec,
                             const TestFieldParams& params) {
  SampledField out = zero_field(spec);
  const int m = spec.m;
  const std::int64_t spn = spec.spatial_count();

  // erosion margin in (u, v): nearest-node extension moves a point by at
  // most hx/2 per spatial axis and ht/2 in time
  const Real margin =
      1.01 * (0.5 * spec.ht() + 0.5 * spec.hx() * std::sqrt(Real(spec.n)));
  const int jc = static_cast<int>(params.cell.j);
  const Real u_lo = std::ldexp(1.0, jc) + margin;
  const Real u_hi = std::ldexp(1.0, jc + 1) - margin;
  const Real v_lo = std::ldexp(1.0, jc - params.cell.ell) + margin;
  const Real v_hi = std::ldexp(1.0, jc - params.cell.ell + 1) - margin;

  std::int64_t idx[kMaxDim];
  for (std::int64_t sp = 0; sp < spn; ++sp) {
    decode_spatial(spec, sp, idx);
    Real x[kMaxDim];
    for (int d = 0; d < spec.n; ++d) x[d] = spec.x_coord(idx[d]);
    for (int it = 0; it < m; ++it) {
      const Real t = spec.t_coord(it);
      Real value = 0.0;
      switch (kind) {
        case TestFieldKind::gaussian: {
          Real r2 = 0.0;
          for (int d = 0; d < spec.n; ++d) {
            const Real dz = x[d] - params.center[d];
            r2 += dz * dz;
          }
          const Real dt = t - params.center[spec.n];
          r2 += dt * dt;
          if (r2 <= params.cutoff * params.cutoff)
            value = std::exp(-r2 / (2.0 * params.sigma * params.sigma));
          break;
        }
        case TestFieldKind::ball_indicator: {
          Real r2 = 0.0;
          for (int d = 0; d < spec.n; ++d) {
            const Real dz = x[d] - params.center[d];
            r2 += dz * dz;
          }
          const Real dt = t - params.center[spec.n];
          r2 += dt * dt;
          value = (r2 <= params.radius * params.radius) ? 1.0 : 0.0;
          break;
        }
        case TestFieldKind::cone_bump: {
          Real r = 0.0;
          for (int d = 0; d < spec.n; ++d) r += x[d] * x[d];
          r = std::sqrt(r);
          const Real u = std::abs(t) + r;
          const Real v = std::abs(t) - r;
          value = (u >= u_lo && u < u_hi && v >= v_lo && v < v_hi) ? 1.0 : 0.0;
          break;
        }
        case TestFieldKind::checkerboard: {
          std::int64_t parity = 0;
          for (int d = 0; d < spec.n; ++d)
            parity += std::int64_t(std::floor(x[d] / params.block));
          parity += std::int64_t(std::floor(t / params.block));
          value = (parity % 2 + 2) % 2 == 0 ? 1.0 : 0.0;
          break;
        }
      }
      out.values[sp * m + it] = value;
    }
  }
  return out;
}

namespace {
constexpr char kMagic[4] = {'L', 'C', 'F', '1'};
}

void save_field(const SampledField& f, const std::filesystem::path& path) {
  validate_field(f);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_field: cannot open " + path.string());
  os.write(kMagic, 4);
  const std::int32_t n = f.spec.n;
  const std::int32_t m = f.spec.m;
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&m), sizeof m);
  os.write(reinterpret_cast<const char*>(&f.spec.L), sizeof(Real));
  os.write(reinterpret_cast<const char*>(&f.spec.T), sizeof(Real));
  os.write(reinterpret_cast<const char*>(f.values.data()),
           std::streamsize(sizeof(Real)) * f.values.size());
  if (!os) throw std::runtime_error("save_field: write failed");
}

SampledField load_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_field: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("load_field: not a field file");
  std::int32_t n = 0, m = 0;
  GridSpec spec;
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&m), sizeof m);
  is.read(reinterpret_cast<char*>(&spec.L), sizeof(Real));
  is.read(reinterpret_cast<char*>(&spec.T), sizeof(Real));
  spec.n = n;
  spec.m = m;
  spec.validate();
  SampledField f{spec, Array(spec.node_count())};
  is.read(reinterpret_cast<char*>(f.values.data()),
          std::streamsize(sizeof(Real)) * f.values.size());
  if (!is) throw std::runtime_error("load_field: truncated field file");
  validate_field(f);
  return f;
}

}  // namespace lightcone
