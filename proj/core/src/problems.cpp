#include "crp/problems.hpp"

#include <sstream>

#include "crp/errors.hpp"

namespace crp {

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::LP:
      return "LP";
    case ProblemKind::BP:
      return "BP";
    case ProblemKind::LASSO:
      return "LASSO";
  }
  return "?";
}

ProblemKind parse_problem_kind(std::string_view text) {
  if (text == "LP") return ProblemKind::LP;
  if (text == "BP") return ProblemKind::BP;
  if (text == "LASSO") return ProblemKind::LASSO;
  throw ParseError("unknown problem family '" + std::string(text) + "'");
}

Rational Family::parameter() const {
  switch (kind) {
    case ProblemKind::BP:
      return eta;
    case ProblemKind::LASSO:
      return lambda;
    case ProblemKind::LP:
      break;
  }
  return Rational(0);
}

namespace {

const Rational kHalf(1, 2);

void require_dims(const Dims& dims) {
  if (dims.n1 < 2) throw DimensionError("N1 must be at least 2");
  if (dims.n2 < 1) throw DimensionError("N2 must be at least 1");
  if (dims.n1 < dims.n2 + 1) {
    throw DimensionError("N1 must be at least N2+1 (N1=" + std::to_string(dims.n1) +
                         ", N2=" + std::to_string(dims.n2) + ")");
  }
}

void require_params(const Family& family, const InstanceParams& p) {
  const auto& theta = family.theta;
  for (const auto* u : {&p.u1, &p.u2}) {
    if (*u < theta || *u > kHalf) {
      throw DomainError("u=" + u->str() + " outside [theta, 1/2] with theta=" + theta.str());
    }
  }
  if (p.u1 != kHalf && p.u2 != kHalf) throw DomainError("at most one of u1, u2 may differ from 1/2");
}

// Scale s such that the minimizers are s*e1, s*e2 or the segment between them.
Rational closed_form_scale(const Family& f, const Rational& umax) {
  switch (f.kind) {
    case ProblemKind::LP:
      return Rational(2) * f.kappa / umax;
    case ProblemKind::BP:
      return (Rational(2) * f.kappa - f.eta) / umax;
    case ProblemKind::LASSO:
      return (Rational(4) * umax * f.kappa - f.lambda) / (Rational(2) * umax * umax);
  }
  return Rational(0);
}

Rational anchor_scale(const Family& f) {
  switch (f.kind) {
    case ProblemKind::LP:
      return Rational(4) * f.kappa;
    case ProblemKind::BP:
      return Rational(2) * (Rational(2) * f.kappa - f.eta);
    case ProblemKind::LASSO:
      return Rational(2) * (Rational(2) * f.kappa - f.lambda);
  }
  return Rational(0);
}

Rational l1(const Vec& x) {
  Rational s;
  for (const auto& v : x) s += v.abs();
  return s;
}

}  // namespace

void require_valid(const Family& f) {
  if (f.kappa.sign() <= 0) throw ConfigurationError("kappa must be positive");
  if (f.theta < Rational(1, 8) || f.theta > Rational(1, 4)) {
    throw ConfigurationError("theta must lie in [1/8, 1/4], got " + f.theta.str());
  }
  const Rational two_kappa = Rational(2) * f.kappa;
  if (f.kind == ProblemKind::BP && (f.eta.sign() <= 0 || f.eta > two_kappa)) {
    throw ConfigurationError("BP needs 0 < eta <= 2*kappa, got eta=" + f.eta.str());
  }
  if (f.kind == ProblemKind::LASSO) {
    if (f.lambda.sign() <= 0 || f.lambda > two_kappa) {
      throw ConfigurationError("LASSO needs 0 < lambda <= 2*kappa, got lambda=" + f.lambda.str());
    }
    if (kHalf < f.lambda / (Rational(4) * f.kappa)) throw ConfigurationError("LASSO needs 1/2 >= lambda/(4*kappa)");
  }
  const auto sep = validate_separation(f);
  if (!sep.ok) {
    throw ConfigurationError("anchor separation fails: dist(y1,y2)=" + sep.distance.describe() +
                             " is not greater than 2*kappa=" + two_kappa.str() + " under p=" + f.norm.str());
  }
}

SeparationCheck validate_separation(const Family& f) {
  const Dims d{2, 1};
  const Rational s = anchor_scale(f);
  auto dist = dist_point(basis_vector(d.n1, 1, s), basis_vector(d.n1, 2, s), f.norm);
  const bool ok = dist.exceeds(Rational(2) * f.kappa);
  return SeparationCheck{ok, std::move(dist)};
}

ProblemInstance::ProblemInstance(Family family, Dims dims, InstanceParams params)
    : family_(std::move(family)), dims_(dims), params_(std::move(params)) {
  require_valid(family_);
  require_dims(dims_);
  require_params(family_, params_);
  u_.assign(dims_.n2, Vec(dims_.n1));
  u_[0][0] = params_.u1;
  u_[0][1] = params_.u2;
  for (std::size_t i = 1; i < dims_.n2; ++i) u_[i][i + 1] = Rational(1);
  b_.assign(dims_.n2, Rational(0));
  b_[0] = Rational(2) * family_.kappa;
}

const Rational& ProblemInstance::coordinate(std::size_t i) const {
  if (i < 1 || i > coordinate_count()) {
    throw DimensionError("coordinate index " + std::to_string(i) + " outside 1.." + std::to_string(coordinate_count()));
  }
  const std::size_t entries = dims_.n2 * dims_.n1;
  if (i <= entries) return u_[(i - 1) / dims_.n1][(i - 1) % dims_.n1];
  return b_[i - entries - 1];
}

ProblemInstance build_instance(const Family& family, const Dims& dims, const InstanceParams& params) {
  return ProblemInstance(family, dims, params);
}

SolutionSet solve_closed_form(const ProblemInstance& inst) {
  const auto& p = inst.params();
  const std::size_t n = inst.dims().n1;
  const Rational umax = max(p.u1, p.u2);
  const Rational s = closed_form_scale(inst.family(), umax);
  if (p.u1 > p.u2) return PointSolution{basis_vector(n, 1, s)};
  if (p.u2 > p.u1) return PointSolution{basis_vector(n, 2, s)};
  return SegmentSolution{basis_vector(n, 1, s), basis_vector(n, 2, s)};
}

Rational optimal_value(const ProblemInstance& inst) {
  const auto& f = inst.family();
  const Rational umax = max(inst.params().u1, inst.params().u2);
  const Rational s = closed_form_scale(f, umax);
  if (f.kind == ProblemKind::LASSO) {
    const Rational r = umax * s - Rational(2) * f.kappa;
    return f.lambda * s + r * r;
  }
  return s;
}

std::string format_solution(const SolutionSet& s) {
  if (const auto* pt = std::get_if<PointSolution>(&s)) return "Point" + format_vec(pt->point);
  const auto& seg = std::get<SegmentSolution>(s);
  return "Segment[" + format_vec(seg.a) + "," + format_vec(seg.b) + "]";
}

Distance distance_to(const SolutionSet& s, const Vec& x, PNorm norm) {
  if (const auto* pt = std::get_if<PointSolution>(&s)) return dist_point(x, pt->point, norm);
  const auto& seg = std::get<SegmentSolution>(s);
  return dist_segment(x, seg.a, seg.b, norm);
}

AnchorSets anchor_sets(const Family& family, const Dims& dims) {
  require_valid(family);
  require_dims(dims);
  const Rational s = anchor_scale(family);
  Vec y1 = basis_vector(dims.n1, 1, s);
  Vec y2 = basis_vector(dims.n1, 2, s);
  return AnchorSets{SegmentSolution{y1, y2}, y1, y2};
}

ProblemInstance iota_anchor(const Family& family, const Dims& dims, int j, std::uint64_t t) {
  if (j == 0) return ProblemInstance(family, dims, InstanceParams{});
  if (j != 1 && j != 2) throw DomainError("anchor index must be 0, 1 or 2");
  if (t < 1) throw DomainError("anchor step t must be at least 1");
  const Rational shifted = kHalf - dyadic(2 * t);
  if (j == 1) return ProblemInstance(family, dims, InstanceParams{kHalf, shifted});
  return ProblemInstance(family, dims, InstanceParams{shifted, kHalf});
}

ObjectiveValue objective_value(const ProblemInstance& inst, const Vec& x) {
  const auto& dims = inst.dims();
  if (x.size() != dims.n1) {
    throw DimensionError("point has length " + std::to_string(x.size()) + ", expected " + std::to_string(dims.n1));
  }
  Vec residual(dims.n2);
  for (std::size_t i = 0; i < dims.n2; ++i) {
    Rational acc;
    for (std::size_t k = 0; k < dims.n1; ++k) {
      if (!inst.matrix()[i][k].is_zero()) acc += inst.matrix()[i][k] * x[k];
    }
    residual[i] = acc - inst.rhs()[i];
  }
  Rational rr;
  for (const auto& r : residual) rr += r * r;
  const auto& f = inst.family();
  switch (f.kind) {
    case ProblemKind::LP: {
      Rational sum;
      bool feasible = rr.is_zero();
      for (const auto& v : x) {
        sum += v;
        if (v.sign() < 0) feasible = false;
      }
      return {sum, feasible};
    }
    case ProblemKind::BP:
      return {l1(x), rr <= f.eta * f.eta};
    case ProblemKind::LASSO:
      return {f.lambda * l1(x) + rr, true};
  }
  return {};
}

GridResult brute_force_oracle(const ProblemInstance& inst, const Rational& h) {
  if (h.sign() <= 0) throw DomainError("grid step must be positive");
  const auto& f = inst.family();
  const Rational box = Rational(6) * f.kappa / f.theta;
  const Rational& u1 = inst.params().u1;
  const Rational& u2 = inst.params().u2;
  const Rational two_kappa = Rational(2) * f.kappa;
  const Rational eta_sq = f.eta * f.eta;

  std::optional<Rational> best;
  Rational bx1;
  Rational bx2;
  // Only the first row of U touches x1, x2; the remaining rows are satisfied by zeros.
  for (Rational x1; x1 <= box; x1 += h) {
    if (f.kind == ProblemKind::LP) {
      const Rational x2 = (two_kappa - u1 * x1) / u2;
      if (x2.sign() < 0) break;
      const Rational value = x1 + x2;
      if (!best || value < *best) {
        best = value;
        bx1 = x1;
        bx2 = x2;
      }
      continue;
    }
    for (Rational x2; x2 <= box; x2 += h) {
      const Rational r = u1 * x1 + u2 * x2 - two_kappa;
      const Rational rr = r * r;
      Rational value;
      if (f.kind == ProblemKind::BP) {
        if (rr > eta_sq) continue;
        value = x1 + x2;
      } else {
        value = f.lambda * (x1 + x2) + rr;
      }
      if (!best || value < *best) {
        best = value;
        bx1 = x1;
        bx2 = x2;
      }
    }
  }
  if (!best) throw DomainError("grid contains no feasible point; reduce the grid step");
  Vec point(inst.dims().n1);
  point[0] = bx1;
  point[1] = bx2;
  return GridResult{std::move(point), *best};
}

Rational grid_gap_bound(const ProblemInstance& inst, const Rational& h) {
  const auto& f = inst.family();
  const Rational umax = max(inst.params().u1, inst.params().u2);
  switch (f.kind) {
    case ProblemKind::LP:
      // Along the feasible line the objective has slope |1 - u1/u2| <= 1/(2 theta).
      return h / (Rational(2) * f.theta);
    case ProblemKind::BP:
      // l1 is 1-Lipschitz and rounding the optimum outward stays inside the slab.
      return Rational(2) * h;
    case ProblemKind::LASSO: {
      // Rounding each coordinate to the nearest grid point moves x by h/2 per
      // coordinate and Ux by at most umax*h.
      const Rational r = f.lambda / (Rational(2) * umax);
      return f.lambda * h + Rational(2) * r * umax * h + umax * umax * h * h;
    }
  }
  return Rational(0);
}

FieldMap parse_fields(std::string_view record) {
  FieldMap out;
  std::istringstream in{std::string(record)};
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("malformed field '" + token + "'");
    auto key = token.substr(0, eq);
    if (out.count(key)) throw ParseError("duplicate field '" + key + "'");
    out.emplace(std::move(key), token.substr(eq + 1));
  }
  return out;
}

const std::string& require_field(const FieldMap& fields, std::string_view key) {
  const auto it = fields.find(key);
  if (it == fields.end()) throw ParseError("missing field '" + std::string(key) + "'");
  return it->second;
}

std::string serialize_family(const Family& f) {
  std::string out = "family=" + to_string(f.kind) + " kappa=" + f.kappa.canonical();
  if (f.kind == ProblemKind::BP) out += " eta=" + f.eta.canonical();
  if (f.kind == ProblemKind::LASSO) out += " lambda=" + f.lambda.canonical();
  out += " p=" + f.norm.str() + " theta=" + f.theta.canonical();
  return out;
}

Family parse_family(const FieldMap& fields) {
  Family f;
  f.kind = parse_problem_kind(require_field(fields, "family"));
  f.kappa = Rational::parse_canonical(require_field(fields, "kappa"));
  if (f.kind == ProblemKind::BP) f.eta = Rational::parse_canonical(require_field(fields, "eta"));
  if (f.kind == ProblemKind::LASSO) f.lambda = Rational::parse_canonical(require_field(fields, "lambda"));
  f.norm = PNorm::parse(require_field(fields, "p"));
  f.theta = Rational::parse_canonical(require_field(fields, "theta"));
  return f;
}

std::string serialize_instance(const ProblemInstance& inst) {
  return "instance " + serialize_family(inst.family()) + " N1=" + std::to_string(inst.dims().n1) +
         " N2=" + std::to_string(inst.dims().n2) + " u1=" + inst.params().u1.canonical() +
         " u2=" + inst.params().u2.canonical();
}

namespace {

std::size_t parse_size(const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos || text.size() > 18) {
    throw ParseError("bad dimension '" + text + "'");
  }
  return static_cast<std::size_t>(std::stoull(text));
}

}  // namespace

ProblemInstance parse_instance(std::string_view record) {
  constexpr std::string_view kTag = "instance ";
  if (record.substr(0, kTag.size()) != kTag) throw ParseError("instance record must start with 'instance'");
  const auto fields = parse_fields(record.substr(kTag.size()));
  Dims dims{parse_size(require_field(fields, "N1")), parse_size(require_field(fields, "N2"))};
  InstanceParams params{Rational::parse_canonical(require_field(fields, "u1")),
                        Rational::parse_canonical(require_field(fields, "u2"))};
  return ProblemInstance(parse_family(fields), dims, params);
}

}  // namespace crp
