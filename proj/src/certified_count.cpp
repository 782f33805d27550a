#include <algorithm>
#include <cmath>
#include <future>

#include "expd/errors.hpp"
#include "expd/zarankiewicz.hpp"

namespace expd {

const char* to_string(CertCase c) {
  switch (c) {
    case CertCase::Case1SmallM:
      return "Case1";
    case CertCase::Case2Unbalanced:
      return "Case2";
    case CertCase::Case3Recurse:
      return "Case3";
    case CertCase::LeafExact:
      return "LeafExact";
  }
  return "?";
}

std::size_t BoundCertificate::node_count() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.node_count();
  return n;
}

std::size_t BoundCertificate::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth());
  return d + 1;
}

double default_r(double c2, int D) {
  return std::max(2.0, std::ceil(2.0 * std::pow(c2, 1.0 / D)));
}

bool certificate_consistent(const BoundCertificate& cert) {
  std::uint64_t sum = cert.contribution;
  for (const auto& c : cert.children) {
    if (!certificate_consistent(c)) return false;
    sum += c.total;
  }
  return sum == cert.total;
}

nlohmann::json to_json(const BoundCertificate& cert) {
  nlohmann::json children = nlohmann::json::array();
  for (const auto& c : cert.children) children.push_back(to_json(c));
  nlohmann::json j{{"case", to_string(cert.node_case)},
                   {"m", cert.m},
                   {"n", cert.n},
                   {"r", cert.r},
                   {"contribution", cert.contribution},
                   {"children", std::move(children)},
                   {"total", cert.total}};
  if (cert.degraded) j["degraded"] = true;
  if (cert.node_case == CertCase::Case3Recurse) {
    j["cells"] = cert.cell_count;
    j["fitted_c2"] = cert.fitted_c2;
  }
  return j;
}

namespace {

class Certifier {
 public:
  Certifier(const FiniteRelation2& rel, const ExponentParams& params, const Cutter& cutter,
            const CertifyOptions& opt)
      : rel_(rel), params_(params), cutter_(cutter), opt_(opt) {
    unbalanced_exponent_ = params.D / (1.0 - params.alpha.convert_to<double>());
  }

  BoundCertificate run(const Subset& a, const Subset& b, bool top) const {
    BoundCertificate node;
    node.m = a.cardinality();
    node.n = b.cardinality();
    node.r = opt_.r;
    const double m = static_cast<double>(node.m);
    const double n = static_cast<double>(node.n);

    if (m <= std::max(opt_.r, static_cast<double>(opt_.leaf_size))) {
      node.node_case = CertCase::Case1SmallM;
      node.contribution = count_grid2(rel_, a, b);
      node.total = node.contribution;
      return node;
    }

    // r^{D/(1-alpha)} m >= n^t, compared in log space.
    if (node.n == 0 ||
        unbalanced_exponent_ * std::log(opt_.r) + std::log(m) >= params_.t * std::log(n)) {
      node.node_case = CertCase::Case2Unbalanced;
      const double kst = kst_bound(params_.s, params_.t, m, n);
      const std::uint64_t trivial = node.m * node.n;
      const double floored = std::floor(kst + 1e-9);
      node.contribution = floored >= static_cast<double>(trivial)
                              ? trivial
                              : static_cast<std::uint64_t>(floored);
      node.total = node.contribution;
      return node;
    }

    node.node_case = CertCase::Case3Recurse;
    std::optional<CuttingCover> cover = cutter_ ? cutter_(rel_, a, opt_.r) : std::nullopt;
    if (cover && !verify_cutting(rel_, a, opt_.r, *cover).valid) cover.reset();
    if (!cover) return degrade(std::move(node), a, b);

    node.cell_count = cover->cells.size();
    node.fitted_c2 = static_cast<double>(node.cell_count) / std::pow(opt_.r, params_.D);

    // B_i := B ∩ V_i with every point assigned to its first covering cell.
    struct Cell {
      Subset a_i;
      Subset b_i;
    };
    std::vector<Cell> cells;
    Bitset assigned(rel_.v().size);
    for (const auto& cell : cover->cells) {
      Bitset bi = b.bits() & cell.bits();
      bi.subtract(assigned);
      if (bi.none()) continue;
      assigned |= bi;
      Cell c{Subset(rel_.u()), Subset(rel_.v())};
      bi.for_each([&](std::size_t j) { c.b_i.insert(j); });
      a.bits().for_each([&](std::size_t i) {
        if (crosses(rel_.row(i), cell.bits())) c.a_i.insert(i);
      });
      cells.push_back(std::move(c));
    }

    for (const auto& c : cells) {
      // Fibers outside A_i do not cross V_i, so each either contains B_i or
      // misses it; counted exactly here.
      c.b_i.bits().for_each([&](std::size_t j) {
        const Bitset& col = rel_.column(j);
        node.contribution += col.count_and(a.bits()) - col.count_and(c.a_i.bits());
      });
    }

    node.children.resize(cells.size());
    if (top && opt_.threads > 1 && cells.size() > 1) {
      std::vector<std::future<BoundCertificate>> jobs;
      std::size_t next = 0;
      while (next < cells.size() || !jobs.empty()) {
        while (next < cells.size() && jobs.size() < opt_.threads) {
          jobs.push_back(std::async(std::launch::async, [this, &cells, next] {
            return run(cells[next].a_i, cells[next].b_i, false);
          }));
          ++next;
        }
        // Results are stored by cell index, so scheduling order is irrelevant.
        std::size_t first = next - jobs.size();
        for (std::size_t k = 0; k < jobs.size(); ++k) node.children[first + k] = jobs[k].get();
        jobs.clear();
      }
    } else {
      for (std::size_t k = 0; k < cells.size(); ++k)
        node.children[k] = run(cells[k].a_i, cells[k].b_i, false);
    }

    node.total = node.contribution;
    for (const auto& c : node.children) node.total += c.total;
    return node;
  }

 private:
  BoundCertificate degrade(BoundCertificate node, const Subset& a, const Subset& b) const {
    node.node_case = CertCase::LeafExact;
    node.degraded = true;
    node.contribution = count_grid2(rel_, a, b);
    node.total = node.contribution;
    return node;
  }

  const FiniteRelation2& rel_;
  const ExponentParams& params_;
  const Cutter& cutter_;
  const CertifyOptions& opt_;
  double unbalanced_exponent_;
};

}  // namespace

BoundCertificate certified_count(const FiniteRelation2& rel, const Subset& a, const Subset& b,
                                 const ExponentParams& params, const Cutter& cutter,
                                 const CertifyOptions& options) {
  a.require_universe(rel.u(), "certified_count A");
  b.require_universe(rel.v(), "certified_count B");
  if (!(options.r > 1)) throw ParameterError("certified_count needs r > 1");
  if (options.leaf_size < 1) throw ParameterError("certified_count needs leaf_size >= 1");
  return Certifier(rel, params, cutter, options).run(a, b, true);
}

}  // namespace expd
