#include <algorithm>
#include <set>

#include "conormal/univariate.hpp"
#include "conormal/variety.hpp"

// Catalog constructors. Shared conventions: randomized instances draw small
// integers from the seed (identical across primes), validate against every
// configured prime, and retry up to `kRetryBudget` fresh sub-seeds before
// giving up with DEGENERATE.

namespace conormal {

static constexpr int kRetryBudget = 8;

static Error degenerate(const std::string& what) {
  return Error("DEGENERATE: " + what + " (retries exhausted)");
}

static Polynomial int_poly(const PrimeField& F, const GradedRing& R, const Multideg& d,
                           const std::vector<uint32_t>& ints) {
  const auto& mons = R.degree_basis(d);
  if (ints.size() != mons.size()) throw Error("coefficient count mismatch");
  Polynomial p(&R);
  for (size_t i = 0; i < mons.size(); ++i) p.add_term(F, mons[i], F.from_int(ints[i]));
  return p;
}

static std::vector<uint32_t> draw_ints(Splitmix& rng, size_t n) {
  std::vector<uint32_t> out(n);
  for (auto& v : out) v = rng.instance_int();
  return out;
}

// ---------------------------------------------------------------------------
// veronese

VarietyPtr veronese(const PrimeField& F, int n, int r) {
  if (n < 1 || r < 1) throw Error("veronese: need n >= 1, r >= 1");
  auto target = std::make_shared<GradedRing>(GradedRing::standard(n + 1, "x"));
  const auto& mons = target->degree_basis(Multideg{r});
  uint32_t nv = static_cast<uint32_t>(mons.size());
  auto source = std::make_shared<GradedRing>(GradedRing::standard(nv));
  std::vector<Polynomial> images;
  for (const Expo& e : mons) images.push_back(monomial(*target, e));
  auto model = std::make_shared<SymbolicModel>(
      F, target, [r](uint32_t k) { return Multideg{static_cast<int32_t>(k) * r}; },
      std::move(images));
  VarietyMeta meta;
  meta.constructor = "veronese";
  meta.params = std::to_string(n) + "," + std::to_string(r);
  meta.label = "veronese:" + meta.params;
  meta.dim = n;
  int64_t deg = 1;
  for (int i = 0; i < n; ++i) deg *= r;
  meta.degree = deg;
  if (n == 1) meta.genus = 0;
  meta.expected_h0 = [n, r](uint32_t k) { return binom(n + static_cast<int64_t>(r) * k, n); };
  auto X = std::make_shared<EmbeddedVariety>(F, source, model, meta);
  for (uint32_t k = 1; k <= 2; ++k)
    if (static_cast<int64_t>(X->dimA(k)) != meta.expected_h0(k))
      throw Error("veronese: section count mismatch");
  const PrimeField* Fp = &F;
  auto tgt = target;
  X->set_sampler([Fp, tgt, r, n](uint32_t want, uint64_t seed) {
    Splitmix rng(seed);
    std::vector<std::vector<uint32_t>> pts;
    const auto& ms = tgt->degree_basis(Multideg{r});
    while (pts.size() < want) {
      std::vector<uint32_t> x(n + 1);
      bool nz = false;
      for (auto& c : x) nz |= (c = rng.field_elt(*Fp)) != 0;
      if (!nz) continue;
      std::vector<uint32_t> pt;
      for (const Expo& e : ms) pt.push_back(eval_poly(*Fp, monomial(*tgt, e), x));
      pts.push_back(std::move(pt));
    }
    return pts;
  });
  return X;
}

// ---------------------------------------------------------------------------
// segre

VarietyPtr segre(const PrimeField& F, int n, int m) {
  if (n < 1 || m < 1) throw Error("segre: need n,m >= 1");
  auto target = std::make_shared<GradedRing>(GradedRing::bigraded(n + 1, m + 1));
  uint32_t nv = static_cast<uint32_t>((n + 1) * (m + 1));
  auto source = std::make_shared<GradedRing>(GradedRing::standard(nv));
  std::vector<Polynomial> images;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= m; ++j) {
      Expo e(n + 1 + m + 1, 0);
      e[i] = 1;
      e[n + 1 + j] = 1;
      images.push_back(monomial(*target, e));
    }
  auto model = std::make_shared<SymbolicModel>(
      F, target,
      [](uint32_t k) {
        return Multideg{static_cast<int32_t>(k), static_cast<int32_t>(k)};
      },
      std::move(images));
  VarietyMeta meta;
  meta.constructor = "segre";
  meta.params = std::to_string(n) + "," + std::to_string(m);
  meta.label = "segre:" + meta.params;
  meta.dim = n + m;
  meta.degree = binom(n + m, n);
  meta.expected_h0 = [n, m](uint32_t k) { return binom(n + k, n) * binom(m + k, m); };
  auto X = std::make_shared<EmbeddedVariety>(F, source, model, meta);
  const PrimeField* Fp = &F;
  X->set_sampler([Fp, n, m](uint32_t want, uint64_t seed) {
    Splitmix rng(seed);
    std::vector<std::vector<uint32_t>> pts;
    while (pts.size() < want) {
      std::vector<uint32_t> x(n + 1), y(m + 1);
      bool nx = false, ny = false;
      for (auto& c : x) nx |= (c = rng.field_elt(*Fp)) != 0;
      for (auto& c : y) ny |= (c = rng.field_elt(*Fp)) != 0;
      if (!nx || !ny) continue;
      std::vector<uint32_t> pt;
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= m; ++j) pt.push_back(Fp->mul(x[i], y[j]));
      pts.push_back(std::move(pt));
    }
    return pts;
  });
  return X;
}

// ---------------------------------------------------------------------------
// rational normal scrolls

static std::vector<uint32_t> scroll_point(const PrimeField& F, const std::vector<int>& e,
                                          const std::vector<uint32_t>& y, uint32_t t0,
                                          uint32_t t1) {
  std::vector<uint32_t> pt;
  for (size_t i = 0; i < e.size(); ++i) {
    // l runs over t1-exponent 0..e_i, coordinate y_i t0^(e_i-l) t1^l
    for (int l = 0; l <= e[i]; ++l) {
      uint32_t v = y[i];
      for (int q = 0; q < e[i] - l; ++q) v = F.mul(v, t0);
      for (int q = 0; q < l; ++q) v = F.mul(v, t1);
      pt.push_back(v);
    }
  }
  return pt;
}

VarietyPtr scroll_variety(const PrimeField& F, std::vector<int> e) {
  std::sort(e.begin(), e.end(), std::greater<int>());
  auto S = std::make_shared<ScrollRing>(e);
  if (S->f < 2) throw Error("scroll: need f >= 2");
  const auto& mons = S->ring->degree_basis(Multideg{1, 0});
  uint32_t nv = static_cast<uint32_t>(mons.size());
  auto source = std::make_shared<GradedRing>(GradedRing::standard(nv));
  std::vector<Polynomial> images;
  for (const Expo& m : mons) images.push_back(monomial(*S->ring, m));
  auto model = std::make_shared<SymbolicModel>(
      F, S->ring, [](uint32_t k) { return Multideg{static_cast<int32_t>(k), 0}; },
      std::move(images));
  VarietyMeta meta;
  meta.constructor = "scroll";
  for (size_t i = 0; i < e.size(); ++i) meta.params += (i ? "," : "") + std::to_string(e[i]);
  meta.label = "scroll:" + meta.params;
  meta.dim = static_cast<int>(e.size());
  meta.degree = S->f;
  auto Sc = S;
  meta.expected_h0 = [Sc](uint32_t k) { return Sc->h0(static_cast<int>(k), 0); };
  auto X = std::make_shared<EmbeddedVariety>(F, source, model, meta);
  const PrimeField* Fp = &F;
  std::vector<int> ecopy = e;
  X->set_sampler([Fp, ecopy](uint32_t want, uint64_t seed) {
    Splitmix rng(seed);
    std::vector<std::vector<uint32_t>> pts;
    while (pts.size() < want) {
      std::vector<uint32_t> y(ecopy.size());
      bool nz = false;
      for (auto& c : y) nz |= (c = rng.field_elt(*Fp)) != 0;
      if (!nz) continue;
      pts.push_back(scroll_point(*Fp, ecopy, y, rng.field_nonzero(*Fp), rng.field_elt(*Fp)));
    }
    return pts;
  });
  return X;
}

// ---------------------------------------------------------------------------
// complete intersections

static std::vector<int64_t> koszul_hilbert(int N, const std::vector<int>& degrees, int kmax) {
  // coefficients of prod (1-s^d) / (1-s)^(N+1)
  std::vector<int64_t> num(kmax + 1, 0);
  num[0] = 1;
  for (int d : degrees) {
    std::vector<int64_t> nx = num;
    for (int i = d; i <= kmax; ++i) nx[i] -= num[i - d];
    num = std::move(nx);
  }
  for (int rep = 0; rep <= N; ++rep)
    for (int i = 1; i <= kmax; ++i) num[i] += num[i - 1];
  return num;
}

static VarietyPtr make_ci(const PrimeField& F, int N, const std::vector<int>& degrees,
                          std::vector<Polynomial> forms, VarietyMeta meta,
                          std::shared_ptr<const GradedRing> source) {
  int c = static_cast<int>(degrees.size());
  auto forms_sp = std::make_shared<std::vector<Polynomial>>(std::move(forms));
  std::vector<Polynomial> images;
  for (uint32_t j = 0; j < source->n_vars(); ++j) {
    Expo e(source->n_vars(), 0);
    e[j] = 1;
    images.push_back(monomial(*source, e));
  }
  const PrimeField* Fp = &F;
  auto src = source;
  auto qgens = [Fp, forms_sp, src](uint32_t k) {
    std::vector<Polynomial> out;
    for (auto& f : *forms_sp) {
      int d = f.degree()[0];
      if (static_cast<int>(k) < d) continue;
      for (const Expo& m : src->degree_basis(Multideg{static_cast<int32_t>(k) - d}))
        out.push_back(multiply(*Fp, f, monomial(*src, m)));
    }
    return out;
  };
  auto model = std::make_shared<SymbolicModel>(
      F, source, [](uint32_t k) { return Multideg{static_cast<int32_t>(k)}; }, std::move(images),
      qgens);
  auto X = std::make_shared<EmbeddedVariety>(F, source, model, std::move(meta));
  // hyperplane-slice point sampler (only when the slice system is small)
  if (c + 1 <= N + 1) {
    X->set_sampler([Fp, forms_sp, src, N, c](uint32_t want, uint64_t seed) {
      Splitmix rng(seed);
      GradedRing Ssmall = GradedRing::standard(c + 1, "s");
      std::vector<std::vector<uint32_t>> pts;
      for (int attempt = 0; attempt < 6 && pts.size() < want; ++attempt) {
        // parameterize a random linear subspace of dimension c
        std::vector<std::vector<uint32_t>> L(c + 1, std::vector<uint32_t>(N + 1));
        for (auto& row : L)
          for (auto& v : row) v = rng.field_elt(*Fp);
        // substitute z_j = sum_s s_i L[i][j]
        std::vector<Polynomial> subbed;
        std::vector<Polynomial> svars;
        for (int i = 0; i <= c; ++i) {
          Expo e(c + 1, 0);
          e[i] = 1;
          svars.push_back(monomial(Ssmall, e));
        }
        for (auto& f : *forms_sp) {
          Polynomial g(&Ssmall);
          for (auto& [e, coef] : f.terms()) {
            Polynomial term = monomial(Ssmall, Expo(c + 1, 0), coef);
            for (uint32_t j = 0; j <= static_cast<uint32_t>(N); ++j)
              for (int32_t q = 0; q < e[j]; ++q) {
                Polynomial lin(&Ssmall);
                for (int i = 0; i <= c; ++i) {
                  Expo ee(c + 1, 0);
                  ee[i] = 1;
                  lin.add_term(*Fp, ee, L[i][j]);
                }
                term = multiply(*Fp, term, lin);
              }
            g = add(*Fp, g, term);
          }
          if (g.is_zero()) continue;
          subbed.push_back(std::move(g));
        }
        if (subbed.size() != static_cast<size_t>(c)) continue;
        for (auto& s : zero_dim_points(*Fp, Ssmall, subbed, rng.next())) {
          std::vector<uint32_t> pt(N + 1, 0);
          for (uint32_t j = 0; j <= static_cast<uint32_t>(N); ++j) {
            uint64_t acc = 0;
            for (int i = 0; i <= c; ++i) acc += static_cast<uint64_t>(s[i]) * L[i][j];
            pt[j] = Fp->reduce(acc);
          }
          pts.push_back(std::move(pt));
          if (pts.size() >= want) break;
        }
      }
      return pts;
    });
  }
  return X;
}

VarietyPtr ci_from_forms(const PrimeField& F, std::shared_ptr<const GradedRing> source,
                         std::vector<Polynomial> forms, bool validated,
                         const std::string& label) {
  const int N = static_cast<int>(source->n_vars()) - 1;
  std::vector<int> degrees;
  for (auto& f : forms) degrees.push_back(f.degree()[0]);
  VarietyMeta meta;
  meta.constructor = "ci";
  meta.label = label;
  meta.dim = N - static_cast<int>(degrees.size());
  meta.validated = validated;
  int64_t deg = 1;
  for (int d : degrees) deg *= d;
  meta.degree = deg;
  return make_ci(F, N, degrees, std::move(forms), std::move(meta), source);
}

VarietyPtr complete_intersection(const FieldConfig& cfg, const PrimeField& F, int N,
                                 std::vector<int> degrees, uint64_t seed) {
  if (degrees.empty() || static_cast<int>(degrees.size()) >= N)
    throw Error("complete intersection: need 1 <= #degrees < N");
  for (int d : degrees)
    if (d < 2) throw Error("complete intersection: degrees must be >= 2");
  std::sort(degrees.begin(), degrees.end());
  int kmax_check = degrees.back() + 2;
  std::vector<int64_t> hilb = koszul_hilbert(N, degrees, kmax_check);

  auto source = std::make_shared<GradedRing>(GradedRing::standard(N + 1));
  for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
    Splitmix rng(fnv1a_u64(seed, fnv1a_u64(attempt, fnv1a_str("ci"))));
    std::vector<std::vector<uint32_t>> coeffs;
    for (int d : degrees)
      coeffs.push_back(draw_ints(rng, source->degree_dim(Multideg{d})));
    bool good = true;
    for (uint32_t q : cfg.all_primes()) {
      PrimeField Fq(q);
      auto sq = std::make_shared<GradedRing>(GradedRing::standard(N + 1));
      std::vector<Polynomial> fq;
      for (size_t i = 0; i < degrees.size(); ++i)
        fq.push_back(int_poly(Fq, *sq, Multideg{degrees[i]}, coeffs[i]));
      VarietyMeta m0;
      m0.dim = N - static_cast<int>(degrees.size());
      auto Xq = make_ci(Fq, N, degrees, fq, m0, sq);
      for (int k = 1; k <= kmax_check && good; ++k)
        if (static_cast<int64_t>(Xq->dimA(k)) != hilb[k]) good = false;
      if (!good) break;
    }
    if (!good) continue;
    std::vector<Polynomial> forms;
    for (size_t i = 0; i < degrees.size(); ++i)
      forms.push_back(int_poly(F, *source, Multideg{degrees[i]}, coeffs[i]));
    VarietyMeta meta;
    meta.constructor = "ci";
    meta.params = std::to_string(N);
    for (int d : degrees) meta.params += "," + std::to_string(d);
    meta.label = "ci:" + meta.params;
    meta.seed = seed;
    meta.degenerate_retries = attempt;
    meta.dim = N - static_cast<int>(degrees.size());
    int64_t deg = 1;
    for (int d : degrees) deg *= d;
    meta.degree = deg;
    if (meta.dim == 1) {
      int64_t sum = 0;
      for (int d : degrees) sum += d;
      meta.genus = static_cast<int>(1 + deg * (sum - N - 1) / 2);
    }
    std::vector<int64_t> h = hilb;
    int kc = kmax_check;
    int Nn = N;
    std::vector<int> ds = degrees;
    meta.expected_h0 = [h, kc, Nn, ds](uint32_t k) {
      if (static_cast<int>(k) <= kc) return h[k];
      return koszul_hilbert(Nn, ds, k)[k];
    };
    return make_ci(F, N, degrees, std::move(forms), std::move(meta), source);
  }
  throw degenerate("complete intersection Hilbert check");
}

// ---------------------------------------------------------------------------
// canonical plane curves

VarietyPtr plane_curve_canonical(const FieldConfig& cfg, const PrimeField& F, int d,
                                 uint64_t seed) {
  if (d < 5) throw Error("plane canonical curve: need d >= 5");
  const int g = (d - 1) * (d - 2) / 2;
  auto plane = std::make_shared<GradedRing>(GradedRing::standard(3, "x"));
  size_t nd = plane->degree_dim(Multideg{d});

  auto curve_points = [&](const PrimeField& Fq, const Polynomial& Fc, uint64_t s,
                          uint32_t want) {
    // solve F(a, y, 1) = 0 for seeded a
    Splitmix rng(s);
    std::vector<std::vector<uint32_t>> pts;
    int guard = 0;
    while (pts.size() < want && guard++ < 200) {
      uint32_t a = rng.field_elt(Fq);
      UniPoly f(d + 1, 0);
      for (auto& [e, c] : Fc.terms()) {
        uint32_t v = c;
        for (int q = 0; q < e[0]; ++q) v = Fq.mul(v, a);
        f[e[1]] = Fq.add(f[e[1]], v);
      }
      for (uint32_t y : uni_roots(Fq, f, rng.next())) {
        pts.push_back({a, y, 1});
        if (pts.size() >= want) break;
      }
    }
    return pts;
  };

  for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
    Splitmix rng(fnv1a_u64(seed, fnv1a_u64(attempt, fnv1a_str("plane"))));
    std::vector<uint32_t> coeffs = draw_ints(rng, nd);
    bool good = true;
    for (uint32_t q : cfg.all_primes()) {
      PrimeField Fq(q);
      Polynomial Fc = int_poly(Fq, *plane, Multideg{d}, coeffs);
      // smoothness spot check on the plane model
      auto pts = curve_points(Fq, Fc, fnv1a_u64(attempt, 0x5e11), 8);
      if (pts.size() < 8) {
        good = false;
        break;
      }
      for (auto& pt : pts) {
        bool sing = true;
        for (uint32_t j = 0; j < 3; ++j)
          if (eval_poly(Fq, partial_derivative(Fq, Fc, j), pt) != 0) sing = false;
        if (sing) {
          good = false;
          break;
        }
      }
      if (!good) break;
    }
    if (!good) continue;

    Polynomial Fc = int_poly(F, *plane, Multideg{d}, coeffs);
    const auto& kmons = plane->degree_basis(Multideg{d - 3});
    auto source = std::make_shared<GradedRing>(GradedRing::standard(g));
    std::vector<Polynomial> images;
    for (const Expo& e : kmons) images.push_back(monomial(*plane, e));
    const PrimeField* Fp = &F;
    auto Fc_sp = std::make_shared<Polynomial>(Fc);
    auto pl = plane;
    int dd = d;
    auto qgens = [Fp, Fc_sp, pl, dd](uint32_t k) {
      std::vector<Polynomial> out;
      int32_t deg = static_cast<int32_t>(k) * (dd - 3) - dd;
      if (deg < 0) return out;
      for (const Expo& m : pl->degree_basis(Multideg{deg}))
        out.push_back(multiply(*Fp, *Fc_sp, monomial(*pl, m)));
      return out;
    };
    auto model = std::make_shared<SymbolicModel>(
        F, plane,
        [dd](uint32_t k) { return Multideg{static_cast<int32_t>(k) * (dd - 3)}; },
        std::move(images), qgens);
    VarietyMeta meta;
    meta.constructor = "plane-canonical";
    meta.params = std::to_string(d);
    meta.label = "plane-canonical:" + meta.params;
    meta.seed = seed;
    meta.degenerate_retries = attempt;
    meta.dim = 1;
    meta.genus = g;
    meta.degree = 2 * g - 2;
    meta.expected_h0 = [g](uint32_t k) {
      if (k == 0) return static_cast<int64_t>(1);
      if (k == 1) return static_cast<int64_t>(g);
      return static_cast<int64_t>(2 * k - 1) * (g - 1);
    };
    auto X = std::make_shared<EmbeddedVariety>(F, source, model, meta);
    // Hilbert check of the canonical model (per configured prime)
    bool hilbert_ok = true;
    for (uint32_t k = 1; k <= 3 && hilbert_ok; ++k)
      hilbert_ok = static_cast<int64_t>(X->dimA(k)) == meta.expected_h0(k);
    if (!hilbert_ok) continue;
    X->plane_data = std::make_shared<PlaneCurveData>();
    X->plane_data->plane = plane;
    X->plane_data->curve = Fc;
    X->plane_data->d = d;
    auto cp = curve_points;
    Polynomial FcCopy = Fc;
    auto km = kmons;
    X->set_sampler([Fp, cp, FcCopy, km, pl](uint32_t want, uint64_t s) {
      auto plane_pts = cp(*Fp, FcCopy, s, want);
      std::vector<std::vector<uint32_t>> out;
      for (auto& pt : plane_pts) {
        std::vector<uint32_t> e;
        for (const Expo& m : km) e.push_back(eval_poly(*Fp, monomial(*pl, m), pt));
        out.push_back(std::move(e));
      }
      return out;
    });
    return X;
  }
  throw degenerate("smooth plane curve");
}

// ---------------------------------------------------------------------------
// scroll-supported curves (tetragonal / pentagonal)

namespace {

// restrict a Cox-ring form to the fiber t = (t0, t1): polynomial in y's
Polynomial fiber_restrict(const PrimeField& F, const ScrollRing& S, const GradedRing& Y,
                          const Polynomial& g, uint32_t t0, uint32_t t1) {
  const uint32_t dY = static_cast<uint32_t>(S.e.size());
  Polynomial out(&Y);
  for (auto& [e, c] : g.terms()) {
    uint32_t v = c;
    for (int q = 0; q < e[dY]; ++q) v = F.mul(v, t0);
    for (int q = 0; q < e[dY + 1]; ++q) v = F.mul(v, t1);
    Expo ey(dY, 0);
    for (uint32_t i = 0; i < dY; ++i) ey[i] = e[i];
    out.add_term(F, ey, v);
  }
  return out;
}

// embed a fiber solution into P^N via the bidegree (1,0) monomials
std::vector<uint32_t> embed_scroll_point(const PrimeField& F, const ScrollRing& S,
                                         const std::vector<uint32_t>& y, uint32_t t0,
                                         uint32_t t1) {
  std::vector<uint32_t> pt;
  for (const Expo& m : S.ring->degree_basis(Multideg{1, 0})) {
    uint32_t v = 1;
    for (size_t i = 0; i < S.e.size(); ++i)
      for (int q = 0; q < m[i]; ++q) v = F.mul(v, y[i]);
    for (int q = 0; q < m[S.e.size()]; ++q) v = F.mul(v, t0);
    for (int q = 0; q < m[S.e.size() + 1]; ++q) v = F.mul(v, t1);
    pt.push_back(v);
  }
  return pt;
}

EmbeddedVariety::Sampler scroll_curve_sampler(const PrimeField& F,
                                              std::shared_ptr<ScrollRing> S,
                                              std::shared_ptr<std::vector<Polynomial>> eqs) {
  const PrimeField* Fp = &F;
  return [Fp, S, eqs](uint32_t want, uint64_t seed) {
    Splitmix rng(seed);
    GradedRing Y = GradedRing::standard(static_cast<uint32_t>(S->e.size()), "u");
    std::vector<std::vector<uint32_t>> pts;
    int guard = 0;
    while (pts.size() < want && guard++ < 300) {
      uint32_t t0 = 1, t1 = rng.field_elt(*Fp);
      if (guard % 17 == 0) {
        t0 = 0;
        t1 = 1;
      }
      std::vector<Polynomial> fiber;
      bool degenerate_fiber = false;
      for (auto& g : *eqs) {
        Polynomial r = fiber_restrict(*Fp, *S, Y, g, t0, t1);
        if (r.is_zero()) degenerate_fiber = true;
        fiber.push_back(std::move(r));
      }
      if (degenerate_fiber) continue;
      for (auto& y : zero_dim_points(*Fp, Y, fiber, rng.next())) {
        pts.push_back(embed_scroll_point(*Fp, *S, y, t0, t1));
        if (pts.size() >= want) break;
      }
    }
    return pts;
  };
}

struct ScrollCurveParts {
  std::shared_ptr<ScrollRing> scroll;
  std::shared_ptr<std::vector<Polynomial>> eqs;
  std::vector<int> mult_twists;  // multiplier bidegree second components per equation
};

VarietyPtr make_scroll_curve(const PrimeField& F, ScrollCurveParts parts, VarietyMeta meta,
                             std::shared_ptr<ScrollCurveData> payload) {
  auto S = parts.scroll;
  const auto& mons = S->ring->degree_basis(Multideg{1, 0});
  auto source = std::make_shared<GradedRing>(GradedRing::standard(static_cast<uint32_t>(mons.size())));
  std::vector<Polynomial> images;
  for (const Expo& m : mons) images.push_back(monomial(*S->ring, m));
  const PrimeField* Fp = &F;
  auto eqs = parts.eqs;
  std::vector<int> tw = parts.mult_twists;
  auto ring = S->ring;
  auto qgens = [Fp, eqs, tw, ring](uint32_t k) {
    std::vector<Polynomial> out;
    if (k < 2) return out;
    for (size_t i = 0; i < eqs->size(); ++i)
      for (const Expo& m :
           ring->degree_basis(Multideg{static_cast<int32_t>(k) - 2, tw[i]}))
        out.push_back(multiply(*Fp, (*eqs)[i], monomial(*ring, m)));
    return out;
  };
  auto model = std::make_shared<SymbolicModel>(
      F, ring, [](uint32_t k) { return Multideg{static_cast<int32_t>(k), 0}; },
      std::move(images), qgens);
  auto X = std::make_shared<EmbeddedVariety>(F, source, model, std::move(meta));
  X->scroll_data = payload;
  X->set_sampler(scroll_curve_sampler(F, S, eqs));
  return X;
}

bool scroll_curve_valid(const FieldConfig& cfg, const std::vector<int>& e,
                        const std::vector<int>& tw, int genus,
                        const std::vector<std::vector<uint32_t>>& eq_coeffs,
                        const std::vector<Multideg>& eq_degs) {
  for (uint32_t q : cfg.all_primes()) {
    PrimeField Fq(q);
    auto Sq = std::make_shared<ScrollRing>(e);
    auto eqs = std::make_shared<std::vector<Polynomial>>();
    for (size_t i = 0; i < eq_coeffs.size(); ++i)
      eqs->push_back(int_poly(Fq, *Sq->ring, eq_degs[i], eq_coeffs[i]));
    ScrollCurveParts parts{Sq, eqs, tw};
    VarietyMeta m0;
    m0.dim = 1;
    m0.genus = genus;
    auto Xq = make_scroll_curve(Fq, parts, m0, nullptr);
    if (Xq->dimA(1) != static_cast<uint32_t>(genus)) return false;
    for (uint32_t k = 2; k <= 4; ++k)
      if (static_cast<int64_t>(Xq->dimA(k)) != static_cast<int64_t>(2 * k - 1) * (genus - 1))
        return false;
    if (smoothness_spot_check(*Xq, 4, 0xf1be5) != SpotCheck::PASS) return false;
  }
  return true;
}

}  // namespace

VarietyPtr tetragonal_curve(const FieldConfig& cfg, const PrimeField& F, std::vector<int> e,
                            int b1, int b2, uint64_t seed) {
  if (e.size() != 3) throw Error("tetragonal: need 3 scroll invariants");
  std::sort(e.begin(), e.end(), std::greater<int>());
  int f = e[0] + e[1] + e[2];
  for (int ei : e)
    if (ei <= 0) throw Error("tetragonal: scroll invariants must be positive");
  if (!(0 <= b1 && b1 <= b2 && b1 + b2 == f - 2))
    throw Error("tetragonal: need 0 <= b1 <= b2 and b1+b2 = f-2");
  const int g = f + 3;
  auto S = std::make_shared<ScrollRing>(e);
  std::vector<Multideg> eq_degs{{2, -b1}, {2, -b2}};
  for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
    Splitmix rng(fnv1a_u64(seed, fnv1a_u64(attempt, fnv1a_str("tetragonal"))));
    std::vector<std::vector<uint32_t>> coeffs;
    for (auto& dg : eq_degs) coeffs.push_back(draw_ints(rng, S->ring->degree_dim(dg)));
    if (!scroll_curve_valid(cfg, e, {b1, b2}, g, coeffs, eq_degs)) continue;
    auto eqs = std::make_shared<std::vector<Polynomial>>();
    for (size_t i = 0; i < coeffs.size(); ++i)
      eqs->push_back(int_poly(F, *S->ring, eq_degs[i], coeffs[i]));
    auto payload = std::make_shared<ScrollCurveData>();
    payload->scroll = S;
    payload->b = {b1, b2};
    payload->genus = g;
    payload->equations = *eqs;
    VarietyMeta meta;
    meta.constructor = "tetragonal";
    meta.params = std::to_string(e[0]) + "," + std::to_string(e[1]) + "," + std::to_string(e[2]) +
                  ",b=" + std::to_string(b1) + "," + std::to_string(b2);
    meta.label = "tetragonal:" + meta.params;
    meta.seed = seed;
    meta.degenerate_retries = attempt;
    meta.dim = 1;
    meta.genus = g;
    meta.degree = 2 * g - 2;
    meta.expected_h0 = [g](uint32_t k) {
      if (k == 0) return static_cast<int64_t>(1);
      if (k == 1) return static_cast<int64_t>(g);
      return static_cast<int64_t>(2 * k - 1) * (g - 1);
    };
    return make_scroll_curve(F, ScrollCurveParts{S, eqs, {b1, b2}}, meta, payload);
  }
  throw degenerate("tetragonal curve");
}

// 4x4 Pfaffian of the skew matrix with rows/cols {j<k<l<m}
static Polynomial pfaffian4(const PrimeField& F, const std::vector<std::vector<Polynomial>>& psi,
                            int j, int k, int l, int m) {
  Polynomial t1 = multiply(F, psi[j][k], psi[l][m]);
  Polynomial t2 = multiply(F, psi[j][l], psi[k][m]);
  Polynomial t3 = multiply(F, psi[j][m], psi[k][l]);
  return add(F, add(F, t1, scale(F, t2, F.neg(1))), t3);
}

VarietyPtr pentagonal_curve(const FieldConfig& cfg, const PrimeField& F, std::vector<int> e,
                            std::vector<int> b, uint64_t seed) {
  if (e.size() != 4 || b.size() != 5) throw Error("pentagonal: need 4 invariants and 5 twists");
  std::sort(e.begin(), e.end(), std::greater<int>());
  int f = 0;
  for (int ei : e) {
    if (ei <= 0) throw Error("pentagonal: scroll invariants must be positive");
    f += ei;
  }
  const int g = f + 4;
  std::vector<int> a(5);
  int asum = 0;
  for (int i = 0; i < 5; ++i) {
    a[i] = f - 2 - b[i];
    if (a[i] < 0 || b[i] < 0) throw Error("pentagonal: need 0 <= a_i, b_i with a_i+b_i = f-2");
    asum += a[i];
  }
  if (asum != 2 * g - 12) throw Error("pentagonal: sum of a_i must be 2g-12");
  int emin = *std::min_element(e.begin(), e.end());
  for (int j = 0; j < 5; ++j)
    for (int k = 0; k < 5; ++k)
      if (j != k && emin < b[j] - a[k])
        throw Error("pentagonal: global generation needs e_i >= b_j - a_k");

  auto S = std::make_shared<ScrollRing>(e);
  for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
    Splitmix rng(fnv1a_u64(seed, fnv1a_u64(attempt, fnv1a_str("pentagonal"))));
    // skew matrix entries psi[j][k] of bidegree (1, a_j - b_k), j < k
    std::vector<std::vector<std::vector<uint32_t>>> entry_coeffs(
        5, std::vector<std::vector<uint32_t>>(5));
    for (int j = 0; j < 5; ++j)
      for (int k = j + 1; k < 5; ++k)
        entry_coeffs[j][k] = draw_ints(rng, S->ring->degree_dim(Multideg{1, a[j] - b[k]}));
    auto build_psi = [&](const PrimeField& Fq, const ScrollRing& Sq) {
      std::vector<std::vector<Polynomial>> psi(5, std::vector<Polynomial>(5, Polynomial(Sq.ring.get())));
      for (int j = 0; j < 5; ++j)
        for (int k = j + 1; k < 5; ++k) {
          psi[j][k] = int_poly(Fq, *Sq.ring, Multideg{1, a[j] - b[k]}, entry_coeffs[j][k]);
          psi[k][j] = scale(Fq, psi[j][k], Fq.neg(1));
        }
      return psi;
    };
    auto build_pf = [&](const PrimeField& Fq, const ScrollRing& Sq,
                        const std::vector<std::vector<Polynomial>>& psi) {
      std::vector<Polynomial> pf;
      for (int i = 0; i < 5; ++i) {
        std::vector<int> idx;
        for (int j = 0; j < 5; ++j)
          if (j != i) idx.push_back(j);
        Polynomial p = pfaffian4(Fq, psi, idx[0], idx[1], idx[2], idx[3]);
        if (p.is_zero()) return std::vector<Polynomial>{};
        if (p.degree() != Multideg{2, -a[i]})
          throw Error("pentagonal: Pfaffian bidegree mismatch");
        pf.push_back(std::move(p));
      }
      return pf;
    };
    // validation across primes
    bool good = true;
    for (uint32_t q : cfg.all_primes()) {
      PrimeField Fq(q);
      ScrollRing Sq(e);
      auto psi_q = build_psi(Fq, Sq);
      auto pf_q = build_pf(Fq, Sq, psi_q);
      if (pf_q.empty()) {
        good = false;
        break;
      }
      auto Sq_sp = std::make_shared<ScrollRing>(e);
      auto psi2 = build_psi(Fq, *Sq_sp);
      auto eqs = std::make_shared<std::vector<Polynomial>>(build_pf(Fq, *Sq_sp, psi2));
      VarietyMeta m0;
      m0.dim = 1;
      m0.genus = g;
      auto Xq = make_scroll_curve(Fq, ScrollCurveParts{Sq_sp, eqs, a}, m0, nullptr);
      if (Xq->dimA(1) != static_cast<uint32_t>(g)) {
        good = false;
        break;
      }
      for (uint32_t k = 2; k <= 4 && good; ++k)
        if (static_cast<int64_t>(Xq->dimA(k)) != static_cast<int64_t>(2 * k - 1) * (g - 1))
          good = false;
      if (good && smoothness_spot_check(*Xq, 4, 0xf1be5) != SpotCheck::PASS) good = false;
      if (!good) break;
    }
    if (!good) continue;

    auto psi = build_psi(F, *S);
    auto eqs = std::make_shared<std::vector<Polynomial>>(build_pf(F, *S, psi));
    auto payload = std::make_shared<ScrollCurveData>();
    payload->scroll = S;
    payload->a = a;
    payload->b = b;
    payload->genus = g;
    payload->equations = *eqs;
    payload->psi = psi;
    VarietyMeta meta;
    meta.constructor = "pentagonal";
    for (size_t i = 0; i < 4; ++i) meta.params += (i ? "," : "") + std::to_string(e[i]);
    meta.params += ",b=";
    for (size_t i = 0; i < 5; ++i) meta.params += (i ? "," : "") + std::to_string(b[i]);
    meta.label = "pentagonal:" + meta.params;
    meta.seed = seed;
    meta.degenerate_retries = attempt;
    meta.dim = 1;
    meta.genus = g;
    meta.degree = 2 * g - 2;
    meta.expected_h0 = [g](uint32_t k) {
      if (k == 0) return static_cast<int64_t>(1);
      if (k == 1) return static_cast<int64_t>(g);
      return static_cast<int64_t>(2 * k - 1) * (g - 1);
    };
    return make_scroll_curve(F, ScrollCurveParts{S, eqs, a}, meta, payload);
  }
  throw degenerate("pentagonal curve");
}

static std::vector<int> balanced_parts(int total, int parts) {
  std::vector<int> v(parts, total / parts);
  for (int i = 0; i < total % parts; ++i) v[i] += 1;
  return v;
}

VarietyPtr pentagonal_for_genus(const FieldConfig& cfg, const PrimeField& F, int g,
                                uint64_t seed) {
  if (g < 8) throw Error("pentagonal: balanced instances need genus >= 8");
  if (g == 10 || g == 15)
    throw Error("pentagonal: genus " + std::to_string(g) +
                " unsupported (balanced invariants fail global generation)");
  int fv = g - 4;
  std::vector<int> e = balanced_parts(fv, 4);
  std::vector<int> a = balanced_parts(2 * g - 12, 5);
  std::vector<int> b(5);
  for (int i = 0; i < 5; ++i) b[i] = fv - 2 - a[i];
  return pentagonal_curve(cfg, F, e, b, seed);
}

// ---------------------------------------------------------------------------
// Grassmannian G(2,5)

static std::vector<uint32_t> plucker_point(const PrimeField& F,
                                           const std::vector<uint32_t>& row_a,
                                           const std::vector<uint32_t>& row_b) {
  std::vector<uint32_t> pt;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j)
      pt.push_back(F.sub(F.mul(row_a[i], row_b[j]), F.mul(row_a[j], row_b[i])));
  return pt;
}

VarietyPtr grassmannian_g25(const PrimeField& F) {
  Splitmix rng(0x925ull);
  std::vector<std::vector<uint32_t>> pts;
  const uint32_t n_pts = 3160;
  while (pts.size() < n_pts) {
    std::vector<uint32_t> a(5), b(5);
    for (auto& v : a) v = rng.instance_int();
    for (auto& v : b) v = rng.instance_int();
    std::vector<uint32_t> am(5), bm(5);
    for (int i = 0; i < 5; ++i) am[i] = F.from_int(a[i]), bm[i] = F.from_int(b[i]);
    auto pt = plucker_point(F, am, bm);
    bool nz = false;
    for (uint32_t v : pt) nz |= v != 0;
    if (nz) pts.push_back(std::move(pt));
  }
  auto source = std::make_shared<GradedRing>(GradedRing::standard(10));
  auto model = std::make_shared<PointsModel>(F, std::move(pts), 10);
  VarietyMeta meta;
  meta.constructor = "g25";
  meta.label = "g25";
  meta.dim = 6;
  meta.degree = 5;
  auto X = std::make_shared<EmbeddedVariety>(F, source, model, meta);
  if (X->dimA(1) != 10 || X->dimA(2) != 50) throw Error("g25: section counts off");
  const PrimeField* Fp = &F;
  X->set_sampler([Fp](uint32_t want, uint64_t seed) {
    Splitmix rng(seed);
    std::vector<std::vector<uint32_t>> out;
    while (out.size() < want) {
      std::vector<uint32_t> a(5), b(5);
      for (auto& v : a) v = rng.field_elt(*Fp);
      for (auto& v : b) v = rng.field_elt(*Fp);
      auto pt = plucker_point(*Fp, a, b);
      bool nz = false;
      for (uint32_t v : pt) nz |= v != 0;
      if (nz) out.push_back(std::move(pt));
    }
    return out;
  });
  return X;
}

VarietyPtr grassmannian_g25_symbolic(const PrimeField& F) {
  auto target = std::make_shared<GradedRing>(GradedRing::bigraded(5, 5));
  auto source = std::make_shared<GradedRing>(GradedRing::standard(10));
  std::vector<Polynomial> images;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      Expo e1(10, 0), e2(10, 0);
      e1[i] = 1;
      e1[5 + j] = 1;
      e2[j] = 1;
      e2[5 + i] = 1;
      Polynomial p = monomial(*target, e1);
      p.add_term(F, e2, F.neg(1));
      images.push_back(std::move(p));
    }
  auto model = std::make_shared<SymbolicModel>(
      F, target,
      [](uint32_t k) {
        return Multideg{static_cast<int32_t>(k), static_cast<int32_t>(k)};
      },
      std::move(images));
  VarietyMeta meta;
  meta.constructor = "g25-symbolic";
  meta.label = "g25-symbolic";
  meta.dim = 6;
  meta.degree = 5;
  return std::make_shared<EmbeddedVariety>(F, source, model, meta);
}

// ---------------------------------------------------------------------------
// five Gorenstein points

VarietyPtr gorenstein_points5(const FieldConfig& cfg, const PrimeField& F, uint64_t seed) {
  for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
    Splitmix rng(fnv1a_u64(seed, fnv1a_u64(attempt, fnv1a_str("points5"))));
    std::vector<std::vector<uint32_t>> ipts(5, std::vector<uint32_t>(4));
    for (auto& p : ipts) {
      for (auto& c : p) c = rng.instance_int();
      p[3] = 1;  // affine chart
    }
    bool good = true;
    for (uint32_t q : cfg.all_primes()) {
      PrimeField Fq(q);
      // no 4 coplanar: all 4x4 determinants of point quadruples nonzero
      for (int skip = 0; skip < 5 && good; ++skip) {
        std::vector<std::vector<uint32_t>> m;
        for (int i = 0; i < 5; ++i)
          if (i != skip) {
            std::vector<uint32_t> row(4);
            for (int j = 0; j < 4; ++j) row[j] = Fq.from_int(ipts[i][j]);
            m.push_back(std::move(row));
          }
        if (det_small(Fq, m) == 0) good = false;
      }
      if (!good) break;
    }
    if (!good) continue;
    std::vector<std::vector<uint32_t>> pts(5, std::vector<uint32_t>(4));
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 4; ++j) pts[i][j] = F.from_int(ipts[i][j]);
    auto source = std::make_shared<GradedRing>(GradedRing::standard(4));
    auto model = std::make_shared<PointsModel>(F, pts, 4, /*exact_scheme=*/true);
    VarietyMeta meta;
    meta.constructor = "points5";
    meta.label = "points5";
    meta.seed = seed;
    meta.degenerate_retries = attempt;
    meta.dim = 0;
    meta.degree = 5;
    meta.expected_h0 = [](uint32_t k) {
      if (k == 0) return static_cast<int64_t>(1);
      if (k == 1) return static_cast<int64_t>(4);
      return static_cast<int64_t>(5);
    };
    auto X = std::make_shared<EmbeddedVariety>(F, source, model, meta);
    auto pts_sp = std::make_shared<std::vector<std::vector<uint32_t>>>(pts);
    X->set_sampler([pts_sp](uint32_t want, uint64_t) {
      std::vector<std::vector<uint32_t>> out;
      for (uint32_t i = 0; i < want && i < pts_sp->size(); ++i) out.push_back((*pts_sp)[i]);
      return out;
    });
    return X;
  }
  throw degenerate("five points in general position");
}

// ---------------------------------------------------------------------------
// scroll sheaf cohomology (pentagonal scrolls, dim X = 4)

int64_t scroll_cohomology(const ScrollCurveData& data, int i, int j, int k) {
  const auto& e = data.scroll->e;
  const int dim = static_cast<int>(e.size());
  const int f = data.scroll->f;
  if (i < 0 || i > dim) return 0;
  if (j >= 0) {
    if (i > 1) return 0;
    H01 h = p1_cohomology(sym_twists(e, j, k));
    return i == 0 ? h.h0 : h.h1;
  }
  if (j >= -(dim - 1)) return 0;  // -1 >= j >= -(dim-1)
  // Serre duality with K_X = -dim*H + (f-2)R
  return scroll_cohomology(data, dim - i, -dim - j, f - 2 - k);
}

int64_t chi_scroll(const ScrollCurveData& data, int j, int k) {
  int64_t chi = 0;
  for (int i = 0; i <= static_cast<int>(data.scroll->e.size()); ++i)
    chi += (i % 2 ? -1 : 1) * scroll_cohomology(data, i, j, k);
  return chi;
}

int64_t chi_J_3H(const ScrollCurveData& data) {
  if (data.a.empty()) throw Error("chi_J_3H: pentagonal data required");
  const int f = data.scroll->f;
  int64_t chi = 0;
  for (int ai : data.a) chi += chi_scroll(data, 1, ai);       // O(-2H+a_iR) (3H)
  for (int bi : data.b) chi -= chi_scroll(data, 0, bi);       // O(-3H+b_iR) (3H)
  chi += chi_scroll(data, -2, f - 2);                         // O(-5H+(f-2)R) (3H)
  return chi;
}

// ---------------------------------------------------------------------------
// spec-driven dispatch

VarietyPtr build_variety(const VarietySpec& spec, const FieldConfig& cfg, const PrimeField& F) {
  const std::string& c = spec.constructor;
  auto need_pos = [&](size_t n) {
    if (spec.pos.size() != n)
      throw Error("variety spec " + c + ": expected " + std::to_string(n) + " parameters");
  };
  VarietyPtr X;
  if (c == "veronese") {
    need_pos(2);
    X = veronese(F, static_cast<int>(spec.pos[0]), static_cast<int>(spec.pos[1]));
  } else if (c == "segre") {
    need_pos(2);
    X = segre(F, static_cast<int>(spec.pos[0]), static_cast<int>(spec.pos[1]));
  } else if (c == "scroll") {
    std::vector<int> e;
    for (auto v : spec.pos) e.push_back(static_cast<int>(v));
    X = scroll_variety(F, e);
  } else if (c == "ci") {
    if (spec.pos.size() < 2) throw Error("ci: need N,d1[,d2...]");
    std::vector<int> degs;
    for (size_t i = 1; i < spec.pos.size(); ++i) degs.push_back(static_cast<int>(spec.pos[i]));
    X = complete_intersection(cfg, F, static_cast<int>(spec.pos[0]), degs, spec.seed);
  } else if (c == "plane-canonical") {
    need_pos(1);
    X = plane_curve_canonical(cfg, F, static_cast<int>(spec.pos[0]), spec.seed);
  } else if (c == "tetragonal") {
    need_pos(3);
    auto b = spec.find("b");
    if (!b || b->size() != 2) throw Error("tetragonal: need b=b1,b2");
    X = tetragonal_curve(cfg, F,
                         {static_cast<int>(spec.pos[0]), static_cast<int>(spec.pos[1]),
                          static_cast<int>(spec.pos[2])},
                         static_cast<int>((*b)[0]), static_cast<int>((*b)[1]), spec.seed);
  } else if (c == "pentagonal") {
    if (auto gv = spec.find("g")) {
      X = pentagonal_for_genus(cfg, F, static_cast<int>((*gv)[0]), spec.seed);
    } else {
      need_pos(4);
      auto b = spec.find("b");
      if (!b || b->size() != 5) throw Error("pentagonal: need b=b1,..,b5 or g=<genus>");
      std::vector<int> e, bb;
      for (auto v : spec.pos) e.push_back(static_cast<int>(v));
      for (auto v : *b) bb.push_back(static_cast<int>(v));
      X = pentagonal_curve(cfg, F, e, bb, spec.seed);
    }
  } else if (c == "g25") {
    X = grassmannian_g25(F);
  } else if (c == "points5") {
    X = gorenstein_points5(cfg, F, spec.seed);
  } else {
    throw Error("unknown variety constructor '" + c + "'");
  }
  for (auto& [k, v] : spec.kv)
    if (k != "b" && k != "g") throw Error("variety spec: unknown key '" + k + "'");
  return X;
}

}  // namespace conormal
