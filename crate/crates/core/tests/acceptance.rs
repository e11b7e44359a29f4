//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use statrs::function::erf::erfc;

use okounkov::body::{self, approximate_body, lattice_points};
use okounkov::commands::{cmd_degenerate, cmd_quantize, Overrides};
use okounkov::degeneration::{family_coordinates, special_fiber, verify_hypotheses, DegenerationSpec, Status};
use okounkov::exact::{int, Exponent, Polynomial, Rational};
use okounkov::fixtures::{self, Fixture};
use okounkov::problem::ProblemFile;
use okounkov::quant::{
    affinity_matrix, density, mass_outside, max_off_diagonal, weak_pairing, ConvexPotential, QuadratureGrid,
    Schedule,
};
use okounkov::semigroup::{khovanskii_check, KhovanskiiBasis, ValueSemigroup};
use okounkov::valuation::Valuation;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e1(v: i64) -> Exponent {
    Exponent::new(vec![v])
}

fn spec(fx: &Fixture, d: u32) -> Result<DegenerationSpec, String> {
    let basis = KhovanskiiBasis::from_space(&fx.valuation, &fx.space).map_err(|e| e.to_string())?;
    DegenerationSpec::build(&fx.valuation, &fx.space, basis, d, None).map_err(|e| e.to_string())
}

fn all_fixtures() -> [Fixture; 3] {
    [fixtures::cusp(), fixtures::veronese(), fixtures::segre()]
}

// ---------------------------------------------------------------- oracles

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
fn bareiss_rank(mut m: Vec<Vec<i128>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                m[r][k] = (m[rank][c] * m[r][k] - m[r][c] * m[rank][k]) / prev;
            }
            m[r][c] = 0;
        }
        prev = m[rank][c];
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Integer coefficient matrix of polynomials with integral coefficients.
fn integer_matrix(polys: &[Polynomial]) -> Vec<Vec<i128>> {
    let support: BTreeSet<Exponent> = polys.iter().flat_map(|p| p.exponents().cloned()).collect();
    polys
        .iter()
        .map(|p| {
            support
                .iter()
                .map(|e| {
                    let c = p.coeff(e);
                    assert!(c.is_integer());
                    c.to_integer().try_into().expect("small coefficient")
                })
                .collect()
        })
        .collect()
}

/// For monomial generators `x^{a_i}`, `E^d` is spanned by the distinct
/// monomials `x^{a_i1 + ... + a_id}`.
fn monomial_level_sums(fx: &Fixture, d: u32) -> BTreeSet<Exponent> {
    let gens: Vec<Exponent> = fx
        .space
        .basis()
        .iter()
        .map(|p| p.as_monomial().expect("monomial fixture").0.clone())
        .collect();
    let mut acc: BTreeSet<Exponent> = [Exponent::zero(fx.valuation.dim())].into();
    for _ in 0..d {
        acc = acc.iter().flat_map(|a| gens.iter().map(move |g| a + g)).collect();
    }
    acc
}

/// Lowest exponent in lex order, read straight off the terms.
fn lex_lowest(p: &Polynomial) -> Exponent {
    p.exponents().min().expect("nonzero").clone()
}

fn gaussian_tail(x: f64, sigma: f64) -> f64 {
    0.5 * erfc(x / (sigma * std::f64::consts::SQRT_2))
}

/// Mass outside `(m - eta, m + eta)` of `N(m, 1/s)` truncated to `[a, b]`.
fn truncated_gaussian_outside(a: f64, b: f64, m: f64, s: f64, eta: f64) -> f64 {
    let sigma = 1.0 / s.sqrt();
    let inside_domain = 1.0 - gaussian_tail(m - a, sigma) - gaussian_tail(b - m, sigma);
    let left = gaussian_tail(eta, sigma) - gaussian_tail(m - a, sigma);
    let right = gaussian_tail(eta, sigma) - gaussian_tail(b - m, sigma);
    (left.max(0.0) + right.max(0.0)) / inside_domain
}

fn interval_grid(a: i64, b: i64, resolution: u32) -> Arc<QuadratureGrid> {
    let p = body::hull(&[vec![int(a)], vec![int(b)]]).expect("segment");
    Arc::new(QuadratureGrid::new(&p, resolution).expect("grid"))
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

// -------------------------------------------------------------- criteria

fn cusp_example() -> Check {
    let sp = spec(&fixtures::cusp(), 1)?;
    let fiber = special_fiber(&sp).map_err(|e| e.to_string())?;
    let w0 = fiber.w0.keys();
    let expected_w0: BTreeSet<Exponent> = [0, 2, 3].into_iter().map(e1).collect();
    ensure(w0 == expected_w0, || format!("W0 = {w0:?}"))?;
    let lattice = fiber.delta0_lattice.keys();
    let expected_lattice: BTreeSet<Exponent> = (0..=3).map(e1).collect();
    ensure(lattice == expected_lattice, || format!("Delta0 lattice = {lattice:?}"))?;
    ensure(fiber.strict_inclusion, || "strict inclusion not reported".into())?;
    let hyp = verify_hypotheses(&sp, None).map_err(|e| e.to_string())?;
    ensure(hyp.g.status == Status::Pass, || format!("(g): {}", hyp.g.witness))?;
    ensure(hyp.h.status == Status::Pass, || format!("(h): {}", hyp.h.witness))?;
    ensure(sp.dim_ed == 3 && w0.len() == 3, || format!("dim E^1 = {}", sp.dim_ed))?;
    Ok(format!(
        "W0 = {{0,2,3}}, lattice {{0,1,2,3}}, g {}, h {} ({})",
        hyp.g.status, hyp.h.status, hyp.h.witness
    ))
}

fn random_polynomial(rng: &mut StdRng, n: usize) -> Polynomial {
    let terms = rng.random_range(1..=4);
    let parts = (0..terms).map(|_| {
        let e: Vec<i64> = (0..n).map(|_| rng.random_range(0..=3)).collect();
        (int(rng.random_range(-9..=9)), Exponent::new(e))
    });
    Polynomial::from_terms(n, parts.collect::<Vec<_>>()).expect("dimension")
}

fn value_image_rank() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0052);
    let mut dependent_cases = 0;
    for case in 0..50 {
        let n = rng.random_range(1..=2);
        let dim = rng.random_range(1..=6);
        let mut polys: Vec<Polynomial> = Vec::with_capacity(dim);
        while polys.len() < dim {
            if polys.len() >= 2 && rng.random_range(0..4) == 0 {
                // a combination of earlier elements
                let (i, j) = (rng.random_range(0..polys.len()), rng.random_range(0..polys.len()));
                let a = int(rng.random_range(-3..=3));
                let b = int(rng.random_range(-3..=3));
                let comb = polys[i].scale(&a).try_add(&polys[j].scale(&b)).expect("same n");
                polys.push(comb);
            } else {
                polys.push(random_polynomial(&mut rng, n));
            }
        }
        let nonzero: Vec<Polynomial> = polys.into_iter().filter(|p| !p.is_zero()).collect();
        let rank = bareiss_rank(integer_matrix(&nonzero));
        if rank < nonzero.len() {
            dependent_cases += 1;
        }
        let image = Valuation::lex(n).value_image(&nonzero).map_err(|e| e.to_string())?;
        ensure(image.len() == rank, || {
            format!("case {case}: |value image| = {} but rank = {rank}", image.len())
        })?;
    }
    Ok(format!("50 subspaces agree with the Bareiss rank ({dependent_cases} with dependent spanning sets)"))
}

fn semigroup_coherence() -> Check {
    let mut checked = 0;
    for fx in all_fixtures() {
        let sg = ValueSemigroup::compute(&fx.valuation, &fx.space, 8).map_err(|e| e.to_string())?;
        for d in 1..=4u32 {
            let expected_dim = monomial_level_sums(&fx, d).len();
            let sd = &sg.levels[&d];
            ensure(sd.len() == expected_dim && sg.dims[&d] == expected_dim, || {
                format!("{} d={d}: |S_d| = {}, dim E^d = {expected_dim}", fx.name, sd.len())
            })?;
            for e in 1..=4u32 {
                let sde = &sg.levels[&(d + e)];
                for a in sd {
                    for b in &sg.levels[&e] {
                        ensure(sde.contains(&(a + b)), || format!("{} : {a} + {b} not in S_{}", fx.name, d + e))?;
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} sums checked on cusp, veronese, segre"))
}

fn khovanskii_verification() -> Check {
    let fx = fixtures::cusp();
    let full = KhovanskiiBasis::from_space(&fx.valuation, &fx.space).map_err(|e| e.to_string())?;
    let report = khovanskii_check(&full, &fx.valuation, &fx.space, 6).map_err(|e| e.to_string())?;
    ensure(report.pass, || format!("full basis fails: {report:?}"))?;
    let partial = KhovanskiiBasis::new(
        &fx.valuation,
        vec![(1, Polynomial::one(1)), (1, Polynomial::parse(1, "u1^2").expect("poly"))],
    )
    .map_err(|e| e.to_string())?;
    let report = khovanskii_check(&partial, &fx.valuation, &fx.space, 6).map_err(|e| e.to_string())?;
    ensure(!report.pass, || "basis without u^3 passes".into())?;
    ensure(report.first_failing_level == Some(1), || format!("fails at {:?}", report.first_failing_level))?;
    ensure(report.missing == [e1(3)].into(), || format!("missing {:?}", report.missing))?;
    Ok("full basis passes through d = 6; without u^3 fails at d = 1 missing 3".into())
}

fn newton_okounkov_bodies() -> Check {
    let expected: [(&str, Vec<Vec<Rational>>); 3] = [
        ("veronese", vec![vec![int(0)], vec![int(2)]]),
        ("cusp", vec![vec![int(0)], vec![int(3)]]),
        (
            "segre",
            vec![vec![int(0), int(0)], vec![int(0), int(1)], vec![int(1), int(0)], vec![int(1), int(1)]],
        ),
    ];
    for (name, verts) in expected {
        let fx = fixtures::by_name(name).expect("fixture");
        let sg = ValueSemigroup::compute(&fx.valuation, &fx.space, 6).map_err(|e| e.to_string())?;
        let approx = approximate_body(&sg.levels).map_err(|e| e.to_string())?;
        let body = approx.body;
        let got: BTreeSet<Vec<Rational>> = body.vertices().iter().cloned().collect();
        ensure(got == verts.iter().cloned().collect(), || format!("{name}: {}", body.summary()))?;
        body.cross_validate().map_err(|e| format!("{name}: {e}"))?;
        let from_h = okounkov::body::RationalPolytope::from_h_rep(
            body.ambient_dim(),
            body.facets().to_vec(),
            body.equalities().to_vec(),
        )
        .map_err(|e| e.to_string())?;
        ensure(from_h == body, || format!("{name}: H-rep does not rebuild the body"))?;
        for d in 1..=4u32 {
            let count = lattice_points(&body, d).map_err(|e| e.to_string())?.len();
            let di = d as usize;
            let (want, s_d_size) = match name {
                "veronese" => (2 * di + 1, 2 * di + 1),
                // the value 1 is never reached
                "cusp" => (3 * di + 1, 3 * di),
                _ => ((di + 1) * (di + 1), (di + 1) * (di + 1)),
            };
            ensure(count == want, || format!("{name} d={d}: {count} lattice points, expected {want}"))?;
            let got = sg.levels[&d].len();
            ensure(got == s_d_size, || format!("{name} d={d}: |S_d| = {got}, expected {s_d_size}"))?;
        }
    }
    Ok("[0,2], [0,3], unit square; V/H agree; counts 2d+1, 3d+1 (S_d = 3d), (d+1)^2".into())
}

fn distinct_family_values() -> Check {
    let mut total = 0;
    for fx in [fixtures::cusp(), fixtures::veronese(), fixtures::segre(), fixtures::even()] {
        for d in 1..=4 {
            let sp = spec(&fx, d)?;
            let mut seen = BTreeSet::new();
            for c in family_coordinates(&sp) {
                let v = lex_lowest(&c.section);
                ensure(v == c.label, || format!("{} d={d}: coordinate {} has value {v}", fx.name, c.label))?;
                ensure(seen.insert(v), || format!("{} d={d}: repeated value {}", fx.name, c.label))?;
                total += 1;
            }
        }
    }
    Ok(format!("{total} coordinates over 4 fixtures, d <= 4, all values distinct"))
}

fn concentration() -> Check {
    let grid = interval_grid(0, 3, 200);
    let q = ConvexPotential::Quadratic;
    let eta = 0.5;
    let mut worst = 0.0f64;
    for m in [1, 2] {
        let mut prev = f64::INFINITY;
        for k in 0..=10 {
            let s = (1u32 << k) as f64;
            let rho = density(&grid, &q, &e1(m), s).map_err(|e| e.to_string())?;
            let mass = mass_outside(&rho, eta);
            ensure(mass <= prev, || format!("m={m}: mass rises at s={s}: {prev} -> {mass}"))?;
            ensure(k == 0 || mass < prev || mass == 0.0, || format!("m={m}: mass stalls at s={s}"))?;
            prev = mass;
            if s <= 256.0 {
                let oracle = truncated_gaussian_outside(0.0, 3.0, m as f64, s, eta);
                let rel = ((mass - oracle) / oracle).abs();
                worst = worst.max(rel);
                ensure(rel < 0.1, || format!("m={m} s={s}: {mass} vs oracle {oracle}"))?;
            }
        }
        let rho = density(&grid, &q, &e1(m), 200.0).map_err(|e| e.to_string())?;
        let mass = mass_outside(&rho, eta);
        let oracle = truncated_gaussian_outside(0.0, 3.0, m as f64, 200.0, eta);
        ensure(mass < 1e-6, || format!("m={m}: mass {mass} at s=200"))?;
        ensure(((mass - oracle) / oracle).abs() < 0.1, || format!("m={m}: {mass} vs oracle {oracle} at s=200"))?;
        worst = worst.max(((mass - oracle) / oracle).abs());
    }
    Ok(format!("monotone on 1..2^10, < 1e-6 at s=200, worst relative error vs erfc {worst:.3}"))
}

fn weak_convergence() -> Check {
    let grid = interval_grid(0, 3, 200);
    let tau = Polynomial::parse(1, "u1").expect("poly");
    let cubic = ConvexPotential::parse(1, "1/2*u1^2 + 1/6*u1^3").expect("potential");
    let mut slopes = Vec::new();
    for potential in [&ConvexPotential::Quadratic, &cubic] {
        for m in [1, 2] {
            let at = |s: f64| -> Result<f64, String> {
                let rho = density(&grid, potential, &e1(m), s).map_err(|e| e.to_string())?;
                Ok((weak_pairing(&rho, &tau).map_err(|e| e.to_string())? - m as f64).abs())
            };
            let err = at(400.0)?;
            ensure(err <= 1e-2, || format!("{potential}, m={m}: error {err} at s=400"))?;
            let errors: Vec<(f64, f64)> = (9..=12)
                .map(|k| {
                    let s = (1u32 << k) as f64;
                    at(s).map(|e| (s, e))
                })
                .collect::<Result<_, _>>()?;
            if errors.iter().all(|(_, e)| *e < 1e-12) {
                // symmetric Gaussian: the pairing is exact up to rounding
                continue;
            }
            let logs: Vec<(f64, f64)> = errors.iter().map(|(s, e)| (s.ln(), e.ln())).collect();
            let k = slope(&logs);
            ensure(k <= -0.9, || format!("{potential}, m={m}: slope {k:.3} over {errors:?}"))?;
            slopes.push(k);
        }
    }
    ensure(!slopes.is_empty(), || "no potential produced a measurable rate".into())?;
    let fmt: Vec<String> = slopes.iter().map(|k| format!("{k:.3}")).collect();
    Ok(format!("error <= 1e-2 at s=400; log-log slopes over s in [512, 4096]: {}", fmt.join(", ")))
}

fn independence_endgame() -> Check {
    let grid = interval_grid(0, 6, 200);
    let q = ConvexPotential::Quadratic;
    let interior: Vec<i64> = (1..=5).collect();
    let densities = |s: f64| -> Result<Vec<_>, String> {
        interior
            .iter()
            .map(|&m| density(&grid, &q, &e1(m), s).map_err(|e| e.to_string()))
            .collect()
    };
    let a0 = affinity_matrix(&densities(0.0)?).map_err(|e| e.to_string())?;
    ensure(a0.iter().flatten().all(|x| (x - 1.0).abs() < 1e-12), || format!("s=0: {a0:?}"))?;
    let a1000 = affinity_matrix(&densities(1000.0)?).map_err(|e| e.to_string())?;
    let off = max_off_diagonal(&a1000);
    ensure(off < 1e-6, || format!("s=1000: max off-diagonal {off}"))?;
    let a100 = affinity_matrix(&densities(100.0)?).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for i in 0..interior.len() {
        for j in 0..interior.len() {
            if i == j {
                continue;
            }
            let dist = (interior[i] - interior[j]) as f64;
            let oracle = (-100.0 * dist * dist / 8.0).exp();
            if oracle < 1e-100 {
                continue;
            }
            let rel = ((a100[i][j] - oracle) / oracle).abs();
            worst = worst.max(rel);
            ensure(rel < 0.05, || format!("s=100, |m-m'|={dist}: {} vs {oracle}", a100[i][j]))?;
        }
    }
    Ok(format!("all-ones at s=0, max off-diagonal {off:.1e} at s=1000, worst error vs exp(-s/8) {worst:.2e}"))
}

fn schedule() -> Check {
    let sch = Schedule::new(0.5).map_err(|e| e.to_string())?;
    let t = |s: f64| sch.t(s).expect("valid");
    ensure(t(0.0) == 1.0, || "t(0) != 1".into())?;
    ensure((t(1.0) - 0.5).abs() < 1e-12, || "t(1) != t0".into())?;
    ensure((t(11.0) - 1.0 / 22.0).abs() < 1e-12, || format!("t(11) = {}", t(11.0)))?;
    ensure((t(0.5) - 0.75).abs() < 1e-12, || format!("t(1/2) = {}", t(0.5)))?;
    let gap = (t(1.0 - 1e-9) - t(1.0 + 1e-9)).abs();
    ensure(gap < 1e-8, || format!("jump {gap} at s = 1"))?;
    let mut prev = t(1.0);
    for k in 1..=20_000 {
        let s = 1.0 + k as f64 * 0.05;
        let cur = t(s);
        ensure(cur < prev, || format!("not decreasing at s = {s}"))?;
        if s > 100.0 * sch.t0() {
            ensure(cur < 1e-2, || format!("t({s}) = {cur}"))?;
        }
        prev = cur;
    }
    ensure(Schedule::new(0.0).is_err() && Schedule::new(1.2).is_err(), || "t0 outside (0,1] accepted".into())?;
    Ok("t(0)=1, t(1)=t0, t(11)=1/22, continuous, decreasing, < 1e-2 beyond 100 t0".into())
}

fn fixture_problem(name: &str) -> Result<ProblemFile, String> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    ProblemFile::parse(&text).map_err(|e| e.to_string())
}

fn determinism() -> Check {
    let mut compared = 0;
    for name in ["cusp.problem", "veronese.problem", "segre.problem"] {
        let problem = fixture_problem(name)?;
        let mut outputs: BTreeMap<usize, (String, String)> = BTreeMap::new();
        for threads in [1, 2, 8] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| e.to_string())?;
            let pair = pool.install(|| -> Result<(String, String), String> {
                let ov = Overrides::default();
                let deg = cmd_degenerate(&problem, ov).map_err(|e| e.to_string())?;
                let quant = cmd_quantize(&problem, ov).map_err(|e| e.to_string())?;
                Ok((deg.report, quant.report))
            })?;
            outputs.insert(threads, pair);
        }
        let first = &outputs[&1];
        for (threads, out) in &outputs {
            ensure(out == first, || format!("{name}: output with {threads} threads differs"))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} runs of degenerate + quantize on 3 fixtures, byte-identical"))
}

type Criterion = (u32, &'static str, Duration, fn() -> Check);

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "cusp example", Duration::from_secs(1), cusp_example),
        (2, "value image size equals rank", Duration::from_secs(10), value_image_rank),
        (3, "semigroup coherence", Duration::from_secs(10), semigroup_coherence),
        (4, "khovanskii verification", Duration::from_secs(60), khovanskii_verification),
        (5, "newton-okounkov bodies", Duration::from_secs(60), newton_okounkov_bodies),
        (6, "distinct family values", Duration::from_secs(60), distinct_family_values),
        (7, "concentration", Duration::from_secs(5), concentration),
        (8, "weak convergence", Duration::from_secs(5), weak_convergence),
        (9, "independence endgame", Duration::from_secs(60), independence_endgame),
        (10, "schedule", Duration::from_secs(60), schedule),
        (11, "determinism", Duration::from_secs(120), determinism),
    ];
    let mut failures = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("criterion {id:>2} PASS  {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failures += 1;
                println!("criterion {id:>2} FAIL  {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    println!("{} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
