//! Acceptance suite. Each criterion prints one `criterion N: pass|fail` line;
//! the process exits nonzero if any criterion fails.
//!
//! Reference values come from oracles that share no code with the library:
//! f64 models for norms and σ₀, integer bisection for `|z|^p`, Euler's
//! series for arctan, and brute-force grids for zeros.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lpdegree::disintegration::{
    build_partition, chain_infimum_norm, exact_norms, norms_from_isometry, reconstruct_isometry, recognize_atom,
    spine_norm, ChainConfig, PartitionConfig, Recognition, ReconstructConfig, Spine, TreeNode,
};
use lpdegree::effective::{attach_target, compress_left_ce, compress_right_ce, CeFamily, ListEnumeration, Side};
use lpdegree::exactnum::rational::{pow2, rat};
use lpdegree::exactnum::{abs_pow, arctan_interval, zero_find, ComplexBox, Exponent, GaussianRational, Rational};
use lpdegree::lpspace::{disjointness_test, norm, sigma0, AtomCertificate, AtomResidual, Disjointness, LpVector};
use lpdegree::presentation::{decode_set, extend_linear_map, oracle_isometry, CeSetOracle, DecodeConfig, ExactOracle};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn f64_of(q: &Rational) -> f64 {
    q.to_f64().expect("finite rational")
}

fn exponents() -> [Exponent; 3] {
    [Exponent::one(), Exponent::from_ratio(3, 2).unwrap(), Exponent::from_ratio(3, 1).unwrap()]
}

fn gaussian(rng: &mut ChaCha8Rng) -> GaussianRational {
    loop {
        let z = GaussianRational::new(rat(rng.gen_range(-8..=8), rng.gen_range(1..=4)), rat(rng.gen_range(-8..=8), rng.gen_range(1..=4)));
        if !z.is_zero() {
            return z;
        }
    }
}

fn vector_on(rng: &mut ChaCha8Rng, support: &[usize]) -> LpVector {
    LpVector::from_entries(support.iter().map(|&n| (n, gaussian(rng))))
}

fn disjoint_pair(rng: &mut ChaCha8Rng, span: usize) -> (LpVector, LpVector) {
    let mut idx: Vec<usize> = (0..span).collect();
    idx.shuffle(rng);
    let a = rng.gen_range(1..=4);
    let b = rng.gen_range(1..=4);
    (vector_on(rng, &idx[..a]), vector_on(rng, &idx[a..a + b]))
}

fn modulus(z: &GaussianRational) -> f64 {
    f64_of(&z.re).hypot(f64_of(&z.im))
}

fn norm_f64(v: &LpVector, p: f64) -> f64 {
    v.entries().map(|(_, z)| modulus(z).powf(p)).sum::<f64>().powf(1.0 / p)
}

fn sigma0_f64(f: &LpVector, g: &LpVector, p: f64) -> f64 {
    let np = |v: &LpVector| norm_f64(v, p).powf(p);
    (2.0 * (np(f) + np(g)) - np(&(f + g)) - np(&(f - g))).abs()
}

// 1: σ₀ vanishes on disjoint pairs and is certified positive on overlapping ones.
fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut overlap_ks = 0u32;
    for p in exponents() {
        let pf = f64_of(p.value());
        for i in 0..500 {
            if i % 2 == 0 {
                let (f, g) = disjoint_pair(&mut rng, 12);
                let s = sigma0(&f, &g, &p, 20);
                ensure!(s.contains_zero() && s.width_at_most(20), "p={p} disjoint {f} / {g}: {s}");
            } else {
                let (mut f, mut g) = disjoint_pair(&mut rng, 12);
                let shared = rng.gen_range(12..16);
                let big = |rng: &mut ChaCha8Rng| {
                    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                    GaussianRational::new(rat(sign * rng.gen_range(1..=8), 1), rat(rng.gen_range(-8..=8), rng.gen_range(1..=4)))
                };
                f.set(shared, big(&mut rng));
                g.set(shared, big(&mut rng));
                let k = (1..=40).find(|&k| disjointness_test(&f, &g, &p, k) == Ok(Disjointness::Overlapping));
                ensure!(k.is_some(), "p={p} overlapping {f} / {g} undecided at k=40");
                overlap_ks = overlap_ks.max(k.unwrap());
                let s = sigma0(&f, &g, &p, 20);
                let truth = sigma0_f64(&f, &g, pf);
                let mid = f64_of(&s.midpoint().to_rational());
                ensure!((mid - truth).abs() <= 1e-6 + 1e-9 * truth, "p={p} σ₀({f}, {g}) = {s}, oracle {truth}");
            }
        }
    }
    Ok(format!("1500 pairs, overlaps certified by k={overlap_ks}"))
}

// 2: membership decoded from the encoding isometry matches the set.
fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let config = DecodeConfig { max_steps: 10_000 };
    let mut checked = 0;
    for w in 0..20 {
        let members: Vec<usize> = (0..=16).filter(|_| rng.gen_bool(0.4)).collect();
        let mut stages: Vec<Vec<usize>> = vec![Vec::new(); 8];
        for &m in &members {
            stages[rng.gen_range(0..8)].push(m);
        }
        let set = CeSetOracle::finite(ListEnumeration::new(stages)).map_err(|e| e.to_string())?;
        for p in [Exponent::one(), Exponent::from_ratio(3, 1).unwrap()] {
            let iso = oracle_isometry(set.clone(), p.clone(), 10_000).map_err(|e| e.to_string())?;
            for n in 0..=16 {
                let got = decode_set(&iso, &set.enumeration, n, &p, &config)
                    .map_err(|e| format!("window {w} p={p} n={n}: {e}"))?;
                ensure!(got == members.contains(&n), "window {w} p={p}: {n} decoded as {got}, set {members:?}");
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} memberships, no budget failures"))
}

// 3: compression and its inverse reductions never overshoot and get close.
fn criterion_3() -> Outcome {
    const STAGES: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let margin = pow2(-10);
    let mut grid_points = 0usize;
    for f in 0..50 {
        let m: i64 = rng.gen_range(1..=3);
        let len = rng.gen_range(1..=8);
        let values: Vec<Rational> = (0..len)
            .map(|_| {
                let d = rng.gen_range(1..=16);
                rat(rng.gen_range(0..m * d), d)
            })
            .collect();
        let bound = Rational::from_integer(m.into());
        let r: Rational = values.iter().enumerate().map(|(n, v)| v * pow2(-(n as i64)) / &bound).sum();
        let right_ce = f % 2 == 0;
        let c = if right_ce {
            compress_right_ce(CeFamily::rational(Side::Left, values.clone()), Some(bound.clone()))
        } else {
            compress_left_ce(CeFamily::rational(Side::Right, values.clone()), Some(bound.clone()))
        }
        .map_err(|e| e.to_string())?;
        attach_target(&c.r, r.clone()).stream.snapshot(STAGES).map_err(|e| format!("family {f} fwd: {e}"))?;
        for (n, v) in values.iter().enumerate() {
            let back = attach_target(&c.recover(n), v.clone());
            let mut cursor = back.cursor();
            let mut best: Option<Rational> = None;
            for _ in 0..STAGES {
                for q in cursor.advance().map_err(|e| format!("family {f} back({n}): {e}"))? {
                    if best.as_ref().is_none_or(|b| back.side.improves(&q, b)) {
                        best = Some(q);
                    }
                }
            }
            let best = best.ok_or_else(|| format!("family {f} back({n}) emitted nothing"))?;
            // grid of step 2^-8 on [-1, M + 1]
            for i in -256..=(m + 1) * 256 {
                let q = rat(i, 256);
                let inside = if right_ce { q < v - &margin } else { q > v + &margin };
                if inside {
                    let covered = if right_ce { q <= best } else { q >= best };
                    ensure!(covered, "family {f} back({n}): {q} not reached, best {best}, r_n = {v}");
                    grid_points += 1;
                }
            }
        }
    }
    Ok(format!("50 families sound over {STAGES} stages, {grid_points} grid points reached"))
}

fn zeros(k: usize) -> TreeNode {
    TreeNode::new(vec![0; k])
}

fn atom_node(j: usize) -> TreeNode {
    let mut path = vec![0; j];
    path.push(1);
    TreeNode::new(path)
}

// 4: the spine's chain partition, chain infima and atom uniqueness.
fn criterion_4() -> Outcome {
    let p = Exponent::one();
    let part = build_partition(Arc::new(Spine), p.clone(), PartitionConfig::default());
    let cfg = ChainConfig::default();
    let e = |e: lpdegree::disintegration::DisintError| e.to_string();
    let c0 = part.chain(0, 32).map_err(e)?;
    ensure!(c0 == (0..32).map(zeros).collect::<Vec<_>>(), "chain 0 is {c0:?}");
    for j in 0..=12 {
        let c = part.chain(j + 1, 4).map_err(e)?;
        ensure!(c == vec![atom_node(j)], "chain {} is {c:?}", j + 1);
        let g = chain_infimum_norm(&part, j + 1, 12, &cfg).map_err(e)?;
        ensure!(g.contains_rational(&pow2(-(j as i64))) && g.width_at_most(12), "‖g_{}‖ enclosed by {g}", j + 1);
    }
    let g0 = chain_infimum_norm(&part, 0, 12, &cfg).map_err(e)?;
    ensure!(g0.lo_rational().is_zero() && g0.hi_rational() < pow2(-12), "‖g_0‖ enclosed by {g0}");
    for j in 0..=12 {
        let atom = AtomCertificate::unit(j);
        let mut hits = Vec::new();
        for n in 0..=16 {
            if let Recognition::Found(v) = recognize_atom(&part, n, &atom, 12, &cfg).map_err(e)? {
                ensure!(v.support().eq([j]), "g_{n} recognised as {v} for e_{j}");
                hits.push(n);
            }
        }
        ensure!(hits == vec![j + 1], "e_{j} carried by chains {hits:?}");
    }
    Ok(format!("chains 0..=13 analytic, ‖g_0‖ <= {}", g0.hi()))
}

// 5: the reconstructed isometry keeps norms and disjointness, and recovers the norms.
fn criterion_5() -> Outcome {
    let p = Exponent::one();
    let part = Arc::new(build_partition(Arc::new(Spine), p.clone(), PartitionConfig::default()));
    let norms = exact_norms((0..64).map(spine_norm).collect());
    let t = reconstruct_isometry(norms, part.clone(), ReconstructConfig::default()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0f64;
    for _ in 0..100 {
        let mut idx: Vec<usize> = (0..8).collect();
        idx.shuffle(&mut rng);
        let len = rng.gen_range(1..=5);
        let v = vector_on(&mut rng, &idx[..len]);
        let tv = extend_linear_map(&t, &ExactOracle(v.clone()), 14).map_err(|e| e.to_string())?;
        let got = f64_of(&norm(&tv, &p, 24).midpoint().to_rational());
        let err = (got - norm_f64(&v, 1.0)).abs();
        worst = worst.max(err);
        ensure!(err <= 2f64.powi(-10), "‖T{v}‖ = {got}, ‖v‖ = {}", norm_f64(&v, 1.0));
    }
    for _ in 0..50 {
        let (f, g) = disjoint_pair(&mut rng, 8);
        let tf = extend_linear_map(&t, &ExactOracle(f.clone()), 14).map_err(|e| e.to_string())?;
        let tg = extend_linear_map(&t, &ExactOracle(g.clone()), 14).map_err(|e| e.to_string())?;
        let verdict = disjointness_test(&tf, &tg, &p, 20).map_err(|e| e.to_string())?;
        ensure!(verdict == Disjointness::Disjoint, "T{f}, T{g}: {verdict:?}");
    }
    let cfg = ReconstructConfig::default();
    for n in 0..=10 {
        let q = norms_from_isometry(&t, &part, n, 8, &cfg).map_err(|e| format!("r_{n}: {e}"))?;
        ensure!((&q - spine_norm(n)).abs() <= pow2(-8), "r_{n} recovered as {q}, expected {}", spine_norm(n));
    }
    Ok(format!("worst norm error {worst:.2e}, 50 disjoint pairs kept, r_0..=r_10 recovered"))
}

/// The grid point minimising `|F|` at step `2^-14`, found by a full scan
/// at step `2^-7` of `[-r, r]^2` and then a full scan at step `2^-14` of
/// the `2^-6` box around the coarse minimiser.
fn grid_zero(f: &dyn Fn(f64, f64) -> f64, r: f64) -> (f64, f64) {
    let scan = |cx: f64, cy: f64, half: f64, step: f64| {
        let n = (half / step).round() as i64;
        let mut best = (f64::INFINITY, cx, cy);
        for i in -n..=n {
            for j in -n..=n {
                let (x, y) = (cx + i as f64 * step, cy + j as f64 * step);
                let v = f(x, y);
                if v < best.0 {
                    best = (v, x, y);
                }
            }
        }
        (best.1, best.2)
    };
    let (x, y) = scan(0.0, 0.0, r, 2f64.powi(-7));
    scan(x, y, 2f64.powi(-6), 2f64.powi(-14))
}

fn cmod(re: f64, im: f64) -> f64 {
    re.hypot(im)
}

fn dist(z: &GaussianRational, x: f64, y: f64) -> f64 {
    cmod(f64_of(&z.re) - x, f64_of(&z.im) - y)
}

fn small_gaussian(rng: &mut ChaCha8Rng, scale: i64) -> GaussianRational {
    GaussianRational::new(rat(rng.gen_range(-scale..=scale), 64), rat(rng.gen_range(-scale..=scale), 64))
}

// 6: zero_find lands within 2^-10 of the zero on affine and σ₀ residual instances.
fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let tol = 2f64.powi(-10);
    let grid = 2f64.powi(-14);
    let mut worst = 0f64;
    for i in 0..25 {
        let z0 = small_gaussian(&mut rng, 90);
        let a = gaussian(&mut rng);
        let (z0f, af) = ((f64_of(&z0.re), f64_of(&z0.im)), (f64_of(&a.re), f64_of(&a.im)));
        let model = |x: f64, y: f64| cmod(af.0, af.1) * cmod(x - z0f.0, y - z0f.1);
        let (gx, gy) = grid_zero(&model, 2.0);
        ensure!(dist(&z0, gx, gy) <= grid, "grid oracle missed affine zero {z0}");
        let f = |z: &ComplexBox, prec: u32| {
            &(z - &ComplexBox::from_gaussian(&z0, prec + 8)) * &ComplexBox::from_gaussian(&a, prec + 8)
        };
        let got = zero_find(&f, &Rational::from_integer(2.into()), 10).map_err(|e| format!("affine {i}: {e}"))?;
        let d = dist(&got, gx, gy);
        worst = worst.max(d);
        ensure!(d <= tol + grid && dist(&got, z0f.0, z0f.1) <= tol, "affine {i}: {got} vs grid ({gx}, {gy})");
    }
    let units = [(1, 0), (-1, 0), (0, 1), (0, -1)].map(|(a, b)| GaussianRational::new(rat(a, 1), rat(b, 1)));
    for i in 0..25 {
        let p = exponents()[i % 3].clone();
        let pf = f64_of(p.value());
        let m = rng.gen_range(0..4);
        let c = units[rng.gen_range(0..4)].clone();
        let mut u = LpVector::from_entries((0..4).map(|n| (n, small_gaussian(&mut rng, 40))));
        u.set(m, small_gaussian(&mut rng, 48));
        let truth = &u.get(m) * &c.conj();
        let (cf, um) = ((f64_of(&c.re), f64_of(&c.im)), (f64_of(&u.get(m).re), f64_of(&u.get(m).im)));
        let model = |x: f64, y: f64| {
            // a = u_m − λc, σ₀(a e_m, c e_m) with |c| = 1
            let a = (um.0 - (x * cf.0 - y * cf.1), um.1 - (x * cf.1 + y * cf.0));
            let plus = cmod(a.0 + cf.0, a.1 + cf.1).powf(pf);
            let minus = cmod(a.0 - cf.0, a.1 - cf.1).powf(pf);
            (2.0 * (cmod(a.0, a.1).powf(pf) + 1.0) - plus - minus).abs()
        };
        let radius = norm_f64(&u, pf) + 2f64.powi(-20);
        let (gx, gy) = grid_zero(&model, radius.max(1.0));
        ensure!(dist(&truth, gx, gy) <= grid, "grid oracle missed σ₀ zero {truth} (p={p})");
        let atom = AtomCertificate::new(m, c.clone()).map_err(|e| e.to_string())?;
        let residual = AtomResidual { u: &u, atom: &atom, p: &p };
        let bound = norm(&u, &p, 20).hi_rational();
        let got = zero_find(&residual, &bound, 10).map_err(|e| format!("σ₀ {i}: {e}"))?;
        let d = dist(&got, gx, gy);
        worst = worst.max(d);
        ensure!(d <= tol + grid && dist(&truth, f64_of(&got.re), f64_of(&got.im)) <= tol, "σ₀ {i}: {got} vs {truth}");
    }
    Ok(format!("50 instances, worst distance to grid zero {worst:.2e}"))
}

const FRAC: u32 = 128;

/// `floor(2^128 |z|^p)` by integer bisection on `y^(2b) d^a <= 2^(256b) n^a`
/// where `|z|^2 = n/d` and `p = a/b`.
fn abs_pow_oracle(z: &GaussianRational, p: &Exponent) -> BigInt {
    let s = z.norm_sqr();
    let (a, b) = (p.value().numer().to_u32().unwrap(), p.value().denom().to_u32().unwrap());
    let lhs_scale = s.denom().pow(a);
    let rhs = (BigInt::one() << (2 * b * FRAC) as usize) * s.numer().pow(a);
    let fits = |y: &BigInt| y.pow(2 * b) * &lhs_scale <= rhs;
    let mut hi = BigInt::one() << FRAC as usize;
    while fits(&hi) {
        hi <<= 1;
    }
    let mut lo = BigInt::zero();
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if fits(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

const EULER_FRAC: u32 = 160;

/// `arctan(num/den)` for `0 <= num <= den` from Euler's series
/// `Σ 2^(2n) (n!)^2 / (2n+1)! · x^(2n+1) / (1+x^2)^(n+1)`, as a fixed-point
/// value and an error bound, both in units of `2^-160`.
fn euler_arctan(num: &BigInt, den: &BigInt) -> (BigInt, BigInt) {
    let q = num * num + den * den;
    let a2 = num * num;
    let mut t: BigInt = (BigInt::one() << EULER_FRAC as usize) * num * den / &q;
    let mut sum = BigInt::zero();
    let mut n = 0u64;
    while !t.is_zero() {
        sum += &t;
        t = &t * BigInt::from(2 * n + 2) * &a2 / (BigInt::from(2 * n + 3) * &q);
        n += 1;
    }
    // each term is low by at most n + 1 units; the dropped tail is at most twice the last term
    let err = BigInt::from((n + 2) * (n + 2));
    (sum, err)
}

/// `arctan(x)` as `(value, error)` in units of `2^-160`.
fn arctan_oracle(x: &Rational) -> (BigInt, BigInt) {
    let (num, den) = (x.numer().abs(), x.denom().clone());
    let (v, e) = if num <= den {
        euler_arctan(&num, &den)
    } else {
        // arctan x = 2 arctan 1 − arctan(1/x)
        let (quarter, qe) = euler_arctan(&BigInt::one(), &BigInt::one());
        let (rest, re) = euler_arctan(&den, &num);
        (quarter * 2 - rest, qe * 2 + re)
    };
    if x.is_negative() {
        (-v, e)
    } else {
        (v, e)
    }
}

fn scaled(v: &BigInt, frac: u32) -> Rational {
    Rational::new(v.clone(), BigInt::one() << frac as usize)
}

// 7: abs_pow and arctan enclosures contain the true value and are narrow enough.
fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ps = [(1, 1), (3, 2), (2, 1), (3, 1), (5, 4), (7, 3), (5, 2)];
    for i in 0..1000 {
        let k: u32 = rng.gen_range(4..=60);
        if i % 2 == 0 {
            let (a, b) = ps[rng.gen_range(0..ps.len())];
            let p = Exponent::from_ratio(a, b).unwrap();
            let z = loop {
                let z = GaussianRational::new(rat(rng.gen_range(-40..=40), rng.gen_range(1..=16)), rat(rng.gen_range(-40..=40), rng.gen_range(1..=16)));
                if !z.is_zero() {
                    break z;
                }
            };
            let got = abs_pow(&z, &p, k);
            let y = abs_pow_oracle(&z, &p);
            let (lo, hi) = (scaled(&y, FRAC), scaled(&(&y + 1), FRAC));
            ensure!(got.lo_rational() <= hi && got.hi_rational() >= lo, "|{z}|^{p} at k={k}: {got} misses [{lo}, {hi}]");
            ensure!(got.width_at_most(k), "|{z}|^{p} at k={k}: {got} too wide");
        } else {
            let x = rat(rng.gen_range(-400..=400), rng.gen_range(1..=50));
            let got = arctan_interval(&x, k);
            let (v, e) = arctan_oracle(&x);
            let (lo, hi) = (scaled(&(&v - &e), EULER_FRAC), scaled(&(&v + &e), EULER_FRAC));
            ensure!(got.lo_rational() <= hi && got.hi_rational() >= lo, "arctan({x}) at k={k}: {got} misses [{lo}, {hi}]");
            ensure!(got.width_at_most(k), "arctan({x}) at k={k}: {got} too wide");
        }
    }
    Ok("500 abs_pow and 500 arctan enclosures sound and within 2^-k".into())
}

fn main() -> ExitCode {
    let criteria: [(fn() -> Outcome, u64); 7] = [
        (criterion_1, 60),
        (criterion_2, 120),
        (criterion_3, 60),
        (criterion_4, 30),
        (criterion_5, 120),
        (criterion_6, 60),
        (criterion_7, 30),
    ];
    // optional arguments pick criteria by number
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (run, target)) in criteria.into_iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(s) if took > Duration::from_secs(target) => Err(format!("{s}, but over the {target}s runtime target")),
            o => o,
        };
        let timing = format!("{:.1}s of {target}s", took.as_secs_f64());
        match outcome {
            Ok(s) => println!("criterion {}: pass ({s}; {timing})", i + 1),
            Err(s) => {
                failed += 1;
                println!("criterion {}: fail ({s}; {timing})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
