//! End-to-end acceptance suite. Runs every criterion, prints one PASS/FAIL
//! line each and exits non-zero when any criterion fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use ballcalc::basis::{
    dyadic_basis, greedy_cover, grid_torus_basis, martingale_basis, validate_axioms, BallBasis, BallId, BallShape, GridSpec,
    PartitionTree,
};
use ballcalc::functional::{losc_alpha, losc_alpha_exhaustive, osc_alpha, osc_alpha_exhaustive, OscillationQuery};
use ballcalc::kernel::{
    convolution_kernels, dyadic_weighted_kernels, fejer_kernels, indicator_kernels, validate_kernels, KBCouple, KernelStructure,
    Modulus, Profile,
};
use ballcalc::space::{lp_norm, lp_norm_via_distribution, MeasureSpace, PointSet, ScalarField};
use ballcalc::verify::{
    corpus_standard, equivalence_band, exp_bmo_blo, exp_elementary, exp_norm_equivalence, exp_prop_p_decay, exp_t2_ratio,
    exp_weak_l1, ExperimentReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Collects sub-checks; the first failure is kept for the detail line.
#[derive(Default)]
struct Tally {
    ok: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, pass: bool, what: impl FnOnce() -> String) {
        if pass {
            self.ok += 1;
        } else {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn outcome(self) -> Outcome {
        let mut detail = format!("{} checks ok", self.ok);
        if !self.failures.is_empty() {
            detail = format!("{} failed, first: {}; {detail}", self.failures.len(), self.failures[0]);
        }
        if !self.notes.is_empty() {
            detail.push_str("; ");
            detail.push_str(&self.notes.join("; "));
        }
        Outcome::new(self.failures.is_empty(), detail)
    }
}

fn dyadic(levels: u32) -> BallBasis<f64> {
    dyadic_basis(levels).unwrap()
}

fn grid(d: usize, n: usize, shape: BallShape) -> BallBasis<f64> {
    grid_torus_basis(GridSpec::new(d, n, shape)).unwrap()
}

fn tree(points: usize, seed: u64) -> BallBasis<f64> {
    martingale_basis(&PartitionTree::random(points, seed).unwrap()).unwrap()
}

/// Resolution pairs: coarse and fine versions of each basis family.
fn resolution_pairs() -> Vec<(&'static str, BallBasis<f64>, BallBasis<f64>)> {
    vec![
        ("dyadic 8->10", dyadic(8), dyadic(10)),
        ("grid 128->256", grid(1, 128, BallShape::Cube), grid(1, 256, BallShape::Cube)),
    ]
}

fn within_2x(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0 && a.max(b) / a.min(b) < 2.0
}

fn aggregate(r: &ExperimentReport) -> f64 {
    r.max().map_or(f64::NAN, |(v, _)| v)
}

// 1. osc_alpha / losc_alpha against the exhaustive subset oracle.
fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut t = Tally::default();
    let mut queries = 0;
    for space_no in 0..200 {
        let n = rng.gen_range(1..=12);
        // dyadic rationals keep every sum and α·μ exact
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=16) as f64 / 8.0).collect();
        let space = Arc::new(MeasureSpace::new(weights).unwrap());
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-8..=8) as f64 / 4.0).collect();
        let f = ScalarField::new(space, values).unwrap();
        for q in 0..5 {
            let members = if q == 0 {
                PointSet::full(n)
            } else {
                let s = PointSet::new((0..n).filter(|_| rng.gen_bool(0.6)));
                if s.is_empty() {
                    PointSet::new([rng.gen_range(0..n)])
                } else {
                    s
                }
            };
            let alpha = rng.gen_range(1..=15) as f64 / 16.0;
            let query = OscillationQuery::new(&f, &members, alpha).unwrap();
            let (o, oe) = (osc_alpha(&query), osc_alpha_exhaustive(&query).unwrap());
            let (l, le) = (losc_alpha(&query), losc_alpha_exhaustive(&query).unwrap());
            t.check(o == oe, || format!("space {space_no} query {q}: osc {o} vs oracle {oe}"));
            t.check(l == le, || format!("space {space_no} query {q}: losc {l} vs oracle {le}"));
            queries += 1;
        }
    }
    let elapsed = start.elapsed();
    t.check(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"));
    t.note(format!("{queries} queries on 200 spaces in {:.2}s", elapsed.as_secs_f64()));
    t.outcome()
}

fn random_greedy_instances(b: &BallBasis<f64>, count: usize, seed: u64, t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = b.space().len();
    for k in 0..count {
        let p: f64 = rng.gen_range(0.05..0.9);
        let mut e = PointSet::new((0..n).filter(|_| rng.gen_bool(p)));
        if e.is_empty() {
            e = PointSet::new([rng.gen_range(0..n)]);
        }
        let mut cover: Vec<BallId> = e
            .iter()
            .map(|x| {
                let fam = b.per_point(x);
                fam[rng.gen_range(0..fam.len())]
            })
            .collect();
        cover.sort();
        cover.dedup();
        let chosen = greedy_cover(b, &e, &cover).unwrap();
        let disjoint = chosen.iter().enumerate().all(|(i, &a)| chosen[i + 1..].iter().all(|&c| !b.ball(a).members().intersects(b.ball(c).members())));
        let from_cover = chosen.iter().all(|c| cover.binary_search(c).is_ok());
        let covered = e.iter().all(|x| chosen.iter().any(|&c| b.hull_ball(c).contains(x)));
        t.check(disjoint && from_cover && covered, || {
            format!("{} instance {k}: disjoint {disjoint}, from cover {from_cover}, hull-covers {covered}", b.name())
        });
    }
}

// 2. Basis axioms and greedy covering.
fn axiom_suite() -> Outcome {
    let mut t = Tally::default();
    for l in 0..=10 {
        let b = dyadic(l);
        let r = validate_axioms(&b);
        t.check(r.b1.pass && r.b2.pass && r.b4.pass, || format!("dyadic({l}): {r}"));
        // with a single point the only ball is its own hull
        let expect = if l == 0 { 1.0 } else { 2.0 };
        t.check(r.hull_constant == expect, || format!("dyadic({l}) K = {}", r.hull_constant));
    }
    let mut bases: Vec<BallBasis<f64>> = Vec::new();
    for n in [4, 16, 64, 256] {
        bases.push(grid(1, n, BallShape::Cube));
    }
    for n in [4, 8, 16, 32] {
        bases.push(grid(2, n, BallShape::Cube));
        bases.push(grid(2, n, BallShape::Ball));
    }
    for seed in 1..=3 {
        bases.push(tree(48, seed));
    }
    for b in &bases {
        let r = validate_axioms(b);
        t.check(r.b1.pass && r.b2.pass && r.b4.pass, || format!("{}: {r}", b.name()));
    }
    let cover_bases = [dyadic(6), grid(1, 64, BallShape::Cube), grid(2, 12, BallShape::Ball), tree(48, 1), tree(48, 2), tree(48, 3)];
    for (i, b) in cover_bases.iter().enumerate() {
        random_greedy_instances(b, 100, 100 + i as u64, &mut t);
    }
    t.note(format!("{} bases validated, {} cover instances", 11 + bases.len(), 100 * cover_bases.len()));
    t.outcome()
}

fn check_kernels(label: &str, ks: &KernelStructure<f64>, b: &BallBasis<f64>, t: &mut Tally) {
    let rep = validate_kernels(ks, b);
    t.check(rep.passed(), || format!("{label}: {rep}"));
    let Some(c2) = rep.c2 else {
        return;
    };
    let c1 = rep.c1;
    let w = b.space().weights();
    let omega = ks.modulus();
    let mut worst_mass = 0.0f64;
    let mut bad = None;
    for ball in b.balls() {
        let Some(phi) = ks.dense(b, ball.id()) else { continue };
        let mu = ball.measure();
        let mass: f64 = phi.iter().zip(w).map(|(p, w)| p * w).sum();
        worst_mass = worst_mass.max((mass - 1.0).abs());
        for (y, &p) in phi.iter().enumerate() {
            let lower_ok = !ball.contains(y) || p * mu >= c1 * (1.0 - 1e-12);
            let upper_ok = match b.d_of(y, ball.id()) {
                Some(d) => p <= c2 / mu * omega.eval(d / mu) * (1.0 + 1e-9),
                None => p == 0.0,
            };
            if bad.is_none() && !(lower_ok && upper_ok) {
                bad = Some((ball.id(), y, lower_ok, upper_ok));
            }
        }
    }
    t.check(worst_mass < 1e-10, || format!("{label}: mass residual {worst_mass}"));
    t.check(bad.is_none(), || format!("{label}: K2 fails at {bad:?}"));
    t.note(format!("{label} c1={:.4} c2={:.4} residual={worst_mass:.1e}", c1, c2));
}

// 3. Kernel structures: unit mass and two-sided bounds, plus I(t^-2).
fn kernel_suite() -> Outcome {
    let mut t = Tally::default();
    let d8 = dyadic(8);
    let g64 = grid(1, 64, BallShape::Cube);
    let g128 = grid(1, 128, BallShape::Cube);
    let g2 = grid(2, 16, BallShape::Cube);
    let g2b = grid(2, 16, BallShape::Ball);
    let tr = tree(48, 1);
    for (label, b) in [("indicator/dyadic8", &d8), ("indicator/grid64", &g64), ("indicator/grid2d16", &g2), ("indicator/tree", &tr)] {
        check_kernels(label, &indicator_kernels(b), b, &mut t);
    }
    let alpha: Vec<f64> = (0..=8).map(|k| 2f64.powi(-k)).collect();
    check_kernels("dyadic-weighted 2^-k", &dyadic_weighted_kernels(&d8, &alpha).unwrap(), &d8, &mut t);
    let xi = Profile::Power(3.0);
    check_kernels("convolution (1+s)^-3 grid128", &convolution_kernels(&g128, &xi).unwrap(), &g128, &mut t);
    check_kernels("convolution (1+s)^-3 grid2d16", &convolution_kernels(&g2, &xi).unwrap(), &g2, &mut t);
    check_kernels("convolution (1+s)^-3 grid2d16 ball", &convolution_kernels(&g2b, &xi).unwrap(), &g2b, &mut t);
    check_kernels("fejer grid64", &fejer_kernels(&g64, &[0, 1, 2, 4, 8, 16]).unwrap(), &g64, &mut t);
    let io = Modulus::<f64>::power(2.0).unwrap().i_omega().finite().unwrap_or(f64::NAN);
    t.check(((io - 3.0) / 3.0).abs() < 1e-6, || format!("I(t^-2) = {io}, expected 3"));
    t.note(format!("I(t^-2) = {io:.12}"));
    t.outcome()
}

// 4. Maximal-operator oscillation ratios are finite and refinement-stable.
fn t2_stability() -> Outcome {
    let mut t = Tally::default();
    for (label, lo, hi) in resolution_pairs() {
        let dyadic = lo.is_dyadic();
        let mut families: Vec<(&str, Box<dyn Fn(&BallBasis<f64>) -> KernelStructure<f64>>)> =
            vec![("indicator", Box::new(|b: &BallBasis<f64>| indicator_kernels(b)))];
        if dyadic {
            families.push((
                "dyadic-weighted 2^-k",
                Box::new(|b: &BallBasis<f64>| {
                    let levels = b.dyadic_levels().unwrap() as i32;
                    let a: Vec<f64> = (0..=levels).map(|k| 2f64.powi(-k)).collect();
                    dyadic_weighted_kernels(b, &a).unwrap()
                }),
            ));
        } else {
            families.push(("convolution (1+s)^-3", Box::new(|b: &BallBasis<f64>| convolution_kernels(b, &Profile::Power(3.0)).unwrap())));
            families.push(("fejer", Box::new(|b: &BallBasis<f64>| fejer_kernels(b, &[0, 1, 2, 4, 8, 16]).unwrap())));
        }
        for (kname, make) in &families {
            let mut aggs = Vec::new();
            for b in [&lo, &hi] {
                let ks = make(b);
                let g = KBCouple::new(b, &ks).unwrap();
                let corpus = corpus_standard(b, 0).unwrap();
                for which in ["t2-ratio", "bmo-blo"] {
                    let start = Instant::now();
                    let r = if which == "t2-ratio" { exp_t2_ratio(&g, &corpus, 0.75) } else { exp_bmo_blo(&g, &corpus) }.unwrap();
                    let el = start.elapsed();
                    t.check(r.passed(), || format!("{label} {kname} {which}: {r}"));
                    t.check(el < Duration::from_secs(300), || format!("{label} {kname} {which} took {el:?}"));
                    aggs.push((which, aggregate(&r)));
                }
            }
            for (k, which) in ["t2-ratio", "bmo-blo"].iter().enumerate() {
                let (a, b) = (aggs[k].1, aggs[k + 2].1);
                t.check(within_2x(a, b), || format!("{label} {kname} {which}: {a} -> {b}"));
                t.note(format!("{label} {kname} {which} {a:.4}->{b:.4}"));
            }
        }
    }
    t.outcome()
}

// 5. Level-set decay of the log singularity.
fn level_set_decay() -> Outcome {
    let mut t = Tally::default();
    for b in [dyadic(10), grid(1, 256, BallShape::Cube)] {
        let corpus = corpus_standard(&b, 0).unwrap().only(&["log-singularity"]);
        let r = exp_prop_p_decay(&b, &corpus, 0.75, 0.5).unwrap();
        let row = &r.rows[0];
        t.check(r.passed() && row.ratio <= 0.5, || format!("{}: {r}", b.name()));
        t.note(format!(
            "{}: c={} worst ratio={} steps past threshold={} tail slope={:.3} threshold={}",
            b.name(),
            row.values[0],
            row.ratio,
            row.values[2],
            row.values[3],
            r.config_value("threshold").unwrap_or("?")
        ));
    }
    t.outcome()
}

// 6. BMO/BMO_α and BLO/BLO_α stay in a resolution-stable band.
fn norm_equivalence() -> Outcome {
    let mut t = Tally::default();
    let alphas = [0.6, 0.75, 0.9];
    for (label, lo, hi) in resolution_pairs() {
        let mut bands = Vec::new();
        for b in [&lo, &hi] {
            let corpus = corpus_standard(b, 0).unwrap();
            let r = exp_norm_equivalence(b, &corpus, &alphas).unwrap();
            let c = equivalence_band(&r);
            t.check(r.passed() && c.is_finite(), || format!("{}: {r}", b.name()));
            bands.push(c);
        }
        t.check(within_2x(bands[0], bands[1]), || format!("{label}: C {} -> {}", bands[0], bands[1]));
        t.note(format!("{label} C {:.4}->{:.4}", bands[0], bands[1]));
    }
    t.outcome()
}

// 7. Weak-type bound of the standard maximal function and the layer-cake
// identity.
fn weak_l1() -> Outcome {
    let mut t = Tally::default();
    let mut worst_gap = 0.0f64;
    for (label, lo, hi) in resolution_pairs() {
        let mut aggs = Vec::new();
        for b in [&lo, &hi] {
            let corpus = corpus_standard(b, 0).unwrap();
            let r = exp_weak_l1(b, &corpus).unwrap();
            t.check(r.passed(), || format!("{}: {r}", b.name()));
            aggs.push(aggregate(&r));
            let full = b.space().full_set();
            for cf in &corpus.fields {
                for p in [1.0, 1.5, 2.0, 3.0, 4.5] {
                    let direct = lp_norm(&cf.field, p, &full).unwrap();
                    let layered = lp_norm_via_distribution(&cf.field, p, &full).unwrap();
                    let gap = (direct - layered).abs() / direct.max(f64::MIN_POSITIVE);
                    worst_gap = worst_gap.max(gap);
                    t.check(gap <= 1e-10, || format!("{} {} p={p}: {direct} vs {layered}", b.name(), cf.name));
                }
            }
        }
        t.check(within_2x(aggs[0], aggs[1]), || format!("{label}: {} -> {}", aggs[0], aggs[1]));
        t.note(format!("{label} {:.4}->{:.4}", aggs[0], aggs[1]));
    }
    t.note(format!("max L^p gap {worst_gap:.1e}"));
    t.outcome()
}

// 8. The five elementary norm inequalities and OSC ≤ LOSC.
fn elementary() -> Outcome {
    let mut t = Tally::default();
    for b in [dyadic(8), dyadic(10), grid(1, 128, BallShape::Cube), grid(1, 256, BallShape::Cube), grid(2, 16, BallShape::Ball), tree(48, 2)] {
        let corpus = corpus_standard(&b, 0).unwrap();
        for alpha in [0.6, 0.75, 0.9] {
            let r = exp_elementary(&b, &corpus, alpha, 1000, 7).unwrap();
            t.check(r.passed(), || format!("{} alpha {alpha}: {r}", b.name()));
            let negative = r.rows.iter().filter(|x| x.values[2] < 0.0).count();
            t.check(negative == 0, || format!("{} alpha {alpha}: {negative} rows with negative slack", b.name()));
        }
    }
    // free-standing queries on random sets and fields
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=64);
        let space = Arc::new(MeasureSpace::new((0..n).map(|_| rng.gen_range(0.1..3.0)).collect()).unwrap());
        let f = ScalarField::new(space, (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect()).unwrap();
        let members = PointSet::new((0..n).filter(|_| rng.gen_bool(0.7)));
        let members = if members.is_empty() { PointSet::full(n) } else { members };
        let q = OscillationQuery::new(&f, &members, rng.gen_range(0.01..0.99)).unwrap();
        if osc_alpha(&q) > losc_alpha(&q) {
            violations += 1;
        }
    }
    t.check(violations == 0, || format!("{violations} of 1000 free queries with OSC > LOSC"));
    t.outcome()
}

fn run_cli(args: &[&str], threads: &str, out: &Path) -> (i32, Vec<u8>) {
    let o = Command::new(env!("CARGO_BIN_EXE_ballcalc"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("BALLCALC_THREADS", threads)
        .output()
        .expect("binary runs");
    (o.status.code().unwrap_or(-1), o.stdout)
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

// 9. Byte-identical CLI output across reruns and thread caps.
fn cli_determinism() -> Outcome {
    let mut t = Tally::default();
    let tmp = tempfile::tempdir().unwrap();
    let experiments = ["t2-ratio", "bmo-blo", "prop-p", "norm-equivalence", "lemmas", "weak-l1", "elementary"];
    let bases: [&[&str]; 2] = [&["--preset", "dyadic", "--levels", "8"], &["--preset", "grid", "--n", "64"]];
    let mut runs = 0;
    for (bi, basis) in bases.iter().enumerate() {
        for e in experiments {
            let mut args = vec!["experiment", e];
            args.extend_from_slice(basis);
            args.extend_from_slice(&["--seed", "11"]);
            let mut seen: Option<(Vec<u8>, Vec<(String, Vec<u8>)>)> = None;
            for (k, threads) in ["1", "1", "3"].iter().enumerate() {
                let dir = tmp.path().join(format!("{bi}-{e}-{k}"));
                let (code, stdout) = run_cli(&args, threads, &dir);
                runs += 1;
                t.check(code == 0, || format!("{args:?} exit {code}"));
                let files = dir_contents(&dir);
                t.check(files.len() == 3, || format!("{args:?}: {} files", files.len()));
                match &seen {
                    None => seen = Some((stdout, files)),
                    Some((s0, f0)) => {
                        t.check(*s0 == stdout && *f0 == files, || format!("{args:?} differs with BALLCALC_THREADS={threads}"));
                    }
                }
            }
        }
    }
    // a config file gives the same bytes as the equivalent flags
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "# grid run\npreset = grid\nn = 64\nseed = 11\n").unwrap();
    let (c1, s1) = run_cli(&["experiment", "t2-ratio", "--config", cfg.to_str().unwrap()], "2", &tmp.path().join("cfg"));
    let (c2, s2) = run_cli(&["experiment", "t2-ratio", "--preset", "grid", "--n", "64", "--seed", "11"], "1", &tmp.path().join("flags"));
    t.check(c1 == 0 && c2 == 0 && s1 == s2, || "config run differs from flag run".into());
    t.check(dir_contents(&tmp.path().join("cfg")) == dir_contents(&tmp.path().join("flags")), || "config CSVs differ from flag CSVs".into());
    t.note(format!("{} CLI runs", runs + 2));
    t.outcome()
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence of alpha-oscillations", oracle_equivalence),
        ("basis axioms and greedy covers", axiom_suite),
        ("kernel normalization and bounds", kernel_suite),
        ("maximal oscillation ratios stable", t2_stability),
        ("level-set decay of the log singularity", level_set_decay),
        ("norm equivalence band", norm_equivalence),
        ("weak-L1 and layer-cake identity", weak_l1),
        ("elementary norm inequalities", elementary),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name} [{:.1}s] {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
