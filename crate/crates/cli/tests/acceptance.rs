//! End-to-end acceptance run. Prints one line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rulerlab::closure::{
    closure_step, density_probe, generic_quadruple_check, Budget, Configuration, OpSet, Provenance,
};
use rulerlab::game::{
    force_generic_quadruple, Adversary, Board, Event, OpenSet, PullbackAdversary,
    RationalAdversary, Rules,
};
use rulerlab::geometry::{
    circle_circle_intersections, circle_from, circle_preserving_map, Conic, GeomObject, HLine,
    HPoint, ProjMap,
};
use rulerlab::lab::{
    defeat_strategy, find_test_divergence, origin, straightedge_game, transform_trace,
    unit_circle_config, CENTER_ATTEMPTS,
};
use rulerlab::lang::{parse, pretty_print};
use rulerlab::numbers::{BinOp, Constructible, NumExpr, Rational, Sign, Tower};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn c(n: i64, d: i64) -> Constructible {
    Constructible::ratio(n, d)
}

fn pt(x: (i64, i64), y: (i64, i64)) -> HPoint {
    HPoint::from_ratios(x, y)
}

fn config(objects: Vec<GeomObject>) -> Configuration {
    Configuration::from_objects(Arc::new(Tower::new()), objects)
}

// ---- 1: sign oracle ----

/// Enclosure `[lo, hi] / 2^p`.
#[derive(Clone, Debug)]
struct Enclosure {
    lo: BigInt,
    hi: BigInt,
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn enclose(e: &NumExpr, p: u32) -> Option<Enclosure> {
    let one = BigInt::from(1u8) << p;
    Some(match e {
        NumExpr::Lit(x) => {
            let n = x.numer() << p;
            Enclosure {
                lo: floor_div(&n, x.denom()),
                hi: ceil_div(&n, x.denom()),
            }
        }
        NumExpr::Bin(op, a, b) => {
            let (a, b) = (enclose(a, p)?, enclose(b, p)?);
            match op {
                BinOp::Add => Enclosure {
                    lo: &a.lo + &b.lo,
                    hi: &a.hi + &b.hi,
                },
                BinOp::Sub => Enclosure {
                    lo: &a.lo - &b.hi,
                    hi: &a.hi - &b.lo,
                },
                BinOp::Mul => {
                    let prods = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
                    Enclosure {
                        lo: floor_div(prods.iter().min().unwrap(), &one),
                        hi: ceil_div(prods.iter().max().unwrap(), &one),
                    }
                }
                BinOp::Div => {
                    if b.lo.sign() != num_bigint::Sign::Plus
                        && b.hi.sign() != num_bigint::Sign::Minus
                    {
                        return None;
                    }
                    let mut lo: Option<BigInt> = None;
                    let mut hi: Option<BigInt> = None;
                    for x in [&a.lo, &a.hi] {
                        for y in [&b.lo, &b.hi] {
                            let n = x << p;
                            let f = floor_div(&n, y);
                            let c = ceil_div(&n, y);
                            lo = Some(lo.map_or(f.clone(), |l| l.min(f)));
                            hi = Some(hi.map_or(c.clone(), |h| h.max(c)));
                        }
                    }
                    Enclosure {
                        lo: lo.unwrap(),
                        hi: hi.unwrap(),
                    }
                }
            }
        }
        NumExpr::Sqrt(a) => {
            let a = enclose(a, p)?;
            if a.hi.sign() == num_bigint::Sign::Minus {
                return None;
            }
            let lo = a.lo.max(BigInt::from(0u8));
            Enclosure {
                lo: (lo << p).sqrt(),
                hi: (&a.hi << p).sqrt() + 1,
            }
        }
    })
}

/// Sign certified by the first precision in 16, 32, ..., 1024 bits whose
/// enclosure excludes zero.
fn oracle_sign(e: &NumExpr) -> Option<Sign> {
    let mut p = 16;
    while p <= 1024 {
        if let Some(iv) = enclose(e, p) {
            if iv.lo.sign() == num_bigint::Sign::Plus {
                return Some(Sign::Positive);
            }
            if iv.hi.sign() == num_bigint::Sign::Minus {
                return Some(Sign::Negative);
            }
        }
        p *= 2;
    }
    None
}

fn bin(op: BinOp, a: NumExpr, b: NumExpr) -> NumExpr {
    NumExpr::Bin(op, Box::new(a), Box::new(b))
}

fn lit(n: i64, d: i64) -> NumExpr {
    NumExpr::Lit(q(n, d))
}

/// Random tree of depth at most `depth` with literals in [-10, 10].
/// Square roots get nonnegative arguments, divisors are `b² + 1`, and some
/// nodes are differences of equal values written two ways.
fn random_tree(rng: &mut ChaCha8Rng, depth: u32) -> NumExpr {
    if depth == 0 || rng.gen_bool(0.45) {
        let d = rng.gen_range(1..=9);
        return lit(rng.gen_range(-10 * d..=10 * d), d);
    }
    let sub = |rng: &mut ChaCha8Rng, by: u32| random_tree(rng, depth.saturating_sub(by));
    match rng.gen_range(0..7) {
        0 => bin(BinOp::Add, sub(rng, 1), sub(rng, 1)),
        1 => bin(BinOp::Sub, sub(rng, 1), sub(rng, 1)),
        2 => bin(BinOp::Mul, sub(rng, 1), sub(rng, 1)),
        3 => {
            let b = sub(rng, 3);
            bin(
                BinOp::Div,
                sub(rng, 1),
                bin(BinOp::Add, bin(BinOp::Mul, b.clone(), b), lit(1, 1)),
            )
        }
        4 => {
            let a = sub(rng, 3);
            let k = rng.gen_range(0..=3);
            NumExpr::Sqrt(Box::new(bin(
                BinOp::Add,
                bin(BinOp::Mul, a.clone(), a),
                lit(k, 1),
            )))
        }
        5 if depth >= 6 => {
            // √x·√y − √(xy) with x, y > 0
            let a = sub(rng, 5);
            let b = sub(rng, 5);
            let x = bin(BinOp::Add, bin(BinOp::Mul, a.clone(), a), lit(1, 1));
            let y = bin(BinOp::Add, bin(BinOp::Mul, b.clone(), b), lit(2, 1));
            let left = bin(
                BinOp::Mul,
                NumExpr::Sqrt(Box::new(x.clone())),
                NumExpr::Sqrt(Box::new(y.clone())),
            );
            bin(
                BinOp::Sub,
                left,
                NumExpr::Sqrt(Box::new(bin(BinOp::Mul, x, y))),
            )
        }
        _ => {
            // a − a' where a' perturbs a by a tiny amount or not at all
            let a = sub(rng, 2);
            let eps = if rng.gen_bool(0.5) {
                lit(0, 1)
            } else {
                lit(1, 1_000_000_007)
            };
            bin(BinOp::Sub, a.clone(), bin(BinOp::Add, a, eps))
        }
    }
}

fn sign_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut certified, mut zeros, mut skipped) = (0, 0, 0);
    for i in 0..10_000 {
        let e = random_tree(&mut rng, 12);
        let tower = Tower::new();
        let exact = match e.eval(&tower) {
            Ok(x) => x.sign(),
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        match oracle_sign(&e) {
            Some(s) => {
                ensure(s == exact, || {
                    format!("tree {i}: oracle {s:?}, exact {exact:?}: {e}")
                })?;
                certified += 1;
            }
            None => {
                if exact == Sign::Zero {
                    zeros += 1;
                }
            }
        }
    }
    ensure(certified > 5_000, || {
        format!("only {certified} trees certified")
    })?;
    Ok(format!(
        "10000 trees: {certified} certified and agreeing, {zeros} exact zeros, {skipped} over the tower budget"
    ))
}

// ---- 2: circle preservation ----

type M3 = [[Constructible; 3]; 3];

fn mat_mul(a: &M3, b: &M3) -> M3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (0..3).fold(Constructible::zero(), |s, k| &s + &(&a[i][k] * &b[k][j]))
        })
    })
}

fn transpose(a: &M3) -> M3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

fn circle_preservation() -> Outcome {
    let tower = Tower::new();
    let u = c(3, 5);
    let w = c(4, 5);
    let j: M3 = std::array::from_fn(|i| {
        std::array::from_fn(|k| match (i, k) {
            (0, 0) | (1, 1) => c(1, 1),
            (2, 2) => c(-1, 1),
            _ => c(0, 1),
        })
    });
    let z = Constructible::zero;
    let h: M3 = [
        [c(1, 1), z(), u.clone()],
        [z(), w, z()],
        [u.clone(), z(), c(1, 1)],
    ];
    for t in [c(0, 1), c(1, 1), c(1, 2)] {
        let den = &c(1, 1) + &t.square();
        let cos = (&c(1, 1) - &t.square()).checked_div(&den).unwrap();
        let sin = (&c(2, 1) * &t).checked_div(&den).unwrap();
        let r: M3 = [
            [cos.clone(), -&sin, z()],
            [sin, cos, z()],
            [z(), z(), c(1, 1)],
        ];
        let expected = mat_mul(&r, &h);
        let lib = circle_preserving_map(&tower, &u, &t).map_err(|e| e.to_string())?;
        let m = lib.matrix();
        // the library may scale its matrix; recover the factor
        let (i, k) = (0..9)
            .map(|n| (n / 3, n % 3))
            .find(|&(i, k)| !expected[i][k].is_zero())
            .unwrap();
        let f = m[i][k].checked_div(&expected[i][k]).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                ensure(m[a][b] == &f * &expected[a][b], || {
                    format!("t={t}: entry ({a},{b}) is not proportional")
                })?;
            }
        }
        let cong = mat_mul(&mat_mul(&transpose(m), &j), m);
        let gap = &c(1, 1) - &u.square();
        let f2 = f.square();
        for a in 0..3 {
            for b in 0..3 {
                let canon = cong[a][b].checked_div(&f2).unwrap();
                ensure(canon == &gap * &j[a][b], || {
                    format!("t={t}: congruence entry ({a},{b}) is {canon}")
                })?;
            }
        }
    }
    Ok("u=3/5, t in {0, 1, 1/2}: MᵀJM = (1-u²)J exactly".into())
}

// ---- 3: transform replay ----

fn transform_replay() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut outputs = 0;
    for run in 0..100 {
        let choices: Vec<(usize, usize)> = (0..200)
            .map(|_| (rng.gen_range(0..1000), rng.gen_range(0..1000)))
            .collect();
        let trace = straightedge_game(&choices, &mut RationalAdversary::new(), 15);
        ensure(trace.moves().count() <= 15, || {
            format!("run {run}: too many moves")
        })?;
        let tower = trace.initial.tower().clone();
        let h = circle_preserving_map(&tower, &c(3, 5), &c(0, 1)).map_err(|e| e.to_string())?;
        let r = circle_preserving_map(&tower, &c(0, 1), &c(1, 2)).map_err(|e| e.to_string())?;
        for (name, map) in [("H(3/5)", h.clone()), ("H(3/5)R(1/2)", h.compose(&r))] {
            let image =
                transform_trace(&trace, &map).map_err(|e| format!("run {run} {name}: {e}"))?;
            let unit: GeomObject = Conic::unit_circle().into();
            ensure(image.final_config.contains(&unit), || {
                format!("run {run} {name}: unit circle lost")
            })?;
            let outs = |t: &rulerlab::game::Trace| -> Vec<usize> {
                t.events
                    .iter()
                    .filter_map(|e| match e {
                        Event::Output(id) => Some(*id),
                        _ => None,
                    })
                    .collect()
            };
            let (a, b) = (outs(&trace), outs(&image));
            ensure(a.len() == b.len() && !a.is_empty(), || {
                format!("run {run} {name}: outputs differ in number")
            })?;
            for (x, y) in a.iter().zip(&b) {
                let orig = trace.final_config.object(*x).map_err(|e| e.to_string())?;
                let got = image.final_config.object(*y).map_err(|e| e.to_string())?;
                ensure(map.apply(orig) == *got, || {
                    format!("run {run} {name}: output mismatch")
                })?;
                outputs += 1;
            }
        }
    }
    Ok(format!(
        "100 traces x 2 maps: {outputs} outputs equal the transformed originals"
    ))
}

// ---- 4: divergence ----

fn h35(tower: &Tower) -> ProjMap {
    circle_preserving_map(tower, &c(3, 5), &c(0, 1)).unwrap()
}

fn divergences() -> Outcome {
    let run = |src: &str, objects: Vec<GeomObject>| {
        let script = parse(src).map_err(|e| format!("{e:?}"))?;
        let cfg = config(objects);
        let map = h35(cfg.tower());
        find_test_divergence(&script, &cfg, &map, &mut RationalAdversary::new(), 100)
            .map_err(|e| e.to_string())
    };
    let line = |a: i64, b: i64, c: i64| -> GeomObject {
        HLine::new(a.into(), b.into(), c.into()).unwrap().into()
    };
    let par = run(
        "given a, b; if parallel(a, b) { output a; } else { output b; }",
        vec![line(0, 1, 0), line(0, 1, -1)],
    )?
    .ok_or("parallel: no divergence")?;
    ensure(
        par.before == Ok(true) && par.after == Ok(false) && par.reverify(),
        || format!("parallel: {par}"),
    )?;
    let between = "given p, q, r; assert between(p, q, r);";
    let pts = |xs: [(i64, i64); 3]| {
        xs.iter()
            .map(|&x| pt(x, (0, 1)).into())
            .collect::<Vec<GeomObject>>()
    };
    let bet = run(between, pts([(-3, 1), (-2, 1), (0, 1)]))?.ok_or("between: no divergence")?;
    ensure(
        bet.before == Ok(true) && bet.after == Ok(false) && bet.reverify(),
        || format!("between: {bet}"),
    )?;
    let expected: Vec<GeomObject> = [(3, 1), (7, 1), (3, 5)]
        .iter()
        .map(|&x| pt(x, (0, 1)).into())
        .collect();
    ensure(bet.transformed == expected, || {
        "between: wrong images".into()
    })?;
    let control = run(between, pts([(-9, 10), (0, 1), (9, 10)]))?;
    ensure(control.is_none(), || "control triple diverged".into())?;
    Ok("parallel and between flips found and re-verified; control triple: not found".into())
}

// ---- 5: defeat ----

fn defeat() -> Outcome {
    let mut parts = Vec::new();
    for (name, src) in CENTER_ATTEMPTS {
        let script = parse(src).map_err(|e| format!("{name}: {e:?}"))?;
        let report = defeat_strategy(&script, &origin(), &c(3, 5), &c(0, 1), 200)
            .map_err(|e| format!("{name}: {e}"))?;
        ensure(!report.won(), || format!("{name}: won"))?;
        ensure(report.violations() == 0, || format!("{name}: violations"))?;
        ensure(report.target_absent && report.image_absent, || {
            format!("{name}: target present")
        })?;
        parts.push(format!("{name} {} moves", report.checks.len()));
    }
    Ok(format!("not won, 0 violations: {}", parts.join(", ")))
}

// ---- 6: density probe ----

const PROBE_DEPTH: usize = 10;

fn probe() -> Outcome {
    let seeds = config(vec![
        pt((0, 1), (0, 1)).into(),
        pt((1, 1), (0, 1)).into(),
        pt((0, 1), (1, 1)).into(),
        pt((2, 1), (3, 1)).into(),
    ]);
    let target = pt((1, 3), (1, 7));
    let out = density_probe(
        &seeds,
        &target,
        &q(1, 1000),
        &OpSet::joins_and_meets(),
        &Budget::default(),
    )
    .map_err(|e| e.to_string())?;
    let w = out
        .witness()
        .ok_or("no witness within the default budget")?;
    let (x, y) = w.point.to_affine().ok_or("witness at infinity")?;
    let eps = c(1, 1000);
    ensure(
        (&x - &c(1, 3)).abs() < eps && (&y - &c(1, 7)).abs() < eps,
        || format!("{} is not close", w.point),
    )?;
    ensure(w.depth == PROBE_DEPTH, || {
        format!("depth {} differs from the golden {PROBE_DEPTH}", w.depth)
    })?;
    Ok(format!("reached {} at depth {}", w.point, w.depth))
}

// ---- 7: triviality ----

fn triviality() -> Outcome {
    let mut cfg = unit_circle_config();
    for depth in 1..=6 {
        let step = closure_step(&cfg, &OpSet::straightedge(), &Budget::default())
            .map_err(|e| e.to_string())?;
        ensure(step.fixed_point, || format!("grew at depth {depth}"))?;
        ensure(step.config.counts() == (0, 0, 1), || {
            format!("depth {depth}: {:?}", step.config.counts())
        })?;
        cfg = step.config;
    }
    Ok("unit circle alone: fixed point at depths 1..6".into())
}

// ---- 8: generic quadruple ----

fn quadruples() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for run in 0..100 {
        // random clutter in the starting configuration
        let mut cfg = unit_circle_config();
        for _ in 0..rng.gen_range(0..6) {
            let p = pt(
                (rng.gen_range(-30..30), rng.gen_range(1..10)),
                (rng.gen_range(-30..30), rng.gen_range(1..10)),
            );
            cfg.insert(p.into(), Provenance::given());
        }
        let mut adv: Box<dyn Adversary> = if run % 2 == 0 {
            Box::new(RationalAdversary::new())
        } else {
            // pullback along a random rotation after H(3/5)
            let t = c(rng.gen_range(-20..20), rng.gen_range(1..20));
            Box::new(PullbackAdversary::new(
                circle_preserving_map(cfg.tower(), &c(3, 5), &t).map_err(|e| e.to_string())?,
            ))
        };
        let rules = Rules {
            compass: false,
            max_moves: 10,
        };
        let mut board = Board::new(&cfg, adv.as_mut(), None, rules);
        // a few unrelated requests first, away from the line x = -5/3 that
        // the pullback maps send to infinity
        for _ in 0..rng.gen_range(0..3) {
            let center = pt((rng.gen_range(-1..=5), 1), (rng.gen_range(-5..=5), 1));
            board
                .request(OpenSet::disc(center, q(1, rng.gen_range(2..9))))
                .map_err(|e| format!("run {run}: {e:?}"))?;
        }
        let ids = force_generic_quadruple(&mut board).map_err(|e| format!("run {run}: {e:?}"))?;
        let pts: Vec<&HPoint> = ids
            .iter()
            .map(|&i| board.object(i).and_then(GeomObject::as_point).unwrap())
            .collect();
        ensure(
            generic_quadruple_check([pts[0], pts[1], pts[2], pts[3]]),
            || format!("run {run}: not generic"),
        )?;
    }
    Ok("100/100 runs generic (50 rational, 50 pullback)".into())
}

// ---- 9: parser ----

fn corpus() -> Vec<(String, String)> {
    let core = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core");
    let mut out = Vec::new();
    for dir in ["tests/corpus", "scripts"] {
        let mut files: Vec<PathBuf> = fs::read_dir(core.join(dir))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        for f in files {
            out.push((
                f.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read_to_string(&f).unwrap(),
            ));
        }
    }
    out
}

/// Removes the first occurrence of `tok` as a separate token of `line`.
fn without(line: &str, tok: char) -> Option<String> {
    let i = line.find(tok)?;
    Some(format!("{}{}", &line[..i], &line[i + tok.len_utf8()..]))
}

fn parser() -> Outcome {
    let scripts = corpus();
    ensure(scripts.len() >= 20, || format!("{} scripts", scripts.len()))?;
    for (name, src) in &scripts {
        let ast = parse(src).map_err(|e| format!("{name}: {e:?}"))?;
        let again = parse(&pretty_print(&ast)).map_err(|e| format!("{name} reprinted: {e:?}"))?;
        ensure(again == ast, || {
            format!("{name}: round trip changed the tree")
        })?;
    }
    let mut mutated = 0;
    for (k, (name, src)) in scripts.iter().enumerate() {
        let lines: Vec<&str> = src.lines().collect();
        let Some(target) = lines.iter().position(|l| {
            let t = l.trim_start();
            (t.starts_with("let ") || t.starts_with("output ") || t.starts_with("request "))
                && t.ends_with(';')
        }) else {
            continue;
        };
        let tok = [';', '(', '=', ','][k % 4];
        let Some(bad) = without(lines[target], tok).or_else(|| without(lines[target], ';')) else {
            continue;
        };
        let mut copy: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
        copy[target] = bad;
        let errs = match parse(&copy.join("\n")) {
            Ok(_) => {
                return Err(format!(
                    "{name}: mutation of line {} still parses",
                    target + 1
                ))
            }
            Err(e) => e,
        };
        ensure(errs[0].line as usize == target + 1, || {
            format!("{name}: error at {} not in line {}", errs[0], target + 1)
        })?;
        mutated += 1;
    }
    ensure(mutated >= 20, || format!("only {mutated} mutations"))?;
    Ok(format!(
        "{} scripts round-trip; {mutated} mutations report the mutated line",
        scripts.len()
    ))
}

// ---- 10: compass ----

fn compass() -> Outcome {
    let tower = Tower::new();
    let o = pt((0, 1), (0, 1));
    let e = pt((1, 1), (0, 1));
    let unit = circle_from(&o, &o, &e).map_err(|e| e.to_string())?;
    ensure(unit == Conic::unit_circle(), || {
        format!("circle_from gave {unit}")
    })?;
    let shifted = circle_from(&e, &o, &e).map_err(|e| e.to_string())?;
    let got = circle_circle_intersections(&tower, &unit, &shifted).map_err(|e| e.to_string())?;
    let r3 = tower.sqrt(&c(3, 1)).unwrap();
    let half = c(1, 2);
    let want = [
        HPoint::affine(half.clone(), &r3 * &half),
        HPoint::affine(half.clone(), -&(&r3 * &half)),
    ];
    ensure(
        got.len() == 2 && want.iter().all(|w| got.contains(w)),
        || format!("got {got:?}"),
    )?;
    Ok("unit circle exact; intersections {(1/2, ±√3/2)}".into())
}

// ---- 11: determinism ----

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rulerlab"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!(
            "rulerlab {}: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("rulerlab-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let scripts = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/scripts");
    let seeds = dir.join("seeds.txt");
    fs::write(&seeds, "0, 0\n1, 0\n0, 1\n2, 3\n").map_err(|e| e.to_string())?;
    let s = |p: &Path| p.to_string_lossy().into_owned();
    let trapezoid = s(&scripts.join("trapezoid_axes.rl"));
    let chords = s(&scripts.join("diameter_chords.rl"));
    let mut outputs: Vec<Vec<Vec<u8>>> = vec![Vec::new(); 3];
    for (k, files) in outputs.iter_mut().enumerate() {
        let f = |name: &str| s(&dir.join(format!("{name}{k}")));
        run_cli(&[
            "play",
            &trapezoid,
            "--target",
            "0,0",
            "--trace",
            &f("rational.trace"),
        ])?;
        run_cli(&[
            "play",
            &chords,
            "--adversary",
            "pullback:3/5,0",
            "--target",
            "0,0",
            "--max-moves",
            "200",
            "--trace",
            &f("pullback.trace"),
        ])?;
        run_cli(&[
            "closure",
            &s(&seeds),
            "--depth",
            "2",
            "--ops",
            "join,meet",
            "--stats",
            &f("stats.csv"),
            "--out",
            &f("closed.cfg"),
        ])?;
        for name in [
            "rational.trace",
            "pullback.trace",
            "stats.csv",
            "closed.cfg",
        ] {
            files.push(fs::read(f(name)).map_err(|e| e.to_string())?);
        }
    }
    ensure(outputs[0] == outputs[1] && outputs[1] == outputs[2], || {
        "outputs differ between runs".into()
    })?;
    run_cli(&["replay", &s(&dir.join("rational.trace0"))])?;
    run_cli(&["replay", &s(&dir.join("pullback.trace0"))])?;
    let _ = fs::remove_dir_all(&dir);
    Ok("play (2 adversaries) and closure: 3 runs byte-identical; traces replay".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("exact sign oracle agreement", sign_oracle),
        ("circle preservation", circle_preservation),
        ("transform replay", transform_replay),
        ("test divergence", divergences),
        ("defeat of center attempts", defeat),
        ("density probe", probe),
        ("straightedge triviality", triviality),
        ("generic quadruple forcing", quadruples),
        ("parser round trip and positions", parser),
        ("compass semantics", compass),
        ("determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} ({secs:.1}s)", i + 1)
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
