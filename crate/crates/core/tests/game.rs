use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rulerlab::closure::{generic_quadruple_check, Configuration};
use rulerlab::game::{
    force_generic_quadruple, force_point_on_curve, play, quadruple_radius, Adversary, Board,
    OpenSet, Outcome, PullbackAdversary, RationalAdversary, Region, Request, Rules, ScriptStrategy,
    Stop, Trace, GENERIC_SEEDS,
};
use rulerlab::geometry::{
    circle_preserving_map, on_conic, on_line, Conic, GeomObject, HLine, HPoint, ProjMap,
};
use rulerlab::lab::unit_circle_config;
use rulerlab::lang::parse;
use rulerlab::numbers::{Constructible, Rational, Tower};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn pt(x: (i64, i64), y: (i64, i64)) -> HPoint {
    HPoint::from_ratios(x, y)
}

fn points(list: &[(i64, i64)]) -> Configuration {
    Configuration::from_objects(
        Arc::new(Tower::new()),
        list.iter().map(|&(x, y)| pt((x, 1), (y, 1)).into()),
    )
}

fn h35(cfg: &Configuration) -> ProjMap {
    circle_preserving_map(
        cfg.tower(),
        &Constructible::ratio(3, 5),
        &Constructible::zero(),
    )
    .unwrap()
}

fn rational_coords(p: &HPoint) -> Option<(Rational, Rational)> {
    let (x, y) = p.to_affine()?;
    Some((x.recognize_rational()?, y.recognize_rational()?))
}

fn choose(adv: &mut dyn Adversary, set: &OpenSet, cfg: &Configuration) -> HPoint {
    let p = adv.choose_point(set, cfg).unwrap();
    assert!(set.contains(&p));
    p
}

fn straightedge(max_moves: usize) -> Rules {
    Rules {
        compass: false,
        max_moves,
    }
}

#[test]
fn rational_adversary_prefers_small_denominators() {
    let cfg = points(&[]);
    let mut adv = RationalAdversary::new();
    let p = choose(&mut adv, &OpenSet::disc(pt((0, 1), (0, 1)), q(1, 1)), &cfg);
    assert_eq!(p, pt((0, 1), (0, 1)));
    let p = choose(&mut adv, &OpenSet::disc(pt((1, 2), (1, 2)), q(1, 10)), &cfg);
    assert_eq!(p, pt((1, 2), (1, 2)));
}

/// Rational enclosure of √2 by bisection.
fn sqrt2_bounds() -> (Rational, Rational) {
    let (mut lo, mut hi) = (q(1, 1), q(3, 2));
    for _ in 0..60 {
        let mid = (&lo + &hi) / q(2, 1);
        if &mid * &mid < q(2, 1) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Smallest-denominator x with |x − √2| < 1/100, by sweeping every
/// denominator up to 1000.
fn sweep_x() -> Rational {
    let (lo, hi) = sqrt2_bounds();
    let r = q(1, 100);
    for den in 1..=1000i64 {
        let d = q(den, 1);
        let first = ((&lo - &r) * &d).floor().to_integer();
        let last = ((&hi + &r) * &d).ceil().to_integer();
        let mut n = first;
        while n <= last {
            let x = Rational::new(n.clone(), BigInt::from(den));
            // |x − s| over s in [lo, hi] is largest at an end
            let (a, b) = ((&x - &lo).abs() < r, (&x - &hi).abs() < r);
            if a && b {
                return x;
            }
            assert_eq!(a, b, "enclosure of the root is too wide to decide {x}");
            n += 1;
        }
    }
    panic!("no denominator up to 1000 works");
}

#[test]
fn rational_adversary_matches_denominator_sweep() {
    let cfg = points(&[]);
    let root2 = cfg.tower().sqrt(&Constructible::integer(2)).unwrap();
    let center = HPoint::affine(root2, Constructible::zero());
    let set = OpenSet::disc(center, q(1, 100));
    let p = choose(&mut RationalAdversary::new(), &set, &cfg);
    let (x, y) = rational_coords(&p).unwrap();
    let expected = sweep_x();
    assert_eq!(expected, q(17, 12));
    assert_eq!(x, expected);
    // the slice at x = 17/12 contains y = 0, which has denominator 1
    assert_eq!(y, Rational::zero());
}

#[test]
fn rational_adversary_respects_half_planes() {
    let cfg = points(&[]);
    // the x-axis has canonical coordinates [0:1:0], so + is y > 0
    let axis = HLine::new(0.into(), 1.into(), 0.into()).unwrap();
    let set = OpenSet::disc(pt((0, 1), (0, 1)), q(1, 1)).and(Region::HalfPlane {
        line: axis,
        positive: true,
    });
    let p = choose(&mut RationalAdversary::new(), &set, &cfg);
    let (x, y) = rational_coords(&p).unwrap();
    assert_eq!(x, Rational::zero());
    assert!(y > Rational::zero());
}

#[test]
fn pullback_identity_enumerates_rationals() {
    let cfg = points(&[]);
    let mut adv = PullbackAdversary::new(ProjMap::identity());
    let set = OpenSet::disc(pt((1, 3), (1, 4)), q(1, 5));
    let p = choose(&mut adv, &set, &cfg);
    assert!(rational_coords(&p).is_some());
    // the origin is guarded even under the identity
    let p = choose(&mut adv, &OpenSet::disc(pt((0, 1), (0, 1)), q(1, 10)), &cfg);
    assert_ne!(p, pt((0, 1), (0, 1)));
}

#[test]
fn pullback_answers_map_to_rationals_and_avoid_the_center() {
    let cfg = unit_circle_config();
    let t = h35(&cfg);
    let mut adv = PullbackAdversary::new(t.clone());
    let center = pt((0, 1), (0, 1));
    assert_eq!(t.map_point(&center), pt((3, 5), (0, 1)));
    for r in [q(1, 2), q(1, 10), q(1, 1000)] {
        let p = choose(&mut adv, &OpenSet::disc(center.clone(), r), &cfg);
        assert_ne!(p, center);
        assert!(rational_coords(&t.map_point(&p)).is_some());
    }
}

#[test]
fn forcing_a_point_on_the_unit_circle() {
    let cfg = unit_circle_config();
    let circle = Conic::unit_circle();
    for adv in [
        &mut RationalAdversary::new() as &mut dyn Adversary,
        &mut PullbackAdversary::new(h35(&cfg)),
    ] {
        let mut board = Board::new(&cfg, adv, None, straightedge(10));
        let id = force_point_on_curve(&mut board, 0, &q(1, 3)).unwrap();
        assert_eq!(board.moves_made(), 4);
        let p = board
            .object(id)
            .and_then(GeomObject::as_point)
            .unwrap()
            .clone();
        assert!(on_conic(&p, &circle));
        // the image under the pulled-back map stays on the circle
        assert!(on_conic(&h35(&cfg).map_point(&p), &circle));
    }
}

#[test]
fn forcing_a_point_on_a_line() {
    let cfg = points(&[(0, 0), (2, 1)]);
    let mut adv = RationalAdversary::new();
    let mut board = Board::new(&cfg, &mut adv, None, straightedge(10));
    let l = board.join(0, 1).unwrap();
    let id = force_point_on_curve(&mut board, l, &q(1, 2)).unwrap();
    assert_eq!(board.moves_made(), 5);
    let p = board.object(id).and_then(GeomObject::as_point).unwrap();
    assert!(on_line(
        p,
        board.object(l).and_then(GeomObject::as_line).unwrap()
    ));
}

#[test]
fn generic_quadruple_against_both_adversaries() {
    let cfg = unit_circle_config();
    for adv in [
        &mut RationalAdversary::new() as &mut dyn Adversary,
        &mut PullbackAdversary::new(h35(&cfg)),
    ] {
        let mut board = Board::new(&cfg, adv, None, straightedge(10));
        let ids = force_generic_quadruple(&mut board).unwrap();
        let pts: Vec<&HPoint> = ids
            .iter()
            .map(|&i| board.object(i).and_then(GeomObject::as_point).unwrap())
            .collect();
        assert!(generic_quadruple_check([pts[0], pts[1], pts[2], pts[3]]));
    }
}

#[derive(Clone, Debug)]
struct Interval(Rational, Rational);

impl Interval {
    fn around(c: Rational, r: &Rational) -> Self {
        Interval(&c - r, &c + r)
    }

    fn sub(&self, o: &Interval) -> Interval {
        Interval(&self.0 - &o.1, &self.1 - &o.0)
    }

    fn mul(&self, o: &Interval) -> Interval {
        let c = [
            &self.0 * &o.0,
            &self.0 * &o.1,
            &self.1 * &o.0,
            &self.1 * &o.1,
        ];
        Interval(
            c.iter().min().unwrap().clone(),
            c.iter().max().unwrap().clone(),
        )
    }

    fn excludes_zero(&self) -> bool {
        self.0 > Rational::zero() || self.1 < Rational::zero()
    }
}

/// Interval evaluation of every orientation and parallelism determinant
/// over the boxes circumscribing discs of radius `r`.
fn boxes_are_generic(seeds: &[(i64, i64); 4], r: &Rational) -> bool {
    let bx: Vec<(Interval, Interval)> = seeds
        .iter()
        .map(|&(x, y)| (Interval::around(q(x, 1), r), Interval::around(q(y, 1), r)))
        .collect();
    let d = |i: usize, j: usize| (bx[j].0.sub(&bx[i].0), bx[j].1.sub(&bx[i].1));
    let det =
        |(a, b): (Interval, Interval), (c, e): (Interval, Interval)| a.mul(&e).sub(&b.mul(&c));
    let triples =
        [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)].map(|(i, j, k)| det(d(i, j), d(i, k)));
    let opposite =
        [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)].map(|(i, j, k, l)| det(d(i, j), d(k, l)));
    triples.iter().chain(&opposite).all(Interval::excludes_zero)
}

#[test]
fn quadruple_radius_agrees_with_interval_analysis() {
    let r = quadruple_radius(&GENERIC_SEEDS).unwrap();
    assert_eq!(r, q(1, 20));
    assert!(boxes_are_generic(&GENERIC_SEEDS, &r));
    assert!(boxes_are_generic(&GENERIC_SEEDS, &q(1, 100)));
    // far too large: the boxes overlap
    assert!(!boxes_are_generic(&GENERIC_SEEDS, &q(1, 2)));
}

#[test]
fn scripts_win_lose_and_run_out_of_moves() {
    let cfg = points(&[(0, 0), (1, 1)]);
    let diag: GeomObject = HLine::new(1.into(), (-1).into(), 0.into()).unwrap().into();
    let script = parse("given A, B; let l = join(A, B); output l;").unwrap();
    let run = |rules| {
        play(
            &mut ScriptStrategy::new(&script),
            &mut RationalAdversary::new(),
            &cfg,
            Some(&diag),
            rules,
        )
    };
    assert_eq!(run(straightedge(5)).outcome, Outcome::Won { moves: 1 });

    let idle = parse("given A, B;").unwrap();
    let trace = play(
        &mut ScriptStrategy::new(&idle),
        &mut RationalAdversary::new(),
        &cfg,
        Some(&diag),
        straightedge(5),
    );
    assert_eq!(trace.outcome, Outcome::Lost);

    let busy = parse("given A, B; repeat 3 { request P in disc((5, 5), 1/2); }").unwrap();
    let trace = play(
        &mut ScriptStrategy::new(&busy),
        &mut RationalAdversary::new(),
        &cfg,
        None,
        straightedge(2),
    );
    assert_eq!(trace.outcome, Outcome::Budget);
    assert_eq!(trace.moves().count(), 2);
}

#[test]
fn runtime_errors_abort() {
    let cfg = points(&[(0, 0), (1, 0), (0, 1)]);
    let aborted = |src: &str| {
        let script = parse(src).unwrap();
        let trace = play(
            &mut ScriptStrategy::new(&script),
            &mut RationalAdversary::new(),
            &cfg,
            None,
            straightedge(20),
        );
        match trace.outcome {
            Outcome::Aborted(why) => why,
            other => panic!("{src}: expected an abort, got {other}"),
        }
    };
    assert!(aborted("given A, B, C; if between(A, B, C) { }").contains("between"));
    assert!(aborted("given A, B, C; assert equal(A, B);").contains("assertion failed"));
    assert!(
        aborted("given A, B, C; let l = join(A, B); let m = join(A, B); let P = meet(l, m);")
            .contains("intersect")
    );
    assert!(aborted("given A, B, C; let l = join(A, A);").contains("join"));
    // compass moves need the compass rule
    assert!(aborted("given A, B, C; let k = circle(A, A, B);").contains("compass"));
}

#[test]
fn disjoint_circles_give_an_empty_response() {
    let cfg = points(&[(0, 0), (1, 0), (5, 0)]);
    let rules = Rules {
        compass: true,
        max_moves: 10,
    };
    let script = parse("given O, E, F; let k = circle(O, O, E); let j = circle(F, O, E); let P, Q = intersect(k, j); output P;").unwrap();
    let trace = play(
        &mut ScriptStrategy::new(&script),
        &mut RationalAdversary::new(),
        &cfg,
        None,
        rules,
    );
    match &trace.outcome {
        Outcome::Aborted(why) => assert!(why.contains("no value"), "{why}"),
        other => panic!("{other}"),
    }
    let last = trace.moves().last().unwrap();
    assert!(last.response.is_empty());
}

#[test]
fn compass_games() {
    let cfg = points(&[(0, 0), (1, 0)]);
    let script = parse(
        "given O, E;
         let k = circle(O, O, E);
         let j = circle(E, E, O);
         let P, Q = intersect(k, j);
         let far = circle(O, O, E);
         output P;",
    )
    .unwrap();
    let rules = Rules {
        compass: true,
        max_moves: 10,
    };
    let trace = play(
        &mut ScriptStrategy::new(&script),
        &mut RationalAdversary::new(),
        &cfg,
        None,
        rules,
    );
    assert_eq!(trace.outcome, Outcome::Lost);
    let tower = trace.final_config.tower();
    let s3 = tower.sqrt(&Constructible::integer(3)).unwrap();
    let half = Constructible::ratio(1, 2);
    let top = HPoint::affine(half.clone(), &s3 * &half);
    let bottom = HPoint::affine(half.clone(), -(&s3 * &half));
    assert!(trace.final_config.contains(&top.into()));
    assert!(trace.final_config.contains(&bottom.into()));
    assert!(trace.replays_exactly());
}

#[test]
fn win_is_permanent() {
    let cfg = points(&[(0, 0), (1, 0), (0, 1)]);
    let target: GeomObject = HLine::new(0.into(), 1.into(), 0.into()).unwrap().into();
    let mut extra = |b: &mut Board<'_>| -> Result<(), Stop> {
        b.join(0, 1)?;
        b.join(0, 2)?;
        b.join(1, 2)?;
        Ok(())
    };
    let trace = play(
        &mut extra,
        &mut RationalAdversary::new(),
        &cfg,
        Some(&target),
        straightedge(10),
    );
    assert_eq!(trace.outcome, Outcome::Won { moves: 1 });
    assert_eq!(trace.moves().count(), 1);

    // already present at the start
    let cfg = Configuration::from_objects(Arc::new(Tower::new()), [target.clone()]);
    let trace = play(
        &mut extra,
        &mut RationalAdversary::new(),
        &cfg,
        Some(&target),
        straightedge(10),
    );
    assert_eq!(trace.outcome, Outcome::Won { moves: 0 });
}

fn center_game() -> Trace {
    let (_, src) = rulerlab::lab::CENTER_ATTEMPTS[2];
    let script = parse(src).unwrap();
    let cfg = unit_circle_config();
    let mut adv = PullbackAdversary::new(h35(&cfg));
    let target = rulerlab::lab::origin();
    play(
        &mut ScriptStrategy::new(&script),
        &mut adv,
        &cfg,
        Some(&target),
        straightedge(200),
    )
}

#[test]
fn traces_round_trip_and_replay() {
    let trace = center_game();
    let text = trace.to_text();
    assert!(text.starts_with("rulerlab-trace 1\n"));
    let parsed = Trace::parse(&text).unwrap();
    assert_eq!(parsed.to_text(), text);
    assert!(trace.replays_exactly());
    assert!(parsed.replays_exactly());
    assert_eq!(center_game().to_text(), text);
}

#[test]
fn tampered_traces_do_not_replay() {
    let text = center_game().to_text();
    // move Bob's first answer
    let idx = text.find("\nanswer ").unwrap();
    let end = idx + 1 + text[idx + 1..].find('\n').unwrap();
    let mut forged = text.clone();
    forged.replace_range(idx + 1..end, "answer point [1:0:100]");
    let parsed = Trace::parse(&forged).unwrap();
    assert!(!parsed.replays_exactly());
    assert!(matches!(parsed.replay().outcome, Outcome::Aborted(_)));
    // a claimed outcome the moves do not support
    let forged = text.replace("\noutcome lost\n", "\noutcome won 3\n");
    assert!(!Trace::parse(&forged).unwrap().replays_exactly());
    assert!(Trace::parse("rulerlab-trace 2\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_games_replay_exactly(choices in prop::collection::vec((0usize..64, 0usize..64, 0u8..3), 1..14)) {
        let cfg = points(&[(0, 0), (1, 0), (0, 1), (2, 3)]);
        let mut strategy = |b: &mut Board<'_>| -> Result<(), Stop> {
            for &(i, j, kind) in &choices {
                let n = b.config().len();
                let (a, c) = (i % n, j % n);
                let req = match kind {
                    0 => Request::Join(a, c),
                    1 => Request::Intersect(a, c),
                    _ => Request::Point(OpenSet::disc(pt((i as i64 % 5, 2), (j as i64 % 7, 3)), q(1, 7))),
                };
                // illegal combinations are skipped rather than played
                let legal = match &req {
                    Request::Point(_) => true,
                    r => rulerlab::game::derive_request(b.config(), r).is_ok(),
                };
                if legal {
                    b.apply(req)?;
                }
            }
            Ok(())
        };
        let trace = play(&mut strategy, &mut RationalAdversary::new(), &cfg, None, straightedge(1000));
        prop_assert_eq!(&trace.outcome, &Outcome::Lost);
        let text = trace.to_text();
        prop_assert_eq!(Trace::parse(&text).unwrap().to_text(), text.clone());
        prop_assert_eq!(trace.replay().to_text(), text);
    }
}

#[test]
fn open_sets_are_checked_before_asking() {
    let cfg = points(&[(0, 0), (1, 0)]);
    let mut adv = RationalAdversary::new();
    let mut board = Board::new(&cfg, &mut adv, None, straightedge(10));
    let axis = board.join(0, 1).unwrap();
    let line = board
        .object(axis)
        .and_then(GeomObject::as_line)
        .unwrap()
        .clone();
    let unbounded = OpenSet {
        atoms: vec![Region::HalfPlane {
            line,
            positive: true,
        }],
    };
    assert!(matches!(board.request(unbounded), Err(Stop::Aborted(_))));
    let zero = OpenSet::disc(pt((0, 1), (0, 1)), Rational::zero());
    assert!(matches!(board.request(zero), Err(Stop::Aborted(_))));
    assert!(board
        .request(OpenSet::disc(pt((0, 1), (0, 1)), Rational::one()))
        .is_ok());
}
