//! Finite-play demonstrations: replaying games under projective maps,
//! locating tests that do not survive such a replay, defeating
//! center-finding strategies with a pulled-back adversary, and join/meet
//! derivability in the rational plane.
//!
//! Every report here is about the finite play that was actually run. None
//! of them certifies anything about unbounded play.

mod derive;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::closure::{Configuration, ObjId};
use crate::game::{
    derive_request, force_generic_quadruple, play, test_objects, Adversary, Board, Event, Outcome,
    PullbackAdversary, ReplayAdversary, Request, Rules, ScriptStrategy, Stop, Strategy, TestKind,
    TestRecord, Trace,
};
use crate::geometry::{
    circle_preserving_map, Conic, GeomError, GeomObject, HPoint, ObjectKind, ProjMap,
};
use crate::lang::Script;
use crate::numbers::{Constructible, Tower};

pub use derive::{rational_plane_derivability, Derivability, Derivation};

/// Bundled strategies that try to construct the center of the unit circle.
pub const CENTER_ATTEMPTS: [(&str, &str); 4] = [
    ("near_center", include_str!("../../scripts/near_center.rl")),
    (
        "diameter_chords",
        include_str!("../../scripts/diameter_chords.rl"),
    ),
    (
        "trapezoid_axes",
        include_str!("../../scripts/trapezoid_axes.rl"),
    ),
    ("polar_walk", include_str!("../../scripts/polar_walk.rl")),
];

/// A fresh configuration holding only the unit circle.
pub fn unit_circle_config() -> Configuration {
    Configuration::from_objects(Arc::new(Tower::new()), [Conic::unit_circle().into()])
}

pub fn origin() -> GeomObject {
    HPoint::from_ratios((0, 1), (0, 1)).into()
}

/// A straightedge game on the unit circle: a forced generic quadruple, then
/// one move per choice until `max_moves` moves have been made. A choice
/// `(i, j)` picks two objects modulo the configuration size and joins or
/// intersects them; choices that name no legal move are skipped. The
/// newest object is output at the end.
pub fn straightedge_game(
    choices: &[(usize, usize)],
    adversary: &mut dyn Adversary,
    max_moves: usize,
) -> Trace {
    let initial = unit_circle_config();
    let rules = Rules {
        compass: false,
        max_moves,
    };
    let mut strategy = |b: &mut Board<'_>| -> Result<(), Stop> {
        force_generic_quadruple(b)?;
        for &(i, j) in choices {
            if b.moves_made() >= max_moves {
                break;
            }
            let n = b.config().len();
            let (x, y) = (i % n, j % n);
            let kinds = (
                b.object(x).map(GeomObject::kind),
                b.object(y).map(GeomObject::kind),
            );
            let req = match kinds {
                (Some(ObjectKind::Point), Some(ObjectKind::Point)) => Request::Join(x, y),
                (Some(ObjectKind::Point), _) | (_, Some(ObjectKind::Point)) => continue,
                _ => Request::Intersect(x, y),
            };
            if derive_request(b.config(), &req).is_ok() {
                b.apply(req)?;
            }
        }
        b.output(b.config().len() - 1)
    };
    play(&mut strategy, adversary, &initial, None, rules)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LabError {
    #[error("event {event}: {reason}")]
    StepInvalid { event: usize, reason: String },
    #[error("output {id}: replay produced {found}, the image of the original is {expected}")]
    OutputMismatch {
        id: ObjId,
        expected: GeomObject,
        found: GeomObject,
    },
    #[error("invariant violated at move {step}: {reason}")]
    InvariantViolation { step: usize, reason: String },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

fn map_request(
    req: &Request,
    ids: &HashMap<ObjId, ObjId>,
    t: &ProjMap,
    identity: bool,
) -> Result<Request, String> {
    let m = |id: ObjId| {
        ids.get(&id)
            .copied()
            .ok_or_else(|| format!("object {id} has no image"))
    };
    Ok(match req {
        Request::Join(a, b) => Request::Join(m(*a)?, m(*b)?),
        Request::Intersect(a, b) => Request::Intersect(m(*a)?, m(*b)?),
        Request::Circle(..) => {
            return Err("compass moves do not commute with projective maps".into())
        }
        Request::Point(set) if identity => Request::Point(set.clone()),
        Request::Point(set) => Request::Point(set.image(t)),
    })
}

/// First test whose value changes when the game is replayed under a map.
#[derive(Clone, Debug)]
pub struct Divergence {
    /// Position among the tests of the original run.
    pub index: usize,
    pub kind: TestKind,
    pub operands: Vec<ObjId>,
    pub original: Vec<GeomObject>,
    pub transformed: Vec<GeomObject>,
    pub before: Result<bool, String>,
    pub after: Result<bool, String>,
    /// Construction history of the operands in the original run.
    pub provenance: Vec<String>,
}

impl Divergence {
    /// Evaluates both tests again from the stored objects.
    pub fn reverify(&self) -> bool {
        let before = test_objects(self.kind, &self.original.iter().collect::<Vec<_>>());
        let after = test_objects(self.kind, &self.transformed.iter().collect::<Vec<_>>());
        before == self.before && after == self.after && before != after
    }
}

fn show_result(r: &Result<bool, String>) -> String {
    match r {
        Ok(b) => b.to_string(),
        Err(e) => format!("error ({e})"),
    }
}

fn approx(obj: &GeomObject) -> String {
    match obj.as_point().and_then(HPoint::to_affine_f64) {
        Some((x, y)) => format!("{obj}  ~ ({x:.6}, {y:.6})"),
        None => obj.to_string(),
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.operands.iter().map(|i| i.to_string()).collect();
        writeln!(
            f,
            "divergence at test {}: {}({})",
            self.index,
            self.kind.name(),
            ids.join(", ")
        )?;
        writeln!(f, "  original: {}", show_result(&self.before))?;
        writeln!(f, "  transformed: {}", show_result(&self.after))?;
        for (i, (a, b)) in self.original.iter().zip(&self.transformed).enumerate() {
            writeln!(f, "  operand {}: {}", i + 1, approx(a))?;
            writeln!(f, "    image: {}", approx(b))?;
        }
        writeln!(f, "  provenance:")?;
        for line in &self.provenance {
            writeln!(f, "    {line}")?;
        }
        Ok(())
    }
}

fn provenance_lines(cfg: &Configuration, operands: &[ObjId]) -> Vec<String> {
    let mut seen = Vec::new();
    for &id in operands {
        for i in cfg.derivation_chain(id) {
            if !seen.contains(&i) {
                seen.push(i);
            }
        }
    }
    seen.sort_unstable();
    seen.into_iter()
        .map(|i| {
            let e = &cfg.entries()[i];
            let parents: Vec<String> = e.provenance.parents.iter().map(|p| p.to_string()).collect();
            format!(
                "{i} = {}({}) #{} @{}: {}",
                e.provenance.op.name(),
                parents.join(", "),
                e.provenance.branch,
                e.provenance.step,
                approx(&e.object)
            )
        })
        .collect()
}

enum Mode {
    /// Copy test records unchanged.
    Transform,
    /// Re-evaluate tests on the images and stop at the first change.
    Diverge,
}

struct Mirror {
    trace: Trace,
    divergence: Option<Divergence>,
}

/// Replays `trace` with every object replaced by its `t`-image.
fn mirror(trace: &Trace, t: &ProjMap, mode: Mode) -> Result<Mirror, LabError> {
    let identity = t.projectively_eq(&ProjMap::identity());
    let initial = trace.initial.mapped(|o| t.apply(o));
    let answers: Vec<HPoint> = trace.answers().iter().map(|p| t.map_point(p)).collect();
    let description = if identity {
        trace.adversary.clone()
    } else {
        format!("{} under {t}", trace.adversary)
    };
    let mut adversary = ReplayAdversary::new(description, answers);
    let target = trace.target.as_ref().map(|o| t.apply(o));
    let mut board = Board::new(&initial, &mut adversary, target.as_ref(), trace.rules);

    let original = &trace.final_config;
    let mut ids: HashMap<ObjId, ObjId> = (0..initial.len()).map(|i| (i, i)).collect();
    let mut failure: Option<LabError> = None;
    let mut divergence = None;
    let mut tests_seen = 0;
    let ending = match &trace.outcome {
        Outcome::Budget => Err(Stop::Budget),
        Outcome::Aborted(why) => Err(Stop::Aborted(why.clone())),
        _ => Ok(()),
    };

    let mut run = |b: &mut Board<'_>| -> Result<(), Stop> {
        let mut fail = |e: LabError| {
            let msg = e.to_string();
            failure = Some(e);
            Stop::Aborted(msg)
        };
        for (event, e) in trace.events.iter().enumerate() {
            match e {
                Event::Move(m) => {
                    let req = map_request(&m.request, &ids, t, identity)
                        .map_err(|reason| fail(LabError::StepInvalid { event, reason }))?;
                    let (response, won) = match b.apply(req) {
                        Ok(r) => (r, false),
                        // the image target appeared, so the original game ends here too
                        Err(Stop::Won) => (b.last_response(), true),
                        Err(Stop::Aborted(why)) => {
                            return Err(fail(LabError::StepInvalid { event, reason: why }));
                        }
                        Err(stop) => return Err(stop),
                    };
                    if response.len() != m.response.len() {
                        return Err(fail(LabError::StepInvalid {
                            event,
                            reason: format!(
                                "{} results instead of {}",
                                response.len(),
                                m.response.len()
                            ),
                        }));
                    }
                    for &r in &m.response {
                        let want = t.apply(&original.entries()[r].object);
                        match response.iter().find(|&&id| b.object(id) == Some(&want)) {
                            Some(&id) => {
                                ids.insert(r, id);
                            }
                            None => {
                                return Err(fail(LabError::StepInvalid {
                                    event,
                                    reason: format!(
                                        "the image of object {r} is not among the results"
                                    ),
                                }))
                            }
                        }
                    }
                    if won {
                        return Err(Stop::Won);
                    }
                }
                Event::Test(rec) => {
                    let operands: Vec<ObjId> =
                        match rec.operands.iter().map(|i| ids.get(i).copied()).collect() {
                            Some(v) => v,
                            None => {
                                return Err(fail(LabError::StepInvalid {
                                    event,
                                    reason: "test operand has no image".into(),
                                }))
                            }
                        };
                    match mode {
                        Mode::Transform => b.record(Event::Test(TestRecord {
                            kind: rec.kind,
                            operands,
                            result: rec.result.clone(),
                        })),
                        Mode::Diverge => {
                            let after = crate::game::evaluate_test(b.config(), rec.kind, &operands);
                            if after != rec.result {
                                let obj =
                                    |cfg: &Configuration, i: ObjId| cfg.entries()[i].object.clone();
                                divergence = Some(Divergence {
                                    index: tests_seen,
                                    kind: rec.kind,
                                    operands: rec.operands.clone(),
                                    original: rec
                                        .operands
                                        .iter()
                                        .map(|&i| obj(original, i))
                                        .collect(),
                                    transformed: operands
                                        .iter()
                                        .map(|&i| obj(b.config(), i))
                                        .collect(),
                                    before: rec.result.clone(),
                                    after,
                                    provenance: provenance_lines(original, &rec.operands),
                                });
                                return Err(Stop::Aborted("tests diverged".into()));
                            }
                            b.record(Event::Test(TestRecord {
                                kind: rec.kind,
                                operands,
                                result: rec.result.clone(),
                            }));
                        }
                    }
                    tests_seen += 1;
                }
                Event::Output(id) => {
                    let Some(&mapped) = ids.get(id) else {
                        return Err(fail(LabError::StepInvalid {
                            event,
                            reason: format!("output {id} has no image"),
                        }));
                    };
                    let expected = t.apply(&original.entries()[*id].object);
                    let found = b.object(mapped).cloned().expect("mapped id exists");
                    if found != expected {
                        return Err(fail(LabError::OutputMismatch {
                            id: *id,
                            expected,
                            found,
                        }));
                    }
                    b.output(mapped)?;
                }
            }
        }
        ending.clone()
    };
    let stop = if board.is_won() {
        Ok(())
    } else {
        Strategy::run(&mut run, &mut board)
    };
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Mirror {
        trace: board.into_trace(&initial, stop),
        divergence,
    })
}

/// Replays a trace with every initial object and every answer of Bob
/// replaced by its image under `t`. Deterministic moves are re-executed,
/// their results must be exactly the images of the original results, and
/// every output must be the image of the original output. Tests are not
/// re-evaluated: their recorded values are carried over.
pub fn transform_trace(trace: &Trace, t: &ProjMap) -> Result<Trace, LabError> {
    Ok(mirror(trace, t, Mode::Transform)?.trace)
}

/// Plays `script` from `initial` and then replays the game under `t`,
/// re-evaluating every test on the images. Returns the first test whose
/// value changes, or `None` if all agree.
pub fn find_test_divergence(
    script: &Script,
    initial: &Configuration,
    t: &ProjMap,
    adversary: &mut dyn Adversary,
    max_moves: usize,
) -> Result<Option<Divergence>, LabError> {
    let rules = Rules {
        compass: false,
        max_moves,
    };
    let trace = play(
        &mut ScriptStrategy::new(script),
        adversary,
        initial,
        None,
        rules,
    );
    Ok(mirror(&trace, t, Mode::Diverge)?.divergence)
}

/// Checks made after one move of a game against the pulled-back adversary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveCheck {
    pub step: usize,
    pub kind: &'static str,
    /// For answered requests: whether the image of Bob's point is rational.
    pub rational_image: Option<bool>,
    /// Whether the move's results are the results of the image move.
    pub commutes: bool,
}

#[derive(Clone, Debug)]
pub struct DefeatReport {
    pub map: ProjMap,
    pub trace: Trace,
    pub checks: Vec<MoveCheck>,
    /// Whether the target is absent from the final configuration.
    pub target_absent: bool,
    /// Whether no final point has the same image as the target.
    pub image_absent: bool,
}

impl DefeatReport {
    pub fn won(&self) -> bool {
        self.trace.outcome.is_won()
    }

    pub fn violations(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| !c.commutes || c.rational_image == Some(false))
            .count()
    }
}

impl fmt::Display for DefeatReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "adversary: {}", self.trace.adversary)?;
        writeln!(f, "outcome: {}", self.trace.outcome)?;
        writeln!(f, "verdict: {}", if self.won() { "won" } else { "not won" })?;
        writeln!(f, "moves: {}", self.checks.len())?;
        let answered = self
            .checks
            .iter()
            .filter(|c| c.rational_image.is_some())
            .count();
        writeln!(f, "answers with rational images: {answered}")?;
        writeln!(f, "invariant violations: {}", self.violations())?;
        writeln!(f, "target absent: {}", self.target_absent)?;
        writeln!(f, "target image absent: {}", self.image_absent)?;
        if let Some(t) = &self.trace.target {
            writeln!(f, "target: {}", approx(t))?;
            writeln!(f, "target image: {}", approx(&self.map.apply(t)))?;
        }
        writeln!(
            f,
            "scope: this play only ({} moves allowed)",
            self.trace.rules.max_moves
        )
    }
}

fn is_rational_point(p: &HPoint) -> bool {
    p.to_affine()
        .is_some_and(|(x, y)| x.recognize_rational().is_some() && y.recognize_rational().is_some())
}

/// Plays `script` on the unit circle against the adversary pulled back
/// along `R(t)·H(u)`, then verifies the pullback invariants move by move.
pub fn defeat_strategy(
    script: &Script,
    target: &GeomObject,
    u: &Constructible,
    t: &Constructible,
    max_moves: usize,
) -> Result<DefeatReport, LabError> {
    let initial = unit_circle_config();
    defeat_strategy_on(script, &initial, target, u, t, max_moves)
}

pub fn defeat_strategy_on(
    script: &Script,
    initial: &Configuration,
    target: &GeomObject,
    u: &Constructible,
    t: &Constructible,
    max_moves: usize,
) -> Result<DefeatReport, LabError> {
    let map = circle_preserving_map(initial.tower(), u, t)?;
    let mut adversary = PullbackAdversary::new(map.clone());
    let rules = Rules {
        compass: false,
        max_moves,
    };
    let trace = play(
        &mut ScriptStrategy::new(script),
        &mut adversary,
        initial,
        Some(target),
        rules,
    );

    let mut checks = Vec::new();
    for (i, m) in trace.moves().enumerate() {
        let rational_image = m
            .answer
            .as_ref()
            .map(|p| is_rational_point(&map.map_point(p)));
        if rational_image == Some(false) {
            return Err(LabError::InvariantViolation {
                step: i + 1,
                reason: "the image of Bob's point is not rational".into(),
            });
        }
        checks.push(MoveCheck {
            step: i + 1,
            kind: m.request.kind(),
            rational_image,
            commutes: true,
        });
    }
    // commutation of every deterministic step, checked by replaying the image game
    if let Err(e) = mirror(&trace, &map, Mode::Transform) {
        let step = match &e {
            LabError::StepInvalid { event, .. } => {
                trace.events[..*event]
                    .iter()
                    .filter(|e| matches!(e, Event::Move(_)))
                    .count()
                    + 1
            }
            _ => 0,
        };
        return Err(LabError::InvariantViolation {
            step,
            reason: e.to_string(),
        });
    }

    let target_absent = !trace.final_config.contains(target);
    let image = map.apply(target);
    let image_absent = !trace
        .final_config
        .entries()
        .iter()
        .any(|e| map.apply(&e.object) == image);
    if !trace.outcome.is_won() && !(target_absent && image_absent) {
        return Err(LabError::InvariantViolation {
            step: checks.len(),
            reason: "the game is not won but the target is present".into(),
        });
    }
    Ok(DefeatReport {
        map,
        trace,
        checks,
        target_absent,
        image_absent,
    })
}
