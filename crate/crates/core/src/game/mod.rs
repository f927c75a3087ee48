//! The construction game. Alice issues requests; Bob, an [`Adversary`],
//! answers the open-set ones; the [`Board`] applies each move and records a
//! [`Trace`]. Alice wins as soon as the target object appears.

mod adversary;
mod forcing;
mod script;
mod trace;

pub use adversary::{
    Adversary, AdversaryError, PullbackAdversary, RationalAdversary, ReplayAdversary,
};
pub use forcing::{
    force_generic_quadruple, force_generic_quadruple_at, force_point_on_curve, quadruple_radius,
    GENERIC_SEEDS,
};
pub use script::ScriptStrategy;
pub use trace::Trace;

use std::fmt;

use crate::closure::{ClosureError, Configuration, ObjId, Op, Provenance};
use crate::geometry::{self, Carrier, GeomError, GeomObject, HLine, HPoint, ObjectKind, ProjMap};
use crate::numbers::{format_rational, Constructible, Rational, Sign};

pub const DEFAULT_MAX_MOVES: usize = 1000;

/// One primitive of an open set.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// Open disc with a rational radius.
    Disc { center: HPoint, radius: Rational },
    /// Strict side of a line: `a·x + b·y + c` has the given sign, with
    /// `[a:b:c]` the canonical coordinates.
    HalfPlane { line: HLine, positive: bool },
    /// Points whose image under `map` lies in `inner`.
    Preimage { map: ProjMap, inner: Box<Region> },
}

impl Region {
    pub fn contains(&self, p: &HPoint) -> bool {
        match self {
            Region::Disc { center, radius } => {
                let (Some((x, y)), Some((cx, cy))) = (p.to_affine(), center.to_affine()) else {
                    return false;
                };
                let d2 = &(&x - &cx).square() + &(&y - &cy).square();
                (&d2 - &Constructible::rational(radius * radius)).sign() == Sign::Negative
            }
            Region::HalfPlane { line, positive } => {
                let Some((x, y)) = p.to_affine() else {
                    return false;
                };
                let want = if *positive {
                    Sign::Positive
                } else {
                    Sign::Negative
                };
                line.eval_affine(&x, &y).sign() == want
            }
            Region::Preimage { map, inner } => inner.contains(&map.map_point(p)),
        }
    }

    fn bounded(&self) -> bool {
        match self {
            Region::Disc { .. } => true,
            Region::HalfPlane { .. } => false,
            Region::Preimage { inner, .. } => inner.bounded(),
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Disc { center, radius } => {
                write!(f, "disc {} {center}", format_rational(radius))
            }
            Region::HalfPlane { line, positive } => {
                write!(f, "halfplane {} {line}", if *positive { '+' } else { '-' })
            }
            Region::Preimage { map, inner } => write!(f, "preimage {map} {inner}"),
        }
    }
}

/// Finite intersection of open regions. At least one bounded region is
/// required so that requests always name a bounded set.
#[derive(Clone, Debug, PartialEq)]
pub struct OpenSet {
    pub atoms: Vec<Region>,
}

impl OpenSet {
    pub fn disc(center: HPoint, radius: Rational) -> Self {
        OpenSet {
            atoms: vec![Region::Disc { center, radius }],
        }
    }

    pub fn and(mut self, r: Region) -> Self {
        self.atoms.push(r);
        self
    }

    pub fn contains(&self, p: &HPoint) -> bool {
        self.atoms.iter().all(|a| a.contains(p))
    }

    pub fn validate(&self) -> Result<(), String> {
        if !self.atoms.iter().any(Region::bounded) {
            return Err("an open set needs at least one disc".into());
        }
        for a in &self.atoms {
            if let Region::Disc { center, radius } = a {
                if !center.is_finite() {
                    return Err("disc center is at infinity".into());
                }
                if Sign::of_rational(radius) != Sign::Positive {
                    return Err("disc radius must be positive".into());
                }
            }
        }
        Ok(())
    }

    /// `T(U)` expressed as the preimage of `U` under `T⁻¹`.
    pub fn image(&self, t: &ProjMap) -> OpenSet {
        let inv = t.inverse();
        OpenSet {
            atoms: self
                .atoms
                .iter()
                .map(|a| Region::Preimage {
                    map: inv.clone(),
                    inner: Box::new(a.clone()),
                })
                .collect(),
        }
    }
}

impl fmt::Display for OpenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" and ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// What Alice asks for.
#[derive(Clone, Debug, PartialEq)]
pub enum Request {
    /// (i) line through two points.
    Join(ObjId, ObjId),
    /// (ii) common points of two lines or circles.
    Intersect(ObjId, ObjId),
    /// Compass: circle around the first point with radius |ab|.
    Circle(ObjId, ObjId, ObjId),
    /// (iii) an arbitrary point of an open set.
    Point(OpenSet),
}

impl Request {
    pub fn kind(&self) -> &'static str {
        match self {
            Request::Join(..) => "join",
            Request::Intersect(..) => "intersect",
            Request::Circle(..) => "circle",
            Request::Point(_) => "request",
        }
    }

    pub fn operands(&self) -> Vec<ObjId> {
        match *self {
            Request::Join(a, b) | Request::Intersect(a, b) => vec![a, b],
            Request::Circle(c, a, b) => vec![c, a, b],
            Request::Point(_) => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Move {
    pub request: Request,
    /// Ids of the resulting objects, in labeling order.
    pub response: Vec<ObjId>,
    /// Bob's point for open-set requests.
    pub answer: Option<HPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TestKind {
    Incident,
    Equal,
    Parallel,
    Between,
    SameSide,
}

impl TestKind {
    pub const ALL: [TestKind; 5] = [
        TestKind::Incident,
        TestKind::Equal,
        TestKind::Parallel,
        TestKind::Between,
        TestKind::SameSide,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Incident => "incident",
            TestKind::Equal => "equal",
            TestKind::Parallel => "parallel",
            TestKind::Between => "between",
            TestKind::SameSide => "sameside",
        }
    }

    pub fn from_name(s: &str) -> Option<TestKind> {
        TestKind::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            TestKind::Between | TestKind::SameSide => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestRecord {
    pub kind: TestKind,
    pub operands: Vec<ObjId>,
    /// `Err` holds the runtime error, e.g. `between` on non-collinear points.
    pub result: Result<bool, String>,
}

/// A step of a recorded game, in play order.
#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    Move(Move),
    Test(TestRecord),
    /// Object named as Alice's answer.
    Output(ObjId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Won {
        moves: usize,
    },
    /// The strategy ended without producing the target.
    Lost,
    /// The strategy wanted more moves than allowed.
    Budget,
    /// Illegal request, adversary failure or runtime error.
    Aborted(String),
}

impl Outcome {
    pub fn is_won(&self) -> bool {
        matches!(self, Outcome::Won { .. })
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Won { moves } => write!(f, "won {moves}"),
            Outcome::Lost => f.write_str("lost"),
            Outcome::Budget => f.write_str("budget"),
            Outcome::Aborted(why) => write!(f, "aborted {why}"),
        }
    }
}

/// Why a strategy stops early. Board operations return it so that
/// strategies can propagate with `?`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stop {
    Won,
    Budget,
    Aborted(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rules {
    pub compass: bool,
    pub max_moves: usize,
}

impl Default for Rules {
    fn default() -> Self {
        Rules {
            compass: false,
            max_moves: DEFAULT_MAX_MOVES,
        }
    }
}

/// Alice.
pub trait Strategy {
    fn run(&mut self, board: &mut Board<'_>) -> Result<(), Stop>;
}

impl<F: FnMut(&mut Board<'_>) -> Result<(), Stop>> Strategy for F {
    fn run(&mut self, board: &mut Board<'_>) -> Result<(), Stop> {
        self(board)
    }
}

/// Objects produced by a deterministic request: operation, ordered parents
/// and results in labeling order. Empty results are legal (disjoint curves).
pub fn derive_request(
    cfg: &Configuration,
    req: &Request,
) -> Result<(Op, Vec<ObjId>, Vec<GeomObject>), String> {
    let kind = |id: ObjId| {
        cfg.object(id)
            .map(GeomObject::kind)
            .map_err(|e| e.to_string())
    };
    let (op, parents) = match *req {
        Request::Join(a, b) => (Op::Join, vec![a, b]),
        Request::Circle(c, a, b) => (Op::Circle, vec![c, a, b]),
        Request::Intersect(a, b) => match (kind(a)?, kind(b)?) {
            (ObjectKind::Line, ObjectKind::Line) => (Op::Meet, vec![a, b]),
            (ObjectKind::Line, ObjectKind::Conic) => (Op::LineConic, vec![a, b]),
            (ObjectKind::Conic, ObjectKind::Line) => (Op::LineConic, vec![b, a]),
            (ObjectKind::Conic, ObjectKind::Conic) => (Op::ConicConic, vec![a, b]),
            _ => {
                return Err(format!(
                    "intersect needs two curves, got objects {a} and {b}"
                ))
            }
        },
        Request::Point(_) => return Err("open-set requests are not deterministic".into()),
    };
    match cfg.derive(op, &parents) {
        Ok(objs) => Ok((op, parents, objs)),
        Err(ClosureError::Geom(GeomError::ConcentricCircles)) => Ok((op, parents, Vec::new())),
        Err(e) => Err(format!("illegal {}: {e}", req.kind())),
    }
}

/// Evaluates a test on stored objects with exact signs.
pub fn evaluate_test(cfg: &Configuration, kind: TestKind, ops: &[ObjId]) -> Result<bool, String> {
    let objs: Vec<&GeomObject> = ops
        .iter()
        .map(|&id| cfg.object(id))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    test_objects(kind, &objs)
}

/// Evaluates a test on bare objects.
pub fn test_objects(kind: TestKind, objs: &[&GeomObject]) -> Result<bool, String> {
    if objs.len() != kind.arity() {
        return Err(format!("{} takes {} operands", kind.name(), kind.arity()));
    }
    let point = |i: usize| {
        objs[i]
            .as_point()
            .ok_or_else(|| format!("operand {} is not a point", i + 1))
    };
    let line = |i: usize| {
        objs[i]
            .as_line()
            .ok_or_else(|| format!("operand {} is not a line", i + 1))
    };
    let geo = |r: Result<bool, GeomError>| r.map_err(|e| e.to_string());
    match kind {
        TestKind::Incident => {
            let p = point(0)?;
            match objs[1] {
                GeomObject::Line(l) => Ok(geometry::incident(p, Carrier::Line(l))),
                GeomObject::Conic(c) => Ok(geometry::incident(p, Carrier::Conic(c))),
                GeomObject::Point(_) => Err("operand 2 is not a curve".into()),
            }
        }
        TestKind::Equal => Ok(objs[0] == objs[1]),
        TestKind::Parallel => Ok(geometry::parallel(line(0)?, line(1)?)),
        TestKind::Between => geo(geometry::between(point(0)?, point(1)?, point(2)?)),
        TestKind::SameSide => geo(geometry::same_side(point(0)?, point(1)?, line(2)?)),
    }
}

/// The current configuration plus the game bookkeeping.
pub struct Board<'a> {
    cfg: Configuration,
    adversary: &'a mut dyn Adversary,
    rules: Rules,
    target: Option<GeomObject>,
    events: Vec<Event>,
    moves: usize,
    won: Option<usize>,
}

impl<'a> Board<'a> {
    pub fn new(
        initial: &Configuration,
        adversary: &'a mut dyn Adversary,
        target: Option<&GeomObject>,
        rules: Rules,
    ) -> Self {
        let won = target.filter(|t| initial.contains(t)).map(|_| 0);
        Board {
            cfg: initial.clone(),
            adversary,
            rules,
            target: target.cloned(),
            events: Vec::new(),
            moves: 0,
            won,
        }
    }

    pub fn config(&self) -> &Configuration {
        &self.cfg
    }

    pub fn object(&self, id: ObjId) -> Option<&GeomObject> {
        self.cfg.get(id).map(|e| &e.object)
    }

    pub fn moves_made(&self) -> usize {
        self.moves
    }

    pub fn rules(&self) -> Rules {
        self.rules
    }

    pub fn is_won(&self) -> bool {
        self.won.is_some()
    }

    fn begin(&self) -> Result<(), Stop> {
        if self.won.is_some() {
            return Err(Stop::Won);
        }
        if self.moves >= self.rules.max_moves {
            return Err(Stop::Budget);
        }
        Ok(())
    }

    fn finish(&mut self, mv: Move) -> Result<Vec<ObjId>, Stop> {
        let response = mv.response.clone();
        self.events.push(Event::Move(mv));
        if let Some(t) = &self.target {
            if self.cfg.contains(t) {
                self.won = Some(self.moves);
                return Err(Stop::Won);
            }
        }
        Ok(response)
    }

    /// Applies a deterministic request.
    pub fn apply(&mut self, request: Request) -> Result<Vec<ObjId>, Stop> {
        self.begin()?;
        if matches!(request, Request::Circle(..)) && !self.rules.compass {
            return Err(Stop::Aborted("compass moves are not allowed".into()));
        }
        if let Request::Point(set) = request {
            return self.request(set).map(|id| vec![id]);
        }
        let (op, parents, objs) = derive_request(&self.cfg, &request).map_err(Stop::Aborted)?;
        self.moves += 1;
        let step = self.moves;
        let response = objs
            .into_iter()
            .enumerate()
            .map(|(branch, obj)| {
                let prov = Provenance {
                    op,
                    parents: parents.clone(),
                    branch: branch as u8,
                    step,
                };
                self.cfg.insert(obj, prov).0
            })
            .collect();
        self.finish(Move {
            request,
            response,
            answer: None,
        })
    }

    pub fn join(&mut self, a: ObjId, b: ObjId) -> Result<ObjId, Stop> {
        Ok(self.apply(Request::Join(a, b))?[0])
    }

    pub fn intersect(&mut self, a: ObjId, b: ObjId) -> Result<Vec<ObjId>, Stop> {
        self.apply(Request::Intersect(a, b))
    }

    pub fn circle(&mut self, center: ObjId, a: ObjId, b: ObjId) -> Result<ObjId, Stop> {
        Ok(self.apply(Request::Circle(center, a, b))?[0])
    }

    /// Asks Bob for a point of `set` and checks his answer exactly.
    pub fn request(&mut self, set: OpenSet) -> Result<ObjId, Stop> {
        self.begin()?;
        set.validate().map_err(Stop::Aborted)?;
        let p = self
            .adversary
            .choose_point(&set, &self.cfg)
            .map_err(|e| Stop::Aborted(format!("adversary failed: {e}")))?;
        if !set.contains(&p) {
            return Err(Stop::Aborted(format!(
                "adversary violation: {p} is not in the requested set"
            )));
        }
        self.moves += 1;
        let prov = Provenance {
            op: Op::Request,
            parents: Vec::new(),
            branch: 0,
            step: self.moves,
        };
        let id = self.cfg.insert(p.clone().into(), prov).0;
        self.finish(Move {
            request: Request::Point(set),
            response: vec![id],
            answer: Some(p),
        })
        .map(|r| r[0])
    }

    /// Evaluates a test. Tests are free: they do not count as moves. A test
    /// that cannot be evaluated stops the strategy.
    pub fn test(&mut self, kind: TestKind, ops: &[ObjId]) -> Result<bool, Stop> {
        let result = evaluate_test(&self.cfg, kind, ops);
        self.events.push(Event::Test(TestRecord {
            kind,
            operands: ops.to_vec(),
            result: result.clone(),
        }));
        result.map_err(|e| Stop::Aborted(format!("{} failed: {e}", kind.name())))
    }

    /// Names an object as Alice's answer.
    pub fn output(&mut self, id: ObjId) -> Result<(), Stop> {
        if self.cfg.get(id).is_none() {
            return Err(Stop::Aborted(format!("output of unknown object {id}")));
        }
        self.events.push(Event::Output(id));
        Ok(())
    }

    /// Results of the most recent move.
    pub(crate) fn last_response(&self) -> Vec<ObjId> {
        self.events
            .iter()
            .rev()
            .find_map(|e| match e {
                Event::Move(m) => Some(m.response.clone()),
                _ => None,
            })
            .unwrap_or_default()
    }

    pub(crate) fn record(&mut self, event: Event) {
        self.events.push(event);
    }

    pub(crate) fn into_trace(self, initial: &Configuration, stop: Result<(), Stop>) -> Trace {
        let outcome = match (self.won, stop) {
            (Some(moves), _) => Outcome::Won { moves },
            (None, Ok(())) | (None, Err(Stop::Won)) => Outcome::Lost,
            (None, Err(Stop::Budget)) => Outcome::Budget,
            (None, Err(Stop::Aborted(why))) => Outcome::Aborted(why),
        };
        Trace {
            rules: self.rules,
            adversary: self.adversary.describe(),
            target: self.target,
            initial: initial.clone(),
            events: self.events,
            outcome,
            final_config: self.cfg,
        }
    }
}

/// Plays `strategy` against `adversary` from `initial`, checking for the
/// target after every move.
pub fn play(
    strategy: &mut dyn Strategy,
    adversary: &mut dyn Adversary,
    initial: &Configuration,
    target: Option<&GeomObject>,
    rules: Rules,
) -> Trace {
    let mut board = Board::new(initial, adversary, target, rules);
    let stop = if board.is_won() {
        Ok(())
    } else {
        strategy.run(&mut board)
    };
    board.into_trace(initial, stop)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::numbers::Tower;

    fn two_points() -> Configuration {
        Configuration::from_objects(
            Arc::new(Tower::new()),
            [
                HPoint::from_ratios((0, 1), (0, 1)).into(),
                HPoint::from_ratios((1, 1), (0, 1)).into(),
            ],
        )
    }

    #[test]
    fn joining_wins_in_one_move() {
        let cfg = two_points();
        let target: GeomObject = geometry::join(
            cfg.object(0).unwrap().as_point().unwrap(),
            cfg.object(1).unwrap().as_point().unwrap(),
        )
        .unwrap()
        .into();
        let mut strat = |b: &mut Board<'_>| b.join(0, 1).map(|_| ());
        let trace = play(
            &mut strat,
            &mut RationalAdversary::new(),
            &cfg,
            Some(&target),
            Rules::default(),
        );
        assert_eq!(trace.outcome, Outcome::Won { moves: 1 });
    }

    #[test]
    fn empty_strategy_loses() {
        let cfg = two_points();
        let target: GeomObject = HPoint::from_ratios((5, 1), (5, 1)).into();
        let mut strat = |_: &mut Board<'_>| Ok(());
        let trace = play(
            &mut strat,
            &mut RationalAdversary::new(),
            &cfg,
            Some(&target),
            Rules::default(),
        );
        assert_eq!(trace.outcome, Outcome::Lost);
    }

    #[test]
    fn budget_and_illegal_moves() {
        let cfg = two_points();
        let rules = Rules {
            max_moves: 1,
            ..Rules::default()
        };
        let mut strat = |b: &mut Board<'_>| {
            b.join(0, 1)?;
            b.join(0, 1).map(|_| ())
        };
        let trace = play(&mut strat, &mut RationalAdversary::new(), &cfg, None, rules);
        assert_eq!(trace.outcome, Outcome::Budget);
        let mut strat = |b: &mut Board<'_>| b.join(0, 0).map(|_| ());
        let trace = play(
            &mut strat,
            &mut RationalAdversary::new(),
            &cfg,
            None,
            Rules::default(),
        );
        assert!(matches!(trace.outcome, Outcome::Aborted(_)));
    }

    #[test]
    fn open_sets_need_a_disc() {
        let l = HLine::new(0.into(), 1.into(), 0.into()).unwrap();
        let set = OpenSet {
            atoms: vec![Region::HalfPlane {
                line: l,
                positive: true,
            }],
        };
        assert!(set.validate().is_err());
    }
}
