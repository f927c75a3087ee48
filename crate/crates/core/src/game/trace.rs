//! Trace files.
//!
//! ```text
//! rulerlab-trace 1
//! rules straightedge max-moves 1000
//! adversary rational
//! tower 0
//! target point [0:0:1]
//! initial
//! objects 1 closed 0
//! conic [1 0 0; 1 0; -1]
//! provenance
//! 0 given @0
//! end
//! events 2
//! request 1 -> 1
//! disc 1/20 point [1:0:1]
//! answer point [1:0:1]
//! test incident 1 0 = true
//! outcome lost
//! final
//! objects 2 closed 0
//! ...
//! end
//! ```
//!
//! One tower block serves the whole file; it holds every level created
//! during the game.

use crate::closure::{read_tower, write_tower, ClosureError, Configuration, Lines, ObjId};
use crate::geometry::{GeomObject, HPoint, ProjMap};
use crate::numbers::{Rational, Tower};

use super::{
    Board, Event, Move, OpenSet, Outcome, Region, ReplayAdversary, Request, Rules, Stop, TestKind,
    TestRecord,
};

const HEADER: &str = "rulerlab-trace 1";

/// A recorded game.
#[derive(Clone, Debug)]
pub struct Trace {
    pub rules: Rules,
    pub adversary: String,
    pub target: Option<GeomObject>,
    pub initial: Configuration,
    pub events: Vec<Event>,
    pub outcome: Outcome,
    pub final_config: Configuration,
}

fn ids(v: &[ObjId]) -> String {
    v.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

impl Trace {
    pub fn moves(&self) -> impl Iterator<Item = &Move> {
        self.events.iter().filter_map(|e| match e {
            Event::Move(m) => Some(m),
            _ => None,
        })
    }

    pub fn tests(&self) -> impl Iterator<Item = &TestRecord> {
        self.events.iter().filter_map(|e| match e {
            Event::Test(t) => Some(t),
            _ => None,
        })
    }

    /// Points Bob supplied, in order.
    pub fn answers(&self) -> Vec<HPoint> {
        self.moves().filter_map(|m| m.answer.clone()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{HEADER}\n");
        let mode = if self.rules.compass {
            "compass"
        } else {
            "straightedge"
        };
        out.push_str(&format!(
            "rules {mode} max-moves {}\n",
            self.rules.max_moves
        ));
        out.push_str(&format!("adversary {}\n", self.adversary));
        write_tower(self.final_config.tower(), &mut out);
        match &self.target {
            Some(t) => out.push_str(&format!("target {t}\n")),
            None => out.push_str("target none\n"),
        }
        out.push_str("initial\n");
        self.initial.write_objects(&mut out);
        out.push_str(&format!("events {}\n", self.events.len()));
        for e in &self.events {
            match e {
                Event::Move(m) => {
                    let resp = ids(&m.response);
                    match &m.request {
                        Request::Point(set) => {
                            out.push_str(&format!("request {} -> {resp}\n", set.atoms.len()));
                            for a in &set.atoms {
                                out.push_str(&format!("{a}\n"));
                            }
                            let p = m.answer.as_ref().expect("answered request");
                            out.push_str(&format!("answer {p}\n"));
                        }
                        r => out.push_str(&format!(
                            "{} {} -> {resp}\n",
                            r.kind(),
                            ids(&r.operands())
                        )),
                    }
                }
                Event::Test(t) => {
                    let res = match &t.result {
                        Ok(b) => b.to_string(),
                        Err(e) => format!("error {e}"),
                    };
                    out.push_str(&format!(
                        "test {} {} = {res}\n",
                        t.kind.name(),
                        ids(&t.operands)
                    ));
                }
                Event::Output(id) => out.push_str(&format!("output {id}\n")),
            }
        }
        out.push_str(&format!("outcome {}\n", self.outcome));
        out.push_str("final\n");
        self.final_config.write_objects(&mut out);
        out
    }

    pub fn parse(text: &str) -> Result<Trace, ClosureError> {
        let mut lines = Lines::new(text);
        lines.expect(HEADER)?;
        let rules = {
            let line = lines.next()?;
            let w: Vec<&str> = line.split_whitespace().collect();
            match w.as_slice() {
                ["rules", mode @ ("straightedge" | "compass"), "max-moves", n] => match n.parse() {
                    Ok(max_moves) => Rules {
                        compass: *mode == "compass",
                        max_moves,
                    },
                    Err(_) => return lines.err("bad move limit"),
                },
                _ => return lines.err("expected `rules <straightedge|compass> max-moves <n>`"),
            }
        };
        let adversary = match lines.next()?.strip_prefix("adversary ") {
            Some(a) => a.to_string(),
            None => return lines.err("expected `adversary <description>`"),
        };
        let tower = read_tower(&mut lines)?;
        let target = match lines.next()?.strip_prefix("target ") {
            Some("none") => None,
            Some(t) => match GeomObject::parse(t, &tower) {
                Ok(o) => Some(o),
                Err(e) => return lines.err(e.to_string()),
            },
            None => return lines.err("expected `target`"),
        };
        lines.expect("initial")?;
        let initial = Configuration::read_objects(&mut lines, tower.clone())?;
        let (n, _) = lines.counted("events")?;
        let mut events = Vec::with_capacity(n);
        for _ in 0..n {
            events.push(read_event(&mut lines, &tower)?);
        }
        let outcome = match lines.next()?.strip_prefix("outcome ") {
            Some(o) => parse_outcome(o).map_or_else(|| lines.err("bad outcome"), Ok)?,
            None => return lines.err("expected `outcome`"),
        };
        lines.expect("final")?;
        let final_config = Configuration::read_objects(&mut lines, tower)?;
        if !lines.at_end() {
            return lines.err("trailing input");
        }
        Ok(Trace {
            rules,
            adversary,
            target,
            initial,
            events,
            outcome,
            final_config,
        })
    }

    /// Re-executes the recorded requests from the initial configuration with
    /// Bob's recorded answers, re-evaluating every test. The result equals
    /// `self` exactly when the trace is consistent.
    pub fn replay(&self) -> Trace {
        let mut adv = ReplayAdversary::new(self.adversary.clone(), self.answers());
        let mut board = Board::new(&self.initial, &mut adv, self.target.as_ref(), self.rules);
        let events = self.events.clone();
        let ending = match &self.outcome {
            Outcome::Budget => Err(Stop::Budget),
            Outcome::Aborted(why) => Err(Stop::Aborted(why.clone())),
            _ => Ok(()),
        };
        let mut run = |b: &mut Board<'_>| -> Result<(), Stop> {
            for e in &events {
                match e {
                    Event::Move(m) => {
                        b.apply(m.request.clone())?;
                    }
                    Event::Test(t) => {
                        // a failing test was the last event of an aborted game
                        let _ = b.test(t.kind, &t.operands);
                    }
                    Event::Output(id) => b.output(*id)?,
                }
            }
            ending.clone()
        };
        let stop = super::Strategy::run(&mut run, &mut board);
        board.into_trace(&self.initial, stop)
    }

    /// Whether replaying reproduces this trace byte for byte.
    pub fn replays_exactly(&self) -> bool {
        self.replay().to_text() == self.to_text()
    }
}

fn parse_outcome(s: &str) -> Option<Outcome> {
    let (head, rest) = s.split_once(' ').unwrap_or((s, ""));
    match head {
        "won" => rest.parse().ok().map(|moves| Outcome::Won { moves }),
        "lost" => Some(Outcome::Lost),
        "budget" => Some(Outcome::Budget),
        "aborted" => Some(Outcome::Aborted(rest.to_string())),
        _ => None,
    }
}

fn parse_ids(words: &[&str]) -> Option<Vec<ObjId>> {
    words.iter().map(|w| w.parse().ok()).collect()
}

fn read_region(lines: &mut Lines<'_>, text: &str, tower: &Tower) -> Result<Region, ClosureError> {
    let (head, rest) = text.split_once(' ').unwrap_or((text, ""));
    let bad = |lines: &Lines<'_>, e: &dyn std::fmt::Display| {
        lines.err::<Region>(format!("bad region: {e}"))
    };
    match head {
        "disc" => {
            let Some((r, center)) = rest.split_once(' ') else {
                return bad(lines, &"missing center");
            };
            let radius: Rational = match r.parse() {
                Ok(r) => r,
                Err(e) => return bad(lines, &e),
            };
            match GeomObject::parse(center, tower) {
                Ok(GeomObject::Point(center)) => Ok(Region::Disc { center, radius }),
                Ok(_) => bad(lines, &"center is not a point"),
                Err(e) => bad(lines, &e),
            }
        }
        "halfplane" => {
            let (sign, line) = rest.split_once(' ').unwrap_or((rest, ""));
            let positive = match sign {
                "+" => true,
                "-" => false,
                _ => return bad(lines, &"sign must be + or -"),
            };
            match GeomObject::parse(line, tower) {
                Ok(GeomObject::Line(line)) => Ok(Region::HalfPlane { line, positive }),
                Ok(_) => bad(lines, &"not a line"),
                Err(e) => bad(lines, &e),
            }
        }
        "preimage" => {
            // `map [..]` ends at the first closing bracket
            let Some(end) = rest.find(']') else {
                return bad(lines, &"unterminated map");
            };
            let map = match ProjMap::parse(&rest[..=end], tower) {
                Ok(m) => m,
                Err(e) => return bad(lines, &e),
            };
            let inner = read_region(lines, rest[end + 1..].trim(), tower)?;
            Ok(Region::Preimage {
                map,
                inner: Box::new(inner),
            })
        }
        _ => bad(lines, &format!("unknown region {head:?}")),
    }
}

fn read_event(lines: &mut Lines<'_>, tower: &Tower) -> Result<Event, ClosureError> {
    let line = lines.next()?;
    let words: Vec<&str> = line.split_whitespace().collect();
    let bad = |lines: &Lines<'_>| lines.err::<Event>(format!("bad event: {line:?}"));
    match words.first().copied() {
        Some("test") => {
            let Some(eq) = words.iter().position(|w| *w == "=") else {
                return bad(lines);
            };
            let Some(kind) = words.get(1).and_then(|w| TestKind::from_name(w)) else {
                return bad(lines);
            };
            let Some(operands) = parse_ids(&words[2..eq]) else {
                return bad(lines);
            };
            let result = match &words[eq + 1..] {
                ["true"] => Ok(true),
                ["false"] => Ok(false),
                ["error", ..] => Err(line.split_once(" = error ").map_or("", |x| x.1).to_string()),
                _ => return bad(lines),
            };
            Ok(Event::Test(TestRecord {
                kind,
                operands,
                result,
            }))
        }
        Some("output") => match words.get(1).and_then(|w| w.parse().ok()) {
            Some(id) if words.len() == 2 => Ok(Event::Output(id)),
            _ => bad(lines),
        },
        Some(kind) => {
            let Some(arrow) = words.iter().position(|w| *w == "->") else {
                return bad(lines);
            };
            let (Some(args), Some(response)) =
                (parse_ids(&words[1..arrow]), parse_ids(&words[arrow + 1..]))
            else {
                return bad(lines);
            };
            let request = match (kind, args.as_slice()) {
                ("join", &[a, b]) => Request::Join(a, b),
                ("intersect", &[a, b]) => Request::Intersect(a, b),
                ("circle", &[c, a, b]) => Request::Circle(c, a, b),
                ("request", &[n]) => {
                    let mut atoms = Vec::with_capacity(n);
                    for _ in 0..n {
                        let text = lines.next()?;
                        atoms.push(read_region(lines, text, tower)?);
                    }
                    let answer = match lines.next()?.strip_prefix("answer ") {
                        Some(t) => match GeomObject::parse(t, tower) {
                            Ok(GeomObject::Point(p)) => p,
                            _ => return lines.err("answer must be a point"),
                        },
                        None => return lines.err("expected `answer`"),
                    };
                    return Ok(Event::Move(Move {
                        request: Request::Point(OpenSet { atoms }),
                        response,
                        answer: Some(answer),
                    }));
                }
                _ => return bad(lines),
            };
            Ok(Event::Move(Move {
                request,
                response,
                answer: None,
            }))
        }
        None => bad(lines),
    }
}
