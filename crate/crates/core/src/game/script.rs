use std::collections::HashMap;

use crate::closure::ObjId;
use crate::geometry::{GeomObject, HPoint};
use crate::lang::{Expr, Ident, OpenSetExpr, PointLit, Script, SetAtom, Stmt, Test};

use super::{Board, OpenSet, Region, Request, Stop, Strategy, TestKind};

/// Runs a parsed script as Alice. Givens bind to the first objects of the
/// initial configuration, in order.
pub struct ScriptStrategy<'s> {
    script: &'s Script,
    scopes: Vec<HashMap<String, Option<ObjId>>>,
}

impl<'s> ScriptStrategy<'s> {
    pub fn new(script: &'s Script) -> Self {
        ScriptStrategy {
            script,
            scopes: Vec::new(),
        }
    }

    fn lookup(&self, id: &Ident) -> Result<ObjId, Stop> {
        match self.scopes.iter().rev().find_map(|s| s.get(&id.name)) {
            Some(Some(obj)) => Ok(*obj),
            Some(None) => Err(Stop::Aborted(format!(
                "{}: '{}' has no value (empty intersection)",
                id.span, id.name
            ))),
            None => Err(Stop::Aborted(format!(
                "{}: undefined '{}'",
                id.span, id.name
            ))),
        }
    }

    fn bind(&mut self, id: &Ident, value: Option<ObjId>) {
        self.scopes
            .last_mut()
            .expect("scope")
            .insert(id.name.clone(), value);
    }

    fn expr(&self, board: &mut Board<'_>, e: &Expr) -> Result<Vec<ObjId>, Stop> {
        let ids: Vec<ObjId> = e
            .operands()
            .iter()
            .map(|i| self.lookup(i))
            .collect::<Result<_, _>>()?;
        match e {
            Expr::Join(..) => board.apply(Request::Join(ids[0], ids[1])),
            Expr::Meet(..) | Expr::Intersect { .. } => {
                let all = board.apply(Request::Intersect(ids[0], ids[1]))?;
                Ok(match e {
                    Expr::Intersect { index: Some(i), .. } => {
                        all.get(*i as usize).copied().into_iter().collect()
                    }
                    _ => all,
                })
            }
            Expr::Circle(..) => board.apply(Request::Circle(ids[0], ids[1], ids[2])),
        }
    }

    fn test(&self, board: &mut Board<'_>, t: &Test) -> Result<bool, Stop> {
        let kind = TestKind::from_name(t.name()).expect("test names agree");
        let ids: Vec<ObjId> = t
            .operands()
            .iter()
            .map(|i| self.lookup(i))
            .collect::<Result<_, _>>()?;
        board.test(kind, &ids)
    }

    fn open_set(&self, board: &Board<'_>, set: &OpenSetExpr) -> Result<OpenSet, Stop> {
        let mut atoms = Vec::new();
        for a in &set.atoms {
            atoms.push(match a {
                SetAtom::Disc { center, radius } => {
                    let center = match center {
                        PointLit::Coords(x, y) => {
                            let tower = board.config().tower();
                            let eval = |e: &crate::numbers::NumExpr| {
                                e.eval(tower)
                                    .map_err(|err| Stop::Aborted(format!("bad coordinate: {err}")))
                            };
                            HPoint::affine(eval(x)?, eval(y)?)
                        }
                        PointLit::Name(id) => match board.object(self.lookup(id)?) {
                            Some(GeomObject::Point(p)) => p.clone(),
                            _ => {
                                return Err(Stop::Aborted(format!(
                                    "{}: '{}' is not a point",
                                    id.span, id.name
                                )))
                            }
                        },
                    };
                    Region::Disc {
                        center,
                        radius: radius.clone(),
                    }
                }
                SetAtom::HalfPlane { line, positive } => match board.object(self.lookup(line)?) {
                    Some(GeomObject::Line(l)) => Region::HalfPlane {
                        line: l.clone(),
                        positive: *positive,
                    },
                    _ => {
                        return Err(Stop::Aborted(format!(
                            "{}: '{}' is not a line",
                            line.span, line.name
                        )))
                    }
                },
            });
        }
        Ok(OpenSet { atoms })
    }

    fn block(&mut self, board: &mut Board<'_>, stmts: &[Stmt]) -> Result<(), Stop> {
        self.scopes.push(HashMap::new());
        let r = self.stmts(board, stmts);
        self.scopes.pop();
        r
    }

    fn stmts(&mut self, board: &mut Board<'_>, stmts: &[Stmt]) -> Result<(), Stop> {
        for s in stmts {
            match s {
                Stmt::Let { names, expr, .. } => {
                    let results = self.expr(board, expr)?;
                    for (i, n) in names.iter().enumerate() {
                        self.bind(n, results.get(i).copied());
                    }
                }
                Stmt::Request { name, set, .. } => {
                    let set = self.open_set(board, set)?;
                    let id = board.request(set)?;
                    self.bind(name, Some(id));
                }
                Stmt::If {
                    test,
                    then_block,
                    else_block,
                    ..
                } => {
                    if self.test(board, test)? {
                        self.block(board, then_block)?;
                    } else if let Some(b) = else_block {
                        self.block(board, b)?;
                    }
                }
                Stmt::Repeat { count, body, .. } => {
                    for _ in 0..*count {
                        self.block(board, body)?;
                    }
                }
                Stmt::Output { name, .. } => {
                    let id = self.lookup(name)?;
                    board.output(id)?;
                }
                Stmt::Assert { test, span } => {
                    if !self.test(board, test)? {
                        return Err(Stop::Aborted(format!("{span}: assertion failed")));
                    }
                }
            }
        }
        Ok(())
    }
}

impl Strategy for ScriptStrategy<'_> {
    fn run(&mut self, board: &mut Board<'_>) -> Result<(), Stop> {
        let n = self.script.givens.len();
        if board.config().len() < n {
            return Err(Stop::Aborted(format!(
                "script declares {n} givens but the configuration has {} objects",
                board.config().len()
            )));
        }
        self.scopes = vec![HashMap::new()];
        for (i, g) in self.script.givens.iter().enumerate() {
            self.bind(g, Some(i));
        }
        let body = &self.script.body;
        let r = self.stmts(board, body);
        self.scopes.clear();
        r
    }
}
