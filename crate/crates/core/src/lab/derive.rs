use std::sync::Arc;

use crate::closure::{
    closure_step, Budget, ClosureError, Configuration, ObjId, Op, OpSet, Provenance,
};
use crate::geometry::{on_line, GeomError, HPoint};
use crate::numbers::Tower;

#[derive(Clone, Debug)]
pub struct Derivation {
    pub id: ObjId,
    /// Number of closure rounds before the target appeared.
    pub depth: usize,
    /// Objects the target is built from, in construction order.
    pub chain: Vec<ObjId>,
    pub config: Configuration,
}

impl Derivation {
    /// One line per object of the chain: `id = op(parents): object`.
    pub fn chain_text(&self) -> String {
        let mut out = String::new();
        for &i in &self.chain {
            let e = &self.config.entries()[i];
            let parents: Vec<String> = e.provenance.parents.iter().map(|p| p.to_string()).collect();
            out.push_str(&format!(
                "{i} = {}({}): {}\n",
                e.provenance.op.name(),
                parents.join(", "),
                e.object
            ));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub enum Derivability {
    Found(Derivation),
    /// `fixed_point` means the closure stopped growing, so the target is
    /// not derivable at all; otherwise the search ran out of budget.
    NotFound {
        fixed_point: bool,
        depth: usize,
        objects: usize,
    },
}

/// Breadth-first join/meet closure of four rational points in the affine
/// plane until `target` appears. The last round is not materialized: the
/// target is found one round early once two lines pass through it.
pub fn rational_plane_derivability(
    seeds: &[HPoint; 4],
    target: &HPoint,
    max_depth: usize,
    budget: &Budget,
) -> Result<Derivability, ClosureError> {
    let rational = |p: &HPoint| {
        p.to_affine()
            .is_some_and(|(x, y)| x.as_rational().is_some() && y.as_rational().is_some())
    };
    if !seeds.iter().chain([target]).all(rational) {
        return Err(GeomError::ParameterOutOfRange(
            "points must be finite with rational coordinates".into(),
        )
        .into());
    }
    let ops = OpSet {
        projective: false,
        ..OpSet::joins_and_meets()
    };
    let mut cfg = Configuration::from_objects(
        Arc::new(Tower::new()),
        seeds.iter().map(|p| p.clone().into()),
    );
    let goal = target.clone().into();
    for depth in 0..=max_depth {
        if let Some(id) = cfg.find(&goal) {
            return Ok(Derivability::Found(Derivation {
                id,
                depth,
                chain: cfg.derivation_chain(id),
                config: cfg,
            }));
        }
        if depth == max_depth {
            break;
        }
        // two lines through the target put it in the next round
        let through: Vec<ObjId> = cfg
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.object.as_line().is_some_and(|l| on_line(target, l)))
            .map(|(i, _)| i)
            .take(2)
            .collect();
        if let [a, b] = through[..] {
            let obj = cfg.derive(Op::Meet, &[a, b])?.remove(0);
            debug_assert_eq!(obj, goal);
            let prov = Provenance {
                op: Op::Meet,
                parents: vec![a, b],
                branch: 0,
                step: depth + 1,
            };
            let id = cfg.insert(obj, prov).0;
            return Ok(Derivability::Found(Derivation {
                id,
                depth: depth + 1,
                chain: cfg.derivation_chain(id),
                config: cfg,
            }));
        }
        let step = match closure_step(&cfg, &ops, budget) {
            Ok(s) => s,
            Err(ClosureError::BudgetExceeded { .. }) => {
                return Ok(Derivability::NotFound {
                    fixed_point: false,
                    depth,
                    objects: cfg.len(),
                })
            }
            Err(e) => return Err(e),
        };
        cfg = step.config;
        if step.fixed_point {
            return Ok(Derivability::NotFound {
                fixed_point: true,
                depth: depth + 1,
                objects: cfg.len(),
            });
        }
    }
    Ok(Derivability::NotFound {
        fixed_point: false,
        depth: max_depth,
        objects: cfg.len(),
    })
}
