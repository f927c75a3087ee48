use crate::numbers::{Constructible, Sign, Tower};

use super::{Conic, Coords, GeomError, GeomObject, HLine, HPoint};

type Matrix = [[Constructible; 3]; 3];

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (0..3).fold(Constructible::zero(), |acc, k| {
                &acc + &(&a[i][k] * &b[k][j])
            })
        })
    })
}

fn mat_vec(a: &Matrix, v: &Coords) -> Coords {
    std::array::from_fn(|i| (0..3).fold(Constructible::zero(), |acc, k| &acc + &(&a[i][k] * &v[k])))
}

fn transpose(a: &Matrix) -> Matrix {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

fn adjugate(a: &Matrix) -> Matrix {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
        &(&a[r0][c0] * &a[r1][c1]) - &(&a[r0][c1] * &a[r1][c0])
    };
    // adj(A)[i][j] = cofactor(j, i)
    [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ]
}

/// Invertible projective transformation of the plane, acting on points by
/// matrix multiplication.
#[derive(Clone)]
pub struct ProjMap {
    m: Matrix,
}

impl ProjMap {
    pub fn new(m: Matrix) -> Result<Self, GeomError> {
        let map = ProjMap { m };
        if map.determinant().sign() == Sign::Zero {
            return Err(GeomError::SingularMap);
        }
        Ok(map)
    }

    pub fn identity() -> Self {
        ProjMap {
            m: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    if i == j {
                        Constructible::one()
                    } else {
                        Constructible::zero()
                    }
                })
            }),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn determinant(&self) -> Constructible {
        let a = &self.m;
        let adj = adjugate(a);
        (0..3).fold(Constructible::zero(), |acc, k| {
            &acc + &(&a[0][k] * &adj[k][0])
        })
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &ProjMap) -> ProjMap {
        ProjMap {
            m: mat_mul(&self.m, &other.m),
        }
    }

    /// Inverse up to scale (the adjugate).
    pub fn inverse(&self) -> ProjMap {
        ProjMap {
            m: adjugate(&self.m),
        }
    }

    pub fn map_point(&self, p: &HPoint) -> HPoint {
        HPoint::new_from(mat_vec(&self.m, p.coords())).expect("invertible map keeps points nonzero")
    }

    /// Lines transform by the inverse transpose.
    pub fn map_line(&self, l: &HLine) -> HLine {
        let adj_t = transpose(&adjugate(&self.m));
        HLine::new_from(mat_vec(&adj_t, l.coords())).expect("invertible map keeps lines nonzero")
    }

    /// Conics transform as `T⁻ᵀ M T⁻¹`.
    pub fn map_conic(&self, c: &Conic) -> Conic {
        let adj = adjugate(&self.m);
        let m = mat_mul(&transpose(&adj), &mat_mul(&c.matrix(), &adj));
        Conic::from_matrix(&m).expect("invertible map keeps conics nonzero")
    }

    pub fn apply(&self, obj: &GeomObject) -> GeomObject {
        match obj {
            GeomObject::Point(p) => GeomObject::Point(self.map_point(p)),
            GeomObject::Line(l) => GeomObject::Line(self.map_line(l)),
            GeomObject::Conic(c) => GeomObject::Conic(self.map_conic(c)),
        }
    }

    /// Projective equality of maps (proportional matrices).
    pub fn projectively_eq(&self, other: &ProjMap) -> bool {
        let flat =
            |m: &Matrix| -> [Constructible; 9] { std::array::from_fn(|k| m[k / 3][k % 3].clone()) };
        let (a, b) = (flat(&self.m), flat(&other.m));
        (0..9)
            .all(|i| (i + 1..9).all(|j| (&(&a[i] * &b[j]) - &(&a[j] * &b[i])).sign() == Sign::Zero))
    }
}

impl PartialEq for ProjMap {
    fn eq(&self, other: &Self) -> bool {
        self.projectively_eq(other)
    }
}

impl std::fmt::Debug for ProjMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

/// `R(t)·H(u)`: `H(u)` moves the center of the unit circle to `(u, 0)` while
/// fixing the circle, `R(t)` is the rotation with `cos = (1−t²)/(1+t²)`,
/// `sin = 2t/(1+t²)`.
pub fn circle_preserving_map(
    tower: &Tower,
    u: &Constructible,
    t: &Constructible,
) -> Result<ProjMap, GeomError> {
    let one = Constructible::one;
    let zero = Constructible::zero;
    let gap = &one() - &u.square();
    if gap.sign() != Sign::Positive {
        return Err(GeomError::ParameterOutOfRange(format!(
            "|u| must be < 1, got {u}"
        )));
    }
    let w = tower.sqrt(&gap)?;
    let h = [
        [one(), zero(), u.clone()],
        [zero(), w, zero()],
        [u.clone(), zero(), one()],
    ];
    let t2 = t.square();
    let den = (&one() + &t2).recip()?;
    let cos = &(&one() - &t2) * &den;
    let sin = &(&Constructible::integer(2) * t) * &den;
    let r = [
        [cos.clone(), -&sin, zero()],
        [sin, cos, zero()],
        [zero(), zero(), one()],
    ];
    ProjMap::new(mat_mul(&r, &h))
}
