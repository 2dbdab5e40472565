//! Independent closed forms used as cross-checks on the general solver:
//! the rank-one frise solution in light-cone coordinates, the rank-two
//! triangle/parallelogram matrix products, and the original path model on
//! the basic staircase with its 2r+2-dimensional transfer matrix.

use crate::boundary::Boundary;
use crate::laurent::{LaurentPoly, VarId};
use crate::matrix::PolyMatrix;
use crate::solver::{BoundarySolver, Point, SolveError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("word must start with v, end with h, and carry one more value than letters")]
    MalformedWord,
    #[error("boundary rank {0} does not match this oracle")]
    RankMismatch(i32),
    #[error("this oracle is defined on the basic staircase only")]
    NotStaircase,
    #[error("{0}")]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    V,
    H,
}

/// A projection word v...h along a rank-one boundary, with the boundary
/// values attached to its vertices.
#[derive(Debug, Clone)]
pub struct StaircaseWord {
    word: Vec<Letter>,
    values: Vec<LaurentPoly>,
}

/// 2x2 horizontal step matrix (1/b) [[b,0],[1,a]].
pub fn frise_h(a: &LaurentPoly, b: &LaurentPoly) -> PolyMatrix {
    let binv = b.pow(-1).unwrap();
    let mut m = PolyMatrix::zero(2);
    m.set(0, 0, LaurentPoly::one());
    m.set(1, 0, binv.clone());
    m.set(1, 1, a.mul(&binv));
    m
}

/// 2x2 vertical step matrix (1/b) [[a,1],[0,b]].
pub fn frise_v(a: &LaurentPoly, b: &LaurentPoly) -> PolyMatrix {
    let binv = b.pow(-1).unwrap();
    let mut m = PolyMatrix::zero(2);
    m.set(0, 0, a.mul(&binv));
    m.set(0, 1, binv);
    m.set(1, 1, LaurentPoly::one());
    m
}

impl StaircaseWord {
    pub fn new(word: Vec<Letter>, values: Vec<LaurentPoly>) -> Result<Self, OracleError> {
        if word.first() != Some(&Letter::V)
            || word.last() != Some(&Letter::H)
            || values.len() != word.len() + 1
        {
            return Err(OracleError::MalformedWord);
        }
        Ok(StaircaseWord { word, values })
    }

    /// The projection word of a first-layer point on a rank-one boundary.
    pub fn from_boundary(b: &Boundary, p: Point) -> Result<Self, OracleError> {
        if b.rank() != 1 {
            return Err(OracleError::RankMismatch(b.rank()));
        }
        let proj = BoundarySolver::new(b).project(p)?;
        let mut word = Vec::new();
        let mut values = vec![b.label(1, proj.j0)];
        for j in proj.j0..proj.j1 {
            word.push(if b.height(1, j + 1) < b.height(1, j) { Letter::V } else { Letter::H });
            values.push(b.label(1, j + 1));
        }
        StaircaseWord::new(word, values)
    }
}

/// Rank-one solution via the projection word. Mutated labels are cleared
/// the same way the solver does it: compute on the shadow boundary, then
/// substitute the actual labels with one exact division.
pub fn frise_on_boundary(b: &Boundary, p: Point) -> Result<LaurentPoly, OracleError> {
    let shadow = b.shadow();
    let w = StaircaseWord::from_boundary(&shadow, p)?;
    let raw = frise_solve(&w);
    let subst = b.label_substitution();
    if subst.is_empty() {
        Ok(raw)
    } else {
        raw.substitute(&subst)
            .map_err(|e| OracleError::Solve(SolveError::Internal(e.to_string())))
    }
}

/// u = a_{t'} * (V(a_t,a_{t+1}) ... H(a_{t'-1},a_{t'}))_{1,1}.
pub fn frise_solve(w: &StaircaseWord) -> LaurentPoly {
    let mut m = PolyMatrix::identity(2);
    for (i, letter) in w.word.iter().enumerate() {
        let step = match letter {
            Letter::V => frise_v(&w.values[i], &w.values[i + 1]),
            Letter::H => frise_h(&w.values[i], &w.values[i + 1]),
        };
        m = m.mul(&step);
    }
    w.values.last().unwrap().mul(m.get(0, 0))
}

/// Triangle matrices of the rank-two boundary decomposition.
pub fn a2_triangle_a1(a: &LaurentPoly, b: &LaurentPoly, u: &LaurentPoly) -> PolyMatrix {
    let binv = b.pow(-1).unwrap();
    let mut m = PolyMatrix::identity(3);
    m.set(1, 0, u.mul(&binv));
    m.set(1, 1, a.mul(&binv));
    m
}

pub fn a2_triangle_a2(b: &LaurentPoly, u: &LaurentPoly, v: &LaurentPoly) -> PolyMatrix {
    let vinv = v.pow(-1).unwrap();
    let mut m = PolyMatrix::identity(3);
    m.set(1, 1, u.mul(&vinv));
    m.set(1, 2, b.mul(&vinv));
    m
}

pub fn a2_triangle_b1(a: &LaurentPoly, b: &LaurentPoly) -> PolyMatrix {
    let binv = b.pow(-1).unwrap();
    let mut m = PolyMatrix::identity(3);
    m.set(0, 0, a.mul(&binv));
    m.set(0, 1, binv);
    m
}

pub fn a2_triangle_b2(u: &LaurentPoly, v: &LaurentPoly) -> PolyMatrix {
    let vinv = v.pow(-1).unwrap();
    let mut m = PolyMatrix::identity(3);
    m.set(2, 1, vinv.clone());
    m.set(2, 2, u.mul(&vinv));
    m
}

/// Matrix of one boundary square, from the triangle products. Arguments:
/// a, b are the first-layer labels at the left/right column, u, v the
/// second-layer ones.
pub fn a2_matrices(
    kind: crate::boundary::SquareType,
    a: &LaurentPoly,
    b: &LaurentPoly,
    u: &LaurentPoly,
    v: &LaurentPoly,
) -> PolyMatrix {
    use crate::boundary::SquareType::*;
    match kind {
        A => a2_triangle_a1(a, b, u).mul(&a2_triangle_a2(b, u, v)),
        B => a2_triangle_b1(a, b).mul(&a2_triangle_b2(u, v)),
        C => a2_triangle_a1(a, b, u).mul(&a2_triangle_b2(u, v)),
        D => a2_triangle_a2(a, u, v).mul(&a2_triangle_b1(a, b)),
        E => a2_triangle_b2(u, v).mul(&a2_triangle_a1(a, b, v)),
        F => a2_triangle_b1(a, b).mul(&a2_triangle_a2(b, u, v)),
    }
}

/// Rank-two solution as a product of square matrices along the projection;
/// the second layer goes through the layer reflection.
pub fn a2_solve(b: &Boundary, p: Point) -> Result<LaurentPoly, OracleError> {
    if b.rank() != 2 {
        return Err(OracleError::RankMismatch(b.rank()));
    }
    if p.alpha == 2 {
        let flipped = b.layer_flipped(p.k + 2);
        return a2_solve(&flipped, Point::new(1, p.j + b.flip_column_shift(), p.k));
    }
    if p.k == b.height(1, p.j) {
        return Ok(b.label(1, p.j));
    }
    let sh = b.shadow();
    let proj = BoundarySolver::new(&sh).project(p)?;
    let mut m = PolyMatrix::identity(3);
    for j in proj.j0..proj.j1 {
        let square = a2_matrices(
            sh.classify_square(1, j),
            &sh.label(1, j),
            &sh.label(1, j + 1),
            &sh.label(2, j),
            &sh.label(2, j + 1),
        );
        m = m.mul(&square);
    }
    let raw = sh.label(1, proj.j1).mul(m.get(0, 0));
    let subst = b.label_substitution();
    if subst.is_empty() {
        Ok(raw)
    } else {
        raw.substitute(&subst)
            .map_err(|e| OracleError::Solve(SolveError::Internal(e.to_string())))
    }
}

fn staircase_height(alpha: i32, j: i64) -> i64 {
    (alpha as i64 + j).rem_euclid(2)
}

/// T value of the basic staircase at explicit height eps in {0,1}. The
/// off-parity combination (alpha + t + eps odd) is not a lattice point of
/// the system; it is represented by an auxiliary c-atom that must cancel
/// out of any final weight product.
fn tval(b: &Boundary, alpha: i32, t: i64, eps: i64) -> LaurentPoly {
    if alpha == 0 || alpha == b.rank() + 1 {
        return LaurentPoly::one();
    }
    if eps == staircase_height(alpha, t) {
        b.label(alpha, t)
    } else {
        LaurentPoly::var(VarId::indexed("c", alpha as i64, t))
    }
}

/// The 2r+2 x 2r+2 transfer matrix of the original staircase path model;
/// ascending edges carry weight 1, descending ones the y weights at time t.
fn fundamental_matrix(b: &Boundary, t: i64) -> PolyMatrix {
    let r = b.rank();
    let n = (2 * r + 2) as usize;
    let tv = |alpha: i32, t: i64, eps: i64| tval(b, alpha, t, eps);
    let ratio = |num: &[LaurentPoly], den: &[LaurentPoly]| {
        let mut p = LaurentPoly::one();
        for f in num {
            p = p.mul(f);
        }
        for f in den {
            p = p.mul(&f.pow(-1).unwrap());
        }
        p
    };
    let y2 = |alpha: i32| {
        ratio(
            &[tv(alpha + 1, t, 1), tv(alpha - 1, t + 1, 0)],
            &[tv(alpha, t, 0), tv(alpha, t + 1, 1)],
        )
    };
    let y2p1 = |alpha: i32| {
        ratio(
            &[tv(alpha + 1, t - 1, 1), tv(alpha, t + 1, 0)],
            &[tv(alpha + 1, t, 0), tv(alpha, t, 1)],
        )
    };
    let mut m = PolyMatrix::zero(n);
    m.set(0, 1, LaurentPoly::one());
    m.set(1, 2, LaurentPoly::one());
    for alpha in 1..r {
        let i = 2 * alpha as usize;
        m.set(i, i + 1, LaurentPoly::one());
        m.set(i, i + 2, LaurentPoly::one());
    }
    m.set(2 * r as usize, 2 * r as usize + 1, LaurentPoly::one());
    m.set(1, 0, ratio(&[tv(1, t, 1)], &[tv(1, t + 1, 0)]));
    m.set(2, 1, y2(1));
    for alpha in 1..r {
        let i = 2 * alpha as usize;
        m.set(i + 1, i, y2p1(alpha));
        m.set(i + 2, i, y2(alpha + 1));
    }
    m.set(2 * r as usize + 1, 2 * r as usize, y2p1(r));
    m
}

/// T_{1,j,k} = T_{1,j+k,0} * (prod_{t=j-k}^{j+k-1} script-T(t))_{1,1} on
/// the basic staircase.
pub fn fundamental_transfer(b: &Boundary, p: Point) -> Result<LaurentPoly, OracleError> {
    let r = b.rank();
    if p.alpha != 1 {
        return Err(OracleError::Solve(SolveError::LayerOutOfRange(p.alpha)));
    }
    for alpha in 1..=r {
        for t in p.j - p.k - 1..=p.j + p.k + 1 {
            if b.height(alpha, t) != staircase_height(alpha, t) {
                return Err(OracleError::NotStaircase);
            }
        }
    }
    if p.k == 0 {
        return Ok(b.label(1, p.j));
    }
    let mut acc = PolyMatrix::identity((2 * r + 2) as usize);
    for t in p.j - p.k..p.j + p.k {
        acc = acc.mul(&fundamental_matrix(b, t));
    }
    let result = b.label(1, p.j + p.k).mul(acc.get(0, 0));
    // The off-parity auxiliary atoms must have cancelled.
    assert!(
        result.vars().iter().all(|v| !matches!(v, VarId::Named { name, .. } if name == "c")),
        "auxiliary atoms survived in the fundamental transfer product"
    );
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{MutationDirection, SquareType};
    use std::collections::BTreeMap;

    fn atom(alpha: i32, j: i64) -> LaurentPoly {
        LaurentPoly::atom(alpha, j)
    }

    fn named(n: &str) -> LaurentPoly {
        LaurentPoly::var(VarId::named(n))
    }

    #[test]
    fn frise_two_step() {
        let (a, b, c) = (named("a"), named("b"), named("c"));
        let w = StaircaseWord::new(
            vec![Letter::V, Letter::H],
            vec![a.clone(), b.clone(), c.clone()],
        )
        .unwrap();
        // c * (V(a,b)H(b,c))_{1,1} = (a c + 1)/b.
        let want = a.mul(&c).add(&LaurentPoly::one()).exact_div(&b).unwrap();
        assert_eq!(frise_solve(&w), want);
        // All-ones (vh)^2 -> 5.
        let ones = StaircaseWord::new(
            vec![Letter::V, Letter::H, Letter::V, Letter::H],
            vec![LaurentPoly::one(); 5],
        )
        .unwrap();
        assert_eq!(frise_solve(&ones), LaurentPoly::int(5));
        assert!(StaircaseWord::new(vec![Letter::H], vec![LaurentPoly::one(); 2]).is_err());
    }

    /// Checks lhs = rhs after substituting the fresh variable x by q, where
    /// rhs is Laurent in x. Multiplying by x^shift clears the negative
    /// x-exponents so the substitution stays polynomial.
    fn check_mutation_identity(lhs: &PolyMatrix, rhs: &PolyMatrix, q: &LaurentPoly, shift: i64) {
        let x = VarId::named("x");
        let xs = LaurentPoly::var(x.clone()).pow(shift).unwrap();
        let mut subst = BTreeMap::new();
        subst.insert(x, q.clone());
        for i in 0..lhs.size() {
            for j in 0..lhs.size() {
                let cleared = rhs.get(i, j).mul(&xs).substitute(&subst).unwrap();
                assert_eq!(cleared, lhs.get(i, j).mul(&q.pow(shift).unwrap()), "({},{})", i, j);
            }
        }
    }

    #[test]
    fn frise_mutation_identity() {
        // V(a,b)H(b,c) = H(a,x)V(x,c) with x = (1 + a c)/b.
        let (a, b, c, x) = (named("a"), named("b"), named("c"), named("x"));
        let lhs = frise_v(&a, &b).mul(&frise_h(&b, &c));
        let rhs = frise_h(&a, &x).mul(&frise_v(&x, &c));
        let q = LaurentPoly::one().add(&a.mul(&c)).exact_div(&b).unwrap();
        check_mutation_identity(&lhs, &rhs, &q, 1);
    }

    #[test]
    fn frise_equals_general_solver() {
        let b = Boundary::basic_staircase(1, -2, 8);
        let (b, _) = b.mutate(1, 3, MutationDirection::Forward).unwrap();
        let (b, _) = b.mutate(1, 0, MutationDirection::Backward).unwrap();
        let s = BoundarySolver::new(&b);
        // Both parities of j + k.
        for (j, k) in [(3, 4), (4, 3), (2, 3), (3, 6), (1, 2)] {
            let p = Point::new(1, j, k);
            assert_eq!(frise_on_boundary(&b, p).unwrap(), s.solve_t1(p).unwrap(), "point {:?}", p);
        }
    }

    #[test]
    fn tetrahedron_decompositions_agree() {
        let (a, b, u, v) = (named("a"), named("b"), named("u"), named("v"));
        // A = A1(a,b,u) A2(b,u,v) = A2(a,u,v) A1(a,b,v); same shape for B.
        assert_eq!(
            a2_triangle_a1(&a, &b, &u).mul(&a2_triangle_a2(&b, &u, &v)),
            a2_triangle_a2(&a, &u, &v).mul(&a2_triangle_a1(&a, &b, &v))
        );
        assert_eq!(
            a2_triangle_b1(&a, &b).mul(&a2_triangle_b2(&u, &v)),
            a2_triangle_b2(&u, &v).mul(&a2_triangle_b1(&a, &b))
        );
    }

    #[test]
    fn parallelogram_products() {
        let (a, b, u, v) = (named("a"), named("b"), named("u"), named("v"));
        let inv = |p: &LaurentPoly| p.pow(-1).unwrap();
        let c = a2_matrices(SquareType::C, &a, &b, &u, &v);
        assert_eq!(*c.get(1, 0), u.mul(&inv(&b)));
        assert_eq!(*c.get(1, 1), a.mul(&inv(&b)));
        assert_eq!(*c.get(2, 1), inv(&v));
        assert_eq!(*c.get(2, 2), u.mul(&inv(&v)));
        let d = a2_matrices(SquareType::D, &a, &b, &u, &v);
        assert_eq!(*d.get(0, 0), a.mul(&inv(&b)));
        assert_eq!(*d.get(1, 1), u.mul(&inv(&v)));
        assert_eq!(*d.get(1, 2), a.mul(&inv(&v)));
        let e = a2_matrices(SquareType::E, &a, &b, &u, &v);
        assert_eq!(*e.get(1, 0), v.mul(&inv(&b)));
        assert_eq!(*e.get(2, 0), inv(&b));
        assert_eq!(*e.get(2, 1), a.mul(&inv(&v.mul(&b))));
        assert_eq!(*e.get(2, 2), u.mul(&inv(&v)));
        let f = a2_matrices(SquareType::F, &a, &b, &u, &v);
        assert_eq!(*f.get(0, 1), u.mul(&inv(&b.mul(&v))));
        assert_eq!(*f.get(0, 2), inv(&v));
        assert_eq!(*f.get(1, 2), b.mul(&inv(&v)));
    }

    #[test]
    fn boundary_mutation_identities() {
        let (a, b, c, u, v, w, x) =
            (named("a"), named("b"), named("c"), named("u"), named("v"), named("w"), named("x"));
        // B1(a,b) A1(b,c,u) = A1(a,x,u) B1(x,c), x = (a c + u)/b.
        let lhs = a2_triangle_b1(&a, &b).mul(&a2_triangle_a1(&b, &c, &u));
        let rhs = a2_triangle_a1(&a, &x, &u).mul(&a2_triangle_b1(&x, &c));
        let q = a.mul(&c).add(&u).exact_div(&b).unwrap();
        check_mutation_identity(&lhs, &rhs, &q, 1);
        // A2(b,u,v) B2(v,w) = B2(u,x) A2(b,x,w), x = (u w + b)/v.
        let lhs = a2_triangle_a2(&b, &u, &v).mul(&a2_triangle_b2(&v, &w));
        let rhs = a2_triangle_b2(&u, &x).mul(&a2_triangle_a2(&b, &x, &w));
        let q = u.mul(&w).add(&b).exact_div(&v).unwrap();
        check_mutation_identity(&lhs, &rhs, &q, 1);
    }

    #[test]
    fn a2_solve_matches_general_machinery() {
        let b = Boundary::basic_staircase(2, -2, 8);
        let s = BoundarySolver::new(&b);
        for (alpha, j, k) in [(1, 3, 2), (1, 4, 3), (1, 2, 5), (2, 3, 3), (2, 4, 2)] {
            let p = Point::new(alpha, j, k);
            assert_eq!(a2_solve(&b, p).unwrap(), s.solve_t(p).unwrap(), "point {:?}", p);
        }
        let (m, _) = b.mutate(1, 3, MutationDirection::Forward).unwrap();
        let (m, _) = m.mutate(2, 4, MutationDirection::Forward).unwrap();
        let s = BoundarySolver::new(&m);
        for (alpha, j, k) in [(1, 3, 4), (1, 4, 3), (2, 4, 4), (2, 3, 3), (1, 2, 3)] {
            let p = Point::new(alpha, j, k);
            assert_eq!(a2_solve(&m, p).unwrap(), s.solve_t(p).unwrap(), "point {:?}", p);
        }
        assert!(matches!(
            a2_solve(&Boundary::basic_staircase(3, 0, 3), Point::new(1, 1, 2)),
            Err(OracleError::RankMismatch(3))
        ));
    }

    #[test]
    fn fundamental_transfer_rank_one_step() {
        let b = Boundary::basic_staircase(1, -4, 8);
        // One step: T_{1,j,1} with j even = (a_{j-1} a_{j+1} + 1)/a_j at
        // height... j even has height 1, so k=1 is on the boundary; take
        // the first strictly-above point instead.
        let p = Point::new(1, 3, 2);
        let want = atom(1, 2)
            .mul(&atom(1, 4))
            .add(&LaurentPoly::one())
            .exact_div(&atom(1, 3))
            .unwrap();
        assert_eq!(fundamental_transfer(&b, p).unwrap(), want);
    }

    #[test]
    fn fundamental_transfer_matches_solver() {
        for r in 1..=4 {
            let b = Boundary::basic_staircase(r, -8, 12);
            let s = BoundarySolver::new(&b);
            for j in [2i64, 3] {
                for k in 1..=4i64 {
                    if (1 + j + k) % 2 != 0 || k < b.height(1, j) {
                        continue;
                    }
                    let p = Point::new(1, j, k);
                    assert_eq!(
                        fundamental_transfer(&b, p).unwrap(),
                        s.solve_t1(p).unwrap(),
                        "r {}, point {:?}",
                        r,
                        p
                    );
                }
            }
        }
        let (m, _) = Boundary::basic_staircase(2, 0, 6)
            .mutate(1, 3, MutationDirection::Forward)
            .unwrap();
        assert!(matches!(
            fundamental_transfer(&m, Point::new(1, 3, 4)),
            Err(OracleError::NotStaircase)
        ));
    }
}
