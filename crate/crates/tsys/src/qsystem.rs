//! Q-system restriction: solutions of the octahedron recurrence that are
//! 2-periodic in j collapse to R_{alpha,k} = T_{alpha, (alpha+k) mod 2, k}
//! satisfying R_{a,k+1} R_{a,k-1} = R_{a,k}^2 + R_{a+1,k} R_{a-1,k} with
//! R_0 = R_{r+1} = 1. Initial data lives on a Motzkin path m: the atoms
//! R[alpha, m_alpha] and R[alpha, m_alpha + 1].

use crate::boundary::{Boundary, MotzkinPath};
use crate::laurent::{LaurentPoly, VarId};
use crate::matrix::PolyMatrix;
use crate::slicenet::slice_matrix;
use crate::solver::{BoundarySolver, Point, SolveError, VerifyReport};
use crate::SliceMatrix;
use std::cell::RefCell;
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QError {
    #[error("R_{{{alpha},{n}}} lies below the initial band")]
    OutOfDomain { alpha: i32, n: i64 },
    #[error("layer {0} is outside 1..=r")]
    LayerOutOfRange(i32),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// A Q-system boundary: the two-column cylinder of the Motzkin path, plus
/// the pair of alternating slice matrices U (slice [1,2]) and Utilde
/// (slice [0,1]) that generate all first-layer values.
pub struct QSystemInstance {
    rank: i32,
    motzkin: MotzkinPath,
    shift: i64,
    cylinder: Boundary,
    u: SliceMatrix,
    utilde: SliceMatrix,
}

pub fn build(m: &MotzkinPath) -> Result<QSystemInstance, QError> {
    let cylinder = Boundary::motzkin_to_boundary(m);
    let internal = |e: &dyn std::fmt::Display| QError::Internal(e.to_string());
    // U is the slice whose bottom factor is H_{1,2} (so that (U)_{1,x} is
    // the delta row the first-layer derivation rests on); that is the slice
    // [1,2] for even m_1 and [0,1] for odd m_1.
    let m1 = m.entries()[0];
    let u_col = (m1 + 1).rem_euclid(2);
    let u = slice_matrix(&cylinder, u_col).map_err(|e| internal(&e))?;
    let utilde = slice_matrix(&cylinder, 1 - u_col).map_err(|e| internal(&e))?;
    // The second slice's rhombus decomposition is the mirror of the first
    // with triangle colors inverted: Utilde must be star(U).
    let starred = u.star().map_err(|e| internal(&e))?;
    if starred.matrix() != utilde.matrix() {
        return Err(QError::Internal("Utilde != star(U)".to_string()));
    }
    let n = u.size();
    for x in 0..n {
        let want = if x == 0 { LaurentPoly::one() } else { LaurentPoly::zero() };
        if *u.matrix().get(0, x) != want {
            return Err(QError::Internal("(U)_{1,x} != delta_{1,x}".to_string()));
        }
    }
    Ok(QSystemInstance {
        rank: m.len() as i32,
        motzkin: m.clone(),
        // Normalization m -> m - 2*floor(m_1/2) from the cylinder bijection;
        // recorded only, all user-facing indices follow the unshifted path.
        shift: 2 * m1.div_euclid(2),
        cylinder,
        u,
        utilde,
    })
}

impl QSystemInstance {
    pub fn rank(&self) -> i32 {
        self.rank
    }

    pub fn motzkin(&self) -> &MotzkinPath {
        &self.motzkin
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn cylinder(&self) -> &Boundary {
        &self.cylinder
    }

    pub fn u(&self) -> &SliceMatrix {
        &self.u
    }

    pub fn utilde(&self) -> &SliceMatrix {
        &self.utilde
    }

    fn m1(&self) -> i64 {
        self.motzkin.entries()[0]
    }

    fn uu(&self) -> PolyMatrix {
        self.u.matrix().mul(self.utilde.matrix())
    }
}

fn r_atom(alpha: i32, k: i64) -> LaurentPoly {
    LaurentPoly::var(VarId::indexed("R", alpha as i64, k))
}

/// R_{1, n+m_1} = R[1,m_1] * ((U Utilde)^n)_{1,1}.
pub fn solve_r1(inst: &QSystemInstance, n: i64) -> LaurentPoly {
    assert!(n >= 0);
    let uu = inst.uu();
    let mut row = vec![LaurentPoly::zero(); inst.u.size()];
    row[0] = LaurentPoly::one();
    for _ in 0..n {
        row = uu.row_mul(&row);
    }
    row[0].mul(&r_atom(1, inst.m1()))
}

/// Memoized ascent of the Q-system recurrence from the initial band.
pub struct QRecursion {
    rank: i32,
    motzkin: MotzkinPath,
    memo: RefCell<HashMap<(i32, i64), LaurentPoly>>,
}

impl QRecursion {
    pub fn new(m: &MotzkinPath) -> Self {
        QRecursion {
            rank: m.len() as i32,
            motzkin: m.clone(),
            memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn value(&self, alpha: i32, n: i64) -> Result<LaurentPoly, QError> {
        if alpha == 0 || alpha == self.rank + 1 {
            return Ok(LaurentPoly::one());
        }
        if alpha < 0 || alpha > self.rank + 1 {
            return Err(QError::LayerOutOfRange(alpha));
        }
        let ma = self.motzkin.entries()[(alpha - 1) as usize];
        if n < ma {
            return Err(QError::OutOfDomain { alpha, n });
        }
        if n == ma || n == ma + 1 {
            return Ok(r_atom(alpha, n));
        }
        if let Some(v) = self.memo.borrow().get(&(alpha, n)) {
            return Ok(v.clone());
        }
        // |m_{alpha+-1} - m_alpha| <= 1, so n-1 >= m_alpha+1 keeps the
        // neighbor calls inside their own domains.
        let mid = self.value(alpha, n - 1)?;
        let numer = mid
            .mul(&mid)
            .add(&self.value(alpha + 1, n - 1)?.mul(&self.value(alpha - 1, n - 1)?));
        let v = numer
            .exact_div(&self.value(alpha, n - 2)?)
            .map_err(|e| QError::Internal(format!("Q-recurrence division failed: {}", e)))?;
        self.memo.borrow_mut().insert((alpha, n), v.clone());
        Ok(v)
    }
}

pub fn q_recursion_oracle(m: &MotzkinPath, alpha: i32, n: i64) -> Result<LaurentPoly, QError> {
    QRecursion::new(m).value(alpha, n)
}

/// Coefficients c_n = ((U Utilde)^n)_{1,1} of the resolvent
/// ((I - t U Utilde)^{-1})_{1,1}.
#[derive(Debug, Clone)]
pub struct ResolventSeries {
    pub coefficients: Vec<LaurentPoly>,
}

pub fn resolvent(inst: &QSystemInstance, n_max: i64) -> ResolventSeries {
    let uu = inst.uu();
    let mut row = vec![LaurentPoly::zero(); inst.u.size()];
    row[0] = LaurentPoly::one();
    let mut coefficients = vec![row[0].clone()];
    for _ in 0..n_max {
        row = uu.row_mul(&row);
        coefficients.push(row[0].clone());
    }
    ResolventSeries { coefficients }
}

/// R_{alpha, n} as the periodic-boundary T-system value T_{alpha, j*, n}
/// with j* = (alpha + n) mod 2, via the determinant route.
pub fn solve_r(inst: &QSystemInstance, alpha: i32, n: i64) -> Result<LaurentPoly, QError> {
    if alpha < 1 || alpha > inst.rank {
        return Err(QError::LayerOutOfRange(alpha));
    }
    let j = (alpha as i64 + n).rem_euclid(2);
    let solver = BoundarySolver::new(&inst.cylinder);
    match solver.solve_t(Point::new(alpha, j, n)) {
        Ok(v) => Ok(v),
        // A determinant entry below the boundary: fall back to the recurrence.
        Err(SolveError::EntryBelowBoundary { .. }) => {
            q_recursion_oracle(&inst.motzkin, alpha, n)
        }
        Err(SolveError::BelowBoundary { .. }) => Err(QError::OutOfDomain { alpha, n }),
        Err(e) => Err(QError::Internal(e.to_string())),
    }
}

/// Verifies the resolvent against the Q-recurrence, and for the r=3 path
/// (2,1,0) also against the 8x8 root-to-root transfer matrix of the
/// graph formulation (with its gauge-transformed variant).
pub fn check_resolvent(inst: &QSystemInstance, n_max: i64) -> VerifyReport {
    let mut report = VerifyReport::default();
    let series = resolvent(inst, n_max);
    let rec = QRecursion::new(&inst.motzkin);
    let m1 = inst.m1();
    let r1m1 = r_atom(1, m1);

    let c0_ok = series.coefficients[0] == LaurentPoly::one();
    report.checks.push(crate::solver::VerifyCheck {
        name: "resolvent c_0".to_string(),
        passed: c0_ok,
        detail: "c_0 = 1".to_string(),
    });

    let mut bad = 0usize;
    let mut positive_bad = 0usize;
    for (n, c) in series.coefficients.iter().enumerate() {
        let want = rec.value(1, n as i64 + m1);
        if want != Ok(c.mul(&r1m1)) {
            bad += 1;
        }
        if !c.is_positive() {
            positive_bad += 1;
        }
    }
    report.checks.push(crate::solver::VerifyCheck {
        name: "resolvent vs recurrence".to_string(),
        passed: bad == 0,
        detail: format!("{} of {} coefficients mismatch", bad, series.coefficients.len()),
    });
    report.checks.push(crate::solver::VerifyCheck {
        name: "resolvent positivity".to_string(),
        passed: positive_bad == 0,
        detail: format!("{} nonpositive coefficients", positive_bad),
    });

    if inst.motzkin.entries() == [2, 1, 0] {
        let graph = graph_series_210(n_max);
        let graph_ok = graph == series.coefficients;
        report.checks.push(crate::solver::VerifyCheck {
            name: "graph transfer matrix fixture".to_string(),
            passed: graph_ok,
            detail: "root-to-root descents series vs ((U Utilde)^n)_{1,1}".to_string(),
        });
        report.checks.push(crate::solver::VerifyCheck {
            name: "gauge invariance".to_string(),
            passed: gauge_check_210(inst, &series),
            detail: "diagonal conjugation leaves the (1,1) resolvent fixed".to_string(),
        });
    }
    report
}

fn mono(pairs: &[(i64, i64, i64)]) -> LaurentPoly {
    let mut p = LaurentPoly::one();
    for (alpha, k, e) in pairs {
        p = p.mul(&LaurentPoly::var(VarId::indexed("R", *alpha, *k)).pow(*e).unwrap());
    }
    p
}

/// Descent weights of the rooted graph for the path (2,1,0).
fn y_params_210() -> Vec<LaurentPoly> {
    vec![
        // y_1 .. y_7
        mono(&[(1, 3, 1), (1, 2, -1)]),
        mono(&[(2, 2, 2), (2, 1, -1), (1, 2, -1), (1, 3, -1)]),
        mono(&[(1, 2, 1), (2, 2, 1), (2, 1, -1), (1, 3, -1)]),
        mono(&[(1, 2, 2), (3, 1, 2), (3, 0, -1), (2, 1, -1), (2, 2, -1), (1, 3, -1)]),
        mono(&[(2, 1, 1), (3, 1, 1), (3, 0, -1), (2, 2, -1)]),
        mono(&[(2, 1, 2), (3, 0, -1), (3, 1, -1), (2, 2, -1)]),
        mono(&[(3, 0, 1), (3, 1, -1)]),
        // y_{3,1}, y_{4,1}, y_{4,2}
        mono(&[(3, 1, 2), (3, 0, -1), (2, 1, -1), (1, 3, -1)]),
        mono(&[(3, 0, -1), (1, 3, -1)]),
        mono(&[(1, 2, 2), (3, 0, -1), (2, 2, -1), (1, 3, -1)]),
    ]
}

/// Series of ((I - T)^{-1})_{1,1} in the descent-counting variable t for
/// the verbatim 8x8 transfer matrix of the path (2,1,0): coefficient of
/// t^n collects root-to-root walks with exactly n descents. The t^0 part
/// of T is nilpotent (ascents move away from the root), so the iteration
/// below terminates once every surviving walk exceeds n_max descents.
fn graph_series_210(n_max: i64) -> Vec<LaurentPoly> {
    let t = LaurentPoly::var(VarId::named("t"));
    let y = y_params_210();
    let (y1, y2, y3, y4, y5, y6, y7) =
        (&y[0], &y[1], &y[2], &y[3], &y[4], &y[5], &y[6]);
    let (y31, y41, y42) = (&y[7], &y[8], &y[9]);
    let mut tm = PolyMatrix::zero(8);
    let one = LaurentPoly::one;
    let ty = |p: &LaurentPoly| t.mul(p);
    tm.set(0, 1, one());
    tm.set(1, 0, ty(y1));
    tm.set(1, 2, one());
    tm.set(2, 1, ty(y2));
    tm.set(2, 3, one());
    tm.set(2, 4, one());
    tm.set(3, 2, ty(y3));
    tm.set(4, 1, ty(y31));
    tm.set(4, 2, ty(y4));
    tm.set(4, 5, one());
    tm.set(4, 6, one());
    tm.set(5, 4, ty(y5));
    tm.set(6, 1, ty(y41));
    tm.set(6, 2, ty(y42));
    tm.set(6, 4, ty(y6));
    tm.set(6, 7, one());
    tm.set(7, 6, ty(y7));

    let t_var = VarId::named("t");
    let truncate = |p: &LaurentPoly| p.drop_above_degree(&t_var, n_max);
    let mut row = vec![LaurentPoly::zero(); 8];
    row[0] = LaurentPoly::one();
    let mut total = LaurentPoly::one();
    loop {
        row = tm.row_mul(&row).iter().map(&truncate).collect();
        if row.iter().all(|p| p.is_zero()) {
            break;
        }
        total = total.add(&row[0]);
    }
    (0..=n_max).map(|n| total.coefficient_of(&t_var, n)).collect()
}

/// Conjugates U, Utilde by the paper's diagonal gauge for (2,1,0), checks
/// the gauged matrices against their closed y-form, and re-derives the
/// resolvent coefficients from the gauged pair.
fn gauge_check_210(inst: &QSystemInstance, series: &ResolventSeries) -> bool {
    let y = y_params_210();
    let (y1, y2, y3, y4, y5, y6, y7) =
        (&y[0], &y[1], &y[2], &y[3], &y[4], &y[5], &y[6]);
    let (y31, y41, y42) = (&y[7], &y[8], &y[9]);
    let l = vec![
        LaurentPoly::one(),
        mono(&[(1, 2, 1), (2, 1, 1), (2, 2, -1)]),
        mono(&[(2, 1, 1), (3, 0, 1), (3, 1, -1)]),
        mono(&[(3, 0, 1)]),
    ];
    let rg = vec![
        LaurentPoly::one(),
        mono(&[(1, 2, 1)]),
        mono(&[(2, 1, 1)]),
        mono(&[(3, 1, 1)]),
    ];
    let conj = |m: &PolyMatrix, left: &[LaurentPoly], right: &[LaurentPoly]| {
        let mut out = PolyMatrix::zero(4);
        for i in 0..4 {
            for j in 0..4 {
                let scale = right[j].exact_div(&left[i]).unwrap();
                out.set(i, j, m.get(i, j).mul(&scale));
            }
        }
        out
    };
    let v = conj(inst.u.matrix(), &l, &rg);
    let vt = conj(inst.utilde.matrix(), &rg, &l);

    let mut v_want = PolyMatrix::identity(4);
    v_want.set(1, 0, y2.clone());
    v_want.set(1, 1, y3.clone());
    v_want.set(2, 0, y31.clone());
    v_want.set(2, 1, y4.clone());
    v_want.set(2, 2, y5.clone());
    v_want.set(3, 0, y41.clone());
    v_want.set(3, 1, y42.clone());
    v_want.set(3, 2, y6.clone());
    let mut vt_want = PolyMatrix::zero(4);
    for i in 0..4 {
        for j in i..4 {
            vt_want.set(i, j, LaurentPoly::one());
        }
    }
    vt_want.set(0, 0, y1.clone());
    vt_want.set(3, 3, y7.clone());
    if v != v_want || vt != vt_want {
        return false;
    }

    let vv = v.mul(&vt);
    let mut row = vec![LaurentPoly::zero(); 4];
    row[0] = LaurentPoly::one();
    for c in &series.coefficients {
        if row[0] != *c {
            return false;
        }
        row = vv.row_mul(&row);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn path(v: &[i64]) -> MotzkinPath {
        MotzkinPath::new(v.to_vec()).unwrap()
    }

    /// All paths of the given length with entries in 0..=2.
    fn all_paths(len: usize) -> Vec<MotzkinPath> {
        let mut acc: Vec<Vec<i64>> = (0..=2).map(|v| vec![v]).collect();
        for _ in 1..len {
            let mut next = Vec::new();
            for p in &acc {
                let last = *p.last().unwrap();
                for d in [-1, 0, 1] {
                    if (0..=2).contains(&(last + d)) {
                        let mut q = p.clone();
                        q.push(last + d);
                        next.push(q);
                    }
                }
            }
            acc = next;
        }
        acc.into_iter().map(|v| path(&v)).collect()
    }

    #[test]
    fn rank_one_instance() {
        let inst = build(&path(&[0])).unwrap();
        // U = H(R[1,0], R[1,1], 1), Utilde = V(1, R[1,1], R[1,0]).
        let (r10, r11) = (r_atom(1, 0), r_atom(1, 1));
        let inv = |p: &LaurentPoly| p.pow(-1).unwrap();
        assert_eq!(*inst.u().matrix().get(1, 0), inv(&r11));
        assert_eq!(*inst.u().matrix().get(1, 1), r10.mul(&inv(&r11)));
        assert_eq!(*inst.utilde().matrix().get(0, 0), r11.mul(&inv(&r10)));
        assert_eq!(*inst.utilde().matrix().get(0, 1), inv(&r10));
        assert_eq!(inst.shift(), 0);

        // All-ones ladder through the resolvent.
        let mut at_one = BTreeMap::new();
        at_one.insert(VarId::indexed("R", 1, 0), num_rational::BigRational::from_integer(1.into()));
        at_one.insert(VarId::indexed("R", 1, 1), num_rational::BigRational::from_integer(1.into()));
        let want = [1i64, 1, 2, 5, 13, 34];
        for n in 0..6i64 {
            let v = solve_r1(&inst, n);
            assert_eq!(
                v.eval(&at_one).unwrap(),
                num_rational::BigRational::from_integer(want[n as usize].into())
            );
        }
    }

    #[test]
    fn oracle_band_and_lift() {
        let m = path(&[2, 1, 0]);
        assert_eq!(q_recursion_oracle(&m, 1, 2).unwrap(), r_atom(1, 2));
        assert_eq!(q_recursion_oracle(&m, 1, 3).unwrap(), r_atom(1, 3));
        assert!(matches!(
            q_recursion_oracle(&m, 1, 1),
            Err(QError::OutOfDomain { .. })
        ));
        // R_{1,4} = (R_{1,3}^2 + R_{2,3}) / R_{1,2} with R_{2,3} lifted first.
        let rec = QRecursion::new(&m);
        let r23 = rec.value(2, 3).unwrap();
        let want = rec
            .value(1, 3)
            .unwrap()
            .pow(2)
            .unwrap()
            .add(&r23)
            .exact_div(&r_atom(1, 2))
            .unwrap();
        assert_eq!(rec.value(1, 4).unwrap(), want);
    }

    #[test]
    fn solve_r1_matches_oracle() {
        for m in [path(&[2, 1, 0]), path(&[0, 0]), path(&[1, 2])] {
            let inst = build(&m).unwrap();
            let rec = QRecursion::new(&m);
            let m1 = m.entries()[0];
            for n in 0..=5i64 {
                assert_eq!(
                    solve_r1(&inst, n),
                    rec.value(1, n + m1).unwrap(),
                    "path {:?}, n = {}",
                    m.entries(),
                    n
                );
            }
        }
    }

    #[test]
    fn fixture_210_full_report() {
        let inst = build(&path(&[2, 1, 0])).unwrap();
        assert_eq!(inst.shift(), 2);
        let report = check_resolvent(&inst, 5);
        assert!(report.all_passed(), "{:?}", report.checks);
        assert_eq!(report.checks.len(), 5);
    }

    #[test]
    fn star_and_delta_exhaustive() {
        // build() itself asserts Utilde = star(U) and the delta row.
        for len in 1..=4usize {
            for m in all_paths(len) {
                build(&m).unwrap();
            }
        }
    }

    #[test]
    fn resolvent_vs_oracle_exhaustive() {
        for len in 1..=3usize {
            for m in all_paths(len) {
                let inst = build(&m).unwrap();
                let report = check_resolvent(&inst, 4);
                assert!(report.all_passed(), "path {:?}: {:?}", m.entries(), report.checks);
            }
        }
    }

    #[test]
    fn solve_r_determinant_route() {
        let m = path(&[2, 1, 0]);
        let inst = build(&m).unwrap();
        let rec = QRecursion::new(&m);
        for alpha in 1..=3 {
            let ma = m.entries()[(alpha - 1) as usize];
            for n in ma..=4 {
                assert_eq!(
                    solve_r(&inst, alpha, n).unwrap(),
                    rec.value(alpha, n).unwrap(),
                    "alpha {}, n {}",
                    alpha,
                    n
                );
            }
        }
        let m = path(&[0, 0]);
        let inst = build(&m).unwrap();
        let rec = QRecursion::new(&m);
        for alpha in 1..=2 {
            for n in 0..=4 {
                assert_eq!(solve_r(&inst, alpha, n).unwrap(), rec.value(alpha, n).unwrap());
            }
        }
        assert!(matches!(solve_r(&inst, 1, -2), Err(QError::OutOfDomain { .. })));
    }
}
