//! Dormand–Prince 5(4) embedded pair on a two-component double-double state.

use twofloat::TwoFloat;

pub(crate) type R = TwoFloat;
pub(crate) type State = [R; 2];

/// `a / b` by long division on the high words.
///
/// `twofloat`'s own double-by-double quotient drops its correction term and is
/// only `f64`-accurate, so quotients of two double-doubles go through here.
pub(crate) fn div(a: R, b: R) -> R {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

type Q = (i32, i32);

const C: [Q; 7] = [(0, 1), (1, 5), (3, 10), (4, 5), (8, 9), (1, 1), (1, 1)];
const A: [[Q; 6]; 7] = [
    [(0, 1); 6],
    [(1, 5), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1)],
    [(3, 40), (9, 40), (0, 1), (0, 1), (0, 1), (0, 1)],
    [(44, 45), (-56, 15), (32, 9), (0, 1), (0, 1), (0, 1)],
    [(19372, 6561), (-25360, 2187), (64448, 6561), (-212, 729), (0, 1), (0, 1)],
    [(9017, 3168), (-355, 33), (46732, 5247), (49, 176), (-5103, 18656), (0, 1)],
    [(35, 384), (0, 1), (500, 1113), (125, 192), (-2187, 6784), (11, 84)],
];
const B5: [Q; 7] = [(35, 384), (0, 1), (500, 1113), (125, 192), (-2187, 6784), (11, 84), (0, 1)];
const B4: [Q; 7] = [
    (5179, 57600),
    (0, 1),
    (7571, 16695),
    (393, 640),
    (-92097, 339200),
    (187, 2100),
    (1, 40),
];

fn q((n, d): Q) -> R {
    TwoFloat::from(n as f64) / d as f64
}

/// The tableau rounded once to double-double.
pub(crate) struct Tableau {
    c: [R; 7],
    a: [[R; 6]; 7],
    b5: [R; 7],
    b4: [R; 7],
}

impl Tableau {
    pub(crate) fn new() -> Self {
        Tableau {
            c: C.map(q),
            a: A.map(|row| row.map(q)),
            b5: B5.map(q),
            b4: B4.map(q),
        }
    }

    /// One trial step of size `h` from `(x, y)`; returns the new state and the
    /// scaled error norm, acceptable when `≤ 1`.
    pub(crate) fn try_step(
        &self,
        f: &impl Fn(R, &State) -> State,
        x: R,
        y: &State,
        h: R,
        tol: f64,
    ) -> (State, f64) {
        let zero = TwoFloat::from(0.0);
        let mut k = [[zero; 2]; 7];
        for stage in 0..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                for i in 0..2 {
                    ys[i] += h * self.a[stage][j] * kj[i];
                }
            }
            k[stage] = f(x + self.c[stage] * h, &ys);
        }
        let mut y5 = *y;
        let mut err = 0.0f64;
        for i in 0..2 {
            let mut hi = zero;
            let mut lo = zero;
            for s in 0..7 {
                hi += self.b5[s] * k[s][i];
                lo += self.b4[s] * k[s][i];
            }
            y5[i] += h * hi;
            let scale = tol * (1.0 + y[i].hi().abs().max(y5[i].hi().abs()));
            let e = (h * (hi - lo)).hi().abs() / scale;
            err = err.max(if e.is_nan() { f64::INFINITY } else { e });
        }
        (y5, err)
    }
}

/// Step-size factor after a trial with error norm `err`.
pub(crate) fn next_factor(err: f64) -> f64 {
    if err == 0.0 {
        5.0
    } else {
        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
    }
}

/// Cubic Hermite value of the first component between two accepted states.
pub(crate) fn hermite(x0: R, y0: &State, x1: R, y1: &State, x: R) -> R {
    let h = x1 - x0;
    let t = div(x - x0, h);
    let t2 = t * t;
    let t3 = t2 * t;
    (t3 * 2.0 - t2 * 3.0 + 1.0) * y0[0]
        + (t3 - t2 * 2.0 + t) * h * y0[1]
        + (t2 * 3.0 - t3 * 2.0) * y1[0]
        + (t3 - t2) * h * y1[1]
}
