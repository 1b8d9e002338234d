//! Dormand-Prince 5(4) stepping for dz/ds = e / √q(z) with the branch of √q
//! carried along.

use qd_core::{sqrt_near, Complex64 as C, QuadDiff};

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

pub enum StepOutcome {
    Accepted { z: C, w: C, h: f64, next_h: f64 },
    Rejected { next_h: f64 },
}

pub struct Stepper<'a> {
    qd: &'a QuadDiff,
    e: C,
    rtol: f64,
    atol: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(qd: &'a QuadDiff, e: C, rtol: f64, atol: f64) -> Self {
        Stepper { qd, e, rtol, atol }
    }

    fn field(&self, z: C, w: &mut C) -> Option<C> {
        let q = self.qd.eval(z).ok()?;
        if q.norm() == 0.0 || !q.is_finite() {
            return None;
        }
        *w = sqrt_near(q, *w);
        Some(self.e / *w)
    }

    /// One trial step of flat length h from (z, w).
    pub fn step(&self, z: C, w: C, h: f64) -> StepOutcome {
        let mut k = [C::new(0.0, 0.0); 7];
        let mut wk = w;
        let Some(k0) = self.field(z, &mut wk) else { return StepOutcome::Rejected { next_h: 0.25 * h } };
        k[0] = k0;
        for s in 1..7 {
            let mut zs = z;
            for j in 0..s {
                zs += k[j] * (A[s - 1][j] * h);
            }
            // branch for each stage follows the start value
            let mut ws = w;
            match self.field(zs, &mut ws) {
                Some(v) => k[s] = v,
                None => return StepOutcome::Rejected { next_h: 0.25 * h },
            }
            // stages that flip relative to the start mean the step crossed a branch point
            if (ws * w.conj()).re <= 0.0 {
                return StepOutcome::Rejected { next_h: 0.25 * h };
            }
        }
        let mut z5 = z;
        let mut err = C::new(0.0, 0.0);
        for s in 0..7 {
            z5 += k[s] * (B5[s] * h);
            err += k[s] * ((B5[s] - B4[s]) * h);
        }
        let scale = self.atol + self.rtol * z.norm().max(z5.norm());
        let ratio = err.norm() / scale;
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        if ratio <= 1.0 {
            let mut wn = w;
            if self.field(z5, &mut wn).is_none() {
                return StepOutcome::Rejected { next_h: 0.25 * h };
            }
            StepOutcome::Accepted { z: z5, w: wn, h, next_h: h * factor }
        } else {
            StepOutcome::Rejected { next_h: h * factor.min(0.9) }
        }
    }
}
