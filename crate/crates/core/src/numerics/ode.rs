//! Fundamental solutions of linear matrix ODEs `Φ' = A(t)Φ`.
//!
//! The integrator is the Dormand–Prince 8(5,3) embedded pair with the usual
//! Hairer step-size controller. It integrates the deviation `D = Φ − I`,
//! i.e. `D' = A(t)(I + D)`, with a single error scale for all entries. For
//! short intervals `D` is small and the relative tolerance then applies to
//! the deviation itself, which keeps finite differences of transports over
//! tiny segments clean.

use crate::error::{Error, Result};

use super::matrix::DenseMatrix;

/// Default relative tolerance of the transport integrator.
pub const DEFAULT_RTOL: f64 = 1e-10;

const MAX_STEPS: usize = 200_000;

/// `Φ' = A(t)Φ` on `[start, end]` (either orientation).
pub struct OdeProblem<F>
where
    F: Fn(f64) -> Result<DenseMatrix>,
{
    pub coefficient: F,
    pub start: f64,
    pub end: f64,
    pub rtol: f64,
}

impl<F> OdeProblem<F>
where
    F: Fn(f64) -> Result<DenseMatrix>,
{
    pub fn new(coefficient: F, start: f64, end: f64) -> Self {
        Self {
            coefficient,
            start,
            end,
            rtol: DEFAULT_RTOL,
        }
    }

    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self
    }
}

/// Integration statistics, mostly for diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// `Φ(end, start)`; exactly the identity when `start == end`.
pub fn fundamental_solution<F>(problem: &OdeProblem<F>) -> Result<DenseMatrix>
where
    F: Fn(f64) -> Result<DenseMatrix>,
{
    fundamental_solution_with_stats(problem).map(|(phi, _)| phi)
}

pub fn fundamental_solution_with_stats<F>(problem: &OdeProblem<F>) -> Result<(DenseMatrix, OdeStats)>
where
    F: Fn(f64) -> Result<DenseMatrix>,
{
    let (a, b) = (problem.start, problem.end);
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Precondition(format!("non-finite interval [{a}, {b}]")));
    }
    if !(problem.rtol > 0.0) {
        return Err(Error::Precondition("rtol must be positive".into()));
    }
    let a0 = eval_coefficient(&problem.coefficient, a)?;
    if !a0.is_square() {
        return Err(Error::Dimension(format!(
            "ODE coefficient must be square, got {}x{}",
            a0.rows(),
            a0.cols()
        )));
    }
    let n = a0.rows();
    if a == b {
        return Ok((DenseMatrix::identity(n), OdeStats::default()));
    }
    let mut stepper = Dop853 {
        n,
        rhs: &problem.coefficient,
        rtol: problem.rtol,
        atol: problem.rtol * 1e-6,
        stats: OdeStats::default(),
    };
    let y = stepper.integrate(a, b, a0)?;
    let mut phi = DenseMatrix::from_vec(n, n, y);
    for i in 0..n {
        phi[(i, i)] += 1.0;
    }
    Ok((phi, stepper.stats))
}

fn eval_coefficient<F>(f: &F, t: f64) -> Result<DenseMatrix>
where
    F: Fn(f64) -> Result<DenseMatrix>,
{
    let m = f(t).map_err(|e| Error::Integration {
        t,
        reason: format!("coefficient not evaluable: {e}"),
    })?;
    if !m.is_finite() {
        return Err(Error::Integration {
            t,
            reason: "coefficient is not finite".into(),
        });
    }
    Ok(m)
}

struct Dop853<'a, F>
where
    F: Fn(f64) -> Result<DenseMatrix>,
{
    n: usize,
    rhs: &'a F,
    rtol: f64,
    atol: f64,
    stats: OdeStats,
}

impl<F> Dop853<'_, F>
where
    F: Fn(f64) -> Result<DenseMatrix>,
{
    /// `A(t)(I + D)` flattened.
    fn deriv(&mut self, t: f64, y: &[f64]) -> Result<Vec<f64>> {
        let a = eval_coefficient(self.rhs, t)?;
        self.stats.evaluations += 1;
        Ok(self.deriv_with(&a, y))
    }

    fn deriv_with(&self, a: &DenseMatrix, y: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = a.as_slice().to_vec();
        for i in 0..n {
            for k in 0..n {
                let aik = a[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += aik * y[k * n + j];
                }
            }
        }
        out
    }

    fn scale(&self, y: &[f64], y_new: &[f64]) -> f64 {
        let norm = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        self.atol + self.rtol * norm(y).max(norm(y_new))
    }

    fn initial_step(&mut self, t0: f64, y: &[f64], k1: &[f64], h_max: f64, dir: f64) -> Result<f64> {
        let sk = self.scale(y, y);
        let dnf: f64 = k1.iter().map(|v| (v / sk).powi(2)).sum();
        let dny: f64 = y.iter().map(|v| (v / sk).powi(2)).sum();
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            0.01 * (dny / dnf).sqrt()
        };
        h = h.min(h_max);
        let y1: Vec<f64> = y.iter().zip(k1).map(|(y, k)| y + dir * h * k).collect();
        let k2 = self.deriv(t0 + dir * h, &y1)?;
        let der2 = (k2.iter().zip(k1).map(|(a, b)| ((a - b) / sk).powi(2)).sum::<f64>()).sqrt() / h;
        let der12 = der2.max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(1.0 / 8.0)
        };
        Ok((100.0 * h).min(h1).min(h_max))
    }

    fn integrate(&mut self, t0: f64, t_end: f64, a0: DenseMatrix) -> Result<Vec<f64>> {
        let n2 = self.n * self.n;
        let dir = (t_end - t0).signum();
        let span = (t_end - t0).abs();
        let mut t = t0;
        let mut y = vec![0.0; n2];
        let mut k1 = self.deriv_with(&a0, &y);
        self.stats.evaluations += 1;
        let mut h = self.initial_step(t0, &y, &k1, span, dir)?;
        let mut last_rejected = false;

        loop {
            let remaining = (t_end - t) * dir;
            if remaining <= 0.0 {
                return Ok(y);
            }
            if self.stats.accepted + self.stats.rejected >= MAX_STEPS {
                return Err(Error::Integration {
                    t,
                    reason: format!("exceeded {MAX_STEPS} steps"),
                });
            }
            let floor = 16.0 * f64::EPSILON * t.abs().max(1.0);
            if remaining <= floor {
                return Ok(y);
            }
            let mut last = false;
            if 1.01 * h >= remaining {
                h = remaining;
                last = true;
            }
            if h < floor {
                return Err(Error::Integration {
                    t,
                    reason: format!("step size underflow (h = {h:e})"),
                });
            }
            let hs = dir * h;

            let mut k: Vec<Vec<f64>> = Vec::with_capacity(12);
            k.push(k1.clone());
            for (stage, row) in A.iter().enumerate() {
                let mut yi = y.clone();
                for &(j, coeff) in row.iter() {
                    let kj = &k[j];
                    for (dst, v) in yi.iter_mut().zip(kj) {
                        *dst += hs * coeff * v;
                    }
                }
                let ti = if stage == A.len() - 1 {
                    t + hs
                } else {
                    t + C[stage] * hs
                };
                k.push(self.deriv(ti, &yi)?);
            }

            let mut incr = vec![0.0; n2];
            for &(j, coeff) in B.iter() {
                for (dst, v) in incr.iter_mut().zip(&k[j]) {
                    *dst += coeff * v;
                }
            }
            let y_new: Vec<f64> = y.iter().zip(&incr).map(|(y, d)| y + hs * d).collect();

            let sk = self.scale(&y, &y_new);
            let mut err5 = 0.0;
            let mut err3 = 0.0;
            for i in 0..n2 {
                let e5: f64 = ER.iter().map(|&(j, c)| c * k[j][i]).sum();
                let e3 = incr[i] - BHH[0] * k[0][i] - BHH[1] * k[8][i] - BHH[2] * k[11][i];
                err5 += (e5 / sk).powi(2);
                err3 += (e3 / sk).powi(2);
            }
            let mut deno = err5 + 0.01 * err3;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = h * err5 / (deno * n2 as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::Integration {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }

            let fac11 = err.powf(1.0 / 8.0);
            if err <= 1.0 {
                self.stats.accepted += 1;
                t = if last { t_end } else { t + hs };
                y = y_new;
                k1 = self.deriv(t, &y)?;
                let fac = (1.0 / 6.0f64).max((1.0 / 0.333f64).min(fac11 / 0.9));
                let mut h_new = h / fac;
                if last_rejected {
                    h_new = h_new.min(h);
                }
                last_rejected = false;
                h = h_new.min(span);
                if last {
                    return Ok(y);
                }
            } else {
                self.stats.rejected += 1;
                last_rejected = true;
                h /= (1.0 / 0.333f64).min(fac11 / 0.9);
            }
        }
    }
}

// Dormand–Prince 8(5,3) tableau. Stage indices are 0-based (k[0] = k1).
const C: [f64; 10] = [
    0.526001519587677318785587544488E-01,
    0.789002279381515978178381316732E-01,
    0.118350341907227396726757197510E+00,
    0.281649658092772603273242802490E+00,
    0.333333333333333333333333333333E+00,
    0.25E+00,
    0.307692307692307692307692307692E+00,
    0.651282051282051282051282051282E+00,
    0.6E+00,
    0.857142857142857142857142857142E+00,
];

const A: [&[(usize, f64)]; 11] = [
    &[(0, 5.26001519587677318785587544488E-2)],
    &[
        (0, 1.97250569845378994544595329183E-2),
        (1, 5.91751709536136983633785987549E-2),
    ],
    &[
        (0, 2.95875854768068491816892993775E-2),
        (2, 8.87627564304205475450678981324E-2),
    ],
    &[
        (0, 2.41365134159266685502369798665E-1),
        (2, -8.84549479328286085344864962717E-1),
        (3, 9.24834003261792003115737966543E-1),
    ],
    &[
        (0, 3.7037037037037037037037037037E-2),
        (3, 1.70828608729473871279604482173E-1),
        (4, 1.25467687566822425016691814123E-1),
    ],
    &[
        (0, 3.7109375E-2),
        (3, 1.70252211019544039314978060272E-1),
        (4, 6.02165389804559606850219397283E-2),
        (5, -1.7578125E-2),
    ],
    &[
        (0, 3.70920001185047927108779319836E-2),
        (3, 1.70383925712239993810214054705E-1),
        (4, 1.07262030446373284651809199168E-1),
        (5, -1.53194377486244017527936158236E-2),
        (6, 8.27378916381402288758473766002E-3),
    ],
    &[
        (0, 6.24110958716075717114429577812E-1),
        (3, -3.36089262944694129406857109825E0),
        (4, -8.68219346841726006818189891453E-1),
        (5, 2.75920996994467083049415600797E1),
        (6, 2.01540675504778934086186788979E1),
        (7, -4.34898841810699588477366255144E1),
    ],
    &[
        (0, 4.77662536438264365890433908527E-1),
        (3, -2.48811461997166764192642586468E0),
        (4, -5.90290826836842996371446475743E-1),
        (5, 2.12300514481811942347288949897E1),
        (6, 1.52792336328824235832596922938E1),
        (7, -3.32882109689848629194453265587E1),
        (8, -2.03312017085086261358222928593E-2),
    ],
    &[
        (0, -9.3714243008598732571704021658E-1),
        (3, 5.18637242884406370830023853209E0),
        (4, 1.09143734899672957818500254654E0),
        (5, -8.14978701074692612513997267357E0),
        (6, -1.85200656599969598641566180701E1),
        (7, 2.27394870993505042818970056734E1),
        (8, 2.49360555267965238987089396762E0),
        (9, -3.0467644718982195003823669022E0),
    ],
    &[
        (0, 2.27331014751653820792359768449E0),
        (3, -1.05344954667372501984066689879E1),
        (4, -2.00087205822486249909675718444E0),
        (5, -1.79589318631187989172765950534E1),
        (6, 2.79488845294199600508499808837E1),
        (7, -2.85899827713502369474065508674E0),
        (8, -8.87285693353062954433549289258E0),
        (9, 1.23605671757943030647266201528E1),
        (10, 6.43392746015763530355970484046E-1),
    ],
];

const B: [(usize, f64); 8] = [
    (0, 5.42937341165687622380535766363E-2),
    (5, 4.45031289275240888144113950566E0),
    (6, 1.89151789931450038304281599044E0),
    (7, -5.8012039600105847814672114227E0),
    (8, 3.1116436695781989440891606237E-1),
    (9, -1.52160949662516078556178806805E-1),
    (10, 2.01365400804030348374776537501E-1),
    (11, 4.47106157277725905176885569043E-2),
];

const BHH: [f64; 3] = [
    0.244094488188976377952755905512E+00,
    0.733846688281611857341361741547E+00,
    0.220588235294117647058823529412E-01,
];

const ER: [(usize, f64); 8] = [
    (0, 0.1312004499419488073250102996E-01),
    (5, -0.1225156446376204440720569753E+01),
    (6, -0.4957589496572501915214079952E+00),
    (7, 0.1664377182454986536961530415E+01),
    (8, -0.3503288487499736816886487290E+00),
    (9, 0.3341791187130174790297318841E+00),
    (10, 0.8192320648511571246570742613E-01),
    (11, -0.2235530786388629525884427845E-01),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficient_gives_identity() {
        let p = OdeProblem::new(|_| Ok(DenseMatrix::zeros(3, 3)), 0.0, 1.0);
        assert_eq!(fundamental_solution(&p).unwrap(), DenseMatrix::identity(3));
    }

    #[test]
    fn degenerate_interval_is_exact_identity() {
        let p = OdeProblem::new(|t| Ok(DenseMatrix::scalar(t.sin())), 0.3, 0.3);
        assert_eq!(fundamental_solution(&p).unwrap(), DenseMatrix::identity(1));
    }

    #[test]
    fn scalar_equation_matches_closed_form() {
        // u' = cos(t) u  =>  u(b) = exp(sin b − sin a) u(a)
        let p = OdeProblem::new(|t| Ok(DenseMatrix::scalar(t.cos())), 0.0, 3.0);
        let phi = fundamental_solution(&p).unwrap();
        let exact = (3.0f64.sin()).exp();
        assert!((phi[(0, 0)] - exact).abs() <= 1e-10 * exact);
    }

    #[test]
    fn unevaluable_coefficient_is_an_integration_failure() {
        let p = OdeProblem::new(
            |t| {
                if t > 0.5 {
                    Err(Error::Precondition("outside".into()))
                } else {
                    Ok(DenseMatrix::scalar(1.0))
                }
            },
            0.0,
            1.0,
        );
        assert!(matches!(fundamental_solution(&p), Err(Error::Integration { .. })));
    }

    #[test]
    fn backward_integration_inverts_forward() {
        let coeff = |t: f64| Ok(DenseMatrix::from_rows(&[vec![0.0, -1.0 - t], vec![1.0, 0.2 * t]]));
        let fwd = fundamental_solution(&OdeProblem::new(coeff, 0.0, 2.0)).unwrap();
        let bwd = fundamental_solution(&OdeProblem::new(coeff, 2.0, 0.0)).unwrap();
        assert!((&bwd * &fwd).distance(&DenseMatrix::identity(2)) <= 10.0 * DEFAULT_RTOL);
    }
}
