//! Smooth sweep shape `sin^2(pi/2 * sin^2(pi t / 2 tau))` and the per-term
//! control protocols built from it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::PhysicalInstance;

/// Overshoot past the sweep interval that is clamped instead of rejected, relative to tau.
const CLAMP_TOLERANCE: f64 = 1e-12;

/// Normalised shape `f(t)` rising from 0 to 1 with its first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeValue {
    pub value: f64,
    pub rate: f64,
    pub accel: f64,
}

/// Evaluate the shape and its derivatives at `t` in `[0, tau]`.
pub fn shape(t: f64, tau: f64) -> Result<ShapeValue> {
    let t = clamp_time(t, tau)?;
    let inner = (PI * t / (2.0 * tau)).sin().powi(2);
    let value = (0.5 * PI * inner).sin().powi(2);
    let s1 = (PI * t / tau).sin();
    let c1 = (PI * t / tau).cos();
    let si = (PI * inner).sin();
    let ci = (PI * inner).cos();
    let pre = PI * PI / (4.0 * tau);
    let rate = pre * s1 * si;
    let accel = pre * (PI / tau * c1 * si + PI * PI / (2.0 * tau) * s1 * s1 * ci);
    Ok(ShapeValue { value, rate, accel })
}

fn clamp_time(t: f64, tau: f64) -> Result<f64> {
    let slack = CLAMP_TOLERANCE * tau;
    if !t.is_finite() || t < -slack || t > tau + slack {
        return Err(Error::Domain { t, tau });
    }
    Ok(t.clamp(0.0, tau))
}

/// `lambda(t) = lambda0 + (lambdaf - lambda0) f(t)` over a sweep of length `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepProfile {
    pub lambda0: f64,
    pub lambdaf: f64,
    pub tau: f64,
}

impl SweepProfile {
    pub fn new(lambda0: f64, lambdaf: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidInstance(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { lambda0, lambdaf, tau })
    }

    pub fn lambda_at(&self, t: f64) -> Result<f64> {
        Ok(self.lambda0 + (self.lambdaf - self.lambda0) * shape(t, self.tau)?.value)
    }

    pub fn lambda_dot_at(&self, t: f64) -> Result<f64> {
        Ok((self.lambdaf - self.lambda0) * shape(t, self.tau)?.rate)
    }

    pub fn lambda_ddot_at(&self, t: f64) -> Result<f64> {
        Ok((self.lambdaf - self.lambda0) * shape(t, self.tau)?.accel)
    }
}

/// Every control field of an instance at one instant, with first and second
/// time derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSample {
    pub t: f64,
    pub h: Vec<f64>,
    pub hdot: Vec<f64>,
    pub hddot: Vec<f64>,
    pub j: Vec<f64>,
    pub jdot: Vec<f64>,
    pub jddot: Vec<f64>,
    pub c: Vec<f64>,
    pub cdot: Vec<f64>,
    pub cddot: Vec<f64>,
}

/// Sample `h_k(t)`, `J_k(t)` and `C_l(t)`; all share the common shape.
pub fn term_schedules(instance: &PhysicalInstance, t: f64) -> Result<ScheduleSample> {
    let s = shape(t, instance.tau())?;
    // h runs from h_start to 0, J and C from 0 to their final values.
    let scale = |v: &[f64], k: f64| v.iter().map(|x| x * k).collect::<Vec<_>>();
    let h0 = instance.h_start();
    Ok(ScheduleSample {
        t: t.clamp(0.0, instance.tau()),
        h: scale(h0, 1.0 - s.value),
        hdot: scale(h0, -s.rate),
        hddot: scale(h0, -s.accel),
        j: scale(instance.j_final(), s.value),
        jdot: scale(instance.j_final(), s.rate),
        jddot: scale(instance.j_final(), s.accel),
        c: scale(instance.c_final(), s.value),
        cdot: scale(instance.c_final(), s.rate),
        cddot: scale(instance.c_final(), s.accel),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{LogicalProblem, PhysicalInstance};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit(tau: f64) -> SweepProfile {
        SweepProfile::new(0.0, 1.0, tau).unwrap()
    }

    #[test]
    fn boundaries_and_midpoint() {
        let p = SweepProfile::new(0.3, 2.1, 1.7).unwrap();
        assert_eq!(p.lambda_at(0.0).unwrap(), 0.3);
        assert_relative_eq!(p.lambda_at(1.7).unwrap(), 2.1, epsilon = 1e-15);
        assert_relative_eq!(p.lambda_at(0.85).unwrap(), 1.2, epsilon = 1e-14);
    }

    #[test]
    fn rate_endpoints_and_midpoint() {
        let p = unit(1.0);
        assert_eq!(p.lambda_dot_at(0.0).unwrap(), 0.0);
        assert!(p.lambda_dot_at(1.0).unwrap().abs() < 1e-15);
        assert_relative_eq!(p.lambda_dot_at(0.5).unwrap(), PI * PI / 4.0, epsilon = 1e-14);
        assert!(p.lambda_ddot_at(0.0).unwrap().abs() < 1e-15);
        assert!(p.lambda_ddot_at(1.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn rate_matches_finite_differences() {
        let tau = 2.3;
        let p = SweepProfile::new(-0.4, 1.9, tau).unwrap();
        let dt = 1e-6 * tau;
        for i in 1..=64 {
            let t = tau * i as f64 / 65.0;
            let fd = (p.lambda_at(t + dt).unwrap() - p.lambda_at(t - dt).unwrap()) / (2.0 * dt);
            let exact = p.lambda_dot_at(t).unwrap();
            assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1e-3), "t={t} fd={fd} exact={exact}");
            let fd2 = (p.lambda_dot_at(t + dt).unwrap() - p.lambda_dot_at(t - dt).unwrap()) / (2.0 * dt);
            let acc = p.lambda_ddot_at(t).unwrap();
            assert!((fd2 - acc).abs() <= 1e-5 * acc.abs().max(1.0), "t={t} fd2={fd2} acc={acc}");
        }
    }

    #[test]
    fn second_derivative_vanishes_at_start_by_differences() {
        // lambda - lambda0 grows like t^4, so the forward second difference is O(h^2).
        let tau = 1.5;
        let p = SweepProfile::new(0.0, 3.0, tau).unwrap();
        let h = 1e-5 * tau;
        let f = |k: f64| p.lambda_at(k * h).unwrap();
        let dd = (f(2.0) - 2.0 * f(1.0) + f(0.0)) / (h * h);
        assert!(dd.abs() < 1e-6 * 3.0 / (tau * tau), "dd={dd}");
    }

    #[test]
    fn domain_errors_and_clamping() {
        let p = unit(1.0);
        assert!(matches!(p.lambda_at(-0.1), Err(Error::Domain { .. })));
        assert!(matches!(p.lambda_dot_at(1.1), Err(Error::Domain { .. })));
        assert_relative_eq!(p.lambda_at(1.0 + 1e-13).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(p.lambda_at(-1e-13).unwrap(), 0.0);
    }

    #[test]
    fn term_schedule_endpoints() {
        let prob = LogicalProblem::uniform(3, 0.7).unwrap();
        let inst = PhysicalInstance::compile(&prob, 1.0, 2.0, 10.0, 2.0).unwrap();
        let s0 = term_schedules(&inst, 0.0).unwrap();
        assert_eq!(s0.h, vec![1.0; 4]);
        assert_eq!(s0.j, vec![0.0; 4]);
        assert_eq!(s0.c, vec![0.0]);
        assert!(s0.hdot.iter().chain(&s0.jdot).chain(&s0.cdot).all(|v| *v == 0.0));
        let s1 = term_schedules(&inst, 2.0).unwrap();
        assert!(s1.h.iter().all(|h| h.abs() < 1e-15));
        for (a, b) in s1.j.iter().zip(inst.j_final()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-14);
        }
        assert_relative_eq!(s1.c[0], 2.0, epsilon = 1e-14);
        assert!(s1.hdot.iter().chain(&s1.jdot).chain(&s1.cdot).all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn term_schedule_midpoint() {
        let tau = 1.0;
        let prob = LogicalProblem::uniform(3, 1.0).unwrap();
        let inst = PhysicalInstance::compile(&prob, 1.0, 2.0, 10.0, tau).unwrap();
        let s = term_schedules(&inst, 0.5 * tau).unwrap();
        let r = PI * PI / (4.0 * tau);
        assert_relative_eq!(s.h[0], 0.5, epsilon = 1e-14);
        assert_relative_eq!(s.j[0], 0.5, epsilon = 1e-14);
        assert_relative_eq!(s.c[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(s.hdot[0], -r, epsilon = 1e-14);
        assert_relative_eq!(s.jdot[0], r, epsilon = 1e-14);
        assert_relative_eq!(s.jdot[3], -10.0 * r, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn shape_is_point_symmetric(frac in 0.0f64..=1.0, tau in 0.01f64..100.0, l0 in -5.0f64..5.0, lf in -5.0f64..5.0) {
            let p = SweepProfile::new(l0, lf, tau).unwrap();
            let t = frac * tau;
            let a = p.lambda_at(t).unwrap() - l0;
            let b = lf - p.lambda_at(tau - t).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + (lf - l0).abs()));
        }

        #[test]
        fn rate_is_linear_in_amplitude(frac in 0.0f64..=1.0, s in -10.0f64..10.0, lf in -5.0f64..5.0) {
            let a = SweepProfile::new(0.0, lf, 1.3).unwrap();
            let b = SweepProfile::new(0.0, s * lf, 1.3).unwrap();
            let t = frac * 1.3;
            let (ra, rb) = (a.lambda_dot_at(t).unwrap(), b.lambda_dot_at(t).unwrap());
            prop_assert!((rb - s * ra).abs() <= 1e-12 * (1.0 + rb.abs()));
        }

        #[test]
        fn rate_scales_inverse_with_tau(frac in 0.0f64..=1.0, tau in 0.01f64..100.0) {
            let a = unit(tau).lambda_dot_at(frac * tau).unwrap();
            let b = unit(2.0 * tau).lambda_dot_at(frac * 2.0 * tau).unwrap();
            prop_assert!((a - 2.0 * b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }
}
