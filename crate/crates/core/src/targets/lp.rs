//! `L^p`-type targets: integral ReLU^s representations with a zonal density
//! `a(θ) = h(θ·e)` on `S^d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::ReluOrder;
use crate::quad::{cached_rule, gauss_legendre, Adaptive};
use crate::rates::exponents::zeta;
use crate::sphere::{
    apply_funk_hecke, area_ratio, funk_hecke_coeff, gegenbauer_all, gegenbauer_eval, harmonic_dim_f64,
    parity_vanishes, project_zonal_all, zonal_mean, FunkHeckeSpectrum, ProfileShape, SphereDim,
    ZonalSpectrum,
};

use super::lift::{reverse_map, sphere_point};

/// Named density profiles `h` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `h ≡ value`.
    Constant { value: f64 },
    /// `h = scale · P_degree`.
    Gegenbauer { degree: usize, scale: f64 },
    /// Indicator of the cap `{t ≥ cos_radius}`.
    PolarCap { cos_radius: f64 },
    /// `h = (1-t)^{-exponent}`.
    PoleSingularity { exponent: f64 },
    /// Spectrally defined: `‖a_i‖_{L²} = i^exponent` on admissible `i ≥ 1`.
    SpectralPowerLaw { exponent: f64 },
    /// [`Profile::SpectralPowerLaw`] with exponent `ζ(p) - eps0`.
    NearExtremal { eps0: f64 },
}

impl Profile {
    fn spectral_exponent(&self, d: usize, p: f64) -> Option<f64> {
        match *self {
            Profile::SpectralPowerLaw { exponent } => Some(exponent),
            Profile::NearExtremal { eps0 } => Some(zeta(d, p) - eps0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpTypeTarget {
    pub d: SphereDim,
    pub s: ReluOrder,
    pub p: f64,
    pub profile: Profile,
    /// Density spectrum `ĥ` after inadmissible modes were zeroed.
    pub density: ZonalSpectrum,
    /// Induced spectrum `f̂_i = λ_i ĥ_i`.
    pub spectrum: ZonalSpectrum,
    pub lambdas: FunkHeckeSpectrum,
    /// `‖h‖_{L^p(τ_d)}`. For spectral profiles this is the norm of the
    /// smoothly filtered synthesis at the highest resolved cutoff.
    pub lp_norm: f64,
    /// Relative change of `lp_norm` when the synthesis cutoff is halved; 0 for
    /// profiles given in closed form.
    pub lp_norm_drift: f64,
    /// Fraction of the density's `L²` mass removed by the parity projection.
    pub discarded_fraction: f64,
}

/// Largest filter index used when synthesizing spectral profiles for the
/// `L^p` norm.
pub const SYNTHESIS_CUTOFF: usize = 256;

/// Build the target, its density and induced spectra up to `maxdeg`, and its
/// `L^p(τ_d)` norm.
pub fn make_lp_target(
    d: SphereDim,
    s: ReluOrder,
    p: f64,
    profile: &Profile,
    maxdeg: usize,
) -> Result<LpTypeTarget> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::Range(format!("p must lie in [1, 2], got {p}")));
    }
    let sched = Adaptive { abs_tol: 1e-12, ..Adaptive::default() };
    let raw = match *profile {
        Profile::Constant { value } => {
            let mut c = vec![0.0; maxdeg + 1];
            c[0] = value;
            ZonalSpectrum::new(d, c)?
        }
        Profile::Gegenbauer { degree, scale } => {
            if degree > maxdeg {
                return Err(Error::InvalidParameter(format!(
                    "profile degree {degree} exceeds maxdeg {maxdeg}"
                )));
            }
            ZonalSpectrum::single_mode(d, degree, scale / harmonic_dim_f64(d, degree), maxdeg)
        }
        Profile::PolarCap { cos_radius } => {
            if !(-1.0..1.0).contains(&cos_radius) {
                return Err(Error::InvalidParameter(format!(
                    "cap cos_radius must lie in [-1, 1), got {cos_radius}"
                )));
            }
            let shape = ProfileShape::with_breakpoints(vec![cos_radius]);
            project_zonal_all(d, maxdeg, &shape, &sched, |t| if t >= cos_radius { 1.0 } else { 0.0 })?
        }
        Profile::PoleSingularity { exponent } => {
            let shape = ProfileShape { breakpoints: vec![], pole: exponent };
            project_zonal_all(d, maxdeg, &shape, &sched, |_| 1.0)?
        }
        Profile::SpectralPowerLaw { .. } | Profile::NearExtremal { .. } => {
            let e = profile.spectral_exponent(d.get(), p).expect("spectral profile");
            power_law_spectrum(d, s, e, maxdeg)
        }
    };

    let mut kept = raw.coeffs().to_vec();
    let (mut total, mut dropped) = (0.0, 0.0);
    for (i, c) in kept.iter_mut().enumerate() {
        let mass = harmonic_dim_f64(d, i) * *c * *c;
        total += mass;
        if parity_vanishes(s, i) && *c != 0.0 {
            dropped += mass;
            *c = 0.0;
        }
    }
    let discarded_fraction = if total > 0.0 { dropped / total } else { 0.0 };
    if discarded_fraction > 0.0 {
        log::warn!(
            "zeroed density modes of parity {} removed {:.3e} of the L² mass",
            s.get() % 2,
            discarded_fraction
        );
    }
    let density = ZonalSpectrum::new(d, kept)?;
    let lambdas = funk_hecke_coeff(d, s, maxdeg)?;
    let spectrum = apply_funk_hecke(&lambdas, &density)?;
    let (lp_norm, lp_norm_drift) = lp_norm_of(d, p, profile, &raw)?;
    Ok(LpTypeTarget {
        d,
        s,
        p,
        profile: profile.clone(),
        density,
        spectrum,
        lambdas,
        lp_norm,
        lp_norm_drift,
        discarded_fraction,
    })
}

/// `ĥ_i = i^e / sqrt(N(d,i))` on admissible `1 ≤ i ≤ maxdeg`, zero elsewhere.
fn power_law_spectrum(d: SphereDim, s: ReluOrder, e: f64, maxdeg: usize) -> ZonalSpectrum {
    let coeffs = (0..=maxdeg)
        .map(|i| {
            if i == 0 || parity_vanishes(s, i) {
                0.0
            } else {
                (i as f64).powf(e) / harmonic_dim_f64(d, i).sqrt()
            }
        })
        .collect();
    ZonalSpectrum::new(d, coeffs).expect("finite coefficients")
}

fn lp_norm_of(d: SphereDim, p: f64, profile: &Profile, raw: &ZonalSpectrum) -> Result<(f64, f64)> {
    let sched = Adaptive { abs_tol: 1e-12, rel_tol: 1e-10, ..Adaptive::default() };
    let integral = match *profile {
        Profile::Constant { value } => return Ok((value.abs(), 0.0)),
        Profile::Gegenbauer { degree, scale } => {
            let a = d.weight_exponent();
            // |P_k|^p has kinks at the zeros of P_k, the Gauss nodes of its weight
            let zeros = if degree == 0 { vec![] } else { cached_rule(degree, a, a)?.nodes.clone() };
            let shape = ProfileShape::with_breakpoints(zeros);
            zonal_mean(d, &shape, &sched, |t| {
                let v = gegenbauer_eval(d, degree, t).unwrap_or(f64::NAN);
                (scale * v).abs().powf(p)
            })?
        }
        Profile::PolarCap { cos_radius } => {
            let shape = ProfileShape::with_breakpoints(vec![cos_radius]);
            zonal_mean(d, &shape, &sched, |t| if t >= cos_radius { 1.0 } else { 0.0 })?
        }
        Profile::PoleSingularity { exponent } => {
            let shape = ProfileShape { breakpoints: vec![], pole: exponent * p };
            zonal_mean(d, &shape, &sched, |_| 1.0).map_err(|e| {
                Error::Quadrature(format!("profile (1-t)^-{exponent} is not in L^{p}: {e}"))
            })?
        }
        Profile::SpectralPowerLaw { .. } | Profile::NearExtremal { .. } => {
            let j = (raw.max_degree() / 2).clamp(1, SYNTHESIS_CUTOFF);
            let fine = filtered_synthesis_lp(raw, p, j);
            let coarse = filtered_synthesis_lp(raw, p, (j / 2).max(1));
            let drift = if fine > 0.0 { (fine - coarse).abs() / fine } else { 0.0 };
            return Ok((fine, drift));
        }
    };
    Ok((integral.powf(1.0 / p), 0.0))
}

/// `‖Σ η(i/j) ĥ_i N(d,i) P_i‖_{L^p(τ_d)}` by composite Gauss–Legendre in the
/// polar angle, fine enough to resolve the pole scale `1/j`.
fn filtered_synthesis_lp(raw: &ZonalSpectrum, p: f64, j: usize) -> f64 {
    let d = raw.dim();
    let filtered = crate::sphere::filtered_approx(raw, j).expect("j >= 1");
    let top = (2 * j).min(raw.max_degree() + 1);
    let coeffs: Vec<f64> = (0..top).map(|i| filtered.coeff(i) * harmonic_dim_f64(d, i)).collect();
    let panels = 16 * top.max(8);
    let rule = gauss_legendre(8).expect("fixed order");
    let width = std::f64::consts::PI / panels as f64;
    let mut buf = vec![0.0; top];
    let mut acc = 0.0;
    for k in 0..panels {
        let lo = k as f64 * width;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let theta = lo + 0.5 * width * (1.0 + x);
            gegenbauer_all(d, theta.cos(), &mut buf);
            let h: f64 = coeffs.iter().zip(&buf).map(|(c, v)| c * v).sum();
            acc += 0.5 * width * w * theta.sin().powi(d.get() as i32 - 1) * h.abs().powf(p);
        }
    }
    (area_ratio(d) * acc).powf(1.0 / p)
}

impl LpTypeTarget {
    /// `f̃` on the sphere at `t = u·e`.
    pub fn eval_sphere(&self, t: f64) -> Result<f64> {
        self.spectrum.eval(t.clamp(-1.0, 1.0))
    }

    /// Ball function `(|x|²+1)^{s/2} f̃(u_x)` with the pole `e` at the last axis.
    pub fn eval_ball(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.d.get() {
            return Err(Error::DimensionMismatch { expected: self.d.get(), got: x.len() });
        }
        let g = |u: &[f64]| self.spectrum.eval(u[u.len() - 1].clamp(-1.0, 1.0)).unwrap_or(f64::NAN);
        Ok(reverse_map(g, self.s)(x))
    }

    /// `‖f̃‖_{L²(τ_d)}` over the stored modes.
    pub fn l2_norm(&self) -> f64 {
        crate::sphere::parseval_norm(&self.spectrum)
    }

    /// Unit sphere point whose last coordinate is `t`, for probing [`Self::eval_ball`].
    pub fn pole_axis_point(&self, x: &[f64]) -> Vec<f64> {
        sphere_point(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::parseval_norm;

    fn dim(d: usize) -> SphereDim {
        SphereDim::new(d).unwrap()
    }

    #[test]
    fn constant_profile() {
        for s in 0..3 {
            let t = make_lp_target(dim(2), ReluOrder(s), 1.5, &Profile::Constant { value: 1.0 }, 12)
                .unwrap();
            assert_eq!(t.spectrum.coeff(0), t.lambdas.lambdas()[0]);
            assert!(t.spectrum.coeffs()[1..].iter().all(|&c| c == 0.0));
            assert_eq!(t.lp_norm, 1.0);
            assert_eq!(t.discarded_fraction, 0.0);
        }
    }

    #[test]
    fn gegenbauer_profile_spectral_identity() {
        let d = dim(3);
        let s = ReluOrder(1);
        let k = 4;
        let t = make_lp_target(d, s, 2.0, &Profile::Gegenbauer { degree: k, scale: 1.0 }, 10).unwrap();
        let lk = t.lambdas.lambdas()[k];
        assert!((t.spectrum.coeff(k) - lk / harmonic_dim_f64(d, k)).abs() < 1e-15);
        // ‖f‖_{L²} = |λ_k| ‖h‖_{L²} = |λ_k| / sqrt(N)
        assert!((t.l2_norm() - lk.abs() / harmonic_dim_f64(d, k).sqrt()).abs() < 1e-14);
        // for p = 2 the norm is ‖P_k‖_{L²} = 1/sqrt(N)
        assert!((t.lp_norm - 1.0 / harmonic_dim_f64(d, k).sqrt()).abs() < 1e-9);
        // inadmissible mode is removed with full mass
        let t = make_lp_target(d, s, 1.0, &Profile::Gegenbauer { degree: 3, scale: 1.0 }, 10).unwrap();
        assert!((t.discarded_fraction - 1.0).abs() < 1e-15);
        assert!(t.spectrum.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn spectral_identity_for_every_profile() {
        let profiles = [
            Profile::PolarCap { cos_radius: 0.3 },
            Profile::PoleSingularity { exponent: 0.3 },
            Profile::NearExtremal { eps0: 0.05 },
        ];
        for profile in &profiles {
            let t = make_lp_target(dim(2), ReluOrder(1), 1.0, profile, 40).unwrap();
            for i in 0..=40 {
                let want = t.lambdas.lambdas()[i] * t.density.coeff(i);
                assert!((t.spectrum.coeff(i) - want).abs() <= 1e-10, "{profile:?} i={i}");
            }
            assert!(t.lp_norm.is_finite() && t.lp_norm > 0.0);
        }
    }

    #[test]
    fn cap_and_pole_norms() {
        let t = make_lp_target(dim(2), ReluOrder(1), 1.5, &Profile::PolarCap { cos_radius: 0.2 }, 8).unwrap();
        assert!((t.lp_norm - 0.4f64.powf(1.0 / 1.5)).abs() < 1e-12);
        // d = 2: (1/2)∫(1-t)^{-q} dt = 2^{-q}/(1-q)
        let (g, p) = (0.3, 1.5);
        let t = make_lp_target(dim(2), ReluOrder(1), p, &Profile::PoleSingularity { exponent: g }, 8)
            .unwrap();
        let q: f64 = g * p;
        assert!((t.lp_norm - (2f64.powf(-q) / (1.0 - q)).powf(1.0 / p)).abs() < 1e-10);
        // (1-t)^{-0.8} is not in L^{1.5} on S²
        let err = make_lp_target(dim(2), ReluOrder(1), 1.5, &Profile::PoleSingularity { exponent: 0.8 }, 8);
        assert!(matches!(err, Err(Error::Quadrature(_))));
        assert!(make_lp_target(dim(2), ReluOrder(1), 2.5, &Profile::Constant { value: 1.0 }, 4).is_err());
    }

    #[test]
    fn holder_monotone_in_p() {
        use crate::rng::task_rng;
        use rand::Rng;
        let mut rng = task_rng(2, 0);
        for _ in 0..5 {
            let c = rng.random_range(-0.9..0.9);
            let g = rng.random_range(0.05..0.3);
            for profile in [Profile::PolarCap { cos_radius: c }, Profile::PoleSingularity { exponent: g }] {
                let norms: Vec<f64> = [1.0, 1.25, 1.5, 1.75, 2.0]
                    .iter()
                    .map(|&p| make_lp_target(dim(3), ReluOrder(1), p, &profile, 4).unwrap().lp_norm)
                    .collect();
                for w in norms.windows(2) {
                    assert!(w[0] <= w[1] + 1e-12, "{profile:?}: {norms:?}");
                }
            }
        }
    }

    #[test]
    fn near_extremal_norm_is_stable_below_p_star() {
        for p in [1.0, 1.1] {
            let t = make_lp_target(dim(2), ReluOrder(1), p, &Profile::NearExtremal { eps0: 0.05 }, 512)
                .unwrap();
            assert!(t.lp_norm.is_finite());
            assert!(t.lp_norm_drift < 0.1, "p={p}: drift {}", t.lp_norm_drift);
            let want = (t.density.coeff(2) * harmonic_dim_f64(dim(2), 2).sqrt()).ln() / 2f64.ln();
            assert!((want - (zeta(2, p) - 0.05)).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_evaluation_matches_sphere_profile() {
        let t = make_lp_target(dim(2), ReluOrder(1), 2.0, &Profile::Gegenbauer { degree: 2, scale: 1.0 }, 4)
            .unwrap();
        let x = [0.3, -0.4];
        let u = t.pole_axis_point(&x);
        let want = (1.0f64 + 0.25).sqrt() * t.eval_sphere(u[2]).unwrap();
        assert!((t.eval_ball(&x).unwrap() - want).abs() < 1e-15);
        let l2 = t.lambdas.lambdas()[2];
        let direct = l2 * gegenbauer_eval(dim(2), 2, u[2]).unwrap();
        assert!((t.eval_sphere(u[2]).unwrap() - direct).abs() < 1e-14);
        assert!(parseval_norm(&t.density) > 0.0);
    }
}
