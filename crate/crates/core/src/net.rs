//! Shallow ReLU^s networks `f(x) = (1/m) Σ_j a_j σ_s(w_j·x + b_j)`.
//!
//! Networks are immutable values. Evaluation, the ℓ1 path norm, the
//! homogeneity normalization and closed-form parameter gradients live here;
//! the optimizer in [`crate::learner`] works on its own flat copy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Format tag written into every serialized network.
pub const NET_FORMAT: &str = "relus-net-v1";

/// Exponent `s` of the activation `σ_s(t) = max(0, t)^s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReluOrder(pub u32);

impl ReluOrder {
    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_i32(self) -> i32 {
        self.0 as i32
    }
}

/// `σ_s(t)`. For `s = 0` this is the right-continuous Heaviside step,
/// so `σ_0(0) = 1`; for `s >= 1`, `σ_s(0) = 0`.
#[inline]
pub fn activate(s: ReluOrder, t: f64) -> f64 {
    match s.0 {
        0 => {
            if t >= 0.0 {
                1.0
            } else {
                0.0
            }
        }
        1 => t.max(0.0),
        2 => {
            let u = t.max(0.0);
            u * u
        }
        k => t.max(0.0).powi(k as i32),
    }
}

/// `σ_s'(t) = s σ_{s-1}(t)`; at the kink of `s = 1` the right derivative (1) is used.
#[inline]
fn activate_derivative(s: ReluOrder, t: f64) -> f64 {
    debug_assert!(s.0 >= 1);
    s.0 as f64 * activate(ReluOrder(s.0 - 1), t)
}

/// A single neuron `a σ_s(w·x + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neuron {
    pub a: f64,
    pub w: Vec<f64>,
    pub b: f64,
}

impl Neuron {
    pub fn new(a: f64, w: Vec<f64>, b: f64) -> Self {
        Neuron { a, w, b }
    }

    /// Pre-activation `w·x + b`.
    #[inline]
    pub fn preactivation(&self, x: &[f64]) -> f64 {
        self.w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + self.b
    }

    /// `‖w‖₁ + |b|`.
    pub fn l1_scale(&self) -> f64 {
        self.w.iter().map(|w| w.abs()).sum::<f64>() + self.b.abs()
    }

    /// `‖w‖₂ + |b|`.
    pub fn l2_scale(&self) -> f64 {
        self.w.iter().map(|w| w * w).sum::<f64>().sqrt() + self.b.abs()
    }

    fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.w.iter().all(|w| w.is_finite())
    }
}

/// Clamp level `B` of the truncation `π_B t = max(-B, min(t, B))`.
///
/// `B = +∞` is accepted and means "no truncation".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TruncationLevel(f64);

impl TruncationLevel {
    pub fn new(b: f64) -> Result<Self> {
        if b > 0.0 && !b.is_nan() {
            Ok(TruncationLevel(b))
        } else {
            Err(Error::InvalidParameter(format!("truncation level must be > 0, got {b}")))
        }
    }

    pub const fn infinite() -> Self {
        TruncationLevel(f64::INFINITY)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// `π_B y`.
#[inline]
pub fn truncate(level: TruncationLevel, y: f64) -> f64 {
    y.clamp(-level.0, level.0)
}

/// Width-`m` network with ReLU^s activations and averaged outer weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ShallowNet {
    s: ReluOrder,
    d: usize,
    neurons: Vec<Neuron>,
}

/// Closed-form gradient of `eval(net, x)` with respect to every parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct NetGradient {
    pub a: Vec<f64>,
    pub w: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl ShallowNet {
    pub fn new(s: ReluOrder, d: usize, neurons: Vec<Neuron>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("input dimension must be >= 1".into()));
        }
        if neurons.is_empty() {
            return Err(Error::InvalidParameter("a network needs at least one neuron".into()));
        }
        for n in &neurons {
            if n.w.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: n.w.len() });
            }
            if !n.is_finite() {
                return Err(Error::InvalidParameter("neuron parameters must be finite".into()));
            }
        }
        Ok(ShallowNet { s, d, neurons })
    }

    pub fn order(&self) -> ReluOrder {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn width(&self) -> usize {
        self.neurons.len()
    }

    pub fn neurons(&self) -> &[Neuron] {
        &self.neurons
    }

    pub fn into_neurons(self) -> Vec<Neuron> {
        self.neurons
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: x.len() });
        }
        Ok(())
    }

    /// Unchecked evaluation; `x.len()` must equal the input dimension.
    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let total: f64 = self
            .neurons
            .iter()
            .map(|n| n.a * activate(self.s, n.preactivation(x)))
            .sum();
        total / self.neurons.len() as f64
    }

    /// `(1/m) Σ_j a_j σ_s(w_j·x + b_j)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        Ok(self.eval_unchecked(x))
    }

    /// Elementwise [`ShallowNet::eval`], order preserved.
    pub fn eval_batch<X: AsRef<[f64]>>(&self, xs: &[X]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.eval(x.as_ref())).collect()
    }

    /// `(1/m) Σ_j |a_j| (‖w_j‖₁ + |b_j|)^s`; the weight factor is 1 when `s = 0`.
    pub fn path_norm(&self) -> f64 {
        let s = self.s.as_i32();
        let total: f64 = self
            .neurons
            .iter()
            .map(|n| if s == 0 { n.a.abs() } else { n.a.abs() * n.l1_scale().powi(s) })
            .sum();
        total / self.neurons.len() as f64
    }

    /// Euclidean variant `(1/m) Σ_j |a_j| (‖w_j‖₂ + |b_j|)^s`.
    ///
    /// Always satisfies `path_norm <= d^{s/2} · path_norm_l2`.
    pub fn path_norm_l2(&self) -> f64 {
        let s = self.s.as_i32();
        let total: f64 = self
            .neurons
            .iter()
            .map(|n| if s == 0 { n.a.abs() } else { n.a.abs() * n.l2_scale().powi(s) })
            .sum();
        total / self.neurons.len() as f64
    }

    /// Rescale every nonzero neuron so that `‖w_j‖₁ + |b_j| = 1`, moving the
    /// factor `(‖w_j‖₁ + |b_j|)^s` into `a_j`. Zero neurons are left untouched.
    pub fn normalize(&self) -> Result<ShallowNet> {
        if self.s.0 == 0 {
            return Err(Error::ZeroOrder { what: "normalization" });
        }
        let s = self.s.as_i32();
        let neurons = self
            .neurons
            .iter()
            .map(|n| {
                let scale = n.l1_scale();
                if scale == 0.0 || scale == 1.0 {
                    return n.clone();
                }
                Neuron {
                    a: n.a * scale.powi(s),
                    w: n.w.iter().map(|w| w / scale).collect(),
                    b: n.b / scale,
                }
            })
            .collect();
        Ok(ShallowNet { s: self.s, d: self.d, neurons })
    }

    /// Gradient of `eval(net, x)` with respect to `(a_j, w_j, b_j)`.
    pub fn grad_params(&self, x: &[f64]) -> Result<NetGradient> {
        if self.s.0 == 0 {
            return Err(Error::ZeroOrder { what: "parameter gradient" });
        }
        self.check_input(x)?;
        let inv_m = 1.0 / self.neurons.len() as f64;
        let mut grad = NetGradient {
            a: Vec::with_capacity(self.width()),
            w: Vec::with_capacity(self.width()),
            b: Vec::with_capacity(self.width()),
        };
        for n in &self.neurons {
            let z = n.preactivation(x);
            grad.a.push(activate(self.s, z) * inv_m);
            let inner = n.a * inv_m * activate_derivative(self.s, z);
            grad.w.push(x.iter().map(|xi| inner * xi).collect());
            grad.b.push(inner);
        }
        Ok(grad)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&NetWire::from(self)).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: NetWire = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        wire.try_into()
    }
}

/// Upper bound `2^s d^{s/2}` on `(‖w‖₁ + |b|)^s` for neurons with a unit
/// Euclidean inner weight `w ∈ S^{d-1}` and bias `|b| <= √d`.
pub fn euclidean_to_l1_factor(d: usize, s: ReluOrder) -> f64 {
    2f64.powi(s.as_i32()) * (d as f64).powf(s.0 as f64 / 2.0)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetWire {
    fmt: String,
    s: u32,
    d: usize,
    m: usize,
    neurons: Vec<Neuron>,
}

impl From<&ShallowNet> for NetWire {
    fn from(net: &ShallowNet) -> Self {
        NetWire {
            fmt: NET_FORMAT.to_string(),
            s: net.s.0,
            d: net.d,
            m: net.width(),
            neurons: net.neurons.clone(),
        }
    }
}

impl TryFrom<NetWire> for ShallowNet {
    type Error = Error;

    fn try_from(wire: NetWire) -> Result<Self> {
        if wire.fmt != NET_FORMAT {
            return Err(Error::Format(format!("unknown network format {:?}", wire.fmt)));
        }
        if wire.m != wire.neurons.len() {
            return Err(Error::Format(format!(
                "declared width {} but {} neurons present",
                wire.m,
                wire.neurons.len()
            )));
        }
        ShallowNet::new(ReluOrder(wire.s), wire.d, wire.neurons)
    }
}

impl Serialize for ShallowNet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        NetWire::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ShallowNet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = NetWire::deserialize(deserializer)?;
        ShallowNet::try_from(wire).map_err(serde::de::Error::custom)
    }
}
