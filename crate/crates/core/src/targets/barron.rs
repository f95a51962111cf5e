//! Finite atom mixtures as Barron-space targets.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{Neuron, ReluOrder, ShallowNet};
use crate::rng::{l1_sphere, task_rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarronTarget {
    pub net: ShallowNet,
    /// Path norm of `net`, an upper bound on the Barron norm.
    pub barron_norm_bound: f64,
}

impl BarronTarget {
    pub fn from_net(net: ShallowNet) -> Self {
        let barron_norm_bound = net.path_norm();
        BarronTarget { net, barron_norm_bound }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.net.eval(x)
    }
}

/// `atoms` neurons with `w` uniform on the unit ℓ1 sphere, `b ~ U[-1,1]` and
/// Gaussian `a` rescaled to unit path norm.
pub fn make_barron_target(d: usize, s: ReluOrder, atoms: usize, seed: u64) -> Result<BarronTarget> {
    if atoms == 0 {
        return Err(Error::InvalidParameter("atoms must be >= 1".into()));
    }
    let mut rng = task_rng(seed, 0);
    let mut neurons: Vec<Neuron> = (0..atoms)
        .map(|_| {
            let w = l1_sphere(&mut rng, d);
            let b = rng.random_range(-1.0..=1.0);
            let a: f64 = StandardNormal.sample(&mut rng);
            Neuron::new(a, w, b)
        })
        .collect();
    let norm = ShallowNet::new(s, d, neurons.clone())?.path_norm();
    if norm > 0.0 {
        for n in &mut neurons {
            n.a /= norm;
        }
    }
    Ok(BarronTarget::from_net(ShallowNet::new(s, d, neurons)?))
}
