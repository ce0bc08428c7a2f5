//! Instance configuration shared by the CLI and the verification suites.

use crate::coxeter::Label;
use crate::error::{CoxError, Result};
use serde::Serialize;

/// A configured problem instance: the Coxeter labels, the generator order
/// fixing the Coxeter element w = abc, enumeration caps, float precision for
/// export, and the seed used by sampled suites.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceConfig {
    pub labels: [Label; 3],
    /// Permutation of (a, b, c) applied to the generator roles; the Coxeter
    /// element is always the product of the three generators in order.
    pub generator_order: [usize; 3],
    pub ball_radius_cap: u32,
    pub window_cap: u32,
    pub float_digits: u32,
    pub seed: u64,
}

impl InstanceConfig {
    pub fn new(m_ab: Label, m_bc: Label, m_ac: Label) -> InstanceConfig {
        InstanceConfig {
            labels: [m_ab, m_bc, m_ac],
            generator_order: [0, 1, 2],
            ball_radius_cap: 14,
            window_cap: 8,
            float_digits: 9,
            seed: 1,
        }
    }

    pub fn from_triple(triple: (u32, u32, u32)) -> InstanceConfig {
        let f = |m: u32| {
            if m == 0 {
                Label::Infinity
            } else {
                Label::Finite(m)
            }
        };
        InstanceConfig::new(f(triple.0), f(triple.1), f(triple.2))
    }

    /// Parse "3,3,4" or "2,3,inf" into a config.
    pub fn parse_labels(s: &str) -> Result<InstanceConfig> {
        let parts: Vec<&str> = s.split(',').map(|p| p.trim()).collect();
        if parts.len() != 3 {
            return Err(CoxError::InvalidLabel(s.to_string()));
        }
        let mut labels = [Label::Finite(2); 3];
        for (i, p) in parts.iter().enumerate() {
            labels[i] = Label::parse(p)?;
        }
        Ok(InstanceConfig::new(labels[0], labels[1], labels[2]))
    }

    pub fn labels_string(&self) -> String {
        let fmt = |l: &Label| match l {
            Label::Finite(m) => m.to_string(),
            Label::Infinity => "inf".to_string(),
        };
        format!(
            "{},{},{}",
            fmt(&self.labels[0]),
            fmt(&self.labels[1]),
            fmt(&self.labels[2])
        )
    }
}
