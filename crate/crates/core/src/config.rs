//! Run configuration: fan data, parameter source, tolerances, truncation and
//! loop specifications, read from a single JSON document.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::gamma::Truncation;
use crate::poly::{check_nondegenerate, ParameterPoint};

/// Where the parameter points come from.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ParameterSource {
    /// Seeded random points with moduli in `[0.5, 1.5]`.
    Random { count: usize },
    /// Explicit coefficients as `[re, im]` pairs.
    Explicit { x: Vec<[f64; 2]> },
    /// The Gamma-series basepoint recipe.
    Basepoint,
}

impl Default for ParameterSource {
    fn default() -> Self {
        ParameterSource::Random { count: 1 }
    }
}

/// Check tolerances. The defaults are the acceptance thresholds.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct Tolerances {
    /// `|⟨Φ^{γ_k},Ψ^{γ_l}⟩ - (nδ_{kl}-1)|` and `|⟨Φ⁰,Ψ^{λ₀}⟩ - n/2πi|`.
    pub pairing: f64,
    /// `|⟨Φ⁰,Ψ^{γ_l}⟩|`.
    pub pairing_zero: f64,
    /// Singular-value cutoff for the numerical rank.
    pub rank: f64,
    /// Pairing-entry spread along discriminant-avoiding paths.
    pub constancy: f64,
    /// Euler identities of residue solutions.
    pub euler_residue: f64,
    /// Euler identities of the line solution.
    pub euler_line: f64,
    /// Finite-difference check of `∂_j T(c) = T(c+v_j)`.
    pub derivative: f64,
    /// `Σ_k Ψ^{γ_k} = 0` entrywise, and the degree-positive entries of
    /// `Σ_k Φ^{γ_k}`.
    pub solution_relations: f64,
    /// Quadrature residues against the closed degree-one forms.
    pub residue_closed_form: f64,
    /// Relative deviation of `⟨Γ,Γ°⟩` from `-(n/4π²) χ_H⁻¹`.
    pub gamma_duality: f64,
    /// Gamma-series tail certificate.
    pub gamma_tail: f64,
    /// Chern-character relation residuals on the complex path.
    pub ch_relations: f64,
    /// Pairing-matrix deviation under loop continuation.
    pub monodromy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            pairing: 1e-6,
            pairing_zero: 1e-8,
            rank: 1e-6,
            constancy: 1e-6,
            euler_residue: 1e-9,
            euler_line: 1e-7,
            derivative: 1e-5,
            solution_relations: 1e-8,
            residue_closed_form: 1e-10,
            gamma_duality: 1e-3,
            gamma_tail: 1e-5,
            ch_relations: 1e-12,
            monodromy: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.pairing,
            self.pairing_zero,
            self.rank,
            self.constancy,
            self.euler_residue,
            self.euler_line,
            self.derivative,
            self.solution_relations,
            self.residue_closed_form,
            self.gamma_duality,
            self.gamma_tail,
            self.ch_relations,
            self.monodromy,
        ];
        if all.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::Config("all tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct TruncationConfig {
    pub l_max: i64,
    pub tail_ratio: f64,
    pub epsilon: f64,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        let t = Truncation::default();
        TruncationConfig { l_max: t.l_max, tail_ratio: t.tail_ratio, epsilon: t.epsilon }
    }
}

impl From<TruncationConfig> for Truncation {
    fn from(c: TruncationConfig) -> Truncation {
        Truncation { l_max: c.l_max, tail_ratio: c.tail_ratio, epsilon: c.epsilon }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum LoopKind {
    /// Full rotation of one coordinate around the origin.
    Circle,
    /// Small contractible loop `x_j (1 + r e^{iθ})`.
    Small,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct LoopSpec {
    pub coordinate: usize,
    pub kind: LoopKind,
    #[serde(default = "default_loop_radius")]
    pub radius: f64,
    #[serde(default = "default_loop_segments")]
    pub segments: usize,
}

fn default_loop_radius() -> f64 {
    0.25
}

fn default_loop_segments() -> usize {
    48
}

/// The single JSON configuration document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub n: i64,
    pub rays: Vec<i64>,
    #[serde(default)]
    pub parameters: ParameterSource,
    #[serde(default = "default_degree_bound")]
    pub degree_bound: i64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub truncation: TruncationConfig,
    #[serde(default)]
    pub loops: Vec<LoopSpec>,
    #[serde(default)]
    pub seed: u64,
    /// Default output path (the CLI `--out` flag overrides it).
    #[serde(default)]
    pub out: Option<String>,
}

fn default_degree_bound() -> i64 {
    3
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fan = self.fan()?;
        self.tolerances.validate()?;
        if self.degree_bound < 2 {
            return Err(Error::Config("degree_bound must be at least 2".into()));
        }
        if self.truncation.l_max < self.degree_bound + 2 {
            return Err(Error::Config("l_max must be at least degree_bound + 2".into()));
        }
        if !(self.truncation.epsilon > 0.0 && self.truncation.epsilon <= 0.1) {
            return Err(Error::Config("epsilon must lie in (0, 0.1]".into()));
        }
        if let ParameterSource::Explicit { x } = &self.parameters {
            if x.len() != self.n as usize + 1 {
                return Err(Error::Config(format!(
                    "explicit x must have n+1 = {} entries, got {}",
                    self.n + 1,
                    x.len()
                )));
            }
        }
        for spec in &self.loops {
            if spec.coordinate > fan.n() as usize {
                return Err(Error::Config(format!(
                    "loop coordinate {} out of range 0..={}",
                    spec.coordinate,
                    fan.n()
                )));
            }
        }
        Ok(())
    }

    pub fn fan(&self) -> Result<Fan> {
        Fan::new(self.n, self.rays.clone())
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation.into()
    }

    /// The parameter points selected by the config. Random draws are retried
    /// (bounded) until nondegenerate.
    pub fn parameter_points(&self, seed: u64) -> Result<Vec<ParameterPoint<f64>>> {
        match &self.parameters {
            ParameterSource::Explicit { x } => {
                let p = ParameterPoint::new(
                    x.iter().map(|[re, im]| Complex::new(*re, *im)).collect(),
                );
                Ok(vec![p])
            }
            ParameterSource::Random { count } => {
                (0..*count).map(|k| random_point(self.n as usize, seed.wrapping_add(k as u64))).collect()
            }
            ParameterSource::Basepoint => {
                let fan = self.fan()?;
                Ok(vec![crate::gamma::choose_basepoint(&fan, self.truncation.epsilon, seed)?])
            }
        }
    }

    /// FNV-1a digest of the canonical JSON, for report provenance.
    pub fn digest(&self, seed: u64) -> String {
        let text = serde_json::to_string(self).unwrap_or_default();
        let mut h: u64 = 0xcbf29ce484222325;
        for b in text.bytes().chain(seed.to_le_bytes()) {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

/// Seeded random nondegenerate point with moduli in `[0.5, 1.5]`.
pub fn random_point(n: usize, seed: u64) -> Result<ParameterPoint<f64>> {
    for attempt in 0..16 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt * 0x9e3779b9));
        let x = (0..=n)
            .map(|_| {
                Complex::from_polar(
                    rng.gen_range(0.5..1.5),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        let p = ParameterPoint::new(x);
        if check_nondegenerate(&p, 1e-8) {
            return Ok(p);
        }
    }
    Err(Error::Degenerate(format!("no nondegenerate random point for n = {n}")))
}
