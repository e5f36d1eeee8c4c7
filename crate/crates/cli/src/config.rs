//! JSON configuration: parsing, defaults, command-line overrides and
//! resolution into the core types.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex;
use reflectlab_core::rk::{default_minus_params, default_plus_params};
use reflectlab_core::transfer::{ChainConfig, Tolerances};
use reflectlab_core::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// A complex number as `[re, im]`.
pub type Pair = [f64; 2];

pub fn to_c(p: Pair) -> C64 {
    Complex::new(p[0], p[1])
}

pub fn to_pair(c: C64) -> Pair {
    [c.re, c.im]
}

/// Family parameters `(θ, κ, ξ)` of a boundary K-matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KParams {
    pub theta: Pair,
    pub kappa: Pair,
    /// `⌊n/2⌋` entries; `null` selects the defaults for the configured `n`.
    #[serde(default)]
    pub xi: Option<Vec<Pair>>,
}

/// Pass thresholds on relative residuals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TolerancesFile {
    pub inverse_free: f64,
    pub with_inverse: f64,
    pub ybe: f64,
    pub reflection: f64,
    pub commute_periodic: f64,
    pub commute_boundary: f64,
    pub flatness: f64,
    pub interpolation: f64,
    pub special_value: f64,
    pub special_scalar: f64,
    pub sector_scalar: f64,
    pub off_block: f64,
    pub degree: f64,
    pub endgame: f64,
    pub identities: f64,
    pub negative_control: f64,
}

impl Default for TolerancesFile {
    fn default() -> Self {
        Tolerances::default().into()
    }
}

impl From<Tolerances> for TolerancesFile {
    fn from(t: Tolerances) -> Self {
        Self {
            inverse_free: t.inverse_free,
            with_inverse: t.with_inverse,
            ybe: t.ybe,
            reflection: t.reflection,
            commute_periodic: t.commute_periodic,
            commute_boundary: t.commute_boundary,
            flatness: t.flatness,
            interpolation: t.interpolation,
            special_value: t.special_value,
            special_scalar: t.special_scalar,
            sector_scalar: t.sector_scalar,
            off_block: t.off_block,
            degree: t.degree,
            endgame: t.endgame,
            identities: t.identities,
            negative_control: t.negative_control,
        }
    }
}

impl From<TolerancesFile> for Tolerances {
    fn from(t: TolerancesFile) -> Self {
        Self {
            inverse_free: t.inverse_free,
            with_inverse: t.with_inverse,
            ybe: t.ybe,
            reflection: t.reflection,
            commute_periodic: t.commute_periodic,
            commute_boundary: t.commute_boundary,
            flatness: t.flatness,
            interpolation: t.interpolation,
            special_value: t.special_value,
            special_scalar: t.special_scalar,
            sector_scalar: t.sector_scalar,
            off_block: t.off_block,
            degree: t.degree,
            endgame: t.endgame,
            identities: t.identities,
            negative_control: t.negative_control,
        }
    }
}

/// Contents of a configuration file. Every field is optional; missing ones
/// take the defaults printed by `--print-default-config`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sqrt_p: Option<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_plus: Option<KParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_minus: Option<KParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<TolerancesFile>,
    /// Free-form documentation; ignored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<BTreeMap<String, String>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Overrides coming from command-line flags.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub sites: Option<usize>,
    pub q: Option<Pair>,
    pub sqrt_p: Option<Pair>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    /// Replaces every pass threshold except the negative-control minimum.
    pub tol: Option<f64>,
}

/// Fully resolved run settings.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub chain: ChainConfig<f64>,
    pub k_plus: (C64, C64, Vec<C64>),
    pub k_minus: (C64, C64, Vec<C64>),
    /// Overrides the per-suite default number of random trials.
    pub trials: Option<usize>,
}

pub const DEFAULT_N: usize = 2;
pub const DEFAULT_SITES: usize = 3;

fn resolve_k(given: Option<&KParams>, default: (C64, C64, Vec<C64>)) -> (C64, C64, Vec<C64>) {
    match given {
        None => default,
        Some(k) => (
            to_c(k.theta),
            to_c(k.kappa),
            k.xi.as_ref()
                .map(|v| v.iter().copied().map(to_c).collect())
                .unwrap_or(default.2),
        ),
    }
}

impl Settings {
    pub fn defaults(n: usize, sites: usize) -> Self {
        Self::resolve(
            &FileConfig::default(),
            &Overrides {
                n: Some(n),
                sites: Some(sites),
                ..Overrides::default()
            },
        )
        .expect("defaults always resolve")
    }

    /// Defaults, then the file, then the flags.
    pub fn resolve(file: &FileConfig, flags: &Overrides) -> Result<Self, CliError> {
        let n = flags.n.or(file.n).unwrap_or(DEFAULT_N);
        let sites = flags.sites.or(file.sites).unwrap_or(DEFAULT_SITES);
        if n < 2 {
            return Err(CliError::Config(format!("n must be at least 2, got {n}")));
        }
        let mut chain = ChainConfig::<f64>::with_defaults(n, sites);
        if let Some(q) = flags.q.or(file.q) {
            chain.q = to_c(q);
        }
        if let Some(z) = &file.z {
            chain.z = z.iter().copied().map(to_c).collect();
        }
        if let Some(d) = &file.twist {
            chain.twist = d.iter().copied().map(to_c).collect();
        }
        if let Some(sp) = flags.sqrt_p.or(file.sqrt_p) {
            chain.sqrt_p = to_c(sp);
        }
        chain.seed = flags.seed.or(file.seed).unwrap_or(chain.seed);
        let mut tol = file.tolerances.unwrap_or_default();
        if let Some(t) = flags.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!("--tol must be positive, got {t}")));
            }
            let keep = tol.negative_control;
            tol = TolerancesFile {
                inverse_free: t,
                with_inverse: t,
                ybe: t,
                reflection: t,
                commute_periodic: t,
                commute_boundary: t,
                flatness: t,
                interpolation: t,
                special_value: t,
                special_scalar: t,
                sector_scalar: t,
                off_block: t,
                degree: t,
                endgame: t,
                identities: t,
                negative_control: keep,
            };
        }
        chain.tolerances = tol.into();
        let trials = flags.trials.or(file.trials);
        if trials == Some(0) {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        Ok(Self {
            k_plus: resolve_k(file.k_plus.as_ref(), default_plus_params(n)),
            k_minus: resolve_k(file.k_minus.as_ref(), default_minus_params(n)),
            chain,
            trials,
        })
    }

    /// The resolved settings written back as a complete configuration file.
    pub fn to_file(&self) -> FileConfig {
        let k = |(t, k, xi): &(C64, C64, Vec<C64>)| KParams {
            theta: to_pair(*t),
            kappa: to_pair(*k),
            xi: Some(xi.iter().copied().map(to_pair).collect()),
        };
        FileConfig {
            n: Some(self.chain.n),
            sites: Some(self.chain.sites),
            q: Some(to_pair(self.chain.q)),
            z: Some(self.chain.z.iter().copied().map(to_pair).collect()),
            twist: Some(self.chain.twist.iter().copied().map(to_pair).collect()),
            sqrt_p: Some(to_pair(self.chain.sqrt_p)),
            seed: Some(self.chain.seed),
            trials: self.trials,
            k_plus: Some(k(&self.k_plus)),
            k_minus: Some(k(&self.k_minus)),
            tolerances: Some(self.chain.tolerances.into()),
            notes: None,
        }
    }

    /// SHA-256 of the canonical JSON of the resolved configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(&self.to_file()).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// The default configuration with inline field documentation.
pub fn default_config_json() -> String {
    let mut file = Settings::defaults(DEFAULT_N, DEFAULT_SITES).to_file();
    let notes: BTreeMap<String, String> = [
        ("n", "local dimension, at least 2"),
        (
            "N",
            "number of sites; dense operators have n^(N+1) rows, capped at 2^20 entries",
        ),
        (
            "q",
            "deformation parameter [re, im]; must not be a root of unity of low order",
        ),
        (
            "z",
            "inhomogeneities z_1..z_N; defaults to (0.8 + 0.25k) e^(0.3ik)",
        ),
        (
            "twist",
            "diagonal of the periodic twist D; entries must be nonzero",
        ),
        (
            "sqrt_p",
            "square root of the shift p; fixes the branch used in K+(p^(1/2) z_i)",
        ),
        (
            "seed",
            "base seed; each suite draws from ChaCha8 seeded with seed XOR fnv1a64(suite name)",
        ),
        (
            "trials",
            "random trials per suite; null keeps the per-suite defaults",
        ),
        (
            "k_plus",
            "family parameters (theta, kappa, xi) of K+; xi has floor(n/2) entries",
        ),
        (
            "k_minus",
            "family parameters (theta, kappa, xi) of the family conjugated into K-",
        ),
        (
            "tolerances",
            "pass thresholds on relative residuals; negative_control is a lower bound",
        ),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect();
    file.notes = Some(notes);
    serde_json::to_string_pretty(&file).expect("config serializes")
}
