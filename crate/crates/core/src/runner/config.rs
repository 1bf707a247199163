use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coin::{build_harper, load_coin, sample_cue, CoinUnitary, HarperParams};
use crate::error::{Error, Result};
use crate::walk::WalkConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinKind {
    Harper,
    Cue,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoinSpec {
    #[serde(rename = "type")]
    pub kind: CoinKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl CoinSpec {
    pub fn harper(m: usize, g: f64) -> Self {
        CoinSpec { kind: CoinKind::Harper, m: Some(m), g: Some(g), tau: Some(1.0), seed: None, path: None }
    }

    pub fn cue(m: usize, seed: u64) -> Self {
        CoinSpec { kind: CoinKind::Cue, m: Some(m), g: None, tau: None, seed: Some(seed), path: None }
    }

    fn validate(&self, key: &str, needs_dim: bool) -> Result<()> {
        let field = |name: &str| format!("{key}.{name}");
        let forbid = |present: bool, name: &str| -> Result<()> {
            if present {
                Err(invalid(&field(name), format!("not used by coin type {:?}", self.kind)))
            } else {
                Ok(())
            }
        };
        let require = |present: bool, name: &str| -> Result<()> {
            if present {
                Ok(())
            } else {
                Err(invalid(&field(name), "missing".into()))
            }
        };
        match self.kind {
            CoinKind::Harper => {
                require(self.g.is_some(), "g")?;
                if needs_dim {
                    require(self.m.is_some(), "m")?;
                }
                forbid(self.seed.is_some(), "seed")?;
                forbid(self.path.is_some(), "path")?;
                HarperParams::new(self.g.unwrap_or(0.0), self.tau.unwrap_or(1.0))
                    .map_err(|e| invalid(&field("g"), e.to_string()))?;
            }
            CoinKind::Cue => {
                require(self.m.is_some(), "m")?;
                require(self.seed.is_some(), "seed")?;
                forbid(self.g.is_some(), "g")?;
                forbid(self.tau.is_some(), "tau")?;
                forbid(self.path.is_some(), "path")?;
            }
            CoinKind::Custom => {
                require(self.path.is_some(), "path")?;
                forbid(self.g.is_some(), "g")?;
                forbid(self.tau.is_some(), "tau")?;
                forbid(self.seed.is_some(), "seed")?;
            }
        }
        if let Some(m) = self.m {
            if m == 0 || m % 2 == 1 {
                return Err(invalid(&field("m"), format!("coin dimension must be even and positive, got {m}")));
            }
        }
        Ok(())
    }

    pub(crate) fn harper_params(&self) -> Result<HarperParams> {
        HarperParams::new(self.g.unwrap_or(0.0), self.tau.unwrap_or(1.0))
    }

    /// Builds the coin. Custom paths are resolved against `base`.
    pub fn build(&self, base: &Path) -> Result<CoinUnitary> {
        match self.kind {
            CoinKind::Harper => build_harper(self.m.unwrap_or(0), self.harper_params()?),
            CoinKind::Cue => sample_cue(self.m.unwrap_or(0), self.seed.unwrap_or(0)),
            CoinKind::Custom => {
                let path = self.path.as_deref().unwrap_or(Path::new(""));
                let coin = load_coin(base.join(path))?;
                match self.m {
                    Some(m) if m != coin.dim() => {
                        Err(invalid("coin.m", format!("file holds a {}-dimensional coin, config says {m}", coin.dim())))
                    }
                    _ => Ok(coin),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub n: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub coin_index: usize,
    pub site: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub t_max: usize,
    #[serde(default = "one")]
    pub sample_every: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default = "all_formats")]
    pub formats: Vec<Format>,
}

fn all_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: None, formats: all_formats() }
    }
}

impl OutputSpec {
    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Position distribution at sampled times and the variance at every step.
    Walk {},
    /// Orbits of the classical map; the coin table supplies `g` and `tau`.
    Portrait {
        n_orbits: usize,
        n_steps: usize,
        seed: u64,
        #[serde(default = "default_cells")]
        cells: usize,
    },
    /// Echo amplitudes `f[0][Δ]` at sampled times.
    Fidelity { deltas: Vec<i64> },
    /// Entanglement entropy of both subsystems and the classical Shannon entropy.
    Entropy {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        saturation_window: Option<[usize; 2]>,
    },
    /// Pooled spectra of the smaller subsystem's reduced density matrix.
    Spectra { window: [usize; 2] },
    /// Diffusive time of CUE walks with `N = M + n_offset`.
    TdSweep { m_values: Vec<usize>, n_offset: usize, seeds: Vec<u64> },
    /// Exact classical walker on the ring.
    Classical {},
    /// A named figure preset.
    Figure { name: String },
}

fn default_cells() -> usize {
    50
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Walk {} => "walk",
            Experiment::Portrait { .. } => "portrait",
            Experiment::Fidelity { .. } => "fidelity",
            Experiment::Entropy { .. } => "entropy",
            Experiment::Spectra { .. } => "spectra",
            Experiment::TdSweep { .. } => "td_sweep",
            Experiment::Classical {} => "classical",
            Experiment::Figure { .. } => "figure",
        }
    }

    fn uses_quantum_walk(&self) -> bool {
        matches!(
            self,
            Experiment::Walk {} | Experiment::Fidelity { .. } | Experiment::Entropy { .. } | Experiment::Spectra { .. }
        )
    }
}

/// Overrides applied on top of the base config; each variant runs in its own
/// subdirectory named after it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coin: Option<CoinSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_orbits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_steps: Option<usize>,
}

impl Variant {
    pub fn named(name: impl Into<String>) -> Self {
        Variant { name: name.into(), coin: None, g: None, m: None, n: None, seed: None, n_orbits: None, n_steps: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coin: Option<CoinSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunSpec>,
    #[serde(default)]
    pub outputs: OutputSpec,
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variants: Vec<Variant>,
}

fn coin_field<'a>(c: &'a mut ExperimentConfig, key: &str) -> Result<&'a mut CoinSpec> {
    c.coin.as_mut().ok_or_else(|| invalid(key, "no coin table to override".into()))
}

fn invalid(path: &str, message: String) -> Error {
    Error::InvalidConfig { path: path.to_string(), message }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let path = e.span().map(|span| key_at(text, span.start)).unwrap_or_default();
            invalid(&path, message)
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks cross-field consistency, including every variant.
    pub fn validate(&self) -> Result<()> {
        for (i, fmt) in self.outputs.formats.iter().enumerate() {
            if self.outputs.formats[..i].contains(fmt) {
                return Err(invalid("outputs.formats", format!("{fmt:?} listed twice")));
            }
        }
        if let Experiment::Figure { name } = &self.experiment {
            super::presets::figure_preset(name)?;
            for (present, key) in [
                (self.coin.is_some(), "coin"),
                (self.lattice.is_some(), "lattice"),
                (self.initial.is_some(), "initial"),
                (self.run.is_some(), "run"),
                (!self.variants.is_empty(), "variants"),
            ] {
                if present {
                    return Err(invalid(key, "figure presets define their own parameters".into()));
                }
            }
            return Ok(());
        }
        let mut seen = Vec::new();
        for (i, v) in self.variants.iter().enumerate() {
            let key = format!("variants[{i}].name");
            if v.name.is_empty() || v.name.contains(['/', '\\']) || v.name.starts_with('.') {
                return Err(invalid(&key, format!("`{}` is not a valid directory name", v.name)));
            }
            if seen.contains(&&v.name) {
                return Err(invalid(&key, format!("duplicate variant `{}`", v.name)));
            }
            seen.push(&v.name);
            self.apply(v).and_then(|c| c.validate_single()).map_err(|e| match e {
                Error::InvalidConfig { path, message } => invalid(&format!("variants[{i}] -> {path}"), message),
                other => other,
            })?;
        }
        self.validate_single()
    }

    fn validate_single(&self) -> Result<()> {
        let kind = self.experiment.kind();
        let absent = |present: bool, key: &str| -> Result<()> {
            if present {
                Err(invalid(key, format!("not used by experiment kind `{kind}`")))
            } else {
                Ok(())
            }
        };
        let run = || self.run.as_ref().ok_or_else(|| invalid("run", "missing".into()));
        match &self.experiment {
            Experiment::Portrait { n_orbits, n_steps, cells, .. } => {
                let coin = self.coin.as_ref().ok_or_else(|| invalid("coin", "missing".into()))?;
                if coin.kind != CoinKind::Harper {
                    return Err(invalid("coin.type", "portraits need the harper map".into()));
                }
                absent(coin.m.is_some(), "coin.m")?;
                coin.validate("coin", false)?;
                absent(self.lattice.is_some(), "lattice")?;
                absent(self.initial.is_some(), "initial")?;
                absent(self.run.is_some(), "run")?;
                if *n_orbits == 0 || *n_steps == 0 || *cells == 0 {
                    return Err(invalid("experiment", "n_orbits, n_steps and cells must be positive".into()));
                }
            }
            Experiment::TdSweep { m_values, seeds, .. } => {
                absent(self.coin.is_some(), "coin")?;
                absent(self.lattice.is_some(), "lattice")?;
                absent(self.initial.is_some(), "initial")?;
                run()?;
                if m_values.is_empty() || seeds.is_empty() {
                    return Err(invalid("experiment", "m_values and seeds must be non-empty".into()));
                }
                if let Some(m) = m_values.iter().find(|&&m| m == 0 || m % 2 == 1) {
                    return Err(invalid("experiment.m_values", format!("coin dimension must be even, got {m}")));
                }
            }
            Experiment::Classical {} => {
                absent(self.coin.is_some(), "coin")?;
                absent(self.initial.is_some(), "initial")?;
                self.lattice_n()?;
                run()?;
            }
            Experiment::Figure { .. } => return Err(invalid("experiment.kind", "figure presets cannot nest".into())),
            _ => {
                let coin = self.coin.as_ref().ok_or_else(|| invalid("coin", "missing".into()))?;
                coin.validate("coin", true)?;
                let n = self.lattice_n()?;
                run()?;
                let m = coin.m;
                let init = self.initial.clone().unwrap_or_default();
                if let Some(m) = m {
                    if init.coin_index >= m {
                        return Err(invalid("initial.coin_index", format!("must be below m = {m}")));
                    }
                }
                if init.site >= n {
                    return Err(invalid("initial.site", format!("must be below n = {n}")));
                }
            }
        }
        if let Some(r) = &self.run {
            if r.sample_every == 0 {
                return Err(invalid("run.sample_every", "must be positive".into()));
            }
        }
        match &self.experiment {
            Experiment::Spectra { window: [a, b] } => {
                let t_max = run()?.t_max;
                if a > b || *b > t_max {
                    return Err(invalid("experiment.window", format!("[{a}, {b}] must lie inside [0, {t_max}]")));
                }
            }
            Experiment::Entropy { saturation_window: Some([a, b]) } => {
                let t_max = run()?.t_max;
                if a > b || *b > t_max {
                    return Err(invalid(
                        "experiment.saturation_window",
                        format!("[{a}, {b}] must lie inside [0, {t_max}]"),
                    ));
                }
            }
            Experiment::Fidelity { deltas } if deltas.is_empty() => {
                return Err(invalid("experiment.deltas", "must be non-empty".into()));
            }
            _ => {}
        }
        debug_assert!(!self.experiment.uses_quantum_walk() || self.coin.is_some());
        Ok(())
    }

    fn lattice_n(&self) -> Result<usize> {
        match &self.lattice {
            Some(LatticeSpec { n }) if *n > 0 => Ok(*n),
            Some(_) => Err(invalid("lattice.n", "must be positive".into())),
            None => Err(invalid("lattice", "missing".into())),
        }
    }

    /// The base config with one variant's overrides applied.
    pub fn apply(&self, v: &Variant) -> Result<ExperimentConfig> {
        let mut c = self.clone();
        c.variants.clear();
        if let Some(coin) = &v.coin {
            c.coin = Some(coin.clone());
        }
        if let Some(g) = v.g {
            coin_field(&mut c, "g")?.g = Some(g);
        }
        if let Some(m) = v.m {
            coin_field(&mut c, "m")?.m = Some(m);
        }
        if let Some(seed) = v.seed {
            match &mut c.experiment {
                Experiment::Portrait { seed: s, .. } => *s = seed,
                _ => coin_field(&mut c, "seed")?.seed = Some(seed),
            }
        }
        if let Some(n) = v.n {
            c.lattice = Some(LatticeSpec { n });
        }
        if v.n_orbits.is_some() || v.n_steps.is_some() {
            let Experiment::Portrait { n_orbits, n_steps, .. } = &mut c.experiment else {
                return Err(invalid("n_orbits", "only portraits take orbit overrides".into()));
            };
            *n_orbits = v.n_orbits.unwrap_or(*n_orbits);
            *n_steps = v.n_steps.unwrap_or(*n_steps);
        }
        Ok(c)
    }

    /// One `(subdirectory, config)` pair per variant, or the base config alone.
    pub fn jobs(&self) -> Result<Vec<(Option<String>, ExperimentConfig)>> {
        if self.variants.is_empty() {
            return Ok(vec![(None, self.clone())]);
        }
        self.variants.iter().map(|v| Ok((Some(v.name.clone()), self.apply(v)?))).collect()
    }

    pub(crate) fn walk_config(&self, base: &Path) -> Result<WalkConfig> {
        let coin = self.coin.as_ref().ok_or_else(|| invalid("coin", "missing".into()))?.build(base)?;
        let init = self.initial.clone().unwrap_or_default();
        WalkConfig::with_initial(coin, self.lattice_n()?, init.coin_index, init.site)
    }

    /// Seeds that determine the run's random content.
    pub fn seeds(&self) -> Vec<u64> {
        let mut seeds = Vec::new();
        match &self.experiment {
            Experiment::Portrait { seed, .. } => seeds.push(*seed),
            Experiment::TdSweep { seeds: s, .. } => seeds.extend(s),
            _ => {}
        }
        if let Some(CoinSpec { kind: CoinKind::Cue, seed: Some(s), .. }) = &self.coin {
            seeds.push(*s);
        }
        seeds
    }
}

/// Dotted key path of the TOML entry enclosing byte offset `pos`.
fn key_at(text: &str, pos: usize) -> String {
    let mut table = String::new();
    let mut key = String::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if trimmed.starts_with('[') {
            table = trimmed.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            key.clear();
        } else if let Some((k, _)) = trimmed.split_once('=') {
            key = k.trim().to_string();
        }
        offset += line.len();
        if offset > pos {
            break;
        }
    }
    match (table.is_empty(), key.is_empty()) {
        (true, _) => key,
        (false, true) => table,
        (false, false) => format!("{table}.{key}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WALK: &str = r#"
[coin]
type = "cue"
m = 64
seed = 7

[lattice]
n = 101

[run]
t_max = 40

[outputs]
dir = "out"

[experiment]
kind = "walk"
"#;

    #[test]
    fn parses_and_validates() {
        let c = ExperimentConfig::from_toml_str(WALK).unwrap();
        c.validate().unwrap();
        assert_eq!(c.coin.as_ref().unwrap().m, Some(64));
        assert_eq!(c.run.as_ref().unwrap().sample_every, 1);
        assert_eq!(c.outputs.formats, vec![Format::Csv, Format::Json]);
        let again = ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn unknown_key_names_its_path() {
        let text = WALK.replace("seed = 7", "seed = 7\nsed = 3");
        match ExperimentConfig::from_toml_str(&text) {
            Err(Error::InvalidConfig { path, message }) => {
                assert_eq!(path, "coin.sed");
                assert!(message.contains("sed"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let text = WALK.replace("kind = \"walk\"", "kind = \"walk\"\ndeltas = [1]");
        assert!(ExperimentConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn cross_field_checks() {
        let odd = ExperimentConfig::from_toml_str(&WALK.replace("m = 64", "m = 63")).unwrap();
        assert!(matches!(odd.validate(), Err(Error::InvalidConfig { path, .. }) if path == "coin.m"));
        let site =
            ExperimentConfig::from_toml_str(&WALK.replace("[run]", "[initial]\ncoin_index = 0\nsite = 101\n\n[run]"))
                .unwrap();
        assert!(matches!(site.validate(), Err(Error::InvalidConfig { path, .. }) if path == "initial.site"));
        let extra = ExperimentConfig::from_toml_str(&WALK.replace("seed = 7", "seed = 7\ng = 0.1")).unwrap();
        assert!(matches!(extra.validate(), Err(Error::InvalidConfig { path, .. }) if path == "coin.g"));
        let no_lattice = ExperimentConfig::from_toml_str(&WALK.replace("[lattice]\nn = 101", "")).unwrap();
        assert!(matches!(no_lattice.validate(), Err(Error::InvalidConfig { path, .. }) if path == "lattice"));
    }

    #[test]
    fn variants_override_and_validate() {
        let text =
            format!("{WALK}\n[[variants]]\nname = \"small\"\nm = 4\nn = 5\n\n[[variants]]\nname = \"bad\"\nm = 5\n");
        let c = ExperimentConfig::from_toml_str(&text).unwrap();
        match c.validate() {
            Err(Error::InvalidConfig { path, .. }) => assert_eq!(path, "variants[1] -> coin.m"),
            other => panic!("{other:?}"),
        }
        let jobs = c.jobs().unwrap();
        assert_eq!(jobs[0].0.as_deref(), Some("small"));
        assert_eq!(jobs[0].1.lattice, Some(LatticeSpec { n: 5 }));
        assert!(jobs[0].1.variants.is_empty());
    }

    #[test]
    fn figure_config_is_exclusive() {
        let ok = ExperimentConfig::from_toml_str("[experiment]\nkind = \"figure\"\nname = \"fig5b\"\n").unwrap();
        ok.validate().unwrap();
        let unknown = ExperimentConfig::from_toml_str("[experiment]\nkind = \"figure\"\nname = \"fig9\"\n").unwrap();
        assert!(matches!(unknown.validate(), Err(Error::UnknownPreset(_))));
        let mixed =
            ExperimentConfig::from_toml_str(&WALK.replace("kind = \"walk\"", "kind = \"figure\"\nname = \"fig5b\""))
                .unwrap();
        assert!(mixed.validate().is_err());
    }
}
