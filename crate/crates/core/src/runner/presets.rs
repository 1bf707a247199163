use super::config::{CoinSpec, Experiment, ExperimentConfig, InitialSpec, LatticeSpec, OutputSpec, RunSpec, Variant};
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 15] = [
    "fig1", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig5c", "fig6a", "fig6b", "fig6c",
    "fig7a", "fig7b",
];

/// Seed of every CUE coin drawn by a preset.
pub const PRESET_CUE_SEED: u64 = 7;
/// Seed of the initial conditions drawn for portraits.
pub const PRESET_PORTRAIT_SEED: u64 = 1;
/// Seeds of the diffusive-time sweep.
pub const PRESET_SWEEP_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

/// Time window over which saturated entropies and spectra are collected.
pub const SATURATION_WINDOW: [usize; 2] = [700, 1700];

fn walk(coin: CoinSpec, n: usize, t_max: usize, sample_every: usize, experiment: Experiment) -> ExperimentConfig {
    ExperimentConfig {
        coin: Some(coin),
        lattice: Some(LatticeSpec { n }),
        initial: Some(InitialSpec::default()),
        run: Some(RunSpec { t_max, sample_every }),
        outputs: OutputSpec::default(),
        experiment,
        variants: Vec::new(),
    }
}

fn g_variants(values: &[(&str, f64)]) -> Vec<Variant> {
    values.iter().map(|&(name, g)| Variant { g: Some(g), ..Variant::named(name) }).collect()
}

fn n_variants(values: &[usize]) -> Vec<Variant> {
    values.iter().map(|&n| Variant { n: Some(n), ..Variant::named(format!("n{n}")) }).collect()
}

fn entropy_run(coin: CoinSpec, n: usize) -> ExperimentConfig {
    walk(coin, n, SATURATION_WINDOW[1], 1, Experiment::Entropy { saturation_window: Some(SATURATION_WINDOW) })
}

fn spectra_run(m: usize, n: usize) -> ExperimentConfig {
    walk(
        CoinSpec::cue(m, PRESET_CUE_SEED),
        n,
        SATURATION_WINDOW[1],
        10,
        Experiment::Spectra { window: SATURATION_WINDOW },
    )
}

/// The configuration reproducing one figure's data. Output settings are left
/// at their defaults.
pub fn figure_preset(name: &str) -> Result<ExperimentConfig> {
    let near_integrable_and_chaotic = || g_variants(&[("g0.01", 0.01), ("g0.4", 0.4)]);
    let config = match name {
        "fig1" => ExperimentConfig {
            coin: Some(CoinSpec { m: None, ..CoinSpec::harper(2, 0.01) }),
            lattice: None,
            initial: None,
            run: None,
            outputs: OutputSpec::default(),
            experiment: Experiment::Portrait { n_orbits: 100, n_steps: 1000, seed: PRESET_PORTRAIT_SEED, cells: 50 },
            variants: vec![
                Variant { g: Some(0.01), ..Variant::named("g0.01") },
                Variant { g: Some(0.05), ..Variant::named("g0.05") },
                Variant { g: Some(0.4), n_orbits: Some(1), n_steps: Some(100_000), ..Variant::named("g0.4") },
            ],
        },
        "fig2a" => ExperimentConfig {
            variants: near_integrable_and_chaotic(),
            ..walk(CoinSpec::harper(64, 0.01), 101, 40, 40, Experiment::Walk {})
        },
        "fig2b" => ExperimentConfig {
            variants: near_integrable_and_chaotic(),
            ..walk(CoinSpec::harper(64, 0.01), 101, 100, 100, Experiment::Walk {})
        },
        "fig2c" => walk(CoinSpec::harper(40, 0.4), 401, 1500, 100, Experiment::Walk {}),
        "fig3a" => {
            walk(CoinSpec::cue(256, PRESET_CUE_SEED), 101, 40, 1, Experiment::Fidelity { deltas: vec![1, 3, 5, 7, 9] })
        }
        "fig3b" => ExperimentConfig {
            variants: vec![
                Variant::named("cue"),
                Variant { coin: Some(CoinSpec::harper(256, 0.4)), ..Variant::named("harper_g0.4") },
            ],
            ..walk(CoinSpec::cue(256, PRESET_CUE_SEED), 101, 40, 40, Experiment::Walk {})
        },
        "fig4" => ExperimentConfig {
            coin: None,
            lattice: None,
            initial: None,
            run: Some(RunSpec { t_max: 200, sample_every: 1 }),
            outputs: OutputSpec::default(),
            experiment: Experiment::TdSweep {
                m_values: vec![10, 20, 30, 40, 50, 60, 70, 80],
                n_offset: 1,
                seeds: PRESET_SWEEP_SEEDS.to_vec(),
            },
            variants: Vec::new(),
        },
        "fig5a" => entropy_run(CoinSpec::cue(100, PRESET_CUE_SEED), 21),
        "fig5b" => entropy_run(CoinSpec::cue(70, PRESET_CUE_SEED), 71),
        "fig5c" => entropy_run(CoinSpec::cue(20, PRESET_CUE_SEED), 101),
        "fig6a" => spectra_run(100, 21),
        "fig6b" => spectra_run(70, 71),
        "fig6c" => spectra_run(20, 101),
        "fig7a" => {
            ExperimentConfig { variants: n_variants(&[60, 61]), ..entropy_run(CoinSpec::cue(60, PRESET_CUE_SEED), 61) }
        }
        "fig7b" => ExperimentConfig { variants: n_variants(&[60, 61]), ..entropy_run(CoinSpec::harper(60, 0.001), 61) },
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    Ok(config)
}

/// Replaces every seed a preset draws from with ones derived from `seed`.
pub fn reseed(config: &mut ExperimentConfig, seed: u64) {
    if let Some(coin) = config.coin.as_mut().filter(|c| c.seed.is_some()) {
        coin.seed = Some(seed);
    }
    for v in &mut config.variants {
        if let Some(coin) = v.coin.as_mut().filter(|c| c.seed.is_some()) {
            coin.seed = Some(seed);
        }
    }
    match &mut config.experiment {
        Experiment::Portrait { seed: s, .. } => *s = seed,
        Experiment::TdSweep { seeds, .. } => {
            let count = seeds.len() as u64;
            *seeds = (0..count).map(|i| seed + i).collect();
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::config::CoinKind;

    #[test]
    fn every_preset_validates() {
        for name in PRESET_NAMES {
            figure_preset(name).unwrap().validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(matches!(figure_preset("fig8"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn caption_geometries() {
        let c = figure_preset("fig2c").unwrap();
        let coin = c.coin.unwrap();
        assert_eq!((coin.kind, coin.g, coin.m), (CoinKind::Harper, Some(0.4), Some(40)));
        assert_eq!(c.lattice.unwrap().n, 401);
        assert!(c.run.unwrap().t_max >= 1500);

        let c = figure_preset("fig5b").unwrap();
        assert_eq!(c.coin.unwrap().kind, CoinKind::Cue);
        assert_eq!(c.lattice.unwrap().n, 71);

        let jobs = figure_preset("fig7a").unwrap().jobs().unwrap();
        let ns: Vec<usize> = jobs.iter().map(|(_, c)| c.lattice.as_ref().unwrap().n).collect();
        assert_eq!(ns, vec![60, 61]);
        assert!(jobs.iter().all(|(_, c)| c.coin.as_ref().unwrap().m == Some(60)));

        let jobs = figure_preset("fig2b").unwrap().jobs().unwrap();
        let gs: Vec<f64> = jobs.iter().map(|(_, c)| c.coin.as_ref().unwrap().g.unwrap()).collect();
        assert_eq!(gs, vec![0.01, 0.4]);
    }

    #[test]
    fn reseeding() {
        let mut c = figure_preset("fig3a").unwrap();
        reseed(&mut c, 99);
        assert_eq!(c.coin.unwrap().seed, Some(99));
        let mut c = figure_preset("fig2a").unwrap();
        reseed(&mut c, 99);
        assert_eq!(c, figure_preset("fig2a").unwrap());
    }
}
