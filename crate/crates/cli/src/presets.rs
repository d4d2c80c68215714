//! Bundled sweeps over the reference scenario.
//!
//! Axis ranges are reconstructions: rate figures span -10..50 dB (-10..30 dB
//! for the single-antenna comparison), outage figures span 0..60 dB so the
//! 40-60 dB slope window is populated.

use crsnoma_core::{Combiner, Method, Scheme, SystemConfig};

use crate::sweep::{A2Mode, Metric, SweepSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub variants: Vec<(String, SystemConfig)>,
    pub spec: SweepSpec,
}

pub const PRESET_NAMES: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "fig6"];

const RATES: [Metric; 3] = [Metric::RateS1, Metric::RateS2, Metric::RateSum];

fn reference_variant() -> Vec<(String, SystemConfig)> {
    vec![("reference".to_string(), SystemConfig::reference())]
}

fn interference_variant(sp: f64, rp: f64) -> (String, SystemConfig) {
    let cfg = SystemConfig {
        omega_sp: sp,
        omega_rp: rp,
        ..SystemConfig::reference()
    };
    (format!("omega_sp={sp},omega_rp={rp}"), cfg)
}

fn outage_spec(metric: Metric) -> SweepSpec {
    SweepSpec {
        q_db_min: 0.0,
        q_db_max: 60.0,
        q_db_step: 2.0,
        schemes: vec![Scheme::Noma, Scheme::Oma],
        combiners: vec![Combiner::Single, Combiner::Sc, Combiner::Mrc],
        antenna_sets: vec![(2, 2), (2, 3)],
        methods: vec![Method::ClosedForm, Method::MonteCarlo],
        metrics: vec![metric],
        a2_mode: A2Mode::Fixed,
        ..SweepSpec::default()
    }
}

pub fn preset(name: &str) -> Option<Preset> {
    let p = match name {
        // Single antenna, NOMA versus OMA rates.
        "fig2" => Preset {
            name: "fig2",
            variants: reference_variant(),
            spec: SweepSpec {
                q_db_min: -10.0,
                q_db_max: 30.0,
                metrics: RATES.to_vec(),
                ..SweepSpec::default()
            },
        },
        // Interference-link strengths.
        "fig3" => Preset {
            name: "fig3",
            variants: vec![
                interference_variant(1.5, 5.5),
                interference_variant(5.5, 1.5),
                interference_variant(5.5, 5.5),
            ],
            spec: SweepSpec {
                metrics: RATES.to_vec(),
                ..SweepSpec::default()
            },
        },
        // Multi-antenna rates.
        "fig4" => Preset {
            name: "fig4",
            variants: reference_variant(),
            spec: SweepSpec {
                combiners: vec![Combiner::Sc, Combiner::Mrc],
                antenna_sets: vec![(1, 1), (2, 2), (2, 3)],
                metrics: RATES.to_vec(),
                ..SweepSpec::default()
            },
        },
        "fig5" => Preset {
            name: "fig5",
            variants: reference_variant(),
            spec: outage_spec(Metric::OutageS1),
        },
        "fig6" => Preset {
            name: "fig6",
            variants: reference_variant(),
            spec: outage_spec(Metric::OutageS2),
        },
        _ => return None,
    };
    Some(p)
}
