use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use qsteer::factory::{random_state, t_state, werner};
use qsteer::io::load_state;
use qsteer::qubit::TwoQubitState;

/// Where the analyzed state comes from; exactly one source is required.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct StateArgs {
    /// State file, `{"density": ...}` or `{"g": ...}`
    #[arg(long, value_name = "PATH")]
    pub state: Option<PathBuf>,
    /// Werner state with singlet weight p
    #[arg(long, value_name = "P")]
    pub werner: Option<f64>,
    /// Bell-diagonal state with T = diag(t1, t2, t3)
    #[arg(long, value_name = "T1,T2,T3", value_parser = parse_triple, allow_hyphen_values = true)]
    pub tstate: Option<[f64; 3]>,
    /// Seeded random state
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
}

impl StateArgs {
    pub fn load(&self) -> Result<TwoQubitState> {
        if let Some(path) = &self.state {
            return load_state(path).with_context(|| format!("--state {}", path.display()));
        }
        if let Some(p) = self.werner {
            return werner(p).context("--werner");
        }
        if let Some([t1, t2, t3]) = self.tstate {
            return t_state(t1, t2, t3).context("--tstate");
        }
        if let Some(seed) = self.seed {
            return Ok(random_state(seed));
        }
        bail!("one of --state, --werner, --tstate or --seed is required")
    }
}

pub fn parse_triple(s: &str) -> std::result::Result<[f64; 3], String> {
    let v = parse_list(s)?;
    <[f64; 3]>::try_from(v.as_slice()).map_err(|_| format!("expected three comma-separated numbers, got `{s}`"))
}

pub fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("`{x}` is not a number")))
        .collect()
}

/// `werner:<p>`, `tstate:<t1,t2,t3>`, `seed:<n>` or a state file path.
pub fn state_from_spec(spec: &str) -> Result<TwoQubitState> {
    match spec.split_once(':') {
        Some(("werner", p)) => werner(p.parse().with_context(|| format!("werner weight `{p}`"))?).map_err(Into::into),
        Some(("tstate", t)) => {
            let [t1, t2, t3] = parse_triple(t).map_err(anyhow::Error::msg)?;
            t_state(t1, t2, t3).map_err(Into::into)
        }
        Some(("seed", n)) => Ok(random_state(n.parse().with_context(|| format!("seed `{n}`"))?)),
        _ => load_state(spec).with_context(|| format!("state file {spec}")),
    }
}
