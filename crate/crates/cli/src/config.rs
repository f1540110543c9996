use std::path::Path;

use anyhow::{bail, Context};
use clap::Args;
use serde::{Deserialize, Serialize};

use cylneat::elementarity::DEFAULT_GAME_BUDGET;
use cylneat::interpretation::DEFAULT_V_CAP;
use cylneat::neat::DEFAULT_NODE_BUDGET;
use cylneat::witness::{DEFAULT_ATOM_CAP, DEFAULT_POINT_BUDGET};
use cylneat::DEFAULT_CARRIER_CAP;

/// Every parameter a command may use. Embedded in each output document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub n: usize,
    pub k: usize,
    pub m0: usize,
    pub rcount: usize,
    pub depth: usize,
    pub seed: u64,
    pub q: usize,
    /// Length bound `L` on parameter tuples in the subalgebra games.
    pub params: usize,
    pub max_base: usize,
    pub carrier_cap: usize,
    pub dilation_atom_cap: usize,
    pub v_cap: usize,
    pub point_budget: usize,
    pub game_budget: u64,
    pub node_budget: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            n: 2,
            k: 1,
            m0: 2,
            rcount: 3,
            depth: 1,
            seed: 0,
            q: 2,
            params: 1,
            max_base: 5,
            carrier_cap: DEFAULT_CARRIER_CAP,
            dilation_atom_cap: DEFAULT_ATOM_CAP,
            v_cap: DEFAULT_V_CAP,
            point_budget: DEFAULT_POINT_BUDGET,
            game_budget: DEFAULT_GAME_BUDGET,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// Flags that override the config file.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Dimension of the algebra
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Extra dimensions of the dilation
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Initial points per block
    #[arg(long, global = true)]
    pub m0: Option<usize>,
    /// Number of colors
    #[arg(long, global = true)]
    pub rcount: Option<usize>,
    /// Saturation rounds
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Seed for the closing-phase coloring
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Game rounds
    #[arg(long, global = true)]
    pub q: Option<usize>,
    /// Parameter tuple length in the subalgebra games
    #[arg(long, short = 'L', global = true)]
    pub params: Option<usize>,
    /// Largest base size for the dilation search
    #[arg(long, global = true)]
    pub max_base: Option<usize>,
    /// Node budget for the dilation search
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Extension budget per game
    #[arg(long, global = true)]
    pub game_budget: Option<u64>,
    /// Largest number of points the builder may add
    #[arg(long, global = true)]
    pub point_budget: Option<usize>,
    /// Largest enumerated carrier
    #[arg(long, global = true)]
    pub carrier_cap: Option<usize>,
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>, o: &Overrides) -> anyhow::Result<Self> {
        let mut c = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => PipelineConfig::default(),
        };
        macro_rules! set {
            ($($f:ident => $g:ident),*) => { $( if let Some(v) = o.$f { c.$g = v; } )* };
        }
        set!(n => n, k => k, m0 => m0, rcount => rcount, depth => depth, seed => seed, q => q,
             params => params, max_base => max_base, budget => node_budget, game_budget => game_budget,
             point_budget => point_budget, carrier_cap => carrier_cap);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if !(2..=3).contains(&self.n) {
            bail!("n must be 2 or 3");
        }
        if self.k == 0 || self.m0 == 0 || self.rcount == 0 {
            bail!("k, m0 and rcount must be positive");
        }
        if self.q > 4 || self.params > 3 {
            bail!("q is at most 4 and L at most 3");
        }
        if self.max_base > 8 {
            bail!("max-base is at most 8");
        }
        Ok(())
    }
}
